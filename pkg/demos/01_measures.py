"""Core measures on small matrices with known answers.

A multipole is a set of standardized series whose best linear combination
has unusually small variance. This demo walks the three quantities that
formalize the idea: the least variant normalized linear combination (LVNLC),
linear dependence, and linear gain, then shows the self-canceling form that
makes the relationship readable.
"""

import numpy as np

from multipoles import measures


def show(title, value):
    print(f"  {title:<46} {value}")


def main():
    print("== perfectly anticorrelated pair ==")
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    var, w = measures.lvnlc(a, [0, 1])
    show("LVNLC variance (0 = exact cancellation)", f"{var:.3f}")
    show("LVNLC weights", np.round(w, 4))
    show("linear dependence", f"{measures.linear_dependence(a, [0, 1]):.3f}")

    print("\n== equicorrelated triple, r = -0.5 ==")
    a = np.full((3, 3), -0.5)
    np.fill_diagonal(a, 1.0)
    var, w = measures.lvnlc(a, [0, 1, 2])
    show("LVNLC variance", f"{var:.6f}")
    show("LVNLC weights (equal by symmetry)", np.round(w, 4))
    show("linear dependence", f"{measures.linear_dependence(a, [0, 1, 2]):.3f}")
    show("linear gain over best pair", f"{measures.linear_gain(a, [0, 1, 2]):.3f}")

    print("\n== three-way relation invisible to pairs ==")
    # pairwise dependences only reach 0.67, yet the triple reaches 0.92:
    # each variable adds 0.25 of dependence the other two cannot supply
    a = np.array(
        [[1.0, -0.67, -0.42], [-0.67, 1.0, -0.26], [-0.42, -0.26, 1.0]]
    )
    sigma = measures.linear_dependence(a, [0, 1, 2])
    gain = measures.linear_gain(a, [0, 1, 2])
    show("best pairwise dependence", "0.670")
    show("triple dependence", f"{sigma:.3f}")
    show("linear gain", f"{gain:.3f}")

    print("\n== self-canceling form ==")
    # variable 2 moves with the combination of 0 and 1, so its LVNLC weight
    # is negative; flipping its sign leaves all pairwise correlations <= 0
    a = np.array([[1.0, -0.10, 0.70], [-0.10, 1.0, 0.60], [0.70, 0.60, 1.0]])
    var, w = measures.lvnlc(a, [0, 1, 2])
    show("raw LVNLC weights", np.round(w, 4))
    cf = measures.self_canceling_form(a, [0, 1, 2])
    show("signs after flipping negative weights", cf.signed.signs)
    show("weights after flips (all non-negative)", np.round(cf.weights, 4))
    show("largest adjusted correlation rho_s", f"{cf.rho_s:.3f}")

    w_ = measures.negative_equivalent_witness(a, [0, 1, 2], rho=0.0)
    show("negative-equivalent witness", w_.signs if w_ else None)


if __name__ == "__main__":
    main()
