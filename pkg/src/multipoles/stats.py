"""Random-matrix sampling, synthetic data with planted structure, and
permutation-style significance testing.

Every sampler draws through numpy Generator streams in fixed-size internal
batches, so output is a deterministic function of the seed and a shorter
run is a prefix of a longer one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from . import dataset, linalg, measures

_DRAW_BATCH = 8192
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class ScatterSample:
    """Gain and self-canceling max correlation of one sampled matrix."""

    k: int
    gain: float
    rho_s: float


@dataclass(frozen=True)
class NullDistribution:
    """Sorted linear-dependence values from random variable sets.

    Querying p-values is only meaningful with a reasonably large sample;
    p_value refuses below 1000.
    """

    sample_count: int
    sorted_sigmas: tuple[float, ...]
    set_size: int

    def __post_init__(self):
        if self.sample_count != len(self.sorted_sigmas):
            raise ValueError("sample_count does not match the number of sigmas")
        arr = np.asarray(self.sorted_sigmas)
        if arr.size and (np.any(arr[:-1] > arr[1:]) or arr[0] < 0.0 or arr[-1] > 1.0):
            raise ValueError("sigmas must be ascending and within [0, 1]")

    @classmethod
    def from_pool(cls, k: int, pool, samples: int, seed) -> "NullDistribution":
        sigmas = _null_sigmas(k, pool, samples, seed)
        sigmas.sort()
        return cls(sample_count=samples, sorted_sigmas=tuple(float(x) for x in sigmas), set_size=k)

    def p_value(self, candidate_sigma: float) -> float:
        if self.sample_count < 1000:
            raise ValueError(f"need at least 1000 null samples for a p-value, have {self.sample_count}")
        arr = np.asarray(self.sorted_sigmas)
        count_ge = self.sample_count - int(np.searchsorted(arr, candidate_sigma, side="left"))
        return (1 + count_ge) / (self.sample_count + 1)


def _accepted_stack(k: int, count: int, seed) -> NDArray[np.float64]:
    """`count` correlation matrices with uniform [-1,1] off-diagonals,
    kept iff PSD within 1e-10, in draw order."""
    if not (2 <= k <= 8):
        raise ValueError(f"k must lie in [2, 8], got {k}")
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(k, 1)
    chunks = []
    have = 0
    while have < count:
        draws = rng.uniform(-1.0, 1.0, size=(_DRAW_BATCH, iu.size))
        mats = np.broadcast_to(np.eye(k), (_DRAW_BATCH, k, k)).copy()
        mats[:, iu, ju] = draws
        mats[:, ju, iu] = draws
        lam = linalg.eigh_many(mats, vectors=False)[0][:, 0]
        ok = lam >= -_PSD_TOL
        accepted = mats[ok]
        chunks.append(accepted)
        have += accepted.shape[0]
    return np.concatenate(chunks, axis=0)[:count]


def sample_correlation_matrices(k: int, count: int, seed) -> Iterator[dataset.CorrelationMatrix]:
    """Stream of random PSD correlation matrices; deterministic per seed."""
    stack = _accepted_stack(k, count, seed)
    for t in range(stack.shape[0]):
        yield dataset.CorrelationMatrix(entries=stack[t])


def scatter(k: int, count: int, seed) -> list[ScatterSample]:
    """Gain versus self-canceling max correlation over sampled matrices."""
    if k < 3:
        raise ValueError(f"scatter needs k >= 3, got {k}")
    stack = _accepted_stack(k, count, seed)
    study = measures._study_stack(stack)
    return [
        ScatterSample(k=k, gain=float(g), rho_s=float(r))
        for g, r in zip(study.gain, study.rho_s)
    ]


def write_scatter_csv(samples: Sequence[ScatterSample], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("k,gain,rho_s\n")
        for s in samples:
            fh.write(f"{s.k},{s.gain!r},{s.rho_s!r}\n")


def sample_planted_matrices(
    k: int,
    count: int,
    seed,
    dependence_min: float = 0.75,
    gain_min: float = 0.15,
    rho_max: float = -0.2,
    lambda_floor: float = 1e-4,
) -> list[dataset.CorrelationMatrix]:
    """Correlation matrices suitable as planted ground truth.

    Proposes near-equicorrelated matrices close to the extremal geometry
    r = -1/(k-1) (shrunk toward zero by a small uniform factor, then
    entrywise jittered) and keeps those with dependence >= dependence_min,
    gain >= gain_min, every self-canceling correlation <= rho_max, and
    smallest eigenvalue >= lambda_floor. The margins matter: a planted set
    is recoverable from data of finite length only if sampling noise cannot
    push its dependence or gain under the mining thresholds, nor any
    pairwise correlation across the graph-construction threshold. Plain
    uniform PSD sampling conditioned on dependence and gain alone produces
    mostly matrices with near-zero pairwise correlations, which no graph at
    moderately negative rho can recover.
    """
    if k < 3:
        raise ValueError(f"planted matrices need k >= 3, got {k}")
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(k, 1)
    u_hi = 0.32 / (k - 1)
    jit = 0.1 / (k - 1)
    out: list[dataset.CorrelationMatrix] = []
    batch = 512
    while len(out) < count:
        u = rng.uniform(0.02, u_hi, size=batch)
        base = -(1.0 - u) / (k - 1)
        jitter = rng.uniform(-jit, jit, size=(batch, iu.size))
        mats = np.broadcast_to(np.eye(k), (batch, k, k)).copy()
        vals = base[:, None] + jitter
        mats[:, iu, ju] = vals
        mats[:, ju, iu] = vals
        study = measures._study_stack(mats)
        ok = (
            (study.lambda_min >= lambda_floor)
            & (1.0 - study.lambda_min >= dependence_min)
            & (study.gain >= gain_min)
            & (study.rho_s <= rho_max)
        )
        for t in np.nonzero(ok)[0]:
            if len(out) == count:
                break
            out.append(dataset.CorrelationMatrix(entries=mats[t]))
    return out


def synth_dataset(planted, noise_count: int, T: int, seed):
    """Gaussian dataset realizing the planted correlation blocks.

    Each planted matrix of size k contributes k columns drawn as white noise
    mixed through its Cholesky factor; noise_count independent columns are
    appended; the column order is then shuffled. Returns the unstandardized
    dataset and the planted member index lists in shuffled coordinates.
    """
    mats = [measures._entries(p) for p in planted]
    if noise_count < 0:
        raise ValueError("noise_count must be >= 0")
    max_k = max((m.shape[0] for m in mats), default=0)
    if T < max(3, 50 * max_k):
        raise ValueError(f"T={T} too short: need at least {max(3, 50 * max_k)}")
    for i, m in enumerate(mats):
        lam = linalg.eigh_many(m[None], vectors=False)[0][0, 0]
        if lam <= 1e-6:
            raise ValueError(f"planted matrix {i} is not strictly positive definite (lambda_min={lam:.3e})")
    rng = np.random.default_rng(seed)
    blocks = []
    for m in mats:
        L = linalg.cholesky(m)
        X = rng.standard_normal((T, m.shape[0]))
        blocks.append(X @ L.T)
    if noise_count:
        blocks.append(rng.standard_normal((T, noise_count)))
    values = np.concatenate(blocks, axis=1) if blocks else np.empty((T, 0))
    N = values.shape[1]
    if N < 2:
        raise ValueError("need at least 2 columns in total")
    perm = rng.permutation(N)
    values = values[:, perm]
    inverse = np.argsort(perm)
    truth = []
    offset = 0
    for m in mats:
        k = m.shape[0]
        truth.append(sorted(int(inverse[offset + j]) for j in range(k)))
        offset += k
    width = max(4, len(str(N - 1)))
    names = tuple(f"v{i:0{width}d}" for i in range(N))
    return dataset.TimeSeriesDataset(names=names, values=values), truth


def _check_pool(pool, k: int | None = None):
    if not pool:
        raise ValueError("pool of datasets must be nonempty")
    T = pool[0].T
    for i, d in enumerate(pool):
        if not d.standardized:
            raise ValueError(f"pool dataset {i} is not standardized")
        if d.T != T:
            raise ValueError(f"pool dataset {i} has T={d.T}, expected {T}")
    if k is not None and len(pool) < k:
        raise ValueError(f"pool of {len(pool)} datasets cannot supply {k} distinct windows")
    return T


def _null_sigmas(k: int, pool, samples: int, seed) -> NDArray[np.float64]:
    """Linear dependence of `samples` random k-sets: members drawn from k
    distinct pool datasets, variable uniform within each."""
    if k < 2:
        raise ValueError(f"set size must be >= 2, got {k}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    T = _check_pool(pool, k)
    rng = np.random.default_rng(seed)
    P = len(pool)
    out = np.empty(samples)
    chunk = 2048
    buf = np.empty((chunk, T, k))
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        for t in range(n):
            windows = rng.choice(P, size=k, replace=False)
            for j, w in enumerate(windows):
                col = int(rng.integers(0, pool[w].N))
                buf[t, :, j] = pool[w].values[:, col]
        X = buf[:n]
        C = np.einsum("bti,btj->bij", X, X) / (T - 1)
        np.clip(C, -1.0, 1.0, out=C)
        C[:, np.arange(k), np.arange(k)] = 1.0
        lam = linalg.eigh_many(C, vectors=False)[0][:, 0]
        out[done : done + n] = np.clip(1.0 - lam, 0.0, 1.0)
        done += n
    return out


def significance_sigma(candidate_sigma: float, k: int, pool, samples: int, seed) -> float:
    """Upper-tail add-one p-value of a dependence value against a random null.

    p = (1 + #{null sigma >= candidate}) / (samples + 1); small p means the
    candidate's dependence is rarely matched by chance.
    """
    sigmas = _null_sigmas(k, pool, samples, seed)
    count_ge = int((sigmas >= candidate_sigma).sum())
    return (1 + count_ge) / (samples + 1)


def member_contribution(d: dataset.TimeSeriesDataset, multipole, member: int, pool, repeats: int, seed) -> float:
    """p-value for one member: does replacing it with a random pool series
    reach the original set's dependence as often as not?

    p = (1 + #{replaced-set sigma >= original sigma}) / (repeats + 1). A
    small p says the member is essential, not exchangeable with noise.
    """
    if repeats < 100:
        raise ValueError(f"repeats must be >= 100, got {repeats}")
    if not d.standardized:
        raise ValueError("context dataset must be standardized")
    T = _check_pool(pool)
    if d.T != T:
        raise ValueError(f"context dataset has T={d.T}, pool has T={T}")
    members = tuple(sorted(int(m) for m in multipole))
    if member not in members:
        raise ValueError(f"member {member} is not in the set {members}")
    if members[-1] >= d.N:
        raise ValueError("member index out of range for the context dataset")
    k = len(members)
    pos = members.index(member)
    X = d.values[:, members]
    C0 = (X.T @ X) / (T - 1)
    np.clip(C0, -1.0, 1.0, out=C0)
    np.fill_diagonal(C0, 1.0)
    lam0 = linalg.eigh_many(C0[None], vectors=False)[0][0, 0]
    sigma0 = float(np.clip(1.0 - lam0, 0.0, 1.0))

    rng = np.random.default_rng(seed)
    P = len(pool)
    fixed = np.delete(X, pos, axis=1)
    repl = np.empty((T, repeats))
    for t in range(repeats):
        w = int(rng.integers(0, P))
        col = int(rng.integers(0, pool[w].N))
        repl[:, t] = pool[w].values[:, col]
    cross = (fixed.T @ repl) / (T - 1)
    np.clip(cross, -1.0, 1.0, out=cross)
    mats = np.broadcast_to(C0, (repeats, k, k)).copy()
    other = [i for i in range(k) if i != pos]
    mats[:, pos, :] = 0.0
    mats[:, :, pos] = 0.0
    mats[:, pos, pos] = 1.0
    for row, i in enumerate(other):
        mats[:, i, pos] = cross[row]
        mats[:, pos, i] = cross[row]
    lam = linalg.eigh_many(mats, vectors=False)[0][:, 0]
    sigmas = np.clip(1.0 - lam, 0.0, 1.0)
    count_ge = int((sigmas >= sigma0).sum())
    return (1 + count_ge) / (repeats + 1)


def reproducibility(
    multipole,
    datasets: Sequence[dataset.TimeSeriesDataset],
    alpha: float,
    pool,
    seed,
    samples: int = 10_000,
    repeats: int = 1_000,
) -> int:
    """Number of datasets where the set and all its members are significant.

    A dataset counts iff significance_sigma's p <= alpha and every member's
    member_contribution p <= alpha, both evaluated on that dataset with
    seeds derived per dataset.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    members = tuple(sorted(int(m) for m in multipole))
    k = len(members)
    root = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    children = root.spawn(len(datasets))
    count = 0
    for d, child in zip(datasets, children):
        if not d.standardized:
            raise ValueError("every dataset must be standardized")
        if members[-1] >= d.N:
            raise ValueError(f"member {members[-1]} absent from a dataset with N={d.N}")
        subs = child.spawn(1 + k)
        X = d.values[:, members]
        C = (X.T @ X) / (d.T - 1)
        np.clip(C, -1.0, 1.0, out=C)
        np.fill_diagonal(C, 1.0)
        lam = linalg.eigh_many(C[None], vectors=False)[0][0, 0]
        sigma = float(np.clip(1.0 - lam, 0.0, 1.0))
        p_sigma = significance_sigma(sigma, k, pool, samples, subs[0])
        if p_sigma > alpha:
            continue
        ok = True
        for i, m in enumerate(members):
            p = member_contribution(d, members, m, pool, repeats, subs[1 + i])
            if p > alpha:
                ok = False
                break
        count += 1 if ok else 0
    return count
