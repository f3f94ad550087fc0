"""Mining pipeline: promising candidates from the signed graph, multipole
extraction with monotonicity pruning, duplicate and maximality filtering.

Also houses the exhaustive brute-force oracle, a seeded random-subset
searcher, and the result readers/writers shared by the command line tools.
"""

from __future__ import annotations

import csv as _csv
import itertools
import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from . import bounds, dataset, graph, linalg, measures


@dataclass(frozen=True)
class MinerConfig:
    """Thresholds and limits for a mining run.

    max_size defaults to the largest set size that can still reach gain
    delta_threshold (never below 3). rho = 0 keeps only sign patterns whose
    adjusted correlations are all nonpositive; raising rho toward 1 admits
    weaker candidates at growing cost, degenerating to exhaustive search.
    """

    sigma_threshold: float = 0.5
    delta_threshold: float = 0.15
    rho: float = 0.0
    max_size: int | None = None
    seed: int = 0
    clique_budget: int = 10_000_000

    def __post_init__(self):
        if not (0.0 <= self.sigma_threshold <= 1.0):
            raise ValueError(f"sigma_threshold must lie in [0, 1], got {self.sigma_threshold}")
        if not (0.0 < self.delta_threshold <= 1.0):
            raise ValueError(f"delta_threshold must lie in (0, 1], got {self.delta_threshold}")
        if not (-1.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if self.max_size is not None and self.max_size < 3:
            raise ValueError(f"max_size must be >= 3, got {self.max_size}")
        if self.clique_budget < 1:
            raise ValueError("clique_budget must be positive")

    def resolved_max_size(self) -> int:
        if self.max_size is not None:
            return self.max_size
        return max(3, bounds.max_size_for_gain(self.delta_threshold))


class MiningBudgetExceeded(RuntimeError):
    """A search budget was hit; carries whatever results the processed part produced."""

    def __init__(self, message: str, records: list, candidates_processed: int = 0):
        super().__init__(message)
        self.records = records
        self.candidates_processed = candidates_processed


def _resolve_matrix(data) -> NDArray[np.float64]:
    if isinstance(data, dataset.TimeSeriesDataset):
        if not data.standardized:
            raise ValueError("dataset must be standardized before mining")
        return dataset.correlation_matrix(data).entries
    return measures._entries(data)


def _sigma_of(lam: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.clip(1.0 - lam, 0.0, 1.0)


def _stack_lambda(M: NDArray[np.float64], masks, idx: tuple[int, ...], size: int) -> NDArray[np.float64]:
    """Smallest eigenvalue per mask; masks select positions within idx."""
    if size == 2:
        out = np.empty(len(masks))
        for t, m in enumerate(masks):
            i = (m & -m).bit_length() - 1
            j = (m >> (i + 1)).bit_length() + i
            c = M[idx[i], idx[j]]
            out[t] = 1.0 - abs(c)
        return out
    sub = np.empty((len(masks), size, size))
    for t, m in enumerate(masks):
        sel = np.array([idx[b] for b in range(len(idx)) if m >> b & 1], dtype=np.intp)
        sub[t] = M[np.ix_(sel, sel)]
    return linalg.eigh_many(sub, vectors=False)[0][:, 0]


def _make_records(M: NDArray[np.float64], member_tuples, sigmas, gains) -> list[measures.MultipoleRecord]:
    """Records with self-canceling signs and weights, batched per size."""
    order = sorted(range(len(member_tuples)), key=lambda t: (len(member_tuples[t]), t))
    out: list = [None] * len(member_tuples)
    for size, group in itertools.groupby(order, key=lambda t: len(member_tuples[t])):
        grp = list(group)
        sub = np.empty((len(grp), size, size))
        for row, t in enumerate(grp):
            sel = np.asarray(member_tuples[t], dtype=np.intp)
            sub[row] = M[np.ix_(sel, sel)]
        values, vecs = linalg.eigh_many(sub, vectors=True)
        near = (values[:, 1] - values[:, 0]) < measures.DEGENERATE_GAP
        w = vecs[:, :, 0]
        signs = np.where(w < -measures.FLIP_EPS, -1, 1)
        weights = w * signs
        for row, t in enumerate(grp):
            signed = measures.SignedSet.canonical(member_tuples[t], signs[row].tolist())
            out[t] = measures.MultipoleRecord(
                signed=signed,
                sigma=float(sigmas[t]),
                gain=float(gains[t]),
                weights=tuple(float(x) for x in weights[row]),
                maximal=False,
                near_degenerate=bool(near[row]),
            )
    return out


def extract_from_candidate(A, candidate: measures.SignedSet, cfg: MinerConfig) -> list[measures.MultipoleRecord]:
    """Multipoles within one candidate set.

    If the candidate passes both thresholds (and the size cap) it is returned
    alone. Otherwise, if its dependence clears sigma_threshold, subsets of
    size 3..max_size are enumerated largest-first: a subset is skipped without
    evaluation once any superset's dependence fell below the threshold
    (dependence is monotone in set inclusion), and eigenvalues are memoized
    per subset key. A candidate below sigma_threshold yields nothing.
    """
    M = measures._entries(A)
    idx = candidate.members
    k = len(idx)
    if k < 3:
        raise ValueError(f"candidate needs at least 3 members, got {k}")
    max_size = cfg.resolved_max_size()
    smax = min(k, max_size)
    sub_full = M[np.ix_(np.asarray(idx, dtype=np.intp), np.asarray(idx, dtype=np.intp))]
    lam_full = linalg.eigh_many(sub_full[None], vectors=False)[0][0, 0]
    sigma_full = float(_sigma_of(np.array([lam_full]))[0])
    if sigma_full < cfg.sigma_threshold:
        return []
    mus_full = measures._deletion_min_eigvals(sub_full[None])[0]
    gain_full = float(mus_full.min() - lam_full)
    if k <= max_size and gain_full >= cfg.delta_threshold:
        recs = _make_records(M, [idx], [sigma_full], [gain_full])
        return recs

    full_mask = (1 << k) - 1
    lam_memo: dict[int, float] = {full_mask: lam_full}
    for b in range(k):
        lam_memo[full_mask ^ (1 << b)] = float(mus_full[b])
    alive_prev = [full_mask]
    pending: dict[int, list[int]] = {k: [full_mask] if k <= smax else []}
    results: list[tuple[int, float, float]] = []

    def bits(m: int):
        b = 0
        while m:
            if m & 1:
                yield b
            m >>= 1
            b += 1

    for s in range(k - 1, 1, -1):
        cnt: Counter[int] = Counter()
        for m in alive_prev:
            for b in bits(m):
                cnt[m ^ (1 << b)] += 1
        eligible = sorted(m for m, c in cnt.items() if c == k - s)
        needed = {m ^ (1 << b) for m in pending.get(s + 1, []) for b in bits(m)}
        eval_masks = sorted((set(eligible) | needed) - lam_memo.keys())
        if eval_masks:
            lam = _stack_lambda(M, eval_masks, idx, s)
            for t, m in enumerate(eval_masks):
                lam_memo[m] = float(lam[t])
        for m in pending.get(s + 1, []):
            lam_m = lam_memo[m]
            mu = min(lam_memo[m ^ (1 << b)] for b in bits(m))
            gain = mu - lam_m
            if gain >= cfg.delta_threshold:
                results.append((m, min(1.0, max(0.0, 1.0 - lam_m)), gain))
        alive_prev = [m for m in eligible if min(1.0, max(0.0, 1.0 - lam_memo[m])) >= cfg.sigma_threshold]
        pending[s] = alive_prev if 3 <= s <= smax else []
        if not alive_prev:
            break
    # size-3 pendings have their deletions at size 2, handled by the s=2 pass above
    if not results:
        return []
    results.sort(key=lambda r: (-bin(r[0]).count("1"), r[0]))
    tuples = [tuple(idx[b] for b in bits(m)) for m, _, _ in results]
    return _make_records(M, tuples, [r[1] for r in results], [r[2] for r in results])


def remove_non_maximal(records) -> list[measures.MultipoleRecord]:
    """Keep each member set once and drop sets contained in an accepted set.

    Processes records largest-first (ties by canonical order); an accepted
    set blocks all of its subsets from later acceptance.
    """
    ordered = sorted(records, key=lambda r: (-r.size, r.signed))
    blocked: set[tuple[int, ...]] = set()
    out = []
    for rec in ordered:
        key = rec.members
        if key in blocked:
            continue
        out.append(replace(rec, maximal=True))
        n = len(key)
        for size in range(3, n + 1):
            for comb in itertools.combinations(key, size):
                blocked.add(comb)
    return out


def _final_sort(records) -> list[measures.MultipoleRecord]:
    return sorted(records, key=lambda r: (-r.gain, -r.sigma, r.signed))


def _dedup_candidates(g: graph.PromisingGraph, cliques) -> list[measures.SignedSet]:
    """Signed sets for cliques, one per distinct member set.

    Mirror cliques share a canonical signed set, and candidates with equal
    members but different signs extract identically (both thresholds are
    sign-invariant), so the first occurrence represents them all.
    """
    seen: set[tuple[int, ...]] = set()
    out = []
    for cl in cliques:
        ss = graph.clique_to_signed_set(g, cl)
        if ss.members in seen:
            continue
        seen.add(ss.members)
        out.append(ss)
    return out


def mine(data, cfg: MinerConfig, threads: int = 1) -> list[measures.MultipoleRecord]:
    """All maximal multipoles of a standardized dataset (or correlation matrix).

    Candidates come from maximal cliques of the dual-copy graph at cfg.rho;
    each candidate is searched for threshold-satisfying subsets; duplicates
    and non-maximal sets are removed; output is sorted by descending gain,
    then descending dependence, then members. Deterministic for fixed input
    and config, independent of thread count.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    M = _resolve_matrix(data)
    g = graph.build_graph(M, cfg.rho)
    partial = False
    try:
        cliques = graph.maximal_cliques(g, min_size=3, budget=cfg.clique_budget)
    except graph.CliqueBudgetExceeded as e:
        cliques = sorted(e.partial)
        partial = True
    candidates = _dedup_candidates(g, cliques)
    if threads == 1 or len(candidates) < 2:
        per_candidate = [extract_from_candidate(M, c, cfg) for c in candidates]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_candidate = list(pool.map(lambda c: extract_from_candidate(M, c, cfg), candidates))
    merged: list[measures.MultipoleRecord] = []
    for recs in per_candidate:
        merged.extend(recs)
    final = _final_sort(remove_non_maximal(merged))
    if partial:
        raise MiningBudgetExceeded(
            f"clique budget of {cfg.clique_budget} exceeded after {len(candidates)} candidates; results are partial",
            final,
            len(candidates),
        )
    return final


def brute_force(data, cfg: MinerConfig, subset_budget: int = 2_000_000) -> list[measures.MultipoleRecord]:
    """Evaluate every subset of sizes 3..max_size; the completeness oracle.

    No pruning and no graph: results are exactly the maximal threshold-
    satisfying sets. Refuses instances whose subset count exceeds the budget.
    """
    M = _resolve_matrix(data)
    n = M.shape[0]
    smax = min(n, cfg.resolved_max_size())
    total = sum(math.comb(n, s) for s in range(3, smax + 1))
    if total > subset_budget:
        raise MiningBudgetExceeded(f"{total} subsets exceed the budget of {subset_budget}", records=[])
    kept_tuples: list[tuple[int, ...]] = []
    kept_sigma: list[float] = []
    kept_gain: list[float] = []
    for s in range(3, smax + 1):
        combos = list(itertools.combinations(range(n), s))
        for start in range(0, len(combos), 50_000):
            chunk = combos[start : start + 50_000]
            sel = np.asarray(chunk, dtype=np.intp)
            mats = M[sel[:, :, None], sel[:, None, :]]
            lam = linalg.eigh_many(mats, vectors=False)[0][:, 0]
            sigma = _sigma_of(lam)
            ok = sigma >= cfg.sigma_threshold
            if not ok.any():
                continue
            mus = measures._deletion_min_eigvals(mats[ok])
            gain = mus.min(axis=1) - lam[ok]
            hit = gain >= cfg.delta_threshold
            for t, row in enumerate(np.nonzero(ok)[0]):
                if hit[t]:
                    kept_tuples.append(chunk[row])
                    kept_sigma.append(float(sigma[row]))
                    kept_gain.append(float(gain[t]))
    records = _make_records(M, kept_tuples, kept_sigma, kept_gain)
    return _final_sort(remove_non_maximal(records))


def random_search(A, cfg: MinerConfig, trials: int) -> list[measures.MultipoleRecord]:
    """Sample random subsets, keep the threshold-satisfying ones, dedup.

    No maximality filtering: the output approximates the full solution
    family, for use as a pseudo-complete reference on large instances.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    M = measures._entries(A)
    n = M.shape[0]
    smax = min(n, cfg.resolved_max_size())
    rng = np.random.default_rng(cfg.seed)
    seen: set[tuple[int, ...]] = set()
    unique: list[tuple[int, ...]] = []
    for _ in range(trials):
        size = int(rng.integers(3, smax + 1))
        subset = tuple(int(x) for x in np.sort(rng.choice(n, size=size, replace=False)))
        if subset not in seen:
            seen.add(subset)
            unique.append(subset)
    kept_tuples: list[tuple[int, ...]] = []
    kept_sigma: list[float] = []
    kept_gain: list[float] = []
    order = sorted(range(len(unique)), key=lambda t: (len(unique[t]), t))
    for size, group in itertools.groupby(order, key=lambda t: len(unique[t])):
        grp = list(group)
        sel = np.asarray([unique[t] for t in grp], dtype=np.intp)
        mats = M[sel[:, :, None], sel[:, None, :]]
        lam = linalg.eigh_many(mats, vectors=False)[0][:, 0]
        sigma = _sigma_of(lam)
        ok = sigma >= cfg.sigma_threshold
        if not ok.any():
            continue
        mus = measures._deletion_min_eigvals(mats[ok])
        gain = mus.min(axis=1) - lam[ok]
        hit = gain >= cfg.delta_threshold
        for t, row in enumerate(np.nonzero(ok)[0]):
            if hit[t]:
                kept_tuples.append(unique[grp[row]])
                kept_sigma.append(float(sigma[row]))
                kept_gain.append(float(gain[t]))
    records = _make_records(M, kept_tuples, kept_sigma, kept_gain)
    return _final_sort(records)


def records_to_dicts(records, names=None) -> list[dict]:
    """JSON-ready form: member names, signs, measures, weights, size."""
    out = []
    for rec in records:
        members = list(rec.members) if names is None else [names[i] for i in rec.members]
        out.append(
            {
                "members": members,
                "signs": list(rec.signed.signs),
                "linear_dependence": rec.sigma,
                "linear_gain": rec.gain,
                "weights": list(rec.weights),
                "size": rec.size,
            }
        )
    return out


def write_dicts_json(dicts, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dicts, fh, indent=2)
        fh.write("\n")


def write_dicts_csv(dicts, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["members", "signs", "size", "linear_dependence", "linear_gain", "weights"])
        for d in dicts:
            writer.writerow(
                [
                    ";".join(str(m) for m in d["members"]),
                    ";".join(str(s) for s in d["signs"]),
                    d["size"],
                    repr(d["linear_dependence"]),
                    repr(d["linear_gain"]),
                    ";".join(repr(w) for w in d["weights"]),
                ]
            )


def write_records_json(records, names, path) -> None:
    write_dicts_json(records_to_dicts(records, names), path)


def write_records_csv(records, names, path) -> None:
    write_dicts_csv(records_to_dicts(records, names), path)


def read_records_json(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of multipole objects")
    for i, d in enumerate(data):
        if not isinstance(d, dict) or "members" not in d:
            raise ValueError(f"{path}: entry {i} is not a multipole object")
    return data


def merge_by_names(dict_lists) -> list[dict]:
    """Combine result files: dedup by member-name set, drop non-maximal sets.

    Same acceptance order as remove_non_maximal, operating on names alone so
    no correlation matrix is needed.
    """
    rows = [d for lst in dict_lists for d in lst]
    ordered = sorted(rows, key=lambda d: (-len(d["members"]), tuple(d["members"])))
    blocked: set[frozenset] = set()
    out = []
    for d in ordered:
        key = frozenset(d["members"])
        if key in blocked:
            continue
        out.append(d)
        for size in range(3, len(key) + 1):
            for comb in itertools.combinations(sorted(key), size):
                blocked.add(frozenset(comb))
    out.sort(key=lambda d: (-d.get("linear_gain", 0.0), -d.get("linear_dependence", 0.0), tuple(d["members"])))
    return out
