"""Command-line interface: mining runs, oracles, samplers, significance.

Every command is a pure function of (input files, flags, seed) and writes
its results next to a manifest recording the resolved configuration and
wall-clock interval. Result files are byte-reproducible; manifests carry
timing and are not.

Exit codes: 0 success, 2 flag/input validation, 3 budget exhausted
(partial results written, marked in the manifest), 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, bounds, dataset, measures, miner, stats


class _Validation(Exception):
    pass


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def _base_path(out: str) -> str:
    for suffix in (".json", ".csv"):
        if out.endswith(suffix):
            return out[: -len(suffix)]
    return out


def _write_manifest(base: str, command: str, config: dict, inputs: list, outputs: list, started: str, partial: bool):
    path = base + ".manifest.json"
    body = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "started_utc": started,
        "finished_utc": _utcnow(),
        "partial": partial,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None):
        n = args.threads
    else:
        env = os.environ.get("MULTIPOLE_THREADS", "")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise _Validation(f"MULTIPOLE_THREADS must be an integer, got {env!r}")
    if n < 1:
        raise _Validation("threads must be >= 1")
    return n


def _load_standardized(path: str, detrend: bool) -> dataset.TimeSeriesDataset:
    try:
        raw = dataset.load_csv(path)
    except OSError as e:
        raise _Validation(f"cannot read input {path}: {e}")
    return dataset.standardize(raw, detrend=detrend)


def _miner_config(args) -> miner.MinerConfig:
    if not (0.0 <= args.sigma <= 1.0):
        raise _Validation("sigma must be in [0,1]")
    if not (0.0 < args.delta <= 1.0):
        raise _Validation("delta must be in (0,1]")
    if not (-1.0 <= args.rho <= 1.0):
        raise _Validation("rho must be in [-1,1]")
    if args.max_size is not None and args.max_size < 3:
        raise _Validation("max-size must be >= 3")
    return miner.MinerConfig(
        sigma_threshold=args.sigma,
        delta_threshold=args.delta,
        rho=args.rho,
        max_size=args.max_size,
        seed=args.seed,
        clique_budget=args.clique_budget,
    )


def _emit_records(records, names, args, command: str, config: dict, inputs: list, started: str, partial: bool) -> int:
    base = _base_path(args.out)
    json_path = base + ".json"
    csv_path = base + ".csv"
    miner.write_records_json(records, names, json_path)
    miner.write_records_csv(records, names, csv_path)
    manifest = _write_manifest(base, command, config, inputs, [json_path, csv_path], started, partial)
    print(f"{command}: {len(records)} multipoles -> {json_path}, {csv_path}, {manifest}")
    return 3 if partial else 0


def cmd_mine(args) -> int:
    started = _utcnow()
    cfg = _miner_config(args)
    threads = _resolve_threads(args)
    d = _load_standardized(args.input, args.detrend)
    partial = False
    try:
        records = miner.mine(d, cfg, threads=threads)
    except miner.MiningBudgetExceeded as e:
        records = e.records
        partial = True
        print(f"warning: {e}", file=sys.stderr)
    config = {
        "sigma": cfg.sigma_threshold,
        "delta": cfg.delta_threshold,
        "rho": cfg.rho,
        "max_size": cfg.resolved_max_size(),
        "seed": cfg.seed,
        "clique_budget": cfg.clique_budget,
        "threads": threads,
        "detrend": args.detrend,
    }
    return _emit_records(records, d.names, args, "mine", config, [args.input], started, partial)


def cmd_brute(args) -> int:
    started = _utcnow()
    cfg = _miner_config(args)
    d = _load_standardized(args.input, args.detrend)
    partial = False
    try:
        records = miner.brute_force(d, cfg, subset_budget=args.subset_budget)
    except miner.MiningBudgetExceeded as e:
        records = e.records
        partial = True
        print(f"warning: {e}", file=sys.stderr)
    config = {
        "sigma": cfg.sigma_threshold,
        "delta": cfg.delta_threshold,
        "max_size": cfg.resolved_max_size(),
        "subset_budget": args.subset_budget,
        "detrend": args.detrend,
    }
    return _emit_records(records, d.names, args, "brute", config, [args.input], started, partial)


def cmd_random(args) -> int:
    started = _utcnow()
    cfg = _miner_config(args)
    if args.trials < 0:
        raise _Validation("trials must be >= 0")
    d = _load_standardized(args.input, args.detrend)
    A = dataset.correlation_matrix(d)
    records = miner.random_search(A, cfg, trials=args.trials)
    config = {
        "sigma": cfg.sigma_threshold,
        "delta": cfg.delta_threshold,
        "max_size": cfg.resolved_max_size(),
        "seed": cfg.seed,
        "trials": args.trials,
        "detrend": args.detrend,
    }
    return _emit_records(records, d.names, args, "random", config, [args.input], started, partial=False)


def cmd_merge(args) -> int:
    started = _utcnow()
    lists = []
    for path in args.inputs:
        try:
            lists.append(miner.read_records_json(path))
        except OSError as e:
            raise _Validation(f"cannot read input {path}: {e}")
    merged = miner.merge_by_names(lists)
    base = _base_path(args.out)
    json_path = base + ".json"
    csv_path = base + ".csv"
    miner.write_dicts_json(merged, json_path)
    miner.write_dicts_csv(merged, csv_path)
    manifest = _write_manifest(base, "merge", {"inputs": list(args.inputs)}, list(args.inputs), [json_path, csv_path], started, False)
    print(f"merge: {len(merged)} multipoles -> {json_path}, {csv_path}, {manifest}")
    return 0


def cmd_sample(args) -> int:
    started = _utcnow()
    if not (3 <= args.k <= 8):
        raise _Validation("k must be in [3,8]")
    if args.count < 1:
        raise _Validation("count must be >= 1")
    samples = stats.scatter(args.k, args.count, args.seed)
    base = _base_path(args.out)
    csv_path = base + ".csv"
    stats.write_scatter_csv(samples, csv_path)
    config = {"k": args.k, "count": args.count, "seed": args.seed}
    manifest = _write_manifest(base, "sample", config, [], [csv_path], started, False)
    print(f"sample: {len(samples)} matrices -> {csv_path}, {manifest}")
    return 0


def cmd_bounds(args) -> int:
    started = _utcnow()
    if not (3 <= args.k <= 8):
        raise _Validation("k must be in [3,8]")
    if args.count < 1:
        raise _Validation("count must be >= 1")
    stack = stats._accepted_stack(args.k, args.count, args.seed)
    gain, rho_s, c1, c2, cap, violated = bounds.stack_report_rows(stack)
    base = _base_path(args.out)
    csv_path = base + ".csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("k,gain,rho_s,corollary1,corollary2,size_cap,violated\n")
        for t in range(gain.size):
            fh.write(
                f"{args.k},{gain[t]!r},{rho_s[t]!r},{c1[t]!r},{c2[t]!r},{cap[t]!r},{int(violated[t])}\n"
            )
    n_viol = int(violated.sum())
    config = {"k": args.k, "count": args.count, "seed": args.seed}
    manifest = _write_manifest(base, "bounds", config, [], [csv_path], started, False)
    print(f"bounds: {args.count} matrices, {n_viol} violations -> {csv_path}, {manifest}")
    return 0


def cmd_synth(args) -> int:
    started = _utcnow()
    sizes = []
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise _Validation(f"sizes must be a comma list of integers, got {args.sizes!r}")
    if not sizes or any(s < 3 for s in sizes):
        raise _Validation("sizes must contain integers >= 3")
    if args.plant < 0:
        raise _Validation("plant must be >= 0")
    if not (0.0 < args.plant_sigma < 1.0):
        raise _Validation("plant-sigma must be in (0,1)")
    root = np.random.SeedSequence(args.seed)
    per_size = {s: args.plant // len(sizes) + (1 if i < args.plant % len(sizes) else 0) for i, s in enumerate(sizes)}
    seeds = root.spawn(len(sizes) + 1)
    planted = []
    for (s, n), ss in zip(per_size.items(), seeds[:-1]):
        planted.extend(
            stats.sample_planted_matrices(
                s, n, ss, dependence_min=args.plant_sigma, gain_min=args.plant_gain, rho_max=args.plant_rho
            )
        )
    total_members = sum(m.dim for m in planted)
    if args.noise_to < max(2, total_members):
        raise _Validation(f"noise-to must be at least max(2, planted member count {total_members})")
    d, truth = stats.synth_dataset(planted, args.noise_to - total_members, args.T, seeds[-1])
    base = _base_path(args.out)
    csv_path = base + ".csv"
    truth_path = base + ".truth.json"
    dataset.save_csv(d, csv_path)
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump({"planted": [[d.names[i] for i in block] for block in truth]}, fh, indent=2)
        fh.write("\n")
    config = {
        "plant": args.plant,
        "sizes": sizes,
        "noise_to": args.noise_to,
        "T": args.T,
        "seed": args.seed,
        "plant_sigma": args.plant_sigma,
        "plant_gain": args.plant_gain,
        "plant_rho": args.plant_rho,
    }
    manifest = _write_manifest(base, "synth", config, [], [csv_path, truth_path], started, False)
    print(f"synth: N={d.N} T={d.T} with {len(truth)} planted sets -> {csv_path}, {truth_path}, {manifest}")
    return 0


def cmd_signif(args) -> int:
    started = _utcnow()
    if not (0.0 < args.alpha < 1.0):
        raise _Validation("alpha must be in (0,1)")
    if args.samples < 1:
        raise _Validation("samples must be >= 1")
    if args.repeats < 100:
        raise _Validation("repeats must be >= 100")
    d = _load_standardized(args.input, detrend=False)
    pool = [_load_standardized(p, detrend=False) for p in args.pool]
    for i, p in enumerate(pool):
        if p.names != d.names:
            raise _Validation(f"pool file {args.pool[i]} has different variable names than {args.input}")
    member_names = [m for m in args.members.split(",") if m]
    try:
        members = sorted(d.names.index(m) for m in member_names)
    except ValueError:
        missing = [m for m in member_names if m not in d.names]
        raise _Validation(f"members not found in {args.input}: {missing}")
    if len(members) < 3:
        raise _Validation("members must name at least 3 distinct variables")
    if len(set(members)) != len(members):
        raise _Validation("members must be distinct")
    root = np.random.SeedSequence(args.seed)
    s_sig, s_rep = root.spawn(2)
    A = dataset.correlation_matrix(d)
    sigma = measures.linear_dependence(A, members)
    sub = s_sig.spawn(1 + len(members))
    p_sigma = stats.significance_sigma(sigma, len(members), pool, args.samples, sub[0])
    member_p = {
        d.names[m]: stats.member_contribution(d, members, m, pool, args.repeats, sub[1 + i])
        for i, m in enumerate(members)
    }
    rep_count = stats.reproducibility(members, pool, args.alpha, pool, s_rep, samples=args.samples, repeats=args.repeats)
    base = _base_path(args.out)
    json_path = base + ".json"
    body = {
        "multipole": [d.names[m] for m in members],
        "linear_dependence": sigma,
        "p_sigma": p_sigma,
        "member_pvalues": member_p,
        "alpha": args.alpha,
        "reproducible_count": rep_count,
        "window_count": len(pool),
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2)
        fh.write("\n")
    config = {
        "members": member_names,
        "alpha": args.alpha,
        "samples": args.samples,
        "repeats": args.repeats,
        "seed": args.seed,
    }
    manifest = _write_manifest(base, "signif", config, [args.input, *args.pool], [json_path], started, False)
    print(f"signif: p_sigma={p_sigma:.6g} reproducible {rep_count}/{len(pool)} -> {json_path}, {manifest}")
    return 0


def _add_common_miner_flags(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="input CSV of time series (header row of names)")
    p.add_argument("--sigma", type=float, default=0.5, help="linear dependence threshold, in [0,1]")
    p.add_argument("--delta", type=float, default=0.15, help="linear gain threshold, in (0,1]")
    p.add_argument("--max-size", type=int, default=None, help="largest set size, >= 3 (default: derived from delta)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed, any 64-bit integer")
    p.add_argument("--detrend", action="store_true", help="subtract least-squares linear trends before standardizing")
    p.add_argument("--out", required=True, help="output base path; writes .json, .csv, .manifest.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multipole",
        description="Mine multipoles: variable sets with high linear dependence and gain.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine maximal multipoles from a CSV dataset", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_common_miner_flags(p)
    p.add_argument("--rho", type=float, default=0.0, help="graph correlation threshold, in [-1,1]")
    p.add_argument("--clique-budget", type=int, default=10_000_000, help="abort after this many maximal cliques, >= 1")
    p.add_argument("--threads", type=int, default=None, help="worker threads, >= 1 (default: MULTIPOLE_THREADS or 1)")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("brute", help="exhaustive subset search (oracle)", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_common_miner_flags(p)
    p.add_argument("--subset-budget", type=int, default=2_000_000, help="refuse instances with more subsets than this")
    p.set_defaults(func=cmd_brute, rho=0.0, clique_budget=10_000_000)

    p = sub.add_parser("random", help="random-subset search", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_common_miner_flags(p)
    p.add_argument("--trials", type=int, required=True, help="number of random subsets to draw, >= 0")
    p.set_defaults(func=cmd_random, rho=0.0, clique_budget=10_000_000)

    p = sub.add_parser("merge", help="union result files, dedup, drop non-maximal sets", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--inputs", nargs="+", required=True, help="result JSON files to merge")
    p.add_argument("--out", required=True, help="output base path; writes .json, .csv, .manifest.json")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("sample", help="sample random correlation matrices; emit gain/rho_s scatter CSV", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--k", type=int, required=True, help="matrix size, in [3,8]")
    p.add_argument("--count", type=int, required=True, help="accepted matrices to sample, >= 1")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="output base path; writes .csv, .manifest.json")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bounds", help="validate eigengap bounds over sampled matrices", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--k", type=int, required=True, help="matrix size, in [3,8]")
    p.add_argument("--count", type=int, required=True, help="accepted matrices to sample, >= 1")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="output base path; writes .csv, .manifest.json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("synth", help="generate a synthetic dataset with planted multipoles", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--plant", type=int, required=True, help="number of planted sets, >= 0")
    p.add_argument("--sizes", default="3,4,5", help="comma list of planted set sizes, each >= 3")
    p.add_argument("--noise-to", type=int, required=True, help="total variable count after noise padding")
    p.add_argument("--T", type=int, required=True, help="rows (timestamps), >= 50 * largest size")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--plant-sigma", type=float, default=0.75, help="minimum dependence of planted sets, in (0,1)")
    p.add_argument("--plant-gain", type=float, default=0.15, help="minimum gain of planted sets")
    p.add_argument("--plant-rho", type=float, default=-0.2, help="maximum self-canceling correlation of planted sets")
    p.add_argument("--out", required=True, help="output base path; writes .csv, .truth.json, .manifest.json")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("signif", help="significance and reproducibility of one member set", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--input", required=True, help="context dataset CSV the set was mined from")
    p.add_argument("--members", required=True, help="comma list of member variable names")
    p.add_argument("--pool", nargs="+", required=True, help="window dataset CSVs forming the null pool")
    p.add_argument("--samples", type=int, default=10_000, help="null sets for the dependence test, >= 1")
    p.add_argument("--repeats", type=int, default=1_000, help="replacements per member test, >= 100")
    p.add_argument("--alpha", type=float, default=0.01, help="significance level, in (0,1)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="output base path; writes .json, .manifest.json")
    p.set_defaults(func=cmd_signif)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Validation as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except miner.MiningBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
