"""Command-line front end: instance generation, solving, sparsifying,
rounding, certifying, and benchmark sweeps with machine-readable output.

Exit codes: 0 ok, 1 instance/parameter error, 2 solver/backend failure.
Timing fields are omitted by default so repeated runs with the same master
seed produce byte-identical reports and CSVs; pass --timing to record them.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .certify import Certificate, purity_uniqueness, stability_diag, xi_lp
from .gibbs import BackendConfig, BackendError, GibbsParams, make_backend
from .hu import HUPolicy, SolverError, gw_binary_search
from .instances import (
    Instance,
    InstanceError,
    gen_cluster1d,
    gen_commuting4,
    gen_hamming_family,
    gen_random_pauli_sparse,
    load_instance,
    load_kronecker_spec,
    default_kronecker_spec,
    save_instance,
    save_kronecker_spec,
)
from .paulis import (
    ConstraintSet,
    all_z_constraints,
    diagonal_group,
    enumerate_traceless,
    krylov_constraints,
    str_to_bits,
)
from .rounding import energy_density_mc, round_explicit, sample_rotation
from .sparsify import sparsified_instance

BENCH_COLUMNS = [
    "instance_id", "n", "D", "model", "seed", "constraint_mode",
    "constraint_count", "eps", "gw_lower", "gw_upper", "rounded_value",
    "rounded_stderr", "ratio", "backend", "iterations", "oracle_calls",
    "wall_time_s", "status",
]


def canonical_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def resolve_constraints(inst: Instance, mode: str, cap: int = 1 << 20) -> ConstraintSet:
    if mode == "none":
        return ConstraintSet(inst.n, ())
    if mode == "auto":
        return enumerate_traceless(diagonal_group(inst.op), cap)
    if mode == "all":
        return all_z_constraints(inst.n)
    if mode.startswith("krylov:"):
        return krylov_constraints(inst.op, int(mode.split(":", 1)[1]), cap)
    if mode.startswith("file:"):
        with open(mode.split(":", 1)[1], encoding="utf-8") as fh:
            data = json.load(fh)
        zs = tuple(str_to_bits(s) for s in data["z_strings"])
        return ConstraintSet(inst.n, zs)
    raise InstanceError(f"unknown constraint mode {mode!r}")


def _backend_config(args) -> BackendConfig:
    cfg = BackendConfig(kind=getattr(args, "backend", "auto"))
    cfg.seed = getattr(args, "seed", 0) or 0
    if getattr(args, "probes", None):
        cfg.stochastic.num_probes = args.probes
    if getattr(args, "bond_cap", None):
        cfg.commuting1d.bond_cap = args.bond_cap
    return cfg


def lambda_from_report(report: dict, n: int) -> GibbsParams:
    lam = report["lambda_star"]
    return GibbsParams(
        lam["lambda_c"],
        {str_to_bits(k): v for k, v in lam["lambda_a"].items()},
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def run_gen(args) -> int:
    model = args.model
    if model == "kronecker":
        spec = default_kronecker_spec(args.k or 1)
        save_kronecker_spec(spec, args.out)
        return 0
    if model == "hypercube":
        inst = gen_hamming_family(args.n, 1, "hypercube")
    elif model == "hamming":
        inst = gen_hamming_family(args.n, args.k or 2, "hamming_k")
    elif model == "complete":
        inst = gen_hamming_family(args.n, 1, "complete")
    elif model == "cluster1d":
        inst = gen_cluster1d(args.n, args.seed or 0)
    elif model == "commuting4":
        inst = gen_commuting4()
    elif model == "random":
        inst = gen_random_pauli_sparse(args.n, args.k or 6, args.seed or 0)
    else:
        raise InstanceError(f"unknown model {model!r}")
    save_instance(inst, args.out)
    return 0


def run_solve(args) -> int:
    inst = load_instance(args.instance)
    constraints = resolve_constraints(inst, args.constraints)
    cfg = _backend_config(args)
    backend = make_backend(inst, constraints, cfg)
    policy = HUPolicy() if args.policy == "fixed" else HUPolicy(
        step_mode="adaptive", budget_mode="squared_decrement"
    )
    report = gw_binary_search(inst, constraints, args.eps, backend, policy)
    data = report.to_dict(include_timing=args.timing)
    data["constraint_mode"] = args.constraints
    data["instance"] = args.instance
    data["metadata"] = dict(inst.metadata)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(data))
    else:
        sys.stdout.write(canonical_json(data))
    return 0


def run_sparsify(args) -> int:
    spec = load_kronecker_spec(args.spec)
    inst = sparsified_instance(spec, args.eps, seed=args.seed or 0, m=args.samples)
    save_instance(inst, args.out)
    return 0


def run_round(args) -> int:
    inst = load_instance(args.instance)
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    constraints = resolve_constraints(inst, report.get("constraint_mode", "auto"))
    cfg = _backend_config(args)
    backend = make_backend(inst, constraints, cfg)
    lam = lambda_from_report(report, inst.n)
    rot = sample_rotation(inst.n, args.seed or 0)
    if args.mode == "explicit":
        sol = round_explicit(inst, constraints, lam, rot, backend)
    else:
        sol = energy_density_mc(
            inst, constraints, lam, rot, args.eps, args.delta, backend,
            seed=args.seed or 0,
        )
    report["rounding"] = {
        "mode": sol.mode,
        "energy_density": sol.energy_density,
        "energy_stderr": sol.energy_stderr,
        "samples_used": sol.samples_used,
        "rotation_seed": rot.seed,
        "ratio": sol.energy_density / report["gw_upper"] if report["gw_upper"] else None,
    }
    out = args.out or args.report
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(report))
    return 0


def run_certify(args) -> int:
    inst = load_instance(args.instance)
    certs: list[Certificate] = []
    if args.xi:
        constraints = resolve_constraints(inst, args.constraints)
        res = xi_lp(constraints, args.v, inst.n, cap_m=args.cap_m)
        certs.append(Certificate("xi_bound", {
            "v": args.v,
            "xi": None if res["unbounded"] else res["xi"],
            "unbounded": res["unbounded"],
            "constraint_count": len(constraints),
        }, summary=f"Xi(S, v={args.v}) = {res['xi']}"))
    if args.stability_k is not None:
        val = stability_diag(args.stability_k, args.eps, inst.op.norm_upper_bound)
        certs.append(Certificate("stability_diag", {
            "k": args.stability_k, "eps": args.eps, "value": val,
        }, summary=f"(2^k-1)^(1/6) eps^(1/3) ||C|| = {val:.6g}"))
    if args.purity:
        constraints = ConstraintSet(inst.n, ())
        lam = GibbsParams(args.purity_lambda, {})
        cert = purity_uniqueness(
            inst, constraints, lam, [1.0, 2.0, 4.0, 8.0], args.delta,
            cfg=_backend_config(args),
        )
        certs.append(cert)
    data = {"instance": args.instance, "certificates": [
        {"kind": c.kind, "payload": c.payload, "summary": c.summary} for c in certs
    ]}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(data))
    else:
        sys.stdout.write(canonical_json(data))
    return 0


# ---------------------------------------------------------------------------
# Bench
# ---------------------------------------------------------------------------


@dataclass
class BenchTask:
    index: int
    instance_id: str
    model: str
    n: int
    rep: int
    mode: str
    eps: float
    round_eps: float
    seed: int
    timing: bool
    sparsify_eps: float = 0.5


def _bench_instance(task: BenchTask) -> Instance:
    if task.model == "cluster1d":
        return gen_cluster1d(task.n, task.seed)
    if task.model == "hypercube":
        return gen_hamming_family(task.n, 1, "hypercube")
    if task.model == "kronecker":
        spec = default_kronecker_spec(task.n)
        return sparsified_instance(spec, task.sparsify_eps, seed=task.seed)
    if task.model == "random":
        return gen_random_pauli_sparse(task.n, 2 * task.n, task.seed)
    raise InstanceError(f"bench does not support model {task.model!r}")


def bench_row(task: BenchTask) -> dict:
    row = {k: "" for k in BENCH_COLUMNS}
    row.update(
        instance_id=task.instance_id, model=task.model, seed=task.seed,
        constraint_mode=task.mode, eps=task.eps, status="ok",
    )
    t0 = time.perf_counter()
    try:
        inst = _bench_instance(task)
        row["n"] = inst.n
        row["D"] = 1 << inst.n
        constraints = resolve_constraints(inst, task.mode)
        cfg = BackendConfig()
        cfg.seed = task.seed
        backend = make_backend(inst, constraints, cfg)
        report = gw_binary_search(inst, constraints, task.eps, backend)
        lam = report.lambda_star
        rot = sample_rotation(inst.n, task.seed + 1)
        sol = energy_density_mc(
            inst, constraints, lam, rot, task.round_eps, backend=backend,
            seed=task.seed + 2,
        )
        row.update(
            constraint_count=len(constraints),
            gw_lower=report.gw_lower,
            gw_upper=report.gw_upper,
            rounded_value=sol.energy_density,
            rounded_stderr=sol.energy_stderr,
            ratio=(sol.energy_density / report.gw_upper) if report.gw_upper else "",
            backend=report.backend_kind,
            iterations=report.iterations,
            oracle_calls=report.oracle_calls,
        )
    except (InstanceError, BackendError, SolverError, ValueError) as exc:
        row["status"] = f"error: {exc}"
    if task.timing:
        row["wall_time_s"] = round(time.perf_counter() - t0, 3)
    return row


def _parse_range(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def run_bench(args) -> int:
    ns = _parse_range(args.n_range)
    modes = args.modes.split(",")
    tasks = []
    idx = 0
    for n in ns:
        for rep in range(args.reps):
            child = np.random.SeedSequence(args.seed, spawn_key=(n, rep))
            seed = int(child.generate_state(1)[0] % (2 ** 31))
            for mode in modes:
                tasks.append(BenchTask(
                    index=idx,
                    instance_id=f"{args.model}-n{n}-r{rep}",
                    model=args.model, n=n, rep=rep, mode=mode, eps=args.eps,
                    round_eps=args.round_eps, seed=seed, timing=args.timing,
                ))
                idx += 1
    if args.jobs > 1:
        import multiprocessing as mp

        with mp.Pool(args.jobs) as pool:
            rows = pool.map(bench_row, tasks)
    else:
        rows = [bench_row(t) for t in tasks]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paulisdp")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance or Kronecker spec file")
    g.add_argument("--model", required=True,
                   choices=["hypercube", "hamming", "complete", "cluster1d",
                            "commuting4", "kronecker", "random"])
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--k", type=int, default=None,
                   help="Hamming distance / Kronecker repetitions / random term count")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=run_gen)

    s = sub.add_parser("solve", help="run the binary-searched update loop")
    s.add_argument("--instance", required=True)
    s.add_argument("--constraints", default="auto",
                   help="auto | all | none | krylov:K | file:PATH")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--backend", default="auto",
                   choices=["auto", "dense", "stochastic", "commuting1d"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--probes", type=int, default=None)
    s.add_argument("--bond-cap", dest="bond_cap", type=int, default=None)
    s.add_argument("--policy", default="fixed", choices=["fixed", "adaptive"])
    s.add_argument("--timing", action="store_true")
    s.add_argument("--out", default=None)
    s.set_defaults(func=run_solve)

    sp = sub.add_parser("sparsify", help="importance-sample a Kronecker spec")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=None,
                    help="override the sample-count formula")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=run_sparsify)

    r = sub.add_parser("round", help="randomized rounding of a solve report")
    r.add_argument("--instance", required=True)
    r.add_argument("--report", required=True)
    r.add_argument("--mode", default="mc", choices=["mc", "explicit"])
    r.add_argument("--eps", type=float, default=0.5)
    r.add_argument("--delta", type=float, default=1.0 / 3.0)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--backend", default="auto",
                   choices=["auto", "dense", "stochastic", "commuting1d"])
    r.add_argument("--out", default=None)
    r.set_defaults(func=run_round)

    c = sub.add_parser("certify", help="certificates and diagnostics")
    c.add_argument("--instance", required=True)
    c.add_argument("--constraints", default="auto")
    c.add_argument("--xi", action="store_true")
    c.add_argument("--v", type=float, default=1.0)
    c.add_argument("--cap-m", dest="cap_m", type=int, default=12)
    c.add_argument("--purity", action="store_true")
    c.add_argument("--purity-lambda", dest="purity_lambda", type=float, default=4.0)
    c.add_argument("--delta", type=float, default=0.01)
    c.add_argument("--stability-k", dest="stability_k", type=int, default=None)
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None)
    c.set_defaults(func=run_certify)

    b = sub.add_parser("bench", help="benchmark sweep to CSV")
    b.add_argument("--model", required=True,
                   choices=["cluster1d", "hypercube", "kronecker", "random"])
    b.add_argument("--n-range", dest="n_range", required=True,
                   help="lo:hi or comma list (Kronecker: repetitions k)")
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--modes", default="auto,none")
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--round-eps", dest="round_eps", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--timing", action="store_true")
    b.add_argument("--out", required=True)
    b.set_defaults(func=run_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, FileNotFoundError, KeyError) as exc:
        print(f"instance error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, BackendError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
