"""Command-line harness: generate, solve, suite, plot, variants.

Exit status is nonzero only for harness errors (bad arguments, missing
files); solver failures are recorded in the output instead.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import bench
from .factorization import parse_variant
from .generators import gaussian_rhs
from .mmio import read_matrix_market, write_matrix_market
from .pcg import PcgConfig, residual_band
from .solve import solve
from .sparsesym import classify


def _add_solver_flags(p):
    p.add_argument("--variant", default="ac2",
                   help="ac | ac2 | ac-sK | ac-sKmL | ac-random-order")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=1000)


def _cmd_generate(args):
    params = dict(family=args.family)
    if args.family == "sachdeva_star":
        spec_params = {"k": args.k}
        if args.l is not None:
            spec_params["l"] = args.l
    elif args.family == "poisson_grid":
        spec_params = {"n1": args.n1, "n2": args.n2, "n3": args.n3,
                       "model": args.model}
        if args.model == "checkerboard":
            spec_params.update(k=args.k, w=args.w)
        elif args.model == "aniso_weight":
            spec_params.update(w=args.w)
        elif args.model == "aniso_stretch":
            spec_params.update(eta=args.eta)
    elif args.family == "chimera":
        spec_params = {"n": args.n, "seed": args.seed,
                       "weighted": args.weighted,
                       "sddm_boundary": args.sddm_boundary}
    else:
        raise SystemExit(f"unknown family {args.family}")
    m = bench.build_instance(args.family, spec_params)
    out = bench.output_dir(args.out)
    os.makedirs(out, exist_ok=True)
    base = os.path.join(out, args.name or args.family)
    write_matrix_market(base + ".mtx", m)
    params.update(params=spec_params, n=m.n, nnz=m.nnz(),
                  expected_class=classify(m).kind.value)
    with open(base + ".json", "w") as fh:
        json.dump(params, fh, indent=1, sort_keys=True)
    print(f"wrote {base}.mtx ({m.n} vars, {m.nnz()} nnz) and {base}.json")


def _cmd_solve(args):
    m = read_matrix_market(args.matrix)
    b = gaussian_rhs(m, args.seed)
    cfg = parse_variant(args.variant, seed=args.seed)
    x, rep = solve(m, b, variant=cfg,
                   pcg_cfg=PcgConfig(tolerance=args.tol,
                                     max_iters=args.max_iters))
    band = residual_band(rep.rel_residual, args.tol)
    print(f"n={rep.n} nnz={rep.nnz} variant={args.variant} "
          f"status={rep.status.value} iters={rep.n_iter} "
          f"rel_residual={rep.rel_residual:.3e} band={band} "
          f"t_build={rep.t_build:.3f}s t_solve={rep.t_solve:.3f}s")
    if args.out_solution:
        import numpy as np
        np.savetxt(args.out_solution, x)


def _suite_task(task):
    family, params, seed, variant, tol, max_iters = task
    m = bench.build_instance(family, params)
    iid = bench._instance_id(family, params, seed)
    return bench.run_one(m, family, iid, variant, seed, tol, max_iters)


def _cmd_suite(args):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    out = bench.output_dir(args.out)
    os.makedirs(out, exist_ok=True)
    workers = 1 if args.serial else args.workers
    if workers > 1:
        tol = float(manifest.get("tol", 1e-8))
        max_iters = int(manifest.get("max_iters", 1000))
        tasks = [(inst["family"], inst.get("params", {}), int(seed), variant,
                  tol, max_iters)
                 for inst in manifest["instances"]
                 for seed in inst.get("seeds", [1])
                 for variant in manifest.get("variants", ["ac", "ac2"])]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_suite_task, tasks))
    else:
        records = bench.run_suite(
            manifest,
            progress=lambda r: print(f"  {r.instance_id} {r.variant}: "
                                     f"{r.status} iters={r.n_iter} "
                                     f"band={r.band}"))
    csv_path = os.path.join(out, "records.csv")
    bench.write_csv(records, csv_path)
    summary = bench.summarize(records)
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump({"note": "absolute times are machine-specific; the "
                           "published per-nnz figures are not targets",
                   "t_total_per_nnz": summary}, fh, indent=1, sort_keys=True)
    print(f"wrote {csv_path} and summary.json "
          f"({len(records)} rows, {len(summary)} families)")


def _cmd_plot(args):
    records = bench.read_csv(args.records)
    out = bench.output_dir(args.out)
    os.makedirs(out, exist_ok=True)
    modes = bench.PLOT_MODES if args.mode == "all" else [args.mode]
    for mode in modes:
        png = os.path.join(out, f"scaling_{mode}.png")
        data = os.path.join(out, f"scaling_{mode}.json")
        bench.plot_scaling(records, mode, png, data)
        print(f"wrote {png} and {data}")


def _cmd_variants(args):
    matrices = [(os.path.basename(p), read_matrix_market(p))
                for p in args.matrices]
    rows = bench.variant_study(matrices, args.variants.split(","),
                               seed=args.seed, tol=args.tol,
                               cond_iters=args.cond_iters)
    out = bench.output_dir(args.out)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "variants.json")
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1, sort_keys=True)
    hdr = f"{'instance':30s} {'variant':10s} {'iters':>6s} " \
          f"{'size_ratio':>10s} {'condition':>12s} {'ok':>3s}"
    print(hdr)
    for r in rows:
        print(f"{r['instance']:30s} {r['variant']:10s} {r['n_iter']:6d} "
              f"{r['size_ratio']:10.2f} {r['condition']:12.4g} "
              f"{'y' if r['cond_converged'] else 'n':>3s}")
    print(f"wrote {path}")


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="treechol",
        description="SDDM/Laplacian solver benchmarks: approximate-Cholesky "
                    "preconditioned conjugate gradient")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="emit a benchmark matrix (.mtx + "
                                        ".json sidecar)")
    g.add_argument("family",
                   choices=["sachdeva_star", "poisson_grid", "chimera"])
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--l", type=int, default=None)
    g.add_argument("--n1", type=int, default=10)
    g.add_argument("--n2", type=int, default=10)
    g.add_argument("--n3", type=int, default=10)
    g.add_argument("--model", default="uniform",
                   choices=["uniform", "checkerboard", "aniso_weight",
                            "aniso_stretch"])
    g.add_argument("--w", type=float, default=1.0)
    g.add_argument("--eta", type=float, default=1.0)
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--weighted", action="store_true")
    g.add_argument("--sddm-boundary", action="store_true")
    g.add_argument("--format", default="mm", choices=["mm"])
    g.add_argument("--name", default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=_cmd_generate)

    s = sub.add_parser("solve", help="solve one MatrixMarket system")
    s.add_argument("matrix")
    _add_solver_flags(s)
    s.add_argument("--out-solution", default=None)
    s.set_defaults(fn=_cmd_solve)

    su = sub.add_parser("suite", help="run a manifest of instances")
    su.add_argument("manifest")
    su.add_argument("--out", default=None)
    su.add_argument("--serial", action="store_true",
                    help="force the single-threaded regime")
    su.add_argument("--workers", type=int, default=1)
    su.set_defaults(fn=_cmd_suite)

    p = sub.add_parser("plot", help="render scaling plots from a records CSV")
    p.add_argument("records")
    p.add_argument("--mode", default="all",
                   choices=list(bench.PLOT_MODES) + ["all"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_plot)

    v = sub.add_parser("variants", help="size-ratio / condition-number study")
    v.add_argument("matrices", nargs="+")
    v.add_argument("--variants", default="ac,ac-s1,ac-s2,ac-s2m2,ac-s3m3")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--cond-iters", type=int, default=200)
    v.add_argument("--out", default=None)
    v.set_defaults(fn=_cmd_variants)

    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
