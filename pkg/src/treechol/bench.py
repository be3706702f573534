"""Benchmark harness: suite runs, CSV records, summaries, scaling plots and
the factorization-variant study.

Wall-clock build and solve times are measured after the matrix is in memory
(load time excluded).  One CSV row per (instance, variant, seed); per-row
failures are recorded as band "inf" and never abort a suite.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, asdict

import numpy as np

from .factorization import parse_variant
from .generators import (AnisotropicStretch, AnisotropicWeight, Checkerboard,
                         ChimeraSpec, GridSpec, StarSpec, Uniform, chimera,
                         gaussian_rhs, poisson_grid, sachdeva_star)
from .mmio import read_matrix_market
from .pcg import PcgConfig, SolveStatus, residual_band
from .solve import solve
from .sparsesym import SparseSym

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ["schema", "instance_id", "family", "n", "nnz", "variant",
               "seed", "t_build", "t_solve", "t_total", "n_iter",
               "rel_residual", "status", "band"]
#: excluded from byte-identity comparisons; everything else is deterministic
TIMING_COLUMNS = ("t_build", "t_solve", "t_total")


@dataclass
class RunRecord:
    instance_id: str
    family: str
    n: int
    nnz: int
    variant: str
    seed: int
    t_build: float
    t_solve: float
    t_total: float
    n_iter: int
    rel_residual: float
    status: str
    band: str


# ---------------------------------------------------------------------------
# instance construction from manifest entries


def _coeff_from_params(params: dict):
    model = params.get("model", "uniform")
    if model == "uniform":
        return Uniform()
    if model == "checkerboard":
        return Checkerboard(int(params["k"]), float(params["w"]))
    if model == "aniso_weight":
        return AnisotropicWeight(float(params["w"]))
    if model == "aniso_stretch":
        return AnisotropicStretch(float(params["eta"]))
    raise ValueError(f"unknown grid coefficient model '{model}'")


def build_instance(family: str, params: dict) -> SparseSym:
    if family == "sachdeva_star":
        return sachdeva_star(StarSpec(int(params["k"]),
                                      int(params["l"]) if "l" in params else None))
    if family == "poisson_grid":
        return poisson_grid(GridSpec(int(params["n1"]), int(params["n2"]),
                                     int(params["n3"]),
                                     _coeff_from_params(params)))
    if family == "chimera":
        return chimera(ChimeraSpec(int(params["n"]),
                                   int(params.get("seed", 1)),
                                   bool(params.get("weighted", False)),
                                   bool(params.get("sddm_boundary", False))))
    if family == "file":
        return read_matrix_market(params["path"])
    raise ValueError(f"unknown instance family '{family}'")


def _instance_id(family, params, seed):
    keyed = ";".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{family}({keyed})#rhs{seed}"


def run_one(m: SparseSym, family: str, instance_id: str, variant: str,
            seed: int, tol: float = 1e-8, max_iters: int = 1000) -> RunRecord:
    """Solve one instance with one variant; failures become band inf rows."""
    b = gaussian_rhs(m, seed)
    cfg = parse_variant(variant, seed=seed)
    pcg_cfg = PcgConfig(tolerance=tol, max_iters=max_iters)
    try:
        _, rep = solve(m, b, variant=cfg, pcg_cfg=pcg_cfg)
        band = residual_band(rep.rel_residual, tol)
        return RunRecord(instance_id, family, m.n, m.nnz(), variant, seed,
                         rep.t_build, rep.t_solve, rep.t_total, rep.n_iter,
                         rep.rel_residual, rep.status.value, band)
    except Exception:  # solver failure is data, not a harness error
        return RunRecord(instance_id, family, m.n, m.nnz(), variant, seed,
                         0.0, 0.0, 0.0, 0, 1.0,
                         SolveStatus.STAGNATED.value, "inf")


def run_suite(manifest: dict, progress=None) -> list[RunRecord]:
    """Execute every (instance, seed, variant) combination of a manifest.

    Manifest schema::

        {"tol": 1e-8, "max_iters": 1000, "variants": ["ac", "ac2"],
         "instances": [{"family": "poisson_grid",
                        "params": {"n1": 18, "n2": 18, "n3": 18},
                        "seeds": [1, 2]}]}
    """
    tol = float(manifest.get("tol", 1e-8))
    max_iters = int(manifest.get("max_iters", 1000))
    variants = manifest.get("variants", ["ac", "ac2"])
    records = []
    for inst in manifest["instances"]:
        family = inst["family"]
        params = inst.get("params", {})
        m = build_instance(family, params)  # load/build excluded from timing
        for seed in inst.get("seeds", [1]):
            iid = inst.get("id") or _instance_id(family, params, seed)
            for variant in variants:
                rec = run_one(m, family, iid, variant, int(seed), tol,
                              max_iters)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    return records


# ---------------------------------------------------------------------------
# CSV


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in records:
            row = asdict(r)
            row["schema"] = CSV_SCHEMA_VERSION
            for k in TIMING_COLUMNS:
                row[k] = f"{row[k]:.9f}"
            row["rel_residual"] = f"{row['rel_residual']:.17g}"
            w.writerow(row)


def read_csv(path) -> list:
    """Load records; bands are recomputed and must match the stored value."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if int(row["schema"]) != CSV_SCHEMA_VERSION:
                raise ValueError(f"unsupported CSV schema {row['schema']}")
            rec = RunRecord(
                row["instance_id"], row["family"], int(row["n"]),
                int(row["nnz"]), row["variant"], int(row["seed"]),
                float(row["t_build"]), float(row["t_solve"]),
                float(row["t_total"]), int(row["n_iter"]),
                float(row["rel_residual"]), row["status"], row["band"])
            if residual_band(rec.rel_residual, 1e-8) != rec.band:
                raise ValueError(
                    f"stored band {rec.band} does not match the recomputed "
                    f"band for residual {rec.rel_residual}")
            out.append(rec)
    return out


def summarize(records) -> dict:
    """Per family: median / 75th percentile / max of t_total per non-zero.

    Times are machine-specific; the absolute values are never acceptance
    targets, only the bookkeeping is.
    """
    fams = {}
    for r in records:
        fams.setdefault(r.family, []).append(r.t_total / max(r.nnz, 1))
    out = {}
    for fam, xs in fams.items():
        xs = np.asarray(xs)
        out[fam] = {"count": int(xs.size),
                    "median": float(np.median(xs)),
                    "p75": float(np.quantile(xs, 0.75)),
                    "max": float(xs.max())}
    return out


# ---------------------------------------------------------------------------
# scaling plots

PLOT_MODES = ("time", "time_per_nnz", "time_per_nnz_log3")
REFERENCE_COEFF = 1e-8  # seconds


def reference_curve(nnz) -> np.ndarray:
    nnz = np.asarray(nnz, dtype=np.float64)
    return REFERENCE_COEFF * nnz * np.log10(nnz) ** 3


def _normalize(mode, nnz, y):
    nnz = np.asarray(nnz, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if mode == "time":
        return y
    if mode == "time_per_nnz":
        return y / nnz
    if mode == "time_per_nnz_log3":
        return y / (nnz * np.log10(nnz) ** 3)
    raise ValueError(f"unknown plot mode '{mode}'")


def scaling_series(records, mode: str) -> dict:
    """Machine-readable plot data: normalized points plus the reference curve."""
    if not records:
        raise ValueError("no records to plot")
    if mode not in PLOT_MODES:
        raise ValueError(f"unknown plot mode '{mode}'")
    nnz = np.array([r.nnz for r in records], dtype=np.float64)
    t = np.array([r.t_total for r in records])
    pts = _normalize(mode, nnz, t)
    lo, hi = nnz.min(), nnz.max()
    grid = np.logspace(np.log10(max(lo, 10.0)) - 0.1, np.log10(hi) + 0.1, 64)
    curve = _normalize(mode, grid, reference_curve(grid))
    return {
        "schema": CSV_SCHEMA_VERSION,
        "mode": mode,
        "reference": f"{REFERENCE_COEFF:g} * nnz * log10(nnz)^3 seconds",
        "points": [
            {"instance_id": r.instance_id, "variant": r.variant,
             "nnz": int(r.nnz), "y": float(y), "failed": r.band != "ok"}
            for r, y in zip(records, pts)
        ],
        "curve": [{"nnz": float(x), "y": float(y)}
                  for x, y in zip(grid, curve)],
    }


def plot_scaling(records, mode: str, out_png, out_data=None) -> dict:
    """Render one scaling plot; also writes the data file when asked.

    Failed solves get a distinct marker (red squares); the reference curve is
    drawn with the same normalization as the data.
    """
    series = scaling_series(records, mode)
    if out_data is not None:
        with open(out_data, "w") as fh:
            json.dump(series, fh, indent=1, sort_keys=True)
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    ok = [(p["nnz"], p["y"]) for p in series["points"] if not p["failed"]]
    bad = [(p["nnz"], p["y"]) for p in series["points"] if p["failed"]]
    if ok:
        xs, ys = zip(*ok)
        ax.plot(xs, ys, "o", color="tab:blue", label="converged")
    if bad:
        xs, ys = zip(*bad)
        ax.plot(xs, ys, "s", color="tab:red", label="failed tolerance")
    ax.plot([c["nnz"] for c in series["curve"]],
            [c["y"] for c in series["curve"]],
            color="tab:orange", label="1e-8 nnz log10(nnz)^3")
    ax.set_xscale("log")
    if mode == "time":
        ax.set_yscale("log")
        ax.set_ylabel("total time (s)")
    elif mode == "time_per_nnz":
        ax.set_ylabel("total time / nnz (s)")
    else:
        ax.set_ylabel("total time / (nnz log10(nnz)^3) (s)")
    ax.set_xlabel("non-zeros")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    return series


# ---------------------------------------------------------------------------
# variant study: size ratios and relative condition numbers


def estimate_condition(apply_a, apply_minv, n, project, iters: int = 200,
                       seed: int = 0):
    """Extreme eigenvalues of M^{-1}A by power iteration, kernel deflated.

    B = M^{-1}A is self-adjoint in the A-inner product; the smallest nonzero
    eigenvalue comes from shifted iteration on (c I - B) with c just above
    the largest.  Returns (kappa, lmax, lmin, converged).
    """
    rng = np.random.default_rng(seed)

    def a_norm(v):
        return float(np.sqrt(max(v @ apply_a(v), 0.0)))

    def power(op):
        v = project(rng.standard_normal(n))
        v /= max(a_norm(v), 1e-300)
        ray = 1.0
        for _ in range(iters):
            w = project(op(v))
            ray = float(v @ apply_a(w))
            nw = a_norm(w)
            if nw <= 0:
                return ray, np.inf
            v = w / nw
        w = project(op(v))
        resid = w - float(v @ apply_a(w)) * v
        return float(v @ apply_a(w)), a_norm(resid)

    def bop(v):
        return apply_minv(apply_a(v))

    lmax, res_max = power(bop)
    c = 1.02 * lmax

    def cop(v):
        return c * v - bop(v)

    shifted, res_min = power(cop)
    lmin = c - shifted
    converged = bool(res_max <= 0.05 * abs(lmax)
                     and res_min <= 0.05 * max(abs(shifted), 1e-300)
                     and lmin > 0)
    kappa = lmax / lmin if lmin > 0 else np.inf
    return kappa, lmax, lmin, converged


def variant_study(matrices, variants, seed: int = 1, tol: float = 1e-8,
                  max_iters: int = 1000, cond_iters: int = 200):
    """Per (instance, variant): time/nnz, iterations, size ratio, condition.

    ``matrices`` is a list of (name, SparseSym).  SDDM inputs are lifted so
    the condition number always refers to the factored Laplacian.
    """
    from .reduction import lift
    from .sparsesym import MatrixKind, classify
    from .solve import build_preconditioner

    rows = []
    for name, m in matrices:
        cls = classify(m)
        lap = m if cls.kind == MatrixKind.LAPLACIAN else lift(m).lifted
        for variant in variants:
            cfg = parse_variant(variant, seed=seed)
            t0 = time.perf_counter()
            apply_a, apply_minv, f = build_preconditioner(lap, cfg)
            t_build = time.perf_counter() - t0
            b = gaussian_rhs(m, seed)
            _, rep = solve(m, b, variant=cfg,
                           pcg_cfg=PcgConfig(tolerance=tol,
                                             max_iters=max_iters))
            kappa, lmax, lmin, conv = estimate_condition(
                apply_a, apply_minv, lap.n, f.project_kernel_out,
                iters=cond_iters, seed=seed)
            rows.append({
                "instance": name, "variant": variant, "nnz": m.nnz(),
                "t_total_per_nnz": (t_build + rep.t_solve) / m.nnz(),
                "n_iter": rep.n_iter,
                "size_ratio": f.nnz() / lap.nnz(),
                "condition": kappa, "cond_lmax": lmax, "cond_lmin": lmin,
                "cond_converged": conv,
            })
    return rows


def output_dir(cli_value=None) -> str:
    """Output directory: flag wins, then $TREECHOL_OUT, then cwd."""
    return cli_value or os.environ.get("TREECHOL_OUT", ".")
