"""
Running the measurement harness
===============================

Executes a small manifest end to end: per-solve CSV records, the
per-family summary (median / 75th percentile / max of time per non-zero),
and the three scaling plots with the 1e-8 * nnz * log10(nnz)^3 reference
curve.  The CSV is byte-deterministic outside its timing columns.
"""

import json
import pathlib

from treechol import bench

out = pathlib.Path("demo_out")
out.mkdir(exist_ok=True)

manifest = {
    "tol": 1e-8,
    "max_iters": 1000,
    "variants": ["ac", "ac2"],
    "instances": [
        {"family": "poisson_grid",
         "params": {"n1": 18, "n2": 18, "n3": 18}, "seeds": [1]},
        {"family": "poisson_grid",
         "params": {"n1": 26, "n2": 26, "n3": 26}, "seeds": [1]},
        {"family": "poisson_grid",
         "params": {"n1": 34, "n2": 34, "n3": 34,
                    "model": "checkerboard", "k": 3, "w": 1e7}, "seeds": [1]},
        {"family": "sachdeva_star", "params": {"k": 40}, "seeds": [1]},
        {"family": "chimera", "params": {"n": 20000, "seed": 1},
         "seeds": [1]},
        {"family": "chimera",
         "params": {"n": 20000, "seed": 2, "weighted": True,
                    "sddm_boundary": True}, "seeds": [1]},
    ],
}

records = bench.run_suite(
    manifest,
    progress=lambda r: print(f"  {r.instance_id:46s} {r.variant:4s} "
                             f"{r.n_iter:4d} it  band={r.band}"))

bench.write_csv(records, out / "records.csv")
summary = bench.summarize(records)
(out / "summary.json").write_text(json.dumps(summary, indent=1,
                                             sort_keys=True))
print("\nper-family t_total/nnz summary (seconds; machine-specific):")
for fam, s in summary.items():
    print(f"  {fam:14s} median {s['median']:.2e}  p75 {s['p75']:.2e}  "
          f"max {s['max']:.2e}")

for mode in bench.PLOT_MODES:
    bench.plot_scaling(records, mode, out / f"scaling_{mode}.png",
                       out / f"scaling_{mode}.json")
print(f"\nwrote CSV, summary and plots under {out}/")
