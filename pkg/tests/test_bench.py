import json

import numpy as np
import pytest

import treechol as tc
from treechol import bench
from conftest import random_connected_laplacian

P2_MANIFEST = {
    "tol": 1e-8,
    "variants": ["ac"],
    "instances": [{"family": "file", "params": {}, "seeds": [1]}],
}


def p2_manifest(tmp_path):
    m = tc.laplacian_from_edges(2, [0], [1], [1.0])
    path = tmp_path / "p2.mtx"
    tc.write_matrix_market(path, m)
    manifest = json.loads(json.dumps(P2_MANIFEST))
    manifest["instances"][0]["params"]["path"] = str(path)
    return manifest


def test_suite_single_p2_row(tmp_path):
    records = bench.run_suite(p2_manifest(tmp_path))
    assert len(records) == 1
    r = records[0]
    assert r.band == "ok"
    assert r.n_iter <= 2
    assert r.family == "file" and r.n == 2


def test_csv_roundtrip_validates_band(tmp_path):
    records = bench.run_suite(p2_manifest(tmp_path))
    csv_path = tmp_path / "records.csv"
    bench.write_csv(records, csv_path)
    back = bench.read_csv(csv_path)
    assert len(back) == 1
    assert back[0].band == records[0].band
    assert back[0].rel_residual == records[0].rel_residual
    # corrupt the stored band: read must notice
    text = csv_path.read_text().replace(",ok", ",star")
    csv_path.write_text(text)
    with pytest.raises(ValueError, match="band"):
        bench.read_csv(csv_path)


def test_csv_deterministic_outside_timing(tmp_path):
    manifest = p2_manifest(tmp_path)
    a = bench.run_suite(manifest)
    b = bench.run_suite(manifest)
    pa = tmp_path / "a.csv"
    pb = tmp_path / "b.csv"
    bench.write_csv(a, pa)
    bench.write_csv(b, pb)

    def strip_timing(path):
        import csv
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        keep = [i for i, c in enumerate(rows[0])
                if c not in bench.TIMING_COLUMNS]
        return [tuple(row[i] for i in keep) for row in rows]

    assert strip_timing(pa) == strip_timing(pb)


def test_summary_statistics_recompute():
    mk = lambda fam, nnz, t: bench.RunRecord(  # noqa: E731
        "i", fam, 10, nnz, "ac", 1, t / 2, t / 2, t, 5, 1e-9, "converged",
        "ok")
    records = [mk("a", 100, 1.0), mk("a", 100, 3.0), mk("a", 100, 2.0),
               mk("b", 10, 5.0)]
    s = bench.summarize(records)
    xs = np.array([1.0, 3.0, 2.0]) / 100
    assert s["a"]["median"] == np.median(xs)
    assert s["a"]["p75"] == np.quantile(xs, 0.75)
    assert s["a"]["max"] == xs.max()
    assert s["b"]["count"] == 1


def fixture_records():
    recs = []
    for i, (nnz, t, band) in enumerate([(10 ** 6, 0.05, "ok"),
                                        (10 ** 5, 0.01, "ok"),
                                        (10 ** 7, 2.0, "inf")]):
        recs.append(bench.RunRecord(f"r{i}", "fake", nnz // 7, nnz, "ac", 1,
                                    t / 2, t / 2, t, 3,
                                    1e-9 if band == "ok" else 1.0,
                                    "converged", band))
    return recs


def test_plot_data_reference_curve_values(tmp_path):
    recs = fixture_records()
    for mode, norm in [
        ("time", lambda nnz: 1.0),
        ("time_per_nnz", lambda nnz: nnz),
        ("time_per_nnz_log3", lambda nnz: nnz * np.log10(nnz) ** 3),
    ]:
        series = bench.scaling_series(recs, mode)
        for c in series["curve"]:
            want = 1e-8 * c["nnz"] * np.log10(c["nnz"]) ** 3 / norm(c["nnz"])
            assert abs(c["y"] - want) <= 1e-12 * abs(want)


def test_plot_point_normalizations():
    recs = fixture_records()
    s = bench.scaling_series(recs, "time_per_nnz")
    assert s["points"][0]["y"] == pytest.approx(5e-8, rel=1e-12)
    s = bench.scaling_series(recs, "time_per_nnz_log3")
    assert s["points"][0]["y"] == pytest.approx(0.05 / (1e6 * 6 ** 3),
                                                rel=1e-12)
    s = bench.scaling_series(recs, "time")
    # reference curve at nnz = 1e6 is 1e-8 * 1e6 * 6^3 = 2.16 s
    near = min(s["curve"], key=lambda c: abs(c["nnz"] - 1e6))
    assert bench.reference_curve(1e6) == pytest.approx(2.16, rel=1e-12)
    assert near["y"] == pytest.approx(
        1e-8 * near["nnz"] * np.log10(near["nnz"]) ** 3, rel=1e-12)


def test_plot_renders_and_marks_failures(tmp_path):
    recs = fixture_records()
    png = tmp_path / "p.png"
    data = tmp_path / "p.json"
    series = bench.plot_scaling(recs, "time", png, data)
    assert png.exists() and data.exists()
    saved = json.loads(data.read_text())
    assert saved["mode"] == "time"
    assert [p["failed"] for p in saved["points"]] == [False, False, True]
    # re-rendering from the same records produces identical data
    series2 = bench.plot_scaling(recs, "time", tmp_path / "p2.png")
    assert series == series2


def test_plot_rejects_empty():
    with pytest.raises(ValueError):
        bench.scaling_series([], "time")


def test_condition_estimator_exact_preconditioner(rng):
    lap = random_connected_laplacian(rng, 30)
    f = tc.to_row_ops(tc.exact_cholesky(lap))
    csr = lap.to_csr()
    kappa, lmax, lmin, conv = bench.estimate_condition(
        lambda v: csr @ v, lambda r: tc.apply_precond_inverse(f, r),
        lap.n, f.project_kernel_out, iters=100, seed=0)
    assert conv
    assert kappa == pytest.approx(1.0, abs=1e-6)


def test_condition_estimator_orders_variants():
    m = tc.sachdeva_star(tc.StarSpec(20, 10))
    rows = bench.variant_study([("star", m)], ["ac", "ac2"], seed=1,
                               cond_iters=150)
    by = {r["variant"]: r for r in rows}
    assert by["ac"]["condition"] > by["ac2"]["condition"]
    assert by["ac"]["size_ratio"] <= by["ac2"]["size_ratio"]


def test_run_one_failure_is_recorded_not_raised(tmp_path):
    # an indefinite "matrix" cannot pass classification: run_one must
    # produce an inf row instead of raising
    m = tc.SparseSym.from_dense([[1.0, -2.0], [-2.0, 1.0]])
    rec = bench.run_one(m, "file", "bad", "ac", 1)
    assert rec.band == "inf"


def test_timing_spread_three_seeds_one_instance():
    # total-time-per-nnz spread across three right-hand sides of one
    # weighted instance stays tightly concentrated (max/median <= 1.25;
    # the generous factor absorbs foreign-hardware noise)
    m = tc.chimera(tc.ChimeraSpec(30_000, 1, weighted=True))
    rows = []
    bench.run_one(m, "chimera", "warm", "ac", 1)  # warm the kernels
    for seed in (1, 2, 3):
        rows.append(bench.run_one(m, "chimera", f"s{seed}", "ac", seed))
    per_nnz = np.array([r.t_total / r.nnz for r in rows])
    assert per_nnz.max() / np.median(per_nnz) <= 1.25
    assert all(r.band == "ok" for r in rows)
