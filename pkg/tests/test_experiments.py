import io
import os

import numpy as np
import pytest

import cwenofv.experiments as xp
from cwenofv import benchmarks as bm
from cwenofv.cli import load_spec, main
from cwenofv.errors import NonPositiveError, SpecError
from cwenofv.experiments import (ExperimentSpec, dump_field_2d, estimate_order,
                                 load_field_2d, run_experiment, total_variation)
from cwenofv.solver import Grid2D, field_2d

rng = np.random.default_rng(64)


class TestEstimateOrder:
    def test_synthetic_cubic(self):
        slope, rates = estimate_order([1e-2, 1.25e-3, 1.5625e-4], [100, 200, 400])
        assert slope == pytest.approx(3.0, abs=1e-12)
        assert rates[1] == pytest.approx(3.0, abs=1e-12)

    def test_constant_errors(self):
        slope, rates = estimate_order([1e-3, 1e-3, 1e-3], [100, 200, 400])
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_non_positive(self):
        with pytest.raises(NonPositiveError):
            estimate_order([1e-2, 0.0], [100, 200])
        with pytest.raises(NonPositiveError):
            estimate_order([1e-2], [100])


class TestTotalVariation:
    def test_monotone_ramp(self):
        assert total_variation(np.linspace(0, 1, 11)) == pytest.approx(2.0)

    def test_double_step(self):
        x = (np.arange(16) + 0.5) / 16
        vals = ((x > 0.25) & (x < 0.75)).astype(float)
        assert total_variation(vals) == pytest.approx(2.0)


class TestFieldDump:
    def test_round_trip(self, tmp_path):
        grid = Grid2D(nx=5, ny=4, h=0.3, k=0.25, x0=-1.0, y0=2.0)
        f = field_2d(grid, 3)
        f.set_interior(rng.standard_normal((3, 4, 5)))
        f.t = 0.625
        path = tmp_path / "field.dat"
        dump_field_2d(f, path, style="grid")
        data, meta = load_field_2d(path)
        assert np.array_equal(data, f.interior())
        assert meta["t"] == 0.625 and meta["nx"] == 5 and meta["h"] == 0.3

    def test_constant_field(self, tmp_path):
        grid = Grid2D(nx=2, ny=2, h=1.0, k=1.0)
        f = field_2d(grid, 1)
        f.set_interior(np.full((1, 2, 2), 3.25))
        path = tmp_path / "c.dat"
        dump_field_2d(f, path, style="grid")
        data, _ = load_field_2d(path)
        assert np.all(data == 3.25)

    def test_schlieren_constant_gradient(self, tmp_path):
        grid = Grid2D(nx=12, ny=8, h=0.1, k=0.1)
        f = field_2d(grid, 1)
        x = grid.xcenters()
        f.set_interior(np.tile(2.0 + 0.5 * x, (8, 1))[None])
        path = tmp_path / "s.pgm"
        dump_field_2d(f, path, style="schlieren")
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n12 8\n255\n")
        img = np.frombuffer(raw.split(b"255\n", 1)[1], dtype=np.uint8).reshape(8, 12)
        interior = img[1:-1, 1:-1]
        assert interior.max() == interior.min()  # constant gray away from edges


class TestInitialDataFidelity:
    def test_ffs_state(self):
        assert bm.FFS_STATE == (1.4, 3.0, 0.0, 1.0)

    def test_shock_bubble_states(self):
        assert bm.SB_STATE_A[0] == 11.0 / 3.0
        assert bm.SB_STATE_A[1] == 2.7136021011998722
        assert bm.SB_STATE_A[3] == 10.0
        assert bm.SB_STATE_B == (0.1, 0.0, 0.0, 1.0)
        assert bm.SB_STATE_C == (1.0, 0.0, 0.0, 1.0)
        assert bm.SB_CENTER == (0.3, 0.0) and bm.SB_RADIUS == 0.2

    def test_vortex_constants(self):
        assert bm.VORTEX_BETA == 5.0
        rho, u, v, p = bm.vortex_primitives(np.array(0.0), np.array(0.0))
        # far field is (1,1,1,1); at the centre the temperature dip is
        # 1 - (gamma-1) beta^2 e / (8 gamma pi^2)
        dT = -(1.4 - 1.0) * 25.0 * np.e / (8 * 1.4 * np.pi**2)
        assert rho == pytest.approx((1 + dT) ** (1 / 0.4), rel=1e-13)
        assert p == pytest.approx((1 + dT) ** (1.4 / 0.4), rel=1e-13)
        assert u == pytest.approx(1.0) and v == pytest.approx(1.0)

    def test_shu_osher_left_state(self):
        assert bm.SHU_OSHER_LEFT == (3.857143, 2.629369, 10.333333)

    def test_dmr_states(self):
        assert bm.DMR_PRE == (1.4, 0.0, 0.0, 1.0)
        assert bm.DMR_POST[0] == 8.0 and bm.DMR_POST[3] == 116.5
        assert np.hypot(bm.DMR_POST[1], bm.DMR_POST[2]) == pytest.approx(8.25, rel=1e-14)

    def test_jiang_shu_constants(self):
        assert (bm.JS_A, bm.JS_Z, bm.JS_DELTA, bm.JS_ALPHA) == (0.5, -0.7, 0.005, 10.0)
        assert bm.JS_BETA == np.log(2.0) / (36.0 * 0.005**2)

    def test_jiang_shu_shapes(self):
        x = np.array([-0.7, -0.3, 0.1, 0.5, 0.9])
        vals = bm.jiang_shu_datum(x)
        assert vals[1] == 1.0          # square wave
        assert vals[2] == 1.0          # triangle apex
        assert vals[4] == 0.0          # background
        assert 0.9 < vals[0] <= 1.0    # Gaussian peak region
        assert 0.9 < vals[3] <= 1.0    # ellipse top


class TestSpec:
    def test_defaults(self):
        spec = ExperimentSpec(benchmark="advect-lf")
        assert spec.grids == (50, 100, 200, 400, 800)
        assert spec.final_time == 1.0
        assert spec.method == "ssprk3"

    def test_unknown_benchmark(self):
        with pytest.raises(SpecError):
            ExperimentSpec(benchmark="nope")

    def test_non_increasing_grids(self):
        with pytest.raises(SpecError):
            ExperimentSpec(benchmark="advect-lf", grids=(100, 50, 200))

    def test_hash_stable(self):
        a = ExperimentSpec(benchmark="advect-lf", grids=(50,))
        b = ExperimentSpec(benchmark="advect-lf", grids=(50,))
        assert a.spec_hash() == b.spec_hash()
        c = ExperimentSpec(benchmark="advect-lf", grids=(100,))
        assert a.spec_hash() != c.spec_hash()


class TestRunners:
    def test_csv_determinism(self, tmp_path):
        texts = []
        for run in range(2):
            out = tmp_path / f"run{run}"
            spec = ExperimentSpec(benchmark="advect-lf", grids=(50, 100), order=3,
                                  output=str(out))
            res = run_experiment(spec)
            csvs = [p for p in os.listdir(out) if p.endswith(".csv")]
            assert len(csvs) == 1
            texts.append((out / csvs[0]).read_bytes())
        assert texts[0] == texts[1]

    def test_crit_point_runner(self):
        spec = ExperimentSpec(benchmark="crit-point", grids=(20, 40), order=3,
                              power=2, m_hat=2)
        res = run_experiment(spec)
        assert res.columns == ("tau", "maxw", "err")
        assert res.errors[0][0] == pytest.approx(1.4e-3, rel=0.1)

    def test_recon_accuracy_2d_runner(self):
        spec = ExperimentSpec(benchmark="recon-accuracy-2d", grids=(20, 40, 80))
        res = run_experiment(spec)
        slope, _ = estimate_order([e[0] for e in res.errors], res.resolutions)
        assert slope > 2.5

    def test_jiang_shu_short(self):
        spec = ExperimentSpec(benchmark="jiang-shu", grids=(100,), final_time=2.0)
        res = run_experiment(spec)
        assert res.errors[0][0] < 0.5

    def test_jiang_shu_desk_scale(self):
        # the catalogue default (400 cells, four periods) runs to completion
        res = run_experiment(ExperimentSpec(benchmark="jiang-shu"))
        assert res.resolutions == [400]
        assert 0 < res.errors[0][0] < 0.3

    def test_shu_osher_with_reference(self, monkeypatch):
        monkeypatch.setattr(xp, "SHU_OSHER_REFERENCE_CELLS", 400)
        spec = ExperimentSpec(benchmark="shu-osher", grids=(100,), order=3,
                              final_time=0.2, reference=True)
        res = run_experiment(spec)
        assert res.columns == ("err",)
        assert 0 < res.errors[0][0] < 1.0

    def test_shock_bubble_tiny(self):
        spec = ExperimentSpec(benchmark="shock-bubble", grids=((68, 20),),
                              final_time=0.02)
        res = run_experiment(spec)
        assert res.errors[0][0] > 0  # density stays positive


SPEC_TEXT = """\
[experiment]
benchmark = advect-lf
grids = 50 100
final_time = 1.0

[scheme]
order = 3
mode = cwz
power = 2
m_hat = 2
"""


class TestCli:
    def test_load_spec(self, tmp_path):
        p = tmp_path / "spec.ini"
        p.write_text(SPEC_TEXT)
        spec = load_spec(str(p))
        assert spec.benchmark == "advect-lf"
        assert spec.grids == (50, 100)
        assert spec.power == 2

    def test_override(self, tmp_path):
        p = tmp_path / "spec.ini"
        p.write_text(SPEC_TEXT)
        spec = load_spec(str(p), ["scheme.m_hat=3", "grids=50"])
        assert spec.m_hat == 3.0
        assert spec.grids == (50,)

    def test_run_ok(self, tmp_path, capsys):
        p = tmp_path / "spec.ini"
        p.write_text(SPEC_TEXT)
        code = main(["run", str(p), "--override", "grids=50"])
        assert code == 0
        out = capsys.readouterr().out
        assert "advect-lf" in out and "cells" in out

    def test_bad_spec_exit_code(self, tmp_path, capsys):
        p = tmp_path / "bad.ini"
        p.write_text("[experiment]\nbenchmark = not-a-benchmark\n")
        assert main(["run", str(p)]) == 3
        p2 = tmp_path / "bad2.ini"
        p2.write_text("[experiment]\nbenchmark = advect-lf\nunknown_key = 1\n")
        assert main(["run", str(p2)]) == 3
        assert main(["run", str(tmp_path / "missing.ini")]) == 3

    def test_blowup_exit_code(self, tmp_path, capsys):
        p = tmp_path / "blow.ini"
        p.write_text("[experiment]\nbenchmark = vortex\ngrids = 50\n"
                     "cfl = 20.0\nfinal_time = 2.0\n")
        code = main(["run", str(p)])
        assert code == 2
        err = capsys.readouterr().err
        assert "blow-up" in err

    def test_list_benchmarks(self, capsys):
        assert main(["list-benchmarks"]) == 0
        out = capsys.readouterr().out
        for name in bm.BENCHMARKS:
            assert name in out

    def test_tables(self, tmp_path, capsys):
        spec = ExperimentSpec(benchmark="advect-lf", grids=(50,), output=str(tmp_path))
        run_experiment(spec)
        assert main(["tables", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "err" in out
