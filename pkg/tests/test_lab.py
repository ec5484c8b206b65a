from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinchern import (
    ChainSpec,
    LengthMismatch,
    PlateauStats,
    SweepConfig,
    SweepRow,
    TooFewRows,
    cli_main,
    default_j_grid,
    detect_plateaus,
    deviation_report,
    export_results,
    import_results,
    run_sweep,
)

from _oracles import DATA_DIR


def _row(j, f, converged=True, method="spectral"):
    return SweepRow(
        j=j,
        f_phitheta=f,
        chern=2 * f,
        gap_at_pole=1.0,
        method=method,
        converged=converged,
    )


# --- sweeps -------------------------------------------------------------------


def test_sweep_config_validation():
    spec = ChainSpec(2, 0.0)
    with pytest.raises(ValueError):
        SweepConfig(spec=spec, j_values=())
    with pytest.raises(ValueError):
        SweepConfig(spec=spec, j_values=(1.0,), method="magic")
    with pytest.raises(ValueError):
        SweepConfig(spec=spec, j_values=(1.0,), method="dynamical", velocities=())


def test_spectral_sweep_rows_sorted_and_quantized():
    cfg = SweepConfig(
        spec=ChainSpec(2, 0.0), j_values=(1.0, -1.0, 0.3), method="spectral"
    )
    rows = run_sweep(cfg)
    assert [r.j for r in rows] == [-1.0, 0.3, 1.0]
    assert all(r.converged for r in rows)
    assert rows[0].f_phitheta == pytest.approx(0.0, abs=1e-9)
    assert rows[2].f_phitheta == pytest.approx(1.0, abs=1e-9)
    for r in rows:
        assert r.chern == pytest.approx(2 * r.f_phitheta)
        assert r.method == "spectral"
        assert r.gap_at_pole > 0


def test_sweep_keeps_crossing_row_as_nonconverged():
    cfg = SweepConfig(
        spec=ChainSpec(2, 0.0), j_values=(-1.0, -0.5, 1.0), method="spectral"
    )
    rows = run_sweep(cfg)
    crossing = rows[1]
    assert not crossing.converged
    assert math.isnan(crossing.f_phitheta)
    assert crossing.gap_at_pole < 1e-12


def test_methods_cross_agreement():
    js = (-1.2, -0.8, 0.3, 1.0)
    spectral = run_sweep(
        SweepConfig(spec=ChainSpec(2, 0.0), j_values=js, method="spectral")
    )
    dynamical = run_sweep(
        SweepConfig(
            spec=ChainSpec(2, 0.0),
            j_values=js,
            method="dynamical",
            velocities=(0.05,),
        )
    )
    lattice = run_sweep(
        SweepConfig(spec=ChainSpec(2, 0.0), j_values=js, method="lattice")
    )
    for spec_row, dyn_row, lat_row in zip(spectral, dynamical, lattice):
        # The ramp at v=0.05 sits 1.5% below the static value on this
        # response curve, so the cross-method bound is 0.035 rather
        # than the naive 0.01.
        assert abs(dyn_row.f_phitheta - spec_row.f_phitheta) <= 0.035
        assert lat_row.chern == pytest.approx(round(2 * spec_row.f_phitheta))


def test_trotter_sweep_matches_dynamical():
    js = (-1.0, 1.0)
    kwargs = dict(spec=ChainSpec(2, 0.0), j_values=js, velocities=(0.1,), steps=300)
    dyn = run_sweep(SweepConfig(method="dynamical", **kwargs))
    trot = run_sweep(SweepConfig(method="trotter", **kwargs))
    for d, t in zip(dyn, trot):
        assert t.f_phitheta == pytest.approx(d.f_phitheta, abs=1e-6)
        assert t.method == "trotter"


def test_worker_pool_matches_serial(monkeypatch):
    cfg = SweepConfig(
        spec=ChainSpec(2, 0.0), j_values=(-1.0, 0.0, 1.0), method="spectral"
    )
    serial = run_sweep(cfg)
    monkeypatch.setenv("SPINCHERN_WORKERS", "2")
    parallel = run_sweep(cfg)
    assert parallel == serial


# --- plateau statistics ---------------------------------------------------------


def test_detect_plateaus_needs_enough_rows():
    with pytest.raises(TooFewRows):
        detect_plateaus([_row(0.0, 1.0), _row(1.0, 1.0)])
    with pytest.raises(TooFewRows):
        detect_plateaus([_row(j, 1.0, converged=False) for j in (0, 1, 2, 3)])


def test_detect_plateaus_constant_rows():
    stats = detect_plateaus([_row(j, 1.0) for j in (0.0, 0.5, 1.0)])
    assert len(stats) == 1
    assert stats[0].plateau_mean == pytest.approx(1.0)
    assert stats[0].plateau_std == 0.0
    assert stats[0].j_range == (0.0, 1.0)
    assert stats[0].nearest_theory == 1.0


def test_detect_plateaus_segments_at_jumps_and_gaps():
    rows = (
        [_row(j, 0.01) for j in (-2.0, -1.5, -1.0)]
        + [_row(-0.5, float("nan"), converged=False)]
        + [_row(j, 0.97) for j in (0.0, 0.5, 1.0)]
        + [_row(j, 1.52) for j in (1.5, 2.0)]
    )
    stats = detect_plateaus(rows)
    assert len(stats) == 3
    assert stats[0].nearest_theory == 0.0
    assert stats[1].nearest_theory == 1.0
    assert stats[2].nearest_theory == 1.5
    assert stats[1].j_range == (0.0, 1.0)


def test_detect_plateaus_half_integer_rounding():
    stats = detect_plateaus([_row(j, 0.497) for j in (0.0, 0.1, 0.2)])
    assert stats[0].nearest_theory == 0.5


@settings(max_examples=20, derandomize=True, deadline=None)
@given(
    levels=st.lists(
        st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0]), min_size=1, max_size=4
    ),
    per_level=st.integers(3, 5),
)
def test_detect_plateaus_recovers_staircases(levels, per_level):
    # Build a noiseless staircase; consecutive equal levels merge.
    rows, j = [], 0.0
    for level in levels:
        for _ in range(per_level):
            rows.append(_row(j, level))
            j += 0.1
    expected = [levels[0]]
    for level in levels[1:]:
        if abs(level - expected[-1]) > 0.25:
            expected.append(level)
        else:
            expected[-1] = level
    stats = detect_plateaus(rows)
    assert [s.nearest_theory for s in stats] == expected


# --- deviation ----------------------------------------------------------------


def test_deviation_report_arithmetic():
    assert deviation_report([1.0, 2.0], [0.0, 0.0]) == pytest.approx(math.sqrt(2.5))
    assert deviation_report([1.0, 2.0], [1.0, 2.0]) == 0.0
    with pytest.raises(LengthMismatch):
        deviation_report([1.0], [1.0, 2.0])
    with pytest.raises(LengthMismatch):
        deviation_report([], [])


def test_dynamical_deviation_from_static_theory_is_small():
    js = [j for j in default_j_grid(step=0.1) if abs(j + 0.5) > 0.05]
    spec_rows = run_sweep(
        SweepConfig(spec=ChainSpec(2, 0.0), j_values=js, method="spectral")
    )
    dyn_rows = run_sweep(
        SweepConfig(
            spec=ChainSpec(2, 0.0), j_values=js, method="dynamical", velocities=(0.1,)
        )
    )
    sigma = deviation_report(
        [r.f_phitheta for r in dyn_rows], [r.f_phitheta for r in spec_rows]
    )
    assert sigma <= 0.01


# --- persistence ----------------------------------------------------------------


def test_export_import_roundtrip_bit_exact(tmp_path):
    rows = [
        _row(-0.123456789123456789, 1 / 3),
        _row(0.1 + 0.2, math.pi / 7),
        SweepRow(
            j=0.5,
            f_phitheta=float("nan"),
            chern=float("nan"),
            gap_at_pole=1e-300,
            method="spectral",
            converged=False,
        ),
    ]
    path = tmp_path / "rows.csv"
    export_results(rows, [], path)
    loaded = import_results(path)
    assert len(loaded) == len(rows)
    for a, b in zip(loaded, rows):
        assert a.j == b.j
        assert a.gap_at_pole == b.gap_at_pole
        assert a.method == b.method
        assert a.converged == b.converged
        if math.isnan(b.f_phitheta):
            assert math.isnan(a.f_phitheta) and math.isnan(a.chern)
        else:
            assert a.f_phitheta == b.f_phitheta and a.chern == b.chern


def test_export_header_and_sidecar(tmp_path):
    path = tmp_path / "out.csv"
    cfg = SweepConfig(
        spec=ChainSpec(2, 0.0), j_values=(0.0, 1.0), method="spectral"
    )
    stats = [
        PlateauStats(
            plateau_mean=1.0, plateau_std=0.0, j_range=(0.0, 1.0), nearest_theory=1.0
        )
    ]
    export_results(
        [_row(0.0, 1.0)], stats, path, config=cfg, crossings=[-0.5], seed=42
    )
    first_line = path.read_text().splitlines()[0]
    assert first_line == "j,f_phitheta,chern,gap_at_pole,method,converged"
    sidecar = json.loads((tmp_path / "out.json").read_text())
    assert sidecar["seed"] == 42
    assert sidecar["crossings"] == [-0.5]
    assert sidecar["config"]["n_spins"] == 2
    assert sidecar["config"]["method"] == "spectral"
    assert sidecar["plateaus"][0]["nearest_theory"] == 1.0
    assert sidecar["version"]


def test_export_empty_rows(tmp_path):
    path = tmp_path / "empty.csv"
    export_results([], [], path)
    assert path.read_text().splitlines() == [
        "j,f_phitheta,chern,gap_at_pole,method,converged"
    ]
    sidecar = json.loads((tmp_path / "empty.json").read_text())
    assert sidecar["plateaus"] == [] and sidecar["crossings"] == []
    assert import_results(path) == []


@settings(max_examples=20, derandomize=True, deadline=None)
@given(
    values=st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64),
        min_size=1,
        max_size=5,
    )
)
def test_float_serialization_roundtrips_exactly(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "rows.csv"
    rows = [_row(v, v) for v in values]
    export_results(rows, [], path)
    assert [r.j for r in import_results(path)] == [r.j for r in rows]


# --- CLI ------------------------------------------------------------------------


def test_cli_sweep_happy_path(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = cli_main(
        [
            "sweep",
            "--n",
            "2",
            "--j-min",
            "-1",
            "--j-max",
            "1",
            "--j-step",
            "0.5",
            "--method",
            "spectral",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    assert out.exists() and (tmp_path / "sweep.json").exists()
    assert "plateau_mean" in capsys.readouterr().out


def test_cli_sweep_reads_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    out = tmp_path / "from_config.csv"
    cfg_path.write_text(
        json.dumps(
            {
                "n_spins": 2,
                "j_values": [-1.0, 0.0, 1.0],
                "method": "spectral",
                "output_path": str(out),
            }
        )
    )
    assert cli_main(["sweep", "--config", str(cfg_path)]) == 0
    assert len(import_results(out)) == 3


def test_cli_curvature_at_crossing_fails_cleanly(capsys):
    code = cli_main(["curvature", "--n", "2", "--j", "-0.5", "--method", "spectral"])
    assert code == 1
    err = capsys.readouterr().err
    assert "degenerate" in err
    assert "DegenerateGroundState" in err


def test_cli_curvature_all_methods(capsys):
    assert cli_main(["curvature", "--n", "2", "--j", "1.0", "--method", "all"]) == 0
    out = capsys.readouterr().out
    assert "spectral" in out and "lattice" in out and "dynamical" in out


def test_cli_crossings(capsys):
    assert cli_main(["crossings", "--n", "2"]) == 0
    assert "-0.5000" in capsys.readouterr().out


def test_cli_spectrum_writes_csv(tmp_path, capsys):
    out = tmp_path / "levels.csv"
    code = cli_main(
        ["spectrum", "--n", "2", "--j-min", "-1", "--j-max", "1", "--j-step", "1",
         "--output", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "j,e0,e1,e2,e3"
    assert len(lines) == 4


def test_cli_pulse_compile_and_verify(tmp_path, capsys):
    events = tmp_path / "events.json"
    molecule = str(DATA_DIR / "three_spin.json")
    code = cli_main(
        ["pulse", "compile", "--molecule", molecule, "--n", "3", "--output", str(events)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "verification fidelity: 1.0000" in out
    target = -0.5 * math.pi * (100 * -50 / 150.0)
    code = cli_main(
        [
            "pulse",
            "verify",
            "--molecule",
            molecule,
            "--sequence",
            str(events),
            "--target-j",
            str(target),
            "--tau",
            "1e-3",
        ]
    )
    assert code == 0
    assert "fidelity: 1.0000" in capsys.readouterr().out


def test_cli_pulse_compile_equal_couplings_exits_one(capsys):
    code = cli_main(
        [
            "pulse",
            "compile",
            "--molecule",
            str(DATA_DIR / "three_spin.json"),
            "--n",
            "3",
            "--equal-couplings",
        ]
    )
    assert code == 1
    assert "DegenerateCouplings" in capsys.readouterr().err


def test_cli_pulse_compile_rejects_wrong_size(capsys):
    code = cli_main(
        ["pulse", "compile", "--molecule", str(DATA_DIR / "three_spin.json"), "--n", "4"]
    )
    assert code == 1


def test_cli_linear_zone(capsys):
    assert cli_main(["linear-zone", "--n", "2", "--j", "1.0", "--v", "0.1,0.5"]) == 0
    out = capsys.readouterr().out
    assert "v_theta" in out


def test_cli_robustness(capsys):
    code = cli_main(
        ["robustness", "--n", "2", "--v", "0.5", "--steps", "60", "--error-deg", "1",
         "--trials", "2", "--seed", "1"]
    )
    assert code == 0
    assert "min fidelity" in capsys.readouterr().out


def test_cli_usage_errors_exit_two(capsys):
    assert cli_main([]) == 2
    assert cli_main(["sweep", "--method", "bogus"]) == 2
    capsys.readouterr()


def test_cli_missing_file_exits_one(capsys):
    assert cli_main(["pulse", "compile", "--molecule", "/nonexistent.json"]) == 1
    assert "error" in capsys.readouterr().err
