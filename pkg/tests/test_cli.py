"""Command line interface: subcommands, exit codes, report files."""

import json
import math

import numpy as np
import pytest

from exitspec import ConvergenceError, moments_from_spectrum, SpectralData
from exitspec import cli


def interval_spectrum():
    ms = np.arange(1, 20, 2, dtype=float)
    nus = (ms * math.pi) ** 2
    return SpectralData(1.0, np.column_stack([nus, 8.0 / nus]))


def test_ball_moments_interval(tmp_path, capsys):
    rc = cli.main(["ball-moments", "--space", "euclidean", "-d", "1",
                   "--rho", "0.5", "-N", "8", "-o", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "T_1" in out
    payload = json.loads((tmp_path / "ball_moments.json").read_text())
    assert payload["volume"] == pytest.approx(1.0, rel=1e-12)
    assert payload["moments"][0] == pytest.approx(1.0 / 12.0, rel=1e-8)
    assert len(payload["moments"]) == 8
    assert (tmp_path / "ball_profiles.csv").exists()
    assert (tmp_path / "ball_profiles.png").exists()


def test_ball_moments_hemisphere(tmp_path):
    rc = cli.main(["ball-moments", "--space", "sphere", "-R", "1", "-d", "2",
                   "--rho", "1.5707963", "-N", "4", "-o", str(tmp_path),
                   "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "ball_moments.json").read_text())
    t1 = 2 * math.pi * (2 * math.log(2) - 1)
    assert payload["moments"][0] == pytest.approx(t1, rel=1e-3)
    assert payload["moments"][0] == pytest.approx(2.4271, abs=5e-4)


def test_ball_moments_curvature_flag(tmp_path):
    # -K 4 is the sphere of radius 1/2
    rc = cli.main(["ball-moments", "--space", "sphere", "-K", "4", "-d", "2",
                   "--rho", "0.7", "-N", "2", "-o", str(tmp_path), "--no-figures"])
    assert rc == 0


def test_ball_moments_bad_radius_exits_2(tmp_path):
    rc = cli.main(["ball-moments", "--space", "sphere", "-R", "1", "-d", "2",
                   "--rho", "3.2", "-N", "2", "-o", str(tmp_path)])
    assert rc == 2
    rc = cli.main(["ball-moments", "--space", "sphere", "-R", "1", "-K", "1",
                   "-d", "2", "--rho", "1.0", "-N", "2", "-o", str(tmp_path)])
    assert rc == 2


def test_iso_radius_stdout(tmp_path, capsys):
    assert cli.main(["iso-radius", "-K", "0", "-d", "2", "--diam", "1"]) == 0
    assert capsys.readouterr().out.strip() == "0.8090169943749473"
    assert cli.main(["iso-radius", "-K", "1", "-d", "2",
                     "--diam", repr(math.pi)]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(1.0, abs=1e-9)
    assert cli.main(["iso-radius", "-K", "0", "-d", "2", "--diam", "1",
                     "-o", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "iso_radius.json").read_text())
    assert payload["radius"] == pytest.approx(0.8090169943749473, rel=1e-14)


def test_iso_radius_myers_violation_exits_2(capsys):
    rc = cli.main(["iso-radius", "-K", "1", "-d", "2", "--diam", "3.2"])
    assert rc == 2
    assert "error" in capsys.readouterr().err.lower()


def test_grid_moments_torus_band(tmp_path):
    rc = cli.main(["grid-moments", "--surface", "torus", "--nx", "32", "--ny", "32",
                   "--mask", "rect:0,0.5,0,1", "-N", "2", "-o", str(tmp_path),
                   "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "grid_moments.json").read_text())
    assert payload["volume"] == pytest.approx(0.5, abs=1e-12)
    assert payload["moments"][0] == pytest.approx(1.0 / 96.0, rel=2e-2)
    assert (tmp_path / "field_u1.csv").exists()
    assert (tmp_path / "field_u2.csv").exists()


def test_grid_moments_sphere_cap_matches_radial(tmp_path):
    from exitspec import GeodesicBall, ModelSpace, moment_hierarchy_ball
    rho = math.pi / 3
    rc = cli.main(["grid-moments", "--surface", "sphere", "--n-theta", "24",
                   "--n-phi", "48", "--mask", f"cap:north,{rho!r}", "-N", "1",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "grid_moments.json").read_text())
    mom, _ = moment_hierarchy_ball(GeodesicBall(ModelSpace("spherical", 2, 1.0), rho), 1)
    assert payload["moments"][0] == pytest.approx(mom.moments[0], rel=2e-2)


def test_grid_moments_figures_default_on(tmp_path):
    rc = cli.main(["grid-moments", "--surface", "torus", "--nx", "24", "--ny", "24",
                   "--mask", "rect:0,0.5,0,1", "-N", "1", "-o", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "grid_u1.png").exists()


def test_grid_moments_mask_file_round_trip(tmp_path):
    from exitspec import FlatTorus, RectMask, write_mask_file
    mask_path = tmp_path / "band.txt"
    write_mask_file(mask_path, FlatTorus(1.0, 1.0, 32, 32), RectMask((0.0, 0.5, 0.0, 1.0)))
    rc = cli.main(["grid-moments", "--surface", "torus", "--nx", "32", "--ny", "32",
                   "--mask-file", str(mask_path), "-N", "1", "-o", str(tmp_path),
                   "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "grid_moments.json").read_text())
    assert payload["volume"] == pytest.approx(0.5, abs=1e-12)


def test_grid_moments_bad_masks_exit_2(tmp_path):
    base = ["grid-moments", "--surface", "torus", "--nx", "16", "--ny", "16",
            "-N", "1", "-o", str(tmp_path), "--no-figures"]
    assert cli.main(base + ["--mask", "blob:1,2"]) == 2
    assert cli.main(base + ["--mask", "rect:0,0.5,0"]) == 2
    assert cli.main(base + ["--mask", "cap:north"]) == 2
    assert cli.main(base) == 2    # neither --mask nor --mask-file
    empty = tmp_path / "empty.txt"
    empty.write_text("flat_torus 8 8 1.0 1.0\n" + "\n".join(["0" * 8] * 8) + "\n")
    assert cli.main(["grid-moments", "--surface", "torus", "--nx", "8", "--ny", "8",
                     "--mask-file", str(empty), "-N", "1", "-o", str(tmp_path)]) == 2
    both = ["--mask", "rect:0,0.5,0,1", "--mask-file", str(empty)]
    assert cli.main(base + both) == 2


def test_eig_bounds_from_moments_file(tmp_path):
    spec = interval_spectrum()
    mom = moments_from_spectrum(spec, 16)
    mpath = tmp_path / "moments.json"
    mpath.write_text(json.dumps(mom.to_dict()))
    rc = cli.main(["eig-bounds", "--moments", str(mpath), "-n", "1",
                   "--k-max", "6", "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "eig_bounds.json").read_text())
    bounds = [row["bound"] for row in payload["bounds"]]
    assert bounds[0] == pytest.approx(10.0, rel=1e-4)
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert bounds[-1] == pytest.approx(math.pi ** 2, rel=1e-4)
    assert (tmp_path / "eig_bounds.csv").exists()


def test_eig_bounds_with_known_spectrum(tmp_path):
    spec = interval_spectrum()
    mpath = tmp_path / "moments.json"
    mpath.write_text(json.dumps(moments_from_spectrum(spec, 16).to_dict()))
    spath = tmp_path / "known.json"
    spath.write_text(json.dumps(SpectralData(1.0, spec.pairs[:1]).to_dict()))
    rc = cli.main(["eig-bounds", "--moments", str(mpath), "--spectrum", str(spath),
                   "-n", "3", "--k-min", "3", "--k-max", "6",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "eig_bounds.json").read_text())
    final = payload["bounds"][-1]
    assert final["k"] == 6
    assert final["bound"] == pytest.approx(9 * math.pi ** 2, rel=0.01)


def test_eig_bounds_recover_payload(tmp_path):
    spec = interval_spectrum()
    mpath = tmp_path / "moments.json"
    mpath.write_text(json.dumps(moments_from_spectrum(spec, 24).to_dict()))
    rc = cli.main(["eig-bounds", "--moments", str(mpath), "--recover",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    payload = json.loads((tmp_path / "eig_bounds.json").read_text())
    rec = payload["recovery"]
    assert rec["spectrum"]["pairs"][0]["nu"] == pytest.approx(math.pi ** 2, rel=1e-8)
    assert "stop_reason" in rec


def test_eig_bounds_missing_or_bad_file_exits_2(tmp_path, capsys):
    rc = cli.main(["eig-bounds", "--moments", str(tmp_path / "nope.json"),
                   "-o", str(tmp_path)])
    assert rc == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["eig-bounds", "--moments", str(bad), "-o", str(tmp_path)]) == 2
    capsys.readouterr()


def test_compare_interval_preset(tmp_path, capsys):
    rc = cli.main(["compare", "--preset", "interval-bounds",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS interval-bounds:" in out
    assert "all checks passed" in out
    report = json.loads((tmp_path / "compare_report.json").read_text())
    assert report["all_passed"] is True
    assert report["preset"] == "interval-bounds"
    assert (tmp_path / "compare_checks.csv").exists()
    text = (tmp_path / "compare_checks.csv").read_text()
    assert "true" in text


def test_compare_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        rc = cli.main(["compare", "--preset", "interval-bounds",
                       "-o", str(d), "--no-figures"])
        assert rc == 0
    assert (a / "compare_report.json").read_bytes() == (b / "compare_report.json").read_bytes()


def test_compare_config_file_and_flag_priority(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "torus-square-vs-cap",
                               "resolution": 96, "n_moments": 3,
                               "figures": False}))
    rc = cli.main(["compare", "--config", str(cfg), "--resolution", "64",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    report = json.loads((tmp_path / "compare_report.json").read_text())
    # the command line flag wins over the config value
    assert report["resolution"] == 64
    assert report["n_moments"] == 3


def test_compare_config_validation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"preset": "interval-bounds", "resolutionn": 64}))
    assert cli.main(["compare", "--config", str(bad), "-o", str(tmp_path)]) == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"preset": "interval-bounds", "resolution": True}))
    assert cli.main(["compare", "--config", str(wrong), "-o", str(tmp_path)]) == 2
    assert cli.main(["compare", "-o", str(tmp_path)]) == 2    # no preset at all


def test_compare_failure_exits_4(tmp_path, monkeypatch, capsys):
    def failing(n_moments, resolution, sphere_choice, n_radii, out, render):
        return [{"name": "rigged", "passed": False}]

    monkeypatch.setitem(cli._PRESET_FUNCS, "interval-bounds", failing)
    rc = cli.main(["compare", "--preset", "interval-bounds",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 4
    assert "FAIL interval-bounds:rigged" in capsys.readouterr().out


def test_compare_convergence_error_exits_3(tmp_path, monkeypatch):
    def stuck(n_moments, resolution, sphere_choice, n_radii, out, render):
        raise ConvergenceError("iteration stalled")

    monkeypatch.setitem(cli._PRESET_FUNCS, "interval-bounds", stuck)
    rc = cli.main(["compare", "--preset", "interval-bounds",
                   "-o", str(tmp_path), "--no-figures"])
    assert rc == 3


def test_symmetrize_constant_profile(tmp_path, capsys):
    src = tmp_path / "sample.csv"
    src.write_text("value,weight\n" + "\n".join(["2.5,0.1"] * 5) + "\n")
    rc = cli.main(["symmetrize", "--input", str(src), "--ambient-volume",
                   repr(4 * math.pi), "-o", str(tmp_path), "--no-figures"])
    assert rc == 0
    assert "ball radius" in capsys.readouterr().out
    rows = (tmp_path / "symmetrized.csv").read_text().strip().splitlines()
    assert rows[0] == "r,f_star"
    vals = {float(r.split(",")[1]) for r in rows[1:]}
    assert vals == {2.5}


def test_symmetrize_validation(tmp_path):
    src = tmp_path / "sample.csv"
    src.write_text("2.5,0.1\n")
    # ambient volume must exceed the sample weight
    assert cli.main(["symmetrize", "--input", str(src), "--ambient-volume",
                     "0.05", "-o", str(tmp_path)]) == 2
    assert cli.main(["symmetrize", "--input", str(tmp_path / "none.csv"),
                     "--ambient-volume", "10", "-o", str(tmp_path)]) == 2
    junk = tmp_path / "junk.csv"
    junk.write_text("value,weight\n1.0\n")
    assert cli.main(["symmetrize", "--input", str(junk), "--ambient-volume",
                     "10", "-o", str(tmp_path)]) == 2
    with pytest.raises(SystemExit):
        cli.main(["symmetrize", "--input", str(src)])    # missing required flag


def test_format_selection(tmp_path):
    rc = cli.main(["ball-moments", "--space", "euclidean", "-d", "1",
                   "--rho", "0.5", "-N", "2", "-o", str(tmp_path / "j"),
                   "--format", "json", "--no-figures"])
    assert rc == 0
    assert (tmp_path / "j" / "ball_moments.json").exists()
    assert not (tmp_path / "j" / "ball_profiles.csv").exists()
    rc = cli.main(["ball-moments", "--space", "euclidean", "-d", "1",
                   "--rho", "0.5", "-N", "2", "-o", str(tmp_path / "c"),
                   "--format", "csv", "--no-figures"])
    assert rc == 0
    assert not (tmp_path / "c" / "ball_moments.json").exists()
    assert (tmp_path / "c" / "ball_profiles.csv").exists()


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate"])
