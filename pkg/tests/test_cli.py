import json

import pytest

from lqgtiles import __version__
from lqgtiles.cli import main
from lqgtiles.io import load_tiling, read_csv


def run(tmp_path, *args):
    import os
    cwd = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(list(args))
    finally:
        os.chdir(cwd)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_tile_round_trip(tmp_path):
    out = str(tmp_path / "t.tiling")
    rc = main(["tile", "--q", "1.0", "--backend", "stub", "--epsilon", "0.3",
               "--depth-cap", "8", "--out", out])
    assert rc == 0
    t = load_tiling(out)
    assert len(t) == 16 and t.n_unresolved == 0
    assert t.params.q == 1.0 and t.epsilon == 0.3


def test_kpz_csv_rows_and_meta(tmp_path):
    out = str(tmp_path / "k.csv")
    rc = main(["kpz", "--q", "1.0", "--backend", "stub",
               "--epsilon", "0.125", "--ladder-steps", "3", "--replicas", "2",
               "--depth-cap", "10", "--out", out])
    assert rc == 0
    kind, meta, cols, rows = read_csv(out)
    assert kind == "kpz"
    assert cols == ["epsilon", "replica", "count", "unresolved_hits"]
    assert len(rows) == 6  # steps x replicas
    assert meta["fractal"] == "horizontal-segment"
    assert meta["backend"] == "stub"
    assert len(meta["config_hash"]) == 32
    # plot files accompany the CSV
    assert (tmp_path / "k.dat").exists() and (tmp_path / "k.gp").exists()


def test_kpz_fractal_flag(tmp_path):
    out = str(tmp_path / "p.csv")
    rc = main(["kpz", "--q", "1.0", "--backend", "stub", "--epsilon", "0.25",
               "--ladder-steps", "2", "--depth-cap", "8", "--out", out,
               "--fractal", json.dumps({"kind": "point"})])
    assert rc == 0
    _, meta, _, rows = read_csv(out)
    assert meta["fractal"] == "point"
    assert all(int(r[2]) in (1, 2, 4) for r in rows)


def test_distance_csv(tmp_path):
    out = str(tmp_path / "d.csv")
    rc = main(["distance", "--q", "1.0", "--backend", "stub",
               "--epsilon", "0.125", "--ladder-steps", "2", "--depth-cap", "9",
               "--z", "0.25", "0.5", "--w", "0.75", "0.5", "--out", out])
    assert rc == 0
    kind, meta, cols, rows = read_csv(out)
    assert kind == "ptp" and len(rows) == 2
    assert all(int(r[2]) > 0 and r[3] == "0" for r in rows)


def test_ball_csv(tmp_path):
    out = str(tmp_path / "b.csv")
    rc = main(["ball", "--q", "1.0", "--backend", "stub",
               "--epsilon", "0.015625", "--depth-cap", "9",
               "--radii", "2", "4", "--out", out])
    assert rc == 0
    kind, _, cols, rows = read_csv(out)
    assert kind == "ball" and len(rows) == 2
    assert cols == ["radius", "replica", "count", "truncated"]


def test_flags_override_config_file(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"q": 1.0, "epsilon": 0.3,
                                   "backend": "stub", "depth_cap": 8}))
    out = str(tmp_path / "t.tiling")
    rc = main(["tile", "--config", str(cfgfile), "--epsilon", "1.0",
               "--out", out])
    assert rc == 0
    t = load_tiling(out)
    assert len(t) == 1  # flag epsilon=1.0 beat the file's 0.3


def test_exit_code_config_error(tmp_path, capsys):
    # both c_m and q -> 2
    assert main(["tile", "--q", "1.0", "--cm", "0.0", "--backend", "stub",
                 "--out", str(tmp_path / "x")]) == 2
    # bad --fractal JSON -> 2
    assert main(["kpz", "--q", "1.0", "--backend", "stub",
                 "--fractal", "{bad", "--out", str(tmp_path / "x")]) == 2
    capsys.readouterr()


def test_exit_code_domain_error(tmp_path, capsys):
    # supercritical measure campaign -> 2
    rc = main(["measure", "--q", "1.0", "--backend", "stub",
               "--epsilon", "0.25", "--ladder-steps", "2", "--depth-cap", "8",
               "--out", str(tmp_path / "m.csv")])
    assert rc == 2
    capsys.readouterr()


def test_exit_code_capacity_error(tmp_path, capsys):
    # field_depth shallower than the levels the subdivision reaches -> 4
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"q": 1.0, "epsilon": 2.0 ** -6,
                                   "backend": "octave", "depth_cap": 10,
                                   "field_depth": 3, "seed": 1}))
    rc = main(["tile", "--config", str(cfgfile),
               "--out", str(tmp_path / "t")])
    assert rc == 4
    capsys.readouterr()


def test_field_check_passes(tmp_path, capsys):
    rc = run(tmp_path, "field-check", "--q", "2.0", "--mc-replicas", "60")
    out = capsys.readouterr().out
    assert rc == 0
    assert "all checks passed" in out
    assert "FAIL" not in out
