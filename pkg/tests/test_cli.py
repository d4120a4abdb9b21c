import filecmp
import os

import numpy as np
import pytest

from minh2r.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATED, load_solution, main, run_pipeline
from minh2r.config import ConfigError, load_config, parse_config
from minh2r.domains import domain_from_text

SCHERK = """[run]
family = helicoidal-scherk
[params]
n = 2
h = 1.0
[mesh]
ell = 0.2
[solve]
ms = 4, 8, 16
[assemble]
l = 4
"""

HELICOIDAL = """[run]
family = helicoidal
[params]
m = {m}
h = 1.0
f = {f}
[mesh]
ell = 0.3
eps_arc = 0.1
[solve]
ms = 8
[assemble]
l = 2
[analysis]
curvature = false
"""


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture(scope="module")
def scherk_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("scherk")
    cfg = _write(tmp, SCHERK)
    out = str(tmp / "out")
    assert main(["build", cfg, "-o", out]) == EXIT_OK
    return cfg, out


def test_build_artifacts(scherk_run):
    _, out = scherk_run
    for name in ("domain.txt", "sweep.csv", "curvature.csv", "surface.obj", "summary.txt", "manifest.ini"):
        assert os.path.isfile(os.path.join(out, name)), name
    assert sorted(os.listdir(os.path.join(out, "solutions"))) == ["level0", "level1", "level2"]
    obj = open(os.path.join(out, "surface.obj")).read().splitlines()
    groups = [ln for ln in obj if ln.startswith("g ")]
    assert groups[0] == "g e" and len(groups) == len(set(groups)) > 1
    assert "status = ok" in open(os.path.join(out, "manifest.ini")).read()


def test_rerun_is_byte_identical(scherk_run):
    cfg, out = scherk_run
    before = {}
    for root, _, files in os.walk(out):
        for f in files:
            p = os.path.join(root, f)
            before[p] = open(p, "rb").read()
    assert main(["build", cfg, "-o", out]) == EXIT_OK
    for p, data in before.items():
        assert open(p, "rb").read() == data, p


def test_manifest_round_trip(scherk_run):
    cfg, out = scherk_run
    a = load_config(cfg, [f"run.output={out}"])
    b = load_config(os.path.join(out, "manifest.ini"))
    assert a == b


def test_solution_round_trip(scherk_run):
    _, out = scherk_run
    d = domain_from_text(open(os.path.join(out, "domain.txt")).read())
    sol = load_solution(os.path.join(out, "solutions", "level2"), d)
    cfg = load_config(os.path.join(out, "manifest.ini"))
    fresh = run_pipeline(cfg).solutions[-1]
    np.testing.assert_array_equal(sol.u, fresh.u)
    np.testing.assert_array_equal(sol.mesh.triangles, fresh.mesh.triangles)
    assert sol.M == 16.0


def test_export_formats(scherk_run, tmp_path):
    _, out = scherk_run
    obj = tmp_path / "s.obj"
    assert main(["export", out, "--format", "obj", "-o", str(obj)]) == EXIT_OK
    assert filecmp.cmp(obj, os.path.join(out, "surface.obj"), shallow=False)
    verts = tmp_path / "v.csv"
    assert main(["export", out, "--format", "vertices", "-o", str(verts), "--level", "0"]) == EXIT_OK
    assert len(verts.read_text().splitlines()) > 10
    dom = tmp_path / "d.txt"
    assert main(["export", out, "--format", "domain", "-o", str(dom)]) == EXIT_OK
    assert dom.read_text() == open(os.path.join(out, "domain.txt")).read()


def test_invalid_theta_names_field_and_line(tmp_path, capsys):
    cfg = _write(tmp_path, "[run]\nfamily = non-periodic\n[params]\ntheta = 4\nf = constant 1\n")
    assert main(["verify", cfg]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "run.ini:4:" in err and "theta" in err


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match=r":5: .*colour"):
        parse_config("[run]\nfamily = helicoidal-scherk\n[params]\nn = 2\ncolour = red\n", "x.ini")


def test_set_override(tmp_path):
    cfg = _write(tmp_path, SCHERK)
    assert load_config(cfg, ["params.n=3"]).n == 3
    assert main(["verify", cfg, "--set", "params.n=0"]) == EXIT_CONFIG


def test_families_listing(capsys):
    assert main(["families"]) == EXIT_OK
    out = capsys.readouterr().out
    for fam in ("helicoidal-scherk", "helicoidal", "axis-at-infinity-scherk", "axis-at-infinity-helicoidal", "non-periodic"):
        assert fam in out
    assert "f = helicoid" in out and "h = 0" in out


def test_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", _write(tmp_path, SCHERK)]) == EXIT_OK
    assert main(["verify", _write(tmp_path, HELICOIDAL.format(m=3, f="constant 5"), "bad.ini")]) == EXIT_VIOLATED
    out = capsys.readouterr().out
    assert "verdict pass (exit 0)" in out and "(exit 3)" in out


def test_verify_helicoid(tmp_path, capsys):
    text = HELICOIDAL.format(m=4, f="helicoid").replace("ell = 0.3\neps_arc = 0.1\n", "")
    cfg = _write(tmp_path, text)
    assert main(["verify", cfg]) == EXIT_OK
    assert "helicoid-oracle          pass" in capsys.readouterr().out
