"""Command-line interface: every subcommand, argument handling, output shapes."""

import json
import math

import numpy as np
import pytest

from feketedyn.cli import main
from feketedyn.potential import DiscreteMeasure


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ----------------------------------------------------------------- capacity

def test_capacity_poly_inline(capsys):
    code, out, _ = run(capsys, "capacity", "--poly", "-2 0 1")
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-12)


def test_capacity_poly_file(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("0 1 2\n")
    code, out, _ = run(capsys, "capacity", "--poly-file", str(f))
    assert code == 0
    # cap = |a_d|^(-1/(d-1)) = 2^(-1) for 2z^2 + z
    assert float(out.strip()) == pytest.approx(0.5, abs=1e-12)


def test_capacity_set_config(capsys, tmp_path):
    cfg = tmp_path / "set.cfg"
    cfg.write_text("kind = interval\na = -2\nb = 2\n")
    code, out, _ = run(capsys, "capacity", "--config", str(cfg))
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-12)


def test_capacity_requires_input(capsys):
    with pytest.raises(SystemExit):
        main(["capacity"])


# -------------------------------------------------------------------- green

def test_green_dynamical(capsys):
    code, out, _ = run(capsys, "green", "--poly", "0 0 1", "--at", "3,0")
    assert code == 0
    assert float(out.strip()) == pytest.approx(math.log(3.0), abs=1e-9)


def test_green_set(capsys, tmp_path):
    cfg = tmp_path / "set.cfg"
    cfg.write_text("kind = interval\na = -2\nb = 2\n")
    code, out, _ = run(capsys, "green", "--config", str(cfg),
                       "--at", "2.1,0")
    assert code == 0
    assert float(out.strip()) == pytest.approx(math.acosh(1.05), abs=1e-9)


# -------------------------------------------------------------------- julia

def test_julia_raster(capsys, tmp_path):
    out_dir = tmp_path / "img"
    code, out, _ = run(capsys, "julia", "--poly", "-2 0 1",
                       "--out", str(out_dir), "--resolution", "64,64")
    assert code == 0
    pgm = out_dir / "julia.pgm"
    assert pgm.exists()
    assert pgm.read_bytes().startswith(b"P5")
    sidecar = json.loads((out_dir / "julia.pgm.json").read_text())
    assert sidecar["resolution"] == [64, 64]
    assert str(pgm) in out


# ------------------------------------------------------------------- brolin

def test_brolin_csv(capsys, tmp_path):
    out_dir = tmp_path / "m"
    code, out, _ = run(capsys, "brolin", "--poly", "-2 0 1",
                       "--out", str(out_dir), "--n", "512", "--seed", "3")
    assert code == 0
    path = out_dir / "brolin.csv"
    assert path.read_text().splitlines()[0] == "re,im,weight"
    mu = DiscreteMeasure.from_csv(path)
    assert len(mu.points) == 512
    assert float(np.sum(mu.weights)) == pytest.approx(1.0, abs=1e-12)
    # K_{z^2-2} = [-2,2]
    assert float(np.max(np.abs(mu.points.real))) <= 2.0 + 1e-6
    assert float(np.max(np.abs(mu.points.imag))) <= 1e-5


# ------------------------------------------------------------------- klimek

def test_klimek_two_sets(capsys, tmp_path):
    cfg = tmp_path / "pair.cfg"
    cfg.write_text(
        "left = { kind = disk, center = 0, radius = 1 }\n"
        "right = { kind = disk, center = 0, radius = 2 }\n")
    code, out, _ = run(capsys, "klimek", "--config", str(cfg))
    assert code == 0
    rec = json.loads(out)
    assert rec["gamma"] == pytest.approx(math.log(2.0), abs=1e-3)
    assert set(rec) >= {"gamma", "argmax_point", "side", "cap_gap"}


def test_klimek_poly_side(capsys, tmp_path):
    cfg = tmp_path / "pair.cfg"
    cfg.write_text(
        "left_poly = -2 0 1\n"
        "right = { kind = interval, a = -2, b = 2 }\n"
        "n_atoms = 512\n"
        "seed = 1\n")
    code, out, _ = run(capsys, "klimek", "--config", str(cfg))
    assert code == 0
    rec = json.loads(out)
    assert rec["gamma"] <= 1e-3
    assert rec["cap_gap"] <= 1e-9


# ------------------------------------------------------------------- height

def test_height_weil_json(capsys):
    code, out, _ = run(capsys, "height", "weil", "--poly", "-1 -1 1",
                       "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "weil"
    # golden ratio: h = (1/2) log phi
    assert rec["total"] == pytest.approx(0.24060591252980173, abs=1e-12)
    assert rec["total"] == pytest.approx(
        rec["archimedean"] + rec["nonarchimedean"], abs=1e-12)


def test_height_rumely_collapse(capsys, tmp_path):
    cfg = tmp_path / "disk.cfg"
    cfg.write_text("kind = disk\ncenter = 0\nradius = 1\n")
    code, out, _ = run(capsys, "height", "rumely", "--poly", "-1 -1 1",
                       "--set", str(cfg), "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "rumely"
    assert rec["total"] == pytest.approx(0.24060591252980173, abs=1e-6)


def test_height_canonical(capsys, tmp_path):
    dyn = tmp_path / "map.txt"
    dyn.write_text("-2 0 1\n")
    code, out, _ = run(capsys, "height", "canonical", "--poly", "-3 1",
                       "--dyn", str(dyn), "--json")
    assert code == 0
    rec = json.loads(out)
    # hhat_{z^2-2}(3) = log((3+sqrt(5))/2)
    assert rec["total"] == pytest.approx(math.log((3 + math.sqrt(5)) / 2),
                                         abs=1e-6)


def test_height_plain_text(capsys):
    code, out, _ = run(capsys, "height", "weil", "--poly", "-1 -1 1")
    assert code == 0
    assert float(out.strip()) == pytest.approx(0.24060591252980173, abs=1e-12)


def test_height_canonical_needs_dyn(capsys):
    with pytest.raises(SystemExit):
        main(["height", "canonical", "--poly", "-3 1"])


# --------------------------------------------------------------- experiment

def test_experiment_runaway(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "name = drift\n"
        "family = runaway\n"
        "degree_range = [4, 6]\n"
        "outputs = [csv, json]\n")
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "experiment", "runaway",
                       "--config", str(cfg), "--out", str(out_dir))
    assert code == 0
    lines = out.strip().splitlines()
    assert str(out_dir / "drift.csv") in lines
    assert str(out_dir / "MANIFEST.json") in lines
    header = (out_dir / "drift.csv").read_text().splitlines()[0]
    assert header == "d,N_d,inside,max_modulus,h,target"


def test_experiment_seed_override_and_threads(capsys, tmp_path):
    cfg = tmp_path / "pow.cfg"
    cfg.write_text(
        "name = pow\n"
        "family = power_maps\n"
        "set = { kind = disk, center = 0, radius = 1 }\n"
        "degree_range = [2, 64]\n"
        "checkpoints = [4, 8]\n"
        "seed = 1\n"
        "n_atoms = 512\n")
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "experiment", "bilu_rumely",
                     "--config", str(cfg), "--out", str(out_dir),
                     "--seed", "5", "--threads", "2")
    assert code == 0
    man = json.loads((out_dir / "MANIFEST.json").read_text())
    assert man["seed"] == 5


def test_experiment_fs(capsys, tmp_path):
    cfg = tmp_path / "fs.cfg"
    cfg.write_text(
        "name = fs\n"
        "family = chebyshev\n"
        "set = { kind = interval, a = -2, b = 2 }\n"
        "degree_range = [2, 64]\n"
        "checkpoints = [4]\n"
        "epsilon = 0.1\n"
        "n_atoms = 512\n")
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "experiment", "dynamical_fs",
                       "--config", str(cfg), "--out", str(out_dir))
    assert code == 0
    payload = json.loads((out_dir / "fs.json").read_text())
    assert payload["columns"] == ["n", "gamma", "max_dist", "contained"]


def test_experiment_unknown_name(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("name = x\nfamily = runaway\n")
    with pytest.raises(SystemExit):
        main(["experiment", "nope", "--config", str(cfg), "--out",
              str(tmp_path / "o")])


def test_no_subcommand_errors(capsys):
    with pytest.raises(SystemExit):
        main([])
