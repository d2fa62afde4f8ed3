"""End-to-end CLI runs: outputs, determinism, exit codes."""

import json

import numpy as np
import pytest

from fpdist.cli import main


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def csv_floats(path, col, skip=1):
    out = []
    with open(path) as fh:
        for i, line in enumerate(fh):
            if i < skip:
                continue
            out.append(float(line.split(",")[col]))
    return out


def test_theory_poisson_summary_and_files(tmp_path):
    out = tmp_path / "th"
    assert main(["theory", "poisson", "--lambda", "8", "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["prob_delta_neg"] == pytest.approx(0.351673, abs=1e-4)
    assert s["mean_delta"] == pytest.approx(1.0, abs=1e-9)
    assert s["var_delta"] == pytest.approx(9.175113, abs=1e-4)
    for name in ("atoms.csv", "density.csv", "binned_mass.csv", "manifest.json"):
        assert (out / name).exists()
    # csv columns must parse as plain floats
    dens = csv_floats(out / "density.csv", 1)
    assert len(dens) > 100 and min(dens) >= 0.0
    assert sum(csv_floats(out / "atoms.csv", 2)) == pytest.approx(1.0, abs=1e-6)
    man = read_json(out / "manifest.json")
    assert set(man) == {"argv", "inputs", "outputs", "parameters",
                        "subcommand", "versions", "wall_time_s"}
    assert man["subcommand"] == "theory"
    assert "density.csv" in man["outputs"]


def test_theory_config_mean_matches_moment_identity(tmp_path):
    out = tmp_path / "cfg"
    assert main(["theory", "config", "--mean", "5", "--var", "10",
                 "--grid=-8:12:201", "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    # E[Delta] = Var(k) / E[k] for the configuration model
    assert s["mean_delta"] == pytest.approx(2.0, abs=1e-3)
    assert s["prob_delta_pos"] + s["prob_delta_zero"] + s["prob_delta_neg"] \
        == pytest.approx(1.0, abs=1e-9)
    assert (out / "degree_pmf.csv").exists()


def test_theory_maxent_reports_coupling(tmp_path):
    out = tmp_path / "me"
    assert main(["theory", "maxent", "--mean", "5", "--var", "10",
                 "--r", "0.3", "--grid=-8:12:201", "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["r"] == pytest.approx(0.3, abs=1e-6)
    assert s["gamma"] > 0
    assert s["mean_delta"] < 2.0
    model = read_json(out / "model.json")
    assert set(model) == {"gamma", "r", "k_support", "Z", "convergence"}


def test_theory_gfp_scales_the_mean(tmp_path):
    out = tmp_path / "gfp"
    assert main(["theory", "gfp", "--mean", "5", "--var", "10",
                 "--attr-b", "1.5", "--attr-sigma", "1.0",
                 "--grid=-10:14:161", "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["attribute"] == {"a": 0.0, "b": 1.5, "sigma": 1.0}
    assert s["mean_delta"] == pytest.approx(3.0, abs=1e-2)


def test_sample_poisson_is_seed_deterministic(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out in (a, b):
        assert main(["sample", "poisson", "--lambda", "4", "--n", "500",
                     "--seed", "9", "--out", str(out)]) == 0
    assert (a / "edges.txt").read_bytes() == (b / "edges.txt").read_bytes()
    assert main(["sample", "poisson", "--lambda", "4", "--n", "500",
                 "--seed", "10", "--out", str(c)]) == 0
    assert (a / "edges.txt").read_bytes() != (c / "edges.txt").read_bytes()
    meta = read_json(a / "sample_meta.json")
    assert meta["seed"] == 9 and meta["model"] == "poisson"
    man = read_json(a / "manifest.json")
    assert "edges.txt" in man["outputs"]


def test_sample_analyze_round_trip(tmp_path):
    out = tmp_path / "s"
    assert main(["sample", "config", "--mean", "5", "--var", "10",
                 "--n", "20000", "--seed", "4", "--out", str(out)]) == 0
    an = tmp_path / "an"
    assert main(["analyze", "--edges", str(out / "edges.txt"),
                 "--out", str(an)]) == 0
    s = read_json(an / "summary.json")
    assert s["identity_mean_kappa_pass"] is True
    assert s["identity_paradox_pass"] is True
    assert s["mean_kappa"] == pytest.approx(1.0, abs=1e-12)
    assert s["mean_delta"] == pytest.approx(2.0, abs=0.2)


def test_analyze_path_graph_values(tmp_path):
    edges = tmp_path / "p3.txt"
    edges.write_text("a b\nb c\n")
    out = tmp_path / "an"
    assert main(["analyze", "--edges", str(edges), "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["n"] == 3 and s["m"] == 2
    assert s["mean_delta"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert s["frac_delta_neg"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert s["assortativity"] == pytest.approx(-1.0, abs=1e-12)
    assert s["cov_x_kappa"] is None
    rows = (out / "nodes.csv").read_text().strip().split("\n")
    assert rows[0] == "id,k,delta,kappa"
    deltas = sorted(float(r.split(",")[2]) for r in rows[1:])
    assert deltas == [-1.0, 1.0, 1.0]


def test_analyze_with_attributes(tmp_path):
    edges = tmp_path / "p3.txt"
    edges.write_text("a b\nb c\n")
    attrs = tmp_path / "x.csv"
    attrs.write_text("a,1.0\nb,2.5\nc,0.5\n")
    out = tmp_path / "an"
    assert main(["analyze", "--edges", str(edges),
                 "--attributes", str(attrs), "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["mean_delta_x"] == pytest.approx(s["cov_x_kappa"], abs=1e-12)
    assert s["cov_x_kappa"] == pytest.approx(7.0 / 12.0, abs=1e-12)
    header = (out / "nodes.csv").read_text().split("\n")[0]
    assert header == "id,k,delta,kappa,x,delta_x"


def test_sample_maxent_then_compare(tmp_path):
    out = tmp_path / "g"
    assert main(["sample", "maxent", "--mean", "8", "--var", "32",
                 "--r", "0.3", "--m-edges", "30000", "--seed", "5",
                 "--out", str(out)]) == 0
    cmp_dir = tmp_path / "cmp"
    assert main(["compare", "--edges", str(out / "edges.txt"),
                 "--out", str(cmp_dir)]) == 0
    d = read_json(cmp_dir / "comparison.json")
    assert set(d) == {"n", "m", "r_measured", "p_k", "measured",
                      "config", "maxent"}
    assert d["p_k"]["kind"] == "empirical-histogram"
    assert d["r_measured"] == pytest.approx(0.3, abs=0.06)
    assert d["maxent"]["r"] == pytest.approx(d["r_measured"], abs=1e-6)
    gap_me = abs(d["maxent"]["std_delta"] - d["measured"]["std_delta"])
    gap_cfg = abs(d["config"]["std_delta"] - d["measured"]["std_delta"])
    assert gap_me < gap_cfg

    fit_dir = tmp_path / "cmpf"
    assert main(["compare", "--edges", str(out / "edges.txt"), "--fit-pk",
                 "--out", str(fit_dir)]) == 0
    df = read_json(fit_dir / "comparison.json")
    assert df["p_k"]["kind"] == "fitted-power-law-cutoff"
    assert set(df["p_k"]) == {"kind", "alpha", "beta"}


def test_exit_codes(tmp_path):
    assert main(["theory", "poisson", "--lambda", "-3",
                 "--out", str(tmp_path / "x")]) == 1
    assert main(["theory", "maxent", "--mean", "5", "--var", "10",
                 "--out", str(tmp_path / "x")]) == 1   # missing --r
    assert main(["analyze", "--edges", str(tmp_path / "missing.txt"),
                 "--out", str(tmp_path / "x")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nc\n")
    assert main(["analyze", "--edges", str(bad),
                 "--out", str(tmp_path / "x")]) == 2
    assert main(["sample", "maxent", "--mean", "8", "--var", "32",
                 "--m-edges", "100", "--out", str(tmp_path / "x")]) == 1
