import json
import os
import subprocess
import sys

import numpy as np
import pytest

from freesd.cli import build_parser, main, sup_distance
from freesd.density import DensityCurve

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden(name):
    return os.path.join(GOLDEN, name)


def write_config(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def load_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


@pytest.mark.parametrize("case", ["symexp_small", "half_exp_small"])
def test_density_matches_golden(tmp_path, capsys, case):
    out = tmp_path / "d.csv"
    assert main(["density", "--config", golden(case + ".json"), "--out", str(out)]) == 0
    header, got = load_csv(out)
    gheader, want = load_csv(golden(case + ".csv"))
    assert header == gheader == "x,v,xi,f"
    assert got.shape == want.shape
    assert np.allclose(got, want, rtol=1e-9, atol=1e-300)
    assert np.all(np.diff(got[:, 2]) > 0)
    line = capsys.readouterr().out.strip()
    assert line.startswith("mass=") and " mode=" in line and " fmax=" in line


def test_density_output_is_bit_identical_across_runs_and_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = golden("half_exp_small.json")
    assert main(["density", "--config", cfg, "--out", str(a)]) == 0
    assert main(["density", "--config", cfg, "--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cumulants_match_golden(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["cumulants", "--config", golden("symexp_small.json"), "--order", "8", "--out", str(out)]) == 0
    header, got = load_csv(out)
    _, want = load_csv(golden("cumulants_symexp.csv"))
    assert header == "n,kappa,moment"
    assert np.allclose(got, want, rtol=1e-10, atol=1e-12)
    table = capsys.readouterr().out.splitlines()
    assert table[0].split() == ["n", "kappa", "moment"]
    assert len(table) == 9


def test_cumulants_symexp_order_4_values(tmp_path, capsys):
    cfg = write_config(tmp_path, {"levy": {"family": "symexp", "params": {"lambda": 1}}})
    assert main(["cumulants", "--config", cfg, "--order", "4"]) == 0
    rows = [list(map(float, line.split()[1:])) for line in capsys.readouterr().out.splitlines()[1:]]
    assert np.allclose([r[0] for r in rows], [0, 2, 0, 12], atol=1e-8)
    assert np.allclose([r[1] for r in rows], [0, 2, 0, 20], atol=1e-8)


def test_cumulants_gauss_scaled_kappa_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {"levy": {"family": "gauss-scaled", "params": {"a": 1, "n": 64}}})
    assert main(["cumulants", "--config", cfg, "--order", "2"]) == 0
    kappa2 = float(capsys.readouterr().out.splitlines()[2].split()[1])
    assert abs(kappa2 - 1) <= 1e-3


def test_order_cap_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, {"levy": {"family": "symexp"}})
    assert main(["cumulants", "--config", cfg, "--order", "13"]) == 2
    assert "order" in capsys.readouterr().err


def test_divergent_cumulant_exits_3(tmp_path, capsys):
    cfg = write_config(tmp_path, {"levy": {"family": "cauchy"}})
    assert main(["cumulants", "--config", cfg, "--order", "2"]) == 3
    assert "DivergentIntegralError" in capsys.readouterr().err


def test_truncated_domain_exits_3_with_mass_message(tmp_path, capsys):
    cfg = write_config(tmp_path, {"levy": {"family": "symexp"}, "grid": {"x_min": -0.5, "x_max": 0.5}})
    assert main(["density", "--config", cfg, "--out", str(tmp_path / "d.csv")]) == 3
    err = capsys.readouterr().err
    assert "MassDeficitError" in err and "mass" in err


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["density", "--config", str(tmp_path / "missing.json")]) == 2
    cfg = write_config(tmp_path, {"levy": {"family": "symexp"}, "bogus": 1})
    assert main(["density", "--config", cfg]) == 2
    cfg = write_config(tmp_path, {"levy": {"family": "symexp"}, "a": 1})
    assert main(["density", "--config", cfg]) == 2


@pytest.mark.parametrize("strict", [True, False])
def test_corrupted_table_fails_validation(tmp_path, capsys, strict):
    params = {"knots": [-2, -1, 1, 2, 3, 4], "values": [0.1, 0.5, 1.0, 0.2, 0.5, 0.3], "strict": strict}
    cfg = write_config(tmp_path, {"levy": {"family": "table", "params": params}})
    assert main(["verify", "--config", cfg]) == 2
    out = capsys.readouterr()
    if not strict:
        assert "check=b_monotone pass=false" in out.out


def test_verify_lines_format(tmp_path, capsys):
    assert main(["verify", "--config", golden("symexp_small.json")]) in (0, 1)
    lines = capsys.readouterr().out.splitlines()
    names = [line.split()[0] for line in lines]
    for expected in (
        "check=a_bounded",
        "check=gh_identity",
        "check=gh_roundtrip",
        "check=homeomorphism",
        "check=mass",
        "check=stieltjes_two_path",
        "check=unimodal",
        "check=level_crossings",
        "check=angular_r=1",
    ):
        assert expected in names
    for line in lines:
        parts = line.split()
        assert parts[1] in ("pass=true", "pass=false")
        float(parts[2].split("=")[1])
    angular = [line for line in lines if line.startswith("check=angular_r=1 ")][0]
    assert "theta_r=" in angular and "cos_theta_r=" in angular


def test_mollify_writes_one_csv_per_n_and_a_report(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"levy": {"family": "symexp"}, "mollify": {"n": 8}, "grid": {"x_min": -11, "x_max": 11, "n_points": 64}},
    )
    out = tmp_path / "m"
    assert main(["mollify", "--config", cfg, "--n-list", "4,8", "--out", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["density_n4.csv", "density_n8.csv", "report.txt"]
    report = (out / "report.txt").read_text()
    assert "n=4 sigma_distance=" in report and "n=4->8 sup_density_distance=" in report
    assert "check=sigma_decreasing pass=true" in report
    assert report.strip() == capsys.readouterr().out.strip()


def test_parser_rejects_bad_n_list():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["mollify", "--config", "c.json", "--n-list", "4,x"])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["mollify", "--config", "c.json", "--n-list", "0"])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["frobnicate"])


def test_sup_distance_on_overlap():
    xi = np.linspace(-1, 1, 11)
    a = DensityCurve.from_arrays(xi, xi, xi, np.ones(11))
    b = DensityCurve.from_arrays(xi + 0.5, xi, xi + 0.5, 1.25 * np.ones(11))
    assert sup_distance(a, b) == pytest.approx(0.25)


def test_console_script_and_module_entry_points(tmp_path):
    cfg = golden("symexp_small.json")
    for cmd in (["freesd"], [sys.executable, "-m", "freesd"]):
        proc = subprocess.run(
            [*cmd, "cumulants", "--config", cfg, "--order", "2"], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.splitlines()[0].split() == ["n", "kappa", "moment"]
