import csv

import numpy as np
import pytest
import yaml

from floqheat.cli import main

from conftest import COUPLING, DRIVE, KAPPA, OMEGA0


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def chain_config(tmp_path, **net_extra):
    doc = {
        "network": {
            "omega": [OMEGA0] * 4,
            "kappa": [KAPPA] * 4,
            "T": [0.0] * 4,
            "hermitian": True,
            "couplings": [[1, 2, COUPLING, 0.0], [2, 3, COUPLING, 0.0],
                          [3, 4, COUPLING, 0.0]],
        },
        "modulation": {
            "beta": 0.05 * OMEGA0,
            "Omega": DRIVE,
            "theta": [0.0, 0.0, 0.5 * np.pi, 0.0],
            "mask": [0, 1, 1, 0],
        },
    }
    doc["network"].update(net_extra)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def test_power_default_chain(capsys, tmp_path):
    out_csv = tmp_path / "power.csv"
    code, out, _ = run(capsys, "power", "--methods", "qme",
                       "--out", str(out_csv))
    assert code == 0
    assert "P14" in out and "E = " in out
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["method"] == "qme"
    assert float(rows[0]["P14_W"]) > 0


def test_power_config_matches_flags(capsys, tmp_path):
    cfg = chain_config(tmp_path)
    code, out_cfg, _ = run(capsys, "power", "--config", str(cfg),
                           "--methods", "qme")
    assert code == 0
    code, out_flags, _ = run(capsys, "power", "--beta", "0.05",
                             "--theta", "0.5", "--methods", "qme")
    assert code == 0
    def p14(text):
        line = [l for l in text.splitlines() if "qme" in l][0]
        return float(line.split("P14 =")[1].split("W")[0])
    assert p14(out_cfg) == pytest.approx(p14(out_flags), rel=1e-12)


def test_shipped_example_config(capsys):
    import pathlib
    cfg = pathlib.Path(__file__).resolve().parent.parent / "demos" / "chain.yaml"
    code, out, _ = run(capsys, "power", "--config", str(cfg),
                       "--methods", "qme")
    assert code == 0
    line = [l for l in out.splitlines() if "qme" in l][0]
    e = float(line.split("E = ")[1])
    assert e == pytest.approx(0.5673, abs=2e-3)


def test_power_perturbation_methods(capsys):
    code, out, _ = run(capsys, "power", "--beta", "0.02", "--theta", "0.5",
                       "--methods", "qme,pert1,pert2")
    assert code == 0
    assert out.count("P14 =") == 3


def test_unknown_config_key_exits_3(capsys, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("network: {omega: [1.0], kappa: [0.1], typo: 1}\n"
                    "modulation: {beta: 0, Omega: 1, theta: [0], mask: [0]}\n")
    code, _, err = run(capsys, "power", "--config", str(path))
    assert code == 3
    assert "typo" in err


def test_invalid_network_exits_3(capsys, tmp_path):
    cfg = chain_config(tmp_path, kappa=[0.0] * 4)
    code, _, err = run(capsys, "power", "--config", str(cfg))
    assert code == 3
    assert "kappa" in err


def test_solver_failure_exits_2(capsys):
    code, _, err = run(capsys, "power", "--methods", "qme", "--nmax", "-5")
    assert code == 2
    assert "solver failure" in err


def test_unknown_method_exits_3(capsys):
    code, _, err = run(capsys, "power", "--methods", "sorcery")
    assert code == 3


def test_sweep_command(capsys, tmp_path):
    out_csv = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "--parameter", "beta",
                       "--values", "0,0.02,0.04", "--methods", "qme",
                       "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    betas = [float(r["beta_rad_s"]) for r in rows]
    assert betas == pytest.approx([0.0, 0.02 * OMEGA0, 0.04 * OMEGA0])


def test_theta_sweep_in_pi_units(capsys, tmp_path):
    out_csv = tmp_path / "theta.csv"
    code, _, _ = run(capsys, "sweep", "--parameter", "theta",
                     "--values=-0.5,0,0.5", "--methods", "pert1",
                     "--beta", "0.02", "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    thetas = [float(r["theta_rad"]) for r in rows]
    assert thetas == pytest.approx([-0.5 * np.pi, 0.0, 0.5 * np.pi])
    e_vals = [float(r["E"]) for r in rows]
    assert e_vals[0] == pytest.approx(-e_vals[2], abs=1e-9)


def test_spectrum_command(capsys, tmp_path):
    out_csv = tmp_path / "spec.csv"
    code, out, _ = run(capsys, "spectrum", "--nmax", "4",
                       "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert header == ["omega_rad_s", "source_bath", "observer",
                      "spectral_power_W_per_rad_s"]
    pairs = {(r[1], r[2]) for r in rows}
    assert pairs == {("1", "4"), ("4", "1")}


def test_compare_command(capsys):
    code, out, _ = run(capsys, "compare", "--beta", "0.02", "--theta", "0.5")
    assert code == 0
    assert "cross-validation PASS" in out


def test_fig4_preset_small(capsys, tmp_path, monkeypatch):
    # shrink the preset grid via nmax to keep the unit test fast
    out_csv = tmp_path / "fig4.csv"
    code, _, _ = run(capsys, "fig4", "--methods", "pert1", "--parallel", "2",
                     "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 * 41
    zero_rows = [r for r in rows if abs(float(r["theta_rad"])) < 1e-12]
    for r in zero_rows:
        assert abs(float(r["E"])) < 1e-9


def test_fig6_preset(capsys, tmp_path):
    out_csv = tmp_path / "fig6.csv"
    code, out, _ = run(capsys, "fig6", "--nmax", "3", "--out", str(out_csv))
    assert code == 0
    assert out_csv.exists()


def test_fig3a_preset_normalized(capsys, tmp_path):
    out_csv = tmp_path / "fig3a.csv"
    code, _, _ = run(capsys, "fig3a", "--methods", "qme",
                     "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * 13
    for r in rows:
        if float(r["beta_rad_s"]) == 0.0:
            assert float(r["P14_norm"]) == pytest.approx(1.0, rel=1e-12)
        else:
            # modulation suppresses the end-to-end transfer
            assert float(r["P14_norm"]) < 1.0


def test_fig7_preset(capsys, tmp_path):
    out_csv = tmp_path / "fig7.csv"
    code, _, _ = run(capsys, "fig7", "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["method"] for r in rows} == {"qme", "pert1", "pert2"}
    assert len(rows) == 3 * 13


def test_fig3b_preset(capsys, tmp_path):
    out_csv = tmp_path / "fig3b.csv"
    code, _, _ = run(capsys, "fig3b", "--nmax", "8", "--out", str(out_csv))
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"beta", "theta", "dP_exact_W", "dP_pa1_W",
                            "dP_pa2_W", "dP_closed_W"}
    assert len(rows) == 2 * 13
    # at beta = 0 every estimate vanishes
    for r in rows:
        if float(r["beta"]) == 0.0:
            assert float(r["dP_exact_W"]) == pytest.approx(0.0, abs=1e-30)
