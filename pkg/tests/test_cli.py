import xml.etree.ElementTree as ET

import pytest

from dynantenna.cli import build_parser, main
from dynantenna.experiment import read_pattern_csv, reference_spacing
from dynantenna.pattern import staticness

COMMANDS = ["synth", "slope", "link", "sweep", "ib", "preset", "plot"]


@pytest.fixture(scope="module")
def e_pattern(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "e.csv"
    assert main(["synth", "--spacing", str(reference_spacing()), "--alpha-db", "inf",
                 "--plane", "E", "--step", "1", "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "s.csv"
    assert main(["sweep", "--alpha-db", "10", "--mod", "4,16,256", "--bits", "4800",
                 "--seed", "1", "--out", str(out)]) == 0
    return out


@pytest.mark.parametrize("cmd", COMMANDS)
def test_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    sub = build_parser()._subparsers._group_actions[0].choices[cmd]
    for action in sub._actions:
        for flag in action.option_strings:
            assert flag in out


def test_synth_grid(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["synth", "--spacing", "0.323", "--alpha-db", "10", "--plane", "E",
                 "--step", "1", "--out", str(out)]) == 0
    dp = read_pattern_csv(out)
    assert len(dp.grid) == 361
    assert len(out.read_text().splitlines()) == 1 + 2 * 361


def test_synth_h_plane(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["synth", "--alpha-db", "inf", "--plane", "H", "--out", str(out)]) == 0
    assert staticness(read_pattern_csv(out)) == 0


@pytest.mark.parametrize("argv", [
    ["synth", "--spacing", "-1", "--out", "x.csv"],
    ["synth", "--alpha-db", "-3", "--out", "x.csv"],
    ["synth", "--spacing", "3", "--out", "x.csv"],
    ["link", "--pattern", "missing.csv", "--theta", "0"],
    ["frobnicate"],
])
def test_input_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_numeric_failure(tmp_path):
    f = tmp_path / "z.csv"
    f.write_text("plane,state,theta_deg,mag_db,phase_deg\n"
                 + "".join(f"E,{s},{t},{'-inf' if (s, t) == (1, 1) else 0},0\n"
                           for s in (1, 2) for t in range(5)))
    assert main(["slope", "--pattern", str(f)]) == 3


def test_slope(e_pattern, capsys):
    assert main(["slope", "--pattern", str(e_pattern), "--fit-range", "80"]) == 0
    out = capsys.readouterr().out
    slope = float(out.split()[0].split("=")[1])
    assert abs(slope) == pytest.approx(1.66, abs=1e-3)


def test_link_boresight(e_pattern, capsys):
    assert main(["link", "--pattern", str(e_pattern), "--theta", "0", "--mod", "16",
                 "--snr-db", "40", "--bits", "48000", "--seed", "1"]) == 0
    assert "ber=0.0 " in capsys.readouterr().out


def test_link_row_error(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("plane,state,theta_deg,mag_db,phase_deg\nE,1,0,abc,0\n")
    assert main(["link", "--pattern", str(f), "--theta", "0"]) == 2
    err = capsys.readouterr().err
    assert "bad.csv" in err and "row 2" in err


def test_sweep_deterministic(sweep_csv, tmp_path):
    again = tmp_path / "again.csv"
    assert main(["sweep", "--alpha-db", "10", "--mod", "4,16,256", "--bits", "4800",
                 "--seed", "1", "--jobs", "2", "--out", str(again)]) == 0
    assert again.read_bytes() == sweep_csv.read_bytes()


def test_ib_report(tmp_path, capsys):
    lines = ["plane,theta_deg,order,ber,evm_rms,mag_err_rms,phase_err_rms_deg,h1_re,h1_im,h2_re,h2_im,dphi_deg"]
    for th in range(-180, 181):
        ber = 0.0 if -18 <= th <= 16 else 0.1
        lines.append(f"E,{th}.0,16,{ber},0,0,0,1,0,1,0,0")
    f = tmp_path / "s.csv"
    f.write_text("\n".join(lines) + "\n")
    out = tmp_path / "ib.txt"
    assert main(["ib", "--sweep", str(f), "--threshold", "1e-3", "--out", str(out)]) == 0
    text = out.read_text()
    assert "start=-18 end=16 width=34" in text
    assert "total_width=34 threshold=0.001" in text


def test_preset(capsys):
    assert main(["preset", "fig6-6.02"]) == 0
    out = capsys.readouterr().out
    assert '"snr_db": 40.0' in out and '"n_bits": 48000' in out


@pytest.mark.parametrize("metric", ["ber", "evm", "phase"])
@pytest.mark.parametrize("polar", [False, True])
def test_plot(sweep_csv, tmp_path, metric, polar):
    out = tmp_path / "p.svg"
    argv = ["plot", "--sweep", str(sweep_csv), "--metric", metric, "--mod", "4,16,256", "--out", str(out)]
    assert main(argv + (["--polar"] if polar else [])) == 0
    root = ET.parse(out).getroot()
    ns = "{http://www.w3.org/2000/svg}"
    series = [e for e in root.iter(f"{ns}polyline") if e.get("class") == "series"]
    assert len(series) == 3
    thresholds = [e for e in root.iter() if e.get("class") == "threshold"]
    assert len(thresholds) == (1 if metric == "ber" else 0)


def test_plot_single_order(sweep_csv, tmp_path):
    out = tmp_path / "p.svg"
    assert main(["plot", "--sweep", str(sweep_csv), "--mod", "16", "--out", str(out)]) == 0
    root = ET.parse(out).getroot()
    assert sum(1 for e in root.iter() if e.get("class") == "series") == 1
