import csv
import math

import pytest

from narmax_lbe.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_sine(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, stdout, _ = run(["run", "--case", "sine", "--out", str(out)], capsys)
    assert code == 0
    lam = float(next(l for l in stdout.splitlines() if l.startswith("lambda:")).split()[1])
    assert 1.0 <= lam <= 1.3
    rows = read_csv(out)
    assert rows[0] == ["n", "zeta", "log2_zeta", "argmax_i", "argmax_j"]
    assert len(rows) == 102
    # initial condition is shared: zero error and an empty log cell
    assert rows[1][1:3] == ["0.0", ""]


def test_csv_values_round_trip(tmp_path, capsys):
    from narmax_lbe.cases import sine_map_case
    from narmax_lbe.lbe import lbe_series
    from narmax_lbe.simulate import simulate_ensemble

    out = tmp_path / "s.csv"
    run(["run", "--case", "sine", "--out", str(out), "--per-orbit"], capsys)
    rows = read_csv(out)
    assert rows[0][-4:] == ["x_0", "x_1", "x_2", "x_3"]
    ens = simulate_ensemble(sine_map_case().model)
    zs = lbe_series(ens)
    for n, row in enumerate(rows[1:]):
        assert float(row[1]) == zs.zeta[n]
        assert [float(v) for v in row[5:]] == ens.values[:, n].tolist()
        if row[2]:
            assert float(row[2]) == math.log2(zs.zeta[n])


def test_run_n_zero_is_fit_error(tmp_path, capsys):
    code, _, err = run(
        ["run", "--case", "sine", "--n", "0", "--out", str(tmp_path / "x.csv")], capsys
    )
    assert code == 3
    assert "fit error" in err


def test_export_and_run_model_matches_case(tmp_path, capsys):
    model = tmp_path / "sine.yaml"
    assert run(["export", "--case", "sine", "--out", str(model)], capsys)[0] == 0
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["run", "--case", "sine", "--out", str(a)], capsys)[0] == 0
    assert run(["run", "--model", str(model), "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_export_duffing_contains_pi_literal(tmp_path, capsys):
    path = tmp_path / "duffing.yaml"
    run(["export", "--case", "duffing", "--out", str(path)], capsys)
    assert "ts: pi/60" in path.read_text()


def test_duffing_report_warns_about_defaults(tmp_path, capsys):
    code, stdout, _ = run(
        ["run", "--case", "duffing", "--out", str(tmp_path / "d.csv")], capsys
    )
    assert code == 0
    assert "WARNING: input amplitude A=11 is an assumed default" in stdout
    assert "WARNING: initial lags" in stdout
    assert "lambda / Ts:" in stdout


def test_duffing_amplitude_override_reported(tmp_path, capsys):
    code, stdout, _ = run(
        ["run", "--case", "duffing", "--amplitude", "9", "--out", str(tmp_path / "d.csv")],
        capsys,
    )
    assert code == 0
    assert "deviates from the default" in stdout


def test_amplitude_rejected_for_sine(tmp_path, capsys):
    code, _, _ = run(["run", "--case", "sine", "--amplitude", "2",
                      "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 2


def test_manual_window(tmp_path, capsys):
    code, stdout, _ = run(["run", "--case", "sine", "--fit-start", "10", "--fit-end", "30",
                           "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 0
    assert "fit window:       [10, 30] (21 points)" in stdout
    code, _, _ = run(["run", "--case", "sine", "--fit-start", "10", "--fit-end", "12",
                      "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 3


def test_equivalence_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(
        "name: bad\nextensions: ['y(n-1)', '2*y(n-1)']\ninitial: [0.1]\n"
    )
    code, _, err = run(["run", "--model", str(bad), "--out", str(tmp_path / "x.csv")],
                       capsys)
    assert code == 2
    assert "extensions 0 and 1" in err


def test_syntax_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: bad\nextensions: ['y(n-1', 'y(n-1)']\ninitial: [0.1]\n")
    assert run(["run", "--model", str(bad), "--out", str(tmp_path / "x.csv")], capsys)[0] == 2


def test_io_errors(tmp_path, capsys):
    missing = tmp_path / "nope.yaml"
    assert run(["run", "--model", str(missing)], capsys)[0] == 4
    out = tmp_path / "no_such_dir" / "x.csv"
    assert run(["run", "--case", "sine", "--out", str(out)], capsys)[0] == 4
    assert run(["export", "--case", "sine", "--out", str(out)], capsys)[0] == 4


def test_argument_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == 2


def test_pow_mode_flag(tmp_path, capsys):
    code, stdout, _ = run(["run", "--case", "sine", "--pow-mode", "repeated",
                           "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 0
    assert "pow_mode:         repeated" in stdout
