import json
import math
from decimal import Decimal

import pytest

from twinfock.combinat import LogProb
from twinfock.cli import (
    EXIT_CAP,
    EXIT_INVALID,
    EXIT_OK,
    fmt_log,
    log_grid,
    main,
    parse_noise_spec,
)


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().splitlines()
    header, rows = lines[0], lines[1:]
    return header, [line.split(",") for line in rows]


# -- helpers ----------------------------------------------------------------

def test_fmt_log_matches_plain_floats():
    for value in (0.5, 1.0, 2.0, 1e-5, 0.123456789, 3.0):
        rendered = Decimal(fmt_log(LogProb.from_value(value)))
        assert abs(rendered - Decimal(repr(value))) <= Decimal(repr(value)) * Decimal("1e-14")


def test_fmt_log_survives_underflow():
    tiny = LogProb(-2000.0)  # value far below the float64 range
    rendered = fmt_log(tiny)
    parsed = Decimal(rendered)
    assert parsed > 0
    expected_log10 = Decimal(-2000) / Decimal(repr(math.log(10)))
    assert abs(parsed.log10() - expected_log10) < Decimal("1e-10")
    assert fmt_log(LogProb(-math.inf)) == "0"


def test_log_grid_properties():
    grid = log_grid(10, 100_000, 49)
    assert grid[0] == 10 and grid[-1] == 100_000
    assert grid == sorted(set(grid))
    assert 10_000 in grid
    with pytest.raises(ValueError):
        log_grid(0, 10, 5)
    with pytest.raises(ValueError):
        log_grid(10, 5, 5)
    assert log_grid(7, 7, 5) == [7]


def test_parse_noise_spec():
    assert parse_noise_spec("thermal:0.5") == ("thermal", 0.5)
    with pytest.raises(ValueError):
        parse_noise_spec("thermal:-1")
    with pytest.raises(ValueError):
        parse_noise_spec("gaussian:1")
    with pytest.raises(ValueError):
        parse_noise_spec("thermal")


# -- verify -------------------------------------------------------------------

def test_verify_passes(capsys):
    code, out, _ = run(["verify", "--max-n", "2", "--max-m", "2"], capsys)
    assert code == EXIT_OK
    assert "all checks passed" in out
    assert "FAIL" not in out


def test_verify_degenerate_vacuum_run(capsys):
    code, out, _ = run(["verify", "--max-n", "0", "--max-m", "1"], capsys)
    assert code == EXIT_OK


def test_verify_cap_refusal(capsys):
    code, _, err = run(["verify", "--max-n", "50", "--max-m", "50"], capsys)
    assert code == EXIT_CAP
    assert "N=50" in err and "M=50" in err


def test_verify_invalid_bounds(capsys):
    code, _, _ = run(["verify", "--max-n", "-1", "--max-m", "2"], capsys)
    assert code == EXIT_INVALID


# -- state-dump ---------------------------------------------------------------

def test_state_dump_single_pair(capsys):
    code, out, _ = run(["state-dump", "--n", "1", "--m", "2"], capsys)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines == [
        "1,0\t1,0\t0.70710678118654746\t0",
        "0,1\t0,1\t0.70710678118654746\t0",
    ]


def test_state_dump_vacuum(capsys):
    code, out, _ = run(["state-dump", "--n", "0", "--m", "5"], capsys)
    assert code == EXIT_OK
    assert out.strip().splitlines() == ["0,0,0,0,0\t0,0,0,0,0\t1\t0"]


def test_state_dump_term_count(capsys, tmp_path):
    path = tmp_path / "dump.tsv"
    code, _, _ = run(["state-dump", "--n", "2", "--m", "3", "--out", str(path)], capsys)
    assert code == EXIT_OK
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 6  # C(4, 2) arrangements
    amplitudes = {line.split("\t")[2] for line in lines}
    assert len(amplitudes) == 1


def test_state_dump_cap(capsys):
    code, _, err = run(["state-dump", "--n", "40", "--m", "12"], capsys)
    assert code == EXIT_CAP
    assert "cap" in err


# -- pfa-curves -----------------------------------------------------------------

def test_pfa_structure_and_order(capsys):
    code, out, _ = run(["pfa-curves", "--n", "2", "--m-list", "2,10,7"], capsys)
    assert code == EXIT_OK
    header, rows = parse_csv(out)
    assert header == "series,N,M,value"
    # list is sorted ascending, series sorted per cell
    ms = [int(row[2]) for row in rows]
    assert ms == sorted(ms)
    per_cell = [row[0] for row in rows if row[2] == "2"]
    assert per_cell == sorted(per_cell)
    assert set(per_cell) == {
        "baseline:1_over_M", "baseline:N_over_M", "term:1", "term:2", "total",
    }


def test_pfa_single_photon_term_equals_baseline(capsys):
    code, out, _ = run(["pfa-curves", "--n", "1", "--m-list", "2,3,7,50"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    term = {row[2]: row[3] for row in rows if row[0] == "term:1"}
    base = {row[2]: row[3] for row in rows if row[0] == "baseline:1_over_M"}
    assert term == base  # byte-identical values


def test_pfa_term_values_positive_and_bounded(capsys):
    code, out, _ = run(["pfa-curves", "--n", "3", "--m-list", "3,30,300"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    for row in rows:
        if row[0].startswith("term:"):
            value = Decimal(row[3])
            assert 0 < value <= 1


def test_pfa_determinism(capsys, tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    args = ["pfa-curves", "--n", "10", "--m-points", "20", "--csv"]
    assert run(args + [str(first)], capsys)[0] == EXIT_OK
    assert run(args + [str(second)], capsys)[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_pfa_invalid_grid(capsys):
    code, _, err = run(["pfa-curves", "--n", "2", "--m-min", "0"], capsys)
    assert code == EXIT_INVALID
    code, _, _ = run(["pfa-curves", "--n", "2", "--m-points", "1"], capsys)
    assert code == EXIT_INVALID


def test_pfa_table_noise(capsys, tmp_path):
    table = tmp_path / "noise.txt"
    table.write_text("0.2\n0.1\n")
    code, out, _ = run(
        ["pfa-curves", "--n", "2", "--m-list", "2", "--noise", f"table:{table}"],
        capsys,
    )
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    total = next(Decimal(row[3]) for row in rows if row[0] == "total")
    # 0.2 * 2/3 + 0.1 * 1/3
    assert abs(total - Decimal("0.1666666666666666")) < Decimal("1e-14")


def test_pfa_missing_table_file(capsys, tmp_path):
    code, _, _ = run(
        ["pfa-curves", "--n", "2", "--noise", f"table:{tmp_path}/absent.txt"], capsys)
    assert code == EXIT_INVALID


def test_pfa_svg_written(capsys, tmp_path):
    svg = tmp_path / "chart.svg"
    code, _, _ = run(
        ["pfa-curves", "--n", "2", "--m-list", "2,20,200",
         "--csv", str(tmp_path / "out.csv"), "--svg", str(svg)],
        capsys,
    )
    assert code == EXIT_OK
    content = svg.read_text()
    assert content.startswith("<svg")
    assert "polyline" in content


def test_pfa_config_file_and_flag_precedence(capsys, tmp_path):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps({"n": [1], "m_list": [2, 4], "noise": "thermal:0.5"}))
    code, out, _ = run(["pfa-curves", "--config", str(config)], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert {row[2] for row in rows} == {"2", "4"}
    assert {row[1] for row in rows} == {"1"}
    # a flag beats the config value
    code, out, _ = run(
        ["pfa-curves", "--config", str(config), "--m-list", "8"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert {row[2] for row in rows} == {"8"}


def test_config_accepts_scalar_values(capsys, tmp_path):
    config = tmp_path / "scalar.json"
    config.write_text(json.dumps({"n": 1, "m_list": "3,9"}))
    code, out, _ = run(["pfa-curves", "--config", str(config)], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert {row[2] for row in rows} == {"3", "9"}
    config.write_text(json.dumps({"n": 2, "eta": 0.5}))
    code, out, _ = run(["pmd-curve", "--config", str(config)], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert rows == [["2", "0.5", "0.25"]]


def test_pfa_rejects_unknown_config_keys(capsys, tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"modes": [2]}))
    code, _, err = run(["pfa-curves", "--config", str(config)], capsys)
    assert code == EXIT_INVALID
    assert "unknown config keys" in err


# -- pmd-curve -------------------------------------------------------------------

def test_pmd_values(capsys):
    code, out, _ = run(
        ["pmd-curve", "--n", "10", "--n", "1", "--eta", "0", "--eta", "0.5"], capsys)
    assert code == EXIT_OK
    header, rows = parse_csv(out)
    assert header == "N,eta,p_md"
    values = {(row[0], row[1]): row[2] for row in rows}
    assert values[("1", "0")] == "1"
    assert values[("10", "0.5")] == "0.0009765625"


def test_pmd_large_photon_number(capsys):
    code, out, _ = run(["pmd-curve", "--n", "100", "--eta", "0.1"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert float(rows[0][2]) == pytest.approx(math.exp(100 * math.log(0.9)), rel=1e-12)


def test_pmd_eta_out_of_range(capsys):
    code, _, _ = run(["pmd-curve", "--n", "2", "--eta", "1.5"], capsys)
    assert code == EXIT_INVALID


def test_pmd_grid(capsys):
    code, out, _ = run(
        ["pmd-curve", "--n", "2", "--eta-min", "0", "--eta-max", "1",
         "--eta-points", "5"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert [row[1] for row in rows] == ["0", "0.25", "0.5", "0.75", "1"]


# -- top-level parsing --------------------------------------------------------------

def test_unknown_subcommand_exits_invalid(capsys):
    assert main(["frobnicate"]) == EXIT_INVALID


def test_missing_subcommand_exits_invalid(capsys):
    assert main([]) == EXIT_INVALID
