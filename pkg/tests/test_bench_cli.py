"""Growth benchmark and command line."""

import csv
import io
import json

import pytest

from presburger_speedup.bench import CSV_HEADER, bench_growth, fit_linear
from presburger_speedup.cli import run_cli

# (a, b) with node_count <= a*n + b, fitted once on max_n = 10
PINNED_FITS = {"Mul": (149, 41), "Hyp": (1043, 318), "Div": (1192, 380), "Pow": (335, 45), "Root": (1675, 385)}


@pytest.fixture(scope="module")
def report():
    return bench_growth(6, seed=0)


def strip_times(rep):
    return [r.csv_fields()[:-1] + [r.note] for r in rep.rows]


def test_csv_schema(report):
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert tuple(rows[0]) == CSV_HEADER
    assert all(len(r) == len(CSV_HEADER) for r in rows)
    assert {r[0] for r in rows[1:]} >= {"Mul", "Hyp", "Div", "Pow", "Root", "PraAltAxiom", "OddDegreeAxiom"}


def test_rows_sorted(report):
    keys = [(r.family, r.n) for r in report.rows]
    assert keys == sorted(keys)
    assert set(report.metadata) >= {"seed", "version"}


def test_deterministic_except_time(report):
    assert strip_times(bench_growth(6, seed=0)) == strip_times(report)


def test_pinned_linear_bounds():
    rep = bench_growth(10, seed=0, qe_corpus=0)
    for fam, (a, b) in PINNED_FITS.items():
        rows = rep.family(fam)
        assert len(rows) == 11
        assert all(r.node_count <= a * r.n + b for r in rows), fam
        assert fit_linear(rows) == (a, b)


def test_mul_deltas_constant(report):
    sizes = [r.node_count for r in report.family("Mul")]
    assert len({b - a for a, b in zip(sizes[1:], sizes[2:])}) == 1


def test_pow_row_golden(report):
    row = report.family("Pow")[0]
    assert (row.node_count, row.paper_symbols, row.rendered_len) == (45, 45, 96)


def test_pra_alt_axiom_rows(report):
    rows = report.family("PraAltAxiom")
    assert [r.n for r in rows] == list(range(1, 7))
    for r in rows:
        assert r.paper_symbols > 2 ** (2**r.n - 1)
    assert rows[1].paper_symbols == 6 * 11 * 11 + 4 * 11 + 5
    assert rows[-1].rendered_len is None


def test_rendered_len_matches_rerender(report):
    from presburger_speedup import render
    from presburger_speedup.pra_families import gen_mul

    row = report.family("Mul")[3]
    assert row.rendered_len == len(render(gen_mul(3)).encode("utf-8"))


def test_qe_rows(report):
    ins, outs = report.family("QE-in"), report.family("QE-out")
    assert len(ins) == len(outs) == 20
    assert all(r.node_count > 0 or r.note for r in outs)


def test_max_n_range():
    with pytest.raises(ValueError):
        bench_growth(17)


# ------------------------------------------------------------ CLI


def run(argv, capsys):
    code = run_cli(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_true_and_false(capsys):
    assert run(["decide", "E x. x + x = 4"], capsys)[:2] == (0, "TRUE\n")
    assert run(["decide", "E x. x + x = 5"], capsys)[:2] == (1, "FALSE\n")


def test_decide_explain(capsys):
    code, out, _ = run(["decide", "4 =_2 0", "--explain"], capsys)
    assert code == 0 and "rules [13, 12, 9]" in out


def test_decide_ground(capsys):
    from presburger_speedup import render
    from presburger_speedup.pra_families import hyp_at

    assert run(["decide", "--ground", render(hyp_at(0, 2))], capsys)[0] == 0
    assert run(["decide", "--ground", render(hyp_at(0, 3))], capsys)[0] == 1


def test_parse_error_exit(capsys):
    code, _, err = run(["decide", "E x. x + = 4"], capsys)
    assert code == 2 and "error" in err
    assert run(["decide", "x = 0"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2


def test_budget_exit(capsys):
    assert run(["qe", "A x. A y. A z. E w. 2*w + x = y + 3*z", "--budget", "5"], capsys)[0] == 3


def test_qe_and_trace(tmp_path, capsys):
    out_file = tmp_path / "t.json"
    code, out, _ = run(["qe", "E x. (x + x = y)", "--trace", str(out_file)], capsys)
    assert code == 0
    qf = out.strip()
    code, out, _ = run(["oracle", "equiv", "E x. x + x = y", qf, "--vars", "y", "--bound", "20"], capsys)
    assert code == 0 and out.startswith("EQUIVALENT")
    data = json.loads(out_file.read_text())
    assert all(set(d) == {"step", "before", "after", "note"} for d in data)


def test_oracle_reports_disagreement(capsys):
    code, out, _ = run(["oracle", "equiv", "y = 0", "y = 1", "--vars", "y", "--bound", "1"], capsys)
    assert code == 0 and out.startswith("NOT CONFIRMED") and "{'y': 0}" in out


def test_print_size_parse(capsys):
    assert run(["print", "x<y"], capsys)[1] == "x + 1 <= y\n"
    code, out, _ = run(["size", "0 = 0"], capsys)
    assert code == 0 and "paper_symbols=3" in out
    assert run(["parse", "x * y <= 1", "--rcf"], capsys)[0] == 0
    assert run(["parse", "x * y <= 1"], capsys)[0] == 2


def test_gen_families(capsys):
    code, out, _ = run(["gen", "pra-alt-axiom", "--p", "3", "--size"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "A x. x =_3 0 | x =_3 1 | x =_3 2"
    assert "paper_symbols=71" in out
    assert run(["gen", "pra-alt-axiom", "--p", "4"], capsys)[0] == 2
    assert run(["gen", "mul"], capsys)[0] == 2
    code, out, _ = run(["gen", "mul", "--n", "1", "--naive", "--size"], capsys)
    assert code == 0 and "node_count=192" in out
    assert len(run(["gen", "pra-minus-axioms"], capsys)[1].splitlines()) == 7
    for argv in (
        ["gen", "pow", "--n", "2"],
        ["gen", "hyp-rcf", "--n", "0"],
        ["gen", "root", "--n", "0"],
        ["gen", "sqrt-axiom"],
        ["gen", "odd-degree-axiom", "--m", "3"],
        ["gen", "lub", "--phi", "x * x <= 1 + 1"],
        ["gen", "induction", "--phi", "x =_2 0"],
        ["gen", "hyp", "--n", "1"],
        ["gen", "div", "--n", "1"],
    ):
        assert run(argv, capsys)[0] == 0, argv


def test_mp_commands(capsys):
    code, out, _ = run(["mp", "--p", "5", "residue", "--m", "3", "--elem", "X"], capsys)
    assert code == 0 and "remainder 0" in out
    code, out, _ = run(["mp", "--p", "5", "residue", "--m", "5", "--elem", "X"], capsys)
    assert "none" in out
    code, out, _ = run(["mp", "--p", "5", "check-axiom", "--m", "5", "--samples", "20"], capsys)
    assert code == 0 and "fails" in out
    assert run(["mp", "--p", "6", "residue", "--m", "3", "--elem", "X"], capsys)[0] == 2


def test_bench_cli(tmp_path, capsys):
    out_file = tmp_path / "g.csv"
    code, _, err = run(["bench", "growth", "--max-n", "2", "--out", str(out_file)], capsys)
    assert code == 0
    assert out_file.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert "linear_fits" in err
