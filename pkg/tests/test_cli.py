import json
import subprocess
import sys
from fractions import Fraction

import pytest

from onepoint.cli import StateSyntaxError, main, parse_state
from onepoint.qseries import qs_from_json
from onepoint.words import Tail


@pytest.fixture
def gram_file(tmp_path):
    path = tmp_path / "A1.json"
    path.write_text('{"rank": 1, "gram": [[2]]}')
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParseState:
    def test_colors(self):
        w = parse_state("h1[-2] h1[-4]", 1)
        assert w.factors == (((1,), 2), ((1,), 4)) and w.tail == Tail()

    def test_tail(self):
        w = parse_state("h1[-1] | g(2)", 1)
        assert w.factors == (((1,), 1),) and w.tail == Tail("g", (2,))

    def test_explicit_vector(self):
        w = parse_state("h(1/2,-1)[-3]  h2[-1] |e(1,0)", 2)
        assert w.factors[0] == ((Fraction(1, 2), Fraction(-1)), 3)
        assert w.tail == Tail("e", (1, 0))

    def test_empty(self):
        assert parse_state("", 3).p == 0

    @pytest.mark.parametrize("expr,rank,msg", [
        ("h1[0]", 1, "must be negative"),
        ("h1[2]", 1, "must be negative"),
        ("h3[-1]", 2, "out of range"),
        ("h1[-1] x", 1, "position 7"),
        ("h1[-1] | f(2,0)", 1, "coordinates"),
        ("h(1)[-1]", 2, "coordinates"),
        ("| f(0)", 1, "nonzero"),
        ("| f(2) h1[-1]", 1, "follow the tail"),
        ("h(a)[-1]", 1, "bad coordinate"),
    ])
    def test_errors(self, expr, rank, msg):
        with pytest.raises(StateSyntaxError, match=msg):
            parse_state(expr, rank)


class TestCommands:
    def test_char(self, capsys):
        code, out, _ = run(capsys, "char", "--algebra", "M+", "--rank", "1", "--order", "5")
        assert code == 0 and out.strip() == "q^(-1/24) * (1 + q^2 + q^3 + 3*q^4 + O(q^5))"

    def test_char_json_round_trip(self, capsys, gram_file):
        code, out, _ = run(capsys, "char", "--algebra", "VL+", "--gram", gram_file, "--order", "8", "--json")
        s = qs_from_json(json.loads(out)["series"])
        assert code == 0 and s.lead_exp == Fraction(-1, 24) and s.order == 8

    def test_trace_methods_agree(self, capsys, gram_file):
        outs = []
        for method in ("closed", "recursion"):
            code, out, _ = run(capsys, "trace", "--algebra", "VL+", "--gram", gram_file, "--state",
                               "h1[-2] h1[-1] h1[-1] | g(2)", "--order", "8", "--method", method, "--json")
            assert code == 0
            outs.append(qs_from_json(json.loads(out)["series"]))
        code, out, _ = run(capsys, "oracle-trace", "--algebra", "VL+", "--gram", gram_file, "--state",
                           "h1[-2] h1[-1] h1[-1] | g(2)", "--max-weight", "7", "--json")
        outs.append(qs_from_json(json.loads(out)["series"]))
        assert outs[0] == outs[1] == outs[2]

    def test_oracle_literal(self, capsys):
        code, out, _ = run(capsys, "oracle-trace", "--algebra", "M", "--rank", "1", "--state", "h1[-1] h1[-1]",
                           "--max-weight", "4", "--literal")
        assert code == 0 and out.startswith("q^(-1/24) * (-1/12 + 23/12*q")

    def test_missing_gram(self, capsys):
        code, _, err = run(capsys, "trace", "--algebra", "VL+", "--gram", "missing.json", "--state", "h1[-1] h1[-1]")
        assert code == 1 and "cannot read gram file" in err

    def test_bad_state(self, capsys):
        code, _, err = run(capsys, "trace", "--algebra", "M", "--rank", "1", "--state", "h1[0]")
        assert code == 1 and "position 0" in err

    def test_lattice_algebra_needs_gram(self, capsys):
        code, _, err = run(capsys, "trace", "--algebra", "VL", "--rank", "1", "--state", "h1[-1]")
        assert code == 1 and "--gram" in err

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["char", "--algebra", "M", "--rank", "1", "--bogus"])
        assert exc.value.code == 1

    def test_verify_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "heisenberg", "--rank", "1", "--max-weight", "6",
                           "--order", "20")
        assert code == 0 and out.strip().endswith("cases")

    def test_verify_json(self, capsys, gram_file):
        code, out, _ = run(capsys, "verify", "--suite", "lattice-plus-tail", "--gram", gram_file, "--alpha", "2",
                           "--max-weight", "2", "--order", "6", "--json")
        assert code == 0 and json.loads(out)["passed"]

    def test_modcheck_exit_codes(self, capsys):
        assert run(capsys, "modcheck", "--kind", "E", "--k", "2")[0] == 2
        assert run(capsys, "modcheck", "--kind", "E", "--k", "2", "--e2-correction")[0] == 0
        assert run(capsys, "modcheck", "--kind", "F", "--k", "4")[0] == 0

    def test_modcheck_from_series_file(self, capsys, tmp_path, gram_file):
        code, out, _ = run(capsys, "trace", "--algebra", "VL", "--gram", gram_file, "--state", "h1[-1] h1[-1]",
                           "--order", "40", "--json")
        path = tmp_path / "g.json"
        path.write_text(out)
        code, out, _ = run(capsys, "modcheck", "--series", str(path), "--weight", "2", "--level", "4")
        assert code == 0

    def test_eisenstein(self, capsys):
        code, out, _ = run(capsys, "eisenstein", "--kind", "Ehat", "--m", "2", "--n", "4", "--order", "2")
        assert code == 0 and out.strip() == "q^(0) * (1/1512 - 1/3*q + O(q^2))"
        assert run(capsys, "eisenstein", "--kind", "E")[0] == 1

    def test_theta(self, capsys, gram_file):
        code, out, _ = run(capsys, "theta", "--gram", gram_file, "--vector", "1", "--power", "2", "--order", "5")
        assert out.strip() == "q^(1) * (8 + 32*q^3 + O(q^4))"

    def test_elliptic(self, capsys):
        code, out, _ = run(capsys, "elliptic", "--which", "P1", "--m", "0", "--z-order", "1", "--q-order", "2",
                           "--json")
        terms = json.loads(out)["terms"]
        assert code == 0 and set(terms) == {"-1", "1"}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "onepoint", "char", "--algebra", "M", "--rank", "2", "--order", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "q^(-1/12) * (1 + 2*q + 5*q^2 + O(q^3))"
