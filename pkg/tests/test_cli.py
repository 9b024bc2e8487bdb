import json
from fractions import Fraction

import pytest

from ckpfaffian.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, ClassReport, compute_report, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCompute:
    def test_one_part_point(self, capsys):
        code, out, _ = run(capsys, "compute", "--n", "1", "--lambda", "1", "--model", "point",
                           "--trunc", "3", "--pipeline", "both")
        assert code == EXIT_OK
        rep = ClassReport.from_json(json.loads(out))
        assert rep.equal is True
        coeffs = rep.coefficients()
        assert coeffs[((1,), 0)] == Fraction(1, 2)
        assert coeffs[((2,), 1)] == Fraction(-1, 4)
        assert coeffs[((3,), 2)] == Fraction(1, 8)

    def test_beta_zero(self, capsys):
        code, out, _ = run(capsys, "compute", "--n", "2", "--lambda", "2,1", "--beta", "zero",
                           "--pipeline", "both")
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["equal"] is True
        assert all(t["beta_exponent"] == 0 for t in rep["terms"])

    def test_part_too_large(self, capsys):
        code, _, err = run(capsys, "compute", "--n", "1", "--lambda", "2")
        assert code == EXIT_USAGE
        assert "error" in err

    def test_bad_flag(self, capsys):
        assert run(capsys, "compute", "--beta", "seven")[0] == EXIT_USAGE

    def test_window_below_trunc(self, capsys):
        assert run(capsys, "compute", "--n", "2", "--lambda", "2", "--trunc", "5", "--window", "3")[0] == EXIT_USAGE

    @pytest.mark.parametrize("fmt", ["csv", "text"])
    def test_formats(self, capsys, fmt):
        code, out, _ = run(capsys, "compute", "--n", "2", "--lambda", "2", "--trunc", "3", "--format", fmt)
        assert code == EXIT_OK
        assert "x1" in out

    def test_free_model(self, capsys):
        code, out, _ = run(capsys, "compute", "--lambda", "2,1", "--model", "free", "--trunc", "5")
        assert code == EXIT_OK
        assert "s1_1" in json.loads(out)["generators"]

    def test_round_trip(self):
        rep = compute_report(2, (2, 1), "point", 5, "symbolic")
        back = ClassReport.from_json(json.loads(json.dumps(rep.to_json())))
        assert back == rep
        with pytest.raises(ValueError):
            ClassReport.from_json({**rep.to_json(), "schema": 99})

    def test_unwritable_output(self, capsys, tmp_path):
        target = tmp_path / "missing" / "out.json"
        assert run(capsys, "compute", "--n", "1", "--lambda", "1", "--out", str(target))[0] == EXIT_IO


class TestVerify:
    def test_pfaffian_vs_product(self, capsys):
        code, out, _ = run(capsys, "verify", "pfaffian-vs-product", "--n", "3", "--trunc", "8")
        assert code == EXIT_OK
        summary = json.loads(out)
        assert summary["total"] == 8 and summary["failed"] == 0

    def test_schur_pfaffian(self, capsys):
        code, out, _ = run(capsys, "verify", "schur-pfaffian", "--r", "3", "--window", "6")
        assert code == EXIT_OK

    def test_quadric(self, capsys):
        code, out, _ = run(capsys, "verify", "quadric", "--n", "2", "--beta-bound", "16")
        assert code == EXIT_OK
        assert json.loads(out)["passed"] == 2

    @pytest.mark.parametrize("suite", ["gamma-support", "segre-negative", "specialize-commute"])
    def test_other_suites(self, capsys, suite):
        code, out, _ = run(capsys, "verify", suite, "--n", "2", "--r", "2", "--trunc", "4", "--samples", "5",
                           "--format", "text")
        assert code == EXIT_OK
        assert "passed" in out

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "nonsense")[0] == EXIT_USAGE


class TestQuadricCommand:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "quadric", "--n", "1", "--beta-bound", "4")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["basis"] == ["1", "f"]
        assert data["report"]["rel1"] and data["report"]["rel2"]

    def test_bound_too_small(self, capsys):
        assert run(capsys, "quadric", "--n", "3", "--beta-bound", "2")[0] == EXIT_USAGE


class TestGolden:
    def test_deterministic_and_checked(self, capsys, tmp_path):
        out = tmp_path / "golden"
        args = ["export-golden", "--n", "2", "--trunc", "6", "--out", str(out)]
        assert run(capsys, *args)[0] == EXIT_OK
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        assert sorted(first) == ["classes_point_n1_D6_symbolic.json", "classes_point_n2_D6_symbolic.json"]
        assert run(capsys, *args)[0] == EXIT_OK
        assert {p.name: p.read_bytes() for p in out.iterdir()} == first
        assert run(capsys, *args, "--check")[0] == EXIT_OK

    def test_tampered(self, capsys, tmp_path):
        out = tmp_path / "golden"
        args = ["export-golden", "--n", "1", "--trunc", "4", "--out", str(out)]
        run(capsys, *args)
        path = out / "classes_point_n1_D4_symbolic.json"
        path.write_text(path.read_text().replace('"1"', '"3"', 1))
        code, _, err = run(capsys, *args, "--check")
        assert code == EXIT_FAIL
        assert path.name in err

    def test_missing_golden(self, capsys, tmp_path):
        code = run(capsys, "export-golden", "--n", "1", "--trunc", "4", "--out", str(tmp_path / "none"), "--check")[0]
        assert code == EXIT_IO
