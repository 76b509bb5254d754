import io
import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import TestCase

from code_basis_reduction.bench import sample_random_code
from code_basis_reduction.cli import main
from code_basis_reduction.gf import GF2
from code_basis_reduction.linalg import CodeBasis, read_matrix, write_matrix

BENCHMARKS = Path(__file__).resolve().parent.parent / "benchmarks"


class CommandLineTestCase(TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def _run(self, *argv: str) -> tuple[int, str, str]:
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            status = main(list(argv))
        return status, out.getvalue(), err.getvalue()

    def test_bound_prints_the_griesmer_inverse(self):
        status, out, _ = self._run("bound", "--alg", "lll", "--q", "2", "--n", "7", "--k", "3")
        self.assertEqual(status, 0)
        self.assertEqual(out.strip(), "4")

    def test_bound_for_full_backward_reduction(self):
        status, out, _ = self._run(
            "bound", "--alg", "fullbackward", "--q", "2", "--n", "12", "--k", "4", "--tau", "2"
        )
        self.assertEqual(status, 0)
        self.assertEqual(out.strip(), "6")

    def test_usage_errors_exit_with_status_two(self):
        status, _, err = self._run("bound", "--alg", "bkz", "--q", "2", "--n", "7", "--k", "3")
        self.assertEqual(status, 2)
        self.assertIn("--beta", err)
        status, _, err = self._run("reduce", "--alg", "lll")
        self.assertEqual(status, 2)
        self.assertIn("error:", err)

    def test_wdist_prints_decimal_strings(self):
        status, out, _ = self._run("wdist", "--q", "2", "--profile", "2,1", "--n", "5")
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual(data["weights"], ["1", "3", "3", "1", "0", "0"])
        self.assertEqual(data["n"], 5)

    def test_wdist_refuses_large_fields(self):
        status, _, err = self._run("wdist", "--q", "32", "--profile", "3,2")
        self.assertEqual(status, 2)
        self.assertIn("q <= 16", err)

    def test_reduce_random_code_writes_matrix_and_report(self):
        matrix, report = self.root / "g.txt", self.root / "r.json"
        status, out, _ = self._run(
            "reduce", "--alg", "lll", "--q", "2", "--n", "20", "--k", "10", "--seed", "1",
            "--out", str(matrix), "--report", str(report),
        )  # fmt: skip
        self.assertEqual(status, 0)
        reduced = read_matrix(matrix)
        self.assertTrue(reduced.same_code(sample_random_code(2, 10, 20, 1)))
        summary = json.loads(report.read_text())
        self.assertEqual(summary["profile"], reduced.profile())
        self.assertEqual(summary["l1"], reduced.length(0))
        self.assertTrue(all(summary["checks"].values()))
        self.assertIn("l1=", out)

    def test_reduce_systematizes_an_improper_input_file(self):
        source = self.root / "in.txt"
        write_matrix(source, CodeBasis.from_matrix(GF2, [[1, 1, 0, 0, 1], [1, 0, 0, 0, 1]]))
        status, _, _ = self._run("reduce", "--alg", "bkz", "--beta", "2", "--in", str(source))
        self.assertEqual(status, 0)

    def test_bench_run_applies_flag_overrides(self):
        report, table = self.root / "lll.json", self.root / "lll.csv"
        status, out, _ = self._run(
            "bench", "run", "--config", str(BENCHMARKS / "lll.toml"), "--n", "16", "--k", "8",
            "--trials", "2", "--report", str(report), "--csv", str(table),
        )  # fmt: skip
        self.assertEqual(status, 0)
        data = json.loads(report.read_text())
        self.assertEqual(data["config"]["n"], 16)
        self.assertEqual(len(data["trials"]), 2)
        self.assertTrue(table.exists())
        self.assertIn("lll q=2 n=16 k=8", out)
