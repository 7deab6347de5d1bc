import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from lsa import settings
from lsa.cli import main
from lsa.settings import root_dir
from lsa.utils import load_json

TEST_FILES = root_dir / "tests" / "test_files"


def run(*argv):
    """
    Run the CLI and return (exit status, parsed stdout or None, stderr text).
    """
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = main(list(argv))
    text = out.getvalue()
    return status, json.loads(text) if text else None, err.getvalue()


class TestVerify(unittest.TestCase):
    def test_catalog_algebra(self):
        status, report, _ = run("verify", "--catalog", "NV")
        self.assertEqual(status, 0)
        self.assertEqual(report["norm"], 0)
        self.assertTrue(report["verified"])

    def test_input_file(self):
        status, report, _ = run("verify", "--input", str(TEST_FILES / "algebra_nv.json"))
        self.assertEqual(status, 0)
        self.assertEqual(report["regular_representation"], 0)

    def test_tolerance_applies_to_one_invocation(self):
        before = settings.TOLERANCE
        status, report, _ = run("verify", "--catalog", "NV", "--tolerance", "1e-3")
        self.assertEqual(status, 0)
        self.assertEqual(report["tolerance"], 1e-3)
        self.assertEqual(settings.TOLERANCE, before)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "reports" / "nv.json"
            status, report, _ = run("verify", "--catalog", "NV", "--output", str(path))
            self.assertEqual(status, 0)
            self.assertEqual(load_json(path, True), report)


class TestInputErrors(unittest.TestCase):
    def test_malformed_algebra_names_the_field(self):
        status, report, err = run("verify", "--input", str(TEST_FILES / "algebra_bad_index.json"))
        self.assertEqual(status, 2)
        self.assertIsNone(report)
        self.assertIn("products[0].left", err)

    def test_missing_file(self):
        status, _, err = run("verify", "--input", str(TEST_FILES / "missing.json"))
        self.assertEqual(status, 2)
        self.assertIn("missing.json", err)

    def test_unknown_catalog_id(self):
        status, _, err = run("verify", "--catalog", "NVI")
        self.assertEqual(status, 2)
        self.assertTrue(err.startswith("lsa verify: error:"))

    def test_both_sources(self):
        status, _, _ = run(
            "verify", "--catalog", "NV", "--input", str(TEST_FILES / "algebra_nv.json")
        )
        self.assertEqual(status, 2)

    def test_both_tensors(self):
        status, _, _ = run(
            "s-residual", "--catalog", "NV", "--family", "SE(NV)-diag", "--r", "[[1, 0], [0, 0]]",
            "--params", "r11=1",
        )
        self.assertEqual(status, 2)

    def test_bad_params_exit_through_argparse(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main(["verify", "--catalog", "NV", "--params", "k"])
        self.assertEqual(ctx.exception.code, 2)
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                main([])


class TestSubAdjacent(unittest.TestCase):
    def test_nv(self):
        status, report, _ = run("sub-adjacent", "--catalog", "NV")
        self.assertEqual(status, 0)
        self.assertEqual([(b["left"], b["right"]) for b in report["brackets"]], [(1, 2)])

    def test_not_left_symmetric(self):
        data = {
            "dim": 2,
            "products": [
                {"left": 1, "right": 2, "coeffs": [[1, 0], [0, 0]]},
                {"left": 2, "right": 1, "coeffs": [[0, 0], [1, 0]]},
            ],
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "swapped.json"
            path.write_text(json.dumps(data))
            status, report, _ = run("sub-adjacent", "--input", str(path))
        self.assertEqual(status, 1)
        self.assertFalse(report["verified"])
        self.assertIn("error", report)


class TestTensorVerbs(unittest.TestCase):
    def test_identity_is_not_a_solution_for_nv(self):
        status, report, _ = run("s-residual", "--catalog", "NV", "--r", "[[1, 0], [0, 1]]")
        self.assertEqual(status, 1)
        self.assertGreater(report["norm"], 0)
        self.assertGreater(report["operator_norm"], 0)

    def test_family_with_inferred_algebra(self):
        status, report, _ = run("s-residual", "--family", "SE(NV)-double", "--params", "r11=2")
        self.assertEqual(status, 0)
        self.assertEqual(report["norm"], 0)

    def test_dual_product_from_files(self):
        status, report, _ = run(
            "dual-product",
            "--input", str(TEST_FILES / "algebra_nv.json"),
            "--r", str(TEST_FILES / "r_nv_double.json"),
        )
        self.assertEqual(status, 0)
        self.assertTrue(report["verified"])
        self.assertEqual(report["dim"], 2)

    def test_branch_and_algebra_parameter(self):
        status, _, _ = run(
            "s-residual", "--catalog", "NIV_k", "--family", "SE(NIV_k)", "--params", "k=3,r11=1.5"
        )
        self.assertEqual(status, 0)
        status, _, _ = run("s-residual", "--family", "SE(NI)", "--branch", "-", "--params", "r11=1,r22=4")
        self.assertEqual(status, 0)

    def test_build_phase_and_parakahler(self):
        argv = ("--catalog", "AI", "--family", "SE(AI)-diag", "--params", "r11=1,r22=2")
        status, report, _ = run("build-phase", *argv)
        self.assertEqual(status, 0)
        self.assertEqual(len(report["basis"]), 4)
        status, report, _ = run("check-parakahler", *argv)
        self.assertEqual(status, 0)
        self.assertTrue(report["verified"])


class TestIsomorphismVerbs(unittest.TestCase):
    def test_untwist(self):
        status, report, _ = run("untwist", "--family", "SE(AI)-diag", "--params", "r11=1,r22=2")
        self.assertEqual(status, 0)
        self.assertLess(report["lie_residual"], 1e-9)
        self.assertLess(report["pullback_residual"], 1e-9)
        self.assertTrue(report["plus_preserved"])
        self.assertFalse(report["minus_preserved"])

    def test_theorem39_verb(self):
        argv = ("--family", "SE(NV)-double", "--params", "r11=1.5")
        status, report, _ = run("theorem39", *argv)
        self.assertEqual(status, 0)
        self.assertLess(report["lie_residual"], 1e-9)
        alias_status, alias_report, _ = run("untwist", *argv)
        self.assertEqual((alias_status, alias_report), (status, report))

    def test_identity_is_not_an_isomorphism(self):
        identity = json.dumps([[int(i == j) for j in range(4)] for i in range(4)])
        status, report, _ = run(
            "check-iso", "--family", "SE(AI)-diag", "--params", "r11=1,r22=2", "--phi", identity
        )
        self.assertEqual(status, 1)
        self.assertGreater(report["lie_residual"], 0)
        self.assertEqual(report["pullback_residual"], 0)

    def test_phi_is_required(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                main(["check-iso", "--family", "SE(AI)-diag", "--params", "r11=1,r22=2"])


class TestSolve(unittest.TestCase):
    def test_deterministic(self):
        argv = ("solve", "--catalog", "AI", "--starts", "20", "--seed", "1")
        first, second = run(*argv), run(*argv)
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])
        self.assertEqual(first[1]["config"]["starts"], 20)

    def test_clusters_name_their_families(self):
        status, report, _ = run("solve", "--catalog", "AI", "--starts", "100", "--seed", "0")
        self.assertEqual(status, 0)
        self.assertTrue(report["invertibility"]["invertible_found"])
        for cluster in report["clusters"]:
            self.assertTrue(set(cluster["families"]) <= {"SE(AI)-diag", "SE(AI)-equal"})
            self.assertTrue(cluster["families"])


class TestCatalog(unittest.TestCase):
    def test_list(self):
        status, report, _ = run("catalog", "list")
        self.assertEqual(status, 0)
        self.assertIn("NV", report["algebras"])
        self.assertIn("SE(NV)-complex", report["families"])

    def test_export(self):
        status, report, _ = run("catalog", "export")
        self.assertEqual(status, 0)
        self.assertIn("errata", report)

    def test_sweep(self):
        status, report, _ = run("catalog", "sweep", "--family", "SE(AIV)", "--family", "SE(NV)-double", "--samples", "3")
        self.assertEqual(status, 0)
        self.assertTrue(report["reconciled"])
        self.assertEqual([f["family"] for f in report["families"]], ["SE(AIV)", "SE(NV)-double"])

    def test_sweep_rejects_zero_samples(self):
        status, _, _ = run("catalog", "sweep", "--samples", "0")
        self.assertEqual(status, 2)


if __name__ == "__main__":
    unittest.main()
