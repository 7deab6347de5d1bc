import dataclasses
import unittest

import numpy as np

from lsa import settings
from lsa.algebra import Algebra, LieAlgebra, require_base_dim
from lsa.catalog import (ALGEBRAS, ERRATA, FAMILIES, get_family,
                         instantiate_algebra, instantiate_family)
from lsa.errors import DimensionError, SingularError
from lsa.phase_space import (LinearMap, bialgebra_report, build_phase_space,
                             canonical_omega, check_parakahler,
                             cross_check_brackets, lsa_from_symplectic,
                             semidirect_phase_space, two_cocycle_residual,
                             untwisting_map, verify_lie_isomorphism,
                             verify_symplectomorphism)
from lsa.s_equation import (BilinearForm, SymmetricTensor, dual_product,
                            s_residual_tensor)
from lsa.utils import decode_complex, load_json

TOL = 1e-9
PRINTED_BRACKETS = settings.root_dir / "tests" / "test_files" / "printed_brackets.json"


def printed_line(line):
    coeffs = {label: decode_complex(v) for label, v in line["coeffs"].items()}
    return line["left"], line["right"], coeffs


def nonzero_brackets(P):
    """
    {(i, j): coefficients} for i < j with a nonzero bracket.
    """
    m = P.lie.dim
    return {
        (i, j): P.lie.f[i, j] for i in range(m) for j in range(i + 1, m) if np.any(P.lie.f[i, j])
    }


def catalog_phase_spaces(seed=5):
    rng = np.random.default_rng(seed)
    for family in FAMILIES:
        for branch in family.branches:
            algebra_params, params = family.draw(rng)
            A = instantiate_algebra(family.algebra_id, algebra_params)
            r = SymmetricTensor(family.matrix(params, algebra_params, branch))
            if s_residual_tensor(A, r).norm < TOL:
                yield family.id, A, r, build_phase_space(A, r)


class TestCanonicalOmega(unittest.TestCase):
    def test_one_dimensional(self):
        omega = canonical_omega(1)
        self.assertEqual(omega([1, 0], [0, 1]), -1)
        self.assertEqual(omega([0, 1], [1, 0]), 1)

    def test_block_form(self):
        eye, zero = np.eye(2), np.zeros((2, 2))
        np.testing.assert_array_equal(canonical_omega(2).B, np.block([[zero, -eye], [eye, zero]]))

    def test_antisymmetric(self):
        B = canonical_omega(3).B
        np.testing.assert_array_equal(B + B.T, 0)

    def test_rejects_empty(self):
        with self.assertRaises(DimensionError):
            canonical_omega(0)


class TestTwoCocycle(unittest.TestCase):
    def test_abelian(self):
        L = LieAlgebra(np.zeros((4, 4, 4)))
        self.assertEqual(two_cocycle_residual(L, canonical_omega(2)), 0)

    def test_ai_phase_space(self):
        P = build_phase_space(instantiate_algebra("AI"), np.diag([1, 2]))
        self.assertLess(two_cocycle_residual(P.lie, P.omega), TOL)

    def test_heisenberg_with_paired_center(self):
        f = np.zeros((4, 4, 4))
        f[0, 1, 2], f[1, 0, 2] = 1, -1
        omega = np.zeros((4, 4))
        omega[2, 3], omega[3, 2] = 1, -1
        residual = two_cocycle_residual(LieAlgebra(f), BilinearForm(omega))
        self.assertEqual(residual, 1)


class TestBuildPhaseSpace(unittest.TestCase):
    def test_ai_diagonal_brackets(self):
        P = build_phase_space(instantiate_algebra("AI"), np.diag([1, 2]))
        brackets = nonzero_brackets(P)
        self.assertEqual(set(brackets), {(0, 2), (1, 3)})
        np.testing.assert_allclose(brackets[0, 2], [1, 0, -1, 0])
        np.testing.assert_allclose(brackets[1, 3], [0, 2, 0, -1])
        self.assertTrue(P.verified)

    def test_zero_r_is_the_semidirect_phase_space(self):
        rng = np.random.default_rng(2)
        for entry in ALGEBRAS:
            A = instantiate_algebra(entry.id, entry.draw(rng))
            P = build_phase_space(A, SymmetricTensor.zero(A.dim))
            Q = semidirect_phase_space(A)
            np.testing.assert_array_equal(P.lie.f, Q.lie.f, err_msg=entry.id)
            np.testing.assert_array_equal(P.lsa.c, Q.lsa.c, err_msg=entry.id)
            self.assertTrue(P.verified, entry.id)

    def test_phase_space_may_exceed_base_limit(self):
        n = settings.MAX_DIM // 2 + 1
        P = build_phase_space(Algebra.zero(n), SymmetricTensor.zero(n))
        self.assertEqual(P.lie.dim, 2 * n)
        self.assertGreater(P.lie.dim, settings.MAX_DIM)
        self.assertTrue(check_parakahler(P)["verified"])

    def test_base_limit(self):
        A = Algebra.zero(settings.MAX_DIM)
        self.assertIs(require_base_dim(A), A)
        with self.assertRaises(DimensionError):
            require_base_dim(Algebra.zero(settings.MAX_DIM + 1))
        with self.assertRaises(DimensionError):
            semidirect_phase_space(Algebra.zero(settings.MAX_DIM + 1))

    def test_nii_k_brackets(self):
        k = 3
        P = build_phase_space(instantiate_algebra("NII_k", {"k": k}), np.diag([0, 1]))
        f = P.lie.f
        np.testing.assert_allclose(f[0, 1], [1, 0, 0, 0])
        np.testing.assert_allclose(f[0, 3], [1, 0, 0, 0])
        np.testing.assert_allclose(f[1, 3], [0, k, 0, -k])
        np.testing.assert_allclose(f[1, 2], [0, 0, 1, 0])

    def test_non_solution_is_flagged(self):
        with self.assertLogs("lsa.phase_space", level="WARNING"):
            P = build_phase_space(instantiate_algebra("NV"), np.eye(2))
        self.assertFalse(P.verified)

    def test_json(self):
        data = build_phase_space(instantiate_algebra("AI"), np.diag([1, 2])).to_json()
        self.assertEqual(data["basis"], ["e1", "e2", "e1*", "e2*"])
        self.assertEqual(data["basis_order"], "e_1..e_n, e_1^*..e_n^*")
        self.assertEqual(len(data["brackets"]), 2)
        self.assertEqual(data["provenance"]["algebra"], "AI")

    def test_dual_brackets_match_the_dual_product(self):
        for family_id, A, r, P in catalog_phase_spaces():
            n = A.dim
            np.testing.assert_allclose(
                P.lie.f[n:, n:, n:],
                dual_product(A, r).commutator_tensor(),
                atol=TOL,
                err_msg=family_id,
            )


class TestSemidirect(unittest.TestCase):
    def test_abelian(self):
        self.assertFalse(np.any(semidirect_phase_space(Algebra.zero(2)).lie.f))

    def test_ai(self):
        brackets = nonzero_brackets(semidirect_phase_space(instantiate_algebra("AI")))
        self.assertEqual(set(brackets), {(0, 2), (1, 3)})
        np.testing.assert_allclose(brackets[0, 2], [0, 0, -1, 0])
        np.testing.assert_allclose(brackets[1, 3], [0, 0, 0, -1])

    def test_nv(self):
        brackets = nonzero_brackets(semidirect_phase_space(instantiate_algebra("NV")))
        self.assertEqual(set(brackets), {(0, 1), (0, 2), (1, 2), (0, 3)})
        np.testing.assert_allclose(brackets[0, 1], [0, 1, 0, 0])
        np.testing.assert_allclose(brackets[0, 2], [0, 0, -2, 0])
        np.testing.assert_allclose(brackets[1, 2], [0, 0, 0, -1])
        np.testing.assert_allclose(brackets[0, 3], [0, 0, 0, -1])

    def test_t2_is_parakahler(self):
        self.assertTrue(check_parakahler(semidirect_phase_space(instantiate_algebra("T2")))["verified"])


class TestSymplecticProduct(unittest.TestCase):
    def test_abelian(self):
        A = lsa_from_symplectic(LieAlgebra(np.zeros((4, 4, 4))), canonical_omega(2))
        self.assertFalse(np.any(A.c))

    def test_ai_blocks(self):
        A = instantiate_algebra("AI")
        r = np.diag([1, 2])
        P = build_phase_space(A, r)
        product = lsa_from_symplectic(P.lie, P.omega)
        np.testing.assert_allclose(product.c[:2, :2, :2], A.c, atol=TOL)
        np.testing.assert_allclose(product.c[2:, 2:, 2:], dual_product(A, r).c, atol=TOL)
        np.testing.assert_allclose(product.c[:2, :2, 2:], 0, atol=TOL)
        self.assertTrue(product.verified)

    def test_agrees_with_compatible_product(self):
        for family_id, A, r, P in catalog_phase_spaces():
            product = lsa_from_symplectic(P.lie, P.omega)
            np.testing.assert_allclose(product.c, P.lsa.c, atol=TOL, err_msg=family_id)
            np.testing.assert_allclose(product.commutator_tensor(), P.lie.f, atol=TOL, err_msg=family_id)

    def test_degenerate_form(self):
        with self.assertRaises(SingularError):
            lsa_from_symplectic(LieAlgebra(np.zeros((2, 2, 2))), BilinearForm(np.zeros((2, 2))))


class TestParakahler(unittest.TestCase):
    def test_ai_diagonal(self):
        report = check_parakahler(build_phase_space(instantiate_algebra("AI"), np.diag([1, 2])))
        self.assertTrue(report["verified"])
        self.assertFalse(any(report["residuals"].values()))
        self.assertEqual(report["lagrangian_dims"], [2, 2])

    def test_non_solution(self):
        P = build_phase_space(instantiate_algebra("NV"), np.eye(2))
        report = check_parakahler(P)
        self.assertFalse(report["verified"])
        self.assertGreater(max(report["residuals"]["jacobi"], report["residuals"]["two_cocycle"]), TOL)

    def test_catalog_phase_spaces(self):
        for family_id, A, r, P in catalog_phase_spaces():
            report = check_parakahler(P)
            self.assertTrue(report["verified"], family_id)
            self.assertEqual(report["lagrangian_dims"], [A.dim, A.dim])

    def test_bialgebra_halves(self):
        for family_id, A, r, P in catalog_phase_spaces():
            self.assertTrue(bialgebra_report(P)["verified"], family_id)

    def test_lagrangian_dims_follow_omega(self):
        P = build_phase_space(instantiate_algebra("AI"), np.diag([1, 2]))
        B = np.array(P.omega.B)
        B[0, 1], B[1, 0] = 1, -1
        Q = dataclasses.replace(P, omega=BilinearForm(B, role="symplectic"))
        report = check_parakahler(Q)
        self.assertEqual(report["lagrangian_dims"], [0, 2])
        self.assertFalse(report["verified"])


class TestIsomorphisms(unittest.TestCase):
    def test_identity(self):
        P = build_phase_space(instantiate_algebra("NV"), np.diag([1, 2]))
        self.assertEqual(verify_lie_isomorphism(P.lie, P.lie, LinearMap.identity(4)), 0)
        report = verify_symplectomorphism(P, P, LinearMap.identity(4))
        self.assertTrue(report["parakahler"])
        self.assertEqual(report["pullback_residual"], 0)

    def test_basis_permutation(self):
        A = instantiate_algebra("T2")
        perm = [2, 0, 1]
        B = A.permuted(perm)
        L1 = semidirect_phase_space(A).lie
        L2 = semidirect_phase_space(B).lie
        # new e_a is old e_{perm[a]}; duals follow
        phi = np.zeros((6, 6))
        for a, p in enumerate(perm):
            phi[a, p] = phi[3 + a, 3 + p] = 1
        self.assertLess(verify_lie_isomorphism(L1, L2, phi), TOL)

    def test_singular_map(self):
        L = LieAlgebra(np.zeros((2, 2, 2)))
        with self.assertRaises(SingularError):
            verify_lie_isomorphism(L, L, np.zeros((2, 2)))

    def test_untwisting_map_matrix(self):
        phi = untwisting_map(instantiate_algebra("AI"), np.diag([1, 2])).matrix
        np.testing.assert_allclose(phi[:, 2], [-1, 0, 1, 0])
        np.testing.assert_allclose(phi[:, 3], [0, -2, 0, 1])
        np.testing.assert_array_equal(
            untwisting_map(instantiate_algebra("AI"), np.zeros((2, 2))).matrix, np.eye(4)
        )

    def test_untwisting_ai(self):
        A = instantiate_algebra("AI")
        r = np.diag([1, 2])
        report = verify_symplectomorphism(
            semidirect_phase_space(A), build_phase_space(A, r), untwisting_map(A, r)
        )
        self.assertEqual(report["lie_residual"], 0)
        self.assertEqual(report["pullback_residual"], 0)
        self.assertTrue(report["symplectic"])
        self.assertTrue(report["plus_preserved"])
        self.assertFalse(report["minus_preserved"])
        self.assertFalse(report["parakahler"])

    def test_untwisting_zero(self):
        A = instantiate_algebra("NV")
        r = SymmetricTensor.zero(2)
        report = verify_symplectomorphism(
            semidirect_phase_space(A), build_phase_space(A, r), untwisting_map(A, r)
        )
        self.assertTrue(report["parakahler"])

    def test_untwisting_catalog(self):
        for family_id, A, r, P in catalog_phase_spaces():
            report = verify_symplectomorphism(semidirect_phase_space(A), P, untwisting_map(A, r))
            self.assertLess(report["lie_residual"], TOL, family_id)
            self.assertLess(report["pullback_residual"], TOL, family_id)
            self.assertEqual(report["minus_preserved"], r.is_zero(), family_id)


class TestCrossCheck(unittest.TestCase):
    def test_ai_lines_match(self):
        P = build_phase_space(instantiate_algebra("AI"), instantiate_family("SE(AI)-diag", {"r11": 1, "r22": 2}))
        table = [
            ("e1", "e1*", {"e1": 1, "e1*": -1}),
            ("e2", "e2*", {"e2": 2, "e2*": -1}),
            ("e1*", "e2*", {}),
        ]
        self.assertEqual(cross_check_brackets(P, table), [])

    def test_nii_k_misplaced_term(self):
        k, r22 = 3, 2
        A = instantiate_algebra("NII_k", {"k": k})
        P = build_phase_space(A, instantiate_family("SE(NII_k)", {"r22": r22}, algebra_params={"k": k}))
        printed = [("e2", "e2*", {"e2": k * r22, "e2*": -k, "e1*": 1})]
        with self.assertLogs("lsa.phase_space", level="WARNING"):
            found = cross_check_brackets(P, printed)
        self.assertEqual([d["bracket"] for d in found], ["[e2,e2*]"])
        used = [("e2", "e2*", {"e2": k * r22, "e2*": -k}), ("e2", "e1*", {"e1*": 1})]
        self.assertEqual(cross_check_brackets(P, used), [])

    def test_nv_missing_basis_vector(self):
        r11 = 1.5
        P = build_phase_space(instantiate_algebra("NV"), instantiate_family("SE(NV)-double", {"r11": r11}))
        with self.assertLogs("lsa.phase_space", level="WARNING"):
            found = cross_check_brackets(P, [("e1", "e1*", {"e1*": -2})])
        self.assertAlmostEqual(found[0]["gap"], 2 * r11)
        self.assertEqual(cross_check_brackets(P, [("e1", "e1*", {"e1": 2 * r11, "e1*": -2})]), [])

    def test_printed_blocks(self):
        seen = set()
        for block in load_json(PRINTED_BRACKETS, True):
            family = get_family(block["family"])
            A = instantiate_algebra(block["algebra"], block.get("algebra_params"))
            if "relabel" in block:
                A = Algebra(A.permuted(block["relabel"]).c, name=A.name)
            r = np.array([[decode_complex(v) for v in row] for row in block["r"]])
            P = build_phase_space(A, r)
            for key in block.get("errata", []):
                self.assertIn(key, family.errata)
            for line in block["lines"]:
                where = f"{family.id} [{line['left']},{line['right']}]"
                with self.subTest(where):
                    printed = [printed_line(line)]
                    key = line.get("erratum")
                    if key is None or "used" not in line:
                        self.assertEqual(cross_check_brackets(P, printed), [])
                    else:
                        with self.assertLogs("lsa.phase_space", level="WARNING"):
                            self.assertEqual(len(cross_check_brackets(P, printed)), 1)
                        self.assertEqual(cross_check_brackets(P, [printed_line(line["used"])]), [])
                    if key is not None:
                        self.assertIn(key, ERRATA)
                        self.assertIn(key, family.errata)
                        seen.add(key)
        self.assertLessEqual({"T2-bracket", "NII_1-bracket", "NII_k-bracket", "NV-bracket"}, seen)
        self.assertEqual({k for k in seen if ERRATA[k]["kind"] != "bracket"}, set())

    def test_unknown_label(self):
        P = semidirect_phase_space(instantiate_algebra("NV"))
        with self.assertRaises(DimensionError):
            cross_check_brackets(P, [("e3", "e1*", {})])


if __name__ == "__main__":
    unittest.main()
