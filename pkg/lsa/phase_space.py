"""
This module builds phase spaces G(A) ⊕ G(A)* of left-symmetric algebras and
verifies the parakähler and symplectic contracts on them.

The provided features include:
    - the canonical symplectic form and the Lie 2-cocycle residual;
    - the phase space of (A, r) for a symmetric solution r of the S-equation,
      together with its compatible left-symmetric product;
    - the semidirect phase space G(A) ⋉_{L*} G(A)*;
    - the left-symmetric product determined by a symplectic form;
    - checks of Lie isomorphisms and symplectomorphisms for a given map.

Every 2n-dimensional object uses the basis order (e_1..e_n, e_1^*..e_n^*).
"""

from dataclasses import dataclass
from logging import getLogger

import numpy as np

from lsa.algebra import (Algebra, LieAlgebra, LinearOperator,
                         left_symmetry_residual, require_base_dim,
                         require_left_symmetric)
from lsa.errors import (ConstraintError, DimensionError, SingularError,
                        SymmetryError)
from lsa.s_equation import (BilinearForm, SymmetricTensor, as_symmetric,
                            check_bialgebra, dual_product_tensor, s_tensor)
from lsa.utils import encode_array, max_norm, resolve_tol, worst_index

logger = getLogger(__name__)

__all__ = [
    "PhaseSpace",
    "LinearMap",
    "canonical_omega",
    "two_cocycle_residual",
    "build_phase_space",
    "semidirect_phase_space",
    "lsa_from_symplectic",
    "check_parakahler",
    "verify_lie_isomorphism",
    "verify_symplectomorphism",
    "untwisting_map",
    "cross_check_brackets",
    "bialgebra_report",
]

BASIS_ORDER = "e_1..e_n, e_1^*..e_n^*"


@dataclass(frozen=True, eq=False)
class LinearMap(LinearOperator):
    """
    Linear map between coefficient spaces, x ↦ matrix @ x.
    """

    @classmethod
    def identity(cls, m):
        return cls(np.eye(m, dtype=complex))

    def det(self) -> complex:
        if self.dim_in != self.dim_out:
            raise DimensionError(f"determinant of a non-square {self.matrix.shape} map")
        return complex(np.linalg.det(self.matrix))

    def require_invertible(self, tol=None):
        if abs(self.det()) <= resolve_tol(tol):
            raise SingularError("linear map is singular")
        return self


@dataclass(frozen=True, eq=False)
class PhaseSpace:
    """
    Phase space of the sub-adjacent Lie algebra of `base`, deformed by `r`.

    `lie` is the 2n-dimensional Lie algebra, `omega` the canonical
    symplectic form and `lsa` the compatible left-symmetric product.
    `verified` is False when `r` does not solve the S-equation.
    """

    base: Algebra
    r: SymmetricTensor
    lie: LieAlgebra
    omega: BilinearForm
    lsa: Algebra = None
    verified: bool = False

    @property
    def n(self) -> int:
        return self.base.dim

    def to_json(self) -> dict:
        lie = self.lie.to_json()
        data = {
            "n": self.n,
            "basis": lie["basis"],
            "basis_order": BASIS_ORDER,
            "brackets": lie["brackets"],
            "omega": encode_array(self.omega.B),
            "provenance": {"algebra": self.base.name, "r": encode_array(self.r.r)},
            "verified": self.verified,
        }
        if self.lsa is not None:
            data["products"] = self.lsa.to_json()["products"]
        return data


def _phase_basis(A):
    return tuple(A.basis) + tuple(f"{b}*" for b in A.basis)


def _antisymmetric_fill(F, n):
    # Lower mixed blocks are the exact negatives of the upper ones.
    F[n:, :n] = -np.transpose(F[:n, n:], (1, 0, 2))
    return F


def canonical_omega(n: int) -> BilinearForm:
    """
    ω_p(x + a*, y + b*) = ⟨a*, y⟩ − ⟨b*, x⟩, i.e. [[0, −I], [I, 0]].
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DimensionError(f"phase space needs n >= 1, got {n!r}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return BilinearForm(np.block([[zero, -eye], [eye, zero]]), role="symplectic")


def two_cocycle_tensor(f, omega):
    """
    ω([x, y], z) + ω([y, z], x) + ω([z, x], y).
    """
    W = np.einsum("xyk,kz->xyz", f, omega)
    return W + np.einsum("yzx->xyz", W) + np.einsum("zxy->xyz", W)


def two_cocycle_residual(L: LieAlgebra, omega: BilinearForm) -> float:
    if L.dim != omega.dim:
        raise DimensionError(f"Lie algebra has dimension {L.dim} but form has {omega.dim}")
    return max_norm(two_cocycle_tensor(L.f, omega.B))


def phase_bracket_tensor(c, r):
    """
    Bracket constants on A ⊕ A*:
        [e_i, e_j] = [e_i, e_j]_A,
        [x, a*] = [x, r(a*)] − r(L*(x)a*) + L*(x)a*,
        [a*, b*] = L*(r(a*))b* − L*(r(b*))a*.
    """
    n = c.shape[0]
    f = c - np.einsum("jik->ijk", c)
    F = np.zeros((2 * n, 2 * n, 2 * n), dtype=complex)
    F[:n, :n, :n] = f
    F[:n, n:, :n] = np.einsum("at,itk->iak", r, f) + np.einsum("ima,mk->iak", c, r)
    F[:n, n:, n:] = -np.einsum("ima->iam", c)
    F[n:, n:, n:] = -np.einsum("at,tmb->abm", r, c) + np.einsum("bt,tma->abm", r, c)
    return _antisymmetric_fill(F, n)


def phase_product_tensor(c, r):
    """
    Compatible left-symmetric product on A ⊕ A*:
        x∗y = xy,
        a*∗b* = −R*(r(b*))a* + ad*(r(a*))b*,
        x∗a* = x·r(a*) − r(ad*(x)a*) + ad*(x)a*,
        a*∗x = r(a*)·x + r(R*(x)a*) − R*(x)a*.
    """
    n = c.shape[0]
    f = c - np.einsum("jik->ijk", c)
    P = np.zeros((2 * n, 2 * n, 2 * n), dtype=complex)
    P[:n, :n, :n] = c
    P[n:, n:, n:] = dual_product_tensor(c, r)
    P[:n, n:, :n] = np.einsum("at,itk->iak", r, c) + np.einsum("ima,mk->iak", f, r)
    P[:n, n:, n:] = -np.einsum("ima->iam", f)
    P[n:, :n, :n] = np.einsum("at,tik->aik", r, c) - np.einsum("mia,mk->aik", c, r)
    P[n:, :n, n:] = np.einsum("mia->aim", c)
    return P


def build_phase_space(A: Algebra, r, tol=None) -> PhaseSpace:
    """
    Phase space of (A, r). Runs for any symmetric r; the result is flagged
    unverified when r does not solve the S-equation.

    Args
    ----
    * :param A: ---> Algebra: a left-symmetric algebra.
    * :param r: ---> SymmetricTensor or n×n matrix.
    * :param tol: ---> float: residual tolerance, `settings.TOLERANCE` if None.
    """
    tol = resolve_tol(tol)
    A = require_base_dim(require_left_symmetric(A, tol))
    r = as_symmetric(r, tol)
    if r.dim != A.dim:
        raise DimensionError(f"algebra has dimension {A.dim} but r has {r.dim}")
    solves = max_norm(s_tensor(A.c, r.r)) < tol
    if not solves:
        logger.warning(f"phase space of {A.name or 'algebra'} built from a non-solution r")
    basis = _phase_basis(A)
    lie = LieAlgebra(phase_bracket_tensor(A.c, r.r), basis=basis, name=A.name, tol=tol)
    lsa = Algebra(phase_product_tensor(A.c, r.r), basis=basis, name=A.name)
    logger.debug(f"phase space of {A.name or 'algebra'}: jacobi {lie.jacobi:.2e}")
    return PhaseSpace(
        base=A,
        r=r,
        lie=lie,
        omega=canonical_omega(A.dim),
        lsa=lsa,
        verified=bool(solves),
    )


def semidirect_phase_space(A: Algebra, tol=None) -> PhaseSpace:
    """
    G(A) ⋉_{L*} G(A)*: [x1 + v1, x2 + v2] = [x1, x2] + L*(x1)v2 − L*(x2)v1,
    with the product of A extended by x∗a* = ad*(x)a*, a*∗x = −R*(x)a*.
    """
    tol = resolve_tol(tol)
    A = require_base_dim(require_left_symmetric(A, tol))
    n = A.dim
    c = A.c
    f = A.commutator_tensor()

    F = np.zeros((2 * n, 2 * n, 2 * n), dtype=complex)
    F[:n, :n, :n] = f
    # L*(e_i)e_a^* = −Σ_m c[i, m, a] e_m^*
    F[:n, n:, n:] = -np.einsum("ima->iam", c)
    F = _antisymmetric_fill(F, n)

    P = np.zeros((2 * n, 2 * n, 2 * n), dtype=complex)
    P[:n, :n, :n] = c
    P[:n, n:, n:] = -np.einsum("ima->iam", f)
    P[n:, :n, n:] = np.einsum("mia->aim", c)

    basis = _phase_basis(A)
    return PhaseSpace(
        base=A,
        r=SymmetricTensor.zero(n),
        lie=LieAlgebra(F, basis=basis, name=A.name, tol=tol),
        omega=canonical_omega(n),
        lsa=Algebra(P, basis=basis, name=A.name),
        verified=True,
    )


def lsa_from_symplectic(L: LieAlgebra, omega: BilinearForm, tol=None) -> Algebra:
    """
    Solve ω(x∗y, z) = −ω(y, [x, z]) for the product x∗y.
    """
    tol = resolve_tol(tol)
    if L.dim != omega.dim:
        raise DimensionError(f"Lie algebra has dimension {L.dim} but form has {omega.dim}")
    if abs(np.linalg.det(omega.B)) <= tol:
        raise SingularError("symplectic form is degenerate")
    if max_norm(omega.B + omega.B.T) >= tol:
        raise SymmetryError("form is not antisymmetric")
    residual = two_cocycle_residual(L, omega)
    if residual >= tol:
        raise ConstraintError(f"form is not a 2-cocycle (residual {residual:.3e})")
    M = np.einsum("yk,xzk->xyz", omega.B, L.f)
    product = -np.einsum("xyz,zk->xyk", M, np.linalg.inv(omega.B))
    result = Algebra(product, basis=L.basis, name=L.name)
    if left_symmetry_residual(result) >= tol:
        logger.warning(f"product recovered from {L.name or 'Lie algebra'} is not left-symmetric")
        return result
    return Algebra(product, basis=L.basis, name=L.name, verified=True)


def _isotropic_dim(span, B, tol):
    """
    Dimension of the radical of ω restricted to the column span of `span`;
    it equals the dimension of the span exactly when the span is isotropic.
    """
    restricted = span.T @ B @ span
    return int(np.linalg.matrix_rank(span, tol=tol) - np.linalg.matrix_rank(restricted, tol=tol))


def check_parakahler(P: PhaseSpace, tol=None) -> dict:
    """
    Residual report of the parakähler structure {G⁺, G⁻, ω} on `P`:
    Jacobi identity, ω antisymmetric and nondegenerate, ω a 2-cocycle,
    closure of span{e_i} and span{e_i^*} under the bracket and isotropy
    of both spans.
    """
    tol = resolve_tol(tol)
    n = P.n
    F = P.lie.f
    B = P.omega.B
    residuals = {
        "jacobi": P.lie.jacobi,
        "omega_antisymmetry": max_norm(B + B.T),
        "two_cocycle": two_cocycle_residual(P.lie, P.omega),
        "closure_plus": max_norm(F[:n, :n, n:]),
        "closure_minus": max_norm(F[n:, n:, :n]),
        "isotropy_plus": max_norm(B[:n, :n]),
        "isotropy_minus": max_norm(B[n:, n:]),
    }
    det = abs(np.linalg.det(B))
    eye = np.eye(2 * n)
    dims = [_isotropic_dim(eye[:, :n], B, tol), _isotropic_dim(eye[:, n:], B, tol)]
    verified = all(v < tol for v in residuals.values()) and det > tol and dims == [n, n]
    if not verified:
        failing = sorted(k for k, v in residuals.items() if v >= tol)
        logger.info(f"{P.base.name or 'phase space'} fails parakähler checks: {failing}")
    return {
        "residuals": residuals,
        "omega_det": det,
        "lagrangian_dims": dims,
        "tolerance": tol,
        "verified": bool(verified),
    }


def _lie_isomorphism_tensor(f1, f2, phi):
    return np.einsum("kq,xyq->xyk", phi, f1) - np.einsum(
        "px,qy,pqk->xyk", phi, phi, f2
    )


def verify_lie_isomorphism(L1: LieAlgebra, L2: LieAlgebra, phi: LinearMap, tol=None) -> float:
    """
    Max over basis pairs of |φ([x, y]₁) − [φx, φy]₂|.
    """
    phi = phi if isinstance(phi, LinearMap) else LinearMap(phi)
    if not L1.dim == L2.dim == phi.dim_in == phi.dim_out:
        raise DimensionError(
            f"dimensions {L1.dim}, {L2.dim} and map {phi.matrix.shape} do not match"
        )
    phi.require_invertible(tol)
    return max_norm(_lie_isomorphism_tensor(L1.f, L2.f, phi.matrix))


def _preserves(image, target, tol):
    """
    span(image) == span(target), both of rank n, by a rank test.
    """
    n = target.shape[1]
    stacked = np.hstack([image, target])
    return bool(
        np.linalg.matrix_rank(image, tol=tol) == n
        and np.linalg.matrix_rank(stacked, tol=tol) == n
    )


def verify_symplectomorphism(P1: PhaseSpace, P2: PhaseSpace, phi: LinearMap, tol=None) -> dict:
    """
    Report whether `phi` is a symplectomorphism P1 → P2, and separately
    whether it maps G₁⁺ onto G₂⁺ and G₁⁻ onto G₂⁻.
    """
    tol = resolve_tol(tol)
    phi = phi if isinstance(phi, LinearMap) else LinearMap(phi)
    lie = verify_lie_isomorphism(P1.lie, P2.lie, phi, tol)
    Phi = phi.matrix
    pullback = P1.omega.B - Phi.T @ P2.omega.B @ Phi
    n = P1.n
    eye = np.eye(2 * n)
    plus = _preserves(Phi[:, :n], eye[:, :n], tol)
    minus = _preserves(Phi[:, n:], eye[:, n:], tol)
    symplectic = lie < tol and max_norm(pullback) < tol
    return {
        "lie_residual": lie,
        "pullback_residual": max_norm(pullback),
        "pullback_worst_indices": worst_index(pullback),
        "plus_preserved": plus,
        "minus_preserved": minus,
        "tolerance": tol,
        "symplectic": bool(symplectic),
        "parakahler": bool(symplectic and plus and minus),
    }


def untwisting_map(A: Algebra, r) -> LinearMap:
    """
    φ(x) = x, φ(a*) = −r(a*) + a*, from the semidirect phase space of A to
    the phase space of (A, r).
    """
    r = as_symmetric(r)
    if r.dim != A.dim:
        raise DimensionError(f"algebra has dimension {A.dim} but r has {r.dim}")
    n = A.dim
    eye = np.eye(n)
    return LinearMap(np.block([[eye, -r.r.T], [np.zeros((n, n)), eye]]))


def _label_vector(labels, coeffs, where):
    vector = np.zeros(len(labels), dtype=complex)
    for label, value in coeffs.items():
        if label not in labels:
            raise DimensionError(f"{where}: unknown basis label {label!r}")
        vector[labels.index(label)] = value
    return vector


def cross_check_brackets(P: PhaseSpace, table, tol=None) -> list:
    """
    Compare printed bracket lines against the generated brackets of `P`.

    `table` is an iterable of `(left, right, {label: coefficient})` with basis
    labels such as "e1" and "e1*"; brackets not listed are not compared.
    Returns one record per mismatching line and logs each as a discrepancy.
    """
    tol = resolve_tol(tol)
    labels = list(P.lie.basis)
    discrepancies = []
    for left, right, coeffs in table:
        where = f"[{left},{right}]"
        x = _label_vector(labels, {left: 1}, where)
        y = _label_vector(labels, {right: 1}, where)
        generated = P.lie.bracket(x, y)
        printed = _label_vector(labels, coeffs, where)
        gap = max_norm(generated - printed)
        if gap >= tol:
            logger.warning(f"{P.base.name or 'phase space'} {where}: printed line disagrees ({gap:.3e})")
            discrepancies.append(
                {
                    "bracket": where,
                    "printed": encode_array(printed),
                    "generated": encode_array(generated),
                    "gap": gap,
                }
            )
    return discrepancies


def bialgebra_report(P: PhaseSpace, tol=None) -> dict:
    """
    Bialgebra check on the two halves of the compatible product of `P`.
    """
    n = P.n
    Astar = Algebra(P.lsa.c[n:, n:, n:], basis=P.lie.basis[n:])
    return check_bialgebra(P.base, Astar, tol)
