"""
This module evaluates the S-equation of a symmetric tensor r ∈ A⊗A in a
left-symmetric algebra A, and the structures r induces.

The provided features include the residual of the S-equation in tensor and
operator form, the product r induces on the dual space A*, the coboundary
coproduct α(x) = (L_x⊗1 + 1⊗ad x)r, 1-cocycle and 2-cocycle residuals and
the left-symmetric bialgebra check. A symmetric r is read as the map
r(e_i^*) = Σ_j r[i, j] e_j.
"""

from dataclasses import dataclass, field
from logging import getLogger

import numpy as np

from lsa.algebra import (Algebra, LinearOperator, dual_op,
                         left_symmetry_residual)
from lsa.errors import (ConstraintError, DimensionError, SingularError,
                        SymmetryError)
from lsa.utils import (decode_matrix, encode_array, freeze, max_norm,
                       residual_record, resolve_tol, worst_index)

logger = getLogger(__name__)

__all__ = [
    "SymmetricTensor",
    "SResidual",
    "BilinearForm",
    "Coproduct",
    "s_residual_tensor",
    "s_residual_operator",
    "dual_product",
    "coboundary_alpha",
    "one_cocycle_residual",
    "lsa_two_cocycle_residual",
    "coproduct_from_dual",
    "coproduct_from_algebra",
    "check_bialgebra",
    "operator_form_agrees",
    "cocycle_equivalence",
]

ROLES = ("symplectic", "lsa-two-cocycle", "generic")


@dataclass(frozen=True, eq=False)
class SymmetricTensor:
    """
    Symmetric r = Σ r[i, j] e_i⊗e_j. Asymmetry up to `tol` is accepted and
    averaged away.
    """

    r: np.ndarray
    tol: float = None

    def __post_init__(self):
        r = np.array(self.r, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise DimensionError(f"r must be a square matrix, got shape {r.shape}")
        if not np.all(np.isfinite(r)):
            raise SymmetryError("r has non-finite entries")
        asym = max_norm(r - r.T)
        if asym >= resolve_tol(self.tol):
            raise SymmetryError(f"r is not symmetric (asymmetry {asym:.3e})")
        object.__setattr__(self, "r", freeze((r + r.T) / 2))

    @property
    def dim(self) -> int:
        return self.r.shape[0]

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n), dtype=complex))

    def is_zero(self) -> bool:
        return not np.any(self.r)

    def as_map(self) -> LinearOperator:
        """
        Matrix of r: A* → A; column i holds r(e_i^*).
        """
        return LinearOperator(self.r.T)

    def __call__(self, a):
        return self.r.T @ np.asarray(a)

    def det(self) -> complex:
        return complex(np.linalg.det(self.r))

    def inverse_form(self, tol=None) -> "BilinearForm":
        """
        Bilinear form B(x, y) = ⟨r⁻¹x, y⟩ of an invertible r.
        """
        if abs(self.det()) <= resolve_tol(tol):
            raise SingularError("r is not invertible")
        return BilinearForm(np.linalg.inv(self.r), role="lsa-two-cocycle")

    def to_json(self) -> dict:
        return {"dim": self.dim, "r": encode_array(self.r)}

    @classmethod
    def from_json(cls, data, tol=None):
        if isinstance(data, dict):
            matrix = decode_matrix(data.get("r"), "r")
            if "dim" in data and data["dim"] != matrix.shape[0]:
                raise DimensionError(f"dim {data['dim']} but r has {matrix.shape[0]} rows")
        else:
            matrix = decode_matrix(data, "r")
        return cls(matrix, tol=tol)


def as_symmetric(r, tol=None) -> SymmetricTensor:
    return r if isinstance(r, SymmetricTensor) else SymmetricTensor(r, tol=tol)


@dataclass(frozen=True, eq=False)
class SResidual:
    """
    Coefficients t[i, j, k] of [[r, r]] on e_i⊗e_j⊗e_k.
    """

    t: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t", freeze(self.t))
        object.__setattr__(self, "norm", max_norm(self.t))

    def report(self, tol=None) -> dict:
        return residual_record(self.t, tol)


@dataclass(frozen=True, eq=False)
class BilinearForm:
    B: np.ndarray
    role: str = "generic"
    tol: float = None

    def __post_init__(self):
        B = freeze(self.B)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimensionError(f"bilinear form must be square, got {B.shape}")
        if self.role not in ROLES:
            raise ConstraintError(f"unknown role {self.role!r}, expected one of {ROLES}")
        if self.role == "symplectic":
            tol = resolve_tol(self.tol)
            if max_norm(B + B.T) >= tol:
                raise SymmetryError("symplectic form must be antisymmetric")
            if abs(np.linalg.det(B)) <= tol:
                raise SingularError("symplectic form must be nondegenerate")
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.B.shape[0]

    def __call__(self, x, y):
        return np.asarray(x) @ self.B @ np.asarray(y)


@dataclass(frozen=True, eq=False)
class Coproduct:
    """
    alpha[x] is the n×n coefficient matrix of α(e_x) on e_i⊗e_j.
    """

    alpha: np.ndarray

    def __post_init__(self):
        alpha = freeze(self.alpha)
        if alpha.ndim != 3 or len(set(alpha.shape)) != 1:
            raise DimensionError(f"coproduct must have shape n×n×n, got {alpha.shape}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def dim(self) -> int:
        return self.alpha.shape[0]


def _match(A, other, what="r"):
    if A.dim != other.dim:
        raise DimensionError(f"algebra has dimension {A.dim} but {what} has {other.dim}")


def _left_matrices(c):
    # L[x] is the matrix of L_{e_x}.
    return np.transpose(c, (0, 2, 1))


def _ad_matrices(c):
    return np.transpose(c - np.einsum("jik->ijk", c), (0, 2, 1))


def s_tensor(c, r):
    """
    Coefficients of [[r, r]]:
    Σ_{t,l} −c[t,l,i] r[t,j] r[l,k] + c[t,l,j] r[i,t] r[l,k] + (c[t,l,k] − c[l,t,k]) r[i,t] r[l,j].
    """
    f = c - np.einsum("jik->ijk", c)
    return (
        -np.einsum("tli,tj,lk->ijk", c, r, r)
        + np.einsum("tlj,it,lk->ijk", c, r, r)
        + np.einsum("tlk,it,lj->ijk", f, r, r)
    )


def s_residual_tensor(A: Algebra, r, tol=None) -> SResidual:
    r = as_symmetric(r, tol)
    _match(A, r)
    return SResidual(s_tensor(A.c, r.r))


def s_residual_operator(A: Algebra, r, tol=None) -> float:
    """
    Max over basis pairs of |[r(a*), r(b*)] − r(L*(r(a*))b* − L*(r(b*))a*)|.
    """
    r = as_symmetric(r, tol)
    _match(A, r)
    n = A.dim
    images = [r(np.eye(n)[a]) for a in range(n)]
    lie = A.commutator_tensor()

    def l_star(x):
        # L*(x) = −(L_x)ᵀ, with L_x linear in x.
        return dual_op(LinearOperator(np.einsum("t,tjk->kj", x, A.c)))

    worst = 0.0
    for a in range(n):
        for b in range(n):
            lhs = np.einsum("i,j,ijk->k", images[a], images[b], lie)
            inner = l_star(images[a])(np.eye(n)[b]) - l_star(images[b])(np.eye(n)[a])
            worst = max(worst, max_norm(lhs - r(inner)))
    return worst


def dual_product_tensor(c, r):
    """
    d[a, b, m]: coefficient of e_m^* in e_a^*∘e_b^* = −R*(r(e_b^*))e_a^* + ad*(r(e_a^*))e_b^*.
    """
    return np.einsum("bt,mta->abm", r, c) - np.einsum(
        "at,tmb->abm", r, c - np.einsum("jik->ijk", c)
    )


def dual_product(A: Algebra, r, tol=None) -> Algebra:
    """
    Left-symmetric product induced on A* by r. Computed for any symmetric r;
    the result is flagged verified only when r solves the S-equation and the
    product passes the left-symmetry check.
    """
    tol = resolve_tol(tol)
    r = as_symmetric(r, tol)
    _match(A, r)
    d = dual_product_tensor(A.c, r.r)
    solves = s_residual_tensor(A, r).norm < tol
    if not solves:
        logger.warning(
            f"dual product of {A.name or 'algebra'} built from a non-solution r; flagged unverified"
        )
    return Algebra(
        d,
        basis=tuple(f"{b}*" for b in A.basis),
        name=f"{A.name}*" if A.name else None,
        verified=bool(solves and left_symmetry_residual(Algebra(d)) < tol),
    )


def coboundary_alpha(A: Algebra, r, tol=None) -> Coproduct:
    """
    α(e_x) = (L_x⊗1 + 1⊗ad_x) r = L_x r + r ad_xᵀ.
    """
    r = as_symmetric(r, tol)
    _match(A, r)
    L = _left_matrices(A.c)
    ad = _ad_matrices(A.c)
    return Coproduct(
        np.einsum("xip,pj->xij", L, r.r) + np.einsum("iq,xjq->xij", r.r, ad)
    )


def cocycle_defect(c, alpha):
    """
    α([x, y]) − T_x α(y) + T_y α(x) with T_x(M) = L_x M + M ad_xᵀ.
    """
    L = _left_matrices(c)
    ad = _ad_matrices(c)
    lie = c - np.einsum("jik->ijk", c)
    acted = np.einsum("xip,ypj->xyij", L, alpha) + np.einsum("yiq,xjq->xyij", alpha, ad)
    return (
        np.einsum("xyk,kij->xyij", lie, alpha)
        - acted
        + np.einsum("yxij->xyij", acted)
    )


def one_cocycle_residual(A: Algebra, alpha: Coproduct) -> float:
    _match(A, alpha, "coproduct")
    return max_norm(cocycle_defect(A.c, alpha.alpha))


def lsa_two_cocycle_tensor(c, B):
    """
    B(e_i e_j, e_k) − B(e_i, e_j e_k) − B(e_j e_i, e_k) + B(e_j, e_i e_k).
    """
    half = np.einsum("ijt,tk->ijk", c, B) - np.einsum("jkt,it->ijk", c, B)
    return half - np.einsum("jik->ijk", half)


def lsa_two_cocycle_residual(A: Algebra, B) -> float:
    B = B if isinstance(B, BilinearForm) else BilinearForm(B, role="lsa-two-cocycle")
    _match(A, B, "bilinear form")
    return max_norm(lsa_two_cocycle_tensor(A.c, B.B))


def coproduct_from_dual(Astar: Algebra) -> Coproduct:
    """
    Coproduct on A dual to the product of A*: α(e_x)[i, j] = ⟨e_i^*∘e_j^*, e_x⟩.
    """
    return Coproduct(np.transpose(Astar.c, (2, 0, 1)))


def coproduct_from_algebra(A: Algebra) -> Coproduct:
    """
    Coproduct on A* dual to the product of A (the β of the pair).
    """
    return Coproduct(np.transpose(A.c, (2, 0, 1)))


def check_bialgebra(A: Algebra, Astar: Algebra, tol=None) -> dict:
    """
    Residuals of the four left-symmetric bialgebra conditions for (A, A*).

    Args
    ----
    * :param A: ---> Algebra: the algebra on A.
    * :param Astar: ---> Algebra: a product on A*, in the dual basis.
    """
    tol = resolve_tol(tol)
    _match(A, Astar, "dual algebra")
    alpha = coproduct_from_dual(Astar)
    beta = coproduct_from_algebra(A)
    residuals = {
        "left_symmetry_A": left_symmetry_residual(A),
        "left_symmetry_A_star": left_symmetry_residual(Astar),
        "alpha_cocycle": one_cocycle_residual(A, alpha),
        "beta_cocycle": one_cocycle_residual(Astar, beta),
    }
    return {
        "residuals": residuals,
        "tolerance": tol,
        "verified": all(v < tol for v in residuals.values()),
    }


def operator_form_agrees(A: Algebra, r, tol=None) -> dict:
    """
    Compare the tensor and operator forms of the S-equation residual.
    Both must vanish together.
    """
    tol = resolve_tol(tol)
    tensor = s_residual_tensor(A, r, tol).norm
    operator = s_residual_operator(A, r, tol)
    return {
        "tensor": tensor,
        "operator": operator,
        "tolerance": tol,
        "agree": (tensor < tol) == (operator < tol),
    }


def cocycle_equivalence(A: Algebra, r, tol=None) -> dict:
    """
    For invertible symmetric r: r solves the S-equation iff the form
    B(x, y) = ⟨r⁻¹x, y⟩ is a 2-cocycle of A.
    """
    tol = resolve_tol(tol)
    r = as_symmetric(r, tol)
    s_norm = s_residual_tensor(A, r).norm
    cocycle = lsa_two_cocycle_residual(A, r.inverse_form(tol))
    return {
        "s_residual": s_norm,
        "cocycle_residual": cocycle,
        "tolerance": tol,
        "agree": (s_norm < tol) == (cocycle < tol),
    }


def s_report(A: Algebra, r, tol=None) -> dict:
    """
    JSON residual record of the tensor-form S-equation.
    """
    residual = s_residual_tensor(A, r, tol)
    record = residual.report(tol)
    record["worst_indices"] = worst_index(residual.t)
    return record
