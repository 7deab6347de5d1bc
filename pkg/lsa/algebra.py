"""
This module represents finite-dimensional complex algebras by their
structure constants and checks the left-symmetric (pre-Lie) axiom.

An `Algebra` stores `c[i, j, k]` with e_i·e_j = Σ_k c[i, j, k] e_k; a
`LieAlgebra` stores `f[i, j, k]` with [x_i, x_j] = Σ_k f[i, j, k] x_k.
Left, right and adjoint multiplication operators are square
`LinearOperator`s acting on coefficient columns, and `dual_op` gives the
dual representation under the pairing ⟨φ*(x)a*, y⟩ = −⟨a*, φ(x)y⟩.
"""

from dataclasses import dataclass, field, replace
from logging import getLogger

import numpy as np

from lsa import settings
from lsa.errors import (DimensionError, FormatError, NotLeftSymmetricError,
                        SymmetryError)
from lsa.utils import (decode_complex, encode_complex, freeze, max_norm,
                       residual_record, resolve_tol)

logger = getLogger(__name__)

__all__ = [
    "Algebra",
    "LieAlgebra",
    "LinearOperator",
    "left_symmetry_residual",
    "left_symmetry_report",
    "check_left_symmetric",
    "require_base_dim",
    "require_left_symmetric",
    "sub_adjacent",
    "jacobi_residual",
    "left_mult",
    "right_mult",
    "ad",
    "dual_op",
    "regular_representation_residual",
]


def _default_basis(n, prefix="e"):
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def _check_structure_tensor(tensor, what):
    if tensor.ndim != 3 or len(set(tensor.shape)) != 1:
        raise DimensionError(f"{what} must have shape n×n×n, got {tensor.shape}")
    n = tensor.shape[0]
    if not 1 <= n <= settings.PHASE_MAX_DIM:
        raise DimensionError(f"{what} dimension {n} outside 1..{settings.PHASE_MAX_DIM}")
    if not np.all(np.isfinite(tensor)):
        raise FormatError(what, "structure constants must be finite")


def require_base_dim(A):
    """
    Base algebras of phase spaces and of the solver are limited to
    `settings.MAX_DIM`; their phase spaces may reach twice that.
    """
    if A.dim > settings.MAX_DIM:
        raise DimensionError(
            f"{A.name or 'algebra'} has dimension {A.dim}, base algebras take 1..{settings.MAX_DIM}"
        )
    return A


def _products_to_json(tensor):
    n = tensor.shape[0]
    return [
        {
            "left": i + 1,
            "right": j + 1,
            "coeffs": [encode_complex(z) for z in tensor[i, j]],
        }
        for i in range(n)
        for j in range(n)
        if np.any(tensor[i, j] != 0)
    ]


def _products_from_json(data, key="products"):
    """
    Rebuild a dense n×n×n tensor from the `products` list (1-based indices).
    """
    if not isinstance(data, dict):
        raise FormatError("$", "expected a JSON object")
    n = data.get("dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError("dim", f"expected a positive integer, got {n!r}")
    tensor = np.zeros((n, n, n), dtype=complex)
    entries = data.get(key, [])
    if not isinstance(entries, list):
        raise FormatError(key, "expected a list")
    for pos, entry in enumerate(entries):
        where = f"{key}[{pos}]"
        if not isinstance(entry, dict):
            raise FormatError(where, "expected an object")
        indices = []
        for side in ("left", "right"):
            i = entry.get(side)
            if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
                raise FormatError(f"{where}.{side}", f"index must be in 1..{n}, got {i!r}")
            indices.append(i - 1)
        coeffs = entry.get("coeffs")
        if not isinstance(coeffs, list) or len(coeffs) != n:
            raise FormatError(f"{where}.coeffs", f"expected {n} coefficients")
        tensor[indices[0], indices[1]] = [
            decode_complex(z, f"{where}.coeffs[{k}]") for k, z in enumerate(coeffs)
        ]
    basis = data.get("basis")
    if basis is not None and (
        not isinstance(basis, list) or len(basis) != n or not all(isinstance(b, str) for b in basis)
    ):
        raise FormatError("basis", f"expected {n} labels")
    return tensor, tuple(basis) if basis else None


@dataclass(frozen=True, eq=False)
class Algebra:
    """
    Finite-dimensional complex algebra given by structure constants.

    `verified` records whether the left-symmetry check has passed; raw data
    is accepted unverified.
    """

    c: np.ndarray
    basis: tuple = None
    name: str = None
    verified: bool = False

    def __post_init__(self):
        c = freeze(self.c)
        _check_structure_tensor(c, "c")
        object.__setattr__(self, "c", c)
        if self.basis is None:
            object.__setattr__(self, "basis", _default_basis(c.shape[0]))
        elif len(self.basis) != c.shape[0]:
            raise DimensionError(
                f"{len(self.basis)} basis labels for a {c.shape[0]}-dimensional algebra"
            )
        else:
            object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def zero(cls, n, name=None):
        return cls(np.zeros((n, n, n), dtype=complex), name=name)

    @classmethod
    def from_rules(cls, dim, rules, name=None, basis=None):
        """
        Build an algebra from nonzero products written with 1-based indices.

        >>> Algebra.from_rules(2, {(1, 1): {1: 2}, (1, 2): {2: 1}, (2, 2): {1: 1}})
        """
        c = np.zeros((dim, dim, dim), dtype=complex)
        for (i, j), coeffs in rules.items():
            for k, value in coeffs.items():
                c[i - 1, j - 1, k - 1] = value
        return cls(c, basis=basis, name=name)

    def product(self, x, y):
        """
        Product of two coefficient vectors.
        """
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.c)

    def commutator_tensor(self):
        return self.c - np.einsum("jik->ijk", self.c)

    def permuted(self, perm):
        """
        Relabel the basis: new e_a is old e_{perm[a]}.
        """
        perm = list(perm)
        if sorted(perm) != list(range(self.dim)):
            raise DimensionError(f"{perm} is not a permutation of 0..{self.dim - 1}")
        return Algebra(
            self.c[np.ix_(perm, perm, perm)],
            basis=tuple(self.basis[p] for p in perm),
            name=self.name,
            verified=self.verified,
        )

    def to_json(self) -> dict:
        data = {
            "dim": self.dim,
            "basis": list(self.basis),
            "products": _products_to_json(self.c),
        }
        if self.name:
            data["name"] = self.name
        return data

    @classmethod
    def from_json(cls, data):
        tensor, basis = _products_from_json(data)
        return cls(tensor, basis=basis, name=data.get("name"))


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """
    Bracket constants, antisymmetrized exactly at construction.
    """

    f: np.ndarray
    basis: tuple = None
    name: str = None
    tol: float = None
    jacobi: float = field(init=False)

    def __post_init__(self):
        f = np.array(self.f, dtype=complex)
        _check_structure_tensor(f, "f")
        swapped = np.einsum("jik->ijk", f)
        tol = resolve_tol(self.tol)
        asym = max_norm(f + swapped)
        if asym >= tol:
            raise SymmetryError(f"bracket is not antisymmetric (residual {asym:.3e})")
        object.__setattr__(self, "f", freeze((f - swapped) / 2))
        if self.basis is None:
            object.__setattr__(self, "basis", _default_basis(f.shape[0], "x"))
        else:
            object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "jacobi", max_norm(jacobi_tensor(self.f)))

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.f)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basis": list(self.basis),
            "brackets": [
                entry for entry in _products_to_json(self.f) if entry["left"] < entry["right"]
            ],
        }

    @classmethod
    def from_json(cls, data):
        tensor, basis = _products_from_json(data, key="brackets")
        # Only i<j may be listed; complete antisymmetrically.
        upper = np.triu(np.ones(tensor.shape[:2], dtype=bool), k=1)
        tensor = np.where(upper[:, :, None], tensor, -np.einsum("jik->ijk", tensor))
        return cls(tensor, basis=basis, name=data.get("name"))


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """
    Matrix of a linear map acting on coefficient columns: y = matrix @ x.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = freeze(self.matrix)
        if matrix.ndim != 2:
            raise DimensionError(f"operator matrix must be 2-dimensional, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise FormatError("matrix", "entries must be finite")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def dim_out(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x):
        return self.matrix @ np.asarray(x)


def associator_tensor(c):
    """
    a[i, j, k, m] = ((e_i e_j) e_k − e_i (e_j e_k))_m.
    """
    left = np.einsum("ijt,tkm->ijkm", c, c)
    right = np.einsum("jkt,itm->ijkm", c, c)
    return left - right


def left_symmetry_tensor(c):
    assoc = associator_tensor(c)
    return assoc - np.einsum("jikm->ijkm", assoc)


def jacobi_tensor(f):
    """
    Cyclic sum [[x_i, x_j], x_k] + [[x_j, x_k], x_i] + [[x_k, x_i], x_j].
    """
    nested = np.einsum("ijt,tkm->ijkm", f, f)
    return nested + np.einsum("jkim->ijkm", nested) + np.einsum("kijm->ijkm", nested)


def left_symmetry_residual(A: Algebra) -> float:
    """
    Max-norm over all basis triples of the left-symmetry defect
    (e_i e_j)e_k − e_i(e_j e_k) − (e_j e_i)e_k + e_j(e_i e_k).
    """
    return max_norm(left_symmetry_tensor(A.c))


def left_symmetry_report(A: Algebra, tol=None) -> dict:
    record = residual_record(left_symmetry_tensor(A.c), tol)
    record["regular_representation"] = regular_representation_residual(A)
    return record


def check_left_symmetric(A: Algebra, tol=None) -> Algebra:
    """
    Return `A` flagged as verified, or raise `NotLeftSymmetricError`.
    """
    tol = resolve_tol(tol)
    residual = left_symmetry_residual(A)
    if residual >= tol:
        raise NotLeftSymmetricError(
            f"{A.name or 'algebra'} is not left-symmetric (residual {residual:.3e})"
        )
    return A if A.verified else replace(A, verified=True)


def require_left_symmetric(A: Algebra, tol=None) -> Algebra:
    if A.verified:
        return A
    return check_left_symmetric(A, tol)


def sub_adjacent(A: Algebra, tol=None) -> LieAlgebra:
    """
    Lie algebra of commutators [x, y] = xy − yx of a left-symmetric algebra.
    """
    A = require_left_symmetric(A, tol)
    lie = LieAlgebra(A.commutator_tensor(), basis=A.basis, name=A.name, tol=tol)
    logger.debug(f"sub-adjacent Lie algebra of {A.name or 'algebra'}: jacobi {lie.jacobi:.2e}")
    return lie


def jacobi_residual(L: LieAlgebra) -> float:
    return max_norm(jacobi_tensor(L.f))


def _check_index(A, i):
    if not isinstance(i, (int, np.integer)) or not 0 <= i < A.dim:
        raise DimensionError(f"basis index {i!r} out of range 0..{A.dim - 1}")


def left_mult(A: Algebra, i: int) -> LinearOperator:
    """
    L_{e_i}: (L_i)[k, j] = c[i, j, k].
    """
    _check_index(A, i)
    return LinearOperator(A.c[i].T)


def right_mult(A: Algebra, i: int) -> LinearOperator:
    """
    R_{e_i}: (R_i)[k, j] = c[j, i, k].
    """
    _check_index(A, i)
    return LinearOperator(A.c[:, i, :].T)


def ad(A: Algebra, i: int) -> LinearOperator:
    return LinearOperator(left_mult(A, i).matrix - right_mult(A, i).matrix)


def dual_op(M: LinearOperator) -> LinearOperator:
    """
    Dual representation matrix −Mᵀ.
    """
    if M.dim_in != M.dim_out:
        raise DimensionError(f"dual of a non-square {M.matrix.shape} operator")
    return LinearOperator(-M.matrix.T)


def regular_representation_residual(A: Algebra) -> float:
    """
    Max-norm of [L_x, L_y] − L_{[x,y]} over basis pairs.
    """
    L = np.transpose(A.c, (0, 2, 1))  # L[i] is the matrix of L_{e_i}
    commutators = np.einsum("iab,jbc->ijac", L, L) - np.einsum("jab,ibc->ijac", L, L)
    of_brackets = np.einsum("ijt,tac->ijac", A.commutator_tensor(), L)
    return max_norm(commutators - of_brackets)
