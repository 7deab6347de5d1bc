"""
This module finds symmetric solutions of the S-equation numerically.

The n(n+1)/2 independent entries of a symmetric r are complex unknowns and
the n³ coordinates of [[r, r]] the equations. The system is homogeneous
quadratic, so solutions form cones through 0 and its Jacobian is linear in
r and is formed exactly. Each start fixes an affine chart (the hyperplane
through the start orthogonal to it) and Gauss-Newton steps are
least-squares solves restricted to that chart, so iterates stay away from
the origin. Converged points are rescaled to have largest entry 1 and
clustered into representatives.
"""

from dataclasses import asdict, dataclass, field
from functools import partial
from logging import getLogger

import numpy as np

from lsa import settings
from lsa.algebra import Algebra, require_base_dim, require_left_symmetric
from lsa.errors import ConstraintError
from lsa.s_equation import SymmetricTensor, as_symmetric, s_tensor
from lsa.utils import concurrent_run, encode_array, max_norm, resolve_tol

logger = getLogger(__name__)

__all__ = [
    "SolveConfig",
    "SolutionSet",
    "solve",
    "polish",
    "family_membership",
    "invertibility_report",
]

# Starts whose iterates grow past this are treated as diverging.
DIVERGENCE_BOUND = 1e6
LINE_SEARCH_STEPS = (1.0, 0.5, 0.25, 0.125, 0.0625)


@dataclass(frozen=True)
class SolveConfig:
    starts: int = 500
    seed: int = field(default_factory=lambda: settings.DEFAULT_SEED)
    max_iters: int = 100
    newton_tol: float = 1e-12
    cluster_tol: float = 1e-6
    sample_radius: float = 2.0
    workers: int = 1

    def __post_init__(self):
        for name in ("starts", "max_iters", "newton_tol", "cluster_tol", "sample_radius", "workers"):
            if not getattr(self, name) > 0:
                raise ConstraintError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.cluster_tol > self.newton_tol:
            raise ConstraintError("cluster_tol must exceed newton_tol")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data):
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConstraintError(f"unknown solver options {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """
    Cluster representatives with their multiplicity (number of converged
    starts), |det r| and final S-residual.
    """

    solutions: list
    multiplicity: list
    det: list
    residual: list
    starts: int
    converged: int
    identically_zero: bool = False
    algebra: str = None

    def __len__(self):
        return len(self.solutions)

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "starts": self.starts,
            "converged": self.converged,
            "identically_zero": self.identically_zero,
            "clusters": [
                {"r": encode_array(r.r), "multiplicity": m, "det": d, "residual": res}
                for r, m, d, res in zip(self.solutions, self.multiplicity, self.det, self.residual)
            ],
        }


def _symmetric_basis(n):
    """
    Stack E[p] of symmetric unit matrices for the upper-triangle entries.
    """
    rows, cols = np.triu_indices(n)
    E = np.zeros((len(rows), n, n), dtype=complex)
    E[np.arange(len(rows)), rows, cols] = 1
    E[np.arange(len(rows)), cols, rows] = 1
    return E


def _to_matrix(u, E):
    return np.einsum("p,pij->ij", u, E)


def _to_unknowns(r):
    return r[np.triu_indices(r.shape[0])]


def jacobian(c, r, E):
    """
    Derivative of [[r, r]] along each E[p], flattened to (n³, m).
    """
    f = c - np.einsum("jik->ijk", c)
    first = (
        -np.einsum("tli,ptj,lk->pijk", c, E, r)
        + np.einsum("tlj,pit,lk->pijk", c, E, r)
        + np.einsum("tlk,pit,lj->pijk", f, E, r)
    )
    second = (
        -np.einsum("tli,tj,plk->pijk", c, r, E)
        + np.einsum("tlj,it,plk->pijk", c, r, E)
        + np.einsum("tlk,it,plj->pijk", f, r, E)
    )
    return (first + second).reshape(E.shape[0], -1).T


def _chart(u):
    """
    Orthonormal basis (m, m-1) of the directions d with ⟨u, d⟩ = 0.

    Steps along these directions keep ⟨u, ·⟩ = |u|², a hyperplane that
    misses the origin.
    """
    _, _, Vh = np.linalg.svd(u.conj().reshape(1, -1))
    return Vh[1:].conj().T


def _merit(c, E, u):
    return np.linalg.norm(s_tensor(c, _to_matrix(u, E)))


def _line_search(c, E, u, step, merit):
    for t in LINE_SEARCH_STEPS:
        trial = u + t * step
        if _merit(c, E, trial) < merit:
            return trial
    return u + step


def _gauss_newton(c, E, cfg, tol, u):
    """
    Iterate from unknowns `u` on the chart through `u`; returns
    (r, residual) on convergence, else None. A zero `u` converges at once.
    """
    chart = None
    for _ in range(cfg.max_iters + 1):
        r = _to_matrix(u, E)
        T = s_tensor(c, r)
        norm = max_norm(T)
        scale = 1 + max_norm(r) ** 2
        if norm < cfg.newton_tol * scale and norm < tol:
            return r, norm
        if chart is None:
            chart = _chart(u)
            if chart.shape[1] == 0:
                return None
        J = jacobian(c, r, E) @ chart
        step = chart @ np.linalg.lstsq(J, -T.reshape(-1), rcond=None)[0]
        u = _line_search(c, E, u, step, np.linalg.norm(T))
        if not np.all(np.isfinite(u)) or max_norm(u) > DIVERGENCE_BOUND:
            return None
    return None


def _normalized(r):
    """
    Scale of r with largest-modulus entry equal to 1.
    """
    pivot = r.flat[np.argmax(np.abs(r))]
    return r / pivot


def _draw_starts(cfg, m):
    rng = np.random.default_rng(cfg.seed)
    radius = cfg.sample_radius * np.sqrt(rng.uniform(size=(cfg.starts, m)))
    angle = rng.uniform(0, 2 * np.pi, size=(cfg.starts, m))
    return radius * np.exp(1j * angle)


def _cluster(points, cluster_tol):
    representatives, counts, residuals = [], [], []
    for r, res in points:
        for pos, rep in enumerate(representatives):
            if max_norm(r - rep) <= cluster_tol:
                counts[pos] += 1
                break
        else:
            representatives.append(r)
            counts.append(1)
            residuals.append(res)
    return representatives, counts, residuals


def solve(A: Algebra, cfg: SolveConfig = None, tol=None) -> SolutionSet:
    """
    Multi-start Gauss-Newton search for symmetric solutions of [[r, r]] = 0.

    Args
    ----
    * :param A: ---> Algebra: a left-symmetric algebra.
    * :param cfg: ---> SolveConfig: defaults if None.
    * :param tol: ---> float: residual every reported solution must beat.

    Output is a deterministic function of (A, cfg): starts are drawn in seed
    order and clustered in that order whatever the number of workers.
    Solutions come in cones, so each cluster stands for the line through its
    representative, scaled to largest entry 1; r = 0 lies on every such line
    and is not listed. When the system vanishes identically every start is a
    solution and the clusters are those starts, flagged `identically_zero`.
    """
    cfg = cfg or SolveConfig()
    tol = resolve_tol(tol)
    A = require_base_dim(require_left_symmetric(A, tol))
    n = A.dim
    E = _symmetric_basis(n)
    starts = _draw_starts(cfg, E.shape[0])

    identically_zero = max_norm(jacobian(A.c, _to_matrix(starts[0], E), E)) == 0
    if identically_zero:
        logger.info(f"S-equation of {A.name or 'algebra'} vanishes identically")

    run = partial(_gauss_newton, A.c, E, cfg, tol)
    if cfg.workers > 1:
        outcomes = list(
            concurrent_run(run, starts, max_workers=cfg.workers, disable_progress_bar=True)
        )
    else:
        outcomes = [run(u) for u in starts]

    converged = []
    for outcome in outcomes:
        if outcome is None:
            continue
        r = _normalized(outcome[0])
        residual = max_norm(s_tensor(A.c, r))
        if residual < tol:
            converged.append((r, residual))

    representatives, counts, residuals = _cluster(converged, cfg.cluster_tol)
    solutions = [SymmetricTensor(r) for r in representatives]
    logger.info(
        f"{A.name or 'algebra'}: {len(converged)}/{cfg.starts} starts converged, "
        f"{len(solutions)} clusters"
    )
    return SolutionSet(
        solutions=solutions,
        multiplicity=counts,
        det=[abs(s.det()) for s in solutions],
        residual=residuals,
        starts=cfg.starts,
        converged=len(converged),
        identically_zero=identically_zero,
        algebra=A.name,
    )


def polish(A: Algebra, r, cfg: SolveConfig = None, tol=None):
    """
    Gauss-Newton refinement from `r`. Returns the nearby solution as a
    `SymmetricTensor`, or None when the iteration does not converge.

    Steps are orthogonal to `r`, so a nonzero `r` is never refined to 0:
    the result is at least as large as `r` in the unknown coordinates.
    """
    cfg = cfg or SolveConfig()
    tol = resolve_tol(tol)
    A = require_left_symmetric(A, tol)
    r = as_symmetric(r, tol)
    E = _symmetric_basis(A.dim)
    outcome = _gauss_newton(A.c, E, cfg, tol, _to_unknowns(r.r))
    return None if outcome is None else SymmetricTensor(outcome[0])


def _fit(generator, names, guess, target, iterations=20, step=1e-7):
    """
    Least-squares fit of parameters `names` so that generator(params) ≈ target.
    """
    p = np.array([guess[name] for name in names], dtype=complex)

    def evaluate(values):
        with np.errstate(all="ignore"):
            return np.asarray(generator(dict(zip(names, values))), dtype=complex)

    for _ in range(iterations):
        current = evaluate(p)
        if not np.all(np.isfinite(current)):
            return dict(zip(names, p)), float("inf")
        gap = (current - target).reshape(-1)
        if not gap.any():
            break
        # Family generators are holomorphic in their parameters away from branch cuts.
        J = np.stack(
            [((evaluate(p + step * np.eye(len(p))[q]) - current) / step).reshape(-1) for q in range(len(p))],
            axis=1,
        )
        delta = np.linalg.lstsq(J, -gap, rcond=None)[0]
        if max_norm(delta) < 1e-15:
            break
        p = p + delta
    final = evaluate(p)
    if not np.all(np.isfinite(final)):
        return dict(zip(names, p)), float("inf")
    return dict(zip(names, p)), max_norm(final - target)


def family_membership(r, family_id, algebra_params=None, tol=None) -> dict:
    """
    Fit the free parameters of a catalog solution family to `r`.

    Args
    ----
    * :param r: ---> SymmetricTensor or matrix.
    * :param family_id: ---> str: catalog family id, e.g. "SE(NV)-double".
    * :param algebra_params: ---> dict: parameters of the algebra (k, lambda)
        when the family depends on them.
    * :param tol: ---> float: fit tolerance, the default `cluster_tol` if None.

    Every branch is tried; the best fit is reported. The fit residual is
    measured relative to the largest entry of `r`, and a fit whose
    parameters break the family's constraints (a nonzero parameter fitted
    to 0 at that scale) is not a member.
    """
    from lsa.catalog import get_family

    family = get_family(family_id)
    tol = SolveConfig.cluster_tol if tol is None else float(tol)
    r = as_symmetric(r)
    algebra_params = family.algebra_values(algebra_params)
    if r.dim != family.dim:
        raise ConstraintError(f"{family_id} has dimension {family.dim}, r has {r.dim}")
    scale = max_norm(r.r) or 1.0

    best = None
    for branch in family.branches:
        def generator(params, branch=branch):
            return family.matrix(params, algebra_params, branch)

        if not family.names:
            params, residual = {}, max_norm(generator({}) - r.r)
        else:
            params, residual = _fit(generator, family.names, family.guess(r.r), r.r)
        if best is None or residual < best["residual"]:
            best = {"branch": branch, "params": params, "residual": residual}

    violations = [
        error
        for parameter in family.parameters
        for error in parameter.violations(best["params"][parameter.name], gap=tol * scale)
    ]
    return {
        "family": family_id,
        "member": bool(best["residual"] < tol * scale and not violations),
        "branch": best["branch"],
        "params": best["params"],
        "residual": best["residual"],
        "relative_residual": best["residual"] / scale,
        "violations": violations,
    }


def invertibility_report(S: SolutionSet, tol=None) -> dict:
    """
    Per-cluster |det r| and whether any cluster is invertible. An empty
    answer is evidence over the sampled starts, never a proof. A system that
    vanishes identically has every r as a solution, the identity included.
    """
    tol = SolveConfig.cluster_tol if tol is None else float(tol)
    found = S.identically_zero or any(d > tol for d in S.det)
    report = {
        "algebra": S.algebra,
        "det": list(S.det),
        "tolerance": tol,
        "identically_zero": S.identically_zero,
        "invertible_found": found,
    }
    if not found:
        report["note"] = f"no invertible solution found in {S.starts} starts"
    return report
