"""
This module is a registry of left-symmetric algebras and of the families of
symmetric solutions of their S-equation.

It covers the complex 2-dimensional left-symmetric algebras with nonzero
products, the 3-dimensional simple ones T1^λ and T2, and every solution
family listed for them. Algebras and families are closed-form generators
instantiated with complex parameter values; printed readings that fail the
defining equations keep their printed generator and come with an erratum
family holding the reading that does satisfy them (see `data/errata.json`).

`regression_sweep` samples every family and runs the S-equation, phase-space,
parakähler, untwisting and bialgebra checks on each sample.
"""

from dataclasses import dataclass, field
from logging import getLogger
from typing import Callable

import numpy as np

from lsa import settings
from lsa.algebra import Algebra, check_left_symmetric
from lsa.errors import ConstraintError, UnknownEntryError
from lsa.phase_space import (build_phase_space, check_parakahler,
                             lsa_from_symplectic, semidirect_phase_space,
                             untwisting_map, verify_symplectomorphism)
from lsa.s_equation import (SymmetricTensor, check_bialgebra,
                            cocycle_equivalence, dual_product,
                            s_residual_tensor)
from lsa.utils import (concurrent_run, encode_complex, load_json, max_norm,
                       resolve_tol)

logger = getLogger(__name__)

__all__ = [
    "Parameter",
    "AlgebraEntry",
    "SolutionFamily",
    "list_entries",
    "get_entry",
    "get_family",
    "instantiate_algebra",
    "instantiate_family",
    "regression_sweep",
    "export",
]

# `errata.json` records each printed reading that fails the defining
# equations and the reading used instead.
ERRATA = load_json(settings.root_dir / "lsa" / "data" / "errata.json", True)

# Exclusions are matched within this distance; samples keep further away.
EXCLUSION_GAP = 1e-12
SAMPLE_GAP = 0.1
SAMPLE_RADIUS = 2.0
# The cocycle form uses r⁻¹; worse-conditioned samples skip that check.
COND_LIMIT = 1e6
# Corrected tensors smaller than this fraction of the sample are rejected.
COLLAPSE_RATIO = 0.1


def parse_value(value) -> complex:
    """
    Read a complex parameter such as "2", "-0.5", "1+2i" or "3j".
    """
    if isinstance(value, (int, float, complex, np.number)) and not isinstance(value, bool):
        return complex(value)
    try:
        return complex(str(value).strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConstraintError(f"cannot read {value!r} as a complex number")


@dataclass(frozen=True)
class Parameter:
    """
    A named complex parameter with hard exclusions (`exclude`, `nonzero`).
    `sampler` draws an in-range value from a numpy Generator.
    """

    name: str
    exclude: tuple = ()
    nonzero: bool = False
    sampler: Callable = None

    def violations(self, value, gap=EXCLUSION_GAP) -> list:
        errors = []
        if self.nonzero and abs(value) <= gap:
            errors.append(f"{self.name} must be nonzero")
        for excluded in self.exclude:
            if abs(value - excluded) <= gap:
                errors.append(f"{self.name} must differ from {excluded}")
        return errors

    def draw(self, rng, exclude=()) -> complex:
        forbidden = tuple(self.exclude) + tuple(exclude) + ((0,) if self.nonzero else ())
        while True:
            if self.sampler is not None:
                value = complex(self.sampler(rng))
            else:
                radius = SAMPLE_RADIUS * np.sqrt(rng.uniform())
                value = complex(radius * np.exp(2j * np.pi * rng.uniform()))
            if all(abs(value - e) >= SAMPLE_GAP for e in forbidden):
                return value

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "exclude": [encode_complex(e) for e in self.exclude],
            "nonzero": self.nonzero,
        }


def _checked_values(parameters, values, what):
    """
    Complex values for `parameters` from `values`, or ConstraintError.
    """
    values = {k: parse_value(v) for k, v in (values or {}).items()}
    names = [p.name for p in parameters]
    unknown = sorted(set(values) - set(names))
    if unknown:
        raise ConstraintError(f"{what} takes no parameters {unknown}; expected {names}")
    missing = [name for name in names if name not in values]
    if missing:
        raise ConstraintError(f"{what} needs parameters {missing}")
    errors = [e for p in parameters for e in p.violations(values[p.name])]
    if errors:
        raise ConstraintError(f"{what}: " + "; ".join(errors))
    return values


@dataclass(frozen=True)
class AlgebraEntry:
    """
    Catalog algebra. `rules(params)` returns the nonzero products as
    {(i, j): {k: coefficient}} with 1-based indices.
    """

    id: str
    dim: int
    rules: Callable
    presentation: str
    parameters: tuple = ()
    in_range: Callable = None
    range_note: str = ""
    printed_rules: Callable = None
    errata: tuple = ()

    def instantiate(self, params=None, printed=False) -> Algebra:
        values = _checked_values(self.parameters, params, self.id)
        if self.in_range is not None and not self.in_range(values):
            logger.warning(f"{self.id} parameters {values} lie outside {self.range_note}")
        rules = self.printed_rules if printed and self.printed_rules else self.rules
        A = Algebra.from_rules(self.dim, rules(values), name=self.id)
        if printed and self.printed_rules:
            return A
        return check_left_symmetric(A)

    def draw(self, rng, exclude=None) -> dict:
        exclude = exclude or {}
        return {p.name: p.draw(rng, exclude.get(p.name, ())) for p in self.parameters}

    def to_json(self) -> dict:
        data = {
            "id": self.id,
            "dim": self.dim,
            "presentation": self.presentation,
            "parameters": [p.to_json() for p in self.parameters],
            "errata": [dict(ERRATA[key], id=key) for key in self.errata],
        }
        if self.range_note:
            data["range"] = self.range_note
        if not self.parameters:
            data["products"] = self.instantiate().to_json()["products"]
        return data


@dataclass(frozen=True)
class SolutionFamily:
    """
    Closed-form family of symmetric solutions of the S-equation of one
    catalog algebra.

    `generator(p, a, sign)` builds the matrix from family parameters `p`,
    algebra parameters `a` and the sign (+1 or -1) selected by the branch.
    `guess` names, for each family parameter, the matrix entry it is read
    from when fitting.
    """

    id: str
    algebra_id: str
    parameters: tuple
    generator: Callable
    formula: str
    guess_entries: dict
    branches: tuple = ("+",)
    algebra_params: dict = field(default_factory=dict)
    algebra_exclude: dict = field(default_factory=dict)
    status: str = "printed"
    erratum_of: str = None
    errata: tuple = ()

    @property
    def names(self) -> tuple:
        return tuple(p.name for p in self.parameters)

    @property
    def entry(self) -> AlgebraEntry:
        return get_entry(self.algebra_id)

    @property
    def dim(self) -> int:
        return self.entry.dim

    def algebra_values(self, params=None) -> dict:
        """
        Algebra parameters: fixed values merged with `params`, validated.
        """
        given = {k: parse_value(v) for k, v in (params or {}).items()}
        for name, fixed in self.algebra_params.items():
            if name in given and abs(given[name] - fixed) > EXCLUSION_GAP:
                raise ConstraintError(f"{self.id} is defined for {name}={fixed}")
            given[name] = complex(fixed)
        values = _checked_values(self.entry.parameters, given, self.algebra_id)
        for name, excluded in self.algebra_exclude.items():
            for e in excluded:
                if abs(values[name] - e) <= EXCLUSION_GAP:
                    raise ConstraintError(f"{self.id} requires {name} != {e}")
        return values

    def sign(self, branch) -> int:
        if branch is None:
            branch = self.branches[0]
        if branch not in self.branches:
            raise ConstraintError(f"{self.id} has branches {list(self.branches)}, not {branch!r}")
        return -1 if branch == "-" else 1

    def matrix(self, params, algebra_params, branch=None):
        p = {k: np.complex128(v) for k, v in params.items()}
        a = {k: np.complex128(v) for k, v in algebra_params.items()}
        return np.array(self.generator(p, a, self.sign(branch)), dtype=complex)

    def guess(self, r) -> dict:
        return {name: r[i, j] for name, (i, j) in self.guess_entries.items()}

    def draw(self, rng) -> tuple:
        """
        In-constraint algebra and family parameters.
        """
        if self.algebra_params:
            algebra = self.algebra_values()
        else:
            algebra = self.entry.draw(rng, self.algebra_exclude)
        return algebra, {p.name: p.draw(rng) for p in self.parameters}

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "algebra": self.algebra_id,
            "parameters": [p.to_json() for p in self.parameters],
            "branches": list(self.branches),
            "formula": self.formula,
            "algebra_params": {k: encode_complex(v) for k, v in self.algebra_params.items()},
            "algebra_exclude": {
                k: [encode_complex(e) for e in v] for k, v in self.algebra_exclude.items()
            },
            "status": self.status,
            "erratum_of": self.erratum_of,
            "errata": list(self.errata),
        }


# ------------------ algebras ------------------


def _draw_lambda(rng):
    """
    λ with 0 < |λ| < 1, or λ = e^{iθ} with 0 <= θ <= π.
    """
    if rng.uniform() < 0.5:
        return rng.uniform(0.05, 0.95) * np.exp(2j * np.pi * rng.uniform())
    return np.exp(1j * np.pi * rng.uniform())


def _lambda_in_range(values):
    lam = values["lambda"]
    if 0 < abs(lam) < 1:
        return True
    return abs(abs(lam) - 1) <= 1e-12 and -1e-12 <= np.angle(lam) <= np.pi + 1e-12


def _t1(a):
    lam = a["lambda"]
    return {
        (1, 1): {1: lam + 1},
        (1, 2): {2: 1},
        (1, 3): {3: lam},
        (2, 3): {1: 1},
        (3, 2): {1: 1},
    }


ALGEBRAS = (
    AlgebraEntry(
        id="AI",
        dim=2,
        rules=lambda a: {(1, 1): {1: 1}, (2, 2): {2: 1}},
        presentation="e1.e1=e1, e2.e2=e2",
    ),
    AlgebraEntry(
        id="AII",
        dim=2,
        rules=lambda a: {(2, 2): {2: 1}, (1, 2): {1: 1}, (2, 1): {1: 1}},
        presentation="e2.e2=e2, e1.e2=e2.e1=e1",
    ),
    AlgebraEntry(
        id="AIII",
        dim=2,
        rules=lambda a: {(1, 1): {1: 1}},
        presentation="e1.e1=e1",
    ),
    AlgebraEntry(
        id="AIV",
        dim=2,
        rules=lambda a: {},
        presentation="all products zero",
    ),
    AlgebraEntry(
        id="AV",
        dim=2,
        rules=lambda a: {(1, 1): {2: 1}},
        presentation="e1.e1=e2",
    ),
    AlgebraEntry(
        id="NI",
        dim=2,
        rules=lambda a: {(2, 1): {1: -1}, (2, 2): {2: -1}},
        presentation="e2.e1=-e1, e2.e2=-e2",
    ),
    AlgebraEntry(
        id="NII_-1",
        dim=2,
        rules=lambda a: {(2, 1): {1: -1}, (2, 2): {1: 1, 2: -1}},
        presentation="e2.e1=-e1, e2.e2=e1-e2",
    ),
    AlgebraEntry(
        id="NII_k",
        dim=2,
        rules=lambda a: {(2, 1): {1: -1}, (2, 2): {2: a["k"]}},
        presentation="e2.e1=-e1, e2.e2=k e2",
        parameters=(Parameter("k", exclude=(-1,)),),
    ),
    AlgebraEntry(
        id="NIII",
        dim=2,
        rules=lambda a: {(1, 2): {1: 1}, (2, 2): {2: 1}},
        presentation="e1.e2=e1, e2.e2=e2",
    ),
    AlgebraEntry(
        id="NIV_k",
        dim=2,
        rules=lambda a: {(1, 2): {1: a["k"]}, (2, 1): {1: a["k"] - 1}, (2, 2): {1: 1, 2: a["k"]}},
        presentation="e1.e2=k e1, e2.e1=(k-1) e1, e2.e2=e1+k e2",
        parameters=(Parameter("k"),),
        printed_rules=lambda a: {
            (1, 2): {1: a["k"]},
            (2, 1): {2: a["k"] - 1},
            (2, 2): {1: 1, 2: a["k"]},
        },
        errata=("NIV_k-product",),
    ),
    AlgebraEntry(
        id="NV",
        dim=2,
        rules=lambda a: {(1, 1): {1: 2}, (1, 2): {2: 1}, (2, 2): {1: 1}},
        presentation="e1.e1=2e1, e1.e2=e2, e2.e2=e1",
    ),
    AlgebraEntry(
        id="T1_lambda",
        dim=3,
        rules=_t1,
        presentation="e1.e1=(lambda+1)e1, e1.e2=e2, e1.e3=lambda e3, e2.e3=e3.e2=e1",
        parameters=(Parameter("lambda", sampler=_draw_lambda),),
        in_range=_lambda_in_range,
        range_note="0<|lambda|<1 or lambda=e^{i theta}, 0<=theta<=pi",
    ),
    AlgebraEntry(
        id="T2",
        dim=3,
        rules=lambda a: {
            (1, 1): {1: 1.5},
            (1, 2): {2: 1},
            (1, 3): {3: 0.5},
            (2, 3): {1: 1},
            (3, 2): {1: 1},
            (3, 3): {2: -1},
        },
        presentation="e1.e1=3/2 e1, e1.e2=e2, e1.e3=1/2 e3, e2.e3=e3.e2=e1, e3.e3=-e2",
    ),
)


# ------------------ solution families ------------------

r11, r12, r13, r22, r33 = (Parameter(name) for name in ("r11", "r12", "r13", "r22", "r33"))
r11_nz, r12_nz, r13_nz, r22_nz, r33_nz = (
    Parameter(name, nonzero=True) for name in ("r11", "r12", "r13", "r22", "r33")
)

D11, D12, D13, D22, D33 = (0, 0), (0, 1), (0, 2), (1, 1), (2, 2)


def _diag(*values):
    return np.diag(np.array(values, dtype=complex))


def _sym2(a, b, d):
    return [[a, b], [b, d]]


def _root(p, s):
    # ±sqrt(r11 r22) on the off-diagonal.
    return _sym2(p["r11"], s * np.sqrt(p["r11"] * p["r22"]), p["r22"])


def _niv_k(p, a, s):
    v = np.array([1, 1 - a["k"]])
    return p["r11"] * np.outer(v, v)


def _t1_anti(p, a, s):
    m = _diag(p["r11"], 0, 0)
    m[1, 2] = m[2, 1] = (a["lambda"] + 1) * p["r11"]
    return m


def _t1_root(p, a, s):
    root = s * np.sqrt(p["r22"] * p["r33"])
    return [[root, 0, 0], [0, p["r22"], root], [0, root, p["r33"]]]


def _t1_complex_printed(p, a, s):
    x, y = p["r12"], p["r13"]
    i = s * 1j
    return [
        [-i * np.sqrt(2 * x * y), x, y],
        [x, i * x * np.sqrt(x / (2 * y)), i * np.sqrt(x * y / 2)],
        [y, i * np.sqrt(x * y / 2), i * y * np.sqrt(y / (2 * x))],
    ]


def _t1_complex(p, a, s):
    x, y = p["r12"], p["r13"]
    h = s * 1j * np.sqrt(x * y / 2)
    return [[-2 * h, x, y], [x, x * h / y, h], [y, h, y * h / x]]


FAMILIES = (
    SolutionFamily(
        id="SE(AI)-diag",
        algebra_id="AI",
        parameters=(r11, r22),
        generator=lambda p, a, s: _diag(p["r11"], p["r22"]),
        formula="(r11, 0; 0, r22)",
        guess_entries={"r11": D11, "r22": D22},
    ),
    SolutionFamily(
        id="SE(AI)-equal",
        algebra_id="AI",
        parameters=(r11_nz,),
        generator=lambda p, a, s: np.full((2, 2), p["r11"]),
        formula="(r11, r11; r11, r11), r11 != 0",
        guess_entries={"r11": D11},
    ),
    SolutionFamily(
        id="SE(AII)-offdiag",
        algebra_id="AII",
        parameters=(r12, r22),
        generator=lambda p, a, s: _sym2(0, p["r12"], p["r22"]),
        formula="(0, r12; r12, r22)",
        guess_entries={"r12": D12, "r22": D22},
        errata=("AII-offdiag", "AII-bracket-labels", "AII-bracket"),
    ),
    SolutionFamily(
        id="SE(AII)-offdiag-erratum",
        algebra_id="AII",
        parameters=(r11, r12),
        generator=lambda p, a, s: _sym2(p["r11"], p["r12"], 0),
        formula="(r11, r12; r12, 0)",
        guess_entries={"r11": D11, "r12": D12},
        status="erratum",
        erratum_of="SE(AII)-offdiag",
        errata=("AII-offdiag",),
    ),
    SolutionFamily(
        id="SE(AII)-r22",
        algebra_id="AII",
        parameters=(r22,),
        generator=lambda p, a, s: _diag(0, p["r22"]),
        formula="(0, 0; 0, r22)",
        guess_entries={"r22": D22},
        status="erratum",
        erratum_of="SE(AII)-offdiag",
        errata=("AII-offdiag",),
    ),
    SolutionFamily(
        id="SE(AII)-diag",
        algebra_id="AII",
        parameters=(r11_nz,),
        generator=lambda p, a, s: _diag(p["r11"], 0),
        formula="(r11, 0; 0, 0), r11 != 0",
        guess_entries={"r11": D11},
        errata=("AII-bracket-labels",),
    ),
    SolutionFamily(
        id="SE(AIII)",
        algebra_id="AIII",
        parameters=(r11, r22),
        generator=lambda p, a, s: _diag(p["r11"], p["r22"]),
        formula="(r11, 0; 0, r22)",
        guess_entries={"r11": D11, "r22": D22},
    ),
    SolutionFamily(
        id="SE(AIV)",
        algebra_id="AIV",
        parameters=(r11, r12, r22),
        generator=lambda p, a, s: _sym2(p["r11"], p["r12"], p["r22"]),
        formula="(r11, r12; r12, r22)",
        guess_entries={"r11": D11, "r12": D12, "r22": D22},
    ),
    SolutionFamily(
        id="SE(AV)",
        algebra_id="AV",
        parameters=(r12, r22),
        generator=lambda p, a, s: _sym2(0, p["r12"], p["r22"]),
        formula="(0, r12; r12, r22)",
        guess_entries={"r12": D12, "r22": D22},
        errata=("AV-bracket",),
    ),
    SolutionFamily(
        id="SE(NI)",
        algebra_id="NI",
        parameters=(r11, r22),
        generator=lambda p, a, s: _root(p, s),
        formula="(r11, ±sqrt(r11 r22); ±sqrt(r11 r22), r22)",
        guess_entries={"r11": D11, "r22": D22},
        branches=("+", "-"),
        errata=("NI-bracket",),
    ),
    SolutionFamily(
        id="SE(NII_k)",
        algebra_id="NII_k",
        parameters=(r22,),
        generator=lambda p, a, s: _diag(0, p["r22"]),
        formula="(0, 0; 0, r22), k != ±1",
        guess_entries={"r22": D22},
        algebra_exclude={"k": (1, -1)},
        errata=("NII_k-bracket",),
    ),
    SolutionFamily(
        id="SE(NII_k)-r11",
        algebra_id="NII_k",
        parameters=(r11,),
        generator=lambda p, a, s: _diag(p["r11"], 0),
        formula="(r11, 0; 0, 0)",
        guess_entries={"r11": D11},
        status="supplement",
        errata=("NII_k-missing",),
    ),
    SolutionFamily(
        id="SE(NII_1)-offdiag",
        algebra_id="NII_k",
        parameters=(r11, r12),
        generator=lambda p, a, s: _sym2(p["r11"], p["r12"], 0),
        formula="(r11, r12; r12, 0)",
        guess_entries={"r11": D11, "r12": D12},
        algebra_params={"k": 1},
        errata=("NII_1-bracket",),
    ),
    SolutionFamily(
        id="SE(NII_1)-diag",
        algebra_id="NII_k",
        parameters=(r22_nz,),
        generator=lambda p, a, s: _diag(0, p["r22"]),
        formula="(0, 0; 0, r22), r22 != 0",
        guess_entries={"r22": D22},
        algebra_params={"k": 1},
    ),
    SolutionFamily(
        id="SE(NII_-1)",
        algebra_id="NII_-1",
        parameters=(r11,),
        generator=lambda p, a, s: _diag(p["r11"], 0),
        formula="(r11, 0; 0, 0)",
        guess_entries={"r11": D11},
    ),
    SolutionFamily(
        id="SE(NIII)",
        algebra_id="NIII",
        parameters=(r11, r22),
        generator=lambda p, a, s: _root(p, s),
        formula="(r11, ±sqrt(r11 r22); ±sqrt(r11 r22), r22)",
        guess_entries={"r11": D11, "r22": D22},
        branches=("+", "-"),
    ),
    SolutionFamily(
        id="SE(NIV_k)",
        algebra_id="NIV_k",
        parameters=(r11,),
        generator=_niv_k,
        formula="(r11, (1-k) r11; (1-k) r11, (1-k)^2 r11), k != 0, 2",
        guess_entries={"r11": D11},
        algebra_exclude={"k": (0, 2)},
        errata=("NIV_k-bracket",),
    ),
    SolutionFamily(
        id="SE(NIV_2)",
        algebra_id="NIV_k",
        parameters=(r11, r12, r22),
        generator=lambda p, a, s: _sym2(p["r11"], -p["r12"], p["r22"]),
        formula="(r11, -r12; -r12, r22)",
        guess_entries={"r11": D11, "r22": D22, "r12": D12},
        algebra_params={"k": 2},
        errata=("NIV_2-family",),
    ),
    SolutionFamily(
        id="SE(NIV_2)-erratum",
        algebra_id="NIV_k",
        parameters=(r11, r22),
        generator=lambda p, a, s: _sym2(p["r11"], -p["r22"], p["r22"]),
        formula="(r11, -r22; -r22, r22)",
        guess_entries={"r11": D11, "r22": D22},
        algebra_params={"k": 2},
        status="erratum",
        erratum_of="SE(NIV_2)",
        errata=("NIV_2-family",),
    ),
    SolutionFamily(
        id="SE(NV)-diag",
        algebra_id="NV",
        parameters=(r11,),
        generator=lambda p, a, s: _diag(p["r11"], 0),
        formula="(r11, 0; 0, 0)",
        guess_entries={"r11": D11},
    ),
    SolutionFamily(
        id="SE(NV)-double",
        algebra_id="NV",
        parameters=(r11_nz,),
        generator=lambda p, a, s: _diag(p["r11"], 2 * p["r11"]),
        formula="(r11, 0; 0, 2 r11), r11 != 0",
        guess_entries={"r11": D11},
        errata=("NV-bracket", "NV-double-dual-bracket"),
    ),
    SolutionFamily(
        id="SE(NV)-complex",
        algebra_id="NV",
        parameters=(r11_nz,),
        generator=lambda p, a, s: _sym2(p["r11"], -s * 1j * p["r11"], -p["r11"]),
        formula="(r11, -i r11; -i r11, -r11), r11 != 0, i^2 = -1",
        guess_entries={"r11": D11},
        branches=("+", "-"),
    ),
    SolutionFamily(
        id="SE(T1)-r11",
        algebra_id="T1_lambda",
        parameters=(r11,),
        generator=lambda p, a, s: _diag(p["r11"], 0, 0),
        formula="diag(r11, 0, 0)",
        guess_entries={"r11": D11},
    ),
    SolutionFamily(
        id="SE(T1)-r22",
        algebra_id="T1_lambda",
        parameters=(r22_nz,),
        generator=lambda p, a, s: _diag(0, p["r22"], 0),
        formula="diag(0, r22, 0), r22 != 0",
        guess_entries={"r22": D22},
    ),
    SolutionFamily(
        id="SE(T1)-r33",
        algebra_id="T1_lambda",
        parameters=(r33_nz,),
        generator=lambda p, a, s: _diag(0, 0, p["r33"]),
        formula="diag(0, 0, r33), r33 != 0",
        guess_entries={"r33": D33},
        errata=("T1-r33-bracket",),
    ),
    SolutionFamily(
        id="SE(T1)-offdiag",
        algebra_id="T1_lambda",
        parameters=(r11_nz,),
        generator=_t1_anti,
        formula="(r11, 0, 0; 0, 0, (lambda+1) r11; 0, (lambda+1) r11, 0), (lambda+1) r11 != 0",
        guess_entries={"r11": D11},
        algebra_exclude={"lambda": (-1,)},
    ),
    SolutionFamily(
        id="SE(T1^1)-root",
        algebra_id="T1_lambda",
        parameters=(r22_nz, r33_nz),
        generator=lambda p, a, s: _t1_root(p, a, 1),
        formula="(s, 0, 0; 0, r22, s; 0, s, r33), s = sqrt(r22 r33), r22 r33 != 0",
        guess_entries={"r22": D22, "r33": D33},
        algebra_params={"lambda": 1},
    ),
    SolutionFamily(
        id="SE(T1^1)-negroot",
        algebra_id="T1_lambda",
        parameters=(r22_nz, r33_nz),
        generator=lambda p, a, s: _t1_root(p, a, -1),
        formula="(-s, 0, 0; 0, r22, -s; 0, -s, r33), s = sqrt(r22 r33), r22 r33 != 0",
        guess_entries={"r22": D22, "r33": D33},
        algebra_params={"lambda": 1},
    ),
    SolutionFamily(
        id="SE(T1^1)-complex",
        algebra_id="T1_lambda",
        parameters=(r12_nz, r13_nz),
        generator=lambda p, a, s: _t1_complex_printed(p, a, 1),
        formula=(
            "(-i sqrt(2 r12 r13), r12, r13; r12, i r12 sqrt(r12/(2 r13)), i sqrt(r12 r13/2); "
            "r13, i sqrt(r12 r13/2), i r13 sqrt(r13/(2 r12))), r12 r13 != 0"
        ),
        guess_entries={"r12": D12, "r13": D13},
        algebra_params={"lambda": 1},
        errata=("T1_1-complex", "T1_1-complex-bracket"),
    ),
    SolutionFamily(
        id="SE(T1^1)-complex-conj",
        algebra_id="T1_lambda",
        parameters=(r12_nz, r13_nz),
        generator=lambda p, a, s: _t1_complex_printed(p, a, -1),
        formula=(
            "(i sqrt(2 r12 r13), r12, r13; r12, -i r12 sqrt(r12/(2 r13)), -i sqrt(r12 r13/2); "
            "r13, -i sqrt(r12 r13/2), -i r13 sqrt(r13/(2 r12)))"
        ),
        guess_entries={"r12": D12, "r13": D13},
        algebra_params={"lambda": 1},
        errata=("T1_1-complex-conj", "T1_1-complex-bracket"),
    ),
    SolutionFamily(
        id="SE(T1^1)-complex-erratum",
        algebra_id="T1_lambda",
        parameters=(r12_nz, r13_nz),
        generator=lambda p, a, s: _t1_complex(p, a, 1),
        formula="(-2h, r12, r13; r12, r12 h/r13, h; r13, h, r13 h/r12), h = i sqrt(r12 r13/2)",
        guess_entries={"r12": D12, "r13": D13},
        algebra_params={"lambda": 1},
        status="erratum",
        erratum_of="SE(T1^1)-complex",
        errata=("T1_1-complex",),
    ),
    SolutionFamily(
        id="SE(T1^1)-complex-conj-erratum",
        algebra_id="T1_lambda",
        parameters=(r12_nz, r13_nz),
        generator=lambda p, a, s: _t1_complex(p, a, -1),
        formula="(-2h, r12, r13; r12, r12 h/r13, h; r13, h, r13 h/r12), h = -i sqrt(r12 r13/2)",
        guess_entries={"r12": D12, "r13": D13},
        algebra_params={"lambda": 1},
        status="erratum",
        erratum_of="SE(T1^1)-complex-conj",
        errata=("T1_1-complex-conj",),
    ),
    SolutionFamily(
        id="SE(T2)-r11",
        algebra_id="T2",
        parameters=(r11,),
        generator=lambda p, a, s: _diag(p["r11"], 0, 0),
        formula="diag(r11, 0, 0)",
        guess_entries={"r11": D11},
        errata=("T2-r11-bracket",),
    ),
    SolutionFamily(
        id="SE(T2)-r22",
        algebra_id="T2",
        parameters=(r22_nz,),
        generator=lambda p, a, s: _diag(0, p["r22"], 0),
        formula="diag(0, r22, 0), r22 != 0",
        guess_entries={"r22": D22},
        errata=("T2-r22-bracket",),
    ),
    SolutionFamily(
        id="SE(T2)-offdiag",
        algebra_id="T2",
        parameters=(r11_nz,),
        generator=lambda p, a, s: [[p["r11"], 0, 0], [0, 0, 1.5 * p["r11"]], [0, 1.5 * p["r11"], 0]],
        formula="(r11, 0, 0; 0, 0, 3/2 r11; 0, 3/2 r11, 0), r11 != 0",
        guess_entries={"r11": D11},
        errata=("T2-bracket", "T2-offdiag-bracket"),
    ),
)

_ALGEBRAS = {entry.id: entry for entry in ALGEBRAS}
_FAMILIES = {family.id: family for family in FAMILIES}
_POSITIONS = {family.id: pos for pos, family in enumerate(FAMILIES)}


def list_entries() -> dict:
    """
    Algebra ids and family ids, in catalog order.
    """
    return {
        "algebras": [entry.id for entry in ALGEBRAS],
        "families": [family.id for family in FAMILIES],
    }


def get_entry(entry_id) -> AlgebraEntry:
    try:
        return _ALGEBRAS[entry_id]
    except KeyError:
        raise UnknownEntryError(f"unknown algebra {entry_id!r}")


def get_family(family_id) -> SolutionFamily:
    try:
        return _FAMILIES[family_id]
    except KeyError:
        raise UnknownEntryError(f"unknown solution family {family_id!r}")


def families_of(entry_id) -> list:
    get_entry(entry_id)
    return [family for family in FAMILIES if family.algebra_id == entry_id]


def instantiate_algebra(entry_id, params=None, printed=False) -> Algebra:
    """
    Algebra of a catalog entry for the given parameter values.

    Args
    ----
    * :param entry_id: ---> str: e.g. "NV", "NII_k", "T1_lambda".
    * :param params: ---> dict: e.g. {"k": 2}; values may be strings.
    * :param printed: ---> bool: use the printed product where it differs
        from the one used (the result is then not checked).
    """
    return get_entry(entry_id).instantiate(params, printed=printed)


def instantiate_family(family_id, params=None, branch=None, algebra_params=None) -> SymmetricTensor:
    """
    Symmetric tensor of a solution family. `algebra_params` is needed only for
    families whose algebra carries a parameter not fixed by the family.
    """
    family = get_family(family_id)
    values = _checked_values(family.parameters, params, family_id)
    algebra = family.algebra_values(algebra_params)
    return SymmetricTensor(family.matrix(values, algebra, branch))


# ------------------ regression sweep ------------------


def _encode_params(params):
    return {k: encode_complex(v) for k, v in sorted(params.items())}


def _sample_checks(A, r, tol):
    """
    Residuals of the phase-space suite for one (A, r) that solves the S-equation.
    """
    P = build_phase_space(A, r, tol)
    parakahler = check_parakahler(P, tol)
    untwist = verify_symplectomorphism(semidirect_phase_space(A, tol), P, untwisting_map(A, r), tol)
    bialgebra = check_bialgebra(A, dual_product(A, r, tol), tol)
    recovered = lsa_from_symplectic(P.lie, P.omega, tol)
    worst = {
        "parakahler": max(parakahler["residuals"].values()),
        "lie_isomorphism": untwist["lie_residual"],
        "pullback": untwist["pullback_residual"],
        "bialgebra": max(bialgebra["residuals"].values()),
        "lsa_from_symplectic": max_norm(recovered.c - P.lsa.c),
    }
    if abs(r.det()) > tol and np.linalg.cond(r.r) < COND_LIMIT:
        worst["cocycle_equivalence"] = cocycle_equivalence(A, r, tol)["cocycle_residual"]
    passed = (
        parakahler["verified"]
        and untwist["symplectic"]
        and untwist["plus_preserved"]
        and untwist["minus_preserved"] == r.is_zero()
        and bialgebra["verified"]
        and all(v < tol for v in worst.values())
    )
    return bool(passed), worst


def _discrepancy(A, r, tol, branch, algebra_params, params, s_norm):
    """
    Record of a sample failing the S-equation, with the solver's corrected
    tensor, its distance from the sample and its size relative to it.
    """
    from lsa.solver import polish

    corrected = polish(A, r, tol=tol)
    record = {
        "branch": branch,
        "algebra_params": _encode_params(algebra_params),
        "params": _encode_params(params),
        "s_residual": s_norm,
        "corrected": None,
        "corrected_residual": None,
        "distance": None,
        "scale": None,
    }
    if corrected is not None:
        record.update(
            corrected=corrected.to_json(),
            corrected_residual=s_residual_tensor(A, corrected, tol).norm,
            distance=max_norm(corrected.r - r.r),
            scale=max_norm(corrected.r) / max_norm(r.r),
        )
    return record


def _sweep_family(job):
    """
    Sample one family; `job` is (position, family id, samples, seed, tol).
    """
    position, family_id, samples, seed, tol = job
    family = get_family(family_id)
    rng = np.random.default_rng([seed, position])
    worst = {}
    discrepancies = []
    passed = failed = 0
    for branch in family.branches:
        for _ in range(samples):
            algebra_params, params = family.draw(rng)
            A = instantiate_algebra(family.algebra_id, algebra_params)
            r = SymmetricTensor(family.matrix(params, algebra_params, branch))
            s_norm = s_residual_tensor(A, r, tol).norm
            worst["s_residual"] = max(worst.get("s_residual", 0.0), s_norm)
            if s_norm >= tol:
                failed += 1
                discrepancies.append(_discrepancy(A, r, tol, branch, algebra_params, params, s_norm))
                continue
            ok, residuals = _sample_checks(A, r, tol)
            for key, value in residuals.items():
                worst[key] = max(worst.get(key, 0.0), value)
            passed += ok
            failed += not ok
    if discrepancies:
        logger.warning(
            f"{family_id}: {len(discrepancies)} samples fail the S-equation; suspected table discrepancy"
        )
    return {
        "family": family_id,
        "algebra": family.algebra_id,
        "status": family.status,
        "samples": passed + failed,
        "passed": passed,
        "failed": failed,
        "worst": worst,
        "tolerance": tol,
        "discrepancy": bool(discrepancies),
        "discrepancies": discrepancies,
    }


def _reconciled(report):
    """
    Every failed sample is an S-equation discrepancy with a corrected tensor
    of comparable size. Corrections that shrink toward 0 do not count.
    """
    fixed = [
        d for d in report["discrepancies"]
        if d["corrected_residual"] is not None
        and d["corrected_residual"] < report["tolerance"]
        and d["scale"] >= COLLAPSE_RATIO
    ]
    return report["failed"] == len(fixed)


def regression_sweep(
    samples_per_family=20, seed=None, families=None, tol=None, workers=1, progress=False
) -> dict:
    """
    Sample every family (or the ids in `families`) and run the full check
    suite on each sample. Families whose samples fail the S-equation are
    flagged as discrepancies with a solver-corrected tensor attached.
    """
    if samples_per_family < 1:
        raise ConstraintError("samples_per_family must be positive")
    seed = settings.DEFAULT_SEED if seed is None else int(seed)
    tol = resolve_tol(tol)
    ids = list(families) if families else [family.id for family in FAMILIES]
    for fid in ids:
        get_family(fid)
    jobs = [(_POSITIONS[fid], fid, samples_per_family, seed, tol) for fid in ids]
    reports = list(
        concurrent_run(
            _sweep_family,
            jobs,
            max_workers=workers,
            disable_progress_bar=not progress,
        )
    )
    flagged = [report["family"] for report in reports if report["discrepancy"]]
    logger.info(f"regression sweep: {len(reports)} families, {len(flagged)} flagged")
    return {
        "seed": seed,
        "samples_per_family": samples_per_family,
        "tolerance": tol,
        "families": reports,
        "flagged": flagged,
        "verified": all(report["failed"] == 0 for report in reports),
        "reconciled": all(map(_reconciled, reports)),
    }


def export() -> dict:
    """
    The whole registry: algebras, families with constraint metadata, errata.
    """
    return {
        "algebras": [entry.to_json() for entry in ALGEBRAS],
        "families": [family.to_json() for family in FAMILIES],
        "errata": {key: ERRATA[key] for key in sorted(ERRATA)},
    }
