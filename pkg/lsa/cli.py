"""
Command-line front end: `lsa <verb> [options]`.

Every verb prints one JSON report on standard output. Exit status is 0 when
the requested checks pass, 1 when the operation ran but a check failed and
2 on usage or input errors.
"""

import argparse
import json
import sys
from logging import getLogger
from pathlib import Path

from lsa import __version__, settings
from lsa.algebra import Algebra, left_symmetry_report, sub_adjacent
from lsa.catalog import (export, families_of, get_entry, get_family,
                         instantiate_algebra, instantiate_family,
                         list_entries, regression_sweep)
from lsa.errors import ConstraintError, LSAError, NotLeftSymmetricError
from lsa.phase_space import (LinearMap, build_phase_space, check_parakahler,
                             semidirect_phase_space, untwisting_map,
                             verify_symplectomorphism)
from lsa.s_equation import (SymmetricTensor, dual_product,
                            s_residual_operator, s_report)
from lsa.solver import (SolveConfig, family_membership, invertibility_report,
                        solve)
from lsa.utils import decode_matrix, dump_json, dumps, load_json

logger = getLogger(__name__)

__all__ = ["main", "build_parser"]

OK, CHECK_FAILED, USAGE_ERROR = 0, 1, 2


def _params(text):
    """
    "k=2,r11=1" -> {"k": "2", "r11": "1"}.
    """
    params = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        params[name.strip()] = value.strip()
    return params


def _json_argument(value, what):
    """
    JSON from a file path, or inline JSON text.
    """
    path = Path(value)
    if path.is_file():
        return load_json(path, True)
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        raise FileNotFoundError(f"{what}: {value} is neither a file nor JSON text")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="residual tolerance")
    common.add_argument("--output", default=None, metavar="PATH", help="also write the report here")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--catalog", default=None, metavar="ID", help="catalog algebra id, e.g. NV")
    source.add_argument("--input", default=None, metavar="PATH", help="algebra JSON file")
    source.add_argument(
        "--params", type=_params, default={}, metavar="NAME=VALUE,...",
        help="algebra and family parameters",
    )

    tensor = argparse.ArgumentParser(add_help=False)
    tensor.add_argument("--family", default=None, metavar="ID", help="catalog solution family")
    tensor.add_argument("--branch", default=None, help="branch of a family with ± choices")
    tensor.add_argument("--r", default=None, metavar="PATH|JSON", help="symmetric tensor")

    parser = argparse.ArgumentParser(
        prog="lsa", description="Left-symmetric algebras, the S-equation and phase spaces."
    )
    parser.add_argument("--version", action="version", version=f"lsa {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("verify", parents=[common, source], help="left-symmetry residual")
    sub.add_parser("sub-adjacent", parents=[common, source], help="sub-adjacent Lie algebra")
    sub.add_parser("s-residual", parents=[common, source, tensor], help="S-equation residual")
    sub.add_parser("dual-product", parents=[common, source, tensor], help="product induced on A*")
    sub.add_parser("build-phase", parents=[common, source, tensor], help="phase space of (A, r)")
    sub.add_parser("check-parakahler", parents=[common, source, tensor], help="parakähler report")
    iso = sub.add_parser(
        "check-iso", parents=[common, source, tensor],
        help="check a map from the semidirect phase space to the phase space of (A, r)",
    )
    iso.add_argument("--phi", required=True, metavar="PATH|JSON", help="2n×2n matrix")
    sub.add_parser(
        "theorem39", aliases=["untwist"], parents=[common, source, tensor],
        help="check the untwisting map between the semidirect phase space and that of (A, r)",
    )

    solver = sub.add_parser("solve", parents=[common, source], help="numerical S-equation solutions")
    solver.add_argument("--starts", type=int, default=SolveConfig.starts)
    solver.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    solver.add_argument("--workers", type=int, default=SolveConfig.workers)

    catalog = sub.add_parser("catalog", parents=[common], help="catalog access")
    catalog.add_argument("action", choices=("list", "export", "sweep"))
    catalog.add_argument("--samples", type=int, default=20, help="samples per family and branch")
    catalog.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    catalog.add_argument("--workers", type=int, default=1)
    catalog.add_argument(
        "--family", action="append", default=None, metavar="ID", help="restrict the sweep"
    )
    return parser


# ------------------ inputs ------------------


def _split_params(args, entry_id):
    """
    Separate algebra parameters from family parameters.
    """
    names = {p.name for p in get_entry(entry_id).parameters} if entry_id else set()
    algebra = {k: v for k, v in args.params.items() if k in names}
    family = {k: v for k, v in args.params.items() if k not in names}
    return algebra, family


def _entry_id(args):
    if getattr(args, "family", None) and not args.catalog and not args.input:
        return get_family(args.family).algebra_id
    return args.catalog


def _algebra(args) -> Algebra:
    entry_id = _entry_id(args)
    if bool(entry_id) == bool(args.input):
        raise ConstraintError("give exactly one of --catalog and --input")
    if args.input:
        return Algebra.from_json(load_json(args.input, True))
    algebra_params, _ = _split_params(args, entry_id)
    return instantiate_algebra(entry_id, algebra_params)


def _tensor(args) -> SymmetricTensor:
    if bool(args.family) == bool(args.r):
        raise ConstraintError("give exactly one of --family and --r")
    if args.r:
        return SymmetricTensor.from_json(_json_argument(args.r, "--r"))
    algebra_params, family_params = _split_params(args, _entry_id(args))
    return instantiate_family(args.family, family_params, args.branch, algebra_params)


# ------------------ verbs ------------------


def _verify(args):
    report = left_symmetry_report(_algebra(args))
    return report, report["verified"]


def _sub_adjacent(args):
    A = _algebra(args)
    try:
        lie = sub_adjacent(A)
    except NotLeftSymmetricError as exc:
        return {"verified": False, "error": str(exc)}, False
    report = dict(lie.to_json(), jacobi=lie.jacobi, verified=lie.jacobi < settings.TOLERANCE)
    return report, report["verified"]


def _s_residual(args):
    A, r = _algebra(args), _tensor(args)
    report = s_report(A, r)
    report["operator_norm"] = s_residual_operator(A, r)
    return report, report["verified"]


def _dual_product(args):
    Astar = dual_product(_algebra(args), _tensor(args))
    return dict(Astar.to_json(), verified=Astar.verified), Astar.verified


def _build_phase(args):
    P = build_phase_space(_algebra(args), _tensor(args))
    return P.to_json(), P.verified


def _check_parakahler(args):
    report = check_parakahler(build_phase_space(_algebra(args), _tensor(args)))
    return report, report["verified"]


def _check_iso(args):
    A, r = _algebra(args), _tensor(args)
    phi = LinearMap(decode_matrix(_json_argument(args.phi, "--phi"), "phi"))
    report = verify_symplectomorphism(semidirect_phase_space(A), build_phase_space(A, r), phi)
    return report, report["symplectic"]


def _untwist(args):
    A, r = _algebra(args), _tensor(args)
    report = verify_symplectomorphism(
        semidirect_phase_space(A), build_phase_space(A, r), untwisting_map(A, r)
    )
    return report, report["symplectic"]


def _matches(r, entry_id, algebra_params):
    matched = []
    for family in families_of(entry_id):
        try:
            fit = family_membership(r, family.id, algebra_params)
        except ConstraintError:
            continue
        if fit["member"]:
            matched.append(family.id)
    return matched


def _solve(args):
    A = _algebra(args)
    cfg = SolveConfig(starts=args.starts, seed=args.seed, workers=args.workers)
    solutions = solve(A, cfg)
    report = solutions.to_json()
    report["config"] = cfg.to_json()
    report["invertibility"] = invertibility_report(solutions)
    if args.catalog:
        algebra_params, _ = _split_params(args, args.catalog)
        for cluster, r in zip(report["clusters"], solutions.solutions):
            cluster["families"] = _matches(r, args.catalog, algebra_params)
    return report, True


def _catalog(args):
    if args.action == "list":
        return list_entries(), True
    if args.action == "export":
        return export(), True
    report = regression_sweep(
        samples_per_family=args.samples,
        seed=args.seed,
        families=args.family,
        workers=args.workers,
    )
    return report, report["reconciled"]


VERBS = {
    "verify": _verify,
    "sub-adjacent": _sub_adjacent,
    "s-residual": _s_residual,
    "dual-product": _dual_product,
    "build-phase": _build_phase,
    "check-parakahler": _check_parakahler,
    "check-iso": _check_iso,
    "theorem39": _untwist,
    "untwist": _untwist,
    "solve": _solve,
    "catalog": _catalog,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    default_tolerance = settings.TOLERANCE
    if args.tolerance is not None:
        settings.TOLERANCE = args.tolerance
    try:
        report, passed = VERBS[args.verb](args)
        text = dumps(report)
        if args.output:
            dump_json(report, args.output)
    except (LSAError, OSError, json.JSONDecodeError) as exc:
        logger.debug(f"{args.verb} failed on input", exc_info=True)
        sys.stderr.write(f"lsa {args.verb}: error: {exc}\n")
        return USAGE_ERROR
    finally:
        settings.TOLERANCE = default_tolerance
    sys.stdout.write(text + "\n")
    return OK if passed else CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
