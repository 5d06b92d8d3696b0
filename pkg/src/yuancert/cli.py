"""Command-line interface: instance parsing, dispatch, certificate reports.

Exit codes mirror the report outcome taxonomy so shell pipelines can
branch on verdicts: 0 certified/verified, 1 refuted, 2 hypothesis
violated, 3 input error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .cone import FirstOrderCone, restrict, span_basis
from .errors import (
    EmptyMultiplierSetError,
    HypothesisViolatedError,
    InputError,
    MfcqFailedError,
    NumericalFailureError,
)
from .instances import (
    FamilyInstance,
    KktInstance,
    QuadInstance,
    dump_json,
    input_digest,
    load_cone,
    load_instance,
    load_json,
)
from .nlp import (
    check_mfcq,
    critical_cone_lineality,
    multiplier_vertices,
    second_order_certificate,
)
from .numeric_core import (
    DEFAULT_TOL,
    SymMatrix,
    matrix_set_rank,
    min_eigenvalue,
    norm_max,
    quad_form,
)
from .oracle import NoWitnessFound, sample_max_nonneg, simplex_grid_search
from .quadprob import quad_certificate
from .yuan import Certified, Refuted, certify_rank2, yuan_two

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_HYPOTHESIS = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4


def _base_report(path) -> dict:
    return {
        "verdict": "error",
        "tool_version": __version__,
        "input_digest": input_digest(path),
    }


def _apply_outcome(report: dict, cert_report) -> int:
    report["residuals"] = {k: float(v) for k, v in cert_report.residuals.items()}
    outcome = cert_report.outcome
    if isinstance(outcome, Certified):
        report["verdict"] = "certified"
        report["weights"] = outcome.weights.t.tolist()
        report["lambda_min"] = outcome.lambda_min
        return EXIT_OK
    if isinstance(outcome, Refuted):
        report["verdict"] = "refuted"
        report["witness"] = outcome.witness.tolist()
        report["form_values"] = outcome.form_values.tolist()
        return EXIT_REFUTED
    report["verdict"] = "hypothesis_violated"
    report["reason"] = outcome.reason
    if outcome.rank is not None:
        report["rank"] = outcome.rank
    if outcome.witness is not None:
        report["witness"] = outcome.witness.tolist()
    return EXIT_HYPOTHESIS


def _family_and_cone(args, expected_count=None):
    instance = load_instance(args.input)
    if not isinstance(instance, FamilyInstance):
        raise InputError(f"{args.input}: expected a 'family' instance")
    family = instance.matrices
    if expected_count is not None and len(family) != expected_count:
        raise InputError(
            f"{args.input}: expected exactly {expected_count} matrices, got {len(family)}"
        )
    if args.cone is not None:
        cone = load_cone(args.cone, family.order)
    else:
        cone = FirstOrderCone.full(family.order)
    return family, cone


def _cmd_yuan2(args) -> tuple[int, dict]:
    family, cone = _family_and_cone(args, expected_count=2)
    a, b = family.sym_members()
    report = _base_report(args.input)
    code = _apply_outcome(report, yuan_two(a, b, cone, tol=args.tol))
    return code, report


def _cmd_certify(args) -> tuple[int, dict]:
    family, cone = _family_and_cone(args)
    report = _base_report(args.input)
    code = _apply_outcome(report, certify_rank2(family, cone, tol=args.tol))
    return code, report


def _cmd_rank(args) -> tuple[int, dict]:
    instance = load_instance(args.input)
    if not isinstance(instance, FamilyInstance):
        raise InputError(f"{args.input}: expected a 'family' instance")
    result = matrix_set_rank(instance.matrices, args.tol)
    report = _base_report(args.input)
    report["verdict"] = "certified"
    report["rank"] = result.rank
    report["basis"] = list(result.basis)
    if result.coefficients is not None:
        report["coefficients"] = result.coefficients.tolist()
    return EXIT_OK, report


def _cmd_vertices(args) -> tuple[int, dict]:
    instance = load_instance(args.input)
    if not isinstance(instance, KktInstance):
        raise InputError(f"{args.input}: expected a 'kkt' instance")
    data = instance.data
    vertices = multiplier_vertices(data, args.tol)
    report = _base_report(args.input)
    report["verdict"] = "certified"
    report["mfcq"] = check_mfcq(data, args.tol)
    report["vertices"] = [
        {"lambda": v.lam.tolist(), "mu": v.mu.tolist()} for v in vertices
    ]
    report["lineality_basis"] = critical_cone_lineality(data).T.tolist()
    return EXIT_OK, report


def _cmd_soc(args) -> tuple[int, dict]:
    instance = load_instance(args.input)
    if not isinstance(instance, KktInstance):
        raise InputError(f"{args.input}: expected a 'kkt' instance")
    cone = None
    if args.cone is not None:
        cone = load_cone(args.cone, instance.data.n)
    result = second_order_certificate(instance.data, cone, tol=args.tol)
    report = _base_report(args.input)
    code = _apply_outcome(report, result.report)
    if result.multiplier is not None:
        report["multiplier"] = {
            "lambda": result.multiplier.lam.tolist(),
            "mu": result.multiplier.mu.tolist(),
        }
    report["vertex_count"] = len(result.vertices)
    return code, report


def _cmd_quad(args) -> tuple[int, dict]:
    instance = load_instance(args.input)
    if not isinstance(instance, QuadInstance):
        raise InputError(f"{args.input}: expected a 'quadprob' instance")
    report = _base_report(args.input)
    code = _apply_outcome(report, quad_certificate(instance.problem, tol=args.tol))
    return code, report


def _cmd_oracle(args) -> tuple[int, dict]:
    family, cone = _family_and_cone(args)
    report = _base_report(args.input)
    verdict = sample_max_nonneg(
        family, cone, samples=args.samples, seed=args.seed, tol=args.tol
    )
    if isinstance(verdict, NoWitnessFound):
        report["verdict"] = "certified"
        report["samples"] = verdict.samples
        code = EXIT_OK
    else:
        report["verdict"] = "refuted"
        report["witness"] = verdict.x.tolist()
        report["form_values"] = verdict.form_values.tolist()
        code = EXIT_REFUTED
    if args.resolution is not None:
        weights, best = simplex_grid_search(family, cone, args.resolution)
        report["grid_best_weights"] = weights.t.tolist()
        report["grid_best_lambda_min"] = best
    return code, report


def _cmd_verify_report(args) -> tuple[int, dict]:
    stored = load_json(args.report)
    if not isinstance(stored, dict):
        raise InputError(f"{args.report}: expected a JSON report object")
    instance = load_instance(args.input)
    out = _base_report(args.input)
    verdict = stored.get("verdict")
    out["checked_verdict"] = verdict
    if verdict == "certified" and "weights" in stored:
        family, cone = _family_and_cone_from(instance, args)
        weights = np.asarray(stored["weights"], dtype=float)
        if weights.size != len(family):
            raise InputError("report weights do not match the family size")
        basis = span_basis(cone)
        syms = family.sym_members()
        combined = sum(w * s.entries for w, s in zip(weights, syms))
        if basis.shape[1]:
            lam = min_eigenvalue(restrict(SymMatrix(combined), basis))
        else:
            lam = 0.0
        out["lambda_min"] = lam
        ok = abs(lam - float(stored.get("lambda_min", lam))) <= 1e-9 * (1.0 + abs(lam))
        out["verdict"] = "certified" if ok else "error"
        return (EXIT_OK if ok else EXIT_NUMERICAL), out
    if verdict == "refuted" and "witness" in stored:
        family, cone = _family_and_cone_from(instance, args)
        x = np.asarray(stored["witness"], dtype=float)
        syms = family.sym_members()
        values = np.array([quad_form(s, x) for s in syms])
        scale = 1.0 + max(s.norm_max() for s in syms)
        out["form_values"] = values.tolist()
        ok = bool((values < -1e-9 * scale).all())
        stored_values = stored.get("form_values")
        if ok and stored_values is not None:
            ok = norm_max(values - np.asarray(stored_values, dtype=float)) <= 1e-9 * scale
        out["verdict"] = "refuted" if ok else "error"
        return (EXIT_OK if ok else EXIT_NUMERICAL), out
    if verdict == "hypothesis_violated":
        if isinstance(instance, FamilyInstance):
            rank = matrix_set_rank(instance.matrices, args.tol).rank
        elif isinstance(instance, QuadInstance):
            rank = matrix_set_rank(instance.problem.matrices, args.tol).rank
        else:
            raise InputError("cannot re-check a hypothesis report for this instance kind")
        out["rank"] = rank
        stored_rank = stored.get("rank")
        ok = stored_rank is None or stored_rank == rank
        out["verdict"] = "hypothesis_violated" if ok else "error"
        return (EXIT_OK if ok else EXIT_NUMERICAL), out
    raise InputError("report carries nothing verifiable for this instance")


def _family_and_cone_from(instance, args):
    if isinstance(instance, FamilyInstance):
        family = instance.matrices
    elif isinstance(instance, QuadInstance):
        family = instance.problem.matrices
    else:
        raise InputError("expected a 'family' or 'quadprob' instance")
    if getattr(args, "cone", None) is not None:
        cone = load_cone(args.cone, family.order)
    else:
        cone = FirstOrderCone.full(family.order)
    return family, cone


_COMMANDS = {
    "yuan2": _cmd_yuan2,
    "certify": _cmd_certify,
    "rank": _cmd_rank,
    "vertices": _cmd_vertices,
    "soc": _cmd_soc,
    "quad": _cmd_quad,
    "oracle": _cmd_oracle,
    "verify-report": _cmd_verify_report,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yuancert",
        description="PSD convex-combination certificates for quadratic-form families",
    )
    parser.add_argument("--version", action="version", version=f"yuancert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_cone=True):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="relative tolerance (default 1e-9)")
        p.add_argument("--json", action="store_true", help="emit the JSON report")
        if with_cone:
            p.add_argument("--cone", default=None, help="path to a cone instance file")

    p = sub.add_parser("yuan2", help="two-matrix certificate (pencil search)")
    p.add_argument("input")
    common(p)
    p = sub.add_parser("certify", help="rank-<=2 family certificate")
    p.add_argument("input")
    common(p)
    p = sub.add_parser("rank", help="numerical rank of the matrix set")
    p.add_argument("input")
    common(p, with_cone=False)
    p = sub.add_parser("vertices", help="multiplier polytope vertices")
    p.add_argument("input")
    common(p, with_cone=False)
    p = sub.add_parser("soc", help="single-multiplier second-order certificate")
    p.add_argument("input")
    common(p)
    p = sub.add_parser("quad", help="quadratic-problem certificate pipeline")
    p.add_argument("input")
    common(p, with_cone=False)
    p = sub.add_parser("oracle", help="sampling cross-check")
    p.add_argument("input")
    common(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=None,
                   help="also run the exhaustive weight-grid search")
    p = sub.add_parser("verify-report", help="recompute a stored report against its input")
    p.add_argument("report")
    p.add_argument("input")
    common(p)
    return parser


def _print_report(report: dict, as_json: bool) -> None:
    if as_json:
        print(dump_json(report))
        return
    print(f"verdict: {report.get('verdict')}")
    for key in ("rank", "reason", "lambda_min", "samples", "vertex_count", "mfcq"):
        if key in report:
            print(f"{key}: {report[key]}")
    if "weights" in report:
        print("weights: " + ", ".join(f"{w:.12g}" for w in report["weights"]))
    if "witness" in report:
        print("witness: " + ", ".join(f"{w:.12g}" for w in report["witness"]))
    if "form_values" in report:
        print("form values: " + ", ".join(f"{w:.12g}" for w in report["form_values"]))
    if "multiplier" in report:
        mult = report["multiplier"]
        print("multiplier lambda: " + ", ".join(f"{w:.12g}" for w in mult["lambda"]))
        print("multiplier mu: " + ", ".join(f"{w:.12g}" for w in mult["mu"]))
    if "vertices" in report:
        for v in report["vertices"]:
            print("vertex lambda=(" + ", ".join(f"{w:.6g}" for w in v["lambda"]) +
                  ") mu=(" + ", ".join(f"{w:.6g}" for w in v["mu"]) + ")")
    residuals = report.get("residuals")
    if residuals:
        print("residuals: " + ", ".join(f"{k}={v:.3e}" for k, v in residuals.items()))


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        code, report = handler(args)
    except InputError as exc:  # ConeNotCriticalError included
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MfcqFailedError, EmptyMultiplierSetError, HypothesisViolatedError) as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _print_report(report, args.json)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
