"""Command-line interface exposing every verification as a subcommand.

Each subcommand prints one report per requested check, in declaration
order.  Exit status is 0 when every check passed, 1 when a check ran to
completion but found a discrepancy, and 2 for usage or data problems.
Structured output is one JSON object per report with a fixed field set,
so runs are diffable; pass --no-timings to make them byte-identical.
"""

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence

from .autoforms import (NumericReport, SlicePoint, check_functional_equation,
                        check_periodicity)
from .exactseries import IntegralityError
from .identities import IdentityReport, verify_fmid, verify_j_product, verify_mid
from .kacmoody import (DenominatorReport, character, classify,
                       denominator_check, load_gcm)
from .lorentzlattice import (LatticeVector, LeechClass, RHO,
                             class_difference_norm, inner_product, is_member,
                             norm, random_member, random_rho_member, reflect)
from .modforms import c0_square_exponents, modform_table
from .moonshine import (InconsistentSystemError, identity_element_data,
                        load_thompson_data, solve_coefficients, verify_twisted)

DEFAULT_P_TRUNC = 6
DEFAULT_Q_TRUNC = 6
DEFAULT_SERIES_TRUNC = 40
DEFAULT_TOLERANCE = 1e-8
DEFAULT_PHI_POINTS = ("2,3", "1,1.4142135623730951")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one invocation."""

    p_trunc: int = DEFAULT_P_TRUNC
    q_trunc: int = DEFAULT_Q_TRUNC
    series_trunc: int = DEFAULT_SERIES_TRUNC
    tolerance: float = DEFAULT_TOLERANCE
    data_path: Optional[str] = None
    output_format: str = "text"
    no_timings: bool = False

    def __post_init__(self) -> None:
        if min(self.p_trunc, self.q_trunc, self.series_trunc) < 1:
            raise ValueError("truncations must be at least 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.output_format not in ("text", "structured"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def _pick_trunc(flag_value: Optional[int], env_name: str, default: int) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(env_name, "").strip()
    if env:
        return int(env)
    return default


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flag beats environment beats default, per setting."""
    return RunConfig(
        p_trunc=_pick_trunc(getattr(args, "p_trunc", None),
                            "QIDENT_P_TRUNC", DEFAULT_P_TRUNC),
        q_trunc=_pick_trunc(getattr(args, "q_trunc", None),
                            "QIDENT_Q_TRUNC", DEFAULT_Q_TRUNC),
        series_trunc=_pick_trunc(getattr(args, "series_trunc", None),
                                 "QIDENT_SERIES_TRUNC", DEFAULT_SERIES_TRUNC),
        tolerance=getattr(args, "tolerance", None) or DEFAULT_TOLERANCE,
        data_path=getattr(args, "data", None),
        output_format=args.format,
        no_timings=args.no_timings,
    )


def _normalize(report) -> Dict[str, object]:
    if isinstance(report, dict):
        return report
    if isinstance(report, IdentityReport):
        return {
            "name": report.name,
            "params": {"p_trunc": report.p_trunc, "q_trunc": report.q_trunc,
                       "lhs_terms": report.lhs_terms,
                       "rhs_terms": report.rhs_terms},
            "equal": report.equal,
            "first_discrepancy": list(report.first_discrepancy)
            if report.first_discrepancy is not None else None,
            "notes": list(report.notes),
        }
    if isinstance(report, NumericReport):
        return {
            "name": report.name,
            "params": {k: str(v) if isinstance(v, complex) else v
                       for k, v in report.params.items()},
            "equal": report.equal,
            "first_discrepancy": None if report.equal
            else {"relative_difference": report.relative_difference,
                  "tolerance": report.tolerance},
            "notes": list(report.notes),
        }
    if isinstance(report, DenominatorReport):
        diff = report.first_difference
        return {
            "name": "denominator",
            "params": {"n_weyl": report.n_weyl, "n_roots": report.n_roots},
            "equal": report.equal,
            "first_discrepancy": [list(diff[0]), diff[1], diff[2]]
            if diff is not None else None,
            "notes": list(report.notes),
        }
    raise TypeError(f"cannot render report of type {type(report).__name__}")


def emit_report(report, output_format: str,
                timing_ms: Optional[float] = None) -> str:
    """Render one report; structured output is a single JSON object."""
    data = _normalize(report)
    if output_format == "structured":
        payload = {
            "name": data["name"],
            "params": data["params"],
            "equal": data["equal"],
            "first_discrepancy": data["first_discrepancy"],
            "timings_ms": timing_ms,
        }
        return json.dumps(payload, sort_keys=True, default=str)
    lines = [f"check: {data['name']}"]
    for key in sorted(data["params"]):
        lines.append(f"  {key}: {data['params'][key]}")
    lines.append(f"equal: {'true' if data['equal'] else 'false'}")
    if data["first_discrepancy"] is not None:
        lines.append(f"first discrepancy: {data['first_discrepancy']}")
    for note in data.get("notes", ()):
        lines.append(f"note: {note}")
    if timing_ms is not None:
        lines.append(f"time: {timing_ms:.1f} ms")
    return "\n".join(lines)


def _run_reports(producers: Sequence[Callable[[], object]],
                 config: RunConfig, out) -> int:
    all_equal = True
    for produce in producers:
        start = time.monotonic()
        report = produce()
        elapsed = round((time.monotonic() - start) * 1000.0, 3)
        timing = None if config.no_timings else elapsed
        print(emit_report(report, config.output_format, timing), file=out)
        all_equal = all_equal and bool(_normalize(report)["equal"])
    return 0 if all_equal else 1


# ---------------------------------------------------------------------------
# Subcommand bodies.

def _verify_producers(args: argparse.Namespace,
                      config: RunConfig) -> List[Callable[[], object]]:
    check = args.check
    if check == "mid":
        delta = None
        if args.corrupt:
            m, n, d = args.corrupt
            delta = {(m, n): d}
        return [lambda: verify_mid(config.p_trunc, config.q_trunc,
                                   exponent_delta=delta)]
    if check == "fmid":
        delta = None
        if args.corrupt:
            m, n, d = args.corrupt
            delta = {(m, n): d}
        return [lambda: verify_fmid(config.p_trunc, config.q_trunc,
                                    exponent_delta=delta)]
    if check == "j-product":
        n_factors = args.trunc
        delta = {args.corrupt[0]: args.corrupt[1]} if args.corrupt else None

        def produce():
            report = _normalize(verify_j_product(n_factors, delta))
            exps = {n: e for n, e in sorted(c0_square_exponents(n_factors).items())
                    if n <= n_factors}
            for n, d in (delta or {}).items():
                exps[n] = exps.get(n, 0) + d
            report["params"]["exponents"] = exps
            return report

        return [produce]
    if check == "twisted":
        if args.data is not None:
            with open(args.data, "r", encoding="utf-8") as fh:
                data = load_thompson_data(fh.read())
        else:
            data = args.class_label or "1A"
        return [lambda: verify_twisted(data, config.p_trunc, config.q_trunc)]
    if check == "phi":
        producers: List[Callable[[], object]] = []
        for spec_text in (args.points or list(DEFAULT_PHI_POINTS)):
            parts = spec_text.split(",")
            if len(parts) != 2:
                raise ValueError(
                    f"point must be IM_SIGMA,IM_TAU, got {spec_text!r}")
            pt = SlicePoint(float(parts[0]) * 1j, float(parts[1]) * 1j)
            producers.append(
                lambda p=pt: check_functional_equation(
                    p, trunc=config.series_trunc, tolerance=config.tolerance))
            producers.append(
                lambda p=pt: check_periodicity(p, trunc=config.series_trunc))
        return producers
    raise ValueError(f"unknown verify target {check!r}")


def run_lattice_suite(samples: int, seed: int) -> Dict[str, object]:
    """Randomized membership, closure, reflection, and coset-norm checks."""
    rng = random.Random(seed)
    failure: Optional[str] = None
    if inner_product(RHO, RHO) != 0:
        failure = "weyl vector norm is not zero"
    if failure is None:
        for i in range(samples):
            x = random_member(rng)
            y = random_member(rng)
            if not (is_member(x) and is_member(y) and is_member(x + y)
                    and is_member(x - y)):
                failure = f"closure violated at sample {i}"
                break
    if failure is None:
        spatial = list(range(25))
        for i in range(samples):
            a, b = rng.sample(spatial, 2)
            coords = [0] * 25
            coords[a] = rng.choice((1, -1))
            coords[b] = rng.choice((1, -1))
            root = LatticeVector.from_ints(coords, 0)
            x = random_member(rng)
            y = random_member(rng)
            rx, ry = reflect(root, x), reflect(root, y)
            if inner_product(rx, ry) != inner_product(x, y) \
                    or norm(rx) != norm(x):
                failure = f"reflection changed a pairing at sample {i}"
                break
            if not (is_member(rx) and is_member(ry)):
                failure = f"reflection left the lattice at sample {i}"
                break
    classes: List[LeechClass] = []
    if failure is None:
        seen = set()
        while len(classes) < min(samples, 50):
            c = LeechClass.of(random_rho_member(rng))
            if c not in seen:
                seen.add(c)
                classes.append(c)
        for i, a in enumerate(classes):
            for b in classes[i + 1:]:
                if class_difference_norm(a, b) < 4:
                    failure = "distinct cosets closer than norm 4"
                    break
            if failure:
                break
    return {
        "name": "lattice",
        "params": {"samples": samples, "seed": seed,
                   "distinct_classes": len(classes)},
        "equal": failure is None,
        "first_discrepancy": failure,
        "notes": ["membership, closure, reflection, and coset-norm checks"],
    }


def _affine_null_root(gcm) -> tuple:
    """Primitive positive kernel vector of an affine Cartan matrix.

    Deleting any node of an affine diagram leaves an invertible matrix,
    so the last coordinate is fixed to 1 and the rest solved exactly.
    """
    n = gcm.rank
    if n < 2:
        raise ValueError("affine matrices have rank at least 2")
    m = [[Fraction(gcm[i, j]) for j in range(n - 1)] for i in range(n - 1)]
    rhs = [-Fraction(gcm[i, n - 1]) for i in range(n - 1)]
    for col in range(n - 1):
        piv = next(r for r in range(col, n - 1) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for r in range(col + 1, n - 1):
            f = m[r][col] / m[col][col]
            for c in range(col, n - 1):
                m[r][c] -= f * m[col][c]
            rhs[r] -= f * rhs[col]
    x = [Fraction(0)] * (n - 1)
    for r in range(n - 2, -1, -1):
        tail = sum((m[r][c] * x[c] for c in range(r + 1, n - 1)), Fraction(0))
        x[r] = (rhs[r] - tail) / m[r][r]
    coords = x + [Fraction(1)]
    scale = 1
    for f in coords:
        scale = scale * f.denominator // gcd(scale, f.denominator)
    ints = [int(f * scale) for f in coords]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    if any(v <= 0 for v in ints):
        raise ValueError("kernel vector is not positive; matrix is not affine")
    return tuple(ints)


def _affine_null_multiplicities(gcm, cutoff: int):
    """Untwisted affine convention: each null layer kd carries
    multiplicity rank - 1."""
    delta_coords = _affine_null_root(gcm)
    ht = sum(delta_coords)
    return {tuple(k * c for c in delta_coords): gcm.rank - 1
            for k in range(1, cutoff // ht + 1)}


def _km_producers(args: argparse.Namespace,
                  config: RunConfig) -> List[Callable[[], object]]:
    with open(args.gcm, "r", encoding="utf-8") as fh:
        gcm = load_gcm(fh.read())
    cls = classify(gcm)
    if args.action == "denominator":
        cutoff = args.cutoff
        if cutoff is None and cls.label != "finite":
            cutoff = 12
        imag = None
        if cls.label == "affine":
            imag = _affine_null_multiplicities(gcm, cutoff)

        def produce():
            report = denominator_check(gcm, max_height=cutoff,
                                       imaginary_multiplicities=imag)
            data = _normalize(report)
            data["params"]["gcm"] = os.path.basename(args.gcm)
            return data

        return [produce]
    if args.action == "character":
        cutoff = args.cutoff if args.cutoff is not None else 12
        weight = list(args.weight)
        if any(w < 0 for w in weight):
            raise ValueError("dominant weight coordinates must be nonnegative")
        imag = None
        if cls.label == "affine":
            imag = _affine_null_multiplicities(gcm, cutoff)

        def produce():
            result = character(gcm, [-w for w in weight], cutoff,
                               imaginary_multiplicities=imag)
            dim = result.total_multiplicity()
            zero = result.weight_offsets.coeff((0,) * gcm.rank)
            return {
                "name": "character",
                "params": {"gcm": os.path.basename(args.gcm),
                           "weight": weight, "cutoff": cutoff,
                           "dimension": dim},
                "equal": zero == 1,
                "first_discrepancy": None if zero == 1
                else f"lowest weight multiplicity {zero}",
                "notes": list(result.notes),
            }

        return [produce]
    raise ValueError(f"unknown km action {args.action!r}")


def _moonshine_producers(args: argparse.Namespace,
                         config: RunConfig) -> List[Callable[[], object]]:
    known, target = args.known, args.target
    if args.data is not None:
        with open(args.data, "r", encoding="utf-8") as fh:
            data = load_thompson_data(fh.read())
    else:
        data = identity_element_data(known, max_power=5)

    def produce():
        result = solve_coefficients(data, known, target,
                                    max_iterations=args.max_iterations)
        recovered = {k: v for k, v in sorted(result.values.items())
                     if k <= target}
        ok = not result.underdetermined
        notes = [f"iterations: {result.iterations}"]
        if data.label == "1A":
            from .modforms import c_coefficient
            mismatches = [k for k, v in result.values.items()
                          if v != c_coefficient(k)]
            ok = ok and not mismatches
            notes.append("determined values checked against the exact "
                         "j-expansion: "
                         + ("all match" if not mismatches
                            else f"mismatch at {sorted(mismatches)}"))
        return {
            "name": "solve",
            "params": {"known_up_to": known, "target_up_to": target,
                       "determined": list(result.determined),
                       "underdetermined": list(result.underdetermined),
                       "recovered": recovered},
            "equal": ok,
            "first_discrepancy": None if ok else
            f"underdetermined: {list(result.underdetermined)}",
            "notes": notes,
        }

    return [produce]


def _modforms_producers(args: argparse.Namespace,
                        config: RunConfig) -> List[Callable[[], object]]:
    trunc = args.trunc

    def produce():
        table = modform_table(trunc)
        rows = [[n, table.c[n], table.p24.get(n, 0),
                 table.delta.coeff(n) if 0 <= n <= trunc else 0]
                for n in range(-1, trunc + 1)]
        return {
            "name": "modforms-table",
            "params": {"trunc": trunc, "columns": ["n", "c", "p24", "delta"],
                       "rows": rows},
            "equal": True,
            "first_discrepancy": None,
            "notes": ["c: j-expansion; p24: 24-colour partitions; "
                      "delta: discriminant"],
        }

    return [produce]


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qident",
        description="Exact verification of graded product expansions.")
    parser.add_argument("--format", choices=("text", "structured"),
                        default="text", help="report rendering")
    parser.add_argument("--no-timings", action="store_true",
                        help="omit timing fields for byte-identical output")
    sub = parser.add_subparsers(dest="command")

    verify = sub.add_parser("verify", help="run an identity verifier")
    vs = verify.add_subparsers(dest="check")
    for name in ("mid", "fmid"):
        p = vs.add_parser(name)
        p.add_argument("--p-trunc", type=int, dest="p_trunc")
        p.add_argument("--q-trunc", type=int, dest="q_trunc")
        p.add_argument("--corrupt", nargs=3, type=int,
                       metavar=("M", "N", "DELTA"),
                       help="perturb the (M,N) product exponent by DELTA")
    p = vs.add_parser("j-product")
    p.add_argument("--trunc", type=int, default=10,
                   help="number of product factors")
    p.add_argument("--corrupt", nargs=2, type=int, metavar=("N", "DELTA"),
                   help="perturb the degree-N exponent by DELTA")
    p = vs.add_parser("twisted")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--data", help="trace data file")
    group.add_argument("--class", dest="class_label",
                       help="bundled class label (1A)")
    p.add_argument("--p-trunc", type=int, dest="p_trunc")
    p.add_argument("--q-trunc", type=int, dest="q_trunc")
    p = vs.add_parser("phi")
    p.add_argument("--points", nargs="+",
                   help="imaginary parts as IM_SIGMA,IM_TAU pairs")
    p.add_argument("--series-trunc", type=int, dest="series_trunc")
    p.add_argument("--tolerance", type=float)

    lattice = sub.add_parser("lattice", help="lattice property suite")
    ls = lattice.add_subparsers(dest="action")
    p = ls.add_parser("check")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=2022)

    km = sub.add_parser("km", help="Cartan-matrix checks")
    ks = km.add_subparsers(dest="action")
    p = ks.add_parser("denominator")
    p.add_argument("--gcm", required=True, help="Cartan matrix file")
    p.add_argument("--cutoff", type=int, help="height cap")
    p = ks.add_parser("character")
    p.add_argument("--gcm", required=True, help="Cartan matrix file")
    p.add_argument("--weight", nargs="+", type=int, required=True,
                   help="dominant weight in fundamental-weight coordinates")
    p.add_argument("--cutoff", type=int, help="height cap")

    mo = sub.add_parser("moonshine", help="coefficient determination")
    ms = mo.add_subparsers(dest="action")
    p = ms.add_parser("solve")
    p.add_argument("--known", type=int, default=5)
    p.add_argument("--target", type=int, default=10)
    p.add_argument("--data", help="trace data file")
    p.add_argument("--max-iterations", type=int, default=50)

    mf = sub.add_parser("modforms", help="exact expansion tables")
    mfs = mf.add_subparsers(dest="action")
    p = mfs.add_parser("table")
    p.add_argument("--trunc", type=int, default=10)

    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        config = resolve_config(args)
        if args.command == "verify":
            if args.check is None:
                parser.print_usage(sys.stderr)
                return 2
            producers = _verify_producers(args, config)
        elif args.command == "lattice":
            if args.action != "check":
                parser.print_usage(sys.stderr)
                return 2
            producers = [lambda: run_lattice_suite(args.samples, args.seed)]
        elif args.command == "km":
            if args.action is None:
                parser.print_usage(sys.stderr)
                return 2
            producers = _km_producers(args, config)
        elif args.command == "moonshine":
            if args.action != "solve":
                parser.print_usage(sys.stderr)
                return 2
            producers = _moonshine_producers(args, config)
        elif args.command == "modforms":
            if args.action != "table":
                parser.print_usage(sys.stderr)
                return 2
            producers = _modforms_producers(args, config)
        else:
            parser.print_usage(sys.stderr)
            return 2
        return _run_reports(producers, config, out)
    except (IntegralityError, InconsistentSystemError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
