"""Command-line front end: evaluate, inspect constants, verify against MC.

Output is a single JSON object per invocation on stdout.  Exit codes:

* 0 - success (for ``verify``: the z-score is within ``--z-max``)
* 1 - verification failed (z-score exceeded)
* 2 - input error (bad flags, invalid group/rank, degenerate coordinates)

Apart from ``elapsed_ms`` (wall-clock timing), reports are bit-identical
across repeated runs with the same flags and seed.

Group names: U, SU, SO, O, Sp (alias USp) and Spin.  ``--rank N`` is the
Lie-theoretic rank; the orthogonal and spin groups default to the even
series SO(2N)/O(2N)/Spin(2N), and ``--odd`` selects SO(2N+1)/O(2N+1)/
Spin(2N+1).  Spin groups are evaluated through the special orthogonal
formulas (covering groups share their adjoint-orbit integrals), including
``verify``, where the Monte Carlo likewise samples SO(N).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Sequence

from .cartan import Family, GroupSpec
from .closedform import (
    DEFAULT_RANK_CAP,
    DegenerateSpectrum,
    EvalMethod,
    IntegralResult,
    ZeroCoordinate,
    determinant_integral,
    weyl_sum_integral,
)
from .haarmc import ExponentOverflow, mc_integral
from .sympoly import discriminant, discriminant_norm

__all__ = ["main", "RunReport", "parse_group"]

_SPIN_NOTE = "spin routed via SO: covering groups share adjoint-orbit integrals"


@dataclass
class RunReport:
    """One evaluation or verification run, JSON-serializable.

    ``z_score`` is |closed_form - mc_mean| / mc_stderr whenever the Monte
    Carlo fields are present.
    """

    group: str
    rank: int
    a: list[float]
    b: list[float]
    closed_form: float
    method: str
    mc_mean: float | None = None
    mc_stderr: float | None = None
    z_score: float | None = None
    seed: int | None = None
    elapsed_ms: int = 0

    def to_json(self) -> str:
        data = {
            "group": self.group,
            "rank": self.rank,
            "a": self.a,
            "b": self.b,
            "closed_form": self.closed_form,
            "method": self.method,
        }
        if self.mc_mean is not None:
            data["mc_mean"] = self.mc_mean
            data["mc_stderr"] = self.mc_stderr
            data["z_score"] = self.z_score
            data["seed"] = self.seed
        data["elapsed_ms"] = self.elapsed_ms
        return json.dumps(data)


def parse_group(name: str, rank: int, odd: bool) -> tuple[GroupSpec, bool]:
    """Map a CLI group token to a GroupSpec; returns (spec, is_spin)."""
    token = name.strip().upper()
    if token == "U":
        return GroupSpec(Family.UNITARY_A, rank), False
    if token == "SU":
        return GroupSpec(Family.SPECIAL_UNITARY_A, rank), False
    if token in ("SP", "USP"):
        return GroupSpec(Family.SYMPLECTIC_C, rank), False
    if token in ("SO", "SPIN"):
        fam = (
            Family.SPECIAL_ORTHOGONAL_ODD_B if odd else Family.SPECIAL_ORTHOGONAL_EVEN_D
        )
        return GroupSpec(fam, rank), token == "SPIN"
    if token == "O":
        fam = Family.ORTHOGONAL_ODD_B if odd else Family.ORTHOGONAL_EVEN_D
        return GroupSpec(fam, rank), False
    raise ValueError(
        f"unknown group {name!r}: expected one of U, SU, SO, O, Sp, USp, Spin"
    )


def _parse_coords(text: str, name: str) -> tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ValueError(f"could not parse --{name} {text!r}: {exc}") from None
    if not values:
        raise ValueError(f"--{name} must list at least one coordinate")
    return values


def _display_group(spec: GroupSpec, is_spin: bool) -> str:
    if is_spin:
        return f"Spin({spec.matrix_dim})"
    return spec.describe()


def _rank_cap() -> int:
    raw = os.environ.get("HC_MAX_RANK")
    if raw is None:
        return DEFAULT_RANK_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"HC_MAX_RANK must be an integer, got {raw!r}") from None


def _closed_form(
    spec: GroupSpec, a: Sequence[float], b: Sequence[float], method: str
) -> IntegralResult:
    if method == "weyl":
        return weyl_sum_integral(spec, a, b, rank_cap=_rank_cap())
    return determinant_integral(spec, a, b)


def _method_label(result: IntegralResult, is_spin: bool) -> str:
    label = result.method.value
    if is_spin:
        label += f" [{_SPIN_NOTE}]"
    return label


def _cmd_eval(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    spec, is_spin = parse_group(args.group, args.rank, args.odd)
    a = _parse_coords(args.a, "a")
    b = _parse_coords(args.b, "b")
    result = _closed_form(spec, a, b, args.method)
    report = RunReport(
        group=_display_group(spec, is_spin),
        rank=spec.rank,
        a=list(a),
        b=list(b),
        closed_form=result.value,
        method=_method_label(result, is_spin),
        elapsed_ms=int(round((time.perf_counter() - t0) * 1000)),
    )
    print(report.to_json())
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    spec, is_spin = parse_group(args.group, args.rank, args.odd)
    pi = discriminant(spec)
    data = {
        "group": _display_group(spec, is_spin),
        "rank": spec.rank,
        "components": spec.components,
        "weyl_order": spec.weyl_order,
        "positive_roots": spec.num_positive_roots,
        "pi_pi": str(discriminant_norm(spec)),
        "pi_terms": len(pi),
    }
    print(json.dumps(data))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    spec, is_spin = parse_group(args.group, args.rank, args.odd)
    a = _parse_coords(args.a, "a")
    b = _parse_coords(args.b, "b")
    result = _closed_form(spec, a, b, args.method)
    estimate = mc_integral(
        spec, a, b, args.samples, args.seed, shards=args.shards
    )
    diff = abs(result.value - estimate.mean)
    if estimate.stderr > 0.0:
        z = diff / estimate.stderr
    else:
        z = 0.0 if diff == 0.0 else float("inf")
    report = RunReport(
        group=_display_group(spec, is_spin),
        rank=spec.rank,
        a=list(a),
        b=list(b),
        closed_form=result.value,
        method=_method_label(result, is_spin),
        mc_mean=estimate.mean,
        mc_stderr=estimate.stderr,
        z_score=z,
        seed=args.seed,
        elapsed_ms=int(round((time.perf_counter() - t0) * 1000)),
    )
    print(report.to_json())
    return 0 if z <= args.z_max else 1


def _add_group_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", required=True, help="U, SU, SO, O, Sp, USp or Spin")
    p.add_argument("--rank", required=True, type=int, help="Lie-theoretic rank N")
    p.add_argument(
        "--odd",
        action="store_true",
        help="select the odd series SO(2N+1)/O(2N+1)/Spin(2N+1)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitint",
        description="Adjoint-orbit integrals over compact classical groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate the closed form")
    _add_group_flags(p_eval)
    p_eval.add_argument("--a", required=True, help="comma-separated coordinates")
    p_eval.add_argument("--b", required=True, help="comma-separated coordinates")
    p_eval.add_argument(
        "--method", choices=("weyl", "det"), default="det",
        help="Weyl-group sum or determinant formula (default det)",
    )
    p_eval.set_defaults(func=_cmd_eval)

    p_const = sub.add_parser(
        "constants", help="Weyl order, root count and the pairing norm of Pi"
    )
    _add_group_flags(p_const)
    p_const.set_defaults(func=_cmd_constants)

    p_verify = sub.add_parser(
        "verify", help="closed form vs seeded Haar Monte Carlo"
    )
    _add_group_flags(p_verify)
    p_verify.add_argument("--a", required=True)
    p_verify.add_argument("--b", required=True)
    p_verify.add_argument(
        "--method", choices=("weyl", "det"), default="det"
    )
    p_verify.add_argument("--samples", type=int, default=100_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--shards", type=int, default=1)
    p_verify.add_argument(
        "--z-max", type=float, default=4.0, dest="z_max",
        help="largest acceptable |closed_form - mc_mean| / mc_stderr",
    )
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches our contract.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DegenerateSpectrum, ZeroCoordinate, ExponentOverflow, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
