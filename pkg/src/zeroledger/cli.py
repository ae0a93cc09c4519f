"""Command-line front end: table reproduction, case certification,
frontier search over delta, and direct expression evaluation.

Exit codes: 0 success, 1 reproduction or certification failure,
2 infeasibility or domain error, 3 degenerate frontier search.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .density import (
    BoundParams,
    b0,
    b_bound,
    optimize_t_exponential,
    t_bound_staircase,
)
from .errors import (
    DomainError,
    InfeasibleParametersError,
    NoFeasiblePointError,
)
from .kernel import KernelContext, eval_g, laplace_G, psi_quantities
from .ledger import VerificationReport, delta_search, verify_all
from .rbound import HeadScenario, optimize_r
from .tables import BoundBook, reproduce_tables

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DOMAIN = 2
EXIT_DEGENERATE = 3

FORMATS = ("json", "csv", "markdown")


@dataclass
class RunConfig:
    delta: float = 0.291
    c0: float = 0.01
    eps_num: float = 1e-9
    grid_points: int = 201
    output_format: str = "json"
    out_path: Optional[str] = None
    parallel: bool = False

    def validate(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not self.c0 > 0.0:
            raise DomainError(f"c0 must be positive, got {self.c0!r}")
        if not self.eps_num >= 0.0:
            raise DomainError(f"eps_num must be >= 0, got {self.eps_num!r}")
        if self.grid_points < 51 or self.grid_points % 2 == 0:
            raise DomainError(
                f"grid_points must be odd and >= 51, got {self.grid_points!r}"
            )
        if self.output_format not in FORMATS:
            raise DomainError(
                f"format must be one of {FORMATS}, got {self.output_format!r}"
            )


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise DomainError(f"expected a boolean, got {text!r}")


_CONFIG_PARSERS = {
    "delta": float,
    "c0": float,
    "eps_num": float,
    "grid_points": int,
    "format": str,
    "out": str,
    "parallel": _parse_bool,
}


def load_config_file(path: str) -> dict:
    """Plain "key = value" lines; # starts a comment; later keys win."""
    updates: dict = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key or not value:
                raise DomainError(f"{path}:{line_no}: expected 'key = value'")
            if key not in _CONFIG_PARSERS:
                raise DomainError(f"{path}:{line_no}: unknown key {key!r}")
            try:
                updates[key] = _CONFIG_PARSERS[key](value)
            except ValueError as exc:
                raise DomainError(f"{path}:{line_no}: {exc}") from exc
    return updates


def _build_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(ns, "config", None):
        updates = load_config_file(ns.config)
        if "delta" in updates:
            cfg.delta = updates["delta"]
        if "c0" in updates:
            cfg.c0 = updates["c0"]
        if "eps_num" in updates:
            cfg.eps_num = updates["eps_num"]
        if "grid_points" in updates:
            cfg.grid_points = updates["grid_points"]
        if "format" in updates:
            cfg.output_format = updates["format"]
        if "out" in updates:
            cfg.out_path = updates["out"]
        if "parallel" in updates:
            cfg.parallel = updates["parallel"]
    if getattr(ns, "delta", None) is not None:
        cfg.delta = ns.delta
    if getattr(ns, "c0", None) is not None:
        cfg.c0 = ns.c0
    if getattr(ns, "eps_num", None) is not None:
        cfg.eps_num = ns.eps_num
    if getattr(ns, "grid", None) is not None:
        cfg.grid_points = ns.grid
    if getattr(ns, "format", None) is not None:
        cfg.output_format = ns.format
    if getattr(ns, "out", None) is not None:
        cfg.out_path = ns.out
    if getattr(ns, "parallel", None) is not None:
        cfg.parallel = ns.parallel
    cfg.validate()
    return cfg


def _thread_cap() -> Optional[int]:
    raw = os.environ.get("ZL_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"ZL_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError(f"ZL_THREADS must be >= 1, got {value}")
    return value


def _resolve_threads(parallel: bool) -> Optional[int]:
    cap = _thread_cap()
    if cap is not None:
        return cap
    if parallel:
        return os.cpu_count() or 1
    return None


def _fmt(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return f"{value:.10g}"


def _fmt_margin(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return f"{value:.9e}"


def render_report(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_json_dict(), indent=2) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    return _render_markdown(report)


def _table_status(row) -> str:
    if not row.feasible:
        return "infeasible"
    return "pass" if row.reproduced else "fail"


def _cert_status(cert) -> str:
    if not math.isfinite(cert.sum_bound):
        return "infeasible"
    return "pass" if cert.passed else "fail"


def _cert_margin(cert) -> Optional[float]:
    if cert.paper_value is None or not math.isfinite(cert.sum_bound):
        return None
    return cert.paper_value - cert.sum_bound


def _render_csv(report: VerificationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["kind", "id", "paper", "computed", "margin", "status"])
    for row in report.table_reproductions:
        writer.writerow(
            [
                "table",
                row.row_id,
                _fmt(row.paper),
                _fmt(row.computed if row.feasible else None),
                _fmt_margin(row.margin if row.feasible else None),
                _table_status(row),
            ]
        )
    for cert in report.case_certificates:
        slug = cert.subcase.replace(",", "").replace(" ", "-")
        writer.writerow(
            [
                "case",
                f"case{cert.case_id}:{slug}",
                _fmt(cert.paper_value),
                _fmt(cert.sum_bound if math.isfinite(cert.sum_bound) else None),
                _fmt_margin(_cert_margin(cert)),
                _cert_status(cert),
            ]
        )
    return buffer.getvalue()


def _render_markdown(report: VerificationReport) -> str:
    lines = ["# Verification report", ""]
    lines.append(f"- delta = {_fmt(report.delta)}")
    lines.append(f"- c0 = {_fmt(report.c0)}")
    if report.c1 is not None and math.isfinite(report.c1):
        lines.append(f"- c1 = {_fmt(report.c1)}")
    if report.overall_pass is not None:
        lines.append(f"- overall: {'pass' if report.overall_pass else 'fail'}")
    if report.table_reproductions:
        lines += [
            "",
            "## Table reproduction",
            "",
            "| id | paper | computed | margin | status |",
            "| --- | --- | --- | --- | --- |",
        ]
        for row in report.table_reproductions:
            lines.append(
                f"| {row.row_id} | {_fmt(row.paper)} | "
                f"{_fmt(row.computed if row.feasible else None)} | "
                f"{_fmt_margin(row.margin if row.feasible else None)} | "
                f"{_table_status(row)} |"
            )
    if report.case_certificates:
        lines += [
            "",
            "## Case certificates",
            "",
            "| case | subcase | bound | paper | margin | status |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        for cert in report.case_certificates:
            lines.append(
                f"| {cert.case_id} | {cert.subcase} | "
                f"{_fmt(cert.sum_bound if math.isfinite(cert.sum_bound) else None)} | "
                f"{_fmt(cert.paper_value)} | {_fmt_margin(_cert_margin(cert))} | "
                f"{_cert_status(cert)} |"
            )
        notes = [
            cert for cert in report.case_certificates if cert.discrepancy is not None
        ]
        if notes:
            lines.append("")
            for cert in notes:
                lines.append(
                    f"- case {cert.case_id} ({cert.subcase}): {cert.discrepancy}"
                )
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify_tables(cfg: RunConfig) -> int:
    book = BoundBook(cfg.delta, cfg.grid_points)
    rows = reproduce_tables(
        book, parallel=cfg.parallel, threads=_resolve_threads(cfg.parallel)
    )
    report = VerificationReport(
        delta=cfg.delta,
        c0=cfg.c0,
        table_reproductions=tuple(rows),
        case_certificates=(),
        c1=None,
        overall_pass=None,
    )
    _emit(render_report(report, cfg.output_format), cfg.out_path)
    if any(not row.feasible for row in rows):
        return EXIT_DOMAIN
    if any(not row.reproduced for row in rows):
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify_cases(cfg: RunConfig) -> int:
    report = verify_all(
        cfg.delta,
        cfg.c0,
        eps_num=cfg.eps_num,
        grid_points=cfg.grid_points,
        include_tables=False,
    )
    _emit(render_report(report, cfg.output_format), cfg.out_path)
    if report.c1 is None:
        return EXIT_DOMAIN
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def cmd_search_delta(cfg: RunConfig, lo: float, hi: float, tol: float) -> int:
    delta_min, trace = delta_search(
        lo, hi, tol, cfg.c0, eps_num=cfg.eps_num, grid_points=cfg.grid_points
    )
    if cfg.output_format == "json":
        doc = {
            "delta_min": delta_min if math.isfinite(delta_min) else None,
            "trace": trace,
        }
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out_path)
    else:
        lines = []
        for probe, ok in trace["probes"]:
            lines.append(f"probe delta={probe:.10g}: {'pass' if ok else 'fail'}")
        lines.append(f"status: {trace['status']}")
        lines.append(f"monotone: {trace['monotone']}")
        lines.append(f"delta_min = {_fmt(delta_min) or 'none'}")
        _emit("\n".join(lines) + "\n", cfg.out_path)
    return EXIT_OK if trace["status"] == "bracketed" else EXIT_DEGENERATE


_EVAL_ARITY = {
    "g": 1,
    "G": 1,
    "B0": 2,
    "B": 4,
    "psi": 3,
    "xi": 2,
    "Texp": 3,
    "Tstair": 3,
    "Rgen": 5,
    "Rres": 5,
}


def evaluate_expression(name: str, args: list[float]) -> float:
    if name not in _EVAL_ARITY:
        raise DomainError(
            f"unknown expression {name!r}; choose from {sorted(_EVAL_ARITY)}"
        )
    arity = _EVAL_ARITY[name]
    if len(args) != arity:
        raise DomainError(f"{name} takes {arity} argument(s), got {len(args)}")
    if name == "g":
        return eval_g(args[0])
    if name == "G":
        return laplace_G(args[0])
    if name == "B0":
        return b0(args[0], args[1])
    if name == "B":
        params = BoundParams(x=args[0], y=args[1], z=args[2], restricted=True)
        return b_bound(params, args[3])
    if name == "psi":
        ctx = KernelContext(args[0], args[1])
        return psi_quantities(ctx, args[2]).psi_cap
    if name == "xi":
        ctx = KernelContext(args[0], args[1])
        return psi_quantities(ctx, args[1]).xi
    if name == "Texp":
        restricted = bool(int(args[2]))
        return optimize_t_exponential(args[0], args[1], restricted=restricted).bound
    if name == "Tstair":
        return t_bound_staircase(args[0], args[1], args[2]).bound
    scenario = HeadScenario(
        Lambda=args[1],
        lambda1=args[2],
        lambda2=args[3],
        lambda_star=args[4],
        restricted=(name == "Rres"),
    )
    return optimize_r(args[0], scenario).bound


def cmd_eval(cfg: RunConfig, name: str, args: list[float]) -> int:
    value = evaluate_expression(name, args)
    _emit(f"{value:.10g}\n", cfg.out_path)
    return EXIT_OK


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, default=None, help="decay parameter")
    parser.add_argument("--c0", type=float, default=None, help="smallest-zero floor")
    parser.add_argument(
        "--eps-num", type=float, default=None, dest="eps_num", help="numeric guard"
    )
    parser.add_argument(
        "--grid", type=int, default=None, help="staircase grid points (odd, >= 51)"
    )
    parser.add_argument("--format", choices=FORMATS, default=None)
    parser.add_argument("--out", default=None, help="write output to PATH")
    parser.add_argument("--config", default=None, help="key = value config file")
    parser.add_argument(
        "--parallel", action="store_true", default=None, help="parallel table rows"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeroledger",
        description="certified bound reproduction and case verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tables = sub.add_parser("verify-tables", help="reproduce every tabulated bound")
    _add_common_flags(p_tables)

    p_cases = sub.add_parser("verify-cases", help="certify the six-case ledger")
    _add_common_flags(p_cases)

    p_search = sub.add_parser("search-delta", help="bisect the feasibility frontier")
    _add_common_flags(p_search)
    p_search.add_argument("lo", type=float)
    p_search.add_argument("hi", type=float)
    p_search.add_argument("tol", type=float)

    p_eval = sub.add_parser("eval", help="evaluate one bound expression")
    _add_common_flags(p_eval)
    p_eval.add_argument("expr")
    p_eval.add_argument("args", nargs="*", type=float)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _build_config(ns)
        if ns.command == "verify-tables":
            return cmd_verify_tables(cfg)
        if ns.command == "verify-cases":
            return cmd_verify_cases(cfg)
        if ns.command == "search-delta":
            return cmd_search_delta(cfg, ns.lo, ns.hi, ns.tol)
        return cmd_eval(cfg, ns.expr, ns.args)
    except (DomainError, InfeasibleParametersError, NoFeasiblePointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
