"""Command-line front end: compute | verify | zeros | limit."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .analysis import LimitScan, isolate_roots, limit_scan, positive_root_count, render_decimal
from .checks import CHECK_NAMES, CheckResult, run_check
from .operators import CONVENTIONS
from .qlattice import Poly, QContext
from .rodrigues import RodriguesTranscriptionError, rodrigues_classical, rodrigues_q
from .solver import MultiIndex, NormalityError, solve_type2_classical, solve_type2_q
from .weights import ClassicalParams, KravchukParams, validate

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2, 3

CONVENTION_CHOICES = {
    "operand-degree": ("operand-degree",),
    "fixed-norm": ("fixed-norm",),
    "shifted-norm": ("shifted-norm",),
    "both": ("operand-degree", "fixed-norm"),
    "all": CONVENTIONS,
}

# Config-file keys and the attribute each one feeds.
CONFIG_KEYS = {
    "family", "v", "p", "beta", "N", "index", "format", "out", "checks",
    "convention", "form", "precision", "delta", "steps", "perturb",
}


class ConfigError(ValueError):
    """Invalid user input; the message names the offending field."""


@dataclass
class JobConfig:
    command: str
    family: str = "q"
    v: Fraction | None = None
    p: tuple[Fraction, ...] = ()
    beta: tuple[Fraction, ...] | None = None
    N: int | None = None
    index: MultiIndex | None = None
    fmt: str = "json"
    out: Path | None = None
    checks: tuple[str, ...] = CHECK_NAMES
    conventions: tuple[str, ...] = CONVENTIONS
    form: str = "literal"
    precision: int = 12
    delta: Fraction | None = None
    steps: int | None = None
    perturb: tuple[int, Fraction] | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    def q_params(self) -> KravchukParams:
        beta = self.beta if self.beta is not None else tuple(1 - a for a in self.p)
        if len(beta) != len(self.p):
            raise ConfigError(f"beta: expected {len(self.p)} entries, got {len(beta)}")
        try:
            ctx = QContext(self.v)
        except ValueError as exc:
            raise ConfigError(f"v: {exc}") from exc
        params = KravchukParams(ctx, self.p, beta, self.N)
        _raise_on(validate(params).violations)
        return params

    def classical_params(self) -> ClassicalParams:
        params = ClassicalParams(self.p, self.N)
        _raise_on(validate(params).violations)
        return params

    def params(self) -> KravchukParams | ClassicalParams:
        return self.q_params() if self.family == "q" else self.classical_params()

    def echo(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family, "p": [str(a) for a in self.p], "N": self.N}
        if self.family == "q":
            out["v"] = str(self.v)
            beta = self.beta if self.beta is not None else tuple(1 - a for a in self.p)
            out["beta"] = [str(b) for b in beta]
        out["index"] = list(self.index) if self.index is not None else None
        return out


def _raise_on(violations: Sequence[str]) -> None:
    if violations:
        raise ConfigError("; ".join(violations))


def _fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} as an exact rational") from exc


def _fraction_list(text: str, name: str) -> tuple[Fraction, ...]:
    items = [t for t in text.replace(" ", "").split(",") if t]
    if not items:
        raise ConfigError(f"{name}: empty list")
    return tuple(_fraction(t, f"{name}[{k}]") for k, t in enumerate(items, start=1))


def _int(text: str, name: str, minimum: int | None = None) -> int:
    try:
        value = int(str(text).strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: {text!r} is not an integer") from exc
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name}: must be at least {minimum}, got {value}")
    return value


def read_config_file(path: Path) -> dict[str, str]:
    """key=value lines; blank lines and '#' comments are ignored."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"config: unknown key {key!r} on line {lineno}")
        out[key] = value
    return out


def build_config(args: argparse.Namespace) -> JobConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw.update(read_config_file(Path(args.config)))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = str(value)

    cfg = JobConfig(command=args.command)
    cfg.family = raw.get("family", "q")
    if cfg.family not in ("q", "classical"):
        raise ConfigError(f"family: expected 'q' or 'classical', got {cfg.family!r}")
    if "p" not in raw:
        raise ConfigError("p: required")
    cfg.p = _fraction_list(raw["p"], "p")
    if "N" not in raw:
        raise ConfigError("N: required")
    cfg.N = _int(raw["N"], "N", minimum=0)
    if cfg.family == "q" and args.command != "limit":
        if "v" not in raw:
            raise ConfigError("v: required for the q family")
        cfg.v = _fraction(raw["v"], "v")
    if "beta" in raw:
        cfg.beta = _fraction_list(raw["beta"], "beta")
    if "index" not in raw:
        raise ConfigError("index: required")
    entries = [t for t in raw["index"].replace(" ", "").split(",") if t]
    cfg.index = MultiIndex(_int(t, f"index[{k}]", minimum=0) for k, t in enumerate(entries, start=1))
    if len(cfg.index) != len(cfg.p):
        raise ConfigError(f"index: expected {len(cfg.p)} entries to match p, got {len(cfg.index)}")
    if cfg.index.norm > cfg.N:
        raise ConfigError(f"index: |n| = {cfg.index.norm} exceeds N = {cfg.N}")
    cfg.fmt = raw.get("format", "json")
    if cfg.fmt not in ("json", "csv"):
        raise ConfigError(f"format: expected json or csv, got {cfg.fmt!r}")
    cfg.out = Path(raw["out"]) if raw.get("out") else None
    if "checks" in raw:
        names = tuple(t for t in raw["checks"].replace(" ", "").split(",") if t)
        if names == ("all",):
            names = CHECK_NAMES
        unknown = [t for t in names if t not in CHECK_NAMES]
        if unknown or not names:
            raise ConfigError(f"checks: unknown entries {unknown}; choose from {', '.join(CHECK_NAMES)} or all")
        cfg.checks = names
    if "convention" in raw:
        if raw["convention"] not in CONVENTION_CHOICES:
            raise ConfigError(f"convention: expected one of {', '.join(CONVENTION_CHOICES)}")
        cfg.conventions = CONVENTION_CHOICES[raw["convention"]]
    cfg.form = raw.get("form", "literal")
    if cfg.form not in ("literal", "corrected"):
        raise ConfigError(f"form: expected literal or corrected, got {cfg.form!r}")
    if "precision" in raw:
        cfg.precision = _int(raw["precision"], "precision", minimum=1)
    if args.command == "limit":
        cfg.delta = _fraction(raw.get("delta", "1/8"), "delta")
        if cfg.delta <= 0:
            raise ConfigError(f"delta: must be positive, got {cfg.delta}")
        cfg.steps = _int(raw.get("steps", "5"), "steps", minimum=1)
    if raw.get("perturb"):
        if ":" not in raw["perturb"]:
            raise ConfigError("perturb: expected POWER:AMOUNT")
        power, amount = raw["perturb"].split(":", 1)
        cfg.perturb = (_int(power, "perturb", minimum=0), _fraction(amount, "perturb"))
    return cfg


def worker_count() -> int:
    raw = os.environ.get("QORTHO_NUM_WORKERS")
    if raw is None or raw == "":
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"QORTHO_NUM_WORKERS: {raw!r} is not a positive integer") from exc
    if value < 1:
        raise ConfigError(f"QORTHO_NUM_WORKERS: {raw!r} is not a positive integer")
    return value


# -- commands -----------------------------------------------------------------


@dataclass
class Outcome:
    payload: dict[str, Any]
    table: list[list[str]] | None
    code: int


def _solve(cfg: JobConfig, params: KravchukParams | ClassicalParams) -> Poly:
    if isinstance(params, KravchukParams):
        return solve_type2_q(params, cfg.index)
    return solve_type2_classical(params, cfg.index)


def cmd_compute(cfg: JobConfig) -> Outcome:
    params = cfg.params()
    K = _solve(cfg, params)
    checks: dict[str, Any] = {}
    code = EXIT_OK
    try:
        if isinstance(params, KravchukParams):
            rod = rodrigues_q(params, cfg.index, "corrected")
            try:
                checks["literal_rodrigues_agrees"] = rodrigues_q(params, cfg.index, "literal").poly == K
            except RodriguesTranscriptionError:
                checks["literal_rodrigues_agrees"] = False
        else:
            rod = rodrigues_classical(params, cfg.index)
        agree = rod.poly == K
        checks["rodrigues_raw_leading"] = str(rod.raw_leading)
    except RodriguesTranscriptionError as exc:
        agree = False
        checks["rodrigues_error"] = str(exc)
    checks["agreement"] = agree
    if not agree:
        code = EXIT_INCONSISTENT
    result = {"coefficients": K.to_strings(), "degree": K.degree}
    table = [["power", "coefficient"]] + [[str(k), c] for k, c in enumerate(K.to_strings())]
    return Outcome(_envelope(cfg, result, checks), table, code)


def _run_one(job: tuple[str, Any, tuple[int, ...], str, tuple[str, ...], Poly | None]) -> CheckResult:
    name, params, n, form, conventions, K = job
    return run_check(name, params, n, form, conventions, K)


def cmd_verify(cfg: JobConfig) -> Outcome:
    if cfg.fmt == "csv":
        raise ConfigError("format: verify reports are JSON only")
    params = cfg.params()
    override = None
    if cfg.perturb is not None:
        power, amount = cfg.perturb
        base = _solve(cfg, params)
        override = base + Poly([0] * power + [amount])
    jobs = [
        (name, params, tuple(cfg.index), cfg.form, cfg.conventions, override if name in ("orthogonality", "zeros") else None)
        for name in cfg.checks
    ]
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]
    checks = {r.name: r.to_json() for r in results}
    failed = [r.name for r in results if r.failed]
    result: dict[str, Any] = {"failed": failed, "all_passed": not failed}
    diffeq = next((r for r in results if r.name == "diffeq"), None)
    if diffeq is not None and "adjudicated" in diffeq.detail:
        result["adjudicated_convention"] = diffeq.detail["adjudicated"]
    return Outcome(_envelope(cfg, result, checks), None, EXIT_CHECK_FAILED if failed else EXIT_OK)


def cmd_zeros(cfg: JobConfig) -> Outcome:
    params = cfg.params()
    K = _solve(cfg, params)
    if K.degree == 0:
        intervals: list[list[str]] = []
        decimals: list[str] = []
        count = 0
    else:
        report = isolate_roots(K, cfg.precision)
        intervals = [[str(lo), str(hi)] for lo, hi in report.isolating_intervals]
        decimals = list(report.decimal_approximations)
        count = positive_root_count(K)
    ok = count == cfg.index.norm
    result = {
        "count_positive": count,
        "isolating_intervals": intervals,
        "decimal_approximations": decimals,
        "precision": cfg.precision,
    }
    table = [["root", "lo", "hi", "decimal"]] + [
        [str(k), lo, hi, d] for k, ((lo, hi), d) in enumerate(zip(intervals, decimals), start=1)
    ]
    return Outcome(_envelope(cfg, result, {"count_matches_degree": ok}), table, EXIT_OK if ok else EXIT_CHECK_FAILED)


def cmd_limit(cfg: JobConfig) -> Outcome:
    cparams = cfg.classical_params()
    scan: LimitScan = limit_scan(cparams, cfg.index, cfg.delta, cfg.steps)
    in_band = scan.ratios_in_band(3)
    decreasing = scan.strictly_decreasing()
    informational = len(scan.ratios) == 0
    ratios = [None] + [str(r) for r in scan.ratios]
    rows = [
        {
            "k": k,
            "v": str(v),
            "deviation": str(d),
            "ratio": r,
            "ratio_decimal": None if r is None else render_decimal(Fraction(r), 6),
        }
        for k, (v, d, r) in enumerate(zip(scan.v_sequence, scan.deviations, ratios), start=1)
    ]
    result = {"rows": rows, "ratio_band": ["17/10", "23/10"], "informational": informational}
    checks = {"ratios_in_band_last_3": in_band, "deviations_strictly_decreasing": decreasing}
    table = [["k", "v", "deviation", "ratio", "ratio_decimal"]] + [
        [str(r["k"]), r["v"], r["deviation"], r["ratio"] or "", r["ratio_decimal"] or ""] for r in rows
    ]
    ok = informational or (in_band and decreasing)
    return Outcome(_envelope(cfg, result, checks), table, EXIT_OK if ok else EXIT_CHECK_FAILED)


def _envelope(cfg: JobConfig, result: dict[str, Any], checks: dict[str, Any]) -> dict[str, Any]:
    params = cfg.echo()
    if cfg.command == "limit":
        params.pop("v", None)
        params.pop("beta", None)
        params.update({"delta": str(cfg.delta), "steps": cfg.steps})
    meta: dict[str, Any] = {"command": cfg.command, "version": __version__}
    if cfg.command == "verify":
        meta.update({"form": cfg.form, "conventions": list(cfg.conventions), "checks": list(cfg.checks)})
    if cfg.command == "compute" and cfg.family == "q":
        meta["rodrigues_form"] = "corrected"
    if cfg.family == "q" and cfg.v is not None:
        warnings = validate(cfg.q_params()).warnings
        if warnings:
            meta["warnings"] = warnings
    return {"params": params, "result": result, "checks": checks, "meta": meta}


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "zeros": cmd_zeros, "limit": cmd_limit}


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qortho", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qortho {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--family", choices=("q", "classical"))
    shared.add_argument("--v", help="deformation v = q^(1/2) as NUM/DEN")
    shared.add_argument("--p", help="comma-separated p_i")
    shared.add_argument("--beta", help="comma-separated beta_i (default 1 - p_i)")
    shared.add_argument("--N", help="support size parameter")
    shared.add_argument("--index", help="comma-separated multi-index")
    shared.add_argument("--format", choices=("json", "csv"))
    shared.add_argument("--out", help="write output here instead of stdout")
    shared.add_argument("--config", help="key=value config file; flags win")

    sub.add_parser("compute", parents=[shared], help="monic polynomial with a Rodrigues cross-check")
    verify = sub.add_parser("verify", parents=[shared], help="run identity checks")
    verify.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECK_NAMES)} or all")
    verify.add_argument("--convention", choices=tuple(CONVENTION_CHOICES))
    verify.add_argument("--form", choices=("literal", "corrected"))
    verify.add_argument("--perturb", help="POWER:AMOUNT added to the solved polynomial (test fixture)")
    zeros = sub.add_parser("zeros", parents=[shared], help="isolate real zeros")
    zeros.add_argument("--precision", help="decimal digits")
    limit = sub.add_parser("limit", parents=[shared], help="q -> 1 convergence scan")
    limit.add_argument("--delta", help="v_k = 1 + delta 2^-k")
    limit.add_argument("--steps", help="number of scan points")
    return parser


def _render(outcome: Outcome, fmt: str) -> str:
    if fmt == "csv":
        if outcome.table is None:
            raise ConfigError("format: csv is not available for this command")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(outcome.table)
        return buf.getvalue()
    return json.dumps(outcome.payload, indent=2, ensure_ascii=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        outcome = COMMANDS[cfg.command](cfg)
        text = _render(outcome, cfg.fmt)
    except ConfigError as exc:
        print(f"qortho: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NormalityError as exc:
        print(f"qortho: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return outcome.code


if __name__ == "__main__":
    raise SystemExit(main())
