"""Command-line front end.

    exponentia [--config FILE] awgn rate-curve|se|asymptotes [options]
    exponentia [--config FILE] fading report|rate-curve [options]
    exponentia [--config FILE] verify [--json] [--quad-order N]

Flags override values from the JSON config file. Exit codes: 0 success,
1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fading as fd
from . import wideband_awgn as wa
from .constellation import Constellation, PeakConstraint, SignalingScheme
from .errors import ExponentiaError
from .quadrature import DEFAULT_HERMITE_ORDER, DEFAULT_LAGUERRE_ORDER, hermite_rule, laguerre_rule
from .verification import CRITERIA, VerifyContext, render_json, render_text, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GRID_DEFAULTS = {"awgn": (64.0, 16384.0, 2.0), "fading": (64.0, 1024.0, 2.0)}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    scheme: str = "qpsk"
    P: float = 1.0
    z: float = 0.1
    T_c: float = 1.0
    blocks_B: int = 1
    grid_start: float | None = None
    grid_stop: float | None = None
    grid_ratio: float | None = None
    quad_order: int = DEFAULT_HERMITE_ORDER
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER
    k_m: float = 10.0
    peak_exponent: float = 0.25
    output: str | None = None
    seed: int = 0
    threads: int | None = None
    json: bool = False
    exponent_points: int = 101
    only: str | None = None

    def validate(self) -> None:
        for name in ("P", "T_c"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if int(self.blocks_B) != self.blocks_B or self.blocks_B < 1:
            raise UsageError("blocks_B must be a positive integer")
        if self.quad_order < 2 or self.laguerre_order < 2:
            raise UsageError("quadrature orders must be at least 2")
        if self.threads is not None and self.threads < 1:
            raise UsageError("threads must be positive")
        if self.output not in (None, "-") and not Path(self.output).resolve().parent.is_dir():
            raise UsageError(f"output directory for {self.output!r} does not exist")

    def grid(self, family: str) -> list[float]:
        """Increasing geometric grid of bandwidths (AWGN B or fading W_c)."""
        start, stop, ratio = GRID_DEFAULTS[family]
        start = start if self.grid_start is None else self.grid_start
        stop = stop if self.grid_stop is None else self.grid_stop
        ratio = ratio if self.grid_ratio is None else self.grid_ratio
        if not (start > 0 and stop >= start and ratio > 1):
            raise UsageError("grid needs 0 < start <= stop and ratio > 1")
        n = int(math.floor(math.log(stop / start) / math.log(ratio) + 1e-9))
        return [start * ratio**k for k in range(n + 1)]

    def signaling(self) -> SignalingScheme:
        peak = PeakConstraint(self.k_m, self.peak_exponent)
        name = self.scheme.lower()
        if name == "qpsk":
            return SignalingScheme.qpsk(peak)
        if name == "bpsk":
            return SignalingScheme.bpsk(peak)
        try:
            return SignalingScheme.custom(Constellation.load(self.scheme), peak)
        except OSError as exc:
            raise UsageError(f"cannot read constellation file {self.scheme!r}: {exc}") from None


def _fmt(v) -> str:
    """Shortest round-trip decimal for floats."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _json_text(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def _write(path: str | Path | None, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _sidecar(cfg: RunConfig, suffix: str = ".json") -> Path | None:
    if cfg.output is None or cfg.output == "-":
        return None
    return Path(cfg.output).with_suffix(suffix)


def _awgn_curve(cfg: RunConfig) -> wa.WidebandCurve:
    b_grid = [1.0 / B for B in cfg.grid("awgn")]
    if any(b > 1 for b in b_grid):
        raise UsageError("bandwidth grid values must be at least 1")
    return wa.rate_curve(cfg.signaling(), cfg.P, cfg.z, b_grid, hermite_rule(cfg.quad_order), cfg.threads)


def cmd_awgn_rate_curve(cfg: RunConfig) -> int:
    curve = _awgn_curve(cfg)
    _write(cfg.output, _csv_text(wa.CSV_HEADER, curve.csv_rows()))
    asym = wa.awgn_asymptotes(cfg.P, cfg.z)
    doc = {
        "scheme": curve.scheme,
        "P": cfg.P,
        "z": cfg.z,
        "r0_fit": curve.r0_extrapolated,
        "rdot0_fit": curve.slope_extrapolated,
        "closed_form": asdict(asym),
    }
    side = _sidecar(cfg)
    if side is not None:
        _write(side, _json_text(doc))
    return EXIT_OK


def cmd_spectral_efficiency(cfg: RunConfig) -> int:
    curve = _awgn_curve(cfg)
    se = wa.spectral_efficiency_curve(cfg.signaling(), cfg.z, [], cfg.P, curve=curve)
    _write(cfg.output, _csv_text(wa.SE_CSV_HEADER, se.points))
    doc = {
        "scheme": curve.scheme,
        "z": cfg.z,
        "ebn0_min_db": se.ebn0_min_db,
        "reference_ebn0_db_z0": se.reference_ebn0_db,
        "gap_db": se.gap_db,
        "skipped_zero_rate": se.skipped,
    }
    side = _sidecar(cfg)
    if side is not None:
        _write(side, _json_text(doc))
    return EXIT_OK


def cmd_awgn_asymptotes(cfg: RunConfig) -> int:
    _write(cfg.output, _json_text(asdict(wa.awgn_asymptotes(cfg.P, cfg.z))))
    return EXIT_OK


def _fading_spec(cfg: RunConfig, w_c: float) -> fd.FadingSpec:
    return fd.FadingSpec(cfg.P, cfg.T_c, int(cfg.blocks_B), w_c, cfg.z)


def _fading_curve(cfg: RunConfig) -> fd.FadingCurve:
    wc = cfg.grid("fading")
    return fd.fading_rate_curve(
        cfg.signaling(), _fading_spec(cfg, wc[0]), wc,
        hermite_rule(cfg.quad_order), laguerre_rule(cfg.laguerre_order), cfg.threads,
    )


def cmd_fading_rate_curve(cfg: RunConfig) -> int:
    curve = _fading_curve(cfg)
    _write(cfg.output, _csv_text(fd.CSV_HEADER, curve.csv_rows()))
    side = _sidecar(cfg)
    if side is not None:
        doc = {"r0_fit": curve.r0_fit, "rdot0_fit": curve.slope_fit,
               "closed_form": fd.fading_asymptotes(curve.spec).to_dict()}
        _write(side, _json_text(doc))
    return EXIT_OK


def cmd_fading_report(cfg: RunConfig) -> int:
    prefix = Path(cfg.output or "fading_report")
    if prefix.suffix:
        prefix = prefix.with_suffix("")
    curve = _fading_curve(cfg)
    asym = fd.fading_asymptotes(curve.spec)
    n = max(2, cfg.exponent_points)
    rates = [asym.r_crit + (asym.c_infinity - asym.r_crit) * k / (n - 1) for k in range(n)]
    exps = fd.exponent_curve_limit(curve.spec, rates)
    _write(prefix.with_suffix(".json"), _json_text(asym.to_dict()))
    _write(Path(f"{prefix}_rate_curve.csv"), _csv_text(fd.CSV_HEADER, curve.csv_rows()))
    _write(Path(f"{prefix}_exponent.csv"), _csv_text(("rate_nats_per_s", "exponent", "rho_opt"), exps))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    ctx = VerifyContext(cfg.quad_order, cfg.laguerre_order, cfg.seed, cfg.threads)
    only = None
    if cfg.only:
        only = [k.strip() for k in str(cfg.only).split(",") if k.strip()]
        unknown = [k for k in only if k not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}; choose from {list(CRITERIA)}")
    results = run_all(ctx, only)
    text = render_json(results) if cfg.json else render_text(results)
    _write(cfg.output, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    ("awgn", "rate-curve"): cmd_awgn_rate_curve,
    ("awgn", "se"): cmd_spectral_efficiency,
    ("awgn", "asymptotes"): cmd_awgn_asymptotes,
    ("fading", "report"): cmd_fading_report,
    ("fading", "rate-curve"): cmd_fading_rate_curve,
    ("verify", None): cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser, physical: bool = True) -> None:
    p.add_argument("--quad-order", dest="quad_order", type=int, help="Gauss-Hermite order per axis")
    p.add_argument("--laguerre-order", dest="laguerre_order", type=int, help="Gauss-Laguerre order")
    p.add_argument("--output", "-o", help="output path ('-' for stdout)")
    p.add_argument("--threads", type=int, help="worker threads (also capped by EXPONENTIA_THREADS)")
    p.add_argument("--seed", type=int)
    if not physical:
        return
    p.add_argument("--scheme", help="bpsk, qpsk, or a constellation JSON path")
    p.add_argument("--P", dest="P", type=float, help="total power P")
    p.add_argument("--z", type=float, help="exponent constraint")
    p.add_argument("--grid-start", dest="grid_start", type=float, help="first bandwidth of the grid")
    p.add_argument("--grid-stop", dest="grid_stop", type=float, help="last bandwidth of the grid")
    p.add_argument("--grid-ratio", dest="grid_ratio", type=float, help="geometric grid ratio")
    p.add_argument("--k-m", dest="k_m", type=float, help="peak constraint K_m")
    p.add_argument("--peak-exponent", dest="peak_exponent", type=float, help="peak constraint exponent")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exponentia", description="Wideband error-exponent calculations.")
    parser.add_argument("--config", help="JSON file with RunConfig fields")
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    awgn = top.add_parser("awgn", help="AWGN wideband curves")
    awgn_sub = awgn.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, help_ in (("rate-curve", "rate versus bandwidth"), ("se", "spectral efficiency"),
                        ("asymptotes", "closed-form limits")):
        _add_common(awgn_sub.add_parser(name, help=help_))

    fad = top.add_parser("fading", help="block-fading curves")
    fad_sub = fad.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, help_ in (("report", "asymptotes, rate curve and E(R) curve"), ("rate-curve", "rate versus W_c")):
        sp = fad_sub.add_parser(name, help=help_)
        _add_common(sp)
        sp.add_argument("--Tc", dest="T_c", type=float, help="coherence time")
        sp.add_argument("--B", dest="blocks_B", type=int, help="number of independent blocks")
        if name == "report":
            sp.add_argument("--exponent-points", dest="exponent_points", type=int)

    ver = top.add_parser("verify", help="run the acceptance suite")
    _add_common(ver, physical=False)
    ver.add_argument("--json", action="store_true", default=None, help="machine-readable report")
    ver.add_argument("--only", help="comma-separated criterion numbers, e.g. 1,9,12")
    return parser


def load_config(argv: Sequence[str] | None = None) -> tuple[RunConfig, tuple]:
    args = build_parser().parse_args(argv)
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for k, v in vars(args).items():
        if k in known and v is not None:
            values[k] = v
    key = (args.group, getattr(args, "action", None))
    values["command"] = " ".join(x for x in key if x)
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg, key


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, key = load_config(argv)
        return COMMANDS[key](cfg)
    except UsageError as exc:
        print(f"exponentia: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExponentiaError as exc:
        print(f"exponentia: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
