"""Self-verification suite behind the ``verify`` subcommand and the acceptance tests."""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .constellation import SignalingScheme, make_custom, make_psk
from .fading import (
    FadingSpec,
    eo_fading_iid,
    eo_fading_limit,
    exponent_limit,
    fading_asymptotes,
    fading_expectation,
    fading_rate_curve,
    monte_carlo_fading_expectation,
)
from .gallager import AlphaKernel, eo, kuhn_tucker_residual, small_power_gap
from .parallel import ordered_map
from .quadrature import (
    OracleGrid,
    expect_complex_gaussian,
    hermite_rule,
    laguerre_rule,
    oracle_expect_complex_gaussian,
)
from .wideband_awgn import (
    awgn_asymptotes,
    geometric_grid,
    rate_curve,
    rate_per_symbol,
    rate_per_symbol_bisection,
    spectral_efficiency_curve,
)

AWGN_P, AWGN_Z = 1.0, 0.1
AWGN_B_GRID = geometric_grid(2.0**-6, 2.0**-14)
FADING_Z = 0.05
FADING_WC = [64.0, 128.0, 256.0, 512.0, 1024.0]


@dataclass(frozen=True)
class CriterionResult:
    id: str
    name: str
    value: float
    target: float
    tolerance: float
    mode: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.id:<4} {self.name}: value={self.value!r} target={self.target!r} "
            f"tol={self.tolerance!r} ({self.mode}){' ' + self.detail if self.detail else ''}"
        )


def _check(cid, name, value, target, tol, mode="abs", detail="") -> CriterionResult:
    value = float(value)
    if mode == "abs":
        ok = abs(value - target) <= tol
    elif mode == "rel":
        ok = abs(value - target) <= tol * abs(target)
    elif mode == "max":
        ok = value <= tol
    else:
        raise ValueError(mode)
    return CriterionResult(cid, name, value, float(target), float(tol), mode, bool(ok and math.isfinite(value)), detail)


@dataclass
class VerifyContext:
    """Shared inputs and cached heavy computations for one verification run."""

    quad_order: int = 48
    laguerre_order: int = 96
    seed: int = 0
    threads: int | None = None
    mc_samples: int = 1_000_000

    @cached_property
    def rule_h(self):
        return hermite_rule(self.quad_order)

    @cached_property
    def rule_l(self):
        return laguerre_rule(self.laguerre_order)

    def _awgn(self, scheme):
        return rate_curve(scheme, AWGN_P, AWGN_Z, AWGN_B_GRID, self.rule_h, self.threads)

    @cached_property
    def qpsk_curve(self):
        return self._awgn(SignalingScheme.qpsk())

    @cached_property
    def bpsk_curve(self):
        return self._awgn(SignalingScheme.bpsk())

    def _fading(self, scheme):
        spec = FadingSpec(1.0, 1.0, 1, FADING_WC[0], FADING_Z)
        return fading_rate_curve(scheme, spec, FADING_WC, self.rule_h, self.rule_l, self.threads)

    @cached_property
    def qpsk_fading(self):
        return self._fading(SignalingScheme.qpsk())

    @cached_property
    def bpsk_fading(self):
        return self._fading(SignalingScheme.bpsk())


def c01_first_order(ctx: VerifyContext) -> list[CriterionResult]:
    return [_check("1", "AWGN extrapolated R0, QPSK", ctx.qpsk_curve.r0_extrapolated, 0.467544, 1e-3)]


def c02_second_order(ctx: VerifyContext) -> list[CriterionResult]:
    sq, sb = ctx.qpsk_curve.slope_extrapolated, ctx.bpsk_curve.slope_extrapolated
    return [
        _check("2a", "AWGN slope, QPSK", sq, -0.159838, 0.05, "rel"),
        _check("2b", "AWGN slope, BPSK", sb, -0.319676, 0.05, "rel"),
        _check("2c", "AWGN slope ratio BPSK/QPSK", sb / sq, 2.0, 0.05),
    ]


def c03_rho_star(ctx: VerifyContext) -> list[CriterionResult]:
    return [_check("3", "rho_opt at b=2^-14, QPSK", ctx.qpsk_curve.samples[-1].rho_opt, 0.46246, 0.01)]


def bound_battery(p: float) -> list:
    ring = np.exp(2j * np.pi * np.arange(8) / 8) * math.sqrt(p)
    return [
        make_psk(2, p),
        make_psk(4, p),
        make_custom([0.0, 2.0 * math.sqrt(p)], [0.75, 0.25]),
        make_custom(ring, np.full(8, 0.125)),
    ]


BATTERY_POWERS = tuple(float(v) for v in np.geomspace(1e-3, 1.0, 8))
BATTERY_RHOS = tuple(float(v) for v in np.linspace(0.0, 1.0, 21))


def c04_upper_bound(ctx: VerifyContext) -> list[CriterionResult]:
    def worst(p: float) -> tuple[float, int]:
        w, n = -math.inf, 0
        for c in bound_battery(p):
            for rho in BATTERY_RHOS:
                excess = eo(c, rho, ctx.rule_h).value - p * rho / (1 + rho)
                w = max(w, excess)
                n += excess > 1e-9
        return w, n

    out = ordered_map(worst, BATTERY_POWERS, ctx.threads)
    violations = sum(n for _, n in out)
    return [
        _check("4", "E_o - p rho/(1+rho), worst case", max(w for w, _ in out), 0.0, 1e-9, "max",
               f"violations={violations} of {4 * len(BATTERY_POWERS) * len(BATTERY_RHOS)}")
    ]


def c05_second_order_law(ctx: VerifyContext) -> list[CriterionResult]:
    out = []
    for scheme, order, coef, cid in (("QPSK", 4, -0.5, "5a"), ("BPSK", 2, -2.0, "5b")):
        c = make_psk(order, 1e-3)
        worst, where = 0.0, 0.25
        for rho in (0.25, 0.5, 1.0):
            target = coef / (1 + rho) ** 3
            dev = abs(small_power_gap(c, rho, ctx.rule_h) / target - 1.0)
            if dev >= worst:
                worst, where = dev, rho
        law = f"{coef!r}/(1+rho)^3"
        out.append(_check(cid, f"second-order E_o law, {scheme} vs {law}", worst, 0.0, 0.05, "max",
                          f"worst rho={where!r}"))
    return out


def c06_equivalence(ctx: VerifyContext) -> list[CriterionResult]:
    rng = np.random.default_rng(ctx.seed)
    pairs = [(float(10 ** rng.uniform(-3, 0)), float(rng.uniform(0.01, 0.24))) for _ in range(20)]

    def diff(pz):
        c = make_psk(4, pz[0])
        return abs(rate_per_symbol(c, pz[1], ctx.rule_h)[0] - rate_per_symbol_bisection(c, pz[1], ctx.rule_h))

    return [_check("6", "sup form vs bisection, max |diff|", max(ordered_map(diff, pairs, ctx.threads)), 0.0, 1e-9, "max")]


def c07_kuhn_tucker(ctx: VerifyContext) -> list[CriterionResult]:
    worst = 0.0
    for order in (2, 4):
        for p in (1e-3, 1e-2, 0.1, 1.0):
            for rho in (0.25, 0.5, 1.0):
                res = kuhn_tucker_residual(make_psk(order, p), rho, 0.0, ctx.rule_h)
                worst = max(worst, float(res.max() - res.min()))
    return [_check("7", "Kuhn-Tucker residual spread, BPSK/QPSK", worst, 0.0, 1e-8, "max")]


def c08_spectral_efficiency(ctx: VerifyContext) -> list[CriterionResult]:
    se = spectral_efficiency_curve(SignalingScheme.qpsk(), AWGN_Z, AWGN_B_GRID, AWGN_P, curve=ctx.qpsk_curve)
    return [
        _check("8a", "min Eb/N0 at z=0.1 [dB]", se.ebn0_min_db, 1.710, 0.02),
        _check("8b", "gap to z->0 endpoint [dB]", se.gap_db, 3.30, 0.05),
    ]


def c09_fading_closed_forms(ctx: VerifyContext) -> list[CriterionResult]:
    spec = FadingSpec(100.0, 1.0, 1, 1.0)
    a = fading_asymptotes(spec)
    z_exact = math.log(51.0) - 100.0 / 204.0
    r_exact = 25.0 / 51.0
    return [
        _check("9a", "fading z*, P=100, vs ln 51 - 100/204", a.z_star, z_exact, 1e-9),
        _check("9b", "fading z*, P=100, vs printed 3.44163", a.z_star, 3.44163, 5e-6, detail="half unit of last printed digit"),
        _check("9c", "fading r_crit, P=100, vs 25/51", a.r_crit, r_exact, 1e-9),
        _check("9d", "fading r_crit, P=100, vs printed 0.490196", a.r_crit, 0.490196, 5e-7, detail="half unit of last printed digit"),
        _check("9e", "E(C_inf), P=100", exponent_limit(spec, a.c_infinity)[0], 0.0, 1e-9),
        _check("9f", "E(r_crit) - z*, P=100", exponent_limit(spec, a.r_crit)[0] - a.z_star, 0.0, 1e-9),
    ]


def c10_fading_convergence(ctx: VerifyContext) -> list[CriterionResult]:
    spec = FadingSpec(1.0, 1.0, 1, 1024.0)
    c = make_psk(4, spec.p)
    rel, dev = 0.0, 0.0
    for rho in (0.25, 0.5, 1.0):
        e = eo_fading_iid(c, spec, rho, ctx.rule_h, ctx.rule_l)
        lim = eo_fading_limit(spec, rho)
        rel = max(rel, abs(e - lim) / lim)
        target = -rho / ((1 + rho) * (1 + 2 * rho) ** 2)
        dev = max(dev, abs(spec.w_c * (e - lim) / target - 1.0))
    return [
        _check("10a", "relative gap to W_c limit at W_c=1024", rel, 0.0, 0.01, "max"),
        _check("10b", "W_c x gap vs second-order law", dev, 0.0, 0.10, "max"),
    ]


def c11_fading_slope(ctx: VerifyContext) -> list[CriterionResult]:
    a = fading_asymptotes(FadingSpec(1.0, 1.0, 1, 1024.0, FADING_Z))
    sq, sb = ctx.qpsk_fading.slope_fit, ctx.bpsk_fading.slope_fit
    return [
        _check("11a", "fading slope fit, QPSK", sq, a.rdot0, 0.10, "rel"),
        _check("11b", "fading slope ratio BPSK/QPSK", sb / sq, 2.0, 0.10, "rel"),
    ]


def c12_oracles(ctx: VerifyContext) -> list[CriterionResult]:
    c = make_psk(4, 0.1)
    grid = OracleGrid.for_radius(c.max_amplitude)
    worst = 0.0
    for rho in (0.5, 1.0):
        k = AlphaKernel(c, rho)
        gh = expect_complex_gaussian(k.moment_minus_one, ctx.rule_h)
        ref = oracle_expect_complex_gaussian(k.moment_minus_one, grid)
        worst = max(worst, abs(gh - ref))
    spec = FadingSpec(1.0, 1.0, 1, 32.0)
    q = make_psk(4, spec.p)
    quad = fading_expectation(q, spec, 1.0, ctx.rule_h, ctx.rule_l)
    mean, err = monte_carlo_fading_expectation(q, spec, 1.0, ctx.mc_samples, ctx.seed, ctx.rule_h)
    return [
        _check("12a", "Gauss-Hermite vs grid oracle", worst, 0.0, 1e-8, "max"),
        _check("12b", "Gauss-Laguerre vs Monte Carlo [sigma]", abs(quad - mean) / err, 0.0, 3.0, "max"),
    ]


def c13_determinism(ctx: VerifyContext) -> list[CriterionResult]:
    grid = AWGN_B_GRID[-4:]

    def csv_bytes(threads: int) -> bytes:
        curve = rate_curve(SignalingScheme.qpsk(), AWGN_P, AWGN_Z, grid, ctx.rule_h, threads)
        buf = io.StringIO()
        for row in curve.csv_rows():
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue().encode()

    same = csv_bytes(1) == csv_bytes(4)
    return [_check("13", "rate curve identical for 1 and 4 threads", 0.0 if same else 1.0, 0.0, 0.0, "max")]


CRITERIA: dict[str, Callable[[VerifyContext], list[CriterionResult]]] = {
    "1": c01_first_order,
    "2": c02_second_order,
    "3": c03_rho_star,
    "4": c04_upper_bound,
    "5": c05_second_order_law,
    "6": c06_equivalence,
    "7": c07_kuhn_tucker,
    "8": c08_spectral_efficiency,
    "9": c09_fading_closed_forms,
    "10": c10_fading_convergence,
    "11": c11_fading_slope,
    "12": c12_oracles,
    "13": c13_determinism,
}


def run_all(ctx: VerifyContext, only: Sequence[str] | None = None) -> list[CriterionResult]:
    """Run the selected criteria (all by default) in numeric order."""
    keys = list(CRITERIA) if not only else [k for k in CRITERIA if k in set(only)]
    results: list[CriterionResult] = []
    for k in keys:
        results.extend(CRITERIA[k](ctx))
    return results


def render_text(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"


def render_json(results: list[CriterionResult]) -> str:
    doc = {"passed": all(r.passed for r in results), "criteria": [asdict(r) for r in results]}
    return json.dumps(doc, indent=2) + "\n"
