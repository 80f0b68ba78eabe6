"""Statistical validation suite: Monte Carlo output against closed forms,
quadrature against the exponential-claims closed form, martingale residual
diagnostics, and Cox/PAYD cross-checks.

Every check is deterministic given the master seed.  `perturb_mean` is a fault
injection hook: it scales the analytic mean used by the mean-grid and
martingale checks by (1 + perturb_mean), so a nonzero value must make those
checks fail, demonstrating the suite has statistical power.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List

import numpy as np

from ._streams import derive_seeds
from .core import (
    DcrmScenario,
    analytic_mean,
    analytic_variance,
    empirical_mgf,
    martingale_residual_mean,
    martingale_residual_variance,
    mgf_exponential_closed,
    mgf_nhpp,
    simulate_discounted_loss,
)
from .distributions import Exponential
from .mileage import AlternatingRenewal, ConstantSpeed
from .payd import PaydPolicy, mgf_cox, validate_cox_premium
from .processes import ConstantIntensity, MileageAffineIntensity

__all__ = ["ValidationSettings", "CheckResult", "ValidationReport", "run_validation"]

#: parameter grid shared by the mean/variance/m.g.f. checks
GRID_RATES = (0.5, 1.0, 2.0)
GRID_DELTAS = (0.01, 0.1, 1.0)
GRID_HORIZONS = (0.5, 1.0, 5.0)

_SIGMA = 4.0


@dataclass(frozen=True)
class ValidationSettings:
    """Path counts and controls for one validation run."""

    seed: int = 20260811
    grid_paths: int = 100_000
    martingale_paths: int = 100_000
    mgf_paths: int = 1_000_000
    cox_paths: int = 100_000
    payd_outer: int = 10_000
    payd_full: int = 100_000
    threads: int = 1
    perturb_mean: float = 0.0

    def scaled(self, base_paths: int) -> "ValidationSettings":
        """Settings with all path counts derived from one base count."""
        return replace(
            self,
            grid_paths=base_paths,
            martingale_paths=base_paths,
            mgf_paths=10 * base_paths,
            cox_paths=base_paths,
            payd_outer=max(1_000, base_paths // 10),
            payd_full=max(1_000, base_paths),
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def format_table(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [
            f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}"
            for c in self.checks
        ]
        n_ok = sum(c.passed for c in self.checks)
        lines.append(f"{n_ok}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def run_validation(settings: ValidationSettings = ValidationSettings()) -> ValidationReport:
    checks = []
    checks.extend(_check_mean_variance_grid(settings))
    checks.append(_check_mgf_consistency())
    checks.append(_check_empirical_mgf(settings))
    checks.append(_check_limits())
    checks.extend(_check_martingale(settings))
    checks.extend(_check_cox_reduction(settings))
    checks.append(_check_payd_consistency(settings))
    return ValidationReport(checks)


def _grid_cells():
    for rate in GRID_RATES:
        for delta in GRID_DELTAS:
            for horizon in GRID_HORIZONS:
                yield rate, delta, horizon


def _check_mean_variance_grid(settings: ValidationSettings) -> List[CheckResult]:
    """Sample mean and variance of the simulated discounted loss against the
    closed forms, across the full parameter grid, at 4 standard errors."""
    claim = Exponential(1.0)
    cells = list(_grid_cells())
    seeds = derive_seeds(settings.seed, len(cells))
    mean_fail, var_fail = [], []
    worst_mean_z = worst_var_z = 0.0
    for (rate, delta, horizon), cell_seed in zip(cells, seeds):
        scenario = DcrmScenario(claim=claim, counting=ConstantIntensity(rate),
                                delta=delta, horizon=horizon)
        result = simulate_discounted_loss(scenario, settings.grid_paths, cell_seed,
                                          n_threads=settings.threads)
        target_mean = analytic_mean(claim.mean, rate, delta, horizon)
        target_mean *= 1.0 + settings.perturb_mean
        z_mean = (result.mean() - target_mean) / result.mean_stderr()
        target_var = analytic_variance(claim.second_moment, rate, delta, horizon)
        z_var = (result.variance() - target_var) / result.variance_stderr()
        worst_mean_z = max(worst_mean_z, abs(z_mean))
        worst_var_z = max(worst_var_z, abs(z_var))
        if abs(z_mean) > _SIGMA:
            mean_fail.append((rate, delta, horizon, z_mean))
        if abs(z_var) > _SIGMA:
            var_fail.append((rate, delta, horizon, z_var))
    n = len(cells)
    return [
        CheckResult(
            "mean vs closed form (grid)",
            not mean_fail,
            f"{n - len(mean_fail)}/{n} cells within {_SIGMA:g} SE, max |z|={worst_mean_z:.2f}",
        ),
        CheckResult(
            "variance vs closed form (grid)",
            not var_fail,
            f"{n - len(var_fail)}/{n} cells within {_SIGMA:g} SE, max |z|={worst_var_z:.2f}",
        ),
    ]


def _check_mgf_consistency() -> CheckResult:
    """Quadrature m.g.f. against the exponential-claims closed form on a grid
    of u values, to 1e-8 relative."""
    claim = Exponential(1.0)
    tol = 1e-8
    worst = 0.0
    for rate, delta, horizon in _grid_cells():
        for u in (0.1, 0.2, 0.3, 0.4, 0.5):
            quadrature = mgf_nhpp(claim, rate, delta, horizon, u)
            closed = mgf_exponential_closed(claim.mean, rate, delta, horizon, u)
            worst = max(worst, abs(quadrature - closed) / closed)
    return CheckResult(
        "m.g.f. quadrature vs closed form",
        worst <= tol,
        f"max relative error {worst:.2e} (tol {tol:g})",
    )


def _check_empirical_mgf(settings: ValidationSettings) -> CheckResult:
    """Sample mean of exp(u*Z) against the closed-form m.g.f. value."""
    claim = Exponential(1.0)
    rate, delta, horizon, u = 1.0, 1.0, 1.0, 0.4
    scenario = DcrmScenario(claim=claim, counting=ConstantIntensity(rate),
                            delta=delta, horizon=horizon)
    (cell_seed,) = derive_seeds(settings.seed + 1, 1)
    result = simulate_discounted_loss(scenario, settings.mgf_paths, cell_seed,
                                      n_threads=settings.threads)
    estimate, stderr = empirical_mgf(result, u)
    target = mgf_exponential_closed(claim.mean, rate, delta, horizon, u)
    z = (estimate - target) / stderr
    return CheckResult(
        "empirical m.g.f.",
        abs(z) <= _SIGMA,
        f"estimate {estimate:.6f} vs exact {target:.6f}, |z|={abs(z):.2f}",
    )


def _check_limits() -> CheckResult:
    """Small-delta and long-horizon limit behavior of the closed forms."""
    tol = 1e-6
    errs = []
    # mean formula is continuous at delta = 0
    mu1, rate, horizon = 1.0, 1.0, 1.0
    errs.append(abs(analytic_mean(mu1, rate, 1e-10, horizon) - mu1 * rate * horizon)
                / (mu1 * rate * horizon))
    # exponential-claims m.g.f. approaches the undiscounted compound form
    beta, u = 1.0, 0.5
    undiscounted = np.exp(rate * horizon * u * beta / (1.0 - u * beta))
    errs.append(abs(mgf_exponential_closed(beta, rate, 1e-8, horizon, u) - undiscounted)
                / undiscounted)
    # long-horizon value approaches the perpetuity form
    delta, u = 1.0, 0.3
    perpetuity = (1.0 - u * beta) ** (-rate / delta)
    errs.append(abs(mgf_exponential_closed(beta, rate, delta, 1e3 / delta, u) - perpetuity)
                / perpetuity)
    worst = max(errs)
    return CheckResult(
        "limit behavior",
        worst <= tol,
        f"max relative error {worst:.2e} (tol {tol:g})",
    )


def _check_martingale(settings: ValidationSettings) -> List[CheckResult]:
    """Zero-mean residuals of the centered loss and of its squared, variance-
    centered companion on a time grid."""
    claim = Exponential(1.0)
    rate, delta, horizon = 1.0, 0.05, 1.0
    grid = np.array([0.25, 0.5, 0.75, 1.0])
    scenario = DcrmScenario(claim=claim, counting=ConstantIntensity(rate),
                            delta=delta, horizon=horizon)
    (cell_seed,) = derive_seeds(settings.seed + 2, 1)
    result = simulate_discounted_loss(scenario, settings.martingale_paths, cell_seed,
                                      full_trace=True, n_threads=settings.threads)

    res_a = martingale_residual_mean(result, grid)
    # fault-injection hook: pretend the analytic mean were off by this factor
    shifted = res_a.means - settings.perturb_mean * np.array(
        [analytic_mean(claim.mean, rate, delta, s) for s in grid])
    z_a = np.abs(shifted / res_a.stderrs)
    res_b = martingale_residual_variance(result, grid)
    z_b = np.abs(res_b.z_scores())
    return [
        CheckResult(
            "martingale residual (mean-centered)",
            bool(np.all(z_a <= _SIGMA)),
            f"max |z|={z_a.max():.2f} over grid {grid.tolist()}",
        ),
        CheckResult(
            "martingale residual (variance-centered)",
            bool(np.all(z_b <= _SIGMA)),
            f"max |z|={z_b.max():.2f} over grid {grid.tolist()}",
        ),
    ]


def _check_cox_reduction(settings: ValidationSettings) -> List[CheckResult]:
    """Deterministic mileage collapses the Cox model to an NHPP, and a
    speed-independent hazard collapses it to the homogeneous closed forms."""
    claim = Exponential(1.0)
    mileage = ConstantSpeed(30.0)
    policy = PaydPolicy(claim=claim, intensity=MileageAffineIntensity(0.05, 0.01),
                        mileage=mileage, delta=1.0, horizon=1.0)
    induced = policy.intensity.on_path(mileage.realize(policy.horizon))
    worst = 0.0
    for u in (0.1, 0.2, 0.3, 0.4, 0.5):
        conditional, _ = mgf_cox(policy, u, n_outer=1)
        direct = mgf_nhpp(claim, induced, policy.delta, policy.horizon, u)
        worst = max(worst, abs(conditional - direct) / direct)
    mgf_check = CheckResult(
        "Cox reduction: m.g.f. on deterministic mileage",
        worst <= 1e-10,
        f"max relative error {worst:.2e} (tol 1e-10)",
    )

    rate0, delta, horizon = 0.5, 0.1, 2.0
    flat_policy = PaydPolicy(claim=claim, intensity=MileageAffineIntensity(rate0, 0.0),
                             mileage=mileage, delta=delta, horizon=horizon)
    (cell_seed,) = derive_seeds(settings.seed + 3, 1)
    comparison = validate_cox_premium(flat_policy, n_outer=1_000,
                                      n_full=settings.cox_paths, seed=cell_seed)
    exact = analytic_mean(claim.mean, rate0, delta, horizon)
    exact_ok = abs(comparison.premium - exact) <= 1e-12 * exact
    premium_check = CheckResult(
        "Cox reduction: speed-independent premium",
        exact_ok and abs(comparison.z_score) <= _SIGMA,
        f"premium {comparison.premium:.6f} vs closed form {exact:.6f}, "
        f"|z|={abs(comparison.z_score):.2f}",
    )
    return [mgf_check, premium_check]


def _check_payd_consistency(settings: ValidationSettings) -> CheckResult:
    """Conditional-expectation premium against end-to-end Cox simulation for
    genuinely stochastic mileage."""
    policy = PaydPolicy(
        claim=Exponential(1.0),
        intensity=MileageAffineIntensity(base_rate=0.1, per_mile=0.005),
        mileage=AlternatingRenewal(mean_drive=1.0, mean_idle=1.0, speed=30.0),
        delta=0.05,
        horizon=5.0,
    )
    (cell_seed,) = derive_seeds(settings.seed + 4, 1)
    comparison = validate_cox_premium(policy, n_outer=settings.payd_outer,
                                      n_full=settings.payd_full, seed=cell_seed)
    return CheckResult(
        "PAYD premium vs full simulation",
        abs(comparison.z_score) <= _SIGMA,
        f"premium {comparison.premium:.5f} vs simulated {comparison.simulated_mean:.5f}, "
        f"|z|={abs(comparison.z_score):.2f}",
    )
