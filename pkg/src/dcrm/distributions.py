"""Claim-size distributions with exact moments and moment generating functions.

Every law here has a finite m.g.f. on an explicit convergence region; the
discounting machinery in :mod:`dcrm.core` relies on that and on the exact
first and second raw moments.  Heavy-tailed laws without an m.g.f. are
deliberately not supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MgfDomainError",
    "ClaimDistribution",
    "Exponential",
    "Gamma",
    "Deterministic",
]


class MgfDomainError(ValueError):
    """Raised when an m.g.f. argument lies at or beyond the convergence boundary."""


class ClaimDistribution:
    """Base class for claim-size laws.

    Subclasses provide ``mean``, ``second_moment``, ``mgf_bound`` (supremum of
    the admissible m.g.f. argument, ``inf`` when unrestricted), ``mgf`` and
    ``sample``.  Instances are immutable and safe to share across workers;
    sampling mutates only the caller-owned generator.
    """

    mean: float
    second_moment: float
    mgf_bound: float

    def moment(self, order: int) -> float:
        """Exact raw moment of the given order (only 1 and 2 are supported)."""
        if order == 1:
            return self.mean
        if order == 2:
            return self.second_moment
        raise ValueError(f"moment order must be 1 or 2, got {order!r}")

    def mgf(self, u):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def _check_mgf_domain(self, u) -> None:
        if np.any(np.asarray(u) >= self.mgf_bound):
            raise MgfDomainError(
                f"mgf argument must be < {self.mgf_bound:g} for {self!r}, got {u!r}"
            )


@dataclass(frozen=True)
class Exponential(ClaimDistribution):
    """Exponential claim sizes, parameterized by their mean."""

    mean: float

    def __post_init__(self):
        if not (self.mean > 0 and np.isfinite(self.mean)):
            raise ValueError(f"Exponential mean must be positive, got {self.mean!r}")

    @property
    def second_moment(self) -> float:
        return 2.0 * self.mean**2

    @property
    def mgf_bound(self) -> float:
        return 1.0 / self.mean

    def mgf(self, u):
        """M(u) = 1 / (1 - mean*u), valid for u < 1/mean."""
        self._check_mgf_domain(u)
        out = 1.0 / (1.0 - self.mean * np.asarray(u, dtype=float))
        return float(out) if np.isscalar(u) else out

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(self.mean, size=size)


@dataclass(frozen=True)
class Gamma(ClaimDistribution):
    """Gamma claim sizes with shape k and scale theta (mean k*theta)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and np.isfinite(self.shape)):
            raise ValueError(f"Gamma shape must be positive, got {self.shape!r}")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise ValueError(f"Gamma scale must be positive, got {self.scale!r}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def second_moment(self) -> float:
        # E X^2 = Var + mean^2 = k theta^2 + (k theta)^2
        return self.shape * (self.shape + 1.0) * self.scale**2

    @property
    def mgf_bound(self) -> float:
        return 1.0 / self.scale

    def mgf(self, u):
        """M(u) = (1 - scale*u)^(-shape), valid for u < 1/scale."""
        self._check_mgf_domain(u)
        out = (1.0 - self.scale * np.asarray(u, dtype=float)) ** (-self.shape)
        return float(out) if np.isscalar(u) else out

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape, self.scale, size=size)


@dataclass(frozen=True)
class Deterministic(ClaimDistribution):
    """Degenerate claims: every claim has the same size."""

    value: float

    def __post_init__(self):
        if not (self.value >= 0 and np.isfinite(self.value)):
            raise ValueError(
                f"Deterministic claim value must be nonnegative, got {self.value!r}"
            )

    @property
    def mean(self) -> float:
        return self.value

    @property
    def second_moment(self) -> float:
        return self.value**2

    @property
    def mgf_bound(self) -> float:
        return np.inf

    def mgf(self, u):
        """M(u) = exp(u * value), finite for every u."""
        out = np.exp(np.asarray(u, dtype=float) * self.value)
        return float(out) if np.isscalar(u) else out

    def sample(self, rng: np.random.Generator, size=None):
        # Consumes no randomness; degenerate law.
        if size is None:
            return self.value
        return np.full(size, self.value, dtype=float)
