"""Beta distribution rescaled to the open interval (0, 1/2).

Error probabilities live on (0, 1/2), so priors over them are expressed as
one half of a Beta(alpha, beta) variable. The class below carries the exact
density/CDF/quantile transforms of that rescaling and a moment-matching
constructor, mirroring the usual mean/concentration reparameterisation of
the beta family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["ScaledBeta"]


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


@dataclass(frozen=True)
class ScaledBeta:
    """Distribution of ``U / 2`` where ``U ~ Beta(alpha, beta)``.

    The support is the open interval (0, 1/2); the mean is
    ``alpha / (alpha + beta) / 2`` and the variance is the beta variance
    divided by 4.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"shape {name} must be a finite positive number, got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_moments(cls, mean: float, variance: float) -> "ScaledBeta":
        """Solve the shapes so the scaled variable has the given moments.

        With ``m = 2 * mean`` and ``s2 = 4 * variance`` (the moments of the
        unscaled beta variable), the solution is
        ``nu = m * (1 - m) / s2 - 1``, ``alpha = m * nu``,
        ``beta = (1 - m) * nu``. The variance must satisfy
        ``variance < mean * (1/2 - mean)``; at or beyond that bound no
        beta distribution has the requested moments.
        """
        mean = float(mean)
        variance = float(variance)
        if math.isnan(mean) or not 0.0 < mean < 0.5:
            raise ValueError(f"mean must lie in (0, 0.5), got {mean!r}")
        if math.isnan(variance) or variance <= 0.0:
            raise ValueError(f"variance must be positive, got {variance!r}")
        m = 2.0 * mean
        s2 = 4.0 * variance
        if s2 >= m * (1.0 - m):
            raise ValueError(
                f"variance {variance!r} is too large for mean {mean!r}; "
                f"require variance < {m * (1.0 - m) / 4.0!r}"
            )
        nu = m * (1.0 - m) / s2 - 1.0
        return cls(m * nu, (1.0 - m) * nu)

    @property
    def mean(self) -> float:
        return 0.5 * self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return 0.25 * self.alpha * self.beta / (s * s * (s + 1.0))

    def pdf(self, w):
        """Density at ``w``; zero outside (0, 1/2), vectorized."""
        arr, scalar = _as_float_array(w)
        u = 2.0 * arr
        inside = (u > 0.0) & (u < 1.0)
        out = np.zeros_like(arr)
        lognorm = special.betaln(self.alpha, self.beta)
        ui = u[inside]
        out[inside] = 2.0 * np.exp(
            (self.alpha - 1.0) * np.log(ui)
            + (self.beta - 1.0) * np.log1p(-ui)
            - lognorm
        )
        return float(out) if scalar else out

    def cdf(self, w):
        """P(W <= w), vectorized; clamps to {0, 1} outside the support."""
        arr, scalar = _as_float_array(w)
        u = np.clip(2.0 * arr, 0.0, 1.0)
        out = special.betainc(self.alpha, self.beta, u)
        return float(out) if scalar else out

    def quantile(self, p):
        """Inverse CDF for probabilities strictly inside (0, 1), vectorized."""
        arr, scalar = _as_float_array(p)
        if arr.size and (np.any(np.isnan(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0)):
            raise ValueError("quantile probabilities must lie in (0, 1)")
        out = 0.5 * special.betaincinv(self.alpha, self.beta, arr)
        return float(out) if scalar else out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` i.i.d. values, all strictly inside (0, 1/2).

        Endpoint hits have probability zero but can occur in floating
        point for extreme shapes; those draws are redrawn so the open
        support is guaranteed.
        """
        n = int(n)
        if n < 1:
            raise ValueError(f"sample size must be at least 1, got {n}")
        u = rng.beta(self.alpha, self.beta, size=n)
        bad = (u <= 0.0) | (u >= 1.0)
        while np.any(bad):
            u[bad] = rng.beta(self.alpha, self.beta, size=int(bad.sum()))
            bad = (u <= 0.0) | (u >= 1.0)
        return 0.5 * u
