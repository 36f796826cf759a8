"""Case-level weight of evidence when the trace error probability is unknown.

The reference sample is genotyped under controlled conditions, so its error
probability ``w_r`` is treated as known throughout. The trace error
probability ``w_t`` is handled one of four ways:

- ``integrate-mc`` / ``integrate-quad``: average the per-hypothesis
  likelihood over a prior on ``w_t`` (Monte Carlo or deterministic
  quadrature of the same integral);
- ``profile``: maximize each hypothesis's likelihood separately over
  ``w_t`` and take the ratio of maxima;
- ``plug-in``: pretend the trace was genotyped as cleanly as the
  reference, i.e. evaluate at ``w_t = w_r``.

All methods return a :class:`WoEResult` so downstream code can treat them
uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .evidence import (
    CaseData,
    _counts_weighted_log10,
    check_h2_support,
    group_counts,
    joint_table_h1,
    joint_table_h2,
    trace_marginal,
    woe_known,
)
from .genotypes import GenotypePriors, validate_error_prob
from .optimize import maximize_on_interval
from .scaled_beta import ScaledBeta

__all__ = [
    "METHOD_KNOWN",
    "METHOD_PLUGIN",
    "METHOD_INTEGRATE_MC",
    "METHOD_INTEGRATE_QUAD",
    "METHOD_PROFILE",
    "METHODS",
    "WoEResult",
    "QuadratureError",
    "woe_known_result",
    "woe_plugin",
    "woe_integrate_mc",
    "woe_integrate_quad",
    "woe_profile",
]

METHOD_KNOWN = "known"
METHOD_PLUGIN = "plug-in"
METHOD_INTEGRATE_MC = "integrate-mc"
METHOD_INTEGRATE_QUAD = "integrate-quad"
METHOD_PROFILE = "profile"
METHODS = (
    METHOD_KNOWN,
    METHOD_PLUGIN,
    METHOD_INTEGRATE_MC,
    METHOD_INTEGRATE_QUAD,
    METHOD_PROFILE,
)

# Evaluation points for the profile search never touch 1/2, where the error
# channel stops being identifiable.
_HALF_OPEN_MARGIN = 1e-12

# Quantiles this small contribute less than ~1e-80 to any integral here but
# would underflow squared-probability terms to an un-loggable 0.0.
_W_FLOOR = 1e-120


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class WoEResult:
    """Weight of evidence (log10 likelihood ratio) plus method metadata.

    ``w_hat_h1``/``w_hat_h2`` are the per-hypothesis maximizers and are
    present exactly for the profile method; ``mc_std_error`` is the Monte
    Carlo standard error and is present exactly for ``integrate-mc``.
    """

    woe: float
    method: str
    w_hat_h1: float | None = None
    w_hat_h2: float | None = None
    mc_std_error: float | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        has_hats = self.w_hat_h1 is not None or self.w_hat_h2 is not None
        if self.method == METHOD_PROFILE:
            if self.w_hat_h1 is None or self.w_hat_h2 is None:
                raise ValueError("profile results must carry both maximizers")
        elif has_hats:
            raise ValueError(f"method {self.method!r} must not carry maximizers")
        if (self.mc_std_error is not None) != (self.method == METHOD_INTEGRATE_MC):
            raise ValueError("mc_std_error is present exactly for integrate-mc results")
        if self.mc_std_error is not None and not self.mc_std_error >= 0.0:
            raise ValueError(f"mc_std_error must be nonnegative, got {self.mc_std_error!r}")
        woe = float(self.woe)
        if math.isnan(woe):
            raise ValueError("WoE must not be NaN")
        object.__setattr__(self, "woe", woe)


def woe_known_result(case: CaseData, w_t: float, w_r: float) -> WoEResult:
    """Known-``w_t`` evidence wrapped in the common result type."""
    return WoEResult(woe_known(case, w_t, w_r), METHOD_KNOWN)


def woe_plugin(case: CaseData, w_r: float) -> WoEResult:
    """Evaluate as if the trace were as clean as the reference (w_t = w_r)."""
    return WoEResult(woe_known(case, w_r, w_r), METHOD_PLUGIN)


def _per_marker_log10_matrix(case: CaseData, draws: np.ndarray, w_r: float,
                             table_fn) -> np.ndarray:
    """(n_draws, m) matrix of per-marker log10 probabilities at each draw."""
    cache: dict[GenotypePriors, np.ndarray] = {}
    cols = []
    for mk in case.markers:
        logs = cache.get(mk.priors)
        if logs is None:
            # Cells for unobserved dosage pairs may be 0 (e.g. a degenerate
            # reference marginal); only observed, support-checked cells are
            # ever indexed out of the log table.
            with np.errstate(divide="ignore"):
                logs = np.log10(table_fn(mk.priors, draws, w_r))
            cache[mk.priors] = logs
        cols.append(logs[:, mk.x_t.dosage, mk.x_r.dosage])
    return np.column_stack(cols)


def woe_integrate_mc(case: CaseData, prior: ScaledBeta, w_r: float,
                     rng: np.random.Generator, n_samples: int = 1000,
                     prior_h2: ScaledBeta | None = None) -> WoEResult:
    """Prior-predictive WoE by Monte Carlo over ``w_t``.

    One set of ``n_samples`` prior draws is shared across all markers and
    both hypotheses, so the two integrals are evaluated on common random
    numbers. The estimate is the exact mean (compensated summation) of the
    per-draw case-level log10 likelihood differences, which makes the
    result invariant to the marker/draw reduction order. The standard
    error of that mean over draws is reported alongside.

    ``prior_h2`` optionally gives H2 its own prior; the H1 draw vector is
    then generated first and an independent H2 vector second, so common
    random numbers no longer apply.
    """
    w_r = validate_error_prob(w_r, "w_r")
    n_samples = int(n_samples)
    if n_samples < 2:
        raise ValueError(f"n_samples must be at least 2, got {n_samples}")
    check_h2_support(case, None, w_r)
    draws = prior.sample(rng, n_samples)
    draws_h2 = draws if prior_h2 is None else prior_h2.sample(rng, n_samples)
    l1 = _per_marker_log10_matrix(case, draws, w_r, joint_table_h1)
    l2 = _per_marker_log10_matrix(case, draws_h2, w_r, joint_table_h2)
    diff = l1 - l2
    woe = math.fsum(diff.ravel().tolist()) / n_samples
    per_draw = diff.sum(axis=1)
    se = float(np.std(per_draw, ddof=1) / math.sqrt(n_samples))
    return WoEResult(woe, METHOD_INTEGRATE_MC, mc_std_error=se)


def _quad_log10_mean(integrand, tol: float) -> tuple[float, float, bool]:
    """Integrate over (0, 1) in prior-CDF space; returns (value, abserr, ok)."""
    value, abserr, info, *tail = quad(integrand, 0.0, 1.0, epsabs=0.5 * tol,
                                      epsrel=0.0, limit=200, full_output=1)
    ok = not tail and abserr <= tol
    return value, abserr, ok


def woe_integrate_quad(case: CaseData, prior: ScaledBeta, w_r: float,
                       tol: float = 1e-8,
                       prior_h2: ScaledBeta | None = None) -> WoEResult:
    """Prior-predictive WoE by deterministic quadrature over ``w_t``.

    Each marker contributes ``E_prior[log10 P(evidence | H, w_t)]`` per
    hypothesis. The integrals run in prior-CDF space (substituting
    ``w_t = quantile(v)``), which concentrates nodes where the prior has
    mass and keeps the endpoint behaviour integrable even for priors with
    unbounded density. Identical (pair, priors) markers share one
    evaluation. Under H2 the trace and reference factors separate, so only
    the trace factor needs quadrature. ``prior_h2``, when given, replaces
    the prior in the H2 integrals.
    """
    w_r = validate_error_prob(w_r, "w_r")
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    check_h2_support(case, None, w_r)
    p_h2 = prior if prior_h2 is None else prior_h2

    # Representative marker label per (priors, pair), for failure reports.
    labels: dict[tuple[GenotypePriors, int, int], str] = {}
    for idx, mk in enumerate(case.markers):
        labels.setdefault((mk.priors, mk.x_t.dosage, mk.x_r.dosage),
                          case.marker_label(idx))

    total_parts: list[float] = []
    failures: list[tuple[float, str]] = []
    for priors, counts in group_counts(case):
        # Unobserved dosages may have zero reference-marginal probability;
        # their -inf logs are never read because those cells have count 0.
        with np.errstate(divide="ignore"):
            log_mr = np.log10(trace_marginal(priors, w_r))
        for a in range(3):
            for b in range(3):
                n_ab = counts[a, b]
                if n_ab == 0.0:
                    continue

                def h1_at(v: float, _a=a, _b=b, _p=priors) -> float:
                    w = max(prior.quantile(v), _W_FLOOR)
                    return math.log10(joint_table_h1(_p, w, w_r)[_a, _b])

                def h2_trace_at(v: float, _a=a, _p=priors) -> float:
                    w = max(p_h2.quantile(v), _W_FLOOR)
                    return math.log10(trace_marginal(_p, w)[_a])

                i1, err1, ok1 = _quad_log10_mean(h1_at, tol)
                i2, err2, ok2 = _quad_log10_mean(h2_trace_at, tol)
                if not (ok1 and ok2):
                    failures.append((max(err1, err2),
                                     labels[(priors, a, b)]))
                    continue
                total_parts.append(n_ab * (i1 - (i2 + float(log_mr[b]))))
    if failures:
        worst_err, worst_label = max(failures)
        raise QuadratureError(
            f"quadrature failed to reach tol={tol!r} on {len(failures)} "
            f"marker pattern(s); worst at marker {worst_label} "
            f"with abserr {worst_err!r}"
        )
    return WoEResult(math.fsum(total_parts), METHOD_INTEGRATE_QUAD)


def woe_profile(case: CaseData, w_r: float, lower: float = 0.0,
                upper: float = 0.5) -> WoEResult:
    """WoE from per-hypothesis maximization over the trace error probability.

    Each hypothesis's case likelihood is maximized separately over ``w_t``
    in ``[lower, upper]`` intersected with [0, 1/2) (grid multistart plus
    bounded local refinement), and the WoE is the log10 ratio of the two
    maxima. The maximizers are reported in the result.
    """
    w_r = validate_error_prob(w_r, "w_r")
    lower = float(lower)
    upper = float(upper)
    if math.isnan(lower) or math.isnan(upper) or not 0.0 <= lower < upper <= 0.5:
        raise ValueError(
            f"need 0 <= lower < upper <= 0.5, got [{lower!r}, {upper!r}]"
        )
    check_h2_support(case, None, w_r)
    hi = min(upper, 0.5 - _HALF_OPEN_MARGIN)
    if not lower < hi:
        raise ValueError(f"search interval [{lower!r}, {upper!r}] collapses "
                         "after excluding 0.5")
    groups = group_counts(case)

    def obj_h1(w: np.ndarray) -> np.ndarray:
        return _group_objective(groups, w, w_r, joint_table_h1)

    def obj_h2(w: np.ndarray) -> np.ndarray:
        return _group_objective(groups, w, w_r, joint_table_h2)

    w1, v1 = maximize_on_interval(obj_h1, lower, hi)
    w2, v2 = maximize_on_interval(obj_h2, lower, hi)
    return WoEResult(v1 - v2, METHOD_PROFILE, w_hat_h1=w1, w_hat_h2=w2)


def _group_objective(groups, w: np.ndarray, w_r: float, table_fn) -> np.ndarray:
    total = np.zeros(np.shape(w))
    for priors, counts in groups:
        total = total + _counts_weighted_log10(counts, table_fn(priors, w, w_r))
    return total
