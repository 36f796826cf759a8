"""Genotype-pair probabilities under the two source hypotheses and the
resulting weight of evidence.

The evidence at one marker is a pair of observed dosages: ``x_t`` from the
trace sample and ``x_r`` from the reference sample, read through error
channels with probabilities ``w_t`` and ``w_r`` respectively. Under H1 the
two observations descend from one latent genotype drawn from the population
priors; under H2 they descend from two independent draws. Markers are
independent, so case-level quantities sum over markers in a fixed order.

All probabilities here are exact channel/prior contractions; no sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .genotypes import (
    Genotype,
    GenotypePriors,
    channel_matrix,
    validate_error_prob,
)

__all__ = [
    "DegenerateCaseError",
    "MarkerObservation",
    "CaseData",
    "joint_table_h1",
    "joint_table_h2",
    "trace_marginal",
    "joint_prob_h1",
    "joint_prob_h2",
    "lr",
    "woe_known",
    "log10_lik_h1",
    "log10_lik_h2",
    "group_counts",
]


class DegenerateCaseError(ValueError):
    """An observed marker has probability zero under H2, so no likelihood
    ratio exists for the case."""


def _coerce_genotype(g) -> Genotype:
    return g if isinstance(g, Genotype) else Genotype(g)


@dataclass(frozen=True)
class MarkerObservation:
    """One marker's observed trace/reference dosage pair and its priors."""

    x_t: Genotype
    x_r: Genotype
    priors: GenotypePriors

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_t", _coerce_genotype(self.x_t))
        object.__setattr__(self, "x_r", _coerce_genotype(self.x_r))
        if not isinstance(self.priors, GenotypePriors):
            raise TypeError(f"priors must be GenotypePriors, got {type(self.priors).__name__}")


@dataclass(frozen=True)
class CaseData:
    """Ordered, nonempty collection of independent marker observations.

    ``ids`` optionally names the markers (same length, unique); positions
    are used in diagnostics when ids are absent.
    """

    markers: tuple[MarkerObservation, ...]
    ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        markers = tuple(self.markers)
        if not markers:
            raise ValueError("a case needs at least one marker")
        for mk in markers:
            if not isinstance(mk, MarkerObservation):
                raise TypeError(f"markers must be MarkerObservation, got {type(mk).__name__}")
        object.__setattr__(self, "markers", markers)
        if self.ids is not None:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != len(markers):
                raise ValueError(
                    f"got {len(ids)} marker ids for {len(markers)} markers"
                )
            if len(set(ids)) != len(ids):
                raise ValueError("marker ids must be unique")
            object.__setattr__(self, "ids", ids)

    @property
    def m(self) -> int:
        return len(self.markers)

    def marker_label(self, index: int) -> str:
        return self.ids[index] if self.ids is not None else str(index)


def joint_table_h1(priors: GenotypePriors, w_t, w_r) -> np.ndarray:
    """P(X_t = a, X_r = b | same donor) as a table over (a, b).

    Both observations are noisy copies of one latent dosage z, so the
    table is ``sum_z p_z * T(w_t)[z, a] * T(w_r)[z, b]``. Either error
    probability may be an array; the broadcast shape becomes leading axes.
    """
    p = priors.as_array()
    tt = channel_matrix(w_t)
    tr = channel_matrix(w_r)
    return np.einsum("z,...za,...zb->...ab", p, tt, tr)


def joint_table_h2(priors: GenotypePriors, w_t, w_r) -> np.ndarray:
    """P(X_t = a, X_r = b | different donors): product of the two marginals."""
    p = priors.as_array()
    mt = np.einsum("z,...za->...a", p, channel_matrix(w_t))
    mr = np.einsum("z,...zb->...b", p, channel_matrix(w_r))
    return np.einsum("...a,...b->...ab", mt, mr)


def trace_marginal(priors: GenotypePriors, w) -> np.ndarray:
    """Marginal distribution of one observed dosage, ``p @ T(w)``."""
    return np.einsum("z,...za->...a", priors.as_array(), channel_matrix(w))


def joint_prob_h1(x_t, x_r, priors: GenotypePriors, w_t: float, w_r: float) -> float:
    a = _coerce_genotype(x_t).dosage
    b = _coerce_genotype(x_r).dosage
    w_t = validate_error_prob(w_t, "w_t")
    w_r = validate_error_prob(w_r, "w_r")
    return float(joint_table_h1(priors, w_t, w_r)[a, b])


def joint_prob_h2(x_t, x_r, priors: GenotypePriors, w_t: float, w_r: float) -> float:
    a = _coerce_genotype(x_t).dosage
    b = _coerce_genotype(x_r).dosage
    w_t = validate_error_prob(w_t, "w_t")
    w_r = validate_error_prob(w_r, "w_r")
    return float(joint_table_h2(priors, w_t, w_r)[a, b])


def lr(x_t, x_r, priors: GenotypePriors, w_t: float, w_r: float) -> float:
    """Single-marker likelihood ratio P(evidence | H1) / P(evidence | H2).

    Raises ``DegenerateCaseError`` when the denominator is zero, which can
    only happen at w = 0 with a prior that excludes an observed dosage.
    """
    num = joint_prob_h1(x_t, x_r, priors, w_t, w_r)
    den = joint_prob_h2(x_t, x_r, priors, w_t, w_r)
    if den == 0.0:
        raise DegenerateCaseError(
            f"observed pair ({_coerce_genotype(x_t).dosage}, {_coerce_genotype(x_r).dosage}) "
            "has probability zero under H2; likelihood ratio undefined"
        )
    return num / den


def group_counts(case: CaseData) -> list[tuple[GenotypePriors, np.ndarray]]:
    """Collapse a case into per-priors 3x3 tables of observed pair counts.

    Markers sharing a priors object are exchangeable for likelihood
    purposes, so grouped counts let every downstream evaluation run as a
    handful of table contractions. Groups keep first-appearance order.
    """
    groups: dict[GenotypePriors, np.ndarray] = {}
    for mk in case.markers:
        tbl = groups.get(mk.priors)
        if tbl is None:
            tbl = np.zeros((3, 3))
            groups[mk.priors] = tbl
        tbl[mk.x_t.dosage, mk.x_r.dosage] += 1.0
    return list(groups.items())


def _counts_weighted_log10(counts: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``sum_ab counts[a, b] * log10(table[..., a, b])`` with zero-count
    cells contributing exactly zero even when their probability is zero."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0.0, counts * np.log10(table), 0.0)
    return terms.sum(axis=(-2, -1))


def _group_log10_lik(groups, w_t, w_r: float, table_fn) -> np.ndarray:
    total = 0.0
    for priors, counts in groups:
        total = total + _counts_weighted_log10(counts, table_fn(priors, w_t, w_r))
    return total


def log10_lik_h1(case: CaseData, w_t, w_r: float):
    """Case-level log10 P(evidence | H1, w_t, w_r); ``w_t`` may be an array."""
    w_r = validate_error_prob(w_r, "w_r")
    out = _group_log10_lik(group_counts(case), np.asarray(w_t, float), w_r, joint_table_h1)
    return float(out) if np.ndim(out) == 0 else out


def log10_lik_h2(case: CaseData, w_t, w_r: float):
    """Case-level log10 P(evidence | H2, w_t, w_r); ``w_t`` may be an array."""
    w_r = validate_error_prob(w_r, "w_r")
    out = _group_log10_lik(group_counts(case), np.asarray(w_t, float), w_r, joint_table_h2)
    return float(out) if np.ndim(out) == 0 else out


def check_h2_support(case: CaseData, w_t: float | None, w_r: float) -> None:
    """Raise ``DegenerateCaseError`` if any observed marker is impossible
    under H2, naming the first offending marker.

    With ``w_t=None`` only the reference side is checked; that suffices for
    methods that keep the trace error probability strictly inside (0, 1/2),
    where the trace marginal is everywhere positive.
    """
    cache: dict[GenotypePriors, tuple[np.ndarray, np.ndarray | None]] = {}
    for idx, mk in enumerate(case.markers):
        entry = cache.get(mk.priors)
        if entry is None:
            mr = trace_marginal(mk.priors, w_r)
            mt = None if w_t is None else trace_marginal(mk.priors, w_t)
            entry = (mr, mt)
            cache[mk.priors] = entry
        mr, mt = entry
        if mr[mk.x_r.dosage] == 0.0 or (mt is not None and mt[mk.x_t.dosage] == 0.0):
            raise DegenerateCaseError(
                f"marker {case.marker_label(idx)}: observed pair "
                f"({mk.x_t.dosage}, {mk.x_r.dosage}) has probability zero under H2"
            )


def woe_known(case: CaseData, w_t: float, w_r: float) -> float:
    """Weight of evidence with both error probabilities known.

    Sum over markers of log10 of the marker likelihood ratio. Returns
    ``-inf`` when some marker is possible under H2 but impossible under H1
    (a clean exclusion at zero error); raises ``DegenerateCaseError`` when
    a marker is impossible under H2.
    """
    w_t = validate_error_prob(w_t, "w_t")
    w_r = validate_error_prob(w_r, "w_r")
    check_h2_support(case, w_t, w_r)
    groups = group_counts(case)
    parts = []
    for priors, counts in groups:
        h1 = _counts_weighted_log10(counts, joint_table_h1(priors, w_t, w_r))
        h2 = _counts_weighted_log10(counts, joint_table_h2(priors, w_t, w_r))
        parts.append(float(h1) - float(h2))
    return math.fsum(parts)


def per_marker_log10_lr(case: CaseData, w_t: float, w_r: float) -> np.ndarray:
    """log10 likelihood ratio of each marker in case order."""
    w_t = validate_error_prob(w_t, "w_t")
    w_r = validate_error_prob(w_r, "w_r")
    check_h2_support(case, w_t, w_r)
    cache: dict[GenotypePriors, np.ndarray] = {}
    out = np.empty(case.m)
    for idx, mk in enumerate(case.markers):
        tbl = cache.get(mk.priors)
        if tbl is None:
            with np.errstate(divide="ignore"):
                tbl = np.log10(joint_table_h1(mk.priors, w_t, w_r)) - np.log10(
                    joint_table_h2(mk.priors, w_t, w_r)
                )
            cache[mk.priors] = tbl
        out[idx] = tbl[mk.x_t.dosage, mk.x_r.dosage]
    return out
