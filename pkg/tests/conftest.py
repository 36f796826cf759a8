"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from snpwoe.evidence import CaseData, MarkerObservation
from snpwoe.genotypes import GenotypePriors, hwe_priors


def random_case(rng: np.random.Generator, m: int | None = None,
                n_priors: int = 1) -> CaseData:
    """A case with random observations and random (HWE) priors.

    Observations are drawn uniformly over the nine dosage pairs, so the
    case need not be likely under either hypothesis; that stresses the
    numerics more than model-consistent data.
    """
    if m is None:
        m = int(rng.integers(1, 25))
    qs = rng.uniform(0.05, 0.95, size=n_priors)
    priors = [hwe_priors(float(q)) for q in qs]
    markers = tuple(
        MarkerObservation(int(rng.integers(0, 3)), int(rng.integers(0, 3)),
                          priors[int(rng.integers(0, n_priors))])
        for _ in range(m)
    )
    return CaseData(markers)


def table_frequencies(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Empirical 3x3 pair frequencies from two dosage vectors."""
    counts = np.zeros((3, 3))
    np.add.at(counts, (x1, x2), 1.0)
    return counts / x1.size
