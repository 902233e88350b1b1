"""
Harper operator at rational flux and the Fermi curves of its Bloch variety.

A Bloch component with label (k, l, m, n) is the Laurent polynomial
    e^{2 pi i alpha (n + l b)} xi1 + e^{-2 pi i alpha (n + l b)} / xi1
  + e^{2 pi i beta (m + k a)} xi2 + e^{-2 pi i beta (m + k a)} / xi2,
which in the reduced coordinates xi, eta (the phases absorbed) is
xi + 1/xi + eta + 1/eta. Spectra at flux p/q come from the q x q Bloch matrix
of the one-dimensional reduction.
"""

from functools import partial
from math import gcd
from typing import List, Optional, Sequence, Tuple
import cmath
import logging
import math

import numpy as np

from spectral_pf.monodromy import branch_points, mu_of_lambda
from spectral_pf.schema import (
    BlochIndex,
    ComplexValue,
    FiberReport,
    FluxRational,
    SpectrumSlice,
)
from spectral_pf.worker import map_slices

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
MAX_Q = 100
MIN_GRID = 4
SPECTRUM_BOUND = 4.0


def _phases(idx: Optional[BlochIndex]) -> Tuple[complex, complex]:
    if idx is None:
        return 1.0 + 0j, 1.0 + 0j
    phase1 = cmath.exp(2j * math.pi * idx.alpha * (idx.n + idx.l * idx.b))
    phase2 = cmath.exp(2j * math.pi * idx.beta * (idx.m + idx.k * idx.a))
    return phase1, phase2


def reduced_coordinates(idx: BlochIndex, xi1: complex, xi2: complex) -> Tuple[complex, complex]:
    """(xi, eta) = (e^{2 pi i alpha (n + l b)} xi1, e^{2 pi i beta (m + k a)} xi2)."""
    phase1, phase2 = _phases(idx)
    return phase1 * xi1, phase2 * xi2


def bloch_eval(idx: BlochIndex, xi1: complex, xi2: complex) -> complex:
    """
    Value of the Bloch component N^{k,l}_{m,n} at (xi1, xi2).

    Args:
        idx: Component label with fluxes and periods
        xi1: First Floquet multiplier
        xi2: Second Floquet multiplier

    Returns:
        Complex value of the Laurent polynomial

    Raises:
        ValueError: If xi1 or xi2 is zero
    """
    if xi1 == 0 or xi2 == 0:
        raise ValueError(f"Bloch variables must be nonzero, got xi1={xi1}, xi2={xi2}")
    phase1, phase2 = _phases(idx)
    return (phase1 * xi1 + 1 / (phase1 * xi1)) + (phase2 * xi2 + 1 / (phase2 * xi2))


def fiber_classify(lam: complex, idx: Optional[BlochIndex] = None) -> FiberReport:
    """
    Classify the Fermi curve {N = lam}.

    lam = 4 has one ordinary double point, at reduced coordinates (1, 1);
    lam = -4 has one at (-1, -1); lam = 0 splits into the two lines
    xi + eta = 0 and xi eta = -1. Singular points are reported in the
    original (xi1, xi2) coordinates of ``idx`` (zero phases when omitted).
    """
    lam = complex(lam)
    phase1, phase2 = _phases(idx)
    fiber = branch_points(lam)
    kind = "generic"
    singular: List[Tuple[complex, complex]] = []
    components: List[str] = []
    if abs(lam - 4) <= SINGULAR_TOL:
        kind = "I1"
        singular.append((1 / phase1, 1 / phase2))
    elif abs(lam + 4) <= SINGULAR_TOL:
        kind = "I1"
        singular.append((-1 / phase1, -1 / phase2))
    elif abs(lam) <= SINGULAR_TOL:
        kind = "I2"
        components = ["xi + eta = 0", "xi*eta = -1"]
        # The two lines meet at (1, -1) and (-1, 1).
        singular.extend([(1 / phase1, -1 / phase2), (-1 / phase1, 1 / phase2)])
    logger.debug(f"Fiber at lambda={lam} classified as {kind}")
    return FiberReport(
        lam=ComplexValue.of(lam),
        kind=kind,
        singular_points=[(ComplexValue.of(x), ComplexValue.of(y)) for x, y in singular],
        components=components,
        branch_points=[ComplexValue.of(point) for point in fiber.points],
        collisions=[ComplexValue.of(point) for point in fiber.collisions],
        mu=ComplexValue.of(mu_of_lambda(lam)),
    )


# ----------------------------------------------------------------------
# Harper spectra

def harper_bloch_matrix(flux: FluxRational, k1: float, k2: float) -> np.ndarray:
    """
    q x q Bloch matrix of the Harper operator at flux p/q.

    Diagonal 2 cos(2 pi p j / q + k2); hops e^{i k1} on the superdiagonal and
    e^{-i k1} below it, closed by the corner entries so that a full turn
    around the ring picks up e^{i q k1}. For q = 1 this is 2 cos k2 + 2 cos k1.
    """
    q = flux.q
    hop = cmath.exp(1j * k1)
    h = np.zeros((q, q), dtype=complex)
    j = np.arange(q)
    h[j, j] = 2.0 * np.cos(2.0 * np.pi * flux.p * j / q + k2)
    for row in range(q):
        col = (row + 1) % q
        h[row, col] += hop
        h[col, row] += hop.conjugate()
    return h


def _sample_matrices(flux: FluxRational, grid: int) -> np.ndarray:
    """Bloch matrices over a grid x grid sample, stacked as (grid^2, q, q)."""
    q = flux.q
    # The spectrum depends on k only through cos(q k1) and cos(q k2), so one
    # period of 2 pi / q per axis covers the whole zone.
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    k1, k2 = np.meshgrid(thetas / q, thetas / q, indexing="ij")
    k1 = k1.ravel()
    k2 = k2.ravel()
    j = np.arange(q)
    stack = np.zeros((k1.size, q, q), dtype=complex)
    stack[:, j, j] = 2.0 * np.cos(2.0 * np.pi * flux.p * j / q + k2[:, None])
    hop = np.exp(1j * k1)
    for row in range(q):
        col = (row + 1) % q
        stack[:, row, col] += hop
        stack[:, col, row] += hop.conj()
    return stack


def sample_spectrum(flux: FluxRational, grid: int) -> np.ndarray:
    """Eigenvalues over the zone sample, shape (grid^2, q), each row ascending."""
    if grid < MIN_GRID:
        raise ValueError(f"grid must be at least {MIN_GRID}, got {grid}")
    if grid % 2:
        logger.warning(f"Odd grid {grid} misses the band edges at cos(q k) = -1")
    return np.linalg.eigvalsh(_sample_matrices(flux, grid))


def merge_bands(intervals: Sequence[Tuple[float, float]], gap_threshold: float) -> List[Tuple[float, float]]:
    """Sort intervals and join those separated by at most ``gap_threshold``."""
    merged: List[Tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo - merged[-1][1] <= gap_threshold:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def bands(eigenvalues: np.ndarray, gap_threshold: float = 1e-6) -> List[Tuple[float, float]]:
    """One interval per eigenvalue index (min to max over the sample), then merged."""
    lows = eigenvalues.min(axis=0)
    highs = eigenvalues.max(axis=0)
    raw = [(float(lo), float(hi)) for lo, hi in zip(lows, highs)]
    return merge_bands(raw, gap_threshold)


def spectrum_slice(flux: FluxRational, grid: int = 16, gap_threshold: float = 1e-6) -> SpectrumSlice:
    """Band intervals of the Harper operator at one flux."""
    eigenvalues = sample_spectrum(flux, grid)
    intervals = bands(eigenvalues, gap_threshold)
    # Clip rounding excursions past the norm bound.
    intervals = [(max(lo, -SPECTRUM_BOUND), min(hi, SPECTRUM_BOUND)) for lo, hi in intervals]
    logger.debug(f"Flux {flux}: {len(intervals)} bands")
    return SpectrumSlice(flux=flux, intervals=intervals)


def fluxes(q_max: int) -> List[FluxRational]:
    """Every reduced p/q with 0 <= p < q <= q_max, sorted by (q, p)."""
    return [
        FluxRational(p=p, q=q)
        for q in range(1, q_max + 1)
        for p in range(q)
        if gcd(p, q) == 1
    ]


def butterfly(q_max: int, grid: int = 16, gap_threshold: float = 1e-6,
              workers: int = 4) -> List[SpectrumSlice]:
    """
    Hofstadter butterfly: band intervals for every rational flux with q <= q_max.

    Args:
        q_max: Largest flux denominator, at most 100
        grid: Zone samples per axis, at least 4
        gap_threshold: Gaps this small are closed
        workers: Concurrent slices

    Returns:
        Slices sorted by (q, p)

    Raises:
        ValueError: If q_max or grid is out of range
    """
    if not 1 <= q_max <= MAX_Q:
        raise ValueError(f"q_max must lie in [1, {MAX_Q}], got {q_max}")
    if grid < MIN_GRID:
        raise ValueError(f"grid must be at least {MIN_GRID}, got {grid}")
    targets = fluxes(q_max)
    logger.info(f"Computing {len(targets)} butterfly slices up to q={q_max} on a {grid}x{grid} grid")
    job = partial(spectrum_slice, grid=grid, gap_threshold=gap_threshold)
    slices = map_slices(job, targets, max_workers=workers)
    return sorted(slices, key=lambda s: (s.flux.q, s.flux.p))


def butterfly_rows(slices: Sequence[SpectrumSlice]) -> List[dict]:
    """CSV rows with columns p, q, band_index, lo, hi."""
    return [
        {"p": s.flux.p, "q": s.flux.q, "band_index": i, "lo": lo, "hi": hi}
        for s in slices
        for i, (lo, hi) in enumerate(s.intervals)
    ]
