"""Spectral quantities of halfline systems.

Floquet bands for periodic data, Titchmarsh-Weyl m-functions and the
reflectionless defect, Dirichlet-truncated eigenvalues by shooting, and a
Lyapunov-exponent probe for long (possibly aperiodic) chains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import bisect, brentq

from ._parallel import map_chunks
from .errors import ComplexCouplingUnsupported, DegenerateFloquet, SpecValidationError
from .halfline import (
    HalflineSystem,
    TransferChain,
    free_transfer,
    interface_batch,
    monodromy,
    periodic_cell_transfer,
)

BAND_TOL = 1e-8
EDGE_TOL = 1e-10
DEFAULT_ETAS = (1e-4, 1e-6, 1e-8)
DEFAULT_DENSITY = 2000  # grid points per unit of sqrt|E|


def energy_grid(window: tuple[float, float], density: float = DEFAULT_DENSITY) -> np.ndarray:
    """Grid uniform in ``sqrt|E|`` with ``density`` points per unit, covering ``window``."""
    lo, hi = map(float, window)
    if not hi > lo:
        raise SpecValidationError(f"empty energy window {window}")
    parts = []
    if lo < 0:
        k_hi, k_lo = math.sqrt(-lo), math.sqrt(-min(hi, 0.0))
        n = max(int(math.ceil(density * (k_hi - k_lo))), 8) + 1
        parts.append(-np.linspace(k_hi, k_lo, n) ** 2)
    if hi > 0:
        k_lo, k_hi = math.sqrt(max(lo, 0.0)), math.sqrt(hi)
        n = max(int(math.ceil(density * (k_hi - k_lo))), 8) + 1
        parts.append(np.linspace(k_lo, k_hi, n) ** 2)
    grid = np.unique(np.concatenate(parts))
    grid[0], grid[-1] = lo, hi
    return grid


def floquet_multipliers(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ``(lam_big, lam_small)`` of (stacks of) 2x2 matrices, ``|lam_big| >= |lam_small|``."""
    T = np.asarray(T, dtype=complex)
    tr = T[..., 0, 0] + T[..., 1, 1]
    det = T[..., 0, 0] * T[..., 1, 1] - T[..., 0, 1] * T[..., 1, 0]
    disc = np.sqrt(tr * tr - 4 * det)
    plus, minus = tr + disc, tr - disc
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, det / big, 0)
    return big, small


def in_band(T: np.ndarray, tol: float = BAND_TOL) -> np.ndarray:
    """Unit-circle test: some Floquet multiplier has modulus 1 within ``tol``."""
    big, small = floquet_multipliers(T)
    return (np.abs(np.abs(big) - 1) <= tol) | (np.abs(np.abs(small) - 1) <= tol)


def in_band_trace(T: np.ndarray) -> np.ndarray:
    """``|trace| <= 2``; equivalent to :func:`in_band` for real matrices with unit determinant."""
    return np.abs(np.real(T[..., 0, 0] + T[..., 1, 1])) <= 2


@dataclass(frozen=True)
class BandStructure:
    window: tuple[float, float]
    bands: tuple[tuple[float, float], ...]
    grid_points: int
    trace_test_applicable: bool
    disagreements: int

    def contains(self, energy: float) -> bool:
        return any(lo <= energy <= hi for lo, hi in self.bands)

    def gaps(self) -> list[tuple[float, float]]:
        lo, hi = self.window
        edges = [lo] + [e for band in self.bands for e in band] + [hi]
        return [(a, b) for a, b in zip(edges[::2], edges[1::2]) if b > a]


def band_structure(
    sys: HalflineSystem,
    window: tuple[float, float],
    grid_points: int = 2000,
    *,
    tol: float = BAND_TOL,
    edge_tol: float = EDGE_TOL,
    workers: int | None = None,
) -> BandStructure:
    """Bands of the periodic part of ``sys`` inside ``window``.

    Each grid energy is classified by the unit-circle test; where the
    monodromy is real with determinant one the trace test is evaluated too
    and disagreements are counted.  Band edges are refined by bisection.
    """
    lo, hi = map(float, window)
    if not hi > lo or grid_points < 2:
        raise SpecValidationError("need a nonempty window and at least two grid points")
    grid = np.linspace(lo, hi, int(grid_points))
    mono = map_chunks(lambda e: monodromy(sys, e), grid, workers)
    flags = in_band(mono, tol)
    real_unimodular = bool(
        np.all(np.abs(np.imag(mono)) == 0)
        and np.all(np.abs(np.linalg.det(mono) - 1) <= 1e-10)
    )
    disagreements = int(np.sum(flags != in_band_trace(mono))) if real_unimodular else 0

    def indicator(e: float) -> float:
        return 1.0 if in_band(monodromy(sys, e), tol) else -1.0

    edges = []
    for i in np.flatnonzero(flags[1:] != flags[:-1]):
        edges.append(bisect(indicator, grid[i], grid[i + 1], xtol=edge_tol))
    bands = []
    start = lo if flags[0] else None
    for e in edges:
        if start is None:
            start = e
        else:
            bands.append((start, e))
            start = None
    if start is not None:
        bands.append((start, hi))
    return BandStructure((lo, hi), tuple(bands), int(grid_points), real_unimodular, disagreements)


@dataclass(frozen=True)
class WeylValue:
    m_plus: complex
    m_minus: complex
    basepoint: float
    energy: complex

    @property
    def defect(self) -> float:
        return abs(self.m_plus + self.m_minus.conjugate())


def default_basepoint(sys: HalflineSystem) -> float:
    """Midpoint between the first two periodic interaction points."""
    if sys.period_hint is None:
        from .errors import NoPeriod

        raise NoPeriod("system carries no period hint")
    p, _ = sys.period_hint
    pos = sys.point_data(p, p + 2)[0]
    return float((pos[0] + pos[1]) / 2)


def _eigvec_ratio(T: np.ndarray, lam: complex) -> complex:
    """``u'/u`` for the eigenvector of ``T`` with eigenvalue ``lam``."""
    a, b, c, d = T[0, 0], T[0, 1], T[1, 0], T[1, 1]
    # both forms are valid; use the better-conditioned one
    if abs(b) >= abs(c):
        return complex((lam - a) / b)
    return complex(c / (lam - d))


def weyl_m(
    sys: HalflineSystem,
    z: complex,
    basepoint: float | None = None,
    eta: float | None = None,
) -> WeylValue:
    """Titchmarsh-Weyl functions ``m_+`` and ``m_-`` at ``basepoint``.

    ``m_+`` uses the solution of ``sys`` square integrable at ``+inf``;
    ``m_-`` uses the two-sided periodic extension of the periodic cell.  For
    real ``z`` pass ``eta > 0``; the functions are then evaluated at
    ``z + i*eta``.
    """
    z = complex(z)
    if eta is not None:
        if eta <= 0:
            raise SpecValidationError("eta must be positive")
        z = complex(z.real, eta)
    if z.imag <= 0:
        raise SpecValidationError("weyl_m needs Im z > 0 (or a positive eta)")
    if basepoint is None:
        basepoint = default_basepoint(sys)

    cell = periodic_cell_transfer(sys, z, basepoint)
    big, small = (complex(v) for v in floquet_multipliers(cell))
    if abs(big - small) < 1e-12:
        raise DegenerateFloquet(f"coinciding Floquet multipliers at z = {z}")
    m_minus = -_eigvec_ratio(cell, big)

    p, _ = sys.period_hint
    anchor = default_basepoint(sys)
    period = sys.period_length
    if basepoint >= sys.point_data(p, p + 1)[0][0]:
        m_plus = _eigvec_ratio(cell, small)
    else:
        # carry the decaying solution back from the periodic region
        shift = period * math.ceil(max(basepoint - anchor, 0.0) / period)
        right = anchor + shift
        cell_r = periodic_cell_transfer(sys, z, right)
        big_r, small_r = (complex(v) for v in floquet_multipliers(cell_r))
        vec = np.array([1.0, _eigvec_ratio(cell_r, small_r)])
        back = np.linalg.solve(TransferChain(sys, basepoint, right)(z), vec)
        m_plus = complex(back[1] / back[0])
    return WeylValue(m_plus, m_minus, float(basepoint), z)


def _extrapolate_to_zero(xs: Sequence[float], ys: Sequence[complex]) -> complex:
    total = 0j
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                w *= xj / (xj - xi)
        total += w * yi
    return total


def weyl_m_boundary(
    sys: HalflineSystem,
    energy: float,
    basepoint: float | None = None,
    etas: Sequence[float] = DEFAULT_ETAS,
) -> WeylValue:
    """Boundary values ``m(E + i0)`` by polynomial extrapolation in ``eta``."""
    vals = [weyl_m(sys, energy, basepoint, eta) for eta in etas]
    mp = _extrapolate_to_zero(etas, [v.m_plus for v in vals])
    mm = _extrapolate_to_zero(etas, [v.m_minus for v in vals])
    return WeylValue(mp, mm, vals[0].basepoint, complex(energy))


def reflectionless_defect(
    sys: HalflineSystem,
    energy: float,
    eta: float | None = None,
    basepoint: float | None = None,
) -> float:
    """``|m_+(E + i eta) + conj(m_-(E + i eta))|``; ``eta=None`` extrapolates to ``eta -> 0``."""
    if eta is None:
        return weyl_m_boundary(sys, energy, basepoint).defect
    return weyl_m(sys, energy, basepoint, eta).defect


def halfline_eigenvalues(
    sys: HalflineSystem,
    right_end: float,
    window: tuple[float, float],
    grid: float = DEFAULT_DENSITY,
    *,
    tol: float = EDGE_TOL,
    workers: int | None = None,
) -> list[float]:
    """Eigenvalues in ``window`` of ``sys`` cut off with a Dirichlet condition at ``right_end``.

    Shoots from the left boundary and locates sign changes of ``u(right_end)``
    on a grid with ``grid`` points per unit of ``sqrt|E|``, then refines each
    bracket to ``tol``.  Only real couplings are supported.
    """
    chain = TransferChain(sys, sys.origin, right_end)
    lo, hi = sys.index_range(sys.origin, right_end)
    c = sys.point_data(lo, hi)[3]
    if np.any(c.imag != 0):
        k = int(np.flatnonzero(c.imag != 0)[0])
        raise ComplexCouplingUnsupported(
            "shooting needs real interface couplings", generation=lo + k + 1
        )
    th = sys.left_boundary
    init = np.array([math.cos(th), -math.sin(th)])

    def shoot(e):
        return (chain(e) @ init)[..., 0]

    energies = energy_grid(window, grid)
    values = map_chunks(shoot, energies, workers)
    roots = []
    for i in range(len(energies)):
        if values[i] == 0:
            roots.append(float(energies[i]))
        elif i + 1 < len(energies) and values[i] * values[i + 1] < 0:
            roots.append(brentq(lambda e: float(shoot(e)), energies[i], energies[i + 1],
                                xtol=tol, rtol=4 * np.finfo(float).eps))
    return sorted(roots)


def lyapunov_exponent(sys: HalflineSystem, energy: float, n_points: int,
                      chunk: int = 1 << 16) -> float:
    """``log ||T(origin -> t_n+)|| / (t_n - origin)`` for the first ``n_points`` interactions.

    Periodic systems are extended beyond the listed points.  Products are
    formed by pairwise reduction with per-level rescaling, so very long
    chains neither overflow nor accumulate rounding linearly.
    """
    if n_points < 1:
        raise SpecValidationError("n_points must be positive")
    if sys.period_hint is None and n_points > len(sys.points):
        raise SpecValidationError(f"system lists only {len(sys.points)} interaction points")
    total = np.eye(2, dtype=complex)
    log_scale = 0.0
    prev = sys.origin
    last = prev
    for lo in range(0, n_points, chunk):
        hi = min(lo + chunk, n_points)
        pos, a, q, c = sys.point_data(lo, hi)
        lengths = np.diff(np.concatenate([[prev], pos]))
        prev = pos[-1]
        last = pos[-1]
        mats = interface_batch(a, q, c) @ free_transfer(lengths, float(energy))
        logs = np.zeros(len(mats))
        while len(mats) > 1:
            if len(mats) % 2:
                mats = np.concatenate([mats, np.eye(2)[None]])
                logs = np.append(logs, 0.0)
            prod = mats[1::2] @ mats[0::2]
            s = np.max(np.abs(prod), axis=(-2, -1))
            mats = prod / s[:, None, None]
            logs = logs[0::2] + logs[1::2] + np.log(s)
        total = mats[0] @ total
        s = float(np.max(np.abs(total)))
        total = total / s
        log_scale += logs[0] + math.log(s)
    norm = log_scale + math.log(np.linalg.norm(total, 2))
    return norm / (last - sys.origin)
