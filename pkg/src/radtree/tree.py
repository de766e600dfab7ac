"""Finite radial trees: direct secular solver and the halfline direct-sum decomposition.

The tree truncated at generation ``depth`` (Dirichlet at every leaf) is solved
directly: on each edge ``f = A cos(kx) + B sin(kx)/k``, and the vertex
conditions give a square linear system in the ``(A, B)`` coefficients whose
smallest singular value vanishes exactly at eigenvalues.  The same spectrum is
assembled independently from halfline components with multiplicities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ._parallel import map_chunks
from .couplings import TOL, VertexCoupling, reduce_coupling
from .errors import DepthTooLarge, SpecValidationError
from .halfline import HalflineSystem, free_transfer
from .spectra import DEFAULT_DENSITY, energy_grid, halfline_eigenvalues

MAX_UNKNOWNS = 4096
SIGMA_REL_TOL = 1e-7
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class RadialTreeSpec:
    """Generation data of a radial tree.

    ``gaps[n] = t_{n+1} - t_n`` (``gaps[0]`` is the root edge) and
    ``couplings[n - 1]`` is the coupling at generation ``n``.
    """

    gaps: tuple[float, ...]
    couplings: tuple[VertexCoupling, ...]
    root_angle: float = math.pi / 2

    def __post_init__(self):
        gaps = tuple(self.gaps)
        cps = tuple(self.couplings)
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "couplings", cps)
        object.__setattr__(self, "root_angle", float(self.root_angle))
        if not gaps:
            raise SpecValidationError("at least one gap (the root edge) is required")
        if any(not (float(g) > 0) or not math.isfinite(float(g)) for g in gaps):
            raise SpecValidationError("gaps must be positive and finite")
        if len(gaps) < len(cps):
            raise SpecValidationError("need a gap after every listed generation")
        if not all(isinstance(c, VertexCoupling) for c in cps):
            raise SpecValidationError("couplings must be VertexCoupling instances")
        if not (-math.pi / 2 < self.root_angle <= math.pi / 2):
            raise SpecValidationError("root angle must lie in (-pi/2, pi/2]")

    @property
    def positions(self) -> np.ndarray:
        """``t_0 = 0, t_1, t_2, ...``."""
        return np.concatenate([[0.0], np.cumsum([float(g) for g in self.gaps])])

    def branching(self, n: int) -> int:
        return 1 if n == 0 else self.couplings[n - 1].b

    def check_depth(self, depth: int) -> None:
        if depth < 1:
            raise SpecValidationError("depth must be at least 1")
        if depth > len(self.gaps) or depth - 1 > len(self.couplings):
            raise SpecValidationError(f"spec does not describe a tree of depth {depth}")


def leaf_count(spec: RadialTreeSpec, depth: int) -> int:
    return math.prod(spec.branching(n) for n in range(depth))


def dft_basis(b: int) -> np.ndarray:
    """Rows ``omega^(s j) / sqrt(b)``, ``s = 1..b-1``: orthonormal with zero row sums."""
    j = np.arange(b)
    s = np.arange(1, b)[:, None]
    return np.exp(2j * np.pi * s * j / b) / math.sqrt(b)


def helmert_basis(b: int) -> np.ndarray:
    """Real alternative to :func:`dft_basis` (Gram-Schmidt on ``e_j - e_{j+1}``)."""
    if b == 1:
        return np.zeros((0, 1))
    diffs = np.zeros((b - 1, b))
    diffs[np.arange(b - 1), np.arange(b - 1)] = 1.0
    diffs[np.arange(b - 1), np.arange(1, b)] = -1.0
    q, _ = np.linalg.qr(diffs.T)
    return q.T


def _edge_layout(spec: RadialTreeSpec, depth: int) -> list[int]:
    counts = [1]
    for n in range(1, depth):
        counts.append(counts[-1] * spec.branching(n))
    return counts


def secular_matrices(
    spec: RadialTreeSpec,
    depth: int,
    energies,
    basis: Callable[[int], np.ndarray] = dft_basis,
    max_unknowns: int = MAX_UNKNOWNS,
) -> np.ndarray:
    """Secular matrices for the tree truncated at ``depth``, one per energy.

    Unknowns are ``(A_e, B_e)`` for each edge ``e``, edges numbered level by
    level.  Rows: the root condition, ``b_n + 1`` rows per internal vertex and
    one Dirichlet row per leaf.
    """
    spec.check_depth(depth)
    counts = _edge_layout(spec, depth)
    n_edges = sum(counts)
    if 2 * n_edges > max_unknowns:
        raise DepthTooLarge(f"{2 * n_edges} unknowns exceed the cap of {max_unknowns}")
    offsets = np.concatenate([[0], np.cumsum(counts)])
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    ne = len(energies)
    M = np.zeros((ne, 2 * n_edges, 2 * n_edges), dtype=complex)

    th = spec.root_angle
    M[:, 0, 0] = math.sin(th)
    M[:, 0, 1] = math.cos(th) if th != math.pi / 2 else 0.0
    row = 1
    for level in range(depth):
        T = free_transfer(float(spec.gaps[level]), energies)  # (ne, 2, 2): end data of each edge
        C, S, Cp, Sp = T[:, 0, 0], T[:, 0, 1], T[:, 1, 0], T[:, 1, 1]
        if level == depth - 1:
            for i in range(counts[level]):
                e = offsets[level] + i
                M[:, row, 2 * e] = C
                M[:, row, 2 * e + 1] = S
                row += 1
            continue
        cp = spec.couplings[level]
        b = cp.b
        alpha, beta, g = float(cp.alpha), float(cp.beta), complex(cp.gamma)
        V = basis(b)
        U = np.exp(1j * np.asarray(cp.eigenphases))
        for i in range(counts[level]):
            e = offsets[level] + i
            kids = offsets[level + 1] + i * b + np.arange(b)
            A_in, B_in = 2 * e, 2 * e + 1
            A_out, B_out = 2 * kids, 2 * kids + 1
            # sum f'_+ - f'_- = alpha/2 (mean f_+ + f_-) + gamma/2 (sum f'_+ + f'_-)
            M[:, row, B_out] = 1 - g / 2
            M[:, row, A_out] = -alpha / (2 * b)
            M[:, row, A_in] = -(1 + g / 2) * Cp - alpha / 2 * C
            M[:, row, B_in] = -(1 + g / 2) * Sp - alpha / 2 * S
            row += 1
            # mean f_+ - f_- = -conj(gamma)/2 (mean f_+ + f_-) + beta/2 (sum f'_+ + f'_-)
            gb = g.conjugate()
            M[:, row, A_out] = (1 + gb / 2) / b
            M[:, row, B_out] = -beta / 2
            M[:, row, A_in] = -(1 - gb / 2) * C - beta / 2 * Cp
            M[:, row, B_in] = -(1 - gb / 2) * S - beta / 2 * Sp
            row += 1
            # (U - I) V f_+ + i (U + I) V f'_+ = 0, with U diagonal
            for s in range(b - 1):
                M[:, row, A_out] = (U[s] - 1) * V[s]
                M[:, row, B_out] = 1j * (U[s] + 1) * V[s]
                row += 1
    assert row == 2 * n_edges
    return M


def assemble_secular(
    spec: RadialTreeSpec,
    depth: int,
    energy: float,
    basis: Callable[[int], np.ndarray] = dft_basis,
) -> float:
    """Smallest singular value of the secular matrix at ``energy``."""
    M = secular_matrices(spec, depth, [energy], basis)[0]
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def tree_eigenvalues(
    spec: RadialTreeSpec,
    depth: int,
    window: tuple[float, float],
    grid: float = DEFAULT_DENSITY,
    *,
    basis: Callable[[int], np.ndarray] = dft_basis,
    sigma_rel_tol: float = SIGMA_REL_TOL,
    workers: int | None = None,
) -> list[tuple[float, int]]:
    """Eigenvalues ``(E, multiplicity)`` of the truncated tree inside ``window``.

    Local minima of the smallest singular value on the grid are refined by
    golden-section search and kept if they fall below
    ``sigma_rel_tol * ||M||``; the multiplicity is the number of singular
    values below that threshold.
    """
    energies = energy_grid(window, grid)

    def sv(e):
        return np.linalg.svd(secular_matrices(spec, depth, e, basis), compute_uv=False)

    svals = map_chunks(sv, energies, workers)
    smin = svals[:, -1]
    lo, hi = energies[0], energies[-1]
    found: list[tuple[float, int]] = []
    n = len(energies)
    for i in range(n):
        left = smin[i - 1] if i > 0 else np.inf
        right = smin[i + 1] if i + 1 < n else np.inf
        if not (smin[i] < left and smin[i] <= right):
            continue
        if 0 < i < n - 1:
            res = minimize_scalar(lambda e: sv(e)[0, -1], bracket=(energies[i - 1], energies[i], energies[i + 1]),
                                  method="golden", tol=1e-13)
            e0 = float(res.x)
        else:
            e0 = float(energies[i])
        if not (lo <= e0 <= hi):
            continue
        s = sv(e0)[0]
        thresh = sigma_rel_tol * s[0]
        if s[-1] < thresh:
            found.append((e0, int(np.sum(s < thresh))))
    return _merge(found)


def _merge(pairs: Sequence[tuple[float, int]], tol: float = MERGE_TOL) -> list[tuple[float, int]]:
    out: list[list] = []
    for e, m in sorted(pairs):
        if out and abs(e - out[-1][0]) <= tol * max(1.0, abs(e)):
            out[-1][1] += m
        else:
            out.append([e, m])
    return [(float(e), int(m)) for e, m in out]


@dataclass(frozen=True)
class HalflineComponent:
    generation: int
    index: int
    multiplicity: int
    system: HalflineSystem
    right_end: float


def halfline_components(spec: RadialTreeSpec, depth: int, tol: float = TOL) -> list[HalflineComponent]:
    """The halfline pieces of the truncated tree with their multiplicities.

    Component ``(0, 0)`` lives on ``[0, t_depth]`` with the root angle;
    component ``(n, s)`` lives on ``[t_n, t_depth]`` with boundary angle
    ``theta_{n,s} / 2`` from the ``s``-th eigenphase of ``U_n`` and appears
    ``b_0 ... b_{n-1}`` times.
    """
    spec.check_depth(depth)
    t = spec.positions
    interfaces = []
    for n in range(1, depth):
        try:
            interfaces.append(reduce_coupling(spec.couplings[n - 1], tol))
        except Exception as exc:
            if hasattr(exc, "generation"):
                exc.generation = n
            raise
    comps = [HalflineComponent(0, 0, 1,
                               HalflineSystem(0.0, t[1:depth], interfaces, spec.root_angle),
                               float(t[depth]))]
    mult = 1
    for n in range(1, depth):
        mult *= spec.branching(n - 1)
        cp = spec.couplings[n - 1]
        for s, theta in enumerate(cp.eigenphases, start=1):
            sys = HalflineSystem(float(t[n]), t[n + 1:depth], interfaces[n:], theta / 2)
            comps.append(HalflineComponent(n, s, mult, sys, float(t[depth])))
    return comps


def halfline_direct_sum_eigenvalues(
    spec: RadialTreeSpec,
    depth: int,
    window: tuple[float, float],
    grid: float = DEFAULT_DENSITY,
    *,
    workers: int | None = None,
) -> list[tuple[float, int]]:
    """Merged multiset ``(E, multiplicity)`` over all halfline components."""
    pairs = []
    for comp in halfline_components(spec, depth):
        for e in halfline_eigenvalues(comp.system, comp.right_end, window, grid, workers=workers):
            pairs.append((e, comp.multiplicity))
    return _merge(pairs)


@dataclass(frozen=True)
class SpectralComparison:
    window: tuple[float, float]
    tree: tuple[tuple[float, int], ...]
    direct_sum: tuple[tuple[float, int], ...]
    pairs: tuple[tuple[float, float], ...]
    max_mismatch: float
    tol: float

    @property
    def tree_count(self) -> int:
        return sum(m for _, m in self.tree)

    @property
    def direct_sum_count(self) -> int:
        return sum(m for _, m in self.direct_sum)

    @property
    def passed(self) -> bool:
        return self.tree_count == self.direct_sum_count and self.max_mismatch <= self.tol


def _expand(pairs: Sequence[tuple[float, int]]) -> list[float]:
    return [e for e, m in pairs for _ in range(m)]


def compare_spectra(
    spec: RadialTreeSpec,
    depth: int,
    window: tuple[float, float],
    grid: float = DEFAULT_DENSITY,
    tol: float = 1e-6,
    *,
    basis: Callable[[int], np.ndarray] = dft_basis,
    workers: int | None = None,
) -> SpectralComparison:
    """Match tree eigenvalues against the halfline direct sum (greedy nearest neighbour)."""
    tree = tree_eigenvalues(spec, depth, window, grid, basis=basis, workers=workers)
    dsum = halfline_direct_sum_eigenvalues(spec, depth, window, grid, workers=workers)
    a, b = _expand(tree), _expand(dsum)
    pairs = []
    remaining = list(b)
    for e in a:
        if not remaining:
            break
        j = min(range(len(remaining)), key=lambda k: abs(remaining[k] - e))
        pairs.append((e, remaining.pop(j)))
    mismatch = max((abs(x - y) for x, y in pairs), default=0.0)
    return SpectralComparison(tuple(map(float, window)), tuple(tree), tuple(dsum),
                              tuple(pairs), float(mismatch), tol)


def symmetric_halfline(
    spec: RadialTreeSpec,
    period: tuple[int, int] | None = None,
    tol: float = TOL,
) -> HalflineSystem:
    """Component ``(0, 0)`` over all listed generations, as an infinite periodic system.

    Point ``i`` is generation ``i + 1``.  Without an explicit ``period``
    (given in point indices) the eventual period is detected from the
    letters ``(gap before the point, interface coupling)``.
    """
    from .seqgen import detect_eventual_period

    n = len(spec.couplings)
    t = spec.positions
    interfaces = []
    for k, c in enumerate(spec.couplings, start=1):
        try:
            interfaces.append(reduce_coupling(c, tol))
        except Exception as exc:
            if hasattr(exc, "generation"):
                exc.generation = k
            raise
    if period is None:
        letters = [(float(spec.gaps[i]),) + interfaces[i].as_floats() for i in range(n)]
        max_q = max(1, (n - 1) // 3)
        max_p = max(0, n - 2 * max_q - 1)
        period = detect_eventual_period(letters, max_p, max_q) if n >= 3 else None
        if period is None:
            raise SpecValidationError("no eventual period detected in the listed generations")
    return HalflineSystem(0.0, t[1:n + 1], interfaces, spec.root_angle, period)
