"""Halfline systems with generalized point interactions and their transfer matrices.

Transfer matrices act on Cauchy data ``(u, u')``; both one-sided derivatives are
taken in the direction of increasing coordinate.  Functions accept scalar or
array energies: an array of shape ``S`` yields matrices of shape ``S + (2, 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .couplings import TOL, InterfaceCoupling, is_separating_interface
from .errors import Decoupled, NoPeriod, SpecValidationError

_SERIES_CUTOFF = 1e-8  # |z| * length**2 below this uses the Taylor series
_ON_POINT_TOL = 1e-12


def interface_batch(a, q, c, tol: float = TOL) -> np.ndarray:
    """Vectorized interface transfer matrices for coupling arrays ``a, q, c``.

    Raises :class:`Decoupled` (``generation`` = 1-based array index) at the
    first separating coupling.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    c = np.asarray(c, dtype=complex)
    sep = (np.abs(a * q + np.abs(c) ** 2 - 4) <= tol) & (np.abs(c.imag) <= tol)
    if np.any(sep):
        k = int(np.flatnonzero(sep.reshape(-1))[0])
        raise Decoupled("separating interface coupling has no transfer matrix", generation=k + 1)
    cb = np.conj(c)
    m00, m01, m10, m11 = 1 + cb / 2, -q / 2, -a / 2, 1 - c / 2
    n00, n01, n10, n11 = 1 - cb / 2, q / 2, a / 2, 1 + c / 2
    det = m00 * m11 - m01 * m10
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = (m11 * n00 - m01 * n10) / det
    out[..., 0, 1] = (m11 * n01 - m01 * n11) / det
    out[..., 1, 0] = (m00 * n10 - m10 * n00) / det
    out[..., 1, 1] = (m00 * n11 - m10 * n01) / det
    if np.all(c.imag == 0):
        return out.real.copy()
    return out


def interface_transfer(m: InterfaceCoupling, tol: float = TOL) -> np.ndarray:
    """Matrix ``T`` with ``(u, u')(t+) = T (u, u')(t-)`` across one interface.

    Real-valued when ``Im c == 0``.

    Raises
    ------
    Decoupled
        For separating couplings (``a*q + |c|^2 = 4`` and ``Im c = 0``), where
        the left and right Cauchy data are not related by any matrix.
    """
    if is_separating_interface(m, tol):
        raise Decoupled("separating interface coupling has no transfer matrix")
    a, q, c = m.as_floats()
    return interface_batch(a, q, c, tol=-1.0)


def interface_determinant(m: InterfaceCoupling) -> complex:
    """Closed form of ``det interface_transfer(m)``."""
    a, q, c = m.as_floats()
    s = a * q + abs(c) ** 2
    return (1 + 1j * c.imag - s / 4) / (1 - 1j * c.imag - s / 4)


def free_transfer(length, z) -> np.ndarray:
    """Transfer matrix of ``-u'' = z u`` over an interval of the given length.

    ``[[cos kl, sin(kl)/k], [-k sin kl, cos kl]]`` with ``k = sqrt(z)``;
    real energies stay in real arithmetic (hyperbolic form for ``z < 0``) and
    small ``|z| l^2`` switches to the Taylor series.  ``length`` and ``z``
    broadcast against each other.
    """
    length = np.asarray(length, dtype=float)
    if np.any(length <= 0):
        raise SpecValidationError(f"interval length must be positive, got {length}")
    z = np.asarray(z)
    z, length = np.broadcast_arrays(z, length)
    shape = z.shape
    z = z.reshape(-1)
    ell = length.reshape(-1)
    if np.iscomplexobj(z) and np.any(z.imag != 0):
        z = z.astype(complex)
        k = np.sqrt(z)
        cs = np.cos(k * ell)
        with np.errstate(divide="ignore", invalid="ignore"):
            sn = np.sin(k * ell) / k
    else:
        z = np.real(z).astype(float)
        cs = np.empty_like(z)
        sn = np.empty_like(z)
        pos = z > 0
        neg = z < 0
        k = np.sqrt(z[pos])
        cs[pos] = np.cos(k * ell[pos])
        sn[pos] = np.sin(k * ell[pos]) / k
        kap = np.sqrt(-z[neg])
        cs[neg] = np.cosh(kap * ell[neg])
        sn[neg] = np.sinh(kap * ell[neg]) / kap
    w = z * ell**2
    small = np.abs(w) < _SERIES_CUTOFF
    ws = w[small]
    cs[small] = 1 - ws / 2 + ws**2 / 24
    sn[small] = ell[small] * (1 - ws / 6 + ws**2 / 120)
    out = np.empty(z.shape + (2, 2), dtype=cs.dtype)
    out[:, 0, 0] = cs
    out[:, 0, 1] = sn
    out[:, 1, 0] = -z * sn
    out[:, 1, 1] = cs
    return out.reshape(shape + (2, 2))


@dataclass(frozen=True, eq=False)
class HalflineSystem:
    """Interaction points on ``[origin, inf)`` with a boundary condition at ``origin``.

    ``left_boundary`` is the angle ``theta`` of ``u'(origin) + tan(theta) u(origin) = 0``
    (``pi/2`` is Dirichlet).  With ``period_hint = (p, q)`` the points from
    index ``p`` on are declared periodic with ``q`` points per cell; the
    system is then treated as infinite, extending the cell beyond the listed
    points.  At least one full cell plus the following point must be listed.
    """

    origin: float
    points: np.ndarray
    couplings: tuple[InterfaceCoupling, ...]
    left_boundary: float = math.pi / 2
    period_hint: tuple[int, int] | None = None
    _a: np.ndarray = field(init=False, repr=False)
    _q: np.ndarray = field(init=False, repr=False)
    _c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1)
        cps = tuple(self.couplings)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "couplings", cps)
        object.__setattr__(self, "origin", float(self.origin))
        object.__setattr__(self, "left_boundary", float(self.left_boundary))
        if len(pts) != len(cps):
            raise SpecValidationError("points and couplings must have equal length")
        if not np.all(np.isfinite(pts)):
            raise SpecValidationError("points must be finite")
        if len(pts) and (pts[0] <= self.origin or np.any(np.diff(pts) <= 0)):
            raise SpecValidationError("points must be strictly increasing and right of the origin")
        if not (-math.pi / 2 < self.left_boundary <= math.pi / 2):
            raise SpecValidationError("left boundary angle must lie in (-pi/2, pi/2]")
        floats = [m.as_floats() for m in cps]
        object.__setattr__(self, "_a", np.array([f[0] for f in floats], dtype=float))
        object.__setattr__(self, "_q", np.array([f[1] for f in floats], dtype=float))
        object.__setattr__(self, "_c", np.array([f[2] for f in floats], dtype=complex))
        if self.period_hint is not None:
            p, q = (int(v) for v in self.period_hint)
            object.__setattr__(self, "period_hint", (p, q))
            if p < 0 or q < 1:
                raise SpecValidationError(f"invalid period hint {self.period_hint}")
            if p + q + 1 > len(pts):
                raise SpecValidationError("period hint needs one full cell plus one more listed point")
            period = pts[p + q] - pts[p]
            for i in range(p + q, len(pts)):
                j = i - q
                same = (
                    abs(pts[i] - pts[j] - period) <= 1e-9 * max(1.0, period)
                    and self._a[i] == self._a[j]
                    and self._q[i] == self._q[j]
                    and self._c[i] == self._c[j]
                )
                if not same:
                    raise SpecValidationError(f"listed data is not periodic at point index {i}")

    @classmethod
    def periodic(
        cls,
        cell_gaps: Sequence[float],
        cell_couplings: Sequence[InterfaceCoupling],
        n_cells: int = 2,
        *,
        origin: float = 0.0,
        left_boundary: float = math.pi / 2,
        preperiod_gaps: Sequence[float] = (),
        preperiod_couplings: Sequence[InterfaceCoupling] = (),
    ) -> "HalflineSystem":
        """Build an eventually periodic system.

        ``gaps[i]`` is the distance from the previous point (or the origin) to
        point ``i``; the spatial period is ``sum(cell_gaps)``.
        """
        if not cell_gaps or len(cell_gaps) != len(cell_couplings):
            raise SpecValidationError("cell gaps and couplings must be nonempty and aligned")
        if len(preperiod_gaps) != len(preperiod_couplings):
            raise SpecValidationError("preperiod gaps and couplings must be aligned")
        if n_cells < 2:
            raise SpecValidationError("at least two cells are needed")
        gaps = list(preperiod_gaps) + list(cell_gaps) * n_cells
        cps = list(preperiod_couplings) + list(cell_couplings) * n_cells
        pts = origin + np.cumsum(np.asarray(gaps, dtype=float))
        return cls(origin, pts, tuple(cps), left_boundary,
                   (len(preperiod_gaps), len(cell_gaps)))

    @property
    def is_periodic(self) -> bool:
        return self.period_hint is not None

    @property
    def period_length(self) -> float:
        if self.period_hint is None:
            raise NoPeriod("system carries no period hint")
        p, q = self.period_hint
        return float(self.points[p + q] - self.points[p])

    @property
    def min_gap(self) -> float:
        pts = np.concatenate([[self.origin], self.points])
        return float(np.min(np.diff(pts))) if len(pts) > 1 else math.inf

    def shifted(self, s: float) -> "HalflineSystem":
        return HalflineSystem(self.origin + s, self.points + s, self.couplings,
                              self.left_boundary, self.period_hint)

    # -- point data, periodically extended when a hint is present -------------

    def point_data(self, lo: int, hi: int):
        """Positions and ``(a, q, c)`` arrays for point indices ``lo .. hi-1``."""
        idx = np.arange(lo, hi)
        n = len(self.points)
        if self.period_hint is None:
            if hi > n:
                raise SpecValidationError(f"point index {hi - 1} beyond the {n} listed points")
            base = idx
            shift = np.zeros(len(idx))
        else:
            p, q = self.period_hint
            base = np.where(idx < p, idx, p + (idx - p) % q)
            shift = np.where(idx < p, 0, (idx - p) // q) * self.period_length
        return self.points[base] + shift, self._a[base], self._q[base], self._c[base]

    def _first_index_after(self, x: float, inclusive: bool) -> int:
        side = "left" if inclusive else "right"
        if self.period_hint is None or len(self.points) == 0:
            return int(np.searchsorted(self.points, x, side=side))
        p, q = self.period_hint
        if x < self.points[p]:
            return int(np.searchsorted(self.points[:p + 1], x, side=side))
        period = self.period_length
        cell = self.points[p:p + q] - self.points[p]
        m = math.floor((x - self.points[p]) / period)
        r = int(np.searchsorted(cell, x - self.points[p] - m * period, side=side))
        return p + m * q + r

    def index_range(self, start: float, end: float) -> tuple[int, int]:
        """Indices ``lo, hi`` such that points ``lo .. hi-1`` lie in ``(start, end)``."""
        lo = self._first_index_after(start, inclusive=False)
        hi = self._first_index_after(end, inclusive=True)
        return lo, max(lo, hi)

    def _check_not_on_point(self, x: float) -> None:
        i = self._first_index_after(x - _ON_POINT_TOL, inclusive=True)
        try:
            pos = self.point_data(i, i + 1)[0]
        except SpecValidationError:
            return
        if len(pos) and abs(pos[0] - x) <= _ON_POINT_TOL * max(1.0, abs(x)):
            raise SpecValidationError(f"{x} coincides with an interaction point")


class TransferChain:
    """Precomputed interface factors between two positions; evaluates at any energy."""

    def __init__(self, sys: HalflineSystem, start: float, end: float, tol: float = TOL):
        if not (sys.origin <= start < end):
            raise SpecValidationError(f"need origin <= start < end, got {start}, {end}")
        sys._check_not_on_point(start)
        sys._check_not_on_point(end)
        lo, hi = sys.index_range(start, end)
        pos, a, q, c = sys.point_data(lo, hi)
        try:
            self.mats = interface_batch(a, q, c, tol)
        except Decoupled as exc:
            k = exc.generation - 1
            raise Decoupled(
                f"separating coupling at t = {pos[k]:.17g}", generation=lo + k + 1
            ) from exc
        edges = np.concatenate([[start], pos, [end]])
        self.lengths = np.diff(edges)
        self.start, self.end = start, end

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z)
        out = free_transfer(self.lengths[0], z)
        for mat, ell in zip(self.mats, self.lengths[1:]):
            out = free_transfer(ell, z) @ (mat @ out)
        return out


def propagate(sys: HalflineSystem, z, start: float, end: float, tol: float = TOL) -> np.ndarray:
    """Transfer matrix from ``start`` to ``end`` (both off the interaction points)."""
    return TransferChain(sys, start, end, tol)(z)


def _cell(sys: HalflineSystem, tol: float):
    if sys.period_hint is None:
        raise NoPeriod("system carries no period hint")
    p, q = sys.period_hint
    pos, a, qq, c = sys.point_data(p, p + q)
    try:
        mats = interface_batch(a, qq, c, tol)
    except Decoupled as exc:
        raise Decoupled(exc.args[0], generation=p + exc.generation) from exc
    return pos, mats


def monodromy(sys: HalflineSystem, z, tol: float = TOL) -> np.ndarray:
    """Transfer over one period, from just left of the first periodic point."""
    pos, mats = _cell(sys, tol)
    ends = np.append(pos[1:], pos[0] + sys.period_length)
    z = np.asarray(z)
    out = np.broadcast_to(np.eye(2), z.shape + (2, 2)).copy()
    for t, t_next, mat in zip(pos, ends, mats):
        out = free_transfer(t_next - t, z) @ (mat @ out)
    return out


def periodic_cell_transfer(sys: HalflineSystem, z, basepoint: float, tol: float = TOL) -> np.ndarray:
    """Transfer over ``[basepoint, basepoint + period]`` in the two-sided periodic extension.

    The cell starting at point index ``p`` is repeated over the whole real
    line, so any ``basepoint`` off that lattice is allowed, including points
    left of the origin.
    """
    pos, mats = _cell(sys, tol)
    period = sys.period_length
    u = (basepoint - pos[0]) % period
    rel = (pos - pos[0]) - u
    rel = np.where(rel <= 0, rel + period, rel)
    scale = _ON_POINT_TOL * max(1.0, period)
    if np.any(np.abs(rel) <= scale) or np.any(np.abs(rel - period) <= scale):
        raise SpecValidationError(f"basepoint {basepoint} lies on the periodic lattice")
    order = np.argsort(rel)
    z = np.asarray(z)
    out = np.broadcast_to(np.eye(2), z.shape + (2, 2)).copy()
    x = 0.0
    for k in order:
        out = mats[k] @ (free_transfer(rel[k] - x, z) @ out)
        x = rel[k]
    return free_transfer(period - x, z) @ out
