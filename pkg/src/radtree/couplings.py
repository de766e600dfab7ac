"""Vertex couplings on the tree and the interface couplings they induce on the halfline.

A generation-``n`` vertex carries ``(alpha, beta, gamma, b, eigenphases)``.  The
radially symmetric part of the Laplacian only sees the interface triple
``(a, q, c)`` obtained from :func:`reduce_coupling`; :func:`reconstruct_coupling`
inverts that map on couplings with ``Re gamma = 0``.

Rational inputs (``int`` / ``fractions.Fraction``, real ``gamma``) combined with
a perfect-square branching number are reduced in exact arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import TYPE_CHECKING, Sequence

from .errors import DegenerateDenominator, EmptyPrefix, NonIntegerBranching, SpecValidationError

if TYPE_CHECKING:
    from .tree import RadialTreeSpec

TOL = 1e-9

Real = float | Fraction | int
Scalar = complex | float | Fraction | int


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _exact_sqrt(n: int) -> int | None:
    r = math.isqrt(n)
    return r if r * r == n else None


def _re(x) -> Real:
    return x if _is_rational(x) else complex(x).real


def _im(x) -> Real:
    return 0 if _is_rational(x) else complex(x).imag


def _finite(x) -> bool:
    if _is_rational(x):
        return True
    z = complex(x)
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class VertexCoupling:
    """Coupling data shared by all vertices of one generation.

    ``eigenphases`` are the angles of the eigenvalues of the unitary ``U``
    (``U = diag(exp(i*theta))`` in the canonical basis).  When omitted they
    default to ``pi`` (``U = -I``, continuity across the vertex).
    """

    alpha: Real
    beta: Real
    gamma: Scalar
    b: int
    eigenphases: tuple[float, ...] | None = None

    def __post_init__(self):
        if isinstance(self.b, bool) or int(self.b) != self.b or self.b < 1:
            raise SpecValidationError(f"branching number must be a positive integer, got {self.b!r}")
        object.__setattr__(self, "b", int(self.b))
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if isinstance(v, complex) or not _finite(v):
                raise SpecValidationError(f"{name} must be a finite real, got {v!r}")
        if not _finite(self.gamma):
            raise SpecValidationError(f"gamma must be finite, got {self.gamma!r}")
        phases = self.eigenphases
        if phases is None:
            phases = (math.pi,) * (self.b - 1)
        phases = tuple(float(t) for t in phases)
        if len(phases) != self.b - 1:
            raise SpecValidationError(
                f"expected {self.b - 1} eigenphases for b={self.b}, got {len(phases)}"
            )
        for t in phases:
            if not (-math.pi < t <= math.pi):
                raise SpecValidationError(f"eigenphase {t} outside (-pi, pi]")
        object.__setattr__(self, "eigenphases", phases)

    @property
    def gamma_complex(self) -> complex:
        return complex(self.gamma)


@dataclass(frozen=True)
class InterfaceCoupling:
    """Point-interaction triple ``(a, q, c)`` at one interaction point of the halfline."""

    a: Real
    q: Real
    c: Scalar = 0

    def __post_init__(self):
        for name in ("a", "q"):
            v = getattr(self, name)
            if isinstance(v, complex) or not _finite(v):
                raise SpecValidationError(f"{name} must be a finite real, got {v!r}")
        if not _finite(self.c):
            raise SpecValidationError(f"c must be finite, got {self.c!r}")

    @property
    def c_complex(self) -> complex:
        return complex(self.c)

    def as_floats(self) -> tuple[float, float, complex]:
        return float(self.a), float(self.q), complex(self.c)


def coupling_denominator(c: VertexCoupling) -> Real:
    """``4(sqrt b + 1)^2 + (alpha*beta + |gamma|^2)(sqrt b - 1)^2 + 4(1 - b) Re gamma``."""
    sb = _exact_sqrt(c.b)
    exact = sb is not None and all(_is_rational(v) for v in (c.alpha, c.beta, c.gamma))
    if not exact:
        sb = math.sqrt(c.b)
    g_re, g_im = _re(c.gamma), _im(c.gamma)
    s = c.alpha * c.beta + g_re * g_re + g_im * g_im
    return 4 * (sb + 1) ** 2 + s * (sb - 1) ** 2 + 4 * (1 - c.b) * g_re


def reduce_coupling(c: VertexCoupling, tol: float = TOL) -> InterfaceCoupling:
    """Interface coupling seen by the radially symmetric functions.

    Raises
    ------
    DegenerateDenominator
        If the common denominator vanishes (within ``tol``).
    """
    sb = _exact_sqrt(c.b)
    exact = sb is not None and all(_is_rational(v) for v in (c.alpha, c.beta, c.gamma))
    if exact:
        alpha, beta, g = Fraction(c.alpha), Fraction(c.beta), Fraction(c.gamma)
        s = alpha * beta + g * g
        den = 4 * (sb + 1) ** 2 + s * (sb - 1) ** 2 + 4 * (1 - c.b) * g
        if den == 0:
            raise DegenerateDenominator("coupling denominator vanishes")
        a = 16 * alpha / den
        q = 16 * c.b * beta / den
        cc = 2 * ((1 - c.b) * (4 + s) + 4 * (c.b + 1) * g) / den
        return InterfaceCoupling(a, q, cc)

    sb = math.sqrt(c.b)
    alpha, beta = float(c.alpha), float(c.beta)
    g = complex(c.gamma)
    s = alpha * beta + abs(g) ** 2
    den = 4 * (sb + 1) ** 2 + s * (sb - 1) ** 2 + 4 * (1 - c.b) * g.real
    if abs(den) <= tol:
        raise DegenerateDenominator(f"coupling denominator vanishes ({den!r})")
    a = 16 * alpha / den
    q = 16 * c.b * beta / den
    num = (1 - c.b) * (4 + s) + 4 * (c.b + 1) * g.real
    cc = complex(2 * num / den, 16 * sb * g.imag / den)
    return InterfaceCoupling(a, q, cc)


def reconstruct_coupling(m: InterfaceCoupling, tol: float = TOL) -> VertexCoupling:
    """Recover tree data from an interface triple, assuming ``Re gamma = 0``.

    Returns the ``Re gamma = 0`` representative of the fibre.  Eigenphases do
    not influence the interface triple, so they cannot be recovered; the
    result carries the default phases.
    """
    exact = all(_is_rational(v) for v in (m.a, m.q, m.c))
    a, q = m.a, m.q
    if exact:
        c_re, c_im = Fraction(m.c), Fraction(0)
    else:
        a, q = float(a), float(q)
        cz = complex(m.c)
        c_re, c_im = cz.real, cz.imag

    if (c_re == 0) if exact else abs(c_re) <= tol:
        s = a * q + c_re * c_re + c_im * c_im
        if (s + 4 == 0) if exact else abs(s + 4) <= tol:
            raise DegenerateDenominator("a*q + |c|^2 + 4 vanishes")
        gamma = Fraction(0) if exact else complex(0.0, c_im)
        return VertexCoupling(a, q, gamma, 1, ())

    num = (2 - c_re) ** 2 + c_im ** 2 + a * q
    den = (2 + c_re) ** 2 + c_im ** 2 + a * q
    if (den == 0) if exact else abs(den) <= tol:
        raise DegenerateDenominator("|2 + c|^2 + a*q vanishes")
    b_val = num / den
    b = round(b_val)
    if exact:
        if b_val != b or b < 2:
            raise NonIntegerBranching(f"branching number {b_val} is not an integer >= 2")
    elif b < 2 or abs(b_val - b) > tol * max(1.0, abs(b_val)):
        raise NonIntegerBranching(f"branching number {b_val!r} is not an integer >= 2")

    sb = _exact_sqrt(b) if exact else None
    if sb is None:
        sb = math.sqrt(b)
        a, q, c_re, c_im = float(a), float(q), float(c_re), float(c_im)
    den2 = c_re * (sb - 1) ** 2 - 2 * (1 - b)
    if (den2 == 0) if isinstance(den2, Fraction) else abs(den2) <= tol:
        raise DegenerateDenominator("Re c (sqrt b - 1)^2 - 2(1 - b) vanishes")
    scale = -32 * (1 - b) * sb / den2
    alpha = a * scale / 16
    beta = q * scale / (16 * b)
    im_gamma = c_im * scale / (16 * sb)
    if isinstance(alpha, Fraction):
        gamma: Scalar = Fraction(0)
    else:
        gamma = complex(0.0, im_gamma)
    return VertexCoupling(alpha, beta, gamma, b)


def is_separating_vertex(c: VertexCoupling, tol: float = TOL) -> bool:
    if _is_rational(c.alpha) and _is_rational(c.beta) and _is_rational(c.gamma):
        return c.alpha * c.beta + Fraction(c.gamma) ** 2 == 4
    g = complex(c.gamma)
    return abs(float(c.alpha) * float(c.beta) + abs(g) ** 2 - 4) <= tol and abs(g.imag) <= tol


def is_separating_interface(m: InterfaceCoupling, tol: float = TOL) -> bool:
    if _is_rational(m.a) and _is_rational(m.q) and _is_rational(m.c):
        return m.a * m.q + Fraction(m.c) ** 2 == 4
    cz = complex(m.c)
    return abs(float(m.a) * float(m.q) + abs(cz) ** 2 - 4) <= tol and abs(cz.imag) <= tol


def preset(kind: str, b: int, strength: float = 0.0) -> VertexCoupling:
    """Standard, delta or weighted delta-prime coupling for branching ``b``.

    ``strength`` is alpha for ``"delta"`` and beta for ``"delta_prime"``; it
    is ignored for ``"standard"``.
    """
    if kind == "standard":
        return VertexCoupling(0, 0, 0, b, (math.pi,) * (b - 1))
    if kind == "delta":
        return VertexCoupling(strength, 0, 0, b, (math.pi,) * (b - 1))
    if kind in ("delta_prime", "delta'"):
        return VertexCoupling(0, strength, 0, b, (0.0,) * (b - 1))
    raise SpecValidationError(f"unknown preset {kind!r}")


@dataclass(frozen=True)
class ConditionReport:
    """Finite-horizon evidence for the hypotheses of the periodicity theorem.

    A flag is ``False`` when an offending generation occurs at or after
    ``tail_start``; offences before it count as the finitely many allowed
    exceptions.  ``finite_horizon`` is always ``True``: nothing here proves
    anything about the infinite sequence.
    """

    horizon: int
    tail_start: int
    condition_a: bool
    condition_b: bool
    condition_c: bool
    condition_d: bool
    gap_bounded_below: bool
    tau: float
    distinct_counts: dict[str, int]
    offending_a: tuple[int, ...]
    offending_b: tuple[int, ...]
    offending_c: tuple[int, ...]
    offending_d: tuple[int, ...]
    finite_horizon: bool = field(default=True)

    @property
    def separating(self) -> tuple[int, ...]:
        return self.offending_b

    @property
    def all_pass(self) -> bool:
        return all(
            (self.condition_a, self.condition_b, self.condition_c, self.condition_d,
             self.gap_bounded_below)
        )


def _distinct_count(values: Sequence, tol: float = 1e-12) -> int:
    reps: list = []
    for v in values:
        if _is_rational(v) and any(_is_rational(r) and r == v for r in reps):
            continue
        if not any(abs(complex(v) - complex(r)) <= tol for r in reps):
            reps.append(v)
    return len(reps)


def check_conditions(
    spec: "RadialTreeSpec",
    horizon: int,
    *,
    tail_start: int | None = None,
    max_distinct: int | None = None,
    tol: float = TOL,
) -> ConditionReport:
    """Evaluate the theorem's conditions (a)-(d) on generations ``1..horizon``.

    ``tail_start`` (default ``horizon // 2 + 1``) separates tolerated early
    exceptions from offences that count against a condition.  Condition (a)
    additionally fails if ``max_distinct`` is given and any of the gap,
    branching or coupling sequences takes more distinct values than that.
    """
    if horizon <= 0:
        raise EmptyPrefix("horizon must be positive")
    if horizon > len(spec.couplings):
        raise SpecValidationError(
            f"horizon {horizon} exceeds the {len(spec.couplings)} available generations"
        )
    if tail_start is None:
        tail_start = horizon // 2 + 1
    gens = list(range(1, horizon + 1))
    cs = [spec.couplings[n - 1] for n in gens]

    counts = {
        "gap": _distinct_count(list(spec.gaps[1:horizon + 1])),
        "b": _distinct_count([c.b for c in cs]),
        "alpha": _distinct_count([c.alpha for c in cs]),
        "beta": _distinct_count([c.beta for c in cs]),
        "gamma": _distinct_count([c.gamma for c in cs]),
    }
    off_a = tuple(n for n, c in zip(gens, cs) if c.b == 1)
    off_b = tuple(n for n, c in zip(gens, cs) if is_separating_vertex(c, tol))
    off_c = []
    off_d = []
    for n, c in zip(gens, cs):
        den = coupling_denominator(c)
        if (den == 0) if isinstance(den, Fraction) else abs(den) <= tol:
            off_c.append(n)
        g = complex(c.gamma)
        s = float(c.alpha) * float(c.beta) + abs(g) ** 2
        if abs(g.real) > tol or abs(s + 4) <= tol:
            off_d.append(n)

    def ok(offenders) -> bool:
        return not any(n >= tail_start for n in offenders)

    cond_a = ok(off_a)
    if max_distinct is not None and max(counts.values()) > max_distinct:
        cond_a = False
    tau = float(min(spec.gaps[: horizon + 1]))
    return ConditionReport(
        horizon=horizon,
        tail_start=tail_start,
        condition_a=cond_a,
        condition_b=ok(off_b),
        condition_c=ok(off_c),
        condition_d=ok(off_d),
        gap_bounded_below=tau > 0,
        tau=tau,
        distinct_counts=counts,
        offending_a=off_a,
        offending_b=off_b,
        offending_c=tuple(off_c),
        offending_d=tuple(off_d),
    )
