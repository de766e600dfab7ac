"""Reproducible checks of the closed-form examples (presets and the two counterexamples)."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .couplings import (
    InterfaceCoupling,
    VertexCoupling,
    check_conditions,
    preset,
    reduce_coupling,
)
from .halfline import interface_transfer
from .seqgen import detect_eventual_period, power2_word
from .tree import RadialTreeSpec


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _triple(m: InterfaceCoupling) -> tuple:
    return m.a, m.q, m.c


def _close(m: InterfaceCoupling, target: tuple, tol: float = 1e-12) -> bool:
    got = m.as_floats()
    return all(abs(complex(g) - complex(t)) <= tol for g, t in zip(got, target))


def _fmt(m: InterfaceCoupling) -> str:
    return "(" + ", ".join(str(v) for v in _triple(m)) + ")"


def gamma_counterexample(length: int = 64) -> RadialTreeSpec:
    """alpha = beta = 0; (gamma, b) = (2/3, 4) at n = 2^k, (1, 9) elsewhere."""
    word = power2_word(VertexCoupling(0, 0, Fraction(2, 3), 4), VertexCoupling(0, 0, 1, 9), length)
    return RadialTreeSpec((1,) * (length + 1), word.letters)


def branching_counterexample(length: int = 64) -> RadialTreeSpec:
    """(4, -1, 0, 4) at n = 2^k, (6, -2/3, 0, 9) elsewhere."""
    word = power2_word(VertexCoupling(4, -1, 0, 4), VertexCoupling(6, Fraction(-2, 3), 0, 9), length)
    return RadialTreeSpec((1,) * (length + 1), word.letters)


def run_checks() -> list[Check]:
    out: list[Check] = []
    for data, target in [
        ((0, 0, Fraction(2, 3), 4), (0, 0, 0)),
        ((0, 0, 1, 9), (0, 0, 0)),
        ((4, -1, 0, 4), (2, -2, 0)),
        ((6, Fraction(-2, 3), 0, 9), (2, -2, 0)),
    ]:
        m = reduce_coupling(VertexCoupling(*data))
        out.append(Check(f"reduce{tuple(str(x) for x in data)}", _close(m, target),
                         f"got {_fmt(m)}, expected {target}"))

    m = reduce_coupling(preset("standard", 4))
    out.append(Check("reduce(standard, b=4)", _close(m, (0, 0, Fraction(-2, 3))),
                     f"got {_fmt(m)}, expected (0, 0, -2/3)"))

    T = interface_transfer(InterfaceCoupling(2, -2, 0))
    out.append(Check("interface(2, -2, 0): u(t+) = -u'(t-), u'(t+) = u(t-)",
                     bool(np.allclose(T, [[0, -1], [1, 0]], atol=1e-14)),
                     f"T = {T.tolist()}"))

    g = check_conditions(gamma_counterexample(), 64)
    out.append(Check("gamma counterexample: (a)-(c) hold, (d) fails",
                     g.condition_a and g.condition_b and g.condition_c and not g.condition_d
                     and len(g.offending_d) == 64,
                     f"offending (d) generations: {len(g.offending_d)}"))
    images = {_triple(reduce_coupling(c)) for c in gamma_counterexample().couplings}
    out.append(Check("gamma counterexample: every interface triple is (0, 0, 0)",
                     images == {(0, 0, 0)}, f"distinct images: {len(images)}"))
    word = power2_word("s", "d", 64)
    out.append(Check("power-of-two word (64 letters) has no eventual period (32, 16)",
                     detect_eventual_period(word, 32, 16) is None, "searched p <= 32, q <= 16"))

    s = check_conditions(branching_counterexample(), 64)
    out.append(Check("branching counterexample: (b), (c) hold, (d) fails via alpha*beta+|gamma|^2+4 = 0",
                     s.condition_b and s.condition_c and not s.condition_d
                     and len(s.offending_d) == 64,
                     f"offending (d) generations: {len(s.offending_d)}"))
    images = {_triple(reduce_coupling(c)) for c in branching_counterexample().couplings}
    out.append(Check("branching counterexample: every interface triple is (2, -2, 0)",
                     images == {(2, -2, 0)}, f"distinct images: {len(images)}"))

    for kind, strength in [("standard", 0.0), ("delta", 1.5), ("delta_prime", -0.5)]:
        spec = RadialTreeSpec((1.0,) * 9, (preset(kind, 2, strength),) * 8)
        r = check_conditions(spec, 8)
        out.append(Check(f"{kind} preset, b = 2: conditions (a)-(d) hold", r.all_pass,
                         f"offending: a={r.offending_a} b={r.offending_b} c={r.offending_c} d={r.offending_d}"))
    c = reduce_coupling(preset("standard", 2)).c_complex.real
    out.append(Check("standard preset, b = 2: c = 2(1 - sqrt 2)/(1 + sqrt 2)",
                     math.isclose(c, 2 * (1 - math.sqrt(2)) / (1 + math.sqrt(2)), abs_tol=1e-14),
                     f"c = {c!r}"))
    return out
