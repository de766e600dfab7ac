import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radtree import (
    DataWord,
    EmptyBlock,
    UndefinedLetter,
    WindowTooShort,
    detect_eventual_period,
    periodic_word,
    power2_word,
    substitution_word,
)


def brute_force(codes, max_pre, max_per):
    """Reference: first (p, q) by q then p with codes[i] == codes[i + q] for all i >= p."""
    n = len(codes)
    for q in range(1, max_per + 1):
        for p in range(0, max_pre + 1):
            if all(codes[i] == codes[i + q] for i in range(p, n - q)):
                return p, q
    return None


def test_power2_layout():
    w = power2_word("s", "d", 17)
    assert [n for n in range(1, 18) if w[n] == "s"] == [2, 4, 8, 16]
    assert w[1] == "d"


@pytest.mark.parametrize("L", [32, 64, 128])
def test_power2_not_eventually_periodic(L):
    w = power2_word("s", "d", L)
    assert detect_eventual_period(w, L // 2, L // 4) is None
    assert brute_force(w.codes, L // 2, L // 4) is None


def test_periodic_word_detection():
    w = periodic_word(["a", "b", "c"], ["x", "y"], 30)
    assert detect_eventual_period(w, 10, 8) == (2, 3)


def test_block_repetition_reports_primitive_period():
    w = periodic_word(["a", "b", "a", "b"], [], 24)
    assert detect_eventual_period(w, 5, 6) == (0, 2)


@settings(max_examples=200, deadline=None)
@given(
    block=st.lists(st.integers(0, 3), min_size=1, max_size=5),
    pre=st.lists(st.integers(0, 3), max_size=6),
)
def test_detector_matches_brute_force(block, pre):
    w = periodic_word(block, pre, 40)
    got = detect_eventual_period(w, 12, 8)
    assert got == brute_force(w.codes, 12, 8)
    assert got is not None
    p, q = got
    assert len(block) % q == 0 and p <= len(pre)


@settings(max_examples=100, deadline=None)
@given(
    block=st.lists(st.integers(0, 3), min_size=1, max_size=5),
    pre=st.lists(st.integers(0, 3), max_size=6),
)
def test_shift_consistency(block, pre):
    w = periodic_word(block, pre, 40)
    p, q = detect_eventual_period(w, 12, 8)
    assert detect_eventual_period(w.shifted(1), 12, 8) == (max(p - 1, 0), q)


def test_fibonacci_word():
    w = substitution_word({"a": "ab", "b": "a"}, "a", 8)
    assert len(w) == 55
    assert "".join(w.letters[:13]) == "abaababaabaab"
    assert detect_eventual_period(w, 20, 10) is None


def test_substitution_with_data():
    w = substitution_word({"a": "ab", "b": "a"}, "a", 3, letters={"a": (1.0, 2), "b": (0.5, 3)})
    assert w.letters == ((1.0, 2), (0.5, 3), (1.0, 2), (1.0, 2), (0.5, 3))
    assert w.alphabet == ((0.5, 3), (1.0, 2))


def test_tolerant_alphabet():
    w = DataWord.from_letters([(1.0,), (1.0 + 1e-14,), (2.0,)])
    assert w.codes == (0, 0, 1)


def test_errors():
    with pytest.raises(EmptyBlock):
        periodic_word([], [], 10)
    with pytest.raises(UndefinedLetter):
        substitution_word({"a": "ac"}, "a", 2)
    with pytest.raises(UndefinedLetter):
        substitution_word({"a": "ab", "b": "a"}, "a", 2, letters={"a": 1})
    with pytest.raises(WindowTooShort):
        detect_eventual_period(power2_word(0, 1, 10), 5, 4)


def test_random_planted_periods():
    rng = random.Random(11)
    for _ in range(100):
        q = rng.randint(1, 6)
        while True:
            block = [rng.randint(0, 3) for _ in range(q)]
            if all(block != block[d:] + block[:d] for d in range(1, q)):
                break
        p = rng.randint(0, 8)
        pre = [rng.randint(0, 3) for _ in range(p)]
        if p and pre[-1] == block[-1]:
            pre[-1] = (block[-1] + 1) % 4
        w = periodic_word(block, pre, 48)
        assert detect_eventual_period(w, 10, 8) == (p, q)
