"""Coupling-data words: periodic, power-of-two marked, substitution; eventual-period detection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .errors import EmptyBlock, SpecValidationError, UndefinedLetter, WindowTooShort

LETTER_TOL = 1e-12


def _flatten(letter) -> tuple:
    """Numeric leaves of a letter, for tolerance comparison."""
    if isinstance(letter, (tuple, list)):
        return tuple(x for part in letter for x in _flatten(part))
    fields = getattr(letter, "__dataclass_fields__", None)
    if fields is not None:
        return tuple(x for name in fields for x in _flatten(getattr(letter, name)))
    return (letter,)


def letters_equal(x, y, tol: float = LETTER_TOL) -> bool:
    if x == y:
        return True
    fx, fy = _flatten(x), _flatten(y)
    if len(fx) != len(fy):
        return False
    for u, v in zip(fx, fy):
        if u == v:
            continue
        try:
            if abs(complex(u) - complex(v)) > tol:
                return False
        except (TypeError, ValueError):
            return False
    return True


def _sort_key(letter):
    key = []
    for x in _flatten(letter):
        try:
            z = complex(x)
            key.append((0, z.real, z.imag, ""))
        except (TypeError, ValueError):
            key.append((1, 0.0, 0.0, str(x)))
    return tuple(key)


@dataclass(frozen=True)
class DataWord:
    """A finite word over a finite alphabet, indexed from generation 1.

    ``codes[i]`` is the alphabet index of ``letters[i]``; letters equal
    within ``LETTER_TOL`` share a code.
    """

    letters: tuple
    alphabet: tuple
    codes: tuple[int, ...]

    @classmethod
    def from_letters(cls, letters: Sequence[Hashable], tol: float = LETTER_TOL) -> "DataWord":
        reps: list = []
        for x in letters:
            if not any(letters_equal(x, r, tol) for r in reps):
                reps.append(x)
        reps.sort(key=_sort_key)
        codes = []
        for x in letters:
            codes.append(next(i for i, r in enumerate(reps) if letters_equal(x, r, tol)))
        return cls(tuple(letters), tuple(reps), tuple(codes))

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, generation: int):
        """Letter at ``generation`` (1-based)."""
        if generation < 1:
            raise IndexError("generations start at 1")
        return self.letters[generation - 1]

    def shifted(self, k: int = 1) -> "DataWord":
        return DataWord.from_letters(self.letters[k:])


def periodic_word(block: Sequence, preperiod: Sequence = (), length: int = 0) -> DataWord:
    if not block:
        raise EmptyBlock("periodic block must be nonempty")
    pre = list(preperiod)[:length]
    body = [block[i % len(block)] for i in range(max(0, length - len(pre)))]
    return DataWord.from_letters(pre + body)


def power2_word(special, default, length: int) -> DataWord:
    """``special`` at generations 2, 4, 8, 16, ...; ``default`` elsewhere."""
    if length < 1:
        raise SpecValidationError("length must be positive")
    letters = []
    for n in range(1, length + 1):
        is_pow2 = n >= 2 and n & (n - 1) == 0
        letters.append(special if is_pow2 else default)
    return DataWord.from_letters(letters)


def substitution_word(
    rules: Mapping[Hashable, Sequence[Hashable]],
    seed: Hashable,
    iterations: int,
    letters: Mapping[Hashable, object] | None = None,
) -> DataWord:
    """Iterate a substitution from ``seed``; ``letters`` optionally maps symbols to data tuples."""
    word = [seed]
    for _ in range(iterations):
        nxt = []
        for sym in word:
            if sym not in rules:
                raise UndefinedLetter(f"no substitution rule for {sym!r}")
            nxt.extend(rules[sym])
        word = nxt
    if letters is not None:
        missing = [s for s in set(word) if s not in letters]
        if missing:
            raise UndefinedLetter(f"no data for symbols {sorted(map(str, missing))}")
        word = [letters[s] for s in word]
    return DataWord.from_letters(word)


def detect_eventual_period(word: DataWord | Sequence, max_preperiod: int,
                           max_period: int) -> tuple[int, int] | None:
    """Smallest ``(p, q)``, ordered by ``q`` then ``p``, with ``w[i] == w[i + q]`` for ``i >= p``.

    ``p`` counts letters before the periodic tail.  Requires at least two full
    periods past the largest preperiod.
    """
    if not isinstance(word, DataWord):
        word = DataWord.from_letters(list(word))
    codes = word.codes
    n = len(codes)
    if max_period < 1 or max_preperiod < 0:
        raise SpecValidationError("bounds must satisfy max_period >= 1, max_preperiod >= 0")
    if max_preperiod + 2 * max_period > n:
        raise WindowTooShort(
            f"word of length {n} too short for bounds ({max_preperiod}, {max_period})"
        )
    for q in range(1, max_period + 1):
        # last index i >= 0 with codes[i] != codes[i + q]; the tail after it is periodic
        last_bad = -1
        for i in range(n - q - 1, -1, -1):
            if codes[i] != codes[i + q]:
                last_bad = i
                break
        p = last_bad + 1
        if p <= max_preperiod:
            return p, q
    return None
