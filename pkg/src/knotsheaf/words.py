"""Free-group words over the meridian generators ``m1 .. mN``.

A word is a tuple of ``(generator, exponent)`` letters with 1-based generator
indices and exponents ``+1``/``-1``.  Every public constructor returns a freely
reduced word; group-element equality beyond free reduction is only ever tested
through matrix representations.
"""

from __future__ import annotations

import random
import re
from typing import Iterable, Sequence

from .errors import WordSyntaxError

Letter = tuple[int, int]

_TOKEN = re.compile(r"^m(\d+)(?:\^(-?\d+))?$")


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for g, e in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


class GroupWord:
    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Sequence[int]] = ()):
        norm = []
        for g, e in letters:
            g, e = int(g), int(e)
            if g < 1:
                raise ValueError(f"generator index {g} must be >= 1")
            if e == 0:
                continue
            step = 1 if e > 0 else -1
            norm.extend([(g, step)] * abs(e))
        self.letters = _free_reduce(norm)

    @classmethod
    def gen(cls, g: int, e: int = 1) -> "GroupWord":
        return cls([(g, e)])

    @classmethod
    def identity(cls) -> "GroupWord":
        return cls()

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        """Parse ``m1*m2^-1*m1``; ``e`` or an empty string is the identity."""
        text = text.strip()
        if text in ("", "e", "1"):
            return cls()
        letters = []
        for tok in text.replace(" ", "").split("*"):
            match = _TOKEN.match(tok)
            if not match:
                raise WordSyntaxError(f"bad letter {tok!r} in {text!r}")
            g = int(match.group(1))
            e = int(match.group(2)) if match.group(2) is not None else 1
            if g < 1:
                raise WordSyntaxError(f"generator index must be >= 1 in {tok!r}")
            letters.append((g, e))
        return cls(letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return concat(self, other)

    def __pow__(self, k: int) -> "GroupWord":
        base = self if k >= 0 else invert(self)
        return GroupWord(base.letters * abs(k))

    def inverse(self) -> "GroupWord":
        return invert(self)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, GroupWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        # collapse runs into powers for readability
        parts = []
        i = 0
        while i < len(self.letters):
            g, e = self.letters[i]
            j = i
            while j < len(self.letters) and self.letters[j] == (g, e):
                j += 1
            k = (j - i) * e
            parts.append(f"m{g}" if k == 1 else f"m{g}^{k}")
            i = j
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"GroupWord({str(self)!r})"


def reduce(w: GroupWord | Iterable[Letter]) -> GroupWord:
    letters = w.letters if isinstance(w, GroupWord) else w
    return GroupWord(letters)


def concat(a: GroupWord, b: GroupWord) -> GroupWord:
    return GroupWord(a.letters + b.letters)


def invert(w: GroupWord) -> GroupWord:
    return GroupWord((g, -e) for g, e in reversed(w.letters))


def product(words: Iterable[GroupWord]) -> GroupWord:
    letters: list[Letter] = []
    for w in words:
        letters.extend(w.letters)
    return GroupWord(letters)


def linking_number(w: GroupWord) -> int:
    """Exponent sum, i.e. the image of ``w`` in the abelianization ``Z``."""
    return sum(e for _, e in w.letters)


def random_word(n_generators: int, max_length: int, rng: random.Random) -> GroupWord:
    """A reduced word of length at most ``max_length`` (uniform over raw letter strings)."""
    length = rng.randint(0, max_length)
    return GroupWord((rng.randint(1, n_generators), rng.choice((1, -1))) for _ in range(length))
