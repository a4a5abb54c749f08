"""Integer partitions indexing Jack polynomials.

A :class:`Partition` is a weakly decreasing tuple of positive integers.
Trailing zeros are stripped on construction, so ``Partition((2, 1, 0))``
equals ``Partition((2, 1))`` and a part past the length reads as zero.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator


class Partition(tuple):
    """Weakly decreasing tuple of positive integers (immutable, hashable)."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = [int(p) for p in parts]
        while parts and parts[-1] == 0:
            parts.pop()
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def part(self, i: int) -> int:
        """1-based part, zero past the length."""
        return self[i - 1] if 1 <= i <= len(self) else 0

    def padded(self, k: int) -> tuple[int, ...]:
        if len(self) > k:
            raise ValueError(f"{self} has more than {k} parts")
        return tuple(self) + (0,) * (k - len(self))

    def __repr__(self) -> str:
        return f"Partition({tuple(self)!r})"

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self)) + ")" if self else "()"

    def to_json(self) -> str:
        return json.dumps(list(self))

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        return cls(json.loads(text))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"2,1"``, ``"[2,1]"`` or ``""`` (empty partition)."""
        text = text.strip().strip("[]()")
        if not text:
            return cls()
        return cls(int(p) for p in text.split(","))


EMPTY = Partition()


def lower(kappa: Partition, i: int) -> Partition | None:
    """Decrement part ``i`` (1-based) of ``kappa``.

    Returns ``None`` when the result is not weakly decreasing; callers treat
    that as a zero contribution.
    """
    if not 1 <= i <= len(kappa):
        raise IndexError(f"index {i} out of range for {kappa}")
    parts = list(kappa)
    parts[i - 1] -= 1
    if i < len(parts) and parts[i - 1] < parts[i]:
        return None
    return Partition(parts)


def lowerings(kappa: Partition) -> Iterator[tuple[int, Partition]]:
    """Yield ``(i, lower(kappa, i))`` for every index where lowering is valid."""
    for i in range(1, len(kappa) + 1):
        mu = lower(kappa, i)
        if mu is not None:
            yield i, mu


def sort_key(mu: Partition) -> tuple:
    """Key for the canonical weight-major, lexicographically descending order."""
    return (-mu.weight, tuple(-p for p in mu))


def sub_partitions(kappa: Partition, max_length: int | None = None) -> list[Partition]:
    """All partitions contained in ``kappa`` (componentwise), ``kappa`` and the
    empty partition included, sorted by weight descending then lex descending.
    """
    if max_length is None:
        max_length = len(kappa)
    if max_length < len(kappa):
        raise ValueError("max_length must be at least the length of kappa")
    out: list[Partition] = []

    def rec(prefix: list[int], i: int, cap: int):
        out.append(Partition(prefix))
        if i >= len(kappa):
            return
        for p in range(1, min(cap, kappa[i]) + 1):
            rec(prefix + [p], i + 1, p)

    rec([], 0, kappa[0] if kappa else 0)
    return sorted(out, key=sort_key)


def partitions_of(n: int, max_length: int | None = None, max_part: int | None = None) -> list[Partition]:
    """Partitions of ``n`` in lexicographically descending order."""
    if max_length is None:
        max_length = n
    if max_part is None:
        max_part = n
    out: list[Partition] = []

    def rec(prefix: list[int], rest: int, cap: int):
        if rest == 0:
            out.append(Partition(prefix))
            return
        if len(prefix) == max_length:
            return
        for p in range(min(cap, rest), 0, -1):
            rec(prefix + [p], rest - p, p)

    rec([], n, max_part)
    return out


def dominates(kappa: Partition, mu: Partition) -> bool:
    """True if ``kappa >= mu`` in dominance order (equal weights required)."""
    if kappa.weight != mu.weight:
        return False
    a = b = 0
    for i in range(max(len(kappa), len(mu))):
        a += kappa.part(i + 1)
        b += mu.part(i + 1)
        if a < b:
            return False
    return True


def contained(mu: Partition, kappa: Partition) -> bool:
    return len(mu) <= len(kappa) and all(m <= kappa[i] for i, m in enumerate(mu))
