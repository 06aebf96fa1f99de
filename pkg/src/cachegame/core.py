"""Game objects, rules of play, and closed-form bounds.

The multiple caching game: a hider distributes ``d`` indistinguishable
treasures among ``n`` boxes, then a searcher repeatedly names a set of ``k``
boxes.  If the named set holds at least one treasure, one treasure inside it
is revealed and removed; otherwise the searcher loses on the spot.  The
searcher wins once all ``d`` treasures have been extracted.

Variants differ only in who picks the surrendered treasure when the query
covers several:

* ``ADVERSARY`` -- the hider picks, trying to make the searcher lose.
* ``RANDOM`` -- one of the covered treasures is revealed uniformly at random
  (uniform over treasures, not boxes: a box holding two of the three covered
  treasures surrenders with probability 2/3).
* ``COOPERATIVE`` -- the revealer follows a rule agreed with the searcher in
  advance.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class Variant(str, Enum):
    ADVERSARY = "adversary"
    RANDOM = "random"
    COOPERATIVE = "cooperative"


@dataclass(frozen=True)
class GameSpec:
    """One game: box count ``n``, treasure count ``d``, query size ``k``."""

    n: int
    d: int
    k: int
    variant: Variant = Variant.ADVERSARY

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one box, got n={self.n}")
        if self.d < 1:
            raise ValueError(f"need at least one treasure, got d={self.d}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"query size must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class Allocation:
    """A placement of treasures: ``counts[i]`` treasures sit in box ``i``."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative treasure count in {self.counts}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> list[int]:
        return list(self.counts)

    @classmethod
    def from_json(cls, data: list[int]) -> "Allocation":
        return cls(tuple(data))


@dataclass(frozen=True)
class Query:
    """A set of queried boxes, kept as a strictly increasing index tuple."""

    boxes: tuple[int, ...]

    def __post_init__(self) -> None:
        boxes = tuple(int(b) for b in self.boxes)
        object.__setattr__(self, "boxes", boxes)
        if any(b < 0 for b in boxes):
            raise ValueError(f"negative box index in {boxes}")
        if any(a >= b for a, b in zip(boxes, boxes[1:])):
            raise ValueError(f"query boxes must be strictly increasing, got {boxes}")
        if not boxes:
            raise ValueError("empty query")

    def __contains__(self, box: int) -> bool:
        return box in self.boxes

    def __len__(self) -> int:
        return len(self.boxes)

    def to_json(self) -> list[int]:
        return list(self.boxes)

    @classmethod
    def from_json(cls, data: list[int]) -> "Query":
        return cls(tuple(data))


@dataclass(frozen=True)
class GameState:
    """Remaining treasures plus the full query/reveal history so far."""

    remaining: Allocation
    history: tuple[tuple[Query, int], ...] = ()
    treasures_found: int = 0


def enumerate_allocations(n: int, d: int) -> list[Allocation]:
    """All placements of ``d`` treasures into ``n`` boxes, lexicographic.

    There are C(n+d-1, d) of them; ``d = 0`` yields the single empty
    placement.  The fixed order matters: downstream linear programs index
    their columns by it.
    """
    if n < 1:
        raise ValueError(f"need at least one box, got n={n}")
    if d < 0:
        raise ValueError(f"negative treasure count d={d}")
    out: list[Allocation] = []

    def rec(prefix: tuple[int, ...], left: int) -> None:
        if len(prefix) == n - 1:
            out.append(Allocation(prefix + (left,)))
            return
        for c in range(left + 1):
            rec(prefix + (c,), left - c)

    rec((), d)
    return out


def legal_reveals(state: GameState, q: Query, variant: Variant) -> list[tuple[int, Fraction]]:
    """Possible reveals for query ``q``: ``(box, weight)`` pairs.

    Under ``RANDOM`` the weights are the exact reveal probabilities,
    proportional to the treasures each box contributes to the query (they
    sum to one).  Under ``ADVERSARY``/``COOPERATIVE`` the choosing agent is a
    player, so every treasure-holding box is listed with marker weight 1.
    An empty list means the query found nothing: terminal loss.
    """
    counts = state.remaining.counts
    positive = [b for b in q.boxes if counts[b] > 0]
    if not positive:
        return []
    if variant == Variant.RANDOM:
        total = sum(counts[b] for b in positive)
        return [(b, Fraction(counts[b], total)) for b in positive]
    return [(b, Fraction(1)) for b in positive]


def apply_move(state: GameState, q: Query, revealed_box: int) -> GameState:
    """Return the state after ``revealed_box`` surrenders one treasure.

    Pure: the input state is never modified.  Violating the preconditions
    (box not in the query, or empty) is a programming error and raises.
    """
    if revealed_box not in q:
        raise ValueError(f"revealed box {revealed_box} is not in query {q.boxes}")
    counts = state.remaining.counts
    if counts[revealed_box] <= 0:
        raise ValueError(f"revealed box {revealed_box} holds no treasure in {counts}")
    new_counts = list(counts)
    new_counts[revealed_box] -= 1
    return GameState(
        remaining=Allocation(tuple(new_counts)),
        history=state.history + ((q, revealed_box),),
        treasures_found=state.treasures_found + 1,
    )


# ---------------------------------------------------------------------------
# Closed-form bounds on the searcher's winning probability.
# ---------------------------------------------------------------------------


def upper_bound_combinatorial(n: int, d: int, k: int) -> Fraction:
    """k^d / C(n+d-1, d): no searcher beats this against a uniform hider."""
    _check_params(n, d, k)
    return Fraction(k**d, math.comb(n + d - 1, d))


def upper_bound_first_query(n: int, k: int) -> Fraction:
    """k/n: hiding everything in one box caps the very first query."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return Fraction(k, n)


def lower_bound_infinite_d(n: int, k: int) -> Fraction:
    """A positive winning probability independent of the treasure count.

    The follow-the-last-reveal strategy (re-query the box that just paid,
    plus k-1 uniformly random other boxes) guarantees at least

        (k/n) * prod_{i=k}^{n-1} (1 - C(i-1, k-1) / C(n-1, k-1))

    for every d, provided k >= 2.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    value = Fraction(k, n)
    denom = math.comb(n - 1, k - 1)
    for i in range(k, n):
        value *= 1 - Fraction(math.comb(i - 1, k - 1), denom)
    return value


def _check_params(n: int, d: int, k: int) -> None:
    if n < 1 or d < 1 or not 1 <= k <= n:
        raise ValueError(f"invalid game parameters n={n}, d={d}, k={k}")


# ---------------------------------------------------------------------------
# Shared combinatorial helpers.
# ---------------------------------------------------------------------------


def partitions(d: int, max_parts: int) -> list[tuple[int, ...]]:
    """Weakly decreasing positive tuples summing to ``d`` with at most
    ``max_parts`` entries; these index the box-permutation orbits of
    allocations.  ``d = 0`` yields the empty tuple."""
    if d == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], left: int, cap: int) -> None:
        if left == 0:
            out.append(prefix)
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(cap, left), 0, -1):
            rec(prefix + (part,), left - part, part)

    rec((), d, d)
    return out


def pattern_multiplicity(pattern: tuple[int, ...], n: int) -> int:
    """Number of distinct length-``n`` count vectors whose sorted form is
    ``pattern`` (padded with zeros): the orbit size under box relabeling."""
    if len(pattern) > n:
        raise ValueError(f"pattern {pattern} needs more than {n} boxes")
    mult = Counter(pattern)
    mult[0] += n - len(pattern)
    out = math.factorial(n)
    for m in mult.values():
        out //= math.factorial(m)
    return out
