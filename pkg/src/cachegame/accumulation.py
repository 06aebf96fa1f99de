"""The one-turn accumulation game with real-valued gold.

The hider spreads ``d`` units of gold (a positive rational here) over ``n``
boxes; the searcher draws one uniformly random k-subset and wins if it holds
at least 1 unit in total (ties win; a losing subset holds strictly less).
The hider's problem is to minimize the number of winning k-subsets, i.e. to
maximize the losing count.

``max_losing_subsets_exact`` computes the hider's optimum exactly.  By
symmetry the gold vector can be taken weakly decreasing, and then the
winning family is closed upward under coordinatewise index decrease, so the
search runs over up-closed subset families, each decided by an exact
feasibility program with strict inequalities handled through a maximized
margin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from . import lp as lpmod
from .rational import ONE, ZERO, format_rational

MAX_EXACT_BOXES = 8  # the family enumeration is exponential in C(n, k)


@dataclass(frozen=True)
class GoldDistribution:
    amounts: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        amounts = tuple(Fraction(a) for a in self.amounts)
        object.__setattr__(self, "amounts", amounts)
        if any(a < 0 for a in amounts):
            raise ValueError(f"negative gold amount in {amounts}")

    @property
    def total(self) -> Fraction:
        return sum(self.amounts, ZERO)

    def to_json(self) -> list[str]:
        return [format_rational(a) for a in self.amounts]


@dataclass(frozen=True)
class AccumulationSpec:
    n: int
    k: int
    d: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", Fraction(self.d))
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.d <= 0:
            raise ValueError(f"gold total must be positive, got {self.d}")


def count_winning_subsets(g: GoldDistribution, k: int) -> int:
    """Number of k-subsets holding at least one unit (exact comparison)."""
    n = len(g.amounts)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return sum(1 for s in combinations(range(n), k) if sum(g.amounts[i] for i in s) >= 1)


def _flat_distribution(n: int, d: Fraction, r: int) -> GoldDistribution:
    share = Fraction(d, r)
    return GoldDistribution((share,) * r + (ZERO,) * (n - r))


def best_ruckle_distribution(spec: AccumulationSpec) -> tuple[int, int, GoldDistribution]:
    """Best equal-split placement: d/r units in each of r boxes.

    Minimizes the winning count over r in 1..n; ties go to the smallest r.
    Returns (r, winning count, distribution).
    """
    best = None
    for r in range(1, spec.n + 1):
        g = _flat_distribution(spec.n, spec.d, r)
        wins = count_winning_subsets(g, spec.k)
        if best is None or wins < best[1]:
            best = (r, wins, g)
    return best


# ---------------------------------------------------------------------------
# Exact maximum losing count over all distributions.
# ---------------------------------------------------------------------------


def _dominators(subset, n):
    """Immediate coordinatewise predecessors: shift one index down by one."""
    out = []
    s = set(subset)
    for idx in subset:
        if idx - 1 >= 0 and idx - 1 not in s:
            out.append(tuple(sorted(s - {idx} | {idx - 1})))
    return out


def max_losing_subsets_exact(spec: AccumulationSpec) -> tuple[int, GoldDistribution]:
    """Exact maximum, over all gold distributions, of the losing-subset
    count, with a distribution attaining it.

    Guarded to n <= 8: the candidate winning families are the up-closed
    families in the domination order on k-subsets, and their number grows
    quickly.  Among maximizers the lexicographically least witness is
    returned.
    """
    n, k, d = spec.n, spec.k, spec.d
    if n > MAX_EXACT_BOXES:
        raise ValueError(f"exact search is guarded to n <= {MAX_EXACT_BOXES}, got n={n}")
    subsets = list(combinations(range(n), k))
    index = {s: i for i, s in enumerate(subsets)}
    total = len(subsets)

    # Topological order: a subset comes after everything dominating it.
    order = sorted(subsets, key=lambda s: (sum(s), s))
    dominators_of = {s: [d_ for d_ in _dominators(s, n)] for s in subsets}

    best_count = -1
    best_witness = None

    def candidate(win_flags):
        nonlocal best_count, best_witness
        losing = [s for s in subsets if not win_flags[index[s]]]
        if len(losing) < best_count:
            return  # cannot improve; skip the feasibility program
        winning = [s for s in subsets if win_flags[index[s]]]
        # Only frontier constraints: poorest winners, richest losers.
        min_win = [
            s for s in winning if not any(win_flags[index[t]] for t in _covered_by(s, n, index))
        ]
        max_lose = [
            s for s in losing if all(win_flags[index[t]] for t in dominators_of[s])
        ]
        result = _feasible_family(n, d, min_win, max_lose)
        if result.feasible:
            count = len(losing)
            witness = tuple(result.witness)
            if count > best_count or (count == best_count and witness < best_witness):
                best_count = count
                best_witness = witness

    # Enumerate up-closed families by walking subsets richest-first; a
    # subset may win only when every richer neighbor already won.
    flags = [False] * total

    def rec(pos):
        if pos == len(order):
            candidate(flags)
            return
        s = order[pos]
        if all(flags[index[t]] for t in dominators_of[s]):
            flags[index[s]] = True
            rec(pos + 1)
        flags[index[s]] = False
        rec(pos + 1)

    rec(0)
    if best_witness is None:
        raise RuntimeError("no realizable family found; this cannot happen")
    return best_count, GoldDistribution(best_witness)


def _covered_by(s, n, index):
    """Immediate successors of ``s`` in the domination order (one index up)."""
    out = []
    sset = set(s)
    for idx in s:
        if idx + 1 < n and idx + 1 not in sset:
            t = tuple(sorted(sset - {idx} | {idx + 1}))
            if t in index:
                out.append(t)
    return out


def _feasible_family(n, d, min_win, max_lose) -> lpmod.FeasibilityResult:
    constraints = []
    for j in range(n - 1):
        constraints.append(({j: ONE, j + 1: -ONE}, lpmod.GREATER_EQUAL, ZERO))
    constraints.append(({j: ONE for j in range(n)}, lpmod.EQUAL, d))
    for s in min_win:
        constraints.append(({j: ONE for j in s}, lpmod.GREATER_EQUAL, ONE))
    for s in max_lose:
        constraints.append(({j: ONE for j in s}, lpmod.STRICT_LESS, ONE))
    return lpmod.check_feasible(n, constraints)


def verify_divisibility_bound(n: int, k: int, d) -> tuple[bool, int, Fraction]:
    """For k | n and d >= n/k the losing fraction stays at most 1 - k/n.

    Verified by exact optimization, not by a partition construction.
    Returns (holds, losing count, allowed maximum).
    """
    d = Fraction(d)
    if n % k != 0:
        raise ValueError(f"divisibility check needs k | n, got n={n}, k={k}")
    if d < Fraction(n, k):
        raise ValueError(f"needs d >= n/k, got d={d} < {Fraction(n, k)}")
    losing, _ = max_losing_subsets_exact(AccumulationSpec(n, k, d))
    allowed = (1 - Fraction(k, n)) * comb(n, k)
    return losing <= allowed, losing, allowed


def mms_probability(amounts, k: int) -> Fraction:
    """Fraction of k-subsets whose sum falls strictly below the
    proportional share (k/n) of the total."""
    amounts = [Fraction(a) for a in amounts]
    n = len(amounts)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    threshold = Fraction(k, n) * sum(amounts, ZERO)
    below = sum(1 for s in combinations(range(n), k) if sum(amounts[i] for i in s) < threshold)
    return Fraction(below, comb(n, k))


def evaluate_distribution(spec: AccumulationSpec, g: GoldDistribution) -> dict:
    """CLI-facing summary of one distribution."""
    if len(g.amounts) != spec.n:
        raise ValueError(f"distribution has {len(g.amounts)} boxes, spec has {spec.n}")
    if g.total != spec.d:
        raise ValueError(f"distribution totals {g.total}, spec declares {spec.d}")
    winning = count_winning_subsets(g, spec.k)
    total = comb(spec.n, spec.k)
    return {
        "winning": winning,
        "total": total,
        "probability": format_rational(Fraction(winning, total)),
        "witness": g.to_json(),
    }
