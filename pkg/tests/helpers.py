"""Shared test utilities: cached solves, independent oracles, random LPs."""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
import random

from cachegame import GameSpec, Variant, solve
from cachegame.core import enumerate_allocations
from cachegame import lp as lpmod


@lru_cache(maxsize=None)
def solve_cached(n, d, k, variant=Variant.ADVERSARY, symmetry=True, relaxed=False):
    return solve(GameSpec(n, d, k, variant), symmetry=symmetry, relaxed=relaxed)


def oracle_p_lambda(lam, n, d):
    """Brute-force repeat probability of the exhaust-one-box plan.

    Enumerates every (placement, visit order) pair directly: visit orders
    are the box orderings with weakly decreasing counts, weighted uniformly
    per placement (the tie-break randomness).  Independent of the orbit
    counting used by the implementation.
    """
    num = den = Fraction(0)
    m = len(lam)
    for alloc in enumerate_allocations(n, d):
        counts = alloc.counts
        orders = [
            p
            for p in permutations(range(n))
            if all(counts[p[i]] >= counts[p[i + 1]] for i in range(n - 1))
        ]
        w = Fraction(1, len(orders))
        for order in orders:
            s = [counts[b] for b in order]
            if any(s[i] != lam[i] for i in range(m - 1)):
                continue
            if s[m - 1] < lam[m - 1]:
                continue
            den += w
            if s[m - 1] > lam[m - 1]:
                num += w
    if den == 0:
        raise ValueError("unreachable record")
    return num / den


def random_bounded_lp(rng: random.Random):
    """A random feasible bounded program: <= rows with nonnegative rhs plus
    a box cap, so the origin is feasible and the optimum finite."""
    nvars = rng.randint(1, 4)
    nrows = rng.randint(1, 4)
    lp = lpmod.LinearProgram(nvars, [Fraction(rng.randint(-5, 5)) for _ in range(nvars)])
    for _ in range(nrows):
        row = {j: Fraction(rng.randint(-4, 4)) for j in range(nvars)}
        lp.add_constraint(row, lpmod.LESS_EQUAL, Fraction(rng.randint(0, 6)))
    lp.add_constraint({j: Fraction(1) for j in range(nvars)}, lpmod.LESS_EQUAL, Fraction(rng.randint(1, 9)))
    return lp


def complementary_slackness_holds(lp, sol):
    """Exact complementary slackness of an optimal primal/dual pair."""
    x, y = sol.primal, sol.dual
    for i, row in enumerate(lp.rows):
        slack = lp.rhs[i] - sum(v * x[j] for j, v in row.items())
        if y[i] * slack != 0:
            return False
    rho = [-lp.objective[j] for j in range(lp.num_vars)]
    for i, row in enumerate(lp.rows):
        if y[i]:
            for j, v in row.items():
                rho[j] += y[i] * v
    for (kind, j), mult in sol.bound_dual.items():
        rho[j] += mult
    for j in range(lp.num_vars):
        if rho[j] * x[j] != 0:
            return False
    return True
