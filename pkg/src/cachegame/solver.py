"""Exact game solving: tree construction, realization-plan linear programs,
and best-response evaluation.

Two tree builders exist.  The full builder lays the game out over concrete
box labels.  The reduced builder exploits the box symmetry: the searcher
plays over first-touch canonical labels (boxes are numbered in the order her
queries first touch them, and a reveal from a never-touched box takes the
lowest fresh label), the hider picks a count *pattern* instead of a labeled
placement, and chance assigns pattern entries to freshly touched labels by
uniform draws without replacement.  Both trees have the same value; the
reduced one is exponentially smaller.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import lp as lpmod
from .core import (
    Allocation,
    GameSpec,
    Variant,
    enumerate_allocations,
    partitions,
    upper_bound_combinatorial,
)
from .rational import ONE, ZERO, format_rational

SEARCHER = "searcher"
HIDER = "hider"

DEFAULT_NODE_BUDGET = 10**7


class SolverError(RuntimeError):
    pass


class BudgetExceededError(SolverError):
    """Tree construction aborted: the node count passed the budget."""

    def __init__(self, budget: int, estimate: int):
        super().__init__(f"game tree exceeds node budget {budget} (counted at least {estimate} nodes)")
        self.budget = budget
        self.estimate = estimate


@dataclass
class TerminalNode:
    payoff: Fraction


@dataclass
class ChanceNode:
    outcomes: list  # (Fraction probability, node)


@dataclass
class DecisionNode:
    player: str
    infoset: object
    actions: list  # (label, node)


@dataclass
class GameTree:
    spec: GameSpec
    symmetry: bool
    relaxed: bool
    root: object
    num_nodes: int
    infosets: dict


def _count(counter: list, budget: int) -> None:
    counter[0] += 1
    if counter[0] > budget:
        raise BudgetExceededError(budget, counter[0])


def build_tree(
    spec: GameSpec,
    symmetry_reduction: bool = True,
    relaxed_queries: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> GameTree:
    """Extensive form of the game for ``spec``.

    Cooperative play is a joint searcher/revealer problem, not a zero-sum
    tree, and is rejected here; use the strategy verifier for it.
    """
    if spec.variant == Variant.COOPERATIVE:
        raise ValueError("cooperative games are verified, not solved; build adversary or random trees")
    if budget < 1:
        raise ValueError("node budget must be positive")
    counter = [0]
    if symmetry_reduction:
        root = _build_reduced(spec, relaxed_queries, budget, counter)
    else:
        root = _build_full(spec, relaxed_queries, budget, counter)
    infosets: dict = {}
    _collect_infosets(root, infosets)
    return GameTree(spec, symmetry_reduction, relaxed_queries, root, counter[0], infosets)


def _collect_infosets(node, infosets) -> None:
    if isinstance(node, TerminalNode):
        return
    if isinstance(node, ChanceNode):
        for _, child in node.outcomes:
            _collect_infosets(node=child, infosets=infosets)
        return
    key = (node.player, node.infoset)
    labels = [a for a, _ in node.actions]
    if key in infosets:
        if infosets[key] != labels:
            raise SolverError(f"information set {key} reached with differing action sets")
    else:
        infosets[key] = labels
    for _, child in node.actions:
        _collect_infosets(child, infosets)


# ---------------------------------------------------------------------------
# Full (labeled-box) tree.
# ---------------------------------------------------------------------------


def _query_sizes(k: int, relaxed: bool) -> range:
    return range(1, k + 1) if relaxed else range(k, k + 1)


def _build_full(spec: GameSpec, relaxed: bool, budget: int, counter):
    n, d, k = spec.n, spec.d, spec.k
    from math import comb

    placements = comb(n + d - 1, d)
    num_queries = sum(comb(n, size) for size in _query_sizes(k, relaxed))
    if placements > budget or num_queries > budget:
        raise BudgetExceededError(budget, max(placements, num_queries))
    queries = [
        tuple(q) for size in _query_sizes(k, relaxed) for q in combinations(range(n), size)
    ]

    def searcher_node(alloc, remaining, found, obs):
        _count(counter, budget)
        if found == d:
            return TerminalNode(ONE)
        actions = [(q, after_query(alloc, remaining, found, obs, q)) for q in queries]
        return DecisionNode(SEARCHER, obs, actions)

    def after_query(alloc, remaining, found, obs, q):
        positive = [b for b in q if remaining[b] > 0]
        if not positive:
            _count(counter, budget)
            return TerminalNode(ZERO)
        if spec.variant == Variant.RANDOM:
            total = sum(remaining[b] for b in positive)
            _count(counter, budget)
            return ChanceNode(
                [(Fraction(remaining[b], total), reveal(alloc, remaining, found, obs, q, b)) for b in positive]
            )
        if len(positive) == 1:
            return reveal(alloc, remaining, found, obs, q, positive[0])
        _count(counter, budget)
        return DecisionNode(
            HIDER,
            (alloc, obs, q),
            [(b, reveal(alloc, remaining, found, obs, q, b)) for b in positive],
        )

    def reveal(alloc, remaining, found, obs, q, b):
        nxt = list(remaining)
        nxt[b] -= 1
        return searcher_node(alloc, tuple(nxt), found + 1, obs + ((q, b),))

    allocations = enumerate_allocations(n, d)
    _count(counter, budget)
    return DecisionNode(
        HIDER,
        ("root",),
        [(a.counts, searcher_node(a.counts, a.counts, 0, ())) for a in allocations],
    )


# ---------------------------------------------------------------------------
# Reduced (first-touch canonical) tree.
# ---------------------------------------------------------------------------


def ordered_draws(pool: tuple[int, ...], f: int):
    """Distinct ordered draws of ``f`` values from the multiset ``pool``,
    with exact without-replacement probabilities.  Lazy: callers may abort
    after a bounded number of outcomes."""
    if f == 0:
        yield (), ONE
        return
    counter = Counter(pool)
    total = len(pool)

    def rec(prefix, prob, remaining):
        if len(prefix) == f:
            yield prefix, prob
            return
        for v in sorted(counter, reverse=True):
            c = counter[v]
            if c == 0:
                continue
            counter[v] -= 1
            yield from rec(prefix + (v,), prob * Fraction(c, remaining), remaining - 1)
            counter[v] += 1

    yield from rec((), ONE, total)


def _remove_from_sorted(pool: tuple[int, ...], drawn: tuple[int, ...]) -> tuple[int, ...]:
    taken = Counter(drawn)
    out = []
    for v in pool:
        if taken.get(v, 0) > 0:
            taken[v] -= 1
        else:
            out.append(v)
    return tuple(out)


def _canonical_actions(touched: int, untouched: int, k: int, relaxed: bool):
    """Searcher moves in canonical labels: (known-box subset, fresh count).
    Lazy: the action space can be enormous for out-of-budget games."""
    for size in _query_sizes(k, relaxed):
        max_known = min(size, touched)
        for j in range(max_known + 1):
            f = size - j
            if f > untouched:
                continue
            for known in combinations(range(touched), j):
                yield (known, f)


def _build_reduced(spec: GameSpec, relaxed: bool, budget: int, counter):
    n, d, k = spec.n, spec.d, spec.k
    # Reveal decisions are singleton information sets: the hider knows his
    # placement and sees every query, so each decision point on a path is
    # distinguishable to him.  (Distinct chance draws can reach post-reveal
    # states that only differ by the searcher's private relabeling; that
    # difference is payoff-irrelevant, and sharing a key across them would
    # break perfect recall.)
    serial = [0]

    def searcher_node(touched, untouched, found, obs):
        _count(counter, budget)
        if found == d:
            return TerminalNode(ONE)
        actions = []
        for action in _canonical_actions(len(touched), len(untouched), k, relaxed):
            actions.append((action, play(touched, untouched, found, obs, action)))
        return DecisionNode(SEARCHER, obs, actions)

    def play(touched, untouched, found, obs, action):
        known, f = action
        t0 = len(touched)
        if f == 0:
            return resolve(touched, untouched, found, obs, action, known, t0)
        outcomes = []
        for draw, prob in ordered_draws(untouched, f):
            touched2 = touched + draw
            untouched2 = _remove_from_sorted(untouched, draw)
            q = known + tuple(range(t0, t0 + f))
            outcomes.append((prob, resolve(touched2, untouched2, found, obs, action, q, t0)))
        _count(counter, budget)
        return ChanceNode(outcomes)

    def resolve(touched, untouched, found, obs, action, q, t0):
        positive = [l for l in q if touched[l] > 0]
        if not positive:
            _count(counter, budget)
            return TerminalNode(ZERO)
        if spec.variant == Variant.RANDOM:
            total = sum(touched[l] for l in positive)
            _count(counter, budget)
            return ChanceNode(
                [
                    (Fraction(touched[l], total), reveal(touched, untouched, found, obs, action, l, t0))
                    for l in positive
                ]
            )
        if len(positive) == 1:
            return reveal(touched, untouched, found, obs, action, positive[0], t0)
        _count(counter, budget)
        serial[0] += 1
        return DecisionNode(
            HIDER,
            ("reveal", serial[0]),
            [(l, reveal(touched, untouched, found, obs, action, l, t0)) for l in positive],
        )

    def reveal(touched, untouched, found, obs, action, l, t0):
        lst = list(touched)
        if l >= t0:  # fresh reveal takes the lowest fresh label
            lst[t0], lst[l] = lst[l], lst[t0]
            l = t0
        lst[l] -= 1
        return searcher_node(tuple(lst), untouched, found + 1, obs + ((action, l),))

    pats = partitions(d, n)
    _count(counter, budget)
    return DecisionNode(
        HIDER,
        ("root",),
        [(pat, searcher_node((), pat + (0,) * (n - len(pat)), 0, ())) for pat in pats],
    )


# ---------------------------------------------------------------------------
# Sequence-form linear program.
# ---------------------------------------------------------------------------


class _SequenceForm:
    """Realization-plan bookkeeping for both players over one tree."""

    def __init__(self, root):
        self.seq_ids = {SEARCHER: {(): 0}, HIDER: {(): 0}}
        self.seq_list = {SEARCHER: [()], HIDER: [()]}
        self.infosets: dict = {}  # (player, key) -> dict(id, parent_seq, actions)
        self.infoset_list: list = []
        self.payoff: dict[tuple[int, int], Fraction] = {}
        self._walk(root, 0, 0, ONE)

    def _seq(self, player, seq_key):
        ids = self.seq_ids[player]
        if seq_key not in ids:
            ids[seq_key] = len(self.seq_list[player])
            self.seq_list[player].append(seq_key)
        return ids[seq_key]

    def _walk(self, node, s_seq, h_seq, prob):
        if isinstance(node, TerminalNode):
            if node.payoff:
                key = (s_seq, h_seq)
                self.payoff[key] = self.payoff.get(key, ZERO) + prob * node.payoff
            return
        if isinstance(node, ChanceNode):
            for p, child in node.outcomes:
                self._walk(child, s_seq, h_seq, prob * p)
            return
        player = node.player
        key = (player, node.infoset)
        parent = s_seq if player == SEARCHER else h_seq
        info = self.infosets.get(key)
        first_visit = info is None
        if first_visit:
            info = {"id": len(self.infoset_list), "parent": parent, "actions": []}
            self.infosets[key] = info
            self.infoset_list.append(info)
        elif info["parent"] != parent:
            raise SolverError(f"perfect recall violated at information set {key}")
        for label, child in node.actions:
            seq_key = self.seq_list[player][parent] + ((info["id"], label),)
            sid = self._seq(player, seq_key)
            if first_visit:
                info["actions"].append((info["id"], label, sid))
            if player == SEARCHER:
                self._walk(child, sid, h_seq, prob)
            else:
                self._walk(child, s_seq, sid, prob)


@dataclass
class SolveResult:
    """Exact value and optimal realization plans for one specification."""

    spec: GameSpec
    symmetry: bool
    relaxed: bool
    value: Fraction
    searcher_plan: dict
    hider_plan: dict
    stats: dict
    searcher_behavior: dict = field(default_factory=dict, repr=False)
    hider_behavior: dict = field(default_factory=dict, repr=False)

    def to_json_dict(self) -> dict:
        def plan_json(plan):
            return [
                {"sequence": _seq_json(seq), "weight": format_rational(w)}
                for seq, w in plan.items()
            ]

        return {
            "n": self.spec.n,
            "d": self.spec.d,
            "k": self.spec.k,
            "variant": self.spec.variant.value,
            "symmetry": self.symmetry,
            "relaxed": self.relaxed,
            "value": format_rational(self.value),
            "searcher_plan": plan_json(self.searcher_plan),
            "hider_plan": plan_json(self.hider_plan),
            "stats": self.stats,
        }


def _seq_json(seq) -> list:
    out = []
    for infoset_id, label in seq:
        out.append([infoset_id, _label_json(label)])
    return out


def _label_json(label):
    if isinstance(label, tuple) and len(label) == 2 and isinstance(label[0], tuple):
        known, f = label
        return {"known": list(known), "fresh": f}
    if isinstance(label, tuple):
        return list(label)
    return label


def solve_tree(tree: GameTree) -> SolveResult:
    start = time.perf_counter()
    sf = _SequenceForm(tree.root)
    searcher_infosets = [
        info for (player, _), info in sf.infosets.items() if player == SEARCHER
    ]
    hider_infosets = [info for (player, _), info in sf.infosets.items() if player == HIDER]

    n_sseq = len(sf.seq_list[SEARCHER])
    hider_ids = {id(info): idx for idx, info in enumerate(hider_infosets)}
    n_q = 1 + len(hider_infosets)  # q_0 plus one value variable per hider set
    program = lpmod.LinearProgram(n_sseq + n_q)
    for col in range(n_sseq, n_sseq + n_q):
        program.set_bounds(col, None, None)
    program.set_objective(n_sseq, ONE)

    program.add_constraint({0: ONE}, lpmod.EQUAL, ONE)
    for info in searcher_infosets:
        row = {}
        for _, _, sid in info["actions"]:
            row[sid] = row.get(sid, ZERO) + ONE
        row[info["parent"]] = row.get(info["parent"], ZERO) - ONE
        program.add_constraint(row, lpmod.EQUAL, ZERO)

    # Group hider infosets by their parent sequence id.
    children_of: dict[int, list] = {}
    seq_infoset: dict[int, int] = {}  # hider seq -> infoset it extends
    for info in hider_infosets:
        children_of.setdefault(info["parent"], []).append(info)
        for _, _, sid in info["actions"]:
            seq_infoset[sid] = hider_ids[id(info)]

    payoff_by_hseq: dict[int, dict[int, Fraction]] = {}
    for (s_seq, h_seq), val in sf.payoff.items():
        payoff_by_hseq.setdefault(h_seq, {})[s_seq] = val

    row_for_hseq = {}
    for h_seq in range(len(sf.seq_list[HIDER])):
        row: dict[int, Fraction] = {}
        if h_seq == 0:
            row[n_sseq] = ONE  # q_0
        else:
            row[n_sseq + 1 + seq_infoset[h_seq]] = ONE
        for info in children_of.get(h_seq, []):
            col = n_sseq + 1 + hider_ids[id(info)]
            row[col] = row.get(col, ZERO) - ONE
        for s_seq, val in payoff_by_hseq.get(h_seq, {}).items():
            row[s_seq] = row.get(s_seq, ZERO) - val
        row_for_hseq[h_seq] = program.add_constraint(row, lpmod.LESS_EQUAL, ZERO)

    # Largest-coefficient pricing with the automatic Bland fallback: the
    # game programs are heavily degenerate and pure Bland pivots several
    # times slower, while the fallback keeps termination guaranteed.
    sol = lpmod.solve_lp(program, "max", pivot_rule="dantzig")
    if sol.status != lpmod.OPTIMAL:
        raise SolverError(f"sequence-form program came back {sol.status}")
    value = sol.objective_value
    if not ZERO <= value <= ONE:
        raise SolverError(f"game value {value} outside [0, 1]")

    searcher_plan = {
        sf.seq_list[SEARCHER][i]: sol.primal[i] for i in range(n_sseq) if sol.primal[i]
    }
    hider_plan = {}
    for h_seq, row_idx in row_for_hseq.items():
        weight = sol.dual[row_idx]
        if weight:
            hider_plan[sf.seq_list[HIDER][h_seq]] = weight
    _check_realization_plan(hider_plan, hider_infosets, hider_ids, sf)

    elapsed = time.perf_counter() - start
    stats = {
        "nodes": tree.num_nodes,
        "searcher_sequences": n_sseq,
        "hider_sequences": len(sf.seq_list[HIDER]),
        "searcher_infosets": len(searcher_infosets),
        "hider_infosets": len(hider_infosets),
        "lp_rows": len(program.rows),
        "lp_cols": program.num_vars,
        "pivots": sol.pivots,
        "solve_seconds": elapsed,
    }
    result = SolveResult(
        spec=tree.spec,
        symmetry=tree.symmetry,
        relaxed=tree.relaxed,
        value=value,
        searcher_plan=searcher_plan,
        hider_plan=hider_plan,
        stats=stats,
    )
    result.searcher_behavior = _behavior(sf, SEARCHER, {k: v for k, v in searcher_plan.items()})
    result.hider_behavior = _behavior(sf, HIDER, hider_plan)
    return result


def _check_realization_plan(plan: dict, infosets, ids, sf) -> None:
    """Dual weights must form an exact hider realization plan."""
    get = lambda seq: plan.get(seq, ZERO)
    if get(()) != ONE:
        raise SolverError("hider plan root weight is not 1")
    for info in infosets:
        parent_key = sf.seq_list[HIDER][info["parent"]]
        total = ZERO
        for _, label, sid in info["actions"]:
            w = get(sf.seq_list[HIDER][sid])
            if w < 0:
                raise SolverError("negative realization weight")
            total += w
        if total != get(parent_key):
            raise SolverError("hider plan violates flow conservation")


def _behavior(sf, player, plan) -> dict:
    """Per-infoset action distributions from a realization plan."""
    out = {}
    for (p, key), info in sf.infosets.items():
        if p != player:
            continue
        parent_weight = plan.get(sf.seq_list[player][info["parent"]], ZERO)
        dist = []
        if parent_weight:
            for _, label, sid in info["actions"]:
                w = plan.get(sf.seq_list[player][sid], ZERO)
                if w:
                    dist.append((label, w / parent_weight))
        out[key] = dist
    return out


def solve(
    spec: GameSpec,
    symmetry: bool = True,
    relaxed: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> SolveResult:
    """Exact value of the game, max over searcher plans of the min over
    hider plans.  Deterministic for fixed spec and flags."""
    tree = build_tree(spec, symmetry_reduction=symmetry, relaxed_queries=relaxed, budget=budget)
    return solve_tree(tree)


# ---------------------------------------------------------------------------
# Accuracy checks.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccuracyResult:
    accurate: bool
    value: Fraction
    bound: Fraction


def check_accuracy(n: int, d: int, k: int, budget: int = DEFAULT_NODE_BUDGET) -> AccuracyResult:
    """Does the adversary-revealer value meet k^d / C(n+d-1, d) exactly?"""
    spec = GameSpec(n, d, k, Variant.ADVERSARY)
    bound = upper_bound_combinatorial(n, d, k)
    value = solve(spec, budget=budget).value
    return AccuracyResult(accurate=value == bound, value=value, bound=bound)


# ---------------------------------------------------------------------------
# Best response against a fixed (canonical) searcher strategy.
# ---------------------------------------------------------------------------


@dataclass
class BestResponse:
    value: Fraction
    worst_allocation: Allocation
    allocation_values: dict


class StrategyError(ValueError):
    def __init__(self, message: str, path=()):
        super().__init__(f"{message} (at {'/'.join(map(str, path)) or 'root'})")
        self.path = tuple(path)


def best_response_value(spec: GameSpec, strategy) -> BestResponse:
    """Hider's best reply to a canonical strategy tree, exactly.

    The strategy is played through a uniform random relabeling of boxes, so
    the hider minimizes over count patterns; under the adversary variant he
    additionally picks reveals knowing the full state.  A missing branch
    means the searcher resigns on that line (contributes 0, never an error).
    """
    from .strategies import StrategyTree  # local import avoids a cycle

    if not isinstance(strategy, StrategyTree):
        raise StrategyError("expected a StrategyTree")
    if (strategy.n, strategy.d, strategy.k) != (spec.n, spec.d, spec.k):
        raise StrategyError(
            f"strategy is for (n,d,k)=({strategy.n},{strategy.d},{strategy.k}), "
            f"spec is ({spec.n},{spec.d},{spec.k})"
        )
    _validate_strategy_node(strategy.root, spec, depth=0, path=())

    cooperative = spec.variant == Variant.COOPERATIVE
    if cooperative:
        raise ValueError("use joint_verify_cooperative for cooperative play")

    memo: dict = {}
    values = {}
    for pat in partitions(spec.d, spec.n):
        untouched = pat + (0,) * (spec.n - len(pat))
        values[pat] = _eval_strategy(
            strategy.root, (), untouched, 0, spec, memo, ()
        )
    worst_pat = min(values, key=lambda p: (values[p], p))
    worst = Allocation(worst_pat + (0,) * (spec.n - len(worst_pat)))
    alloc_values = {Allocation(p + (0,) * (spec.n - len(p))): v for p, v in values.items()}
    return BestResponse(value=values[worst_pat], worst_allocation=worst, allocation_values=alloc_values)


def _validate_strategy_node(node, spec, depth, path) -> None:
    if node is None:
        return
    if depth >= spec.d:
        raise StrategyError(f"strategy deeper than d={spec.d} moves", path)
    total = ZERO
    for idx, entry in enumerate(node.mix):
        total += entry.prob
        if entry.prob < 0:
            raise StrategyError("negative mix probability", path + (idx,))
        if len(entry.query) > spec.k:
            raise StrategyError(f"query {entry.query} larger than k={spec.k}", path + (idx,))
        if any(b < 0 or b >= spec.n for b in entry.query):
            raise StrategyError(f"query {entry.query} outside 0..n-1", path + (idx,))
        for box, child in entry.branches:
            if box not in entry.query:
                raise StrategyError(f"branch key {box} outside query {entry.query}", path + (idx,))
            _validate_strategy_node(child, spec, depth + 1, path + (idx, box))
    if total != ONE:
        raise StrategyError(f"mix probabilities sum to {total}, not 1", path)


def _eval_strategy(node, touched, untouched, found, spec, memo, path):
    """Worst-case win mass of the subtree, hider minimizing."""
    d = spec.d
    key = (id(node), touched, untouched, found)
    if key in memo:
        return memo[key]
    if node is None:
        result = ONE if found == d else ZERO
        memo[key] = result
        return result
    t0 = len(touched)
    total = ZERO
    for idx, entry in enumerate(node.mix):
        if not entry.prob:
            continue
        known = tuple(l for l in entry.query if l < t0)
        fresh = tuple(l for l in entry.query if l >= t0)
        f = len(fresh)
        if fresh != tuple(range(t0, t0 + f)):
            raise StrategyError(
                f"query {entry.query} does not use consecutive fresh labels from {t0}",
                path + (idx,),
            )
        if f > len(untouched):
            raise StrategyError(
                f"query {entry.query} opens {f} new boxes but only {len(untouched)} remain",
                path + (idx,),
            )
        branch_map = dict(entry.branches)
        entry_value = ZERO
        for draw, prob in ordered_draws(untouched, f):
            touched2 = touched + draw
            untouched2 = _remove_from_sorted(untouched, draw)
            q = known + fresh
            positive = [l for l in q if touched2[l] > 0]
            if not positive:
                continue
            if spec.variant == Variant.RANDOM:
                weight_total = sum(touched2[l] for l in positive)
                val = ZERO
                for l in positive:
                    val += Fraction(touched2[l], weight_total) * _branch_value(
                        branch_map, l, t0, touched2, untouched2, found, spec, memo, path
                    )
            else:
                val = min(
                    _branch_value(branch_map, l, t0, touched2, untouched2, found, spec, memo, path)
                    for l in positive
                )
            entry_value += prob * val
        total += entry.prob * entry_value
    memo[key] = total
    return total


def _branch_value(branch_map, l, t0, touched, untouched, found, spec, memo, path):
    lst = list(touched)
    if l >= t0:
        lst[t0], lst[l] = lst[l], lst[t0]
        l = t0
    lst[l] -= 1
    if found + 1 == spec.d:
        return ONE
    # A missing branch and an explicit end both mean the searcher stops here.
    child = branch_map.get(l)
    return _eval_strategy(child, tuple(lst), untouched, found + 1, spec, memo, path + (l,))


def joint_cooperative_value(spec: GameSpec, strategy, reveal_rule) -> Fraction:
    """Worst-case win probability when the revealer follows ``reveal_rule``.

    ``reveal_rule(counts_in_query, history)`` must return the label of a
    treasure-holding queried box; ``counts_in_query`` maps canonical labels
    to remaining counts and ``history`` is the canonical observation list.
    """
    from .strategies import StrategyTree

    if not isinstance(strategy, StrategyTree):
        raise StrategyError("expected a StrategyTree")
    if (strategy.n, strategy.d, strategy.k) != (spec.n, spec.d, spec.k):
        raise StrategyError("strategy parameters do not match the game")
    _validate_strategy_node(strategy.root, spec, depth=0, path=())

    def evaluate(node, touched, untouched, found, history):
        if found == spec.d:
            return ONE
        if node is None:
            return ZERO
        t0 = len(touched)
        total = ZERO
        for entry in node.mix:
            if not entry.prob:
                continue
            known = tuple(l for l in entry.query if l < t0)
            fresh = tuple(l for l in entry.query if l >= t0)
            f = len(fresh)
            if fresh != tuple(range(t0, t0 + f)) or f > len(untouched):
                raise StrategyError(f"query {entry.query} is not canonical here")
            branch_map = dict(entry.branches)
            entry_value = ZERO
            for draw, prob in ordered_draws(untouched, f):
                touched2 = touched + draw
                untouched2 = _remove_from_sorted(untouched, draw)
                q = known + fresh
                counts_in_q = {l: touched2[l] for l in q}
                if not any(counts_in_q.values()):
                    continue
                choice = reveal_rule(dict(counts_in_q), list(history))
                if choice not in counts_in_q or touched2[choice] <= 0:
                    raise ValueError(
                        f"reveal rule returned {choice!r}, not a treasure-holding queried box"
                    )
                lst = list(touched2)
                l = choice
                if l >= t0:
                    lst[t0], lst[l] = lst[l], lst[t0]
                    l = t0
                lst[l] -= 1
                if found + 1 == spec.d:
                    entry_value += prob * ONE
                    continue
                child = branch_map.get(l)
                entry_value += prob * evaluate(
                    child, tuple(lst), untouched2, found + 1, history + ((entry.query, l),)
                )
            total += entry.prob * entry_value
        return total

    best = None
    for pat in partitions(spec.d, spec.n):
        untouched = pat + (0,) * (spec.n - len(pat))
        v = evaluate(strategy.root, (), untouched, 0, ())
        if best is None or v < best:
            best = v
    return best


# ---------------------------------------------------------------------------
# Value of a committed hider strategy (labeled boxes, no symmetrization).
# ---------------------------------------------------------------------------


def hider_strategy_value(
    spec: GameSpec,
    allocation_weights: dict,
    reveal_policy=None,
) -> tuple[Fraction, dict]:
    """Strongest searcher reply to a fully committed hider.

    ``allocation_weights`` maps count tuples (or Allocations) to exact
    probabilities summing to one.  Under the random variant reveals are
    chance moves; under the adversary variant ``reveal_policy(remaining,
    history, query)`` must return the reveal distribution whenever the query
    covers several treasure-holding boxes.  Returns the exact value (an
    upper-bound certificate for the game value) and the maximizing
    deterministic searcher strategy.
    """
    if spec.variant == Variant.COOPERATIVE:
        raise ValueError("the cooperative revealer is driven by the searcher, not the hider")
    weights: dict[tuple, Fraction] = {}
    for alloc, w in allocation_weights.items():
        counts = alloc.counts if isinstance(alloc, Allocation) else tuple(alloc)
        if len(counts) != spec.n or sum(counts) != spec.d:
            raise ValueError(f"allocation {counts} does not fit n={spec.n}, d={spec.d}")
        w = Fraction(w)
        if w < 0:
            raise ValueError("negative allocation weight")
        if w:
            weights[counts] = weights.get(counts, ZERO) + w
    if sum(weights.values()) != ONE:
        raise ValueError("allocation weights must sum to 1")
    if spec.variant == Variant.ADVERSARY and reveal_policy is None:
        reveal_policy = _forced_only_policy

    queries = [q for q in combinations(range(spec.n), spec.k)]

    def reveal_dist(counts, history, q):
        positive = [b for b in q if counts[b] > 0]
        if not positive:
            return []
        if spec.variant == Variant.RANDOM:
            total = sum(counts[b] for b in positive)
            return [(b, Fraction(counts[b], total)) for b in positive]
        if len(positive) == 1:
            return [(positive[0], ONE)]
        dist = [(b, Fraction(p)) for b, p in reveal_policy(counts, history, q)]
        if sum(p for _, p in dist) != ONE or any(p < 0 for _, p in dist):
            raise ValueError(f"reveal policy returned an invalid distribution {dist}")
        if any(b not in positive for b, p in dist if p):
            raise ValueError("reveal policy placed weight on an empty or unqueried box")
        return dist

    def value(mass: dict, found: int, history) -> tuple[Fraction, dict]:
        if found == spec.d:
            return sum(mass.values()), {}
        best = None
        best_plan = None
        for q in queries:
            branch_mass: dict[int, dict] = {}
            for alloc, w in mass.items():
                counts = _remaining(alloc, history)
                for b, p in reveal_dist(counts, history, q):
                    if w * p:
                        branch_mass.setdefault(b, {})[alloc] = w * p
            total = ZERO
            plans = {}
            for b, sub in sorted(branch_mass.items()):
                v, sub_plan = value(sub, found + 1, history + ((q, b),))
                total += v
                plans[b] = sub_plan
            if best is None or total > best:
                best = total
                best_plan = {"query": list(q), "branches": plans}
        return best, best_plan

    val, plan = value(weights, 0, ())
    return val, plan


def _remaining(alloc: tuple, history) -> tuple:
    counts = list(alloc)
    for _, b in history:
        counts[b] -= 1
    return tuple(counts)


def _forced_only_policy(counts, history, q):
    raise ValueError(
        "the committed hider reached a reveal choice but no reveal policy was given"
    )


def optimal_hider_332(
    variant: Variant | str,
    q3: Fraction = Fraction(1, 2),
    q4: Fraction = Fraction(1, 2),
) -> tuple[dict, object]:
    """Equilibrium hiding strategies for n=3, d=3, k=2.

    Returns ``(allocation_weights, reveal_policy)``.  The placement mixes
    the three symmetry classes: all treasures together, all separate, and a
    2+1 split, with class weights (5/19, 2/19, 12/19) under the random
    revealer and (3/10, 1/10, 6/10) under the adversary, spread uniformly
    inside each class.  Against the random revealer no policy is needed
    (reveals are chance) and the value cap is exactly 12/19.  Against the
    adversary the policy surrenders from the lighter box of a fresh 2+1
    split with probability 1/2, re-surrenders from the box that just paid
    with probability q3 (if its partner was queried before) or 1/2 (if
    not), and in the all-separate class favors the previously queried box
    with probability q4; the cap is 3/5 for any q3, q4 in [0, 1].
    """
    variant = Variant(variant)
    if variant == Variant.RANDOM:
        l1, l2, l3 = Fraction(5, 19), Fraction(2, 19), Fraction(12, 19)
    elif variant == Variant.ADVERSARY:
        l1, l2, l3 = Fraction(3, 10), Fraction(1, 10), Fraction(6, 10)
    else:
        raise ValueError("no committed hiding table for the cooperative revealer")
    weights: dict[tuple, Fraction] = {}
    together = [(3, 0, 0), (0, 3, 0), (0, 0, 3)]
    split = [(2, 1, 0), (2, 0, 1), (1, 2, 0), (0, 2, 1), (1, 0, 2), (0, 1, 2)]
    for a in together:
        weights[a] = l1 / 3
    weights[(1, 1, 1)] = l2
    for a in split:
        weights[a] = l3 / 6
    if variant == Variant.RANDOM:
        return weights, None

    q1 = q2 = Fraction(1, 2)

    def policy(remaining, history, query):
        positive = [b for b in query if remaining[b] > 0]
        if len(positive) != 2:
            raise ValueError(f"unexpected reveal choice among {positive}")
        a, b = positive
        ca, cb = remaining[a], remaining[b]
        if not history:
            if ca == cb:
                return [(a, Fraction(1, 2)), (b, Fraction(1, 2))]
            light, heavy = (a, b) if ca < cb else (b, a)
            return [(light, q2), (heavy, 1 - q2)]
        # One treasure already surrendered; a two-way choice here means
        # both queried boxes hold exactly one treasure.
        initial = list(remaining)
        for _, revealed in history:
            initial[revealed] += 1
        prev = history[-1][1]
        queried_before = {box for q, _ in history for box in q}
        if sorted(initial) == [1, 1, 1]:
            seen = [x for x in (a, b) if x in queried_before]
            if len(seen) != 1:
                raise ValueError("unexpected query pattern in the all-separate class")
            other = b if seen[0] == a else a
            return [(seen[0], q4), (other, 1 - q4)]
        if prev not in (a, b):
            raise ValueError("unexpected reveal choice away from the paying box")
        other = b if prev == a else a
        if other in queried_before:
            return [(prev, q3), (other, 1 - q3)]
        return [(prev, q1), (other, 1 - q1)]

    return weights, policy


# ---------------------------------------------------------------------------
# Best response to a committed searcher plan (labeled boxes).  Used to
# certify solver output from the other side.
# ---------------------------------------------------------------------------


def searcher_plan_value(spec: GameSpec, behavior: dict) -> Fraction:
    """Hider's best reply to a labeled-box behavioral searcher strategy.

    ``behavior`` maps observation histories (as produced by the full tree
    builder) to lists of (query, probability).  Unreachable or missing
    information sets count as resignation.
    """
    if spec.variant == Variant.COOPERATIVE:
        raise ValueError("cooperative play has no adversarial best response")

    def evaluate(alloc, remaining, found, obs):
        if found == spec.d:
            return ONE
        dist = behavior.get((SEARCHER, obs), behavior.get(obs))
        if not dist:
            return ZERO
        total = ZERO
        for q, p in dist:
            if not p:
                continue
            positive = [b for b in q if remaining[b] > 0]
            if not positive:
                continue
            if spec.variant == Variant.RANDOM:
                weight_total = sum(remaining[b] for b in positive)
                val = ZERO
                for b in positive:
                    val += Fraction(remaining[b], weight_total) * _after(alloc, remaining, found, obs, q, b)
            else:
                val = min(_after(alloc, remaining, found, obs, q, b) for b in positive)
            total += p * val
        return total

    def _after(alloc, remaining, found, obs, q, b):
        nxt = list(remaining)
        nxt[b] -= 1
        return evaluate(alloc, tuple(nxt), found + 1, obs + ((q, b),))

    return min(
        evaluate(a.counts, a.counts, 0, ()) for a in enumerate_allocations(spec.n, spec.d)
    )
