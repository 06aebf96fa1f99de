"""Exact linear programming over rationals.

A two-phase primal simplex on sparse rational rows.  Pivoting follows
Bland's rule by default (termination guaranteed); a largest-coefficient
rule with automatic Bland fallback is available for speed on degenerate
game programs.  Every answer carries an exact certificate:

* ``OPTIMAL``  -- primal point plus dual multipliers with matching
  objective values (strong duality, checked before returning).
* ``INFEASIBLE`` -- Farkas multipliers combining the constraints into an
  impossibility (checked).
* ``UNBOUNDED`` -- a feasible point plus an improving ray (checked).

Sizes here are desk scale (hundreds of rows); no attempt is made at
large-scale performance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

LESS_EQUAL = "<="
EQUAL = "="
GREATER_EQUAL = ">="
_SENSES = (LESS_EQUAL, EQUAL, GREATER_EQUAL)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LPError(ValueError):
    """Malformed program: bad dimensions, senses, or bounds."""


class CertificateError(RuntimeError):
    """An internal exactness invariant failed; indicates a solver bug."""


class LinearProgram:
    """max/min  c.x  subject to rows ``a.x (<=|=|>=) b`` and variable bounds.

    Bounds default to ``x_j >= 0``; ``None`` marks an infinite end.  All
    coefficients are coerced to Fraction on entry.
    """

    def __init__(self, num_vars: int, objective=None):
        if num_vars < 0:
            raise LPError("negative variable count")
        self.num_vars = num_vars
        if objective is None:
            objective = [_ZERO] * num_vars
        self.objective = [Fraction(c) for c in objective]
        if len(self.objective) != num_vars:
            raise LPError("objective length does not match variable count")
        self.rows: list[dict[int, Fraction]] = []
        self.senses: list[str] = []
        self.rhs: list[Fraction] = []
        self.lower: list[Fraction | None] = [_ZERO] * num_vars
        self.upper: list[Fraction | None] = [None] * num_vars

    def set_objective(self, j: int, coeff) -> None:
        self.objective[j] = Fraction(coeff)

    def set_bounds(self, j: int, lower, upper) -> None:
        self.lower[j] = None if lower is None else Fraction(lower)
        self.upper[j] = None if upper is None else Fraction(upper)
        if self.lower[j] is not None and self.upper[j] is not None and self.lower[j] > self.upper[j]:
            raise LPError(f"empty bound interval for variable {j}")

    def add_constraint(self, coeffs, sense: str, rhs) -> int:
        """Add one row; ``coeffs`` is a dict or iterable of (col, value)."""
        if sense not in _SENSES:
            raise LPError(f"unknown sense {sense!r}")
        row: dict[int, Fraction] = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for j, value in items:
            if not 0 <= j < self.num_vars:
                raise LPError(f"column {j} out of range")
            value = Fraction(value)
            if value:
                row[j] = row.get(j, _ZERO) + value
        self.rows.append({j: v for j, v in row.items() if v})
        self.senses.append(sense)
        self.rhs.append(Fraction(rhs))
        return len(self.rows) - 1


@dataclass
class LPSolution:
    """Outcome of one solve.

    ``dual`` is indexed by the original constraints.  For ``INFEASIBLE`` it
    holds the Farkas multipliers; for ``UNBOUNDED`` it holds the improving
    ray over the *variables* (the certificate of unboundedness), while
    ``primal`` holds a feasible starting point.
    """

    status: str
    objective_value: Fraction | None
    primal: tuple[Fraction, ...] | None
    dual: tuple[Fraction, ...] | None
    pivots: int = 0
    bound_dual: dict = field(default_factory=dict, repr=False)


# ---------------------------------------------------------------------------
# Internal standard form:  max c.x,  A x = b,  x >= 0,  b >= 0.
# ---------------------------------------------------------------------------


class _Standard:
    """Expansion of a LinearProgram into equality standard form.

    Variables with bounds other than ``[0, inf)`` are split into a
    difference of nonnegatives, and their finite bounds become extra rows,
    so the whole program is rows over nonnegative columns.
    """

    def __init__(self, lp: LinearProgram, maximize: bool):
        self.lp = lp
        self.maximize = maximize
        self.var_cols: list[list[tuple[int, int]]] = []  # var -> [(col, sign)]
        self.col_var: list[tuple[int, int]] = []  # col -> (var, sign)
        for j in range(lp.num_vars):
            if lp.lower[j] == 0 and lp.upper[j] is None:
                col = len(self.col_var)
                self.col_var.append((j, 1))
                self.var_cols.append([(col, 1)])
            else:
                pos, neg = len(self.col_var), len(self.col_var) + 1
                self.col_var.append((j, 1))
                self.col_var.append((j, -1))
                self.var_cols.append([(pos, 1), (neg, -1)])
        self.num_structural = len(self.col_var)

        sign = 1 if maximize else -1
        self.cost = [_ZERO] * self.num_structural
        for j in range(lp.num_vars):
            for col, s in self.var_cols[j]:
                self.cost[col] = sign * s * lp.objective[j]

        # Rows: originals first, then bound rows.  ``row_origin[i]`` tells
        # where internal row i came from for dual mapping.
        self.rows: list[dict[int, Fraction]] = []
        self.senses: list[str] = []
        self.rhs: list[Fraction] = []
        self.row_origin: list[tuple] = []
        for i, row in enumerate(lp.rows):
            self.rows.append(self._expand(row))
            self.senses.append(lp.senses[i])
            self.rhs.append(lp.rhs[i])
            self.row_origin.append(("row", i))
        for j in range(lp.num_vars):
            lo, hi = lp.lower[j], lp.upper[j]
            if lo == 0 and hi is None:
                continue
            if lo is not None:
                self.rows.append(self._expand({j: _ONE}))
                self.senses.append(GREATER_EQUAL)
                self.rhs.append(lo)
                self.row_origin.append(("lower", j))
            if hi is not None:
                self.rows.append(self._expand({j: _ONE}))
                self.senses.append(LESS_EQUAL)
                self.rhs.append(hi)
                self.row_origin.append(("upper", j))
        self.num_rows = len(self.rows)

    def _expand(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for j, value in row.items():
            for col, s in self.var_cols[j]:
                out[col] = out.get(col, _ZERO) + s * value
        return {c: v for c, v in out.items() if v}

    def structural_point(self, cols: dict[int, Fraction]) -> tuple[Fraction, ...]:
        """Collapse split columns back into original-variable values."""
        x = [_ZERO] * self.lp.num_vars
        for col, value in cols.items():
            if col >= self.num_structural:
                continue
            j, s = self.col_var[col]
            x[j] += s * value
        return tuple(x)


class _Tableau:
    """Sparse row tableau with explicit slack/artificial bookkeeping."""

    def __init__(self, std: _Standard):
        self.std = std
        m = std.num_rows
        self.rows: list[dict[int, Fraction]] = []
        self.b: list[Fraction] = []
        self.flip: list[int] = []
        self.basis: list[int] = [-1] * m
        self.unit_col: list[int] = [-1] * m  # initial +/-1 column of each row
        self.unit_sign: list[int] = [0] * m
        self.artificial: set[int] = set()
        self.num_cols = std.num_structural
        self.pivots = 0

        for i in range(m):
            row = dict(std.rows[i])
            rhs = std.rhs[i]
            sense = std.senses[i]
            flip = 1
            if rhs < 0:
                flip = -1
                rhs = -rhs
                row = {c: -v for c, v in row.items()}
                sense = {LESS_EQUAL: GREATER_EQUAL, GREATER_EQUAL: LESS_EQUAL, EQUAL: EQUAL}[sense]
            self.flip.append(flip)
            if sense == LESS_EQUAL:
                slack = self._new_col()
                row[slack] = _ONE
                self.basis[i] = slack
                self.unit_col[i], self.unit_sign[i] = slack, 1
            elif sense == GREATER_EQUAL:
                surplus = self._new_col()
                row[surplus] = -_ONE
                self.unit_col[i], self.unit_sign[i] = surplus, -1
                art = self._new_col()
                row[art] = _ONE
                self.artificial.add(art)
                self.basis[i] = art
            else:
                art = self._new_col()
                row[art] = _ONE
                self.artificial.add(art)
                self.basis[i] = art
                self.unit_col[i], self.unit_sign[i] = art, 1
            self.rows.append({c: v for c, v in row.items() if v})
            self.b.append(rhs)

    def _new_col(self) -> int:
        col = self.num_cols
        self.num_cols += 1
        return col

    # -- reduced costs -----------------------------------------------------

    def reduced_costs(self, cost: dict[int, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
        """c_j - y.A_j for all columns, plus the basis objective value."""
        red = dict(cost)
        value = _ZERO
        for i, bi in enumerate(self.basis):
            cb = cost.get(bi, _ZERO)
            if not cb:
                continue
            value += cb * self.b[i]
            for c, v in self.rows[i].items():
                nv = red.get(c, _ZERO) - cb * v
                if nv:
                    red[c] = nv
                else:
                    red.pop(c, None)
        return red, value

    def pivot(self, r: int, col: int, red: dict[int, Fraction]) -> None:
        self.pivots += 1
        prow = self.rows[r]
        piv = prow[col]
        if piv != 1:
            prow = {c: v / piv for c, v in prow.items()}
            self.rows[r] = prow
            self.b[r] /= piv
        brow = self.b[r]
        for i in range(len(self.rows)):
            if i == r:
                continue
            factor = self.rows[i].get(col)
            if not factor:
                continue
            target = self.rows[i]
            for c, v in prow.items():
                nv = target.get(c, _ZERO) - factor * v
                if nv:
                    target[c] = nv
                else:
                    target.pop(c, None)
            self.b[i] -= factor * brow
        factor = red.get(col)
        if factor:
            for c, v in prow.items():
                nv = red.get(c, _ZERO) - factor * v
                if nv:
                    red[c] = nv
                else:
                    red.pop(c, None)
        self.basis[r] = col

    def run_simplex(self, cost: dict[int, Fraction], barred: set[int], rule: str):
        """Maximize, returning (status, reduced costs).  ``status`` is
        OPTIMAL or UNBOUNDED (with ``self.unbounded_col`` set)."""
        red, _ = self.reduced_costs(cost)
        bland = rule == "bland"
        stall = 0
        last_value = None
        while True:
            entering = None
            if not bland:
                best = _ZERO
                for c, v in red.items():
                    if c in barred or v <= 0:
                        continue
                    if v > best or (v == best and (entering is None or c < entering)):
                        best = v
                        entering = c
            else:
                for c, v in red.items():
                    if c in barred or v <= 0:
                        continue
                    if entering is None or c < entering:
                        entering = c
            if entering is None:
                return OPTIMAL, red
            ratio = None
            leave = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                r = self.b[i] / a
                if ratio is None or r < ratio or (r == ratio and self.basis[i] < self.basis[leave]):
                    ratio = r
                    leave = i
            if leave is None:
                self.unbounded_col = entering
                return UNBOUNDED, red
            self.pivot(leave, entering, red)
            if not bland:
                # Degeneracy guard: persistent zero-progress pivots switch
                # to Bland's rule, restoring the termination guarantee.
                value = sum(cost.get(self.basis[i], _ZERO) * self.b[i] for i in range(len(self.rows)))
                if value == last_value:
                    stall += 1
                    if stall > 2 * (self.num_cols + len(self.rows)):
                        bland = True
                else:
                    stall = 0
                    last_value = value

    def duals(self, red: dict[int, Fraction], cost: dict[int, Fraction]) -> list[Fraction]:
        """Row prices y (internal orientation) read off the unit columns."""
        out = []
        for i in range(len(self.rows)):
            col, sign = self.unit_col[i], self.unit_sign[i]
            r = red.get(col, _ZERO)
            c = cost.get(col, _ZERO)
            # r = c - y_i * sign  =>  y_i = (c - r) / sign
            out.append((c - r) if sign == 1 else (r - c))
        return out

    def primal_cols(self) -> dict[int, Fraction]:
        return {self.basis[i]: self.b[i] for i in range(len(self.rows)) if self.b[i]}


def solve_lp(lp: LinearProgram, sense: str = "max", pivot_rule: str = "bland") -> LPSolution:
    """Solve exactly; every status returns a verified certificate."""
    if sense not in ("max", "min"):
        raise LPError(f"sense must be 'max' or 'min', got {sense!r}")
    _validate(lp)
    maximize = sense == "max"
    std = _Standard(lp, maximize)
    tab = _Tableau(std)

    # Phase 1: drive artificials to zero.
    if tab.artificial:
        cost1 = {c: -_ONE for c in tab.artificial}
        status, red = tab.run_simplex(cost1, barred=set(), rule=pivot_rule)
        if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
            raise CertificateError("phase 1 reported unbounded")
        infeas = -sum(tab.b[i] for i in range(len(tab.rows)) if tab.basis[i] in tab.artificial)
        if infeas < 0:
            y = tab.duals(red, cost1)
            sol = _farkas_solution(lp, std, tab, y)
            _check_farkas(std, tab, y)
            return sol
        _pivot_out_artificials(tab)

    cost2 = {c: std.cost[c] for c in range(std.num_structural) if std.cost[c]}
    status, red = tab.run_simplex(cost2, barred=tab.artificial, rule=pivot_rule)

    if status == UNBOUNDED:
        return _unbounded_solution(lp, std, tab, maximize)

    cols = tab.primal_cols()
    x = std.structural_point(cols)
    y_internal = tab.duals(red, cost2)
    objective = sum(lp.objective[j] * x[j] for j in range(lp.num_vars)) if lp.num_vars else _ZERO
    _check_optimal(std, tab, cols, y_internal, cost2)

    dual = [_ZERO] * len(lp.rows)
    bound_dual: dict = {}
    orient = 1 if maximize else -1
    for i, origin in enumerate(std.row_origin):
        value = orient * tab.flip[i] * y_internal[i]
        if origin[0] == "row":
            dual[origin[1]] = value
        else:
            bound_dual[origin] = value
    return LPSolution(
        status=OPTIMAL,
        objective_value=Fraction(objective),
        primal=tuple(x),
        dual=tuple(dual),
        pivots=tab.pivots,
        bound_dual=bound_dual,
    )


def _validate(lp: LinearProgram) -> None:
    if not (len(lp.rows) == len(lp.senses) == len(lp.rhs)):
        raise LPError("row bookkeeping out of sync")
    if not (len(lp.objective) == len(lp.lower) == len(lp.upper) == lp.num_vars):
        raise LPError("column bookkeeping out of sync")


def _pivot_out_artificials(tab: _Tableau) -> None:
    for i in range(len(tab.rows)):
        if tab.basis[i] not in tab.artificial:
            continue
        pivot_col = None
        for c in sorted(tab.rows[i]):
            if c not in tab.artificial and tab.rows[i][c]:
                pivot_col = c
                break
        if pivot_col is not None:
            tab.pivot(i, pivot_col, {})
        # Otherwise the row is redundant; the artificial stays basic at 0.


def _farkas_solution(lp, std, tab, y_internal) -> LPSolution:
    dual = [_ZERO] * len(lp.rows)
    bound_dual: dict = {}
    for i, origin in enumerate(std.row_origin):
        value = tab.flip[i] * y_internal[i]
        if origin[0] == "row":
            dual[origin[1]] = value
        else:
            bound_dual[origin] = value
    return LPSolution(
        status=INFEASIBLE,
        objective_value=None,
        primal=None,
        dual=tuple(dual),
        pivots=tab.pivots,
        bound_dual=bound_dual,
    )


def _unbounded_solution(lp, std, tab, maximize) -> LPSolution:
    col = tab.unbounded_col
    ray_cols = {col: _ONE}
    for i, row in enumerate(tab.rows):
        a = row.get(col)
        if a:
            ray_cols[tab.basis[i]] = ray_cols.get(tab.basis[i], _ZERO) - a
    ray = std.structural_point(ray_cols)
    point = std.structural_point(tab.primal_cols())
    _check_ray(lp, point, ray, maximize)
    return LPSolution(
        status=UNBOUNDED,
        objective_value=None,
        primal=tuple(point),
        dual=tuple(ray),
        pivots=tab.pivots,
    )


# ---------------------------------------------------------------------------
# Certificate checks (always run; failures are solver bugs).
# ---------------------------------------------------------------------------


def _internal_column(std: _Standard, tab: _Tableau, col: int) -> dict[int, Fraction]:
    out = {}
    for i in range(std.num_rows):
        v = std.rows[i].get(col, _ZERO) if col < std.num_structural else _ZERO
        v *= tab.flip[i]
        if col == tab.unit_col[i]:
            v += tab.unit_sign[i]
        if v:
            out[i] = v
    return out


def _check_optimal(std, tab, cols, y, cost2) -> None:
    m = std.num_rows
    b = [tab.flip[i] * std.rhs[i] for i in range(m)]
    # Primal feasibility, internal equality form.
    lhs = [_ZERO] * m
    for col, value in cols.items():
        if value < 0:
            raise CertificateError("negative basic value")
        for i, a in _internal_column(std, tab, col).items():
            lhs[i] += a * value
    if lhs != b:
        raise CertificateError("primal infeasibility at optimum")
    # Dual feasibility on every non-artificial column, and strong duality.
    primal_obj = sum(cost2.get(c, _ZERO) * v for c, v in cols.items())
    dual_obj = sum(y[i] * b[i] for i in range(m))
    if primal_obj != dual_obj:
        raise CertificateError("strong duality gap")
    for col in range(tab.num_cols):
        if col in tab.artificial:
            continue
        reduced = cost2.get(col, _ZERO) - sum(
            y[i] * a for i, a in _internal_column(std, tab, col).items()
        )
        if reduced > 0:
            raise CertificateError("dual infeasibility at optimum")


def _check_farkas(std, tab, y) -> None:
    m = std.num_rows
    b = [tab.flip[i] * std.rhs[i] for i in range(m)]
    if sum(y[i] * b[i] for i in range(m)) >= 0:
        raise CertificateError("Farkas certificate has nonnegative value")
    for col in range(tab.num_cols):
        if col in tab.artificial:
            continue
        if sum(y[i] * a for i, a in _internal_column(std, tab, col).items()) < 0:
            raise CertificateError("Farkas certificate violates a column")


def _check_ray(lp, point, ray, maximize) -> None:
    gain = sum(lp.objective[j] * ray[j] for j in range(lp.num_vars))
    if (gain <= 0) if maximize else (gain >= 0):
        raise CertificateError("ray does not improve the objective")
    for i, row in enumerate(lp.rows):
        delta = sum(v * ray[j] for j, v in row.items())
        sense = lp.senses[i]
        ok = delta <= 0 if sense == LESS_EQUAL else delta >= 0 if sense == GREATER_EQUAL else delta == 0
        if not ok:
            raise CertificateError("ray leaves the feasible cone")
    for j in range(lp.num_vars):
        if lp.lower[j] is not None and ray[j] < 0:
            raise CertificateError("ray violates a lower bound direction")
        if lp.upper[j] is not None and ray[j] > 0:
            raise CertificateError("ray violates an upper bound direction")


def check_certificate(lp: LinearProgram, sense: str, sol: LPSolution) -> bool:
    """Re-verify an OPTIMAL solution from scratch in the original space.

    Checks primal feasibility, dual sign conditions, dual feasibility of
    every column (with bound multipliers folded in), and exact equality of
    the two objectives.  Raises CertificateError on any violation.
    """
    if sol.status != OPTIMAL:
        raise LPError("certificate check expects an optimal solution")
    maximize = sense == "max"
    x, y = sol.primal, sol.dual
    for i, row in enumerate(lp.rows):
        lhs = sum(v * x[j] for j, v in row.items())
        s = lp.senses[i]
        if s == LESS_EQUAL and lhs > lp.rhs[i]:
            raise CertificateError(f"row {i} violated")
        if s == GREATER_EQUAL and lhs < lp.rhs[i]:
            raise CertificateError(f"row {i} violated")
        if s == EQUAL and lhs != lp.rhs[i]:
            raise CertificateError(f"row {i} violated")
        expected = 1 if maximize else -1
        if s == LESS_EQUAL and expected * y[i] < 0:
            raise CertificateError(f"dual sign on row {i}")
        if s == GREATER_EQUAL and expected * y[i] > 0:
            raise CertificateError(f"dual sign on row {i}")
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and x[j] < lo:
            raise CertificateError(f"lower bound on variable {j}")
        if hi is not None and x[j] > hi:
            raise CertificateError(f"upper bound on variable {j}")
    # Reduced costs: rho_j = sum_i y_i a_ij + bound multipliers - c_j.
    rho = [-lp.objective[j] for j in range(lp.num_vars)]
    for i, row in enumerate(lp.rows):
        if not y[i]:
            continue
        for j, v in row.items():
            rho[j] += y[i] * v
    for (kind, j), mult in sol.bound_dual.items():
        rho[j] += mult
    for j in range(lp.num_vars):
        free = lp.lower[j] is None and lp.upper[j] is None
        if free:
            if rho[j] != 0:
                raise CertificateError(f"free variable {j} has nonzero reduced cost")
        elif (rho[j] < 0) if maximize else (rho[j] > 0):
            raise CertificateError(f"dual infeasibility at variable {j}")
    primal_obj = sum(lp.objective[j] * x[j] for j in range(lp.num_vars))
    dual_obj = sum(y[i] * lp.rhs[i] for i in range(len(lp.rows)))
    for (kind, j), mult in sol.bound_dual.items():
        bound = lp.lower[j] if kind == "lower" else lp.upper[j]
        dual_obj += mult * bound
    if primal_obj != dual_obj:
        raise CertificateError("objective mismatch in certificate")
    return True


# ---------------------------------------------------------------------------
# Feasibility of mixed weak/strict systems.
# ---------------------------------------------------------------------------

STRICT_LESS = "<"
STRICT_GREATER = ">"


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: tuple[Fraction, ...] | None
    certificate: tuple[Fraction, ...] | None
    margin: Fraction | None


def check_feasible(num_vars: int, constraints, lower=None, upper=None) -> FeasibilityResult:
    """Decide a system of weak and strict linear constraints exactly.

    ``constraints`` is an iterable of ``(coeffs, sense, rhs)`` with sense in
    ``{<=, =, >=, <, >}``.  Strict rows are decided without epsilons: a
    margin variable t is pushed into every strict row and maximized; the
    strict system is feasible iff the best margin is positive.  The witness
    then satisfies every strict row with room to spare.
    """
    constraints = list(constraints)
    strict = [i for i, (_, s, _) in enumerate(constraints) if s in (STRICT_LESS, STRICT_GREATER)]
    t_col = num_vars
    lp = LinearProgram(num_vars + 1)
    for j in range(num_vars):
        lo = _ZERO if lower is None else lower[j]
        hi = None if upper is None else upper[j]
        lp.set_bounds(j, lo, hi)
    lp.set_bounds(t_col, None, _ONE)  # cap keeps the margin objective bounded
    lp.set_objective(t_col, _ONE)
    for coeffs, sense, rhs in constraints:
        row = dict(coeffs.items() if isinstance(coeffs, dict) else coeffs)
        if sense == STRICT_LESS:
            row[t_col] = row.get(t_col, _ZERO) + _ONE
            lp.add_constraint(row, LESS_EQUAL, rhs)
        elif sense == STRICT_GREATER:
            row[t_col] = row.get(t_col, _ZERO) - _ONE
            lp.add_constraint(row, GREATER_EQUAL, rhs)
        else:
            lp.add_constraint(row, sense, rhs)

    if not strict:
        # Pure weak system: only existence matters.
        sol = solve_lp(lp, "max")
        if sol.status == INFEASIBLE:
            return FeasibilityResult(False, None, sol.dual, None)
        return FeasibilityResult(True, sol.primal[:num_vars], None, None)

    sol = solve_lp(lp, "max")
    if sol.status == INFEASIBLE:
        return FeasibilityResult(False, None, sol.dual, None)
    margin = sol.objective_value
    if margin > 0:
        return FeasibilityResult(True, sol.primal[:num_vars], None, margin)
    return FeasibilityResult(False, None, sol.dual, margin)
