"""Ground-truth engines: exhaustive lattice enumeration and subset-sum DP.

The enumerator walks variables in odometer order and prunes with per-row
residual intervals, so block-structured instances collapse to a tiny search
tree.  A visited-node budget keeps it from wandering off into boxes it has
no business enumerating; any box whose volume fits the budget is guaranteed
to finish.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .errors import BudgetExceededError, MalformedProblemError
from .model import Infeasible, Solution


@dataclass(frozen=True)
class OracleBudget:
    max_points: int = 10**7


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def enumerate_optimum(inst, budget: OracleBudget | None = None):
    """Exact optimum of any instance exposing dense_rows / l / u / w.

    Returns a Solution or Infeasible; raises BudgetExceededError once the
    number of visited value assignments passes budget.max_points.
    """
    if budget is None:
        budget = OracleBudget()
    max_points = budget.max_points
    lower, upper, weights = inst.l, inst.u, inst.w
    N = len(lower)
    for j in range(N):
        if not isinstance(lower[j], int) or not isinstance(upper[j], int):
            raise MalformedProblemError("enumeration needs finite integer bounds")
    if any(lower[j] > upper[j] for j in range(N)):
        return Infeasible("EmptyBox")

    rows = list(inst.dense_rows())
    by_var = [[] for _ in range(N)]
    residual = []
    # sufmin/sufmax[r][j] bound the contribution of variables >= j to row r
    sufmin = []
    sufmax = []
    ends_at = [[] for _ in range(N)]
    for r, (coeffs, rhs) in enumerate(rows):
        support = [j for j in range(N) if coeffs[j] != 0]
        if not support:
            if rhs != 0:
                return Infeasible("ConstantRowViolated")
            continue
        idx = len(residual)
        residual.append(rhs)
        mins = [0] * (N + 1)
        maxs = [0] * (N + 1)
        for j in range(N - 1, -1, -1):
            c = coeffs[j]
            lo_c = hi_c = 0
            if c > 0:
                lo_c, hi_c = c * lower[j], c * upper[j]
            elif c < 0:
                lo_c, hi_c = c * upper[j], c * lower[j]
            mins[j] = mins[j + 1] + lo_c
            maxs[j] = maxs[j + 1] + hi_c
        sufmin.append(mins)
        sufmax.append(maxs)
        for j in support:
            by_var[j].append((idx, coeffs[j]))
        ends_at[support[-1]].append(idx)

    if N == 0:
        return Solution((), 0, "bruteforce")

    best_obj = None
    best_x = None
    x = [0] * N
    visited = 0
    sys.setrecursionlimit(max(sys.getrecursionlimit(), N + 200))

    def descend(j: int, obj: int):
        nonlocal best_obj, best_x, visited
        if j == N:
            if best_obj is None or obj > best_obj:
                best_obj = obj
                best_x = tuple(x)
            return
        lo, hi = lower[j], upper[j]
        touched = by_var[j]
        for idx, c in touched:
            # residual minus future contributions brackets c * x_j
            rem_lo = residual[idx] - sufmax[idx][j + 1]
            rem_hi = residual[idx] - sufmin[idx][j + 1]
            if c > 0:
                lo = max(lo, _ceil_div(rem_lo, c))
                hi = min(hi, rem_hi // c)
            else:
                lo = max(lo, _ceil_div(rem_hi, c))
                hi = min(hi, rem_lo // c)
        if lo > hi:
            return
        finals = ends_at[j]
        wj = weights[j]
        for v in range(lo, hi + 1):
            visited += 1
            if visited > max_points:
                raise BudgetExceededError(visited, max_points)
            for idx, c in touched:
                residual[idx] -= c * v
            if all(residual[idx] == 0 for idx in finals):
                x[j] = v
                descend(j + 1, obj + wj * v)
            for idx, c in touched:
                residual[idx] += c * v
        return

    descend(0, 0)
    if best_obj is None:
        return Infeasible("NoLatticePoint")
    return Solution(best_x, best_obj, "bruteforce")


def subset_sum_dp(betas, delta: int) -> bool:
    """Decide whether some subset of betas sums exactly to delta.

    Bitset DP for targets up to 1e6, meet-in-the-middle for up to 25 items;
    anything bigger is out of budget.
    """
    if delta < 0:
        return False
    if delta == 0:
        return True
    items = [b for b in betas if 0 < b <= delta]
    if sum(items) < delta:
        return False
    if delta <= 10**6:
        reachable = 1
        mask = (1 << (delta + 1)) - 1
        for b in items:
            reachable |= (reachable << b) & mask
        return bool((reachable >> delta) & 1)
    if len(items) <= 25:
        half = len(items) // 2
        left, right = items[:half], items[half:]

        def sums(vals):
            acc = {0}
            for v in vals:
                acc |= {s + v for s in acc if s + v <= delta}
            return acc

        left_sums = sums(left)
        right_sums = sums(right)
        return any(delta - s in left_sums for s in right_sums)
    raise BudgetExceededError(len(items), 25)
