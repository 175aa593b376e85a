"""Linear-time n-fold solver for bricks with one more column than rows.

Diagonalizing A once turns every brick system A xi = bi into s_A divisibility
checks plus one free integer per brick.  The top block then collapses to a
single equation in the sum of the free integers, and the objective becomes
separable, so a greedy fill finishes the job.  Total work: one Smith form,
O(1) arithmetic per brick, one sort.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    InternalInconsistencyError,
    MalformedProblemError,
    NotEligibleError,
    TargetOutOfRangeError,
)
from .intlin import SnfDecomposition, smith_normal_form
from .model import (
    FourBlockInstance,
    Infeasible,
    IntMatrix,
    Solution,
    StructureClass,
    classify,
    evaluate,
    validate,
)


@dataclass(frozen=True)
class NfoldSnfContext:
    """Everything the greedy phase needs, derived brick by brick."""

    snf: SnfDecomposition
    fixed_y: tuple  # per brick: the s_A components pinned by divisibility
    d0: object  # forced value of the free-component sum, None if unconstrained
    intervals: tuple  # per brick: (lo, hi) for the free component
    weights: tuple  # per brick: objective rate of its free component
    c0: int  # objective value contributed by the pinned parts


def _ceil_div(a, b):
    return -((-a) // b)


def _floor_div(a, b):
    return a // b


def reduce_box_to_interval(V: IntMatrix, fixed_y, l, u):
    """Tightest integer interval for the free component, given the box.

    Each box row l_h <= base_h + theta_h * z <= u_h constrains z when
    theta_h != 0 and otherwise just checks the constant.  Returns (lo, hi),
    or Infeasible("EmptyInterval") / Infeasible("ConstantRowViolated").
    """
    t = V.rows
    k = len(fixed_y)
    if V.cols != k + 1:
        raise MalformedProblemError("fixed part leaves more than one free column")
    lo, hi = None, None
    for h in range(t):
        row = V.row(h)
        base = sum(row[j] * fixed_y[j] for j in range(k))
        theta = row[k]
        if theta == 0:
            if not (l[h] <= base <= u[h]):
                return Infeasible("ConstantRowViolated")
            continue
        if theta > 0:
            rlo = _ceil_div(l[h] - base, theta)
            rhi = _floor_div(u[h] - base, theta)
        else:
            rlo = _ceil_div(u[h] - base, theta)
            rhi = _floor_div(l[h] - base, theta)
        if lo is None or rlo > lo:
            lo = rlo
        if hi is None or rhi < hi:
            hi = rhi
    if lo is None:
        # theta is a column of a unimodular matrix, hence never all zero
        raise InternalInconsistencyError("free column of V is zero")
    if lo > hi:
        return Infeasible("EmptyInterval")
    return (lo, hi)


def greedy_ip8(intervals, weights, target):
    """Spread target units over bricks, each taking 0..(hi-lo), best rates first.

    Returns the per-brick amounts (in units above each interval's low end).
    Equal rates fill in ascending brick index.  Exchange argument: moving a
    unit from a chosen brick to an unchosen one never raises the objective.
    """
    caps = [hi - lo for lo, hi in intervals]
    if target < 0 or target > sum(caps):
        raise TargetOutOfRangeError(f"target {target} outside [0, {sum(caps)}]")
    order = sorted(range(len(caps)), key=lambda i: (-weights[i], i))
    p = [0] * len(caps)
    rem = target
    for i in order:
        if rem == 0:
            break
        take = caps[i] if caps[i] < rem else rem
        p[i] = take
        rem -= take
    return tuple(p)


def build_context(inst: FourBlockInstance):
    """Per-brick elimination; NfoldSnfContext or Infeasible."""
    n, tA, sA = inst.n, inst.t_A, inst.s_A
    snf = smith_normal_form(inst.A)
    if snf.rank != sA:
        raise InternalInconsistencyError("rank changed between classify and solve")
    alphas = snf.diagonal
    U_rows = snf.U.row_lists()
    V_rows = snf.V.row_lists()
    theta = [V_rows[h][sA] for h in range(tA)]

    fixed_y = []
    intervals = []
    weights = []
    c0 = 0
    base_sum = [0] * tA
    for i in range(n):
        bi = inst.b[i]
        s = inst.brick_slice(i)
        li = inst.l[s]
        ui = inst.u[s]
        wi = inst.w[s]
        ys = []
        for j in range(sA):
            bt = sum(U_rows[j][r] * bi[r] for r in range(sA))
            a = alphas[j]
            if bt % a != 0:
                return Infeasible("DivisibilityFail")
            ys.append(bt // a)
        iv = reduce_box_to_interval(snf.V, ys, li, ui)
        if isinstance(iv, Infeasible):
            return Infeasible("EmptyInterval")
        rate = 0
        for h in range(tA):
            base = sum(V_rows[h][j] * ys[j] for j in range(sA))
            base_sum[h] += base
            c0 += wi[h] * base
            rate += wi[h] * theta[h]
        fixed_y.append(tuple(ys))
        intervals.append(iv)
        weights.append(rate)

    # top block: every row is a one-variable equation in the free-sum
    d0 = None
    for r in range(inst.s_C):
        drow = inst.D.row(r)
        coeff = sum(drow[h] * theta[h] for h in range(tA))
        rhs = inst.b0[r] - sum(drow[h] * base_sum[h] for h in range(tA))
        if coeff == 0:
            if rhs != 0:
                return Infeasible("AggregateInconsistent")
            continue
        if rhs % coeff != 0:
            return Infeasible("AggregateInconsistent")
        root = rhs // coeff
        if d0 is None:
            d0 = root
        elif d0 != root:
            return Infeasible("AggregateInconsistent")

    return NfoldSnfContext(
        snf, tuple(fixed_y), d0, tuple(intervals), tuple(weights), c0
    )


def solve_nfold_snf(inst: FourBlockInstance):
    """Exact optimum for eligible n-fold instances; Solution or Infeasible."""
    issues = validate(inst)
    if issues:
        raise MalformedProblemError(issues[0].message)
    if classify(inst) != StructureClass.NFOLD_SNF_ELIGIBLE:
        raise NotEligibleError("needs an n-fold with t_A = s_A + 1 and full row rank")

    ctx = build_context(inst)
    if isinstance(ctx, Infeasible):
        return ctx
    n, tA, sA = inst.n, inst.t_A, inst.s_A

    low_sum = sum(lo for lo, _ in ctx.intervals)
    if ctx.d0 is None:
        # no aggregate constraint: every brick independently takes its best end
        p = tuple(
            (hi - lo if ctx.weights[i] > 0 else 0)
            for i, (lo, hi) in enumerate(ctx.intervals)
        )
    else:
        target = ctx.d0 - low_sum
        caps = sum(hi - lo for lo, hi in ctx.intervals)
        if target < 0 or target > caps:
            return Infeasible("AggregateOutOfRange")
        p = greedy_ip8(ctx.intervals, ctx.weights, target)

    V_rows = ctx.snf.V.row_lists()
    theta = [V_rows[h][sA] for h in range(tA)]
    x = []
    objective = ctx.c0
    for i in range(n):
        z = ctx.intervals[i][0] + p[i]
        ys = ctx.fixed_y[i]
        for h in range(tA):
            x.append(sum(V_rows[h][j] * ys[j] for j in range(sA)) + theta[h] * z)
        objective += ctx.weights[i] * z

    report = evaluate(inst, tuple(x))
    if not report.feasible or report.objective != objective:
        raise InternalInconsistencyError(
            f"reconstructed point infeasible or off-objective: {report.violations[:3]}"
        )
    return Solution(x=tuple(x), objective=objective, solver_tag="nfold_snf")
