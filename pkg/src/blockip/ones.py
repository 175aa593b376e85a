"""Solver for instances whose brick matrix is a single all-ones row.

Three stages.  First the bricks are collapsed into one integral aggregate
vector y of column totals, so only (x0, y) stays integer; for fixed (x0, y)
the bricks relax to a capacitated transportation problem whose matrix is
totally unimodular, hence the relaxation is exact.  Second, the integral
(x0, y) live on an explicit affine lattice (coupling rows plus the sum of
all brick rows), and the concave transportation value function is maximized
over the lattice coordinates by an exact cutting-plane search: supergradient
cuts from transportation duals, blocking-set cuts from the max-flow min-cut
feasibility condition, and box splitting with floor pruning (every candidate
value is an integer).  Third, the winning aggregate is redistributed over
the bricks by one min-cost flow.  Every run cross-checks the flow objective
against the exact LP optimum of the same polytope; a mismatch means a bug,
not a property of the instance.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InternalInconsistencyError,
    MalformedProblemError,
    NotAllOnesError,
)
from .flow import TransportProblem, TransportResult, solve_transport
from .intlin import smith_normal_form
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
from .ratlp import OPTIMAL, LpProblem, solve_lp
from .smallip import MipProblem


@dataclass(frozen=True)
class OnesContext:
    """Integral aggregate picked by the mixed-integer stage."""

    instance: FourBlockInstance
    y: tuple  # length t_A, the column totals the bricks must reach
    x0: tuple  # length t_B


def _require_ones(inst: FourBlockInstance) -> None:
    issues = validate(inst)
    if issues:
        raise MalformedProblemError(issues[0].message)
    if classify(inst) != StructureClass.ALL_ONES_ROW:
        raise NotAllOnesError("brick matrix is not a single all-ones row")


def _y_box(inst: FourBlockInstance):
    """Componentwise sums of the brick boxes: the tightest box on y."""
    y_lo = [0] * inst.t_A
    y_hi = [0] * inst.t_A
    for i in range(inst.n):
        s = inst.brick_slice(i).start
        for h in range(inst.t_A):
            y_lo[h] += inst.l[s + h]
            y_hi[h] += inst.u[s + h]
    return y_lo, y_hi


def build_mip2(inst: FourBlockInstance) -> MipProblem:
    """Aggregated program: integral x0 and y, continuous bricks.

    Variable order: x0 (t_B), y (t_A), then the bricks in block order.
    y is boxed by the componentwise sums of the brick boxes, which is the
    tightest box implied by the linking constraints alone.
    """
    _require_ones(inst)
    n, tA, tB, sC = inst.n, inst.t_A, inst.t_B, inst.s_C
    nv = tB + tA + n * tA

    y_lo, y_hi = _y_box(inst)

    rows, rhs = [], []
    for r in range(sC):
        row = [0] * nv
        row[:tB] = inst.C.row(r)
        row[tB:tB + tA] = inst.D.row(r)
        rows.append(row)
        rhs.append(inst.b0[r])
    brow = inst.B.row(0) if inst.s_A else ()
    for i in range(n):
        row = [0] * nv
        row[:tB] = brow
        s = tB + tA + i * tA
        for h in range(tA):
            row[s + h] = 1
        rows.append(row)
        rhs.append(inst.b[i][0])
    for h in range(tA):
        row = [0] * nv
        row[tB + h] = -1
        for i in range(n):
            row[tB + tA + i * tA + h] = 1
        rows.append(row)
        rhs.append(0)

    c = list(inst.w[:tB]) + [0] * tA + list(inst.w[tB:])
    lo = list(inst.l[:tB]) + y_lo + list(inst.l[tB:])
    hi = list(inst.u[:tB]) + y_hi + list(inst.u[tB:])
    mask = [True] * (tB + tA) + [False] * (n * tA)
    return MipProblem.make(LpProblem.make(c, rows, rhs, lo, hi), mask)




def _reduce_kernel(kernel):
    """Lenstra-Lenstra-Lovasz reduction of an integer lattice basis.

    The unimodular transform out of the normal form is typically extremely
    skewed: with 40-digit inputs its columns reach 80+ digits even though the
    lattice has generators near the input magnitude.  Everything downstream
    (coordinate boxes, branching geometry, nearest-point rounding) needs the
    basis near-orthogonal, and pairwise size reduction alone is not enough,
    so this is the classic exact-arithmetic LLL with delta = 3/4.
    """

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    basis = [list(v) for v in kernel]
    m = len(basis)
    if m <= 1:
        return basis

    def gso():
        mu = [[Fraction(0)] * m for _ in range(m)]
        norms, star = [], []
        for i in range(m):
            v = [Fraction(x) for x in basis[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(basis[i], star[j])) / norms[j]
                v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
            star.append(v)
            norms.append(dot(v, v))
        return mu, norms

    k = 1
    while k < m:
        mu, norms = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[j])]
                mu, norms = gso()
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            k = max(k - 1, 1)
    return basis


def _mat_solve(a, b):
    """Exact solve of a X = b for square nonsingular rational a, b as rows."""
    k = len(a)
    m = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    for col in range(k):
        piv = next(r for r in range(col, k) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(k):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[k:] for row in m]


@dataclass(frozen=True)
class _LatticeForm:
    """Affine lattice carrying every integral aggregate: (x0, y) = offset + basis v."""

    offset: tuple  # integral point of the (x0, y) solution lattice
    basis: tuple  # reduced lattice basis, one vector per coordinate
    v_lo: tuple  # coordinate box containing every lattice point of the xy box
    v_hi: tuple
    xy_lower: tuple  # box on (x0, y): instance box on x0, brick sums on y
    xy_upper: tuple


def _aggregate_lattice(inst: FourBlockInstance):
    """Lattice of the integral (x0, y) aggregates, in reduced coordinates.

    Any integral solution has (x0, y) on the affine lattice cut out by the
    coupling rows together with the balance row (the sum of every brick row):
    p + W Zᶠ with W a reduced kernel basis.  Searching directly over x0 or y
    crosses the lattice's fundamental cell one unit at a time, which is
    hopeless when the cell is wide; coordinates move cell to cell.  The
    particular point is recentred near the box midpoint (nearest-plane
    rounding) and the coordinate box comes from exact interval arithmetic,
    so it contains every lattice point of the xy box.  Returns None when the
    lattice or the coordinate box is empty, which proves infeasibility.
    """
    n, tA, tB, sC = inst.n, inst.t_A, inst.t_B, inst.s_C
    taw = tB + tA
    brow = inst.B.row(0) if inst.s_A else (0,) * tB
    rows = [list(inst.C.row(r)) + list(inst.D.row(r)) for r in range(sC)]
    rows.append([n * c for c in brow] + [1] * tA)
    rhs = list(inst.b0) + [sum(inst.b[i][0] for i in range(n))]
    dec = smith_normal_form(IntMatrix.from_rows(rows))
    r = dec.rank
    tt = dec.U.mul_vec(rhs)
    if any(tt[j] for j in range(r, len(tt))):
        return None
    base = [0] * taw
    for j in range(r):
        a = dec.S.at(j, j)
        if tt[j] % a:
            return None
        base[j] = tt[j] // a
    p = dec.V.mul_vec(base)
    basis = _reduce_kernel([[dec.V.at(i, k) for i in range(taw)] for k in range(r, taw)])
    f = len(basis)

    y_lo, y_hi = _y_box(inst)
    xy_lo = list(inst.l[:tB]) + y_lo
    xy_hi = list(inst.u[:tB]) + y_hi
    v_lo, v_hi = [], []
    if f:
        gram = [[Fraction(sum(basis[a][i] * basis[b][i] for i in range(taw))) for b in range(f)] for a in range(f)]
        proj = _mat_solve(gram, [[Fraction(basis[k][i]) for i in range(taw)] for k in range(f)])
        # recenter the particular solution near the box so numbers stay small
        mid = [Fraction(xy_lo[i] + xy_hi[i], 2) for i in range(taw)]
        shift = [round(sum(proj[k][i] * (mid[i] - p[i]) for i in range(taw))) for k in range(f)]
        if any(shift):
            p = [p[i] + sum(shift[k] * basis[k][i] for k in range(f)) for i in range(taw)]
        for k in range(f):
            lo = hi = Fraction(0)
            for i in range(taw):
                m = proj[k][i]
                if not m:
                    continue
                ends = (m * (xy_lo[i] - p[i]), m * (xy_hi[i] - p[i]))
                lo += min(ends)
                hi += max(ends)
            v_lo.append(math.ceil(lo))
            v_hi.append(math.floor(hi))
            if v_lo[-1] > v_hi[-1]:
                return None
    return _LatticeForm(
        tuple(p),
        tuple(tuple(v) for v in basis),
        tuple(v_lo),
        tuple(v_hi),
        tuple(xy_lo),
        tuple(xy_hi),
    )


def _transport_problem(inst: FourBlockInstance, ctx: OnesContext) -> TransportProblem:
    n, tA, tB = inst.n, inst.t_A, inst.t_B
    bx0 = inst.B.mul_vec(ctx.x0)[0] if inst.s_A else 0
    row_totals = [inst.b[i][0] - bx0 for i in range(n)]
    lower, upper, profit = [], [], []
    for i in range(n):
        s = tB + i * tA
        lower.append(inst.l[s:s + tA])
        upper.append(inst.u[s:s + tA])
        profit.append(inst.w[s:s + tA])
    return TransportProblem.make(row_totals, ctx.y, lower, upper, profit)


def _transport_duals(p: TransportProblem, res: TransportResult):
    """Optimal dual prices (row, column) certified by strong duality.

    Bellman-Ford over the residual graph of the optimal cells, all nodes
    seeded at distance zero, yields feasible potentials exactly when the
    residual graph has no negative cycle, which optimality guarantees.  The
    returned prices a, c satisfy the complementarity conditions, so for any
    totals (r', y') the optimum is at most the certified value plus
    a . (r' - r) + c . (y' - y): the value function is concave and (a, c)
    is a supergradient at the current totals.
    """
    n, t = len(p.row_totals), len(p.col_totals)
    arcs = []
    for i in range(n):
        for h in range(t):
            z = res.cells[i][h]
            if z < p.cell_upper[i][h]:
                arcs.append((i, n + h, -p.cell_profit[i][h]))
            if z > p.cell_lower[i][h]:
                arcs.append((n + h, i, p.cell_profit[i][h]))
    dist = [0] * (n + t)
    for _ in range(n + t):
        changed = False
        for tail, head, cost in arcs:
            nd = dist[tail] + cost
            if nd < dist[head]:
                dist[head] = nd
                changed = True
        if not changed:
            break
    else:
        raise InternalInconsistencyError("negative cycle in optimal transport residual")
    a = dist[:n]
    c = [-dist[n + h] for h in range(t)]
    dual = sum(a[i] * p.row_totals[i] for i in range(n))
    dual += sum(c[h] * p.col_totals[h] for h in range(t))
    for i in range(n):
        for h in range(t):
            gap = p.cell_profit[i][h] - a[i] - c[h]
            dual += gap * (p.cell_upper[i][h] if gap > 0 else p.cell_lower[i][h])
    if dual != res.objective:
        raise InternalInconsistencyError(
            f"transport dual value {dual} != primal objective {res.objective}"
        )
    return a, c


def _blocking_cut(p: TransportProblem):
    """Violated blocking pair (rows R, columns H) of an infeasible transport.

    After shifting out the lower bounds, a feasible flow exists iff for every
    column set H the rows' surplus that cannot drain outside H fits under H's
    demand.  The worst row set for a fixed H is found greedily, so scanning
    the 2^t column subsets is exhaustive.  Returns None when no pair is
    violated, which certifies feasibility of the totals.
    """
    n, t = len(p.row_totals), len(p.col_totals)
    rho = [p.row_totals[i] - sum(p.cell_lower[i]) for i in range(n)]
    delta = [p.col_totals[h] - sum(p.cell_lower[i][h] for i in range(n)) for h in range(t)]
    for hmask in range(1 << t):
        cols = [h for h in range(t) if hmask >> h & 1]
        out = [h for h in range(t) if not hmask >> h & 1]
        rows, lhs = [], 0
        for i in range(n):
            m = rho[i] - sum(p.cell_upper[i][h] - p.cell_lower[i][h] for h in out)
            if m > 0:
                rows.append(i)
                lhs += m
        if lhs > sum(delta[h] for h in cols):
            return rows, cols
    return None


def _optimize_aggregate(inst: FourBlockInstance, form: _LatticeForm, stats=None):
    """Optimal integral aggregate (x0, y, value) over the lattice, or None.

    Maximizes g(v) = w0 . x0(v) + T(v) over integer lattice coordinates,
    where T is the exact transportation optimum of the bricks for the
    aggregate at v.  g is evaluated only at integer points, so there is no
    relaxation gap to cross: the upper bound on a coordinate box comes from a
    small rational LP over v whose rows are valid for every lattice point of
    the box (xy box rows, the shared-row range, supergradient cuts at
    feasible evaluations, blocking cuts at infeasible ones), and g is an
    integer at every point (integral data, integral flow), so a box closes
    as soon as its bound drops below the incumbent plus one.  Evaluated
    points always either improve the incumbent, tighten the bound through
    their cut, or shrink the box through splitting, so the search is finite.
    """
    n, tA, tB = inst.n, inst.t_A, inst.t_B
    taw = tB + tA
    f = len(form.basis)
    brow = inst.B.row(0) if inst.s_A else (0,) * tB
    basis = form.basis
    p0 = form.offset

    lower, upper, profit = [], [], []
    for i in range(n):
        s = tB + i * tA
        lower.append(inst.l[s:s + tA])
        upper.append(inst.u[s:s + tA])
        profit.append(inst.w[s:s + tA])
    bvals = [inst.b[i][0] for i in range(n)]

    # range of the shared quantity q = B x0 allowed by the brick row sums
    q_lo = q_hi = None
    if n:
        q_lo = max(bvals[i] - sum(upper[i]) for i in range(n))
        q_hi = min(bvals[i] - sum(lower[i]) for i in range(n))
        if q_lo > q_hi:
            return None
    q0 = sum(brow[j] * p0[j] for j in range(tB))
    beta = [sum(brow[j] * basis[k][j] for j in range(tB)) for k in range(f)]
    w0w = [sum(inst.w[j] * basis[k][j] for j in range(tB)) for k in range(f)]

    t_lo = sum(min(inst.w[j] * inst.l[j], inst.w[j] * inst.u[j]) for j in range(inst.num_vars))
    t_hi = sum(max(inst.w[j] * inst.l[j], inst.w[j] * inst.u[j]) for j in range(inst.num_vars))

    feas_cuts = []  # (coeffs, rhs, slack_hi): coeffs . v <= rhs on feasible points
    opt_cuts = []  # (slope, rhs, slack_hi): t - slope . v <= rhs on (v, g(v))
    cache = {}
    best = None  # (value, x0, y)

    def root_min(coeffs):
        return sum(min(c * form.v_lo[k], c * form.v_hi[k]) for k, c in enumerate(coeffs))

    def root_max(coeffs):
        return sum(max(c * form.v_lo[k], c * form.v_hi[k]) for k, c in enumerate(coeffs))

    def evaluate(v):
        nonlocal best
        if v in cache:
            return
        cache[v] = None
        if stats is not None:
            stats["evaluations"] = stats.get("evaluations", 0) + 1
        xy = [p0[i] + sum(basis[k][i] * v[k] for k in range(f)) for i in range(taw)]
        if any(xy[i] < form.xy_lower[i] or xy[i] > form.xy_upper[i] for i in range(taw)):
            return
        q = sum(brow[j] * xy[j] for j in range(tB))
        if q_lo is not None and not q_lo <= q <= q_hi:
            return
        x0, y = tuple(xy[:tB]), tuple(xy[tB:])
        tp = TransportProblem.make([b - q for b in bvals], y, lower, upper, profit)
        tr = solve_transport(tp)
        if isinstance(tr, TransportResult):
            value = sum(inst.w[j] * x0[j] for j in range(tB)) + tr.objective
            a, c = _transport_duals(tp, tr)
            asum = sum(a)
            slope = [
                w0w[k] - asum * beta[k]
                + sum(c[h] * basis[k][tB + h] for h in range(tA))
                for k in range(f)
            ]
            rhs = value - sum(slope[k] * v[k] for k in range(f))
            opt_cuts.append((slope, rhs, rhs - t_lo + root_max(slope)))
            cache[v] = value
            if best is None or value > best[0]:
                best = (value, x0, y)
            return
        pair = _blocking_cut(tp)
        if pair is None:
            raise InternalInconsistencyError(
                f"transport infeasible ({tr.reason}) but no blocking pair"
            )
        rows, cols = pair
        # surplus of R that cannot leave H must fit under H's demand; linear in v
        coeffs = [
            -len(rows) * beta[k] - sum(basis[k][tB + h] for h in cols)
            for k in range(f)
        ]
        rhs = (
            sum(p0[tB + h] - sum(lower[i][h] for i in range(n)) for h in cols)
            + sum(upper[i][h] - lower[i][h] for i in rows for h in range(tA) if h not in cols)
            - sum(bvals[i] - q0 - sum(lower[i]) for i in rows)
        )
        if sum(coeffs[k] * v[k] for k in range(f)) <= rhs:
            raise InternalInconsistencyError("blocking cut fails to separate its point")
        feas_cuts.append((coeffs, rhs, rhs - root_min(coeffs)))

    def bound(box_lo, box_hi):
        nrows = taw + (q_lo is not None) + len(feas_cuts) + len(opt_cuts)
        width = f + 1 + nrows
        rows, rhs = [], []
        col_lo = list(box_lo) + [t_lo]
        col_hi = list(box_hi) + [t_hi]

        def add(coeffs, t_coeff, r, s_lo, s_hi):
            if s_lo > s_hi:
                return False
            row = [0] * width
            row[:f] = coeffs
            row[f] = t_coeff
            row[f + 1 + len(rows)] = 1
            rows.append(row)
            rhs.append(r)
            col_lo.append(s_lo)
            col_hi.append(s_hi)
            return True

        for i in range(taw):
            ok = add([basis[k][i] for k in range(f)], 0, 0,
                     p0[i] - form.xy_upper[i], p0[i] - form.xy_lower[i])
            if not ok:
                return None
        if q_lo is not None and not add(beta, 0, 0, q0 - q_hi, q0 - q_lo):
            return None
        for coeffs, r, s_hi in feas_cuts:
            if not add(list(coeffs), 0, r, 0, s_hi):
                return None
        for slope, r, s_hi in opt_cuts:
            if not add([-s for s in slope], 1, r, 0, s_hi):
                return None
        c = [0] * width
        c[f] = 1
        res = solve_lp(LpProblem.make(c, rows, rhs, col_lo, col_hi))
        if res.status != OPTIMAL:
            return None
        return res.value, res.point[:f]

    if f == 0:
        evaluate(())
        return best

    evaluate(tuple(min(max(0, form.v_lo[k]), form.v_hi[k]) for k in range(f)))
    seq = 0
    heap = [(-t_hi, 0, form.v_lo, form.v_hi)]
    while heap:
        _, _, box_lo, box_hi = heapq.heappop(heap)
        got = bound(box_lo, box_hi)
        if got is None:
            continue
        value, vhat = got
        ceiling = math.floor(value)
        if best is not None and ceiling <= best[0]:
            continue
        cand_axes = []
        for k in range(f):
            lo = max(box_lo[k], min(math.floor(vhat[k]), box_hi[k]))
            hi = max(box_lo[k], min(math.ceil(vhat[k]), box_hi[k]))
            cand_axes.append((lo, hi) if hi != lo else (lo,))
        fresh = [v for v in itertools.product(*cand_axes) if v not in cache]
        seq += 1
        if fresh:
            for v in fresh:
                evaluate(v)
            heapq.heappush(heap, (-ceiling, -seq, box_lo, box_hi))
            continue
        split = next((k for k in range(f) if vhat[k].denominator != 1), None)
        if split is None:
            split = max(range(f), key=lambda k: box_hi[k] - box_lo[k])
            if box_hi[split] == box_lo[split]:
                continue
            at = (box_lo[split] + box_hi[split]) // 2
        else:
            at = math.floor(vhat[split])
        left_hi = list(box_hi)
        left_hi[split] = at
        right_lo = list(box_lo)
        right_lo[split] = at + 1
        heapq.heappush(heap, (-ceiling, -seq, box_lo, tuple(left_hi)))
        heapq.heappush(heap, (-ceiling, -seq, tuple(right_lo), box_hi))
    return best


def _lp_of_transport(p: TransportProblem) -> LpProblem:
    n, t = len(p.row_totals), len(p.col_totals)
    nv = n * t
    rows, rhs = [], []
    for i in range(n):
        row = [0] * nv
        for h in range(t):
            row[i * t + h] = 1
        rows.append(row)
        rhs.append(p.row_totals[i])
    for h in range(t):
        row = [0] * nv
        for i in range(n):
            row[i * t + h] = 1
        rows.append(row)
        rhs.append(p.col_totals[h])
    c = [p.cell_profit[i][h] for i in range(n) for h in range(t)]
    lo = [p.cell_lower[i][h] for i in range(n) for h in range(t)]
    hi = [p.cell_upper[i][h] for i in range(n) for h in range(t)]
    return LpProblem.make(c, rows, rhs, lo, hi)


def round_bricks(inst: FourBlockInstance, ctx: OnesContext, audit_lp=True):
    """Integral bricks meeting the aggregate exactly; n x t_A matrix.

    The polytope is nonempty whenever ctx came from a feasible aggregate
    solve, so an infeasible flow here is an internal contradiction.  With
    audit_lp the flow objective is also checked, exactly, against the
    rational LP optimum of the identical polytope.
    """
    p = _transport_problem(inst, ctx)
    res = solve_transport(p)
    if not isinstance(res, TransportResult):
        raise InternalInconsistencyError(
            f"rounding flow infeasible ({res.reason}) despite feasible aggregate"
        )
    if audit_lp:
        lp = solve_lp(_lp_of_transport(p))
        if lp.status != OPTIMAL or lp.value != res.objective:
            raise InternalInconsistencyError(
                f"flow objective {res.objective} != LP optimum "
                f"{lp.value if lp.status == OPTIMAL else lp.status}"
            )
    return res.cells


def solve_ones(inst: FourBlockInstance, audit_lp=True):
    """Optimal integral solution, Infeasible, or NotAllOnes for wrong shapes."""
    _require_ones(inst)
    form = _aggregate_lattice(inst)
    if form is None:
        return Infeasible("NoLatticePoint")
    agg = _optimize_aggregate(inst, form)
    if agg is None:
        return Infeasible("NoLatticePoint")
    value, x0, y = agg
    ctx = OnesContext(inst, y, x0)
    cells = round_bricks(inst, ctx, audit_lp=audit_lp)
    x = x0 + tuple(v for row in cells for v in row)
    report = evaluate(inst, x)
    if not report.feasible or report.objective != value:
        raise InternalInconsistencyError(
            f"assembled point infeasible or off-objective: {report.violations[:3]}"
        )
    return Solution(x=x, objective=report.objective, solver_tag="ones")
