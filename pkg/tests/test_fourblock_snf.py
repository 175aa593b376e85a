import random

import pytest

from blockip.errors import MalformedProblemError, NotEligibleError
from blockip.fourblock_snf import (
    EliminationData,
    build_grid,
    cell_values,
    elimination_from_bezout,
    elimination_from_snf,
    solve_4block_snf,
)
from blockip.intlin import integer_rank
from blockip.model import (
    FourBlockInstance,
    Infeasible,
    IntMatrix,
    Solution,
    evaluate,
)
from blockip.oracle import OracleBudget, enumerate_optimum


def random_full_rank(rng, s_A, coeff=3):
    """Random s_A x (s_A+1) matrix with full row rank."""
    t_A = s_A + 1
    while True:
        rows = [[rng.randint(-coeff, coeff) for _ in range(t_A)] for _ in range(s_A)]
        M = IntMatrix.from_rows(rows)
        if integer_rank(M) == s_A:
            return M


def random_instance(rng, s_A=None, n=None, width=3, seeded_rate=0.6, A=None):
    """Small eligible instance; seeded instances have a known lattice point."""
    if A is not None:
        s_A = A.rows
    elif s_A is None:
        s_A = rng.choice([1, 1, 2])
    t_A = s_A + 1
    if n is None:
        n = rng.randint(1, 4)
    t_B = rng.randint(0, 2)
    s_C = rng.randint(0, 2)
    if A is None:
        A = random_full_rank(rng, s_A)
    B = IntMatrix.from_rows(
        [[rng.randint(-2, 2) for _ in range(t_B)] for _ in range(s_A)]
    ) if t_B else IntMatrix.zero(s_A, 0)
    C = IntMatrix.from_rows(
        [[rng.randint(-2, 2) for _ in range(t_B)] for _ in range(s_C)]
    ) if s_C and t_B else IntMatrix.zero(s_C, t_B)
    D = IntMatrix.from_rows(
        [[rng.randint(-2, 2) for _ in range(t_A)] for _ in range(s_C)]
    ) if s_C else IntMatrix.zero(0, t_A)
    N = t_B + n * t_A
    l = [rng.randint(-3, 1) for _ in range(N)]
    u = [v + rng.randint(0, width) for v in l]
    w = [rng.randint(-4, 4) for _ in range(N)]
    if rng.random() < seeded_rate:
        x = [rng.randint(l[k], u[k]) for k in range(N)]
        x0 = x[:t_B]
        b0 = list(C.mul_vec(x0))
        b = []
        for i in range(n):
            xi = x[t_B + i * t_A : t_B + (i + 1) * t_A]
            bi = [av + bv for av, bv in zip(A.mul_vec(xi), B.mul_vec(x0))]
            b.append(tuple(bi))
            for r, v in enumerate(D.mul_vec(xi)):
                b0[r] += v
    else:
        b0 = [rng.randint(-6, 6) for _ in range(s_C)]
        b = [tuple(rng.randint(-6, 6) for _ in range(s_A)) for _ in range(n)]
    return FourBlockInstance.make(n, A, B, C, D, b0, b, l, u, w)


def running_example():
    return FourBlockInstance.make(
        n=2,
        A=IntMatrix.from_rows([(1, 1)]),
        B=IntMatrix.from_rows([(1,)]),
        C=IntMatrix.from_rows([(1,)]),
        D=IntMatrix.from_rows([(1, 2)]),
        b0=(7,),
        b=((4,), (6,)),
        l=(-2, -1, -1, 0, 0),
        u=(3, 4, 4, 5, 5),
        w=(2, 1, -1, 3, 1),
    )


def test_frozen_running_example():
    got = solve_4block_snf(running_example())
    assert isinstance(got, Solution)
    assert got.objective == 20
    assert got.x == (2, 3, -1, 4, 0)
    assert got.solver_tag == "fourblock_snf"
    alt = solve_4block_snf(running_example(), eliminate="snf")
    assert isinstance(alt, Solution) and alt.objective == 20


def test_rejects_malformed():
    inst = running_example()
    bad = FourBlockInstance.make(
        inst.n, inst.A, inst.B, inst.C, inst.D, inst.b0, ((4,),),
        inst.l, inst.u, inst.w,
    )
    with pytest.raises(MalformedProblemError):
        solve_4block_snf(bad)


def test_rejects_wide_brick_matrix():
    # two more columns than rows: outside this solver's reach
    inst = FourBlockInstance.nfold(
        n=1,
        A=IntMatrix.from_rows([(1, 1, 1)]),
        D=IntMatrix.zero(0, 3),
        b0=(),
        b=((3,),),
        l=(0, 0, 0),
        u=(2, 2, 2),
        w=(1, 1, 1),
    )
    with pytest.raises(NotEligibleError):
        solve_4block_snf(inst)


def test_rejects_unknown_elimination_route():
    with pytest.raises(MalformedProblemError):
        solve_4block_snf(running_example(), eliminate="lll")


def test_divisibility_gap_is_infeasible():
    # brick equations differ by an amount the brick lattice cannot absorb
    inst = FourBlockInstance.nfold(
        n=2,
        A=IntMatrix.from_rows([(2, 0)]),
        D=IntMatrix.zero(0, 2),
        b0=(),
        b=((0,), (1,)),
        l=(-5, -5, -5, -5),
        u=(5, 5, 5, 5),
        w=(1, 1, 1, 1),
    )
    for route in ("bezout", "snf", "auto"):
        got = solve_4block_snf(inst, eliminate=route)
        assert got == Infeasible("DivisibilityFail")


def test_no_bricks_reduces_to_shared_variables():
    inst = FourBlockInstance.make(
        n=0, A=IntMatrix.from_rows([(1, 1)]), B=IntMatrix.from_rows([(1, 0)]),
        C=IntMatrix.from_rows([(1, 1)]), D=IntMatrix.from_rows([(1, 2)]),
        b0=(4,), b=(), l=(0, 0), u=(3, 3), w=(2, 1),
    )
    got = solve_4block_snf(inst)
    assert got == Solution(x=(3, 1), objective=7, solver_tag="fourblock_snf")
    odd = FourBlockInstance.make(
        n=0, A=IntMatrix.from_rows([(1, 1)]), B=IntMatrix.from_rows([(2,)]),
        C=IntMatrix.from_rows([(2,)]), D=IntMatrix.from_rows([(1, 2)]),
        b0=(3,), b=(), l=(0,), u=(5,), w=(1,),
    )
    assert solve_4block_snf(odd) == Infeasible("NoLatticePoint")


def test_no_variables_at_all():
    inst = FourBlockInstance.make(
        n=0, A=IntMatrix.from_rows([(1, 1)]), B=IntMatrix.zero(1, 0),
        C=IntMatrix.zero(1, 0), D=IntMatrix.from_rows([(1, 2)]),
        b0=(0,), b=(), l=(), u=(), w=(),
    )
    assert solve_4block_snf(inst) == Solution((), 0, "fourblock_snf")


def test_all_ones_brick_row_is_eligible():
    # the aggregation solver owns this shape, but the quotient route must
    # still accept it: it satisfies the same structural requirements
    rng = random.Random(3)
    for _ in range(12):
        inst = random_instance(rng, A=IntMatrix.from_rows([(1, 1)]))
        got = solve_4block_snf(inst)
        want = enumerate_optimum(inst, OracleBudget(10**7))
        if isinstance(want, Solution):
            assert isinstance(got, Solution) and got.objective == want.objective
        else:
            assert isinstance(got, Infeasible)


def test_elimination_shifts_solve_the_difference_systems():
    rng = random.Random(11)
    for _ in range(40):
        inst = random_instance(rng)
        elim = elimination_from_snf(inst)
        if isinstance(elim, Infeasible):
            continue
        assert all(v == 0 for v in elim.offsets[0])
        assert any(v != 0 for v in elim.theta)
        assert all(v == 0 for v in inst.A.mul_vec(elim.theta))
        for i in range(inst.n):
            delta = inst.A.mul_vec(elim.offsets[i])
            want = [inst.b[i][r] - inst.b[0][r] for r in range(inst.s_A)]
            assert list(delta) == want
        totals = [sum(off[h] for off in elim.offsets) for h in range(inst.t_A)]
        assert list(elim.offset_totals) == totals
        c0 = sum(
            inst.w[inst.t_B + i * inst.t_A + h] * elim.offsets[i][h]
            for i in range(inst.n)
            for h in range(inst.t_A)
        )
        assert elim.c0 == c0


def test_bezout_elimination_steps():
    inst = FourBlockInstance.nfold(
        n=2, A=IntMatrix.from_rows([(4, 6)]), D=IntMatrix.zero(0, 2),
        b0=(), b=((2,), (6,)), l=(-9,) * 4, u=(9,) * 4, w=(1, 1, 1, 1),
    )
    elim = elimination_from_bezout(inst)
    assert elim.theta == (3, -2)  # (mu/g, -lam/g) for gcd 2
    assert all(v == 0 for v in inst.A.mul_vec(elim.theta))
    assert list(inst.A.mul_vec(elim.offsets[1])) == [4]
    with pytest.raises(MalformedProblemError):
        elimination_from_bezout(
            FourBlockInstance.nfold(
                n=1, A=IntMatrix.from_rows([(1, 0), (0, 1)]),
                D=IntMatrix.zero(0, 2), b0=(), b=((0, 0),),
                l=(0, 0), u=(1, 1), w=(0, 0),
            )
        )


def _unit_elim(theta):
    return EliminationData(
        theta=(theta,), offsets=((0,),), offset_totals=(0,),
        fixed_y=((),), c0=0, snf=None,
    )


def test_grid_partition_positive_step():
    # step 3, shifted bounds [4, 7]: the bound values change at 1 and 2
    grid = build_grid(_unit_elim(3), [(4,)], [(7,)])
    cells = grid.per_h[0]
    assert [(c.tau, c.tau_bar) for c in cells] == [(0, 0), (1, 1), (2, 2)]
    assert [(c.d[0], c.d_bar[0]) for c in cells] == [(2, 2), (1, 2), (1, 1)]


def test_grid_partition_negative_step():
    grid = build_grid(_unit_elim(-3), [(4,)], [(7,)])
    cells = grid.per_h[0]
    assert [(c.tau, c.tau_bar) for c in cells] == [(0, 0), (1, 1), (2, 2)]
    assert [(c.d[0], c.d_bar[0]) for c in cells] == [(-2, -2), (-2, -1), (-1, -1)]


def test_grid_unit_step_single_cell():
    grid = build_grid(_unit_elim(1), [(4,)], [(7,)])
    cells = grid.per_h[0]
    assert len(cells) == 1
    (c,) = cells
    assert (c.tau, c.tau_bar, c.d[0], c.d_bar[0]) == (0, 0, 4, 7)


def test_grid_values_constant_within_cells():
    # the stored quotient bounds must hold at every remainder of the cell
    def ceil_div(a, b):
        return -((-a) // b)

    rng = random.Random(17)
    for _ in range(200):
        theta = rng.choice([v for v in range(-7, 8) if v])
        n = rng.randint(1, 3)
        lower, upper, offsets = [], [], []
        for _ in range(n):
            lo = rng.randint(-10, 10)
            lower.append((lo,))
            upper.append((lo + rng.randint(0, 12),))
            offsets.append((rng.randint(-10, 10),))
        offsets[0] = (0,)
        elim = EliminationData(
            theta=(theta,), offsets=tuple(offsets),
            offset_totals=(sum(o[0] for o in offsets),),
            fixed_y=((),) * n, c0=0, snf=None,
        )
        cells = build_grid(elim, lower, upper).per_h[0]
        assert cells[0].tau == 0 and cells[-1].tau_bar == abs(theta) - 1
        for k, c in enumerate(cells):
            if k:
                assert c.tau == cells[k - 1].tau_bar + 1
            for xi in range(c.tau, c.tau_bar + 1):
                for i in range(n):
                    a = lower[i][0] - offsets[i][0] - xi
                    b = upper[i][0] - offsets[i][0] - xi
                    if theta > 0:
                        d, dbar = ceil_div(a, theta), b // theta
                    else:
                        d, dbar = ceil_div(b, theta), a // theta
                    assert (d, dbar) == (c.d[i], c.d_bar[i])


def test_every_cell_value_is_dominated_by_the_optimum():
    rng = random.Random(29)
    checked = 0
    while checked < 12:
        inst = random_instance(rng, seeded_rate=1.0)
        got = solve_4block_snf(inst)
        if not isinstance(got, Solution):
            continue
        vals = cell_values(inst)
        assert vals and max(vals) == got.objective
        assert all(v <= got.objective for v in vals)
        checked += 1


def test_elimination_routes_agree_on_single_row_bricks():
    rng = random.Random(41)
    feas = 0
    for _ in range(60):
        while True:
            lam, mu = rng.randint(-6, 6), rng.randint(-6, 6)
            if (lam, mu) != (0, 0):
                break
        inst = random_instance(rng, A=IntMatrix.from_rows([(lam, mu)]))
        gb = solve_4block_snf(inst, eliminate="bezout")
        gs = solve_4block_snf(inst, eliminate="snf")
        if isinstance(gb, Solution):
            assert isinstance(gs, Solution) and gs.objective == gb.objective
            feas += 1
        else:
            assert isinstance(gs, Infeasible)
    assert feas >= 10


def test_matches_enumeration_battery():
    rng = random.Random(20260814)
    feas = infeas = 0
    for _ in range(200):
        inst = random_instance(rng)
        want = enumerate_optimum(inst, OracleBudget(10**7))
        got = solve_4block_snf(inst)
        if isinstance(want, Solution):
            assert isinstance(got, Solution), (inst, got, want)
            assert got.objective == want.objective, (inst, got, want)
            report = evaluate(inst, got.x)
            assert report.feasible and report.objective == got.objective
            feas += 1
        else:
            assert isinstance(got, Infeasible), (inst, got)
            infeas += 1
    assert feas >= 60 and infeas >= 30


def test_pinned_boxes():
    # width-zero boxes leave a single candidate point
    A = IntMatrix.from_rows([(1, 1)])
    B = IntMatrix.from_rows([(1,)])
    C = IntMatrix.from_rows([(1,)])
    D = IntMatrix.from_rows([(0, 0)])
    x = (1, 2, 3, 0, 4)
    good = FourBlockInstance.make(
        2, A, B, C, D, (1,), ((6,), (5,)), x, x, (1, 1, 1, 1, 1),
    )
    got = solve_4block_snf(good)
    assert got == Solution(x=x, objective=10, solver_tag="fourblock_snf")
    bad = FourBlockInstance.make(
        2, A, B, C, D, (1,), ((6,), (4,)), x, x, (1, 1, 1, 1, 1),
    )
    assert solve_4block_snf(bad) == Infeasible("NoLatticePoint")


def test_thread_count_does_not_change_the_answer():
    rng = random.Random(5)
    for _ in range(12):
        inst = random_instance(rng, n=rng.randint(2, 4))
        assert solve_4block_snf(inst, threads=1) == solve_4block_snf(
            inst, threads=3
        )
