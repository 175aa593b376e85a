import random

import pytest

from blockip.errors import NotAllOnesError
from blockip.model import FourBlockInstance, Infeasible, IntMatrix, Solution, evaluate
from blockip.ones import OnesContext, build_mip2, round_bricks, solve_ones
from blockip.oracle import OracleBudget, enumerate_optimum


def ones_instance(n, t_A, t_B, s_C, rng, width=4, coeff=5, seeded=True):
    """Random instance with a single all-ones brick row."""
    def rand_mat(rows, cols):
        if rows == 0:
            return IntMatrix.zero(0, cols)
        return IntMatrix.from_rows(
            [[rng.randint(-coeff, coeff) for _ in range(cols)] for _ in range(rows)]
        )

    A = IntMatrix.from_rows([[1] * t_A])
    B = rand_mat(1, t_B)
    C = rand_mat(s_C, t_B)
    D = rand_mat(s_C, t_A)
    N = t_B + n * t_A
    l = [rng.randint(-3, 2) for _ in range(N)]
    u = [v + rng.randint(0, width) for v in l]
    w = [rng.randint(-6, 6) for _ in range(N)]
    if seeded:
        seed = [rng.randint(l[j], u[j]) for j in range(N)]
        x0 = seed[:t_B]
        agg = [0] * t_A
        for i in range(n):
            s = t_B + i * t_A
            for h in range(t_A):
                agg[h] += seed[s + h]
        b0 = [cv + dv for cv, dv in zip(C.mul_vec(x0), D.mul_vec(agg))]
        bx0 = B.mul_vec(x0)[0]
        b = [[bx0 + sum(seed[t_B + i * t_A:t_B + (i + 1) * t_A])] for i in range(n)]
    else:
        b0 = [rng.randint(-8, 8) for _ in range(s_C)]
        b = [[rng.randint(-6, 6)] for _ in range(n)]
    return FourBlockInstance.make(n, A, B, C, D, b0, b, l, u, w)


def test_mask_counts_integral_variables():
    rng = random.Random(9100)
    inst = ones_instance(3, 2, 2, 1, rng)
    mp = build_mip2(inst)
    assert sum(mp.integer_mask) == inst.t_A + inst.t_B
    assert len(mp.integer_mask) == inst.t_B + inst.t_A + inst.n * inst.t_A


def test_mask_without_shared_brick():
    rng = random.Random(9101)
    inst = ones_instance(2, 2, 0, 1, rng)
    mp = build_mip2(inst)
    assert sum(mp.integer_mask) == inst.t_A


def test_wrong_shape_rejected():
    A = IntMatrix.from_rows([[1, 2]])
    inst = FourBlockInstance.nfold(
        1, A, IntMatrix.zero(0, 2), [], [[3]], [0, 0], [5, 5], [1, 1]
    )
    with pytest.raises(NotAllOnesError):
        solve_ones(inst)


def test_degenerate_no_bricks():
    # n=0: only the shared brick remains, the aggregate is pinned to zero
    A = IntMatrix.from_rows([[1, 1]])
    B = IntMatrix.from_rows([[1]])
    C = IntMatrix.from_rows([[2]])
    D = IntMatrix.from_rows([[1, 1]])
    inst = FourBlockInstance.make(0, A, B, C, D, [6], [], [0], [9], [1])
    res = solve_ones(inst)
    assert isinstance(res, Solution)
    assert res.x == (3,)
    assert res.objective == 3


def test_single_brick_matches_aggregate():
    A = IntMatrix.from_rows([[1, 1]])
    inst = FourBlockInstance.nfold(
        1, A, IntMatrix.zero(0, 2), [], [[4]], [0, 0], [3, 3], [2, 1]
    )
    res = solve_ones(inst)
    assert isinstance(res, Solution)
    assert sum(res.x) == 4
    assert res.objective == 7  # x = (3, 1)


def test_forced_box():
    A = IntMatrix.from_rows([[1, 1]])
    inst = FourBlockInstance.nfold(
        2, A, IntMatrix.zero(0, 2), [], [[3], [1]],
        [2, 1, 0, 1], [2, 1, 0, 1], [5, -1, 7, 7],
    )
    res = solve_ones(inst)
    assert res.x == (2, 1, 0, 1)


def test_infeasible_demand():
    A = IntMatrix.from_rows([[1, 1]])
    inst = FourBlockInstance.nfold(
        1, A, IntMatrix.zero(0, 2), [], [[5]], [0, 0], [1, 1], [1, 1]
    )
    res = solve_ones(inst)
    assert isinstance(res, Infeasible)


def test_round_bricks_spreads_aggregate():
    rng = random.Random(9102)
    inst = ones_instance(3, 2, 0, 0, rng, seeded=True)
    sol = solve_ones(inst)
    if isinstance(sol, Infeasible):
        pytest.skip("seeded instance unexpectedly infeasible")
    mp = build_mip2(inst)
    from blockip.smallip import solve_mip

    agg = solve_mip(mp)
    y = tuple(int(v) for v in agg.point[:inst.t_A])
    cells = round_bricks(inst, OnesContext(inst, y, ()))
    assert len(cells) == inst.n
    for h in range(inst.t_A):
        assert sum(row[h] for row in cells) == y[h]


def test_random_battery_against_oracle():
    rng = random.Random(9103)
    feasible = infeasible = 0
    for trial in range(120):
        n = rng.randint(0, 3)
        t_A = rng.randint(1, 3)
        t_B = rng.randint(0, 2)
        s_C = rng.randint(0, 2)
        inst = ones_instance(n, t_A, t_B, s_C, rng, width=3, coeff=3,
                             seeded=trial % 2 == 0)
        want = enumerate_optimum(inst, OracleBudget(10 ** 7))
        got = solve_ones(inst)
        if isinstance(want, Infeasible):
            assert isinstance(got, Infeasible), (trial,)
            infeasible += 1
        else:
            assert isinstance(got, Solution), (trial,)
            assert got.objective == want.objective, (trial,)
            assert evaluate(inst, got.x).feasible
            feasible += 1
    assert feasible >= 30 and infeasible >= 10


def test_lattice_route_matches_direct_mip():
    # the lattice search and the direct aggregated MIP must agree exactly
    from blockip.ratlp import INFEASIBLE
    from blockip.smallip import solve_mip

    rng = random.Random(9104)
    agreed = 0
    for trial in range(40):
        inst = ones_instance(
            rng.randint(1, 4), rng.randint(1, 3), rng.randint(0, 2),
            rng.randint(0, 2), rng, width=3, coeff=3, seeded=trial % 2 == 0,
        )
        direct = solve_mip(build_mip2(inst))
        got = solve_ones(inst)
        if direct.status == INFEASIBLE:
            assert isinstance(got, Infeasible), (trial,)
        else:
            assert isinstance(got, Solution), (trial,)
            assert got.objective == direct.value, (trial,)
            agreed += 1
    assert agreed >= 15


def test_transport_duals_certify_supergradient():
    from blockip.flow import TransportProblem, TransportResult, solve_transport
    from blockip.ones import _transport_duals

    rng = random.Random(9105)
    for _ in range(25):
        n, t = rng.randint(1, 4), rng.randint(1, 3)
        lower = [[rng.randint(-3, 1) for _ in range(t)] for _ in range(n)]
        upper = [[lo + rng.randint(0, 5) for lo in row] for row in lower]
        profit = [[rng.randint(-6, 6) for _ in range(t)] for _ in range(n)]

        def totals_of(z):
            return [sum(row) for row in z], [sum(z[i][h] for i in range(n)) for h in range(t)]

        base = [[rng.randint(lower[i][h], upper[i][h]) for h in range(t)] for i in range(n)]
        r, y = totals_of(base)
        res = solve_transport(TransportProblem.make(r, y, lower, upper, profit))
        assert isinstance(res, TransportResult)
        a, c = _transport_duals(TransportProblem.make(r, y, lower, upper, profit), res)
        for _ in range(4):
            other = [[rng.randint(lower[i][h], upper[i][h]) for h in range(t)] for i in range(n)]
            r2, y2 = totals_of(other)
            res2 = solve_transport(TransportProblem.make(r2, y2, lower, upper, profit))
            assert isinstance(res2, TransportResult)
            # prices are a supergradient of the concave optimum in the totals
            bound = res.objective
            bound += sum(a[i] * (r2[i] - r[i]) for i in range(n))
            bound += sum(c[h] * (y2[h] - y[h]) for h in range(t))
            assert res2.objective <= bound


def test_large_magnitudes_complete_exactly():
    big = 10 ** 12
    A = IntMatrix.from_rows([[1, 1]])
    B = IntMatrix.from_rows([[1]])
    C = IntMatrix.from_rows([[1]])
    D = IntMatrix.from_rows([[0, 0]])
    inst = FourBlockInstance.make(
        2, A, B, C, D, [7], [[big], [big]],
        [0, 0, 0, 0, 0], [big, big, big, big, big], [0, 3, 1, 2, 1],
    )
    res = solve_ones(inst)
    assert isinstance(res, Solution)
    assert evaluate(inst, res.x).feasible
    # per brick the full weight belongs on the profitable column
    assert res.objective == 3 * (big - 7) + 2 * (big - 7)
