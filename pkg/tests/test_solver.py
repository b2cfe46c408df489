import numpy as np
import pytest

from projcert.solver import (
    WITNESS_TOL,
    RegionProblem,
    SolverStatus,
    feasibility,
    min_distance_on_boundary,
)

def check_witness(problem, out):
    y = out.witness
    scale = np.maximum(np.linalg.norm(problem.G, axis=1), 1.0)
    assert np.all((problem.G @ y + problem.h) / scale <= WITNESS_TOL)
    if problem.eq_normal is not None:
        assert abs(problem.eq_normal @ y + problem.eq_offset) / np.linalg.norm(problem.eq_normal) <= WITNESS_TOL
    assert np.linalg.norm(y - problem.center) == pytest.approx(out.distance, rel=1e-7, abs=1e-12)


def test_unconstrained_hyperplane():
    p = RegionProblem([0.5, 0.2], np.zeros((0, 2)), np.zeros(0), [-2, 2], 0)
    out = min_distance_on_boundary(p)
    assert out.status is SolverStatus.FEASIBLE
    assert out.distance == pytest.approx(0.212132034, abs=1e-9)
    np.testing.assert_allclose(out.witness, [0.35, 0.35], atol=1e-12)


def test_active_inequality():
    p = RegionProblem([0.5, 0.2], [[0, -1]], [0.4], [1, -1], 0)
    out = min_distance_on_boundary(p)
    assert out.feasible
    np.testing.assert_allclose(out.witness, [0.4, 0.4], atol=1e-9)
    assert out.distance == pytest.approx(np.sqrt(0.05), abs=1e-9)
    check_witness(p, out)


def test_active_inequality_against_grid():
    xs = np.arange(-1, 2, 1e-3)
    # on x1 = x2 the feasible set is x2 >= 0.4
    t = xs[xs >= 0.4]
    grid = np.min(np.hypot(t - 0.5, t - 0.2))
    out = min_distance_on_boundary(RegionProblem([0.5, 0.2], [[0, -1]], [0.4], [1, -1], 0))
    assert abs(out.distance - grid) <= 2e-3


def test_empty_set():
    p = RegionProblem([0.0, 0.0], [[1, 0], [-1, 0]], [1, 1])
    assert min_distance_on_boundary(p).status is SolverStatus.INFEASIBLE
    assert feasibility([[1, 0], [-1, 0]], [1, 1]).status is SolverStatus.INFEASIBLE


def test_halfplane_feasible():
    out = feasibility([[1, 0]], [0])
    assert out.feasible
    assert out.witness[0] <= 0
    assert out.interior


def test_degenerate_equality_rejected():
    with pytest.raises(ValueError):
        RegionProblem([0, 0], np.zeros((0, 2)), np.zeros(0), [0, 0], 1)
    with pytest.raises(ValueError):
        RegionProblem([0, 0], np.zeros((1, 3)), np.zeros(1))


def test_zero_row_inequalities():
    assert feasibility([[0, 0]], [-1]).feasible
    assert feasibility([[0, 0]], [1]).status is SolverStatus.INFEASIBLE


def random_problem(rng, m, k, with_eq):
    G = rng.normal(size=(k, m))
    h = rng.normal(size=k)
    x = rng.normal(size=m)
    if with_eq:
        return RegionProblem(x, G, h, rng.normal(size=m), rng.normal())
    return RegionProblem(x, G, h)


def cvx_distance(p):
    cp = pytest.importorskip("cvxpy")
    y = cp.Variable(p.dim)
    cons = [p.G @ y + p.h <= 0] if p.G.shape[0] else []
    if p.eq_normal is not None:
        cons.append(p.eq_normal @ y + p.eq_offset == 0)
    prob = cp.Problem(cp.Minimize(cp.sum_squares(y - p.center)), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.status, (np.sqrt(prob.value) if prob.status == cp.OPTIMAL else None)


def test_agrees_with_independent_conic_solver():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(12)
    compared = 0
    for trial in range(200):
        m = int(rng.integers(2, 6))
        p = random_problem(rng, m, int(rng.integers(1, 12)), trial % 2 == 0)
        out = min_distance_on_boundary(p)
        status, dist = cvx_distance(p)
        if status == cp.OPTIMAL:
            assert out.feasible
            assert out.distance == pytest.approx(dist, rel=1e-5, abs=1e-6)
            check_witness(p, out)
            compared += 1
        elif status == cp.INFEASIBLE:
            assert out.status is not SolverStatus.FEASIBLE
    assert compared > 50


def test_dominates_plain_projection():
    rng = np.random.default_rng(2)
    for _ in range(300):
        p = random_problem(rng, 3, 6, True)
        out = min_distance_on_boundary(p)
        if out.feasible:
            e = p.eq_normal
            proj = abs(e @ p.center + p.eq_offset) / np.linalg.norm(e)
            assert out.distance >= proj - 1e-9
            check_witness(p, out)


def test_matches_dense_grid_in_2d():
    rng = np.random.default_rng(8)
    g = np.arange(-1.25, 1.25, 1e-3)
    X, Y = np.meshgrid(g, g, sparse=True)
    checked = 0
    for _ in range(30):
        p = random_problem(rng, 2, 3, False)
        p = RegionProblem(p.center * 0.25, p.G, p.h)
        inside = np.ones((g.size, g.size), bool)
        for (a, b), c in zip(p.G, p.h):
            inside &= a * X + b * Y + c <= 0
        if not inside.any():
            continue
        d2 = (X - p.center[0]) ** 2 + (Y - p.center[1]) ** 2
        dgrid = float(np.sqrt(np.min(np.where(inside, d2, np.inf))))
        if dgrid > 0.9:
            continue  # nearest point may sit outside the grid window
        out = min_distance_on_boundary(p)
        assert out.feasible
        assert abs(out.distance - dgrid) <= 2e-3
        checked += 1
    assert checked >= 10


def test_feasibility_agrees_with_rejection_sampling():
    rng = np.random.default_rng(5)
    for _ in range(200):
        G = rng.normal(size=(4, 2))
        h = rng.normal(size=4)
        samples = rng.uniform(-3, 3, size=(4000, 2))
        hit = np.all(samples @ G.T + h < 0, axis=1)
        out = feasibility(G, h)
        if hit.any():
            assert out.feasible
        if out.feasible:
            assert np.all(G @ out.witness + h <= WITNESS_TOL * np.maximum(np.linalg.norm(G, axis=1), 1))


def test_iteration_budget_respected():
    rng = np.random.default_rng(1)
    p = random_problem(rng, 4, 10, True)
    out = min_distance_on_boundary(p, max_iter=0)
    assert out.status in (SolverStatus.NOT_CONVERGED, SolverStatus.FEASIBLE, SolverStatus.INFEASIBLE)
    assert out.iterations <= 1
