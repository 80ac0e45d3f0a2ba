from pottsforge.phase import (
    complete_graph,
    default_lambda_grid,
    jump_summary,
    phase_sweep,
    rows_to_csv,
)
from pottsforge.rationals import to_rat


def test_complete_graph():
    g = complete_graph(5)
    assert g.n == 5 and g.m == 10


def test_default_grid_spans_critical_value():
    grid = default_lambda_grid(10)
    lam_c = to_rat("4944/1000")
    assert grid[0] < lam_c < grid[-1]
    assert all(a < b for a, b in zip(grid, grid[1:]))


def test_sweep_rows_and_determinism():
    rows1 = phase_sweep(3, 12, 4, 99, lambdas=["2", "4"], starts=("empty",))
    rows2 = phase_sweep(3, 12, 4, 99, lambdas=["2", "4"], starts=("empty",))
    assert rows_to_csv(rows1) == rows_to_csv(rows2)
    assert len(rows1) == 2 * 4
    assert {r.sweep for r in rows1} == {1, 2, 3, 4}
    assert all(1 <= r.largest <= 12 for r in rows1)


def test_jobs_parallel_matches_serial():
    serial = phase_sweep(3, 10, 3, 5, lambdas=["2", "3"], starts=("empty", "full"))
    parallel = phase_sweep(3, 10, 3, 5, lambdas=["2", "3"],
                           starts=("empty", "full"), jobs=2)
    assert rows_to_csv(serial) == rows_to_csv(parallel)


def test_jump_summary_structure():
    rows = phase_sweep(3, 10, 3, 5, lambdas=["1/2", "5"], starts=("full",))
    s = jump_summary(rows, 3)
    assert abs(s["theta"] - 0.5) < 1e-12
    assert set(s["jump"].keys()) == {"full"}
    assert len(s["finals"]["full"]) == 2
