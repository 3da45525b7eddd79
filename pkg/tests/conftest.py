import pytest

from varadhan_lab import build_series_solution


@pytest.fixture(scope="session")
def sol_n3_p2():
    """Certified series solution on the unit 3-ball at p = 2.

    Built once per session; zero-finding dominates the cost and every
    consumer only reads.
    """
    return build_series_solution(3, 2.0, 1.0)


@pytest.fixture(scope="session")
def sol_n2_pinf():
    """Cosine series on the unit disk at p = inf."""
    return build_series_solution(2, float("inf"), 1.0)


@pytest.fixture(scope="session")
def sol_n2_p3():
    """Series on the unit disk at p = 3 (fractional Bessel order)."""
    return build_series_solution(2, 3.0, 1.0)
