import pytest

from wadeoil import ModelParams, PriceContext, Series, make_grid


@pytest.fixture
def grid10():
    return make_grid(0, 10, 10)


def flat_context(grid, p=30.0, w=0.0, **kwargs):
    return PriceContext(Series.constant(grid, p), Series.constant(grid, w), **kwargs)


@pytest.fixture
def paper_params():
    return ModelParams(alpha=0.2, m=2, c0=0.2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
