"""Shared fixtures and the ``--run-slow`` switch."""

import pytest

from dunnettctp.design import Dataset


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run the long Monte Carlo checks.",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def four_groups():
    """Control plus three treatments, five observations each; treatment 3
    is clearly shifted.
    """
    responses = {
        0: [9.8, 10.4, 10.1, 9.6, 10.2],
        1: [10.3, 10.9, 9.9, 10.6, 10.4],
        2: [10.7, 11.2, 10.1, 11.0, 10.6],
        3: [12.6, 13.4, 12.9, 13.8, 12.8],
    }
    groups = [g for g, values in responses.items() for _ in values]
    values = [y for ys in responses.values() for y in ys]
    return Dataset.from_arrays(groups, values)


@pytest.fixture
def two_groups():
    return Dataset.from_arrays(
        [0, 0, 0, 0, 1, 1, 1, 1, 1],
        [5.1, 4.8, 5.6, 5.0, 5.9, 6.3, 5.7, 6.1, 6.6],
    )


@pytest.fixture
def blocked():
    """Three groups crossed with two blocks (``f`` and ``m``)."""
    groups = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]
    blocks = ["f", "m", "f", "m", "f", "m", "f", "m", "f", "m", "f", "m"]
    responses = [3.1, 4.0, 2.8, 4.3, 3.9, 4.9, 3.6, 5.2, 4.4, 5.8, 4.7, 5.5]
    return Dataset.from_arrays(groups, responses, blocks=blocks)


DATASET_CSV = """\
group,response
0,9.8
0,10.4
0,10.1
0,9.6
1,10.3
1,10.9
1,9.9
1,10.6
2,12.7
2,13.1
2,12.2
2,13.5
"""


@pytest.fixture
def dataset_csv(tmp_path):
    path = tmp_path / "trial.csv"
    path.write_text(DATASET_CSV)
    return path
