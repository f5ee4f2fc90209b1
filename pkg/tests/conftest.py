import sys
from pathlib import Path

import numpy as np
import pytest

from rawlskmeans.clustering import ClusterAssignment
from rawlskmeans.dataset import encode, ingest_adult, make_random_instance, make_tiny_instance, sample_for_parity

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
ADULT_CSV = ROOT / "data" / "adult.csv"

# desk configuration: seeds from the documented CLI examples
SAMPLE_SEED = 7
SCAN_SEED = 1
DESK_RUNS = 500
DESK_K = 5


@pytest.fixture
def t1():
    return make_tiny_instance([0.0, 0.2, 0.6, 1.0], [0, 0, 1, 1])


@pytest.fixture
def t1_opt(t1):
    return ClusterAssignment.from_labels(t1, [0, 0, 1, 1], 2)


def random_assignment(dataset, k, seed):
    """Random labels with every cluster non-empty."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, k, dataset.n)
    labels[:k] = np.arange(k)
    return ClusterAssignment.from_labels(dataset, labels, k)


def random_case(n, F, k, seed):
    d = make_random_instance(n, F, seed)
    return d, random_assignment(d, k, seed + 1000)


@pytest.fixture(scope="session")
def adult_full():
    if not ADULT_CSV.exists():
        pytest.skip("data/adult.csv not present (see scripts/fetch_adult.py)")
    return encode(ingest_adult(ADULT_CSV).records)


@pytest.fixture(scope="session")
def desk(adult_full):
    return sample_for_parity(adult_full, 500, SAMPLE_SEED)


@pytest.fixture(scope="session")
def desk_scan(desk):
    from rawlskmeans.scan import scan

    return scan(desk, DESK_K, DESK_RUNS, SCAN_SEED, "minority-lag")


@pytest.fixture(scope="session")
def desk_start(desk_scan):
    return desk_scan.utilitarian_record.assignment


@pytest.fixture(scope="session")
def desk_r1(desk, desk_start):
    from rawlskmeans.traverse import traverse

    return traverse(desk, desk_start, "r1")


@pytest.fixture(scope="session")
def desk_r2(desk, desk_start):
    from rawlskmeans.operators import PruneConfig
    from rawlskmeans.traverse import traverse

    return traverse(desk, desk_start, "r2", PruneConfig(5.0, 5.0))


@pytest.fixture(scope="session")
def desk_r2_all(desk, desk_start):
    from rawlskmeans.operators import PruneConfig
    from rawlskmeans.traverse import traverse

    return traverse(desk, desk_start, "r2", PruneConfig(5.0, 5.0, pool="all"))


# acceptance results, filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
