import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phomwae.pipeline.data import HEADER  # noqa: E402


def write_transactions(path, n=300, seed=0, fraud_rate=0.05):
    """Synthetic file in the credit-card schema: 28 PCA-like columns driven
    by a 2-D latent circle plus noise, a skewed Amount, and rare fraud rows."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0, 2 * np.pi, n)
    latent = np.c_[np.cos(t), np.sin(t)] * (1 + 0.1 * rng.standard_normal((n, 1)))
    mix = rng.standard_normal((2, 28))
    v = latent @ mix + 0.1 * rng.standard_normal((n, 28))
    amount = rng.lognormal(3, 1, n).round(2)
    cls = (rng.uniform(size=n) < fraud_rate).astype(int)
    v[cls == 1] += 3.0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for i in range(n):
            w.writerow([float(i)] + [repr(float(a)) for a in v[i]] + [repr(float(amount[i])), cls[i]])
    return path


@pytest.fixture
def transactions_csv(tmp_path):
    return write_transactions(tmp_path / "transactions.csv")


@pytest.fixture
def unit_square():
    return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
