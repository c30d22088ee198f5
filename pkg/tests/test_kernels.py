"""Backend parity: the compiled kernels and the pure-Python fallback must
produce bit-identical outputs for identical inputs."""
import os
import subprocess
import sys

import numpy as np
import pytest

from riskbandit import kernels
from riskbandit import _kernels_py

try:
    from riskbandit import _speedups
except ImportError:  # pragma: no cover - build without the extension
    _speedups = None

needs_compiled = pytest.mark.skipif(_speedups is None,
                                    reason="compiled extension not built")


def test_backend_name_is_known():
    assert kernels.backend() in ("compiled", "python")


@needs_compiled
def test_compiled_backend_active_by_default():
    if os.environ.get("RISKBANDIT_PURE_PYTHON"):
        pytest.skip("fallback forced via environment")
    assert kernels.backend() == "compiled"


def test_env_var_forces_python_backend():
    env = dict(os.environ, RISKBANDIT_PURE_PYTHON="1")
    code = "import riskbandit.kernels as k; print(k.backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def _random_pool(rng):
    pool = int(rng.integers(1, 60))
    recoms = rng.integers(0, 12, size=pool).astype(np.float64)
    clicks = np.minimum(recoms, rng.integers(0, 12, size=pool)).astype(np.float64)
    return clicks, recoms


@needs_compiled
def test_select_slate_backends_bit_identical():
    rng = np.random.default_rng(99)
    for round_no in range(300):
        clicks, recoms = _random_pool(rng)
        pool = clicks.shape[0]
        slots = int(rng.integers(1, pool + 1))
        eps = float(rng.choice([0.0, 1.0, rng.random()]))
        use_bonus = bool(rng.random() < 0.5)
        log_t = float(np.log(rng.integers(1, 10000)))
        qs = rng.random(slots)
        us = rng.random(slots)
        out_c = np.empty(slots, dtype=np.int64)
        out_py = np.empty(slots, dtype=np.int64)
        explored_c = _speedups.select_slate(clicks, recoms, log_t, use_bonus,
                                            eps, qs, us, out_c)
        explored_py = _kernels_py.select_slate(clicks, recoms, log_t, use_bonus,
                                               eps, qs, us, out_py)
        assert explored_c == explored_py, f"round {round_no}"
        assert (out_c == out_py).all(), f"round {round_no}"


@needs_compiled
def test_select_slate_all_untried_ties():
    # every index scores +inf; both backends must break ties the same way
    clicks = np.zeros(8)
    recoms = np.zeros(8)
    qs = np.full(4, 0.99)
    us = np.zeros(4)
    out_c = np.empty(4, dtype=np.int64)
    out_py = np.empty(4, dtype=np.int64)
    ec = _speedups.select_slate(clicks, recoms, np.log(50.0), True, 0.5, qs, us, out_c)
    ep = _kernels_py.select_slate(clicks, recoms, np.log(50.0), True, 0.5, qs, us, out_py)
    assert ec == ep == 0
    assert list(out_c) == list(out_py) == [0, 1, 2, 3]


def test_select_slate_explore_quantile_positions():
    # eps 1 sends every slot through the exploration branch; us picks the
    # j-th free index with j = floor(u * remaining)
    clicks = np.zeros(3)
    recoms = np.ones(3)
    qs = np.zeros(3)
    us = np.array([0.99, 0.5, 0.0])
    out = np.empty(3, dtype=np.int64)
    explored = kernels.select_slate(clicks, recoms, 0.0, False, 1.0, qs, us, out)
    assert explored == 3
    assert list(out) == [2, 1, 0]


@needs_compiled
def test_scan_best_case_backends_bit_identical():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n_nodes = int(rng.integers(2, 20))
        n_cases = int(rng.integers(1, 50))
        rows = [rng.random(n_nodes) for _ in range(3)]
        idx = [rng.integers(0, n_nodes, size=n_cases).astype(np.int64)
               for _ in range(3)]
        got_c = _speedups.scan_best_case(rows[0], rows[1], rows[2],
                                         idx[0], idx[1], idx[2])
        got_py = _kernels_py.scan_best_case(rows[0], rows[1], rows[2],
                                            idx[0], idx[1], idx[2])
        assert got_c == got_py


def test_scan_best_case_tie_takes_first():
    row = np.array([0.5, 0.5])
    idx = np.array([0, 1], dtype=np.int64)
    best_i, best = kernels.scan_best_case(row, row, row, idx, idx, idx)
    assert best_i == 0
    assert best == 0.5
