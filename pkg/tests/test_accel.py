from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from tplkit import _accel


def test_backend_flag():
    out = subprocess.run(
        [sys.executable, "-c", "from tplkit import _accel; print(_accel.BACKEND)"],
        env=dict(os.environ, TPLKIT_NUMBA="0"), capture_output=True, text=True, check=True,
    ).stdout.strip()
    assert out == "numpy"


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_kernels_agree():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a = (rng.random((n, n)) < 0.5).astype(np.int64)
        for name, fn in _accel.NUMPY_KERNELS.items():
            nb = _accel.NUMBA_KERNELS[name]
            if name == "power_traces":
                args = (a, 6)
            elif name == "closed_path_count":
                args = (a, 4)
            elif name == "refine":
                args = (a, np.zeros(n, dtype=np.int64))
            else:
                args = (a, rng.permutation(n).astype(np.int64))
            assert np.array_equal(np.asarray(fn(*args)), np.asarray(nb(*args))), name


def test_power_bound():
    assert _accel.power_bound_ok(np.ones((2, 2), dtype=np.int64), 8)
    assert not _accel.power_bound_ok(np.full((4, 4), 1000, dtype=np.int64), 8)
