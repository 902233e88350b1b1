"""
Tests for the slice worker pool.
"""

import asyncio
import threading
import time

import pytest

from spectral_pf import worker
from spectral_pf.worker import map_slices, run_parallel


@pytest.mark.asyncio
async def test_run_parallel_preserves_order():
    """Test results are aligned with inputs regardless of completion order."""

    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x

    results = await run_parallel(slow_square, [1, 2, 3, 4], max_workers=4)
    assert results == [1, 4, 9, 16]
    assert not worker._worker_running


@pytest.mark.asyncio
async def test_run_parallel_limits_concurrency():
    """Test no more than max_workers jobs run at once."""
    lock = threading.Lock()
    active = {"now": 0, "peak": 0}

    def job(_):
        with lock:
            active["now"] += 1
            active["peak"] = max(active["peak"], active["now"])
        time.sleep(0.02)
        with lock:
            active["now"] -= 1
        return True

    await run_parallel(job, range(8), max_workers=2)
    assert active["peak"] <= 2


@pytest.mark.asyncio
async def test_run_parallel_rejects_zero_workers():
    """Test max_workers must be positive."""
    with pytest.raises(ValueError, match="positive"):
        await run_parallel(abs, [1], max_workers=0)


@pytest.mark.asyncio
async def test_run_parallel_propagates_errors():
    """Test a failing job raises and the pool is released."""

    def fail(x):
        if x == 2:
            raise ArithmeticError("bad slice")
        return x

    with pytest.raises(ArithmeticError, match="bad slice"):
        await run_parallel(fail, [1, 2, 3])
    assert not worker._worker_running


def test_map_slices_sync():
    """Test the synchronous wrapper."""
    assert map_slices(str, [1, 2, 3], max_workers=2) == ["1", "2", "3"]
    assert worker._completed == 3


def test_map_slices_with_loop():
    """Test reusing an existing event loop."""
    loop = asyncio.new_event_loop()
    try:
        assert map_slices(lambda x: -x, [1, 2], loop=loop) == [-1, -2]
    finally:
        loop.close()
