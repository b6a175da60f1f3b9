"""Scheduling-loop backend selection.

The per-TTI loop is the simulator's hot path (tens of thousands of TTIs per
run). A compiled Cython implementation is used when the extension built;
otherwise a pure-Python/numpy twin with identical semantics takes over. Set
``LTESCHED_PURE_PYTHON=1`` to force the fallback. Both backends produce
bit-identical results (see tests/test_kernel.py and benchmarks/).
"""

from __future__ import annotations

import os

import numpy as np

from . import _loop_py

__all__ = ["BACKEND", "run_schedule", "available_backends"]

_KIND_CODE = {"MTS": 0, "BETS": 1, "PFS": 2, "FTGS": 3}

if os.environ.get("LTESCHED_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _loop_py
    BACKEND = "python"
else:
    try:
        from . import _loop_cy as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _loop_py
        BACKEND = "python"


def available_backends() -> dict:
    """Name -> module for every importable backend (for equivalence tests)."""
    backends = {"python": _loop_py}
    try:
        from . import _loop_cy

        backends["compiled"] = _loop_cy
    except ImportError:
        pass
    return backends


def run_schedule(
    kind: str,
    mode: str,
    r_wb: np.ndarray,
    r_sb: np.ndarray | None,
    rbg_count: int,
    alphas: np.ndarray | None = None,
    beta: float = 0.99,
    zeta_init: float = 1.0,
    tti_s: float = 1e-3,
    backend=None,
):
    """Schedule a whole rate trace.

    Parameters
    ----------
    r_wb : (n_ttis, n_ues) wideband rates, bits per TTI.
    r_sb : (n_ttis, n_ues, n_rbgs) subband rates, bits per TTI; required for
        FD mode, ignored for TD.

    Returns
    -------
    owner : (n_ttis, rbg_count) int32, owning UE per RBG per TTI.
    granted : (n_ttis, n_ues) float64, bits granted per UE per TTI.
    zeta : (n_ues,) float64, final smoothed throughput in bits/s.
    """
    if kind not in _KIND_CODE:
        raise ValueError(f"unknown scheduler kind {kind!r}")
    if mode not in ("TD", "FD"):
        raise ValueError(f"unknown mode {mode!r}")
    if rbg_count < 1:
        raise ValueError("rbg_count must be >= 1")
    r_wb = np.ascontiguousarray(r_wb, dtype=np.float64)
    if r_wb.ndim != 2:
        raise ValueError("r_wb must have shape (n_ttis, n_ues)")
    if r_sb is not None:
        r_sb = np.ascontiguousarray(r_sb, dtype=np.float64)
        if r_sb.shape[:2] != r_wb.shape or r_sb.shape[2] < rbg_count:
            raise ValueError(
                "r_sb must have shape (n_ttis, n_ues, >= rbg_count) matching r_wb"
            )
    if alphas is not None:
        alphas = np.ascontiguousarray(alphas, dtype=np.float64)
        if alphas.shape != (r_wb.shape[1],):
            raise ValueError("alphas must have one weight per UE")
    if kind == "FTGS" and alphas is None:
        raise ValueError("FTGS requires alphas")
    impl = _impl if backend is None else backend
    return impl.run_schedule_arrays(
        _KIND_CODE[kind],
        mode == "FD",
        r_wb,
        r_sb,
        alphas,
        float(beta),
        float(zeta_init),
        float(tti_s),
        int(rbg_count),
    )
