"""Pure-Python scheduling loop, the fallback backend for :mod:`ltesched.kernel`.

Implements exactly the same per-TTI semantics as the compiled loop
(`_loop_cy`): identical operation ordering, tie-breaking toward the lowest UE
index, and the same floating-point expression shapes, so both backends
produce bit-identical owner maps, grants and final state.

State-free schedulers (MTS, FTGS) are fully vectorized; state-coupled ones
(PFS, BETS) fall back to a per-TTI loop.
"""

from __future__ import annotations

import numpy as np

KIND_MTS, KIND_BETS, KIND_PFS, KIND_FTGS = 0, 1, 2, 3

_ZETA_FLOOR = 1e-300


def run_schedule_arrays(
    kind: int,
    fd: bool,
    r_wb: np.ndarray,
    r_sb: np.ndarray | None,
    alphas: np.ndarray | None,
    beta: float,
    zeta_init: float,
    tti_s: float,
    rbg_count: int,
):
    """Run the full scheduling loop over a rate trace.

    Parameters
    ----------
    r_wb : (n_ttis, n_ues) wideband rates, bits per TTI.
    r_sb : (n_ttis, n_ues, n_rbgs) subband rates, bits per TTI (FD only).

    Returns
    -------
    owner : (n_ttis, rbg_count) int32 UE index per RBG.
    granted : (n_ttis, n_ues) bits granted per UE per TTI.
    zeta : (n_ues,) final smoothed throughput, bits/s.
    """
    n_ttis, n_ues = r_wb.shape
    om_beta = 1.0 - beta
    zeta = np.full(n_ues, float(zeta_init))

    if not fd:
        owner_1d, granted = _td(kind, r_wb, alphas, beta, om_beta, zeta, tti_s)
        owner = np.repeat(owner_1d[:, None], rbg_count, axis=1).astype(np.int32)
        return owner, granted, zeta
    if r_sb is None:
        raise ValueError("FD mode needs subband rates")
    owner, granted = _fd(
        kind, r_wb, r_sb[:, :, :rbg_count], alphas, beta, om_beta, zeta, tti_s
    )
    return owner.astype(np.int32), granted, zeta


def _zeta_step(zeta, granted_row, beta, om_beta, tti_s):
    return beta * zeta + om_beta * (granted_row / tti_s)


def _td(kind, r_wb, alphas, beta, om_beta, zeta, tti_s):
    n_ttis, n_ues = r_wb.shape
    granted = np.zeros((n_ttis, n_ues))

    if kind in (KIND_MTS, KIND_FTGS):
        metric = r_wb if kind == KIND_MTS else r_wb / alphas[None, :]
        owner = np.argmax(metric, axis=1)
        rows = np.arange(n_ttis)
        granted[rows, owner] = r_wb[rows, owner]
        for k in range(n_ttis):
            zeta[:] = _zeta_step(zeta, granted[k], beta, om_beta, tti_s)
        return owner, granted

    owner = np.empty(n_ttis, dtype=np.int64)
    for k in range(n_ttis):
        if kind == KIND_BETS:
            i = int(np.argmin(zeta))
        else:  # PFS
            i = int(np.argmax(r_wb[k] / np.maximum(zeta, _ZETA_FLOOR)))
        owner[k] = i
        granted[k, i] = r_wb[k, i]
        zeta[:] = _zeta_step(zeta, granted[k], beta, om_beta, tti_s)
    return owner, granted


def _fd(kind, r_wb, r_sb, alphas, beta, om_beta, zeta, tti_s):
    n_ttis, n_ues, m = r_sb.shape
    granted = np.zeros((n_ttis, n_ues))
    cols = np.arange(m)

    if kind in (KIND_MTS, KIND_FTGS):
        metric = r_sb if kind == KIND_MTS else r_sb / alphas[None, :, None]
        owner = np.argmax(metric, axis=1)
        picked = np.take_along_axis(r_sb, owner[:, None, :], axis=1)[:, 0, :]
        flat = (np.arange(n_ttis)[:, None] * n_ues + owner).ravel()
        granted = np.bincount(
            flat, weights=picked.ravel(), minlength=n_ttis * n_ues
        ).reshape(n_ttis, n_ues)
        for k in range(n_ttis):
            zeta[:] = _zeta_step(zeta, granted[k], beta, om_beta, tti_s)
        return owner, granted

    owner = np.empty((n_ttis, m), dtype=np.int64)
    if kind == KIND_PFS:
        for k in range(n_ttis):
            metric = r_sb[k] / np.maximum(zeta, _ZETA_FLOOR)[:, None]
            row = np.argmax(metric, axis=0)
            owner[k] = row
            granted[k] = np.bincount(row, weights=r_sb[k][row, cols], minlength=n_ues)
            zeta[:] = _zeta_step(zeta, granted[k], beta, om_beta, tti_s)
        return owner, granted

    # BETS: one RBG at a time to the UE with the smallest expected throughput,
    # the expectation fed by wideband-rate shares (rate / rbg_count per RBG)
    m_f = float(m)
    for k in range(n_ttis):
        expected = zeta.copy()
        share = np.zeros(n_ues)
        for l in range(m):
            u = int(np.argmin(expected))
            owner[k, l] = u
            share[u] += 1.0
            granted[k, u] += r_sb[k, u, l]
            per_rbg = r_wb[k, u] / m_f
            expected[u] = beta * zeta[u] + (om_beta * (share[u] * per_rbg)) / tti_s
        zeta[:] = _zeta_step(zeta, granted[k], beta, om_beta, tti_s)
    return owner, granted
