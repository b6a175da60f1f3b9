"""Per-TTI allocation decisions for MTS, BETS, PFS and FTGS.

These functions define the reference semantics for one TTI, in both the
time-domain (all RBGs to one UE, wideband rate) and frequency-domain
(per-RBG assignment, subband rates) modes. Full-trace simulation uses the
loop kernel in :mod:`ltesched.kernel`, which must produce identical results.

Conventions: rates are bits per TTI, the smoothed past throughput ``zeta``
is bits per second, ties always break toward the lowest UE index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KINDS",
    "MODES",
    "SchedulerConfig",
    "SchedulerState",
    "RateGrid",
    "Allocation",
    "td_select",
    "fd_allocate",
    "update_state",
]

KINDS = ("MTS", "BETS", "PFS", "FTGS")
MODES = ("TD", "FD")

# zeta floor used only when forming division-based metrics, so that a state
# driven to exactly zero (beta = 0 and an idle TTI) stays well defined
_ZETA_FLOOR = 1e-300


@dataclass(frozen=True)
class SchedulerConfig:
    kind: str
    mode: str = "TD"
    beta: float = 0.99
    ftgs_alphas: np.ndarray | None = None
    zeta_init: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")
        if self.zeta_init <= 0.0:
            raise ValueError("zeta_init must be > 0")
        if self.kind != "FTGS" and self.ftgs_alphas is not None:
            raise ValueError("ftgs_alphas only applies to FTGS")
        if self.ftgs_alphas is not None:
            # FTGS may also leave this unset and have the weights solved when
            # the scenario runs; the selection ops then reject the bare config
            alphas = np.ascontiguousarray(self.ftgs_alphas, dtype=np.float64)
            if alphas.ndim != 1 or np.any(alphas <= 0.0):
                raise ValueError("ftgs_alphas must be a 1-D vector of positive weights")
            object.__setattr__(self, "ftgs_alphas", alphas)


@dataclass
class SchedulerState:
    """Smoothed past throughput per UE (bits/s) and the current TTI index."""

    zeta: np.ndarray
    tti_index: int = 0

    @classmethod
    def initial(cls, n_ues: int, config: SchedulerConfig) -> "SchedulerState":
        return cls(zeta=np.full(n_ues, float(config.zeta_init)), tti_index=0)


@dataclass(frozen=True)
class RateGrid:
    """Achievable rates for one TTI: wideband per UE, subband per (UE, RBG).

    The wideband rate comes from the wideband CQI; it is not the sum of the
    subband rates.
    """

    wideband: np.ndarray
    subband: np.ndarray

    def __post_init__(self):
        wb = np.ascontiguousarray(self.wideband, dtype=np.float64)
        sb = np.ascontiguousarray(self.subband, dtype=np.float64)
        if wb.ndim != 1 or sb.ndim != 2 or sb.shape[0] != wb.shape[0]:
            raise ValueError("wideband must be (n_ues,), subband (n_ues, n_rbgs)")
        if np.any(wb < 0.0) or np.any(sb < 0.0):
            raise ValueError("rates must be >= 0")
        object.__setattr__(self, "wideband", wb)
        object.__setattr__(self, "subband", sb)

    @property
    def n_ues(self) -> int:
        return self.wideband.shape[0]

    @property
    def n_rbgs(self) -> int:
        return self.subband.shape[1]


@dataclass(frozen=True)
class Allocation:
    """RBG ownership for one TTI and the bits granted to each UE."""

    owner: np.ndarray
    granted_bits: np.ndarray


def _metric_td(kind: str, rates: RateGrid, state: SchedulerState, config: SchedulerConfig):
    if kind == "MTS":
        return rates.wideband
    if kind == "BETS":
        return 1.0 / np.maximum(state.zeta, _ZETA_FLOOR)
    if kind == "PFS":
        return rates.wideband / np.maximum(state.zeta, _ZETA_FLOOR)
    return rates.wideband / config.ftgs_alphas


def td_select(kind: str, rates: RateGrid, state: SchedulerState, config: SchedulerConfig) -> int:
    """UE index winning all RBGs of this TTI under the kind's metric."""
    if kind == "FTGS" and config.ftgs_alphas is None:
        raise ValueError("FTGS requires ftgs_alphas")
    return int(np.argmax(_metric_td(kind, rates, state, config)))


def fd_allocate(
    kind: str,
    rates: RateGrid,
    state: SchedulerState,
    config: SchedulerConfig,
    rbg_count: int,
    tti_s: float = 1e-3,
) -> Allocation:
    """Assign each RBG of one TTI and account the granted bits.

    MTS/PFS/FTGS assign every RBG independently by per-RBG metric argmax,
    with the PFS denominator held fixed within the TTI. BETS assigns RBGs
    one at a time to the UE whose expected smoothed throughput is currently
    smallest, updating that expectation with one wideband-rate share
    (rate / rbg_count) per RBG received.
    """
    if rbg_count < 1:
        raise ValueError("rbg_count must be >= 1")
    n = rates.n_ues
    sb = rates.subband[:, :rbg_count]
    granted = np.zeros(n)

    if kind == "BETS":
        owner = np.empty(rbg_count, dtype=np.int64)
        expected = state.zeta.copy()
        rbg_share = np.zeros(n)
        per_rbg_rate = rates.wideband / float(rbg_count)
        for l in range(rbg_count):
            u = int(np.argmin(expected))
            owner[l] = u
            rbg_share[u] += 1.0
            granted[u] += sb[u, l]
            expected[u] = config.beta * state.zeta[u] + (1.0 - config.beta) * (
                rbg_share[u] * per_rbg_rate[u]
            ) / tti_s
        return Allocation(owner=owner, granted_bits=granted)

    if kind == "MTS":
        metric = sb
    elif kind == "PFS":
        metric = sb / np.maximum(state.zeta, _ZETA_FLOOR)[:, None]
    elif kind == "FTGS":
        if config.ftgs_alphas is None:
            raise ValueError("FTGS requires ftgs_alphas")
        metric = sb / config.ftgs_alphas[:, None]
    else:
        raise ValueError(f"unknown scheduler kind {kind!r}")

    owner = np.argmax(metric, axis=0)
    np.add.at(granted, owner, sb[owner, np.arange(rbg_count)])
    return Allocation(owner=owner, granted_bits=granted)


def update_state(
    state: SchedulerState,
    allocation: Allocation,
    config: SchedulerConfig,
    tti_s: float = 1e-3,
) -> SchedulerState:
    """Exponential smoothing of past throughput with this TTI's granted rate.

    Unscheduled UEs contribute a zero rate and decay by beta.
    """
    rate = allocation.granted_bits / tti_s
    zeta = config.beta * state.zeta + (1.0 - config.beta) * rate
    return SchedulerState(zeta=zeta, tti_index=state.tti_index + 1)
