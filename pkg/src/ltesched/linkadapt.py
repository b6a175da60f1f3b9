"""SINR to spectral efficiency, CQI and rate mapping.

The SNR-gap model degrades Shannon capacity to account for practical
modulation at a target bit error rate; the CQI table quantizes spectral
efficiency into 16 reporting levels. All functions accept scalars or numpy
arrays and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SnrGap",
    "CqiTable",
    "DEFAULT_CQI_TABLE",
    "snr_gap",
    "spectral_efficiency",
    "cqi_from_efficiency",
    "rate_from_cqi",
    "load_cqi_table",
]


@dataclass(frozen=True)
class SnrGap:
    """Linear capacity-gap factor and the BER it was derived from."""

    gamma: float
    target_ber: float

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be > 0")
        if not 0.0 < self.target_ber < 0.5:
            raise ValueError("target_ber must be in (0, 0.5)")


@dataclass(frozen=True)
class CqiTable:
    """Per-CQI spectral-efficiency boundaries, bit/s/Hz, indexed by CQI 0..15.

    Entries 0..14 are the strictly increasing upper boundaries of each CQI
    interval; entry 15 is the efficiency credited to the open-ended top index
    (by default equal to the last boundary).
    """

    thresholds: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.thresholds)
        if len(t) != 16:
            raise ValueError("CqiTable needs exactly 16 entries")
        if any(b <= a for a, b in zip(t[:14], t[1:15])):
            raise ValueError("entries 0..14 must be strictly increasing")
        if t[15] < t[14]:
            raise ValueError("entry 15 must not fall below entry 14")
        if t[0] <= 0.0:
            raise ValueError("entries must be positive")
        object.__setattr__(self, "thresholds", t)

    def boundaries(self) -> np.ndarray:
        """The 15 bucket boundaries used for quantization (CQI 0..14)."""
        return np.asarray(self.thresholds[:15])


DEFAULT_CQI_TABLE = CqiTable(
    thresholds=(
        0.15, 0.23, 0.38, 0.60, 0.88, 1.18, 1.48, 1.91,
        2.41, 2.73, 3.32, 3.90, 4.52, 5.12, 5.55, 5.55,
    )
)


def load_cqi_table(path) -> CqiTable:
    """Read a 16-entry CQI table, one efficiency per line (# comments allowed)."""
    values = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            values.append(float(line))
    return CqiTable(tuple(values))


def snr_gap(target_ber: float) -> SnrGap:
    """SNR gap from the target BER: -ln(5 BER) / 1.5.

    BERs of 0.2 and above are rejected (the gap degenerates to zero there).
    """
    if not 0.0 < target_ber < 0.2:
        raise ValueError("target_ber must be in (0, 0.2)")
    return SnrGap(gamma=-np.log(5.0 * target_ber) / 1.5, target_ber=target_ber)


def spectral_efficiency(sinr, gap: SnrGap):
    """Gap-adjusted spectral efficiency log2(1 + sinr/gamma) in bit/s/Hz."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0.0):
        raise ValueError("sinr must be >= 0")
    out = np.log2(1.0 + sinr / gap.gamma)
    return float(out) if out.ndim == 0 else out


def cqi_from_efficiency(eta, table: CqiTable = DEFAULT_CQI_TABLE):
    """Quantize spectral efficiency to CQI 0..15.

    CQI q covers the interval (boundary(q-1), boundary(q)]; efficiencies at or
    below the first boundary map to 0, above the last to 15. Monotone
    non-decreasing in eta.
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0.0):
        raise ValueError("eta must be >= 0")
    cqi = np.searchsorted(table.boundaries(), eta, side="left")
    return int(cqi) if cqi.ndim == 0 else cqi.astype(np.int64)


def rate_from_cqi(cqi, bandwidth_hz: float, tti_s: float, table: CqiTable = DEFAULT_CQI_TABLE):
    """Bits deliverable in one TTI at the CQI's boundary efficiency."""
    cqi = np.asarray(cqi)
    if np.any((cqi < 0) | (cqi > 15)):
        raise ValueError("cqi must be in 0..15")
    eff = np.asarray(table.thresholds)[cqi]
    out = eff * bandwidth_hz * tti_s
    return float(out) if out.ndim == 0 else out
