"""Fading channel generation and dispersion metrics.

Power-gain traces are indexed (ue, tti, rbg) and normalized to unit mean per
stream, so that the instantaneous SINR of a UE is simply ``gain * avg_sinr``.
Temporal correlation follows Jakes' Doppler model, realized as a
sum-of-sinusoids with random per-stream phases; frequency selectivity comes
from a tapped delay line evaluated at the RBG center frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "PowerDelayProfile",
    "FadingSpec",
    "ChannelTrace",
    "PEDESTRIAN",
    "VEHICULAR",
    "URBAN",
    "builtin_pdp",
    "load_pdp",
    "rms_delay_spread",
    "jakes_complex_gains",
    "generate_flat_trace",
    "generate_selective_trace",
    "instantaneous_sinr",
    "mean_cell_sinr",
]


@dataclass(frozen=True)
class PowerDelayProfile:
    """Tapped-delay-line profile: tap delays in seconds, average powers in dB."""

    delays_s: tuple
    powers_db: tuple
    name: str = "custom"

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays_s)
        powers = tuple(float(p) for p in self.powers_db)
        if len(delays) == 0 or len(delays) != len(powers):
            raise ValueError("PDP needs matching, non-empty delay and power lists")
        if delays[0] < 0.0:
            raise ValueError("first tap delay must be >= 0")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError("tap delays must be strictly increasing")
        if not all(np.isfinite(powers)):
            raise ValueError("tap powers must be finite")
        object.__setattr__(self, "delays_s", delays)
        object.__setattr__(self, "powers_db", powers)

    @property
    def n_taps(self) -> int:
        return len(self.delays_s)

    def powers_linear(self) -> np.ndarray:
        """Tap powers in linear scale, normalized to sum to one."""
        p = 10.0 ** (np.asarray(self.powers_db) / 10.0)
        return p / p.sum()


@dataclass(frozen=True)
class FadingSpec:
    """Doppler spread, fading model and seeding for trace generation.

    ``rice_k_db`` lists Rice factors for the leading taps; remaining taps stay
    Rayleigh. The line-of-sight component of a Rician tap has constant
    amplitude and rotates at the Doppler shift of its (random) arrival angle.
    """

    doppler_hz: float
    model: str = "jakes-rayleigh"
    rice_k_db: tuple | None = None
    oscillator_count: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.doppler_hz <= 0.0:
            raise ValueError("doppler_hz must be > 0")
        if self.model not in ("jakes-rayleigh", "rician"):
            raise ValueError(f"unknown fading model {self.model!r}")
        if self.oscillator_count < 8:
            raise ValueError("oscillator_count must be >= 8")
        if self.model == "rician":
            if not self.rice_k_db:
                raise ValueError("rician model requires rice_k_db")
            object.__setattr__(self, "rice_k_db", tuple(float(k) for k in self.rice_k_db))
        elif self.rice_k_db is not None:
            raise ValueError("rice_k_db only applies to the rician model")


@dataclass(frozen=True)
class ChannelTrace:
    """Unit-mean power gains, shape (n_ues, n_ttis, n_rbgs)."""

    gains: np.ndarray
    tti_s: float

    def __post_init__(self):
        if self.gains.ndim != 3:
            raise ValueError("gains must have shape (n_ues, n_ttis, n_rbgs)")
        object.__setattr__(self, "gains", np.ascontiguousarray(self.gains, dtype=np.float64))
        self.gains.flags.writeable = False

    @property
    def n_ues(self) -> int:
        return self.gains.shape[0]

    @property
    def n_ttis(self) -> int:
        return self.gains.shape[1]

    @property
    def rbg_count(self) -> int:
        return self.gains.shape[2]


PEDESTRIAN = PowerDelayProfile(
    delays_s=tuple(d * 1e-9 for d in (0, 30, 70, 90, 120, 190, 410)),
    powers_db=(0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8),
    name="pedestrian",
)

VEHICULAR = PowerDelayProfile(
    delays_s=tuple(d * 1e-9 for d in (0, 30, 150, 310, 370, 710, 1090, 1730, 2510)),
    powers_db=(0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9),
    name="vehicular",
)

URBAN = PowerDelayProfile(
    delays_s=tuple(d * 1e-9 for d in (0, 50, 120, 200, 230, 500, 1600, 2300, 5000)),
    powers_db=(-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0),
    name="urban",
)

_BUILTIN_PDPS = {p.name: p for p in (PEDESTRIAN, VEHICULAR, URBAN)}


def builtin_pdp(name: str) -> PowerDelayProfile:
    try:
        return _BUILTIN_PDPS[name]
    except KeyError:
        raise KeyError(
            f"unknown PDP {name!r}; built-ins: {sorted(_BUILTIN_PDPS)}"
        ) from None


def load_pdp(path, name: str | None = None) -> PowerDelayProfile:
    """Load a PDP from a plain-text table with one ``delay_ns power_db`` pair per line.

    Blank lines and ``#`` comments are ignored.
    """
    path = Path(path)
    delays, powers = [], []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'delay_ns power_db', got {raw!r}")
        delays.append(float(parts[0]) * 1e-9)
        powers.append(float(parts[1]))
    return PowerDelayProfile(tuple(delays), tuple(powers), name=name or path.stem)


def rms_delay_spread(pdp: PowerDelayProfile) -> float:
    """Root-mean-square delay spread in seconds.

    Moments are power-weighted in linear scale; a single-tap profile has zero
    spread. Invariant to a uniform dB offset on all tap powers.
    """
    w = pdp.powers_linear()
    tau = np.asarray(pdp.delays_s)
    m1 = float(np.dot(w, tau))
    m2 = float(np.dot(w, tau * tau))
    return float(np.sqrt(max(m2 - m1 * m1, 0.0)))


def _stream_rng(seed: int, *key: int) -> np.random.Generator:
    # one independent, reproducible substream per (seed, ue, tap)
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def jakes_complex_gains(
    spec: FadingSpec,
    n_samples: int,
    sample_time_s: float,
    stream_key: tuple = (0,),
    rice_k_db: float | None = None,
) -> np.ndarray:
    """One complex Rayleigh (or Rician) fading process with E[|g|^2] = 1.

    Sum-of-sinusoids construction: oscillator angles span a quarter circle
    with a random rotation, and the in-phase/quadrature components carry
    independent random phases, which makes distinct streams statistically
    independent and the autocorrelation approximate J0(2 pi f_d tau).
    """
    rng = _stream_rng(spec.seed, *stream_key)
    m = spec.oscillator_count
    theta = rng.uniform(-np.pi, np.pi)
    phi = rng.uniform(-np.pi, np.pi, size=m)
    psi = rng.uniform(-np.pi, np.pi, size=m)
    angles = (2.0 * np.pi * np.arange(1, m + 1) - np.pi + theta) / (4.0 * m)

    t = np.arange(n_samples) * sample_time_s
    w_i = 2.0 * np.pi * spec.doppler_hz * np.cos(angles)
    w_q = 2.0 * np.pi * spec.doppler_hz * np.sin(angles)
    g_i = np.cos(w_i[:, None] * t[None, :] + phi[:, None]).sum(axis=0)
    g_q = np.cos(w_q[:, None] * t[None, :] + psi[:, None]).sum(axis=0)
    g = (g_i + 1j * g_q) / np.sqrt(m)

    if rice_k_db is not None:
        k = 10.0 ** (rice_k_db / 10.0)
        aoa = rng.uniform(-np.pi, np.pi)
        phase0 = rng.uniform(-np.pi, np.pi)
        los = np.exp(1j * (2.0 * np.pi * spec.doppler_hz * np.cos(aoa) * t + phase0))
        g = np.sqrt(k / (k + 1.0)) * los + g / np.sqrt(k + 1.0)
    return g


def generate_flat_trace(
    spec: FadingSpec, n_ues: int, n_ttis: int, rbg_count: int, tti_s: float = 1e-3
) -> ChannelTrace:
    """Flat-fading trace: every RBG of a (ue, tti) carries the same gain.

    Equivalent to a single-tap selective trace with the same seed. Per-UE
    processes are fully independent.
    """
    single_tap = PowerDelayProfile((0.0,), (0.0,), name="flat")
    return generate_selective_trace(
        single_tap, spec, n_ues, n_ttis, rbg_count, 1.0, tti_s=tti_s
    )


def generate_selective_trace(
    pdp: PowerDelayProfile,
    spec: FadingSpec,
    n_ues: int,
    n_ttis: int,
    rbg_count: int,
    rbg_bandwidth_hz: float,
    tti_s: float = 1e-3,
) -> ChannelTrace:
    """Frequency-selective trace from a tapped delay line.

    Each tap evolves as an independent Jakes process scaled by its normalized
    average power; the per-RBG gain is |H(f_l)|^2 at the RBG center frequency
    f_l = (l + 1/2) * rbg_bandwidth. Normalizing tap powers to unit sum makes
    the mean per-RBG gain 1 for every frequency.
    """
    if n_ttis < 1 or rbg_count < 1:
        raise ValueError("n_ttis and rbg_count must be >= 1")
    if spec.model == "rician" and len(spec.rice_k_db) > pdp.n_taps:
        raise ValueError("more Rice factors than PDP taps")

    weights = np.sqrt(pdp.powers_linear())
    centers = (np.arange(rbg_count) + 0.5) * rbg_bandwidth_hz
    steering = np.exp(-2j * np.pi * np.outer(pdp.delays_s, centers))  # (taps, rbgs)

    rice = spec.rice_k_db if spec.model == "rician" else ()
    gains = np.empty((n_ues, n_ttis, rbg_count))
    for ue in range(n_ues):
        taps = np.empty((pdp.n_taps, n_ttis), dtype=complex)
        for j in range(pdp.n_taps):
            k_db = rice[j] if j < len(rice) else None
            taps[j] = jakes_complex_gains(
                spec, n_ttis, tti_s, stream_key=(ue, j), rice_k_db=k_db
            )
        h = np.einsum("jt,jl->tl", taps * weights[:, None], steering)
        gains[ue] = np.abs(h) ** 2
    return ChannelTrace(gains=gains, tti_s=tti_s)


def instantaneous_sinr(avg_sinr, gain):
    """Instantaneous linear SINR: unit-mean power gain times the average SINR."""
    avg_sinr = np.asarray(avg_sinr, dtype=float)
    gain = np.asarray(gain, dtype=float)
    if np.any(avg_sinr <= 0.0):
        raise ValueError("avg_sinr must be > 0")
    if np.any(gain < 0.0):
        raise ValueError("gain must be >= 0")
    out = gain * avg_sinr
    return float(out) if out.ndim == 0 else out


def mean_cell_sinr(avg_sinrs_db) -> float:
    """Mean cell SINR in dB: the linear mean of per-UE linear SINRs."""
    vals = np.asarray(avg_sinrs_db, dtype=float)
    if vals.size == 0:
        raise ValueError("need at least one SINR")
    return float(10.0 * np.log10(np.mean(10.0 ** (vals / 10.0))))
