"""Scenario definition and the per-TTI simulation driver.

A scenario fixes the UE population (average SINRs), the channel (flat or
frequency selective, Rayleigh or Rician), the scheduler and the frame
constants. ``run`` samples the channel, forms subband and wideband CQIs,
builds the rate grids, executes the scheduling loop and aggregates metrics.
Identical scenarios (including the seed) produce identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import analytics, channel, ftgs, kernel, linkadapt
from .schedulers import SchedulerConfig

__all__ = [
    "ScenarioError",
    "UeProfile",
    "ChannelConfig",
    "Scenario",
    "SimReport",
    "run",
    "make_trace",
    "sinr_span_scenario",
    "load_scenario",
    "scenario_from_dict",
]


class ScenarioError(ValueError):
    """Invalid scenario description; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class UeProfile:
    """Static per-UE channel strength."""

    avg_sinr_db: float

    def __post_init__(self):
        if not np.isfinite(self.avg_sinr_db):
            raise ScenarioError("ues.avg_sinr_db", "must be finite")

    @property
    def avg_sinr_linear(self) -> float:
        return float(10.0 ** (self.avg_sinr_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    """Channel selection: flat fading, or a tapped delay line profile."""

    kind: str  # "flat" | "selective"
    fading: channel.FadingSpec
    pdp: channel.PowerDelayProfile | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "selective"):
            raise ScenarioError("channel.type", f"must be flat or selective, got {self.kind!r}")
        if self.kind == "selective" and self.pdp is None:
            raise ScenarioError("channel.pdp", "selective channel needs a power delay profile")


@dataclass(frozen=True)
class Scenario:
    ues: tuple
    channel: ChannelConfig
    scheduler: SchedulerConfig
    duration_s: float
    tti_s: float = 1e-3
    rb_count: int = 25
    rbg_size: int = 2
    bandwidth_hz: float = 5e6
    target_ber: float = 5e-5
    rate_model: str = "quantized"
    seed: int = 0
    warmup_ttis: int = 1000
    wideband_aggregate: str = "mean"
    cqi_table: linkadapt.CqiTable = field(default=linkadapt.DEFAULT_CQI_TABLE)
    name: str = "scenario"

    def __post_init__(self):
        if not self.ues:
            raise ScenarioError("ues", "need at least one UE")
        if self.duration_s <= 0.0:
            raise ScenarioError("duration_s", "must be > 0")
        if self.tti_s <= 0.0:
            raise ScenarioError("tti_s", "must be > 0")
        n = self.duration_s / self.tti_s
        if abs(n - round(n)) > 1e-9:
            raise ScenarioError("duration_s", "must be an integer number of TTIs")
        if self.rb_count < self.rbg_size or self.rbg_size < 1:
            raise ScenarioError("rbg_size", "need rb_count >= rbg_size >= 1")
        if self.rate_model not in ("continuous", "quantized"):
            raise ScenarioError("rate_model", f"unknown rate model {self.rate_model!r}")
        if self.wideband_aggregate not in ("mean", "median"):
            raise ScenarioError("wideband_aggregate", "must be mean or median")
        if not 0.0 < self.target_ber < 0.2:
            raise ScenarioError("target_ber", "must be in (0, 0.2)")
        if self.warmup_ttis < 0 or self.warmup_ttis >= n:
            raise ScenarioError("warmup_ttis", "must be >= 0 and shorter than the run")

    @property
    def n_ttis(self) -> int:
        return int(round(self.duration_s / self.tti_s))

    @property
    def rbg_count(self) -> int:
        # Allocation Type 0: leftover RBs beyond full groups stay unscheduled
        return self.rb_count // self.rbg_size

    @property
    def rb_bandwidth_hz(self) -> float:
        return self.bandwidth_hz / self.rb_count

    @property
    def rbg_bandwidth_hz(self) -> float:
        return self.rb_bandwidth_hz * self.rbg_size

    @property
    def scheduled_bandwidth_hz(self) -> float:
        return self.rbg_bandwidth_hz * self.rbg_count

    def avg_sinrs_db(self) -> np.ndarray:
        return np.array([ue.avg_sinr_db for ue in self.ues])

    def avg_sinrs_linear(self) -> np.ndarray:
        return np.array([ue.avg_sinr_linear for ue in self.ues])

    def snr_gap(self) -> linkadapt.SnrGap:
        return linkadapt.snr_gap(self.target_ber)


@dataclass(frozen=True)
class SimReport:
    """Aggregated simulation outcome.

    Throughput and inter-scheduling statistics exclude the warm-up window.
    The full allocation log (owner map and per-TTI grants) is kept only when
    requested.
    """

    throughput: analytics.ThroughputReport
    delta: tuple
    event_stats: tuple
    zeta_final: np.ndarray
    ftgs_alphas: np.ndarray | None
    warmup_ttis: int
    measured_duration_s: float
    scenario: dict
    owner: np.ndarray | None = None
    granted: np.ndarray | None = None

    def to_dict(self) -> dict:
        d = {
            "scenario": self.scenario,
            "warmup_ttis": self.warmup_ttis,
            "measured_duration_s": self.measured_duration_s,
            "throughput": {
                "per_ue_bps": list(map(float, self.throughput.per_ue)),
                "cell_bps": self.throughput.cell,
                "jain": self.throughput.jain,
            },
            "delta": [
                {
                    "ue": i,
                    "n_events": s.n_events,
                    "p_delta_1": s.p_delta_1,
                    "max_delta_ms": s.max_delta_ms(),
                }
                for i, s in enumerate(self.delta)
            ],
            "event_stats": [
                {
                    "ue": i,
                    "m_delta_s": e[0],
                    "sigma_delta_s": e[1],
                    "m_bits": e[2],
                    "sigma_bits": e[3],
                }
                for i, e in enumerate(self.event_stats)
            ],
        }
        if self.ftgs_alphas is not None:
            d["ftgs_alphas"] = list(map(float, self.ftgs_alphas))
        return d


def _rate_grids(scenario: Scenario, trace: channel.ChannelTrace):
    """Wideband (T, N) and subband (T, N, M) rate grids in bits per TTI."""
    gap = scenario.snr_gap()
    table = scenario.cqi_table
    sinr = trace.gains * scenario.avg_sinrs_linear()[:, None, None]  # (N, T, M)
    if scenario.wideband_aggregate == "mean":
        sinr_wb = sinr.mean(axis=2)
    else:
        sinr_wb = np.median(sinr, axis=2)

    eta_sb = linkadapt.spectral_efficiency(sinr, gap)
    eta_wb = linkadapt.spectral_efficiency(sinr_wb, gap)
    w_sb = scenario.rbg_bandwidth_hz * scenario.tti_s
    w_wb = scenario.scheduled_bandwidth_hz * scenario.tti_s

    if scenario.rate_model == "continuous":
        r_sb = eta_sb * w_sb
        r_wb = eta_wb * w_wb
    else:
        # CQI 0 carries no transport block: zero rate in the simulator
        eff = np.asarray(table.thresholds).copy()
        eff[0] = 0.0
        r_sb = eff[linkadapt.cqi_from_efficiency(eta_sb, table)] * w_sb
        r_wb = eff[linkadapt.cqi_from_efficiency(eta_wb, table)] * w_wb
    # kernel wants (T, N[, M])
    return np.ascontiguousarray(r_wb.T), np.ascontiguousarray(r_sb.transpose(1, 0, 2))


def make_trace(scenario: Scenario) -> channel.ChannelTrace:
    fading = scenario.channel.fading
    if fading.seed != scenario.seed:
        fading = channel.FadingSpec(
            doppler_hz=fading.doppler_hz,
            model=fading.model,
            rice_k_db=fading.rice_k_db,
            oscillator_count=fading.oscillator_count,
            seed=scenario.seed,
        )
    if scenario.channel.kind == "flat":
        return channel.generate_flat_trace(
            fading, len(scenario.ues), scenario.n_ttis, scenario.rbg_count,
            tti_s=scenario.tti_s,
        )
    return channel.generate_selective_trace(
        scenario.channel.pdp, fading, len(scenario.ues), scenario.n_ttis,
        scenario.rbg_count, scenario.rbg_bandwidth_hz, tti_s=scenario.tti_s,
    )


def resolve_ftgs_alphas(scenario: Scenario) -> np.ndarray | None:
    """The FTGS weight vector: taken from the config, or solved on demand."""
    if scenario.scheduler.kind != "FTGS":
        return None
    if scenario.scheduler.ftgs_alphas is not None:
        return scenario.scheduler.ftgs_alphas
    params = ftgs.solve(
        scenario.avg_sinrs_linear(), scenario.snr_gap().gamma, 1.0
    )
    return params.alpha


def run(
    scenario: Scenario,
    trace: channel.ChannelTrace | None = None,
    keep_allocation_log: bool = False,
) -> SimReport:
    """Simulate one scenario and aggregate its metrics.

    ``trace`` may carry a pre-generated channel (it must match the scenario's
    shape); this lets sweeps share one channel realization across schedulers.
    """
    n_ues = len(scenario.ues)
    if trace is None:
        trace = make_trace(scenario)
    if trace.gains.shape != (n_ues, scenario.n_ttis, scenario.rbg_count):
        raise ScenarioError(
            "trace",
            f"shape {trace.gains.shape} does not match scenario "
            f"({n_ues}, {scenario.n_ttis}, {scenario.rbg_count})",
        )

    alphas = resolve_ftgs_alphas(scenario)
    r_wb, r_sb = _rate_grids(scenario, trace)
    owner, granted, zeta = kernel.run_schedule(
        scenario.scheduler.kind,
        scenario.scheduler.mode,
        r_wb,
        r_sb,
        scenario.rbg_count,
        alphas=alphas,
        beta=scenario.scheduler.beta,
        zeta_init=scenario.scheduler.zeta_init,
        tti_s=scenario.tti_s,
    )

    w = scenario.warmup_ttis
    measured_s = (scenario.n_ttis - w) * scenario.tti_s
    per_ue = granted[w:].sum(axis=0) / measured_s
    throughput = analytics.ThroughputReport.from_per_ue(per_ue)

    delta_stats = []
    event_stats = []
    for ue in range(n_ues):
        try:
            delta_stats.append(analytics.delta_statistics(owner[w:], ue, scenario.tti_s))
            d, b = analytics.scheduling_events(owner[w:], granted[w:], ue, scenario.tti_s)
            event_stats.append(
                (float(d.mean()), float(d.std()), float(b.mean()), float(b.std()))
            )
        except ValueError:
            delta_stats.append(None)
            event_stats.append((np.nan, np.nan, np.nan, np.nan))

    return SimReport(
        throughput=throughput,
        delta=tuple(delta_stats),
        event_stats=tuple(event_stats),
        zeta_final=zeta,
        ftgs_alphas=alphas,
        warmup_ttis=w,
        measured_duration_s=measured_s,
        scenario=scenario_to_dict(scenario),
        owner=owner if keep_allocation_log else None,
        granted=granted if keep_allocation_log else None,
    )


def sinr_span_scenario(
    gamma_max_db: float,
    n_ues: int,
    mu_target_db: float | None = None,
    span_db: float | None = None,
) -> np.ndarray:
    """Per-UE average SINRs (dB), equally spaced in linear scale.

    The maximum is fixed at ``gamma_max_db``; the minimum follows either from
    the target mean cell SINR (linear mean) or from an explicit dB span.
    """
    if n_ues < 2:
        raise ValueError("need n_ues >= 2")
    if (mu_target_db is None) == (span_db is None):
        raise ValueError("give exactly one of mu_target_db or span_db")
    g_max = 10.0 ** (gamma_max_db / 10.0)
    if span_db is not None:
        g_min = 10.0 ** ((gamma_max_db - span_db) / 10.0)
    else:
        # linear equal spacing pins the mean to the midpoint
        g_min = 2.0 * 10.0 ** (mu_target_db / 10.0) - g_max
        if g_min <= 0.0:
            raise ValueError(
                "mu_target_db too low for this gamma_max (midpoint would be <= 0)"
            )
        if g_min > g_max:
            raise ValueError("mu_target_db exceeds gamma_max_db")
    grid = np.linspace(g_min, g_max, n_ues)
    return 10.0 * np.log10(grid)


# --- scenario (de)serialization -------------------------------------------

def scenario_to_dict(s: Scenario) -> dict:
    ch: dict = {"type": s.channel.kind, "doppler_hz": s.channel.fading.doppler_hz,
                "model": s.channel.fading.model,
                "oscillator_count": s.channel.fading.oscillator_count}
    if s.channel.fading.rice_k_db is not None:
        ch["rice_k_db"] = list(s.channel.fading.rice_k_db)
    if s.channel.pdp is not None:
        ch["pdp"] = {
            "name": s.channel.pdp.name,
            "delays_ns": [d * 1e9 for d in s.channel.pdp.delays_s],
            "powers_db": list(s.channel.pdp.powers_db),
        }
    sched: dict = {"kind": s.scheduler.kind, "mode": s.scheduler.mode,
                   "beta": s.scheduler.beta, "zeta_init": s.scheduler.zeta_init}
    if s.scheduler.ftgs_alphas is not None:
        sched["ftgs_alphas"] = list(map(float, s.scheduler.ftgs_alphas))
    return {
        "name": s.name,
        "ues": {"avg_sinr_db": [ue.avg_sinr_db for ue in s.ues]},
        "channel": ch,
        "scheduler": sched,
        "duration_s": s.duration_s,
        "tti_s": s.tti_s,
        "rb_count": s.rb_count,
        "rbg_size": s.rbg_size,
        "bandwidth_hz": s.bandwidth_hz,
        "target_ber": s.target_ber,
        "rate_model": s.rate_model,
        "seed": s.seed,
        "warmup_ttis": s.warmup_ttis,
        "wideband_aggregate": s.wideband_aggregate,
    }


_TOP_KEYS = {
    "name", "ues", "channel", "scheduler", "duration_s", "tti_s", "rb_count",
    "rbg_size", "bandwidth_hz", "target_ber", "rate_model", "seed",
    "warmup_ttis", "wideband_aggregate", "cqi_table",
}


def _require(d: dict, key: str, context: str):
    if key not in d:
        raise ScenarioError(f"{context}{key}", "missing required key")
    return d[key]


def _resolve_pdp(value, base_dir: Path | None) -> channel.PowerDelayProfile:
    if isinstance(value, str):
        try:
            return channel.builtin_pdp(value)
        except KeyError:
            path = Path(value)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ScenarioError(
                    "channel.pdp", f"not a built-in profile and no such file: {value!r}"
                ) from None
            return channel.load_pdp(path)
    if isinstance(value, dict):
        delays_ns = _require(value, "delays_ns", "channel.pdp.")
        powers_db = _require(value, "powers_db", "channel.pdp.")
        return channel.PowerDelayProfile(
            tuple(d * 1e-9 for d in delays_ns),
            tuple(powers_db),
            name=value.get("name", "inline"),
        )
    raise ScenarioError("channel.pdp", "must be a name, a file path or an inline table")


def scenario_from_dict(data: dict, base_dir: Path | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("<root>", "scenario must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown key")

    ues_block = _require(data, "ues", "")
    sinrs = ues_block.get("avg_sinr_db") if isinstance(ues_block, dict) else ues_block
    if not isinstance(sinrs, (list, tuple)) or not sinrs:
        raise ScenarioError("ues.avg_sinr_db", "must be a non-empty list of dB values")
    ues = tuple(UeProfile(float(x)) for x in sinrs)

    ch_block = _require(data, "channel", "")
    kind = _require(ch_block, "type", "channel.")
    seed = int(data.get("seed", 0))
    try:
        fading = channel.FadingSpec(
            doppler_hz=float(_require(ch_block, "doppler_hz", "channel.")),
            model=ch_block.get("model", "jakes-rayleigh"),
            rice_k_db=tuple(ch_block["rice_k_db"]) if "rice_k_db" in ch_block else None,
            oscillator_count=int(ch_block.get("oscillator_count", 32)),
            seed=seed,
        )
    except ValueError as exc:
        raise ScenarioError("channel", str(exc)) from None
    pdp = _resolve_pdp(ch_block["pdp"], base_dir) if "pdp" in ch_block else None
    channel_cfg = ChannelConfig(kind=kind, fading=fading, pdp=pdp)

    sc_block = _require(data, "scheduler", "")
    alphas = sc_block.get("ftgs_alphas")
    try:
        scheduler = SchedulerConfig(
            kind=_require(sc_block, "kind", "scheduler."),
            mode=sc_block.get("mode", "TD"),
            beta=float(sc_block.get("beta", 0.99)),
            ftgs_alphas=np.asarray(alphas, dtype=float) if alphas is not None else None,
            zeta_init=float(sc_block.get("zeta_init", 1.0)),
        )
    except ValueError as exc:
        raise ScenarioError("scheduler", str(exc)) from None

    cqi_table = linkadapt.DEFAULT_CQI_TABLE
    if "cqi_table" in data:
        path = Path(data["cqi_table"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ScenarioError("cqi_table", f"no such file: {data['cqi_table']!r}")
        cqi_table = linkadapt.load_cqi_table(path)

    return Scenario(
        ues=ues,
        channel=channel_cfg,
        scheduler=scheduler,
        duration_s=float(_require(data, "duration_s", "")),
        tti_s=float(data.get("tti_s", 1e-3)),
        rb_count=int(data.get("rb_count", 25)),
        rbg_size=int(data.get("rbg_size", 2)),
        bandwidth_hz=float(data.get("bandwidth_hz", 5e6)),
        target_ber=float(data.get("target_ber", 5e-5)),
        rate_model=data.get("rate_model", "quantized"),
        seed=seed,
        warmup_ttis=int(data.get("warmup_ttis", 1000)),
        wideband_aggregate=data.get("wideband_aggregate", "mean"),
        cqi_table=cqi_table,
        name=data.get("name", "scenario"),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError("<file>", f"not valid YAML: {exc}") from None
    return scenario_from_dict(data, base_dir=path.parent)
