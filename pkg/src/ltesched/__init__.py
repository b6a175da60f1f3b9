"""LTE downlink MAC scheduling simulator and analysis toolkit.

Simulates per-TTI resource-block-group allocation under four scheduling
policies (maximum throughput, blind equal throughput, proportional fair and
fair throughput guarantees), each in time-domain and frequency-domain mode,
on synthetic flat or frequency-selective fading channels; solves the FTGS
weight system numerically and computes throughput, fairness and
inter-scheduling-time statistics.
"""

from .analytics import (
    BetsClosedForm,
    DeltaStats,
    ServiceTimeModelError,
    ServiceTimeMoments,
    ThroughputReport,
    bets_closed_form,
    delta_statistics,
    dll_service_moments,
    exp1,
    jain_index,
    opportunistic_gain,
    simulate_drain_times,
)
from .channel import (
    PEDESTRIAN,
    URBAN,
    VEHICULAR,
    ChannelTrace,
    FadingSpec,
    PowerDelayProfile,
    builtin_pdp,
    generate_flat_trace,
    generate_selective_trace,
    instantaneous_sinr,
    load_pdp,
    mean_cell_sinr,
    rms_delay_spread,
)
from .engine import (
    ChannelConfig,
    Scenario,
    ScenarioError,
    SimReport,
    UeProfile,
    load_scenario,
    make_trace,
    run,
    sinr_span_scenario,
)
from .ftgs import (
    FtgsParameters,
    MetricDistribution,
    QuadratureError,
    SolverError,
    access_probability,
    conditional_mean_rate,
    metric_cdf,
    metric_pdf,
    solve,
)
from .kernel import BACKEND, run_schedule
from .linkadapt import (
    DEFAULT_CQI_TABLE,
    CqiTable,
    SnrGap,
    cqi_from_efficiency,
    rate_from_cqi,
    snr_gap,
    spectral_efficiency,
)
from .schedulers import (
    Allocation,
    RateGrid,
    SchedulerConfig,
    SchedulerState,
    fd_allocate,
    td_select,
    update_state,
)

__version__ = "0.1.0"
