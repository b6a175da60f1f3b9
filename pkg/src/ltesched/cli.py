"""Command-line interface.

Subcommands:
  solve-ftgs    solve the fair-throughput weight system for a SINR list
  run           simulate a scenario file and write report JSON + metric CSVs
  sweep         opportunistic-gain sweep over mean cell SINR or UE count
  channel-info  print a power delay profile and its rms delay spread

Exit codes: 0 success, 2 configuration/schema errors, 3 numerical failures.
Output files use 6 significant digits in CSVs; JSON keeps full precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analytics, channel, engine, ftgs, linkadapt
from .schedulers import SchedulerConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _out_dir(arg: str | None) -> Path:
    d = Path(arg or os.environ.get("LTESCHED_OUT_DIR", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _parse_sinrs(spec: str) -> np.ndarray:
    path = Path(spec)
    if path.exists():
        text = path.read_text()
        items = [t for raw in text.splitlines() for t in raw.replace(",", " ").split()
                 if not t.startswith("#")]
    else:
        items = spec.replace(",", " ").split()
    if not items:
        raise ValueError("empty SINR list")
    return np.array([float(t) for t in items])


def cmd_solve_ftgs(args) -> int:
    sinrs_db = _parse_sinrs(args.sinrs_db)
    gap = linkadapt.snr_gap(args.ber)
    params = ftgs.solve(10.0 ** (sinrs_db / 10.0), gap.gamma, args.bandwidth)
    lines = ["i,gamma_bar_db,alpha,p,rbar_over_w"]
    for i in range(params.n_ues):
        lines.append(
            ",".join(
                [
                    str(i + 1),
                    _fmt(sinrs_db[i]),
                    _fmt(params.alpha[i]),
                    _fmt(params.p[i]),
                    _fmt(params.rbar[i] / params.bandwidth),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"sum(p) = {params.p.sum():.6f}", file=sys.stderr)
    return EXIT_OK


def _write_report(report: engine.SimReport, out_dir: Path, log_allocations: bool):
    (out_dir / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")

    rows = ["ue,throughput_bps"]
    rows += [
        f"{i},{_fmt(x)}" for i, x in enumerate(report.throughput.per_ue)
    ]
    (out_dir / "throughput.csv").write_text("\n".join(rows) + "\n")

    for i, stats in enumerate(report.delta):
        if stats is None:
            continue
        rows = ["delta_ms,cumulative_probability"]
        rows += [
            f"{_fmt(v)},{_fmt(p)}"
            for v, p in zip(stats.ecdf_values_ms, stats.ecdf_probs)
        ]
        (out_dir / f"delta_ecdf_ue{i}.csv").write_text("\n".join(rows) + "\n")

    if log_allocations and report.owner is not None:
        m = report.owner.shape[1]
        with open(out_dir / "allocations.csv", "w") as fh:
            fh.write("tti,rbg,ue,bits\n")
            for k in range(report.owner.shape[0]):
                row = report.owner[k]
                grants = report.granted[k]
                counts = np.bincount(row, minlength=len(grants))
                for l in range(m):
                    ue = int(row[l])
                    # spread the UE's grant evenly over its RBGs of this TTI
                    bits = grants[ue] / counts[ue]
                    fh.write(f"{k},{l},{ue},{_fmt(bits)}\n")


def cmd_run(args) -> int:
    scenario = engine.load_scenario(args.scenario)
    report = engine.run(scenario, keep_allocation_log=args.log_allocations)
    out = _out_dir(args.out_dir)
    _write_report(report, out, args.log_allocations)
    print(
        f"{scenario.name}: cell {report.throughput.cell / 1e6:.3f} Mb/s, "
        f"jain {report.throughput.jain:.4f} -> {out}"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = engine.load_scenario(args.scenario_base)
    values = [float(v) for v in args.values.replace(",", " ").split()]
    if not values:
        raise ValueError("empty sweep value list")
    gamma_max_db = float(base.avg_sinrs_db().max())
    out = _out_dir(args.out_dir)

    rows = [f"{args.vary},phi,eta_ftgs,eta_bets"]
    results = []
    for v in values:
        if args.vary == "mu_db":
            sinrs_db = engine.sinr_span_scenario(gamma_max_db, len(base.ues), mu_target_db=v)
        else:
            mu_db = channel.mean_cell_sinr(base.avg_sinrs_db())
            sinrs_db = engine.sinr_span_scenario(gamma_max_db, int(v), mu_target_db=mu_db)
        ues = tuple(engine.UeProfile(float(x)) for x in sinrs_db)
        gap = base.snr_gap()
        params = ftgs.solve(10.0 ** (sinrs_db / 10.0), gap.gamma, 1.0)
        scenario = engine.Scenario(
            ues=ues,
            channel=base.channel,
            scheduler=SchedulerConfig(
                kind="FTGS", mode=base.scheduler.mode, beta=base.scheduler.beta,
                ftgs_alphas=params.alpha, zeta_init=base.scheduler.zeta_init,
            ),
            duration_s=base.duration_s,
            tti_s=base.tti_s,
            rb_count=base.rb_count,
            rbg_size=base.rbg_size,
            bandwidth_hz=base.bandwidth_hz,
            target_ber=base.target_ber,
            rate_model=base.rate_model,
            seed=base.seed,
            warmup_ttis=base.warmup_ttis,
            wideband_aggregate=base.wideband_aggregate,
            name=f"{base.name}-{args.vary}-{v:g}",
        )
        report = engine.run(scenario)
        eta_ftgs = report.throughput.cell / scenario.scheduled_bandwidth_hz
        eta_bets = analytics.bets_closed_form(
            10.0 ** (sinrs_db / 10.0), gap.gamma, scenario.scheduled_bandwidth_hz
        ).efficiency
        phi = analytics.opportunistic_gain(eta_ftgs, eta_bets)
        rows.append(f"{_fmt(v)},{_fmt(phi)},{_fmt(eta_ftgs)},{_fmt(eta_bets)}")
        results.append((v, phi))
    (out / f"sweep_{args.vary}.csv").write_text("\n".join(rows) + "\n")
    for v, phi in results:
        print(f"{args.vary}={v:g}: phi={phi:.4f}")
    return EXIT_OK


def cmd_channel_info(args) -> int:
    try:
        pdp = channel.builtin_pdp(args.pdp)
    except KeyError:
        if not Path(args.pdp).exists():
            raise ValueError(f"not a built-in profile and no such file: {args.pdp!r}")
        pdp = channel.load_pdp(args.pdp)
    print(f"profile: {pdp.name}")
    print("delay_ns,power_db")
    for d, p in zip(pdp.delays_s, pdp.powers_db):
        print(f"{_fmt(d * 1e9)},{_fmt(p)}")
    print(f"rms_delay_spread_ns: {_fmt(channel.rms_delay_spread(pdp) * 1e9)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltesched",
        description="LTE downlink MAC scheduling simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-ftgs", help="solve the FTGS weight system")
    p.add_argument("--sinrs-db", required=True,
                   help="comma/space separated dB values, or a file with one per line")
    p.add_argument("--ber", type=float, default=5e-5, help="target bit error rate")
    p.add_argument("--bandwidth", type=float, default=1.0,
                   help="bandwidth W in Hz (scales rbar only)")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.set_defaults(func=cmd_solve_ftgs)

    p = sub.add_parser("run", help="simulate a scenario file")
    p.add_argument("--scenario", required=True, help="YAML scenario file")
    p.add_argument("--out-dir", help="output directory (default $LTESCHED_OUT_DIR or .)")
    p.add_argument("--log-allocations", action="store_true",
                   help="also write the full tti,rbg,ue,bits log")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="FTGS-vs-baseline opportunistic gain sweep")
    p.add_argument("--vary", choices=("mu_db", "n_ues"), required=True)
    p.add_argument("--values", required=True, help="comma/space separated sweep points")
    p.add_argument("--scenario-base", required=True, help="YAML scenario template")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("channel-info", help="print a PDP and its delay spread")
    p.add_argument("--pdp", required=True, help="built-in name or file path")
    p.set_defaults(func=cmd_channel_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ftgs.SolverError, ftgs.QuadratureError, analytics.ServiceTimeModelError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (engine.ScenarioError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
