"""
Command line entry point.

    kgz soliton   CONFIG   profile CSV + derived quantities
    kgz evolve    CONFIG   conserved-quantity time series + final snapshot
    kgz spectrum  CONFIG   lowest eigenvalues of L1/L2 (+ coercivity sampling)
    kgz modulate  CONFIG   modulation fit (optionally tracked along a run)
    kgz construct CONFIG   backward multi-soliton construction

Data goes to files under the output directory (or stdout with --stdout);
status lines go to stderr. Exit codes: 0 ok, 2 bad input, 3 numerical failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

from ..analysis import assemble_L1, assemble_L2, coercivity_report, eigs_lowest
from ..construction import ConstructionConfig, run_construction
from ..evolution import Scheme, evolve
from ..exceptions import (
    ConfigurationError,
    ConvergenceError,
    EvolutionAborted,
    GridError,
    IntegrationBlowupError,
    ParameterError,
    SnapshotError,
)
from ..modulation import exact_parameters, fit_modulation, track_modulation
from ..observables import conserved_snapshot, relative_drift
from ..solitons import FieldState, multisoliton_state, soliton_table, stationary_residual
from .config import ModulationSection, RunConfig, SpectrumSection, load_config
from .reports import (
    CONSERVED_COLUMNS,
    CONSTRUCTION_COLUMNS,
    MODULATION_COLUMNS,
    SPECTRUM_COLUMNS,
    SUMMARY_COLUMNS,
    frame,
    profile_frame,
    write_csv,
)
from .snapshot import snapshot_read, snapshot_write

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def status(message: str) -> None:
    print(message, file=sys.stderr)


def _require_solitons(config: RunConfig, minimum: int = 1) -> None:
    if len(config.solitons) < minimum:
        raise ConfigurationError("not enough solitons",
                                 [f"solitons: need at least {minimum}, got {len(config.solitons)}"])


def _main_csv(args, config: RunConfig, name: str) -> Optional[Path]:
    return None if args.stdout else config.output_dir() / name


def cli_soliton(config: RunConfig, args) -> int:
    _require_solitons(config)
    params, grid = config.params(), config.make_grid()
    specs = config.specs()
    index = args.index
    if not 0 <= index < len(specs):
        raise ConfigurationError("bad soliton index", [f"--index: {index} not in [0, {len(specs)})"])

    rows = soliton_table(specs, params)
    for row, spec in zip(rows, specs):
        row['stationary_residual'] = stationary_residual(spec, params, grid)

    footer = f"stationary_residual,{rows[index]['stationary_residual']:.17g}"
    write_csv(profile_frame(specs[index], params, grid), _main_csv(args, config, f"soliton_{index}.csv"), footer)
    write_csv(frame(rows), config.output_dir() / "soliton_residuals.csv")
    for row in rows:
        status(f"✅ soliton {row['j']}: amplitude={row['amplitude']:.6g} "
               f"residual={row['stationary_residual']:.3e}")
    return EXIT_OK


def _initial_state(config: RunConfig) -> FieldState:
    grid = config.make_grid()
    if not config.solitons:
        return FieldState.zeros(grid, config.time.t0)
    return multisoliton_state(config.specs(), config.params(), grid, config.time.t0)


def cli_evolve(config: RunConfig, args) -> int:
    params = config.params()
    state = _initial_state(config)
    rows: List[Dict[str, float]] = []
    initial: Dict[str, float] = {}

    def observe(index: int, t: float, current: FieldState) -> None:
        row = conserved_snapshot(current, params).to_row()
        row.pop('x_norm_sq', None)
        if not initial:
            initial.update(row)
        for key in ('energy', 'momentum1', 'momentum2'):
            row[f'{key}_drift'] = relative_drift(row[key], initial[key])
        rows.append(row)

    status(f"🚀 evolving {len(config.solitons)} soliton(s) t={config.time.t0} -> {config.time.t1} "
           f"({config.time.scheme}, dt={config.time.dt})")
    target = _main_csv(args, config, "evolve.csv")
    try:
        final = evolve(state, params, config.time.t1, config.time.dt, Scheme.parse(config.time.scheme),
                       observer=observe, every=config.output.stride, dealias=config.time.dealias)
    finally:
        write_csv(frame(rows, CONSERVED_COLUMNS), target)

    snapshot_write(final, config.output_dir() / "final.kgz")
    if rows:
        worst = max(max(r['energy_drift'], r['momentum1_drift'], r['momentum2_drift']) for r in rows)
        status(f"✅ reached t={final.t:.6g}; max relative drift {worst:.3e}")
    return EXIT_OK


def cli_spectrum(config: RunConfig, args) -> int:
    _require_solitons(config)
    params, grid = config.params(), config.make_grid()
    section = config.spectrum or SpectrumSection()
    spec = config.specs()[section.soliton]
    operator = assemble_L1(spec, params, grid) if section.operator == "L1" else assemble_L2(spec, params, grid)

    pairs = eigs_lowest(operator, section.count)
    rows = [{'eigenindex': p.index, 'eigenvalue': p.value, 'residual': p.residual} for p in pairs]
    write_csv(frame(rows, SPECTRUM_COLUMNS), _main_csv(args, config, f"spectrum_{section.operator}.csv"))
    status(f"✅ {section.operator} of soliton {section.soliton}: lowest eigenvalue {pairs[0].value:.10g}")

    if section.coercivity_samples:
        report = coercivity_report(config.specs(), params, grid, samples=section.coercivity_samples,
                                   seed=section.seed, t=max(config.time.t1, 1.0))
        write_csv(frame(report.to_rows()), config.output_dir() / "coercivity.csv")
        status(f"📊 coercivity sampled ({section.coercivity_samples} draws), K={report.localized_k:.4g}")
    return EXIT_OK


def cli_modulate(config: RunConfig, args) -> int:
    _require_solitons(config)
    params, specs = config.params(), config.specs()
    section = config.modulation or ModulationSection()

    if section.snapshot:
        state = snapshot_read(section.snapshot)
    else:
        state = multisoliton_state(specs, params, config.make_grid(), config.time.t0)

    if section.track:
        result = track_modulation(state, params, specs, config.time.t1, config.time.dt,
                                  Scheme.parse(config.time.scheme), every=config.output.stride,
                                  tol=section.tol, max_iter=section.max_iter)
        write_csv(frame(result.rows(), MODULATION_COLUMNS), _main_csv(args, config, "modulation.csv"))
        write_csv(frame(result.rates), config.output_dir() / "modulation_rates.csv")
        status(f"✅ tracked {len(result.fits)} fits; rate constants {['%.3g' % c for c in result.constants]}")
        return EXIT_OK

    fit = fit_modulation(state, params, specs, initial_guess=exact_parameters(specs, state.t),
                         tol=section.tol, max_iter=section.max_iter)
    write_csv(frame(fit.to_rows(), MODULATION_COLUMNS), _main_csv(args, config, "modulation.csv"))
    status(f"✅ modulation fit at t={fit.t:.6g}: {fit.iterations} iterations, "
           f"residual {fit.residual_norm:.3e}, eps_X {fit.eps_xnorm:.3e}")
    return EXIT_OK


def cli_construct(config: RunConfig, args) -> int:
    if config.construction is None:
        raise ConfigurationError("missing section", ["construction: required for the construct command"])
    _require_solitons(config, 2)
    section = config.construction
    run_config = ConstructionConfig(
        specs=config.specs(),
        params=config.params(),
        grid=config.make_grid(),
        T0=section.t0,
        Tn_list=list(section.tn_list),
        dt=abs(config.time.dt),
        scheme=Scheme.parse(config.time.scheme),
        sample_stride=config.output.stride,
        self_check=section.self_check,
        track_modulation=section.track_modulation,
        dealias=config.time.dealias,
    )
    status(f"🔧 backward construction from T^n in {section.tn_list} to T0={section.t0}")
    report = run_construction(run_config)

    out = config.output_dir()
    for run in report.runs:
        write_csv(frame(run.rows, CONSTRUCTION_COLUMNS), out / f"construction_n{run.n}.csv")
        if run.state_T0 is not None:
            snapshot_write(run.state_T0, out / f"construction_n{run.n}_T0.kgz")
    write_csv(frame(report.cauchy_table, ['n', 'm', 'Tn', 'Tm', 'distance']), out / "cauchy.csv")
    summary = frame(report.summary_rows(section.threshold_scale), SUMMARY_COLUMNS)
    write_csv(summary, _main_csv(args, config, "construction_summary.csv"))

    status(f"📊 omega_star={report.omega_star:.4g} c_star={report.c_star:.4g}")
    failed = [run for run in report.runs if run.failure is not None]
    for run in report.runs:
        icon = "✅" if run.valid else "⚠️"
        status(f"{icon} n={run.n} Tn={run.tn:g}: rate {run.fitted_rate:.4g}, drift {run.max_drift:.2e}")
    if failed:
        status(f"❌ {len(failed)} run(s) failed")
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {
    'soliton': cli_soliton,
    'evolve': cli_evolve,
    'spectrum': cli_spectrum,
    'modulate': cli_modulate,
    'construct': cli_construct,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgz", description="KGZ multi-soliton simulation toolkit")
    parser.add_argument("--log-level", default=None, help="logging level (default from KGZ_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("config", help="JSON run configuration")
        cmd.add_argument("--output", help="output directory")
        cmd.add_argument("--dt", type=float, help="override time.dt")
        cmd.add_argument("--scheme", choices=[s.value for s in Scheme], help="override time.scheme")
        cmd.add_argument("--stride", type=int, help="override output.stride")
        cmd.add_argument("--stdout", action="store_true", help="write the main CSV to stdout")
        if name == 'soliton':
            cmd.add_argument("--index", type=int, default=0, help="soliton to tabulate")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = (args.log_level or os.getenv("KGZ_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    overrides = {
        'output.dir': args.output,
        'time.dt': args.dt,
        'time.scheme': args.scheme,
        'output.stride': args.stride,
    }
    try:
        config = load_config(args.config, overrides)
        return COMMANDS[args.command](config, args)
    except (ConfigurationError, ParameterError, GridError, SnapshotError) as e:
        status(f"❌ {e}")
        return EXIT_INPUT
    except IntegrationBlowupError as e:
        status(f"❌ {e}")
        return EXIT_NUMERICAL
    except (ConvergenceError, EvolutionAborted) as e:
        status(f"❌ numerical failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
