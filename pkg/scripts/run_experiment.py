#!/usr/bin/env python3
"""
Numerical experiments that go beyond a single CLI run.

    order         error ratio under dt halving for rk4 and strang
    reversibility forward then backward transport of a two-soliton state
    interaction   decay of the interaction integral between two solitons
    construction  backward construction with a forward consistency check

Usage:
    python scripts/run_experiment.py order [--n 1024] [--length 80]
    python scripts/run_experiment.py interaction [--output output/interaction.csv]
"""

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy import stats

# Add project root to Python path for package imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.cli.reports import frame, write_csv
from src.construction import ConstructionConfig, forward_consistency, run_construction, theorem_constants
from src.evolution import Scheme, evolve
from src.observables import CutoffFamily, interaction_integral, x_norm
from src.solitons import SolitonSpec, SystemParams, multisoliton_state, soliton_state
from src.spectral import make_grid


class ExperimentRunner:
    """Run one named experiment and write its table."""

    def __init__(self, n_points: int = 2048, length: float = 100.0, output: str = "output/experiments"):
        self.params = SystemParams(alpha=1.0, beta=0.0)
        self.grid = make_grid(n_points, length)
        self.output = Path(output)

    def order(self) -> bool:
        print("🔄 Measuring convergence order under dt halving...")
        print("=" * 60)
        spec = SolitonSpec(omega=0.5, c=0.5)
        start = soliton_state(spec, self.params, self.grid, 0.0)
        exact = soliton_state(spec, self.params, self.grid, 1.0)

        rows = []
        for scheme in (Scheme.RK4, Scheme.STRANG):
            errors = []
            for dt in (0.02, 0.01):
                final = evolve(start, self.params, 1.0, dt, scheme, dealias=False)
                errors.append(x_norm(final - exact))
            ratio = errors[0] / errors[1]
            rows.append({'scheme': scheme.value, 'error_dt': errors[0], 'error_dt_half': errors[1],
                         'ratio': ratio, 'expected': 2 ** scheme.order})
            print(f"📊 {scheme.value}: ratio {ratio:.3f} (expected {2 ** scheme.order})")

        write_csv(frame(rows), self.output / "order.csv")
        return True

    def reversibility(self) -> bool:
        print("🔄 Forward and backward transport of a two-soliton state...")
        print("=" * 60)
        specs = [SolitonSpec(omega=0.3, c=-0.3, x0=-10.0), SolitonSpec(omega=0.3, c=0.3, x0=10.0)]
        start = multisoliton_state(specs, self.params, self.grid, 0.0)
        rows = []
        for scheme in Scheme:
            there = evolve(start, self.params, 5.0, 1e-3, scheme)
            back = evolve(there, self.params, 0.0, -1e-3, scheme)
            error = x_norm(back - start)
            rows.append({'scheme': scheme.value, 'x_err': error})
            print(f"📊 {scheme.value}: round-trip error {error:.3e}")
        write_csv(frame(rows), self.output / "reversibility.csv")
        return True

    def interaction(self) -> bool:
        print("🔄 Interaction integral between counter-propagating solitons...")
        print("=" * 60)
        specs = [SolitonSpec(omega=0.0, c=-0.3), SolitonSpec(omega=0.0, c=0.3)]
        family = CutoffFamily.from_specs(specs)
        w_star, c_star = theorem_constants(specs)
        times = np.arange(30.0, 100.0 + 1e-9, 5.0)
        values = np.array([interaction_integral(specs[0], specs[1], self.params, self.grid, t, family)
                           for t in times])

        fit = stats.linregress(times, np.log(values))
        reference = -4.0 * np.sqrt(w_star) * c_star
        print(f"📊 slope {fit.slope:.4f} (reference {reference:.4f}), R^2 {fit.rvalue ** 2:.5f}")
        write_csv(frame({'t': t, 'interaction': v} for t, v in zip(times, values)),
                  self.output / "interaction.csv")
        ok = fit.slope <= reference and fit.rvalue ** 2 > 0.99
        print("✅ decay faster than the reference rate" if ok else "⚠️  decay slower than the reference rate")
        return ok

    def construction(self) -> bool:
        print("🔄 Backward construction with forward consistency...")
        print("=" * 60)
        specs = [SolitonSpec(omega=0.0, c=-0.3), SolitonSpec(omega=0.0, c=0.3)]
        config = ConstructionConfig(specs=specs, params=self.params, grid=self.grid,
                                    T0=20.0, Tn_list=[40.0, 60.0])
        report = run_construction(config)
        rows = []
        for run in report.runs:
            if run.state_T0 is None:
                print(f"❌ run n={run.n} failed: {run.failure}")
                continue
            distance = forward_consistency(config, run)
            rows.append({'n': run.n, 'Tn': run.tn, 'forward_x_err': distance, 'max_drift': run.max_drift})
            print(f"📊 n={run.n}: forward distance to R(Tn) {distance:.3e}")
        write_csv(frame(rows), self.output / "forward_consistency.csv")
        write_csv(frame(report.cauchy_table), self.output / "cauchy.csv")
        return len(rows) == len(report.runs)


def main():
    parser = argparse.ArgumentParser(description="Run a numerical experiment")
    parser.add_argument("experiment", choices=["order", "reversibility", "interaction", "construction"])
    parser.add_argument("--n", type=int, default=2048, help="grid points")
    parser.add_argument("--length", type=float, default=100.0, help="domain length")
    parser.add_argument("--output", default="output/experiments", help="output directory")
    args = parser.parse_args()

    if args.experiment == "interaction" and args.length < 200:
        print("⚠️  interaction decay needs a long domain; using length 200")
        args.length = 200.0

    runner = ExperimentRunner(args.n, args.length, args.output)
    try:
        ok = getattr(runner, args.experiment)()
    except Exception as e:
        print(f"❌ Experiment failed: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(3)

    print("\n✅ Done" if ok else "\n⚠️  Finished with warnings")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
