import math

import pytest
from numpy.testing import assert_allclose

from src.construction import (
    ConstructionConfig,
    bootstrap_probe,
    envelopes,
    forward_consistency,
    omega_star,
    run_construction,
    theorem_constants,
)
from src.exceptions import ParameterError
from src.solitons import SolitonSpec, SystemParams
from src.spectral import make_grid


def pair(offset):
    return [SolitonSpec(omega=0.0, c=-0.3, x0=-offset), SolitonSpec(omega=0.0, c=0.3, x0=offset)]


@pytest.fixture(scope="module")
def small_config():
    return ConstructionConfig(specs=pair(5.0), params=SystemParams(), grid=make_grid(512, 80.0),
                              T0=5.0, Tn_list=[10.0, 15.0], dt=1e-2, self_check_tol=1e-5)


@pytest.fixture(scope="module")
def small_report(small_config):
    return run_construction(small_config)


class TestConstants:
    def test_reference_pair(self):
        w_star, c_star = theorem_constants(pair(0.0))
        assert_allclose(w_star, 1.0 / (0.91 * 256.0), rtol=1e-12)
        assert_allclose(w_star, 0.0042926, rtol=1e-4)
        assert c_star == pytest.approx(0.6)

    def test_needs_two_solitons(self):
        with pytest.raises(ParameterError):
            theorem_constants([SolitonSpec(omega=0.0, c=0.3)])
        assert omega_star([SolitonSpec(omega=0.0, c=0.0)]) == pytest.approx(1.0 / 256.0)

    def test_equal_speeds_rejected(self):
        with pytest.raises(ParameterError):
            theorem_constants([SolitonSpec(omega=0.1, c=0.3), SolitonSpec(omega=0.2, c=0.3, x0=5.0)])

    def test_envelopes_start_at_one(self):
        assert envelopes(0.0, 0.01, 0.5) == {'bound': 1.0, 'env_omega32': 1.0, 'env_3root': 1.0}

    def test_bound_value(self):
        assert envelopes(10.0, 0.01, 0.5)['bound'] == pytest.approx(math.exp(-0.5))


class TestValidation:
    @pytest.mark.parametrize("changes", [
        {'specs': [SolitonSpec(omega=0.0, c=0.3)]},
        {'T0': 10.0},
        {'T0': 0.0},
        {'Tn_list': [15.0, 10.0]},
        {'Tn_list': []},
        {'grid': make_grid(256, 30.0)},
    ])
    def test_rejects(self, small_config, changes):
        values = dict(small_config.__dict__)
        values.update(changes)
        with pytest.raises(ParameterError):
            ConstructionConfig(**values).validate()


class TestBackwardRuns:
    def test_report_shape(self, small_report, small_config):
        assert [run.tn for run in small_report.runs] == [10.0, 15.0]
        assert small_report.self_check_error < 1e-5
        for run in small_report.runs:
            times = [row['t'] for row in run.rows]
            assert times == sorted(times)
            assert times[0] == pytest.approx(small_config.T0)
            assert times[-1] == pytest.approx(run.tn)
            assert run.rows[-1]['x_err'] == 0.0
            assert run.failure is None
            assert set(run.rows[0]) == {'t', 'x_err', 'bound', 'env_omega32', 'env_3root',
                                        'E', 'Q1', 'Q2', 'drift', 'q2_local_drift',
                                        'S', 'dS_dt', 'omega_offset'}

    def test_cauchy_table(self, small_report):
        assert len(small_report.cauchy_table) == 1
        entry = small_report.cauchy_table[0]
        assert (entry['n'], entry['m']) == (0, 1)
        assert entry['distance'] > 0

    def test_summary_columns(self, small_report):
        rows = small_report.summary_rows()
        assert set(rows[0]) == {'n', 'Tn', 't_sharp', 'envelope_const', 'fitted_rate', 'action_const',
                                'omega_rate', 'max_drift', 'valid'}

    def test_bootstrap_thresholds(self, small_report):
        loose = bootstrap_probe(small_report, 1e6)
        assert all(v.passed for v in loose)
        assert all(v.t_sharp == pytest.approx(5.0) for v in loose)
        strict = bootstrap_probe(small_report, 0.0)
        assert not any(v.passed for v in strict)
        assert [v.t_sharp for v in strict] == [10.0, 15.0]

    def test_forward_consistency(self, small_report, small_config):
        assert forward_consistency(small_config, small_report.runs[0]) < 1e-5

    def test_separated_pair_passes_at_unit_threshold(self, small_config):
        values = dict(small_config.__dict__)
        values.update(specs=pair(20.0), Tn_list=[10.0], self_check=False)
        report = run_construction(ConstructionConfig(**values))
        assert all(v.passed for v in bootstrap_probe(report, 1.0))


MOVING_PAIR = [SolitonSpec(omega=0.3, c=-0.3, x0=-5.0), SolitonSpec(omega=0.3, c=0.3, x0=5.0)]


@pytest.fixture(scope="module")
def monitored_run():
    config = ConstructionConfig(specs=MOVING_PAIR, params=SystemParams(), grid=make_grid(512, 80.0),
                                T0=5.0, Tn_list=[15.0], dt=1e-2, self_check=False)
    return run_construction(config).runs[0]


class TestMonitors:
    def test_standing_pair_skips_frequency_fits(self, small_report):
        for run in small_report.runs:
            assert all(math.isnan(row['omega_offset']) for row in run.rows)
            assert math.isnan(run.omega_rate)
            assert all(math.isfinite(row['dS_dt']) for row in run.rows)
            assert math.isfinite(run.action_const)

    def test_frequency_offset_decays(self, monitored_run):
        offsets = [row['omega_offset'] for row in monitored_run.rows]
        assert len(offsets) == 11
        assert all(math.isfinite(v) for v in offsets)
        assert offsets[0] > offsets[-1]
        assert monitored_run.omega_rate > 0

    def test_action_derivative_decays(self, monitored_run):
        rates = [abs(row['dS_dt']) for row in monitored_run.rows]
        assert rates[0] > rates[-1]
        assert monitored_run.action_const > 0

    def test_tracking_can_be_switched_off(self):
        config = ConstructionConfig(specs=MOVING_PAIR, params=SystemParams(), grid=make_grid(512, 80.0),
                                    T0=5.0, Tn_list=[7.0], dt=1e-2, self_check=False,
                                    track_modulation=False)
        run = run_construction(config).runs[0]
        assert all(math.isnan(row['omega_offset']) for row in run.rows)


@pytest.mark.slow
def test_full_construction():
    config = ConstructionConfig(specs=pair(0.0), params=SystemParams(), grid=make_grid(4096, 200.0))
    report = run_construction(config)
    for run in report.runs:
        assert run.valid
        assert run.fitted_rate > 0
    distances = {(e['n'], e['m']): e['distance'] for e in report.cauchy_table}
    assert distances[(0, 1)] >= distances[(1, 2)]
