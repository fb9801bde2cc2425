import json
import math

import numpy as np
import pandas as pd
import pytest

from src.cli import parse_config, snapshot_read, snapshot_write
from src.cli.app import main
from src.cli.config import load_config
from src.cli.snapshot import MAGIC, snapshot_bytes, snapshot_from_bytes, snapshot_size
from src.exceptions import ConfigurationError, IntegrationBlowupError, SnapshotError
from src.solitons import FieldState, SolitonSpec, soliton_state
from src.spectral import make_grid

STANDING = {
    "system": {"alpha": 1.0, "beta": 0.0},
    "solitons": [{"omega": 0.0, "c": 0.0}],
    "grid": {"n": 256, "length": 40.0},
    "time": {"t0": 0.0, "t1": 0.1, "dt": 0.01},
    "output": {"stride": 5},
}


def write_config(tmp_path, document, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document) if not isinstance(document, str) else document)
    return str(path)


def with_changes(**sections):
    document = json.loads(json.dumps(STANDING))
    document.update(sections)
    return document


class TestParseConfig:
    def test_defaults(self):
        config = parse_config("{}")
        assert config.grid.n == 2048 and config.grid.length == 100.0
        assert config.time.scheme == "lawson"
        assert config.solitons == []
        assert config.construction is None

    def test_full_document(self):
        config = parse_config(json.dumps(with_changes(spectrum={"count": 2, "operator": "L2"})))
        assert config.specs() == [SolitonSpec(omega=0.0, c=0.0)]
        assert config.make_grid().n_points == 256
        assert config.spectrum.operator == "L2"

    def test_key_order_is_irrelevant(self):
        a = '{"grid": {"n": 64, "length": 10}, "time": {"dt": 0.1, "t1": 1}}'
        b = '{"time": {"t1": 1, "dt": 0.1}, "grid": {"length": 10, "n": 64}}'
        assert parse_config(a) == parse_config(b)

    def test_overrides(self):
        config = parse_config(json.dumps(STANDING), {'time.dt': 0.005, 'time.scheme': 'rk4',
                                                     'output.dir': 'elsewhere', 'output.stride': None})
        assert config.time.dt == 0.005
        assert config.time.scheme == "rk4"
        assert str(config.output_dir()) == "elsewhere"
        assert config.output.stride == 5

    def test_output_dir_from_environment(self, monkeypatch):
        monkeypatch.setenv("KGZ_OUTPUT_DIR", "from_env")
        assert str(parse_config("{}").output_dir()) == "from_env"
        monkeypatch.delenv("KGZ_OUTPUT_DIR")
        assert str(parse_config("{}").output_dir()) == "output"

    @pytest.mark.parametrize("text, fragment", [
        ('{"grid": {"n": 16,}}', "line 1, column"),
        ('[1, 2]', "JSON object"),
        ('{"extra": 1}', "extra"),
        ('{"grid": {"n": 16, "spacing": 1}}', "grid.spacing"),
        ('{"grid": {"n": 15}}', "grid.n"),
        ('{"grid": {"n": 4}}', "grid.n"),
        ('{"grid": {"length": 0}}', "grid.length"),
        ('{"time": {"dt": 0}}', "dt must be nonzero"),
        ('{"time": {"t0": 0, "t1": 1, "dt": -0.1}}', "wrong sign"),
        ('{"time": {"scheme": "euler"}}', "time.scheme"),
        ('{"solitons": [{"omega": 1.0, "c": 0.5}]}', "soliton 0"),
        ('{"solitons": [{"c": 0.1}]}', "solitons.0.omega"),
        ('{"solitons": [{"omega": 0.1, "c": 0.1, "speed": 1}]}', "solitons.0.speed"),
        ('{"solitons": [{"omega": 0.1, "c": 0.2}, {"omega": 0.3, "c": 0.2}]}', "pairwise distinct"),
        ('{"construction": {"t0": 50, "tn_list": [40]}}', "must be below"),
        ('{"construction": {"tn_list": [60, 40]}}', "strictly increasing"),
        ('{"solitons": [{"omega": 0, "c": -0.3}, {"omega": 0, "c": 0.3}],'
         ' "grid": {"length": 50}, "construction": {}}', "too small"),
        ('{"spectrum": {"count": 11}}', "spectrum.count"),
        ('{"solitons": [{"omega": 0, "c": 0}], "spectrum": {"soliton": 2}}', "spectrum.soliton=2"),
    ])
    def test_rejects(self, text, fragment):
        with pytest.raises(ConfigurationError) as info:
            parse_config(text)
        assert fragment in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.json")


class TestSnapshot:
    def test_bitwise_round_trip(self, params, tmp_path):
        grid = make_grid(128, 30.0)
        state = soliton_state(SolitonSpec(omega=0.4, c=0.3, x0=1.0, gamma0=0.2), params, grid, 1.25)
        path = snapshot_write(state, tmp_path / "state.kgz")
        assert path.stat().st_size == snapshot_size(128) == 28 + 48 * 128
        back = snapshot_read(path)
        assert back.t == 1.25 and back.grid.length == 30.0
        for a, b in zip(state.fields(), back.fields()):
            assert np.array_equal(np.atleast_1d(a).view(np.uint64), np.atleast_1d(b).view(np.uint64))

    def test_random_states_round_trip_bitwise(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            grid = make_grid(2 * int(rng.integers(4, 64)), float(rng.uniform(1.0, 200.0)))
            scales = 10.0 ** rng.uniform(-300, 300, size=6)
            u = scales[0] * rng.normal(size=grid.n_points) + 1j * scales[1] * rng.normal(size=grid.n_points)
            rho = scales[2] * rng.normal(size=grid.n_points) + 1j * scales[3] * rng.normal(size=grid.n_points)
            state = FieldState(u=u, rho=rho, v=scales[4] * rng.normal(size=grid.n_points),
                               n=scales[5] * rng.normal(size=grid.n_points), grid=grid, t=float(rng.normal()))
            back = snapshot_from_bytes(snapshot_bytes(state))
            assert back.t == state.t
            assert back.grid.n_points == grid.n_points and back.grid.length == grid.length
            for a, b in zip(state.fields(), back.fields()):
                assert np.array_equal(a.view(np.uint64), b.view(np.uint64))

    def test_rejects_damaged_files(self):
        data = snapshot_bytes(FieldState.zeros(make_grid(16, 4.0)))
        with pytest.raises(SnapshotError, match="truncated"):
            snapshot_from_bytes(data[:-8])
        with pytest.raises(SnapshotError, match="truncated"):
            snapshot_from_bytes(data[:10])
        with pytest.raises(SnapshotError, match="magic"):
            snapshot_from_bytes(b"XXXX" + data[len(MAGIC):])
        with pytest.raises(SnapshotError, match="version"):
            snapshot_from_bytes(data[:4] + (2).to_bytes(4, "little") + data[8:])

    def test_missing_file(self, tmp_path):
        with pytest.raises(SnapshotError):
            snapshot_read(tmp_path / "none.kgz")


class TestCommands:
    def test_soliton_profile(self, tmp_path):
        out = tmp_path / "out"
        assert main(["soliton", write_config(tmp_path, STANDING), "--output", str(out)]) == 0
        profile = pd.read_csv(out / "soliton_0.csv", comment="#")
        assert list(profile.columns) == ['x', 'phi', 'psi', 'varphi', 're_rho', 'im_rho']
        centre = profile.loc[profile['x'] == 0.0, 'phi'].item()
        assert abs(centre - math.sqrt(2.0)) < 1e-12
        last = (out / "soliton_0.csv").read_text().splitlines()[-1]
        name, value = last.lstrip("# ").split(",")
        assert name == "stationary_residual"
        assert float(value) < 1e-8
        residuals = pd.read_csv(out / "soliton_residuals.csv")
        assert residuals['stationary_residual'].max() < 1e-8

    def test_soliton_to_stdout(self, tmp_path, capsys):
        assert main(["soliton", write_config(tmp_path, STANDING), "--output", str(tmp_path), "--stdout"]) == 0
        captured = capsys.readouterr()
        assert captured.out.startswith("x,phi,psi")
        assert captured.out.splitlines()[-1].startswith("# stationary_residual,")
        assert "✅" in captured.err

    def test_empty_soliton_list(self, tmp_path):
        assert main(["soliton", write_config(tmp_path, with_changes(solitons=[]))]) == 2

    def test_bad_config_exit_code(self, tmp_path, capsys):
        assert main(["evolve", write_config(tmp_path, '{"grid": {"n": 15}}')]) == 2
        assert "grid.n" in capsys.readouterr().err
        assert main(["evolve", str(tmp_path / "absent.json")]) == 2

    def test_evolve_zero_state(self, tmp_path):
        out = tmp_path / "out"
        assert main(["evolve", write_config(tmp_path, with_changes(solitons=[])), "--output", str(out)]) == 0
        rows = pd.read_csv(out / "evolve.csv")
        assert list(rows['t'].round(12)) == [0.0, 0.05, 0.1]
        assert (rows[['energy', 'momentum1', 'momentum2']] == 0).all().all()
        final = snapshot_read(out / "final.kgz")
        assert final.t == pytest.approx(0.1)
        assert np.all(final.u == 0)

    def test_evolve_conserves(self, tmp_path):
        document = with_changes(solitons=[{"omega": 0.5, "c": 0.5}], grid={"n": 512, "length": 60.0},
                                time={"t0": 0.0, "t1": 0.2, "dt": 0.001})
        out = tmp_path / "out"
        assert main(["evolve", write_config(tmp_path, document), "--output", str(out), "--stride", "50"]) == 0
        rows = pd.read_csv(out / "evolve.csv")
        assert len(rows) == 5
        drifts = rows[['energy_drift', 'momentum1_drift', 'momentum2_drift']].to_numpy()
        assert drifts.max() < 1e-8

    def test_evolve_blowup_keeps_partial_output(self, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise IntegrationBlowupError(0.03)

        monkeypatch.setattr("src.cli.app.evolve", explode)
        out = tmp_path / "out"
        assert main(["evolve", write_config(tmp_path, STANDING), "--output", str(out)]) == 3
        assert (out / "evolve.csv").exists()
        assert not (out / "final.kgz").exists()

    def test_spectrum(self, tmp_path):
        out = tmp_path / "out"
        document = with_changes(spectrum={"count": 3})
        assert main(["spectrum", write_config(tmp_path, document), "--output", str(out)]) == 0
        table = pd.read_csv(out / "spectrum_L1.csv")
        assert list(table.columns) == ['eigenindex', 'eigenvalue', 'residual']
        assert abs(table['eigenvalue'][0] + 3.0) < 1e-6
        assert len(table) == 3

    def test_modulate_exact_state(self, tmp_path):
        out = tmp_path / "out"
        document = with_changes(solitons=[{"omega": 0.3, "c": 0.3}], modulation={})
        assert main(["modulate", write_config(tmp_path, document), "--output", str(out)]) == 0
        table = pd.read_csv(out / "modulation.csv")
        assert table['residual_norm'].max() < 1e-12

    def test_modulate_from_snapshot(self, params, tmp_path):
        spec = SolitonSpec(omega=0.3, c=0.3)
        snapshot = snapshot_write(soliton_state(spec, params, make_grid(256, 40.0), 0.5), tmp_path / "s.kgz")
        document = with_changes(solitons=[{"omega": 0.3, "c": 0.3}], modulation={"snapshot": str(snapshot)})
        out = tmp_path / "out"
        assert main(["modulate", write_config(tmp_path, document), "--output", str(out)]) == 0
        table = pd.read_csv(out / "modulation.csv")
        assert table['t'][0] == 0.5
        assert table['x_t'][0] == pytest.approx(0.15, abs=1e-10)

    def test_modulate_missing_snapshot(self, tmp_path):
        document = with_changes(modulation={"snapshot": str(tmp_path / "none.kgz")})
        assert main(["modulate", write_config(tmp_path, document)]) == 2

    def test_construct_needs_section(self, tmp_path):
        assert main(["construct", write_config(tmp_path, STANDING)]) == 2

    def test_construct_needs_two_solitons(self, tmp_path):
        document = with_changes(construction={"t0": 1.0, "tn_list": [2.0]})
        assert main(["construct", write_config(tmp_path, document)]) == 2
