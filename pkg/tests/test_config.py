# lorentz-zeta
# Copyright (C) 2024  Roel Huybrechts

# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.


import glob
import math
import os

import pytest

from lorentz_zeta.config import Config, load_experiment_config, parse_experiment_config, read_setting
from lorentz_zeta.dto.experiment import ExperimentConfig
from lorentz_zeta.exceptions import ConfigError

MINIMAL = '{\n  "metric": {"family": "minkowski", "dimension": 2}\n}'


def test_defaults_are_resolved():
    config = parse_experiment_config(MINIMAL)
    assert config.metric.family == 'minkowski'
    assert config.twist is None
    assert config.grid.boundary == 'periodic'
    assert config.contour.theta == pytest.approx(3 * math.pi / 4)
    assert config.seed == 0


def test_family_params_are_merged_with_defaults():
    config = parse_experiment_config(
        '{"metric": {"family": "conformal_bump", "dimension": 4, "params": {"amplitude": 0.05}}}')
    assert config.metric.params == {'amplitude': 0.05, 'width': 1.0, 'cutoff': 6.0}


def test_round_trip_is_lossless():
    config = parse_experiment_config('''{
      "metric": {"family": "conformal_bump", "dimension": 2, "params": {"amplitude": 0.2}},
      "clifford": {"twist": {"type": "u1", "potential": "constant_field", "params": {"field": 0.3}}},
      "grid": {"L": 4.0, "m": 16},
      "contour": {"theta": 2.5, "epsilon": 0.5, "rtrunc": 100.0, "nodes_per_unit": 12},
      "parameters": {"zeta": {"alphas": [0.5, 1.5]}},
      "seed": 7,
      "output": "results"
    }''')
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_missing_metric_is_reported():
    with pytest.raises(ConfigError, match='missing required key "metric"'):
        parse_experiment_config('{"seed": 1}')


def test_error_carries_line_number():
    text = '{\n  "metric": {\n    "family": "minkowski",\n    "dimension": 3\n  }\n}'
    with pytest.raises(ConfigError, match='^line 4:'):
        parse_experiment_config(text)


def test_syntax_error_carries_line_number():
    with pytest.raises(ConfigError, match='^line 2, column'):
        parse_experiment_config('{\n  "metric": ,\n}')


@pytest.mark.parametrize('text', [
    '{"metric": {"family": "schwarzschild"}}',
    '{"metric": {"family": "minkowski"}, "colour": 1}',
    '{"metric": {"family": "minkowski", "params": {"amplitude": 1}}}',
    '{"metric": {"family": "minkowski"}, "contour": {"theta": 1.0}}',
    '{"metric": {"family": "minkowski"}, "contour": {"epsilon": -1}}',
    '{"metric": {"family": "minkowski"}, "grid": {"m": 2}}',
    '{"metric": {"family": "minkowski"}, "parameters": {"render": {}}}',
    '{"metric": {"family": "minkowski"}, "clifford": {"twist": {"potential": "monopole"}}}',
    '{"metric": {"family": "minkowski"}, "seed": -1}',
    '[1, 2]'
])
def test_invalid_configs_are_rejected(text):
    with pytest.raises(ConfigError):
        parse_experiment_config(text)


def test_read_setting_prefers_file(tmp_path, monkeypatch):
    secret = tmp_path / 'threads'
    secret.write_text('3\n')
    monkeypatch.setenv('LORENTZ_ZETA_TEST_FILE', str(secret))
    monkeypatch.setenv('LORENTZ_ZETA_TEST', '5')
    assert read_setting('LORENTZ_ZETA_TEST') == '3'


def test_read_setting_default(monkeypatch):
    monkeypatch.delenv('LORENTZ_ZETA_MISSING', raising=False)
    assert read_setting('LORENTZ_ZETA_MISSING', 'x') == 'x'


def test_app_config_follows_config_class(app):
    assert app.config['TOL_SOLVE'] == Config.TOL_SOLVE
    assert app.config['THREADS'] == 1


def test_read_setting_ignores_blank_values(monkeypatch):
    monkeypatch.setenv('LORENTZ_ZETA_BLANK', '')
    monkeypatch.setenv('LORENTZ_ZETA_BLANK_FILE', '')
    assert read_setting('LORENTZ_ZETA_BLANK', '4') == '4'


@pytest.mark.parametrize('path', sorted(glob.glob(os.path.join(os.path.dirname(__file__), '..', 'configs', '*.json'))))
def test_shipped_configs_load(path):
    config = load_experiment_config(path)
    assert config.output.startswith('out/')
