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


import inspect
import json
import os

import pytest
from click.testing import CliRunner

from lorentz_zeta.main import cli

MINKOWSKI = {'metric': {'family': 'minkowski', 'dimension': 2}, 'grid': {'L': 2.0, 'm': 8}}


@pytest.fixture
def invoke(tmp_path):
    # click >= 8.2 always captures stderr separately and dropped mix_stderr
    kwargs = {'mix_stderr': False} if 'mix_stderr' in inspect.signature(CliRunner.__init__).parameters else {}
    runner = CliRunner(**kwargs)

    def run(*args, out='out'):
        return runner.invoke(cli, list(args) + ['--out', str(tmp_path / out)])
    return run


def read_json(path):
    with open(path) as f:
        return json.load(f)


def reported_error(result):
    return json.loads(result.stderr.strip().splitlines()[-1])


def test_curvature_is_reproducible(invoke, write_config, tmp_path):
    config = write_config({'metric': {'family': 'conformal_bump', 'dimension': 2, 'params': {'amplitude': 0.2}}})
    first = invoke('curvature', '--config', config, out='a')
    second = invoke('curvature', '--config', config, out='b')
    assert first.exit_code == 0, first.stderr
    assert second.exit_code == 0, second.stderr

    manifests = [read_json(tmp_path / name / 'manifest.json') for name in ('a', 'b')]
    assert manifests[0]['subcommand'] == 'curvature'
    assert manifests[0]['artifacts'] == manifests[1]['artifacts']
    assert list(manifests[0]['artifacts']) == ['curvature.csv']
    with open(tmp_path / 'a' / 'curvature.csv') as f:
        assert f.readline().strip() == 'x0,x1,R_g,sqrt_det_g'


def test_options_override_config(invoke, write_config, tmp_path):
    result = invoke('smallh', '--config', write_config(MINKOWSKI), '--seed', '5')
    assert result.exit_code == 0, result.stderr
    manifest = read_json(tmp_path / 'out' / 'manifest.json')
    assert manifest['seed'] == 5
    assert manifest['out'] == str(tmp_path / 'out')
    assert manifest['config']['output'] == str(tmp_path / 'out')
    scan = read_json(tmp_path / 'out' / 'smallh.json')
    assert scan['slope'] == pytest.approx(-2.0, abs=0.05)


def test_assemble_writes_stats(invoke, write_config, tmp_path):
    result = invoke('assemble', '--config', write_config(MINKOWSKI))
    assert result.exit_code == 0, result.stderr
    stats = read_json(tmp_path / 'out' / 'assemble.json')
    assert stats['unknowns'] == 128
    assert stats['adjoint_defect']['norm'] == 0.0


def test_missing_metric_exits_with_config_error(invoke, write_config, tmp_path):
    result = invoke('curvature', '--config', write_config({'seed': 1}))
    assert result.exit_code == 2
    assert reported_error(result)['error'] == 'ConfigError'
    assert not os.path.exists(tmp_path / 'out' / 'manifest.json')


def test_unknown_key_exits_with_config_error(invoke, write_config):
    result = invoke('assemble', '--config', write_config({**MINKOWSKI, 'grids': {}}))
    assert result.exit_code == 2
    assert 'unknown key "grids"' in reported_error(result)['message']


def test_flow_on_warped_family_fails(invoke, write_config):
    config = write_config({'metric': {'family': 'warped', 'dimension': 2}})
    result = invoke('flow', '--config', config, '--seeds', '2')
    assert result.exit_code == 3
    assert reported_error(result)['error'] == 'InvalidInput'


def test_zero_boundary_is_rejected_for_operators(invoke, write_config):
    config = write_config({**MINKOWSKI, 'grid': {'L': 2.0, 'm': 8, 'boundary': 'zero'}})
    result = invoke('assemble', '--config', config)
    assert result.exit_code == 2
