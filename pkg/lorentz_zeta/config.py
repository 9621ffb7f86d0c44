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

import json
import math
import os

from lorentz_zeta.dto.experiment import ContourSpec, ExperimentConfig, GridSpec, MetricSpec, TwistSpec
from lorentz_zeta.exceptions import ConfigError


def read_setting(variable_name, default=None):
    if os.environ.get(f'{variable_name}_FILE'):
        with open(os.environ.get(f'{variable_name}_FILE'), 'r') as setting_file:
            setting = setting_file.read().strip()
    else:
        setting = os.environ.get(variable_name) or default
    return setting


class Config:
    THREADS = int(read_setting('LORENTZ_ZETA_THREADS', os.cpu_count() or 1))
    LOG_LEVEL = read_setting('LORENTZ_ZETA_LOG_LEVEL', 'INFO')

    DIRECT_SOLVE_LIMIT = int(read_setting('LORENTZ_ZETA_DIRECT_SOLVE_LIMIT', 200000))
    CACHE_ENTRIES = 4096

    TOL_GEOM = 1e-6
    TOL_ODE = 1e-10
    TOL_DYN = 1e-6
    TOL_SOLVE = 1e-10
    FD_STEP = 1e-3
    DIST_MIN_FACTOR = 1e-3


FAMILY_PARAMS = {
    'minkowski': {},
    'conformal_bump': {'amplitude': 0.1, 'width': 1.0, 'cutoff': 6.0},
    'warped': {'rate': 1.0}
}

POTENTIAL_PARAMS = {
    'constant_field': {'field': 0.5, 'gauge': 0.0},
    'gaussian_flux': {'amplitude': 0.5, 'width': 1.0, 'gauge': 0.0}
}

SUBCOMMANDS = ('curvature', 'hadamard', 'zeta-flat', 'flow', 'assemble', 'power', 'zeta',
               'ambiguity', 'blcheck', 'decay', 'smallh')

TOP_LEVEL_KEYS = ('metric', 'clifford', 'grid', 'contour', 'parameters', 'seed', 'output')


def _line_of(text, key):
    index = text.find(f'"{key}"')
    if index < 0:
        return 1
    return text.count('\n', 0, index) + 1


def _fail(text, key, message):
    raise ConfigError(f'line {_line_of(text, key)}: {message}', {'key': key})


def _number(text, key, value, minimum=None, exclusive=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(text, key, f'"{key}" must be a finite number, got {value!r}')
    if minimum is not None and (value <= minimum if exclusive else value < minimum):
        _fail(text, key, f'"{key}" must be {">" if exclusive else ">="} {minimum}, got {value!r}')
    return float(value)


def _integer(text, key, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        _fail(text, key, f'"{key}" must be an integer >= {minimum}, got {value!r}')
    return value


def _params(text, section, given, defaults):
    if not isinstance(given, dict):
        _fail(text, section, f'"{section}" must be an object')
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        _fail(text, unknown[0], f'unknown parameter "{unknown[0]}" in "{section}"')
    resolved = dict(defaults)
    for key, value in given.items():
        resolved[key] = _number(text, key, value)
    return resolved


def _metric(text, data):
    if 'metric' not in data:
        _fail(text, 'metric', 'missing required key "metric"')
    metric = data['metric']
    if not isinstance(metric, dict):
        _fail(text, 'metric', '"metric" must be an object')
    family = metric.get('family')
    if family not in FAMILY_PARAMS:
        _fail(text, 'family', f'unknown metric family {family!r}, expected one of {sorted(FAMILY_PARAMS)}')
    dimension = metric.get('dimension', 2)
    if dimension not in (2, 4) or isinstance(dimension, bool):
        _fail(text, 'dimension', f'"dimension" must be 2 or 4, got {dimension!r}')
    params = _params(text, 'params', metric.get('params', {}), FAMILY_PARAMS[family])
    if family == 'conformal_bump':
        _number(text, 'width', params['width'], 0.0)
        _number(text, 'cutoff', params['cutoff'], 0.0)
    return MetricSpec(family=family, dimension=dimension, params=params)


def _twist(text, data):
    clifford = data.get('clifford') or {}
    if not isinstance(clifford, dict):
        _fail(text, 'clifford', '"clifford" must be an object')
    twist = clifford.get('twist')
    if twist is None:
        return None
    if not isinstance(twist, dict):
        _fail(text, 'twist', '"twist" must be an object or null')
    if twist.get('type', 'u1') != 'u1':
        _fail(text, 'type', f'only "u1" twists are supported, got {twist.get("type")!r}')
    potential = twist.get('potential')
    if potential not in POTENTIAL_PARAMS:
        _fail(text, 'potential', f'unknown twist potential {potential!r}, expected one of {sorted(POTENTIAL_PARAMS)}')
    params = _params(text, 'params', twist.get('params', {}), POTENTIAL_PARAMS[potential])
    return TwistSpec(type='u1', potential=potential, params=params)


def _grid(text, data):
    grid = data.get('grid', {})
    if not isinstance(grid, dict):
        _fail(text, 'grid', '"grid" must be an object')
    defaults = GridSpec()
    boundary = grid.get('boundary', defaults.boundary)
    if boundary not in ('periodic', 'zero'):
        _fail(text, 'boundary', f'"boundary" must be "periodic" or "zero", got {boundary!r}')
    return GridSpec(
        L=_number(text, 'L', grid.get('L', defaults.L), 0.0),
        m=_integer(text, 'm', grid.get('m', defaults.m), 4),
        boundary=boundary)


def _contour(text, data):
    contour = data.get('contour', {})
    if not isinstance(contour, dict):
        _fail(text, 'contour', '"contour" must be an object')
    defaults = ContourSpec()
    theta = _number(text, 'theta', contour.get('theta', defaults.theta))
    if not math.pi / 2 < theta < math.pi:
        _fail(text, 'theta', f'"theta" must lie in (pi/2, pi), got {theta!r}')
    rtrunc = contour.get('rtrunc', defaults.rtrunc)
    return ContourSpec(
        theta=theta,
        epsilon=_number(text, 'epsilon', contour.get('epsilon', defaults.epsilon), 0.0),
        rtrunc=None if rtrunc is None else _number(text, 'rtrunc', rtrunc, 0.0),
        nodes_per_unit=_integer(text, 'nodes_per_unit', contour.get('nodes_per_unit', defaults.nodes_per_unit), 2))


def parse_experiment_config(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f'line {e.lineno}, column {e.colno}: {e.msg}', {'line': e.lineno})

    if not isinstance(data, dict):
        raise ConfigError('line 1: the configuration must be a JSON object')

    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        _fail(text, unknown[0], f'unknown key "{unknown[0]}"')

    parameters = data.get('parameters', {})
    if not isinstance(parameters, dict):
        _fail(text, 'parameters', '"parameters" must be an object')
    for subcommand, params in parameters.items():
        if subcommand not in SUBCOMMANDS:
            _fail(text, subcommand, f'unknown subcommand "{subcommand}" in "parameters"')
        if not isinstance(params, dict):
            _fail(text, subcommand, f'parameters of "{subcommand}" must be an object')

    output = data.get('output', 'out')
    if not isinstance(output, str) or not output:
        _fail(text, 'output', '"output" must be a non-empty string')

    return ExperimentConfig(
        metric=_metric(text, data),
        twist=_twist(text, data),
        grid=_grid(text, data),
        contour=_contour(text, data),
        parameters=parameters,
        seed=_integer(text, 'seed', data.get('seed', 0), 0),
        output=output)


def load_experiment_config(path):
    try:
        with open(path, 'r') as config_file:
            text = config_file.read()
    except OSError as e:
        raise ConfigError(f'cannot read configuration {path}: {e.strerror}', {'path': str(path)})
    return parse_experiment_config(text)
