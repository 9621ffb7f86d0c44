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


import dataclasses
import functools
import json

import click
import numpy as np

from lorentz_zeta.clients.results import to_jsonable
from lorentz_zeta.config import load_experiment_config
from lorentz_zeta.exceptions import ConfigError, LorentzZetaError


class Run:
    """One subcommand invocation: the resolved experiment and the objects built from it."""

    def __init__(self, app, name, experiment):
        self.app = app
        self.name = name
        self.experiment = experiment
        self.params = experiment.params_for(name)
        self.results = app.clients.results

        self._family = None
        self._rep = None

    @property
    def services(self):
        return self.app.services

    @property
    def dimension(self):
        return self.experiment.metric.dimension

    @property
    def family(self):
        if self._family is None:
            self._family = self.services.metric.from_spec(self.experiment.metric)
        return self._family

    @property
    def rep(self):
        if self._rep is None:
            self._rep = self.services.clifford.build_gamma(self.dimension)
        return self._rep

    @property
    def twist(self):
        return self.services.clifford.get_twist(self.experiment.twist, self.dimension)

    def param(self, key, default=None):
        return self.params.get(key, default)

    def seed_sequence(self):
        return np.random.SeedSequence(self.experiment.seed)

    def operator(self, provenance=None):
        grid = self.experiment.grid
        if grid.boundary != 'periodic':
            raise ConfigError('Operators are assembled on periodic grids only', {'boundary': grid.boundary})
        return self.services.lattice.assemble(
            self.family, self.rep, grid.L, grid.m, twist=self.twist,
            provenance=provenance or self.param('provenance', 'dirac-squared'))


def parse_complex(value, key='alpha'):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigError(f'"{key}" must be a number or a [re, im] pair, got {value!r}', {'key': key})


def fail(app, error):
    app.log.error(f'{type(error).__name__}: {error.message}')
    click.echo(json.dumps(to_jsonable(error.to_dict()), sort_keys=True), err=True)
    click.get_current_context().exit(error.exit_code)


def experiment_command(name, **kwargs):
    """A click command taking --config/--out/--seed that writes its artifacts and a manifest.

    The decorated function receives a `Run` followed by its own options."""
    def decorator(fn):
        @click.command(name, **kwargs)
        @click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
                      help='Experiment configuration (JSON).')
        @click.option('--out', default=None, type=click.Path(file_okay=False),
                      help='Output directory, overrides "output" of the configuration.')
        @click.option('--seed', default=None, type=click.IntRange(min=0),
                      help='Random seed, overrides "seed" of the configuration.')
        @click.pass_obj
        @functools.wraps(fn)
        def command(app, config_path, out, seed, **options):
            try:
                experiment = load_experiment_config(config_path)
                if seed is not None:
                    experiment = dataclasses.replace(experiment, seed=seed)
                if out is not None:
                    experiment = dataclasses.replace(experiment, output=out)
                app.config['CONTOUR'] = experiment.contour
                app.clients.results.open(experiment.output)

                app.log.info(f'Running {name} on {experiment.metric.family} (n={experiment.metric.dimension})')
                fn(Run(app, name, experiment), **options)
                app.clients.results.write_manifest(name, experiment, experiment.seed)
            except LorentzZetaError as e:
                fail(app, e)
        return command
    return decorator
