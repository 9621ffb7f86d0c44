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


import logging

import click

from lorentz_zeta.config import Config
from lorentz_zeta.dto.experiment import ContourSpec

from lorentz_zeta.clients.pool import WorkerPool
from lorentz_zeta.clients.results import ResultsClient

from lorentz_zeta.services.cache import CacheService
from lorentz_zeta.services.metric import MetricService
from lorentz_zeta.services.geometry import GeometryService
from lorentz_zeta.services.clifford import CliffordService
from lorentz_zeta.services.hadamard import HadamardService
from lorentz_zeta.services.residue import ResidueService
from lorentz_zeta.services.dynamics import DynamicsService
from lorentz_zeta.services.contour import ContourService
from lorentz_zeta.services.lattice import LatticeService
from lorentz_zeta.services.spectral import SpectralService

from lorentz_zeta.commands.geometry import curvature
from lorentz_zeta.commands.clifford import blcheck
from lorentz_zeta.commands.hadamard import hadamard, zeta_flat, smallh
from lorentz_zeta.commands.dynamics import flow
from lorentz_zeta.commands.spectral import assemble, power, zeta, ambiguity, decay


class Clients:
    def __init__(self, app):
        self.app = app

        self.pool = WorkerPool(self.app, threads=self.app.config['THREADS'])
        self.results = ResultsClient(self.app)

    def shutdown(self):
        self.pool.shutdown()


class Services:
    def __init__(self, app):
        self.app = app

        self.cache = CacheService(self.app)
        self.metric = MetricService(self.app)
        self.geometry = GeometryService(self.app)
        self.clifford = CliffordService(self.app)
        self.hadamard = HadamardService(self.app)
        self.residue = ResidueService(self.app)
        self.dynamics = DynamicsService(self.app)
        self.contour = ContourService(self.app)
        self.lattice = LatticeService(self.app)
        self.spectral = SpectralService(self.app)


class Logger:
    def __init__(self, app):
        self.app = app
        self.logger = logging.getLogger('lorentz_zeta')
        if not self.logger.handlers:
            hdlr = logging.StreamHandler()
            hdlr.setFormatter(logging.Formatter('%(asctime)s - %(message)s'))
            self.logger.addHandler(hdlr)
        self.logger.setLevel(self.app.config['LOG_LEVEL'])

    def log(self, *args, **kwargs):
        return self.logger.log(*args, **kwargs)

    def debug(self, message):
        return self.log(logging.DEBUG, message)

    def info(self, message):
        return self.log(logging.INFO, message)

    def warning(self, message):
        return self.log(logging.WARNING, message)

    def error(self, message):
        return self.log(logging.ERROR, message)


class LorentzZeta:
    def __init__(self, overrides=None):
        self.config = {key: getattr(Config, key) for key in dir(Config) if key.isupper()}
        self.config['CONTOUR'] = ContourSpec()
        self.config.update(overrides or {})

        self.log = Logger(self)
        self.clients = Clients(self)
        self.services = Services(self)

    def shutdown(self):
        self.clients.shutdown()


def create_app(overrides=None):
    return LorentzZeta(overrides)


@click.group()
@click.pass_context
def cli(ctx):
    """Spectral zeta experiments for squared Dirac operators on Lorentzian metrics."""
    ctx.obj = create_app()
    ctx.call_on_close(ctx.obj.shutdown)


cli.add_command(curvature)
cli.add_command(blcheck)
cli.add_command(hadamard)
cli.add_command(zeta_flat)
cli.add_command(flow)
cli.add_command(assemble)
cli.add_command(power)
cli.add_command(zeta)
cli.add_command(ambiguity)
cli.add_command(decay)
cli.add_command(smallh)


if __name__ == '__main__':
    cli()
