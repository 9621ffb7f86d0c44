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

import numpy as np
import pytest

from lorentz_zeta.main import create_app


@pytest.fixture
def app():
    app = create_app({'THREADS': 1, 'LOG_LEVEL': 'WARNING'})
    yield app
    app.shutdown()


@pytest.fixture
def family(app):
    def get(name='minkowski', dimension=2, **params):
        return app.services.metric.get_family(name, dimension, **params)
    return get


@pytest.fixture
def rep(app):
    def get(dimension=2):
        return app.services.clifford.build_gamma(dimension)
    return get


@pytest.fixture
def write_config(tmp_path):
    def write(data, name='experiment.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2) if not isinstance(data, str) else data)
        return str(path)
    return write


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(1234)))
