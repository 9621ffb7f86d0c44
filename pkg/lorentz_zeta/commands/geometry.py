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


import numpy as np
import pandas as pd

from lorentz_zeta.commands import experiment_command
from lorentz_zeta.exceptions import ConfigError


def default_points(n, count=9, extent=2.0):
    points = np.zeros((count, n))
    points[:, 0] = np.linspace(-extent, extent, count)
    return points


@experiment_command('curvature')
def curvature(run):
    """Scalar curvature and volume density at sample points (curvature.csv)."""
    n = run.dimension
    points = np.asarray(run.param('points', default_points(n)), dtype=float)
    if points.ndim != 2 or points.shape[1] != n:
        raise ConfigError(f'"points" must be a list of {n}-vectors', {'key': 'points'})

    rows = []
    for x in points:
        data = run.services.geometry.curvature_at(run.family, x)
        row = {f'x{i}': float(c) for i, c in enumerate(x)}
        row.update({'R_g': data.scalar, 'sqrt_det_g': data.sqrt_det})
        rows.append(row)
    run.results.write_csv('curvature.csv', pd.DataFrame(rows))
