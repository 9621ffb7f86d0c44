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


import click
import pandas as pd

from lorentz_zeta.commands import experiment_command
from lorentz_zeta.config import FAMILY_PARAMS


@experiment_command('flow')
@click.option('--seeds', default=None, type=click.IntRange(min=1), help='Number of seeded bicharacteristics.')
@click.option('--tmax', default=None, type=click.FloatRange(min=0.0, min_open=True), help='Flow time budget.')
@click.option('--family', 'family_name', default=None, type=click.Choice(sorted(FAMILY_PARAMS)),
              help='Metric family, overrides the configuration.')
def flow(run, seeds, tmax, family_name):
    """Non-trapping verdict with radial set reports (flow.json) and trajectory dumps (trajectories.csv)."""
    seeds = seeds or int(run.param('seeds', 200))
    t_max = tmax or float(run.param('tmax', 30.0))
    family = run.family
    if family_name is not None and family_name != run.experiment.metric.family:
        family = run.services.metric.get_family(family_name, run.dimension)

    verdict, results = run.services.dynamics.nontrapping_check(family, seeds, t_max, seed=run.experiment.seed)
    run.results.write_json('flow.json', {'family': repr(family), 't_max': t_max, **verdict.to_dict()})

    n = run.dimension
    columns = ['t', 'rho', 'rho_inf', 'tau'] + [f'mu{i}' for i in range(n)] + ['p']
    frames = []
    for index, pair in enumerate(results[:int(run.param('dump', 10))]):
        for trajectory in pair:
            frame = pd.DataFrame(trajectory.rows(), columns=columns)
            frame.insert(0, 'direction', trajectory.direction)
            frame.insert(0, 'trajectory', index)
            frames.append(frame)
    if frames:
        run.results.write_csv('trajectories.csv', pd.concat(frames, ignore_index=True))
