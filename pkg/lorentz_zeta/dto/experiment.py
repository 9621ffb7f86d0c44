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

from dataclasses import dataclass, field, asdict

import math


@dataclass(frozen=True)
class MetricSpec:
    family: str
    dimension: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TwistSpec:
    type: str
    potential: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GridSpec:
    L: float = 8.0
    m: int = 32
    boundary: str = 'periodic'


@dataclass(frozen=True)
class ContourSpec:
    theta: float = 3 * math.pi / 4
    epsilon: float = 1.0
    rtrunc: float = None
    nodes_per_unit: int = 16


@dataclass(frozen=True)
class ExperimentConfig:
    metric: MetricSpec
    twist: TwistSpec = None
    grid: GridSpec = field(default_factory=GridSpec)
    contour: ContourSpec = field(default_factory=ContourSpec)
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output: str = 'out'

    def params_for(self, subcommand):
        return dict(self.parameters.get(subcommand, {}))

    def to_dict(self):
        return {
            'metric': asdict(self.metric),
            'clifford': {'twist': asdict(self.twist) if self.twist is not None else None},
            'grid': asdict(self.grid),
            'contour': asdict(self.contour),
            'parameters': dict(self.parameters),
            'seed': self.seed,
            'output': self.output
        }

    @classmethod
    def from_dict(cls, data):
        twist = (data.get('clifford') or {}).get('twist')
        return cls(
            metric=MetricSpec(**data['metric']),
            twist=TwistSpec(**twist) if twist is not None else None,
            grid=GridSpec(**data.get('grid', {})),
            contour=ContourSpec(**data.get('contour', {})),
            parameters=dict(data.get('parameters', {})),
            seed=data.get('seed', 0),
            output=data.get('output', 'out'))
