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

from dataclasses import dataclass

import numpy as np


@dataclass
class TransportTube:
    spacing: float
    offsets: np.ndarray
    values: np.ndarray


@dataclass
class TransportState:
    base: np.ndarray
    direction: np.ndarray
    k: int
    radii: np.ndarray
    values: np.ndarray
    h: np.ndarray
    density: np.ndarray
    spinors: np.ndarray
    ode_values: np.ndarray = None
    coordinate_values: np.ndarray = None
    deviation: float = 0.0
    tube: TransportTube = None

    @property
    def origin(self):
        return self.values[0]


@dataclass
class U1Report:
    x0: np.ndarray
    scalar_curvature: float
    numeric: np.ndarray
    predicted: np.ndarray
    rel_error: float
    twist_contraction: np.ndarray
    twist_contraction_lower: np.ndarray
    stencil_error: float

    def to_dict(self):
        return {
            'x0': self.x0.tolist(),
            'R_g': self.scalar_curvature,
            'u1_numeric': _matrix(self.numeric),
            'u1_predicted': _matrix(self.predicted),
            'rel_error': self.rel_error,
            'twist_contraction': _matrix(self.twist_contraction),
            'twist_contraction_lower': _matrix(self.twist_contraction_lower),
            'stencil_error': self.stencil_error
        }


@dataclass
class ZetaSample:
    alpha: complex
    epsilon: float
    value: complex
    provenance: str


@dataclass
class ResidueReport:
    n: int
    k: int
    transport: complex
    alternate: complex
    ratio: complex
    flat_residue: complex
    confirmed: str

    def to_dict(self):
        return {
            'n': self.n,
            'k': self.k,
            'transport': _complex(self.transport),
            'alternate': None if self.alternate is None else _complex(self.alternate),
            'ratio': None if self.ratio is None else _complex(self.ratio),
            'flat_residue': _complex(self.flat_residue),
            'confirmed': self.confirmed
        }


def _complex(value):
    value = complex(value)
    return [value.real, value.imag]


def _matrix(matrix):
    matrix = np.asarray(matrix)
    return {'re': matrix.real.tolist(), 'im': matrix.imag.tolist()}
