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

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CurvatureData:
    x: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    sqrt_det: float
    log_sqrt_det_gradient: np.ndarray
    bianchi_residual: float
    method: str


@dataclass
class GeodesicState:
    base: np.ndarray
    tangent: np.ndarray
    t: float
    position: np.ndarray
    velocity: np.ndarray
    frame: np.ndarray
    jacobi: np.ndarray
    jacobi_derivative: np.ndarray
    spinor: np.ndarray = None
    energy_drift: float = 0.0
    straight: bool = False
    dense: object = field(default=None, repr=False)


@dataclass
class RadialTrivialization:
    base: np.ndarray
    direction: np.ndarray
    radii: np.ndarray
    points: np.ndarray
    frames: np.ndarray
    sqrt_det: np.ndarray
    density: np.ndarray
    h: np.ndarray
    h_coordinate: np.ndarray
    spinors: np.ndarray = None
