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


@dataclass(frozen=True)
class CliffordRep:
    dimension: int
    twist_rank: int
    gammas: np.ndarray
    beta: np.ndarray
    e_index: int = 0

    @property
    def rank(self):
        return self.gammas.shape[-1]

    @property
    def signs(self):
        return np.array([1.0] + [-1.0] * (self.dimension - 1))

    @property
    def gammas_upper(self):
        return self.signs[:, None, None] * self.gammas

    @property
    def identity(self):
        return np.eye(self.rank, dtype=complex)

    def gamma_of(self, vector):
        """Clifford multiplication by a vector given in orthonormal frame components."""
        return np.einsum('a,aij->ij', np.asarray(vector), self.gammas)


@dataclass
class PositivityReport:
    positive: bool
    min_eigenvalue: float


@dataclass
class ConnectionData:
    x: np.ndarray
    frame: np.ndarray
    coframe: np.ndarray
    spin_coefficients: np.ndarray
    omega: np.ndarray
    twist_potential: np.ndarray
    orthonormality_residual: float
    compatibility_residual: float
    metricity_residual: float

    @property
    def twisted_omega(self):
        if self.twist_potential is None:
            return self.omega
        rank = self.omega.shape[-1]
        return self.omega + self.twist_potential[:, None, None] * np.eye(rank)


@dataclass
class SectionGrid:
    L: float
    m: int
    values: np.ndarray
    boundary: str = 'periodic'

    @property
    def dimension(self):
        return self.values.ndim - 1

    @property
    def rank(self):
        return self.values.shape[-1]

    @property
    def hx(self):
        return 2.0 * self.L / self.m

    def axis(self):
        return -self.L + self.hx * np.arange(self.m)

    def coordinates(self):
        axes = [self.axis()] * self.dimension
        return np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)

    def with_values(self, values):
        return SectionGrid(L=self.L, m=self.m, values=values, boundary=self.boundary)


@dataclass
class TwistCurvature:
    x: np.ndarray
    field: np.ndarray
    contraction: np.ndarray
    contraction_lower: np.ndarray


@dataclass
class BochnerLichnerowiczResidual:
    hx: float
    residual: float
    scale: float
