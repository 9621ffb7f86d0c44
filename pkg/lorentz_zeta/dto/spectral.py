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
class LatticeOperator:
    """P on the periodic box [-L, L)^n with m nodes per side and fiber rank N.

    Unknowns are ordered node-major: index = node * N + fiber."""

    L: float
    m: int
    dimension: int
    rank: int
    matrix: object
    provenance: str
    family: str
    weights: np.ndarray
    flat: object = field(default=None, repr=False)
    boundary: str = 'periodic'

    @property
    def hx(self):
        return 2.0 * self.L / self.m

    @property
    def unknowns(self):
        return self.matrix.shape[0]

    @property
    def unknown_weights(self):
        return np.repeat(self.weights, self.rank)

    def axis(self):
        return -self.L + self.hx * np.arange(self.m)

    def coordinates(self):
        """Node coordinates in node order, shape (m^n, n)."""
        axes = np.meshgrid(*([self.axis()] * self.dimension), indexing='ij')
        return np.stack(axes, axis=-1).reshape(-1, self.dimension)

    def node_index(self, x):
        """Index of the node nearest to the point `x`."""
        steps = np.rint((np.asarray(x, dtype=float) + self.L) / self.hx).astype(int) % self.m
        return int(np.ravel_multi_index(tuple(steps), (self.m,) * self.dimension))

    def stats(self):
        nnz = np.diff(self.matrix.indptr)
        return {
            'L': self.L,
            'm': self.m,
            'n': self.dimension,
            'rank': self.rank,
            'hx': self.hx,
            'unknowns': int(self.unknowns),
            'nnz': int(self.matrix.nnz),
            'max_row_nnz': int(nnz.max()),
            'provenance': self.provenance,
            'family': self.family
        }


@dataclass
class AdjointDefect:
    norm: float
    max_entry: float
    support_radius: float
    outside_max: float

    def to_dict(self):
        return {
            'norm': self.norm,
            'max_entry': self.max_entry,
            'support_radius': self.support_radius,
            'outside_max': self.outside_max
        }


@dataclass
class Contour:
    """Quadrature for Z_eps: nodes z_j with weights w_j = dz_j along the path."""

    theta: float
    epsilon: float
    r_trunc: float
    nodes: np.ndarray
    weights: np.ndarray
    pieces: list
    bumps: list = field(default_factory=list)
    loops: list = field(default_factory=list)
    dist_min: float = 0.0

    @property
    def size(self):
        return len(self.nodes)

    def to_dict(self):
        return {
            'theta': self.theta,
            'epsilon': self.epsilon,
            'r_trunc': self.r_trunc,
            'nodes': int(self.size),
            'bumps': [[complex(b).real, complex(b).imag] for b in self.bumps],
            'loops': [[complex(c).real, complex(c).imag, r] for c, r in self.loops],
            'dist_min': self.dist_min
        }


@dataclass
class AmbiguityReport:
    difference: np.ndarray
    rank: int
    norm: float
    singular_values: np.ndarray

    def to_dict(self):
        return {
            'rank': self.rank,
            'norm': self.norm,
            'singular_values': self.singular_values[:8].tolist()
        }


@dataclass
class DecayRow:
    im_lambda: float
    norm: float
    product: float
