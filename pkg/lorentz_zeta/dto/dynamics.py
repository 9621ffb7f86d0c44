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


@dataclass(frozen=True)
class PhasePoint:
    """A point of the compactified scattering phase space.

    Fiber coordinates are stored compactified: `xi`, `tau` and `mu` are the
    covector components multiplied by rho_inf = <xi>^{-1}, so fiber infinity
    is rho_inf = 0 with a unit covector direction."""

    chart: str
    rho_inf: float
    x: np.ndarray = None
    xi: np.ndarray = None
    rho: float = None
    y: np.ndarray = None
    tau: float = None
    mu: np.ndarray = None

    @classmethod
    def interior(cls, x, xi):
        xi = np.asarray(xi, dtype=float)
        rho_inf = 1.0 / np.sqrt(1.0 + xi @ xi)
        return cls(chart='interior', rho_inf=float(rho_inf), x=np.asarray(x, dtype=float), xi=rho_inf * xi)

    @classmethod
    def at_fiber_infinity(cls, x, direction):
        direction = np.asarray(direction, dtype=float)
        return cls(chart='interior', rho_inf=0.0, x=np.asarray(x, dtype=float),
                   xi=direction / np.linalg.norm(direction))

    @classmethod
    def boundary(cls, rho, y, tau, mu, rho_inf=0.0):
        return cls(chart='boundary', rho_inf=float(rho_inf), rho=float(rho), y=np.asarray(y, dtype=float),
                   tau=float(tau), mu=np.asarray(mu, dtype=float))

    @property
    def dimension(self):
        return len(self.x) if self.chart == 'interior' else len(self.y)

    @property
    def covector(self):
        """Compactified covector in the standard basis dx^i."""
        if self.chart == 'interior':
            return self.xi
        return -self.tau * self.y + self.mu


@dataclass
class Trajectory:
    direction: int
    t: np.ndarray
    states: np.ndarray
    charts: list
    symbol: np.ndarray
    distances: dict
    terminal: str

    def rows(self):
        """Plot-ready rows (t, rho, rho_inf, tau, mu..., p) in the boundary chart."""
        n = (self.states.shape[1] - 2) // 2
        rows = []
        for t, state, p in zip(self.t, self.states, self.symbol):
            rho, y, rho_inf, xi = state[0], state[1:n + 1], state[n + 1], state[n + 2:]
            tau = -xi @ y
            mu = xi + tau * y
            rows.append([float(t), float(rho), float(rho_inf), float(tau)] + mu.tolist() + [float(p)])
        return rows


@dataclass
class RadialSetReport:
    label: str
    points: np.ndarray
    beta_L: np.ndarray
    beta: np.ndarray
    beta_inf: np.ndarray
    conditions: dict
    threshold: np.ndarray
    threshold_reference: float = -0.5
    field_norms: np.ndarray = field(default=None, repr=False)

    @property
    def certified(self):
        return all(self.conditions.values())

    def to_dict(self):
        return {
            'label': self.label,
            'points': self.points.tolist(),
            'beta_L': self.beta_L.tolist(),
            'beta': self.beta.tolist(),
            'beta_inf': self.beta_inf.tolist(),
            'conditions': dict(self.conditions),
            'certified': self.certified,
            'threshold': self.threshold.tolist(),
            'threshold_reference': self.threshold_reference
        }


@dataclass
class NontrappingVerdict:
    verdict: str
    seeds: int
    terminals: list
    sources: RadialSetReport
    sinks: RadialSetReport

    def to_dict(self):
        counts = {}
        for forward, backward in self.terminals:
            key = f'{backward}->{forward}'
            counts[key] = counts.get(key, 0) + 1
        return {
            'verdict': self.verdict,
            'seeds': self.seeds,
            'transitions': dict(sorted(counts.items())),
            'sources': self.sources.to_dict(),
            'sinks': self.sinks.to_dict()
        }
