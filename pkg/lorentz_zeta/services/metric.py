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

from lorentz_zeta.exceptions import ConfigError, SingularMetric


def minkowski_eta(n):
    return np.diag([1.0] + [-1.0] * (n - 1))


class AbstractMetricFamily:
    """A parametric Lorentzian metric on R^n, equal to Minkowski outside a ball.

    Evaluators are vectorized over leading axes: `x` has shape (..., n) and the
    metric has shape (..., n, n). They stay analytic in `x` so that complex
    step differentiation can be applied to them."""

    label = None

    def __init__(self, dimension, **params):
        self.dimension = dimension
        self.params = params
        self.eta = minkowski_eta(dimension)

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in sorted(self.params.items()))
        return f'{self.label}(n={self.dimension}, {params})'

    @property
    def perturbation_radius(self):
        """Radius of the Euclidean ball outside of which g is exactly Minkowski."""
        raise NotImplementedError

    @property
    def has_analytic_derivatives(self):
        return True

    def metric(self, x):
        """Get g_{mu nu}(x)."""
        raise NotImplementedError

    def d_metric(self, x):
        """Get d_k g_{mu nu}(x), with k on the axis before the last two."""
        raise NotImplementedError

    def dd_metric(self, x):
        """Get d_k d_l g_{mu nu}(x), with (k, l) on the two axes before the last two."""
        raise NotImplementedError

    def is_flat_everywhere(self):
        return self.perturbation_radius == 0.0

    def is_flat_at(self, x, margin=0.0):
        x = np.asarray(x)
        return np.sqrt(np.sum(np.real(x) ** 2, axis=-1)) > self.perturbation_radius + margin

    def segment_is_flat(self, x0, v):
        """Whether the straight segment x0 + t v, t in [0, 1], avoids the perturbation."""
        if self.is_flat_everywhere():
            return True
        x0 = np.asarray(x0, dtype=float)
        v = np.asarray(v, dtype=float)
        vv = v @ v
        t = 0.0 if vv == 0.0 else min(max(-(x0 @ v) / vv, 0.0), 1.0)
        closest = x0 + t * v
        return np.sqrt(closest @ closest) > self.perturbation_radius

    def _broadcast(self, x, shape):
        x = np.asarray(x)
        return np.zeros(x.shape[:-1] + shape, dtype=np.result_type(x, float))


class MinkowskiFamily(AbstractMetricFamily):
    label = 'minkowski'

    @property
    def perturbation_radius(self):
        return 0.0

    def metric(self, x):
        n = self.dimension
        return self._broadcast(x, (n, n)) + self.eta

    def d_metric(self, x):
        n = self.dimension
        return self._broadcast(x, (n, n, n))

    def dd_metric(self, x):
        n = self.dimension
        return self._broadcast(x, (n, n, n, n))


class ConformalBumpFamily(AbstractMetricFamily):
    """g = exp(2 phi) eta with phi = a exp(-|x|^2 / w^2) cut off at radius `cutoff` * w."""

    label = 'conformal_bump'

    def __init__(self, dimension, amplitude=0.1, width=1.0, cutoff=6.0):
        super().__init__(dimension, amplitude=amplitude, width=width, cutoff=cutoff)
        self.amplitude = amplitude
        self.width = width
        self.radius = cutoff * width

    @property
    def perturbation_radius(self):
        return 0.0 if self.amplitude == 0.0 else self.radius

    def phi(self, x):
        x = np.asarray(x)
        s = np.sum(x * x, axis=-1)
        inside = np.real(s) < self.radius ** 2
        return np.where(inside, self.amplitude * np.exp(-s / self.width ** 2), 0.0)

    def d_phi(self, x):
        x = np.asarray(x)
        return -2.0 * x / self.width ** 2 * self.phi(x)[..., None]

    def dd_phi(self, x):
        x = np.asarray(x)
        w2 = self.width ** 2
        outer = 4.0 * x[..., :, None] * x[..., None, :] / w2 ** 2
        return (outer - 2.0 * np.eye(self.dimension) / w2) * self.phi(x)[..., None, None]

    def box_phi(self, x):
        return np.einsum('...kl,kl->...', self.dd_phi(x), self.eta)

    def metric(self, x):
        return np.exp(2.0 * self.phi(x))[..., None, None] * self.eta

    def d_metric(self, x):
        return 2.0 * self.d_phi(x)[..., :, None, None] * self.metric(x)[..., None, :, :]

    def dd_metric(self, x):
        d_phi = self.d_phi(x)
        factor = 2.0 * self.dd_phi(x) + 4.0 * d_phi[..., :, None] * d_phi[..., None, :]
        return factor[..., :, :, None, None] * self.metric(x)[..., None, None, :, :]


class WarpedFamily(AbstractMetricFamily):
    """g = dt^2 - a(t)^2 |dx|^2 with a(t) = cosh(c t); not flat at infinity."""

    label = 'warped'

    def __init__(self, dimension, rate=1.0):
        super().__init__(dimension, rate=rate)
        self.rate = rate

    @property
    def perturbation_radius(self):
        return 0.0 if self.rate == 0.0 else np.inf

    def scale(self, t):
        return np.cosh(self.rate * t)

    def scale_dot(self, t):
        return self.rate * np.sinh(self.rate * t)

    def scale_ddot(self, t):
        return self.rate ** 2 * np.cosh(self.rate * t)

    def _spatial(self, x, values):
        n = self.dimension
        result = self._broadcast(x, (n, n)).astype(np.result_type(values, float))
        for i in range(1, n):
            result[..., i, i] = values
        return result

    def metric(self, x):
        x = np.asarray(x)
        result = self._spatial(x, -self.scale(x[..., 0]) ** 2)
        result[..., 0, 0] = 1.0
        return result

    def d_metric(self, x):
        x = np.asarray(x)
        t = x[..., 0]
        n = self.dimension
        result = self._broadcast(x, (n, n, n)).astype(np.result_type(t, float))
        result[..., 0, :, :] = self._spatial(x, -2.0 * self.scale(t) * self.scale_dot(t))
        return result

    def dd_metric(self, x):
        x = np.asarray(x)
        t = x[..., 0]
        n = self.dimension
        result = self._broadcast(x, (n, n, n, n)).astype(np.result_type(t, float))
        second = -2.0 * (self.scale_dot(t) ** 2 + self.scale(t) * self.scale_ddot(t))
        result[..., 0, 0, :, :] = self._spatial(x, second)
        return result


class MetricService:
    def __init__(self, app):
        self.app = app

        self.families = {
            'minkowski': MinkowskiFamily,
            'conformal_bump': ConformalBumpFamily,
            'warped': WarpedFamily
        }

    def get_family(self, name, dimension, **params):
        family = self.families.get(name, None)

        if family is None:
            raise ConfigError(f'No metric family exists with the name {name!r}')

        if dimension not in (2, 4):
            raise ConfigError(f'Metric families are defined in dimension 2 or 4, got {dimension}')

        return family(dimension, **params)

    def from_spec(self, spec):
        return self.get_family(spec.family, spec.dimension, **spec.params)

    def metric_at(self, family, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ConfigError('metric evaluation requested at a non-finite point', {'x': x.tolist()})

        g = family.metric(x)
        eigenvalues = np.linalg.eigvalsh(g)
        positive = np.sum(eigenvalues > 0, axis=-1)
        negative = np.sum(eigenvalues < 0, axis=-1)

        if np.any(positive != 1) or np.any(negative != family.dimension - 1):
            raise ConfigError(
                f'Metric family {family!r} violates the Lorentzian signature',
                {'x': x.tolist(), 'eigenvalues': eigenvalues.tolist()})

        return g

    def inverse(self, g):
        det = np.linalg.det(g)
        if np.any(np.abs(det) < 1e-300) or not np.all(np.isfinite(det)):
            raise SingularMetric('metric is not invertible', {'det': np.atleast_1d(det).tolist()})
        return np.linalg.inv(g)
