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


import dataclasses

import numpy as np
import pytest

from lorentz_zeta.exceptions import ConfigError, GeodesicFailure


def test_minkowski_is_flat(app, family):
    data = app.services.geometry.curvature_at(family('minkowski', 4), [0.3, 0.1, -0.2, 0.5])
    assert data.scalar == 0.0
    assert data.method == 'flat'
    assert data.sqrt_det == 1.0


@pytest.mark.parametrize('n, x', [(2, [0.3, 0.2]), (4, [0.2, 0.1, -0.3, 0.25])])
def test_conformal_bump_matches_oracle(app, family, n, x):
    geometry = app.services.geometry
    f = family('conformal_bump', n, amplitude=0.1)
    expected = geometry.conformal_curvature_oracle(f, x)
    data = geometry.curvature_at(f, x)
    assert data.scalar == pytest.approx(float(expected), rel=1e-6)
    assert data.sqrt_det == pytest.approx(np.exp(n * f.phi(np.array(x))), rel=1e-12)
    assert data.bianchi_residual < 1e-10


def test_finite_difference_path_agrees(app, family):
    geometry = app.services.geometry
    f = family('conformal_bump', 2, amplitude=0.1)
    analytic = geometry.curvature_at(f, [0.4, -0.1])
    numeric = geometry.curvature_at(f, [0.4, -0.1], method='finite-difference')
    assert numeric.scalar == pytest.approx(analytic.scalar, rel=1e-5)


@pytest.mark.parametrize('n', [2, 4])
def test_warped_scalar_curvature(app, family, n):
    geometry = app.services.geometry
    f = family('warped', n, rate=0.7)
    x = np.zeros(n)
    x[0] = 0.4
    data = geometry.curvature_at(f, x)
    assert data.scalar == pytest.approx(geometry.warped_scalar_curvature(f, 0.4), rel=1e-9)


def test_warped_two_dimensional_value(app, family):
    geometry = app.services.geometry
    assert geometry.warped_scalar_curvature(family('warped', 2, rate=0.7), 1.3) == pytest.approx(-2 * 0.49)


def test_vielbein_is_orthonormal(app, family):
    f = family('conformal_bump', 4, amplitude=0.2)
    x = np.array([0.2, -0.4, 0.1, 0.3])
    frame = app.services.geometry.vielbein(f, x)
    gram = frame.T @ f.metric(x) @ frame
    assert np.allclose(gram, np.diag([1.0, -1.0, -1.0, -1.0]), atol=1e-12)


def test_straight_geodesic_outside_perturbation(app, family):
    state = app.services.geometry.exponential_map(family(), [0.1, 0.2], [1.0, 0.5])
    assert state.straight
    assert np.allclose(state.position, [1.1, 0.7])
    assert np.allclose(state.jacobi, np.eye(2))


def test_shooting_inverts_exponential_map(app, family):
    geometry = app.services.geometry
    f = family('conformal_bump', 2, amplitude=0.1)
    x0, y = np.array([0.0, 0.1]), np.array([0.5, 0.3])
    v = geometry.shoot(f, x0, y)
    assert np.allclose(geometry.exponential_map(f, x0, v).position, y, atol=1e-8)


def test_shooting_reports_nonconvergence(app, family, monkeypatch):
    geometry = app.services.geometry
    f = family('conformal_bump', 2, amplitude=0.1)
    x0, y = np.array([0.0, 0.1]), np.array([0.5, 0.3])
    stuck = dataclasses.replace(geometry.geodesic(f, x0, y - x0), position=np.array([2.0, -1.0]))
    monkeypatch.setattr(geometry, 'geodesic', lambda *args, **kwargs: stuck)
    with pytest.raises(GeodesicFailure):
        geometry.shoot(f, x0, y, max_iterations=3)


def test_metric_evaluation_rejects_nan(app, family):
    with pytest.raises(ConfigError):
        app.services.metric.metric_at(family(), [np.nan, 0.0])


def test_unknown_family(app):
    with pytest.raises(ConfigError):
        app.services.metric.get_family('kerr', 4)
