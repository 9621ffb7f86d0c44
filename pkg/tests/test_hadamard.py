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
import pytest

from lorentz_zeta.dto.experiment import TwistSpec
from lorentz_zeta.exceptions import InvalidInput


def test_u0_is_identity_on_minkowski(app, family, rep):
    state = app.services.hadamard.transport_u0(family(), [0.0, 0.0], [1.0, 0.3], 1.0, rep=rep(2))
    assert np.allclose(state.values, np.eye(2), atol=1e-10)
    assert np.allclose(state.ode_values, np.eye(2), atol=1e-10)
    assert state.deviation < 1e-10


def test_u0_on_conformal_bump(app, family):
    f = family('conformal_bump', 2, amplitude=0.2)
    x0, direction = np.array([0.0, 0.0]), np.array([1.0, 0.3])
    state = app.services.hadamard.transport_u0(f, x0, direction, 1.0, samples=7)
    points = app.services.geometry.radial_trivialization(
        f, x0, direction, 1.0, 7, radii=state.radii, rank=1, tol_ode=1e-13).points

    assert state.values[0, 0, 0] == pytest.approx(1.0, abs=1e-12)
    assert state.deviation < 1e-7
    assert np.allclose(state.coordinate_values[:, 0, 0], np.exp(f.phi(x0) - f.phi(points)), rtol=1e-9, atol=0.0)
    assert np.allclose(state.values, state.ode_values, atol=1e-7)


@pytest.mark.parametrize('name, params', [('minkowski', {}), ('conformal_bump', {'amplitude': 0.2})])
def test_radial_trivialization_starts_at_identity(app, family, name, params):
    f = family(name, 2, **params)
    trivialization = app.services.geometry.radial_trivialization(f, [0.1, 0.0], [1.0, 0.4], 0.5, 6)
    assert trivialization.h[0] == 0.0
    assert trivialization.h_coordinate[0] == 0.0
    assert trivialization.density[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.isfinite(trivialization.h))
    if name == 'minkowski':
        assert np.allclose(trivialization.h, 0.0, atol=1e-12)
        assert np.allclose(trivialization.density, 1.0, atol=1e-12)


def test_u1_vanishes_along_minkowski_ray(app, family, rep):
    hadamard = app.services.hadamard
    r, f = rep(2), family()
    u0 = hadamard.transport_u0(f, [0.0, 0.0], [1.0, 0.2], 1.0, samples=5, rep=r, tube=True)
    u1 = hadamard.transport_uk(f, r, [0.0, 0.0], [1.0, 0.2], 1, u0)
    assert u1.k == 1
    assert np.max(np.abs(u1.values)) < 1e-9


def test_transport_needs_previous_order(app, family, rep):
    hadamard = app.services.hadamard
    r, f = rep(2), family()
    u0 = hadamard.transport_u0(f, [0.0, 0.0], [1.0, 0.2], 1.0, samples=5, rep=r, tube=True)
    with pytest.raises(InvalidInput):
        hadamard.transport_uk(f, r, [0.0, 0.0], [1.0, 0.2], 2, u0)


def test_u1_origin_minkowski(app, family, rep):
    report = app.services.hadamard.transport_u1_origin(family(), rep(2), [0.0, 0.0])
    assert np.max(np.abs(report.numeric)) < 1e-9
    assert abs(report.scalar_curvature) < 1e-12


@pytest.mark.slow
def test_u1_origin_conformal_bump(app, family, rep):
    f = family('conformal_bump', 2, amplitude=0.3)
    x0 = [0.3, 0.2]
    report = app.services.hadamard.transport_u1_origin(f, rep(2), x0)
    oracle = app.services.geometry.conformal_curvature_oracle(f, x0)
    assert report.scalar_curvature == pytest.approx(float(oracle), rel=1e-5)
    assert abs(report.scalar_curvature) > 1e-2
    assert report.rel_error < 1e-5


@pytest.mark.slow
def test_u1_origin_flat_twisted(app, family, rep):
    clifford = app.services.clifford
    r = rep(2)
    twist = clifford.get_twist(TwistSpec(type='u1', potential='constant_field', params={'field': 0.5}), 2)
    report = app.services.hadamard.transport_u1_origin(family(), r, [0.0, 0.0], twist)
    contraction = clifford.twisting_curvature(twist, r, [0.0, 0.0]).contraction
    assert np.max(np.abs(contraction)) > 0.1
    assert np.allclose(report.numeric, contraction, rtol=0.0, atol=1e-4 * np.max(np.abs(contraction)))


@pytest.mark.slow
def test_u2_vanishes_along_minkowski_ray(app, family, rep):
    hadamard = app.services.hadamard
    r, f = rep(2), family()
    x0, direction = [0.0, 0.0], [1.0, 0.2]
    u0 = hadamard.transport_u0(f, x0, direction, 0.1, samples=3, rep=r, tube=True)
    u1 = hadamard.transport_uk(f, r, x0, direction, 1, u0, tube=True)
    u2 = hadamard.transport_uk(f, r, x0, direction, 2, u1)
    assert u2.k == 2
    assert np.max(np.abs(u1.values)) < 1e-9
    assert np.max(np.abs(u2.values)) < 1e-6


@pytest.mark.slow
def test_u1_along_conformal_bump_ray(app, family, rep):
    hadamard, geometry = app.services.hadamard, app.services.geometry
    r, f = rep(2), family('conformal_bump', 2, amplitude=0.3)
    x0, direction = np.array([0.3, 0.2]), np.array([1.0, 0.2])
    u0 = hadamard.transport_u0(f, x0, direction, 0.2, samples=5, rep=r, tube=True)
    u1 = hadamard.transport_uk(f, r, x0, direction, 1, u0)

    scalar = geometry.curvature_at(f, x0).scalar
    scale = abs(scalar) / 12.0
    assert np.allclose(u1.values[0], scalar / 12.0 * np.eye(2), rtol=0.0, atol=1e-4 * scale)

    # first order Taylor bound from the curvature gradient
    step = 1e-3
    gradient = np.array([
        geometry.curvature_at(f, x0 + step * e).scalar - geometry.curvature_at(f, x0 - step * e).scalar
        for e in np.eye(2)]) / (2.0 * step)
    r1 = u1.radii[1]
    slope = abs(gradient @ direction) / 12.0
    assert np.max(np.abs(u1.values[1] - u1.values[0])) < 2.0 * r1 * slope + 5e-2 * scale

    for i in (1, 2):
        point = geometry.exponential_map(f, x0, u1.radii[i] * direction).position
        direct = hadamard.section_value(f, r, x0, point, 1)
        assert np.allclose(u1.spinors[i] @ u1.values[i], direct, rtol=0.0, atol=1e-3 * scale)
