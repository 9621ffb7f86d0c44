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

from lorentz_zeta.exceptions import ContourFailure, InvalidInput
from lorentz_zeta.services.contour import branch_power, compensated_sum

THETA = 0.75 * np.pi


def scalar_power(app, contour, lam, alpha):
    integral = app.services.contour.integrate(contour, lambda z: branch_power(z - 1j * contour.epsilon, alpha) / (lam - z))
    return integral / (2j * np.pi)


def test_branch_power_cut_runs_upward():
    assert branch_power(-1.0, 0.5) == pytest.approx(1j)
    assert branch_power(1j, 1.0) == pytest.approx(-1j)
    assert branch_power(-1j, 1.0) == pytest.approx(1j)
    assert branch_power(4.0, 0.5) == pytest.approx(0.5)
    below = np.array([-2.0 - 0.1j, 0.5 - 3.0j, 1.0 - 1e-9j])
    assert np.allclose(branch_power(below, 1.5 + 0.5j), below ** -(1.5 + 0.5j), rtol=1e-12, atol=0.0)


def test_compensated_sum_keeps_small_terms():
    assert compensated_sum([1e16, 1.0, -1e16]) == 1.0
    total = compensated_sum([np.array([1e16, 1.0]), np.array([1.0, 1e-16]), np.array([-1e16, -1.0])])
    assert np.array_equal(total, np.array([1.0, 1e-16]))


def test_truncation_radius(app):
    contour = app.services.contour
    assert contour.truncation_radius(1.0) == pytest.approx(1.0 / (np.pi * 1e-12))
    assert contour.truncation_radius(1.0, 5.0) == pytest.approx(10.0 / (np.pi * 1e-12))
    with pytest.raises(InvalidInput):
        contour.truncation_radius(0.0)
    with pytest.raises(ContourFailure):
        contour.truncation_radius(1e-3)


@pytest.mark.parametrize('theta, epsilon', [(0.5 * np.pi, 1.0), (np.pi, 1.0), (0.3, 1.0), (THETA, 0.0)])
def test_rejects_bad_geometry(app, theta, epsilon):
    with pytest.raises(InvalidInput):
        app.services.contour.build_contour(epsilon, theta, alpha_min=1.0)


def test_contour_path(app):
    contour = app.services.contour.build_contour(1.0, THETA, r_trunc=100.0, spectrum=[2.0])
    assert contour.size == len(contour.weights)
    assert contour.bumps == []
    # starts far out on the incoming ray and ends far out on the outgoing one
    first, last = contour.nodes[0], contour.nodes[-1]
    assert first.real < 0.0 < last.real
    assert first.imag > 50.0 and last.imag > 50.0
    assert np.min(np.abs(contour.nodes - 1j)) == pytest.approx(0.5)


@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.5])
@pytest.mark.parametrize('lam', [2.0, -1.5, 1.0 - 0.3j])
def test_cauchy_integral_gives_power(app, alpha, lam):
    contour = app.services.contour.build_contour(1.0, THETA, alpha_min=alpha, spectrum=[lam])
    value = scalar_power(app, contour, lam, alpha)
    assert value == pytest.approx(complex(branch_power(lam - 1j, alpha)), rel=1e-9)


def test_detour_around_nearby_eigenvalue(app):
    on_path = 1j + np.exp(1j * (np.pi - THETA))
    lam = on_path + 5e-4 * np.exp(-0.25j * np.pi)
    contour = app.services.contour.build_contour(1.0, THETA, alpha_min=1.0, spectrum=[lam])

    assert len(contour.bumps) == 1
    assert contour.bumps[0] == pytest.approx(lam)
    assert np.min(np.abs(contour.nodes - lam)) >= contour.dist_min
    value = scalar_power(app, contour, lam, 1.0)
    assert value == pytest.approx(complex(branch_power(lam - 1j, 1.0)), rel=1e-8)


def test_cluster_near_path_fails(app):
    direction = np.exp(1j * (np.pi - THETA))
    lam = 1j + direction + 5e-4 * np.exp(-0.25j * np.pi)
    with pytest.raises(ContourFailure):
        app.services.contour.build_contour(1.0, THETA, alpha_min=1.0, spectrum=[lam, lam + 1e-3 * direction])


def test_with_loop_appends_circle(app):
    service = app.services.contour
    contour = service.build_contour(1.0, THETA, alpha_min=1.0, spectrum=[2.0])
    looped = service.with_loop(contour, 2.0, 0.5, spectrum=[2.0])
    assert looped.loops == [(2.0 + 0j, 0.5)]
    assert looped.size > contour.size
    # a clockwise loop contributes minus the residue of 1 / (z - 2)
    extra = service.integrate(looped, lambda z: 1.0 / (z - 2.0)) - service.integrate(contour, lambda z: 1.0 / (z - 2.0))
    assert extra == pytest.approx(-2j * np.pi, rel=1e-10)
