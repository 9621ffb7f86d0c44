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
from lorentz_zeta.exceptions import InvalidInput, Unsupported


@pytest.mark.parametrize('n', [2, 4])
def test_clifford_relations_are_exact(app, rep, n):
    r = rep(n)
    eta = np.diag([1.0] + [-1.0] * (n - 1))
    for a in range(n):
        for b in range(n):
            anticommutator = r.gammas[a] @ r.gammas[b] + r.gammas[b] @ r.gammas[a]
            assert np.array_equal(anticommutator, -2.0 * eta[a, b] * np.eye(r.rank))
    assert r.rank == 2 ** (n // 2)


@pytest.mark.parametrize('n', [2, 4])
def test_beta_conditions(app, rep, n):
    residuals = app.services.clifford.clifford_residuals(rep(n))
    assert residuals['clifford'] == 0.0
    assert residuals['beta_hermitian'] < 1e-12
    assert residuals['beta_skew'] < 1e-12
    assert residuals['positivity'] > 0.0


def test_two_dimensional_pair(app, rep):
    r = rep(2)
    assert np.array_equal(r.gammas[0], [[0, 1], [-1, 0]])
    assert np.array_equal(r.gammas[1], [[0, 1], [1, 0]])


def test_positivity_depends_on_time_orientation(app, rep):
    clifford = app.services.clifford
    r = rep(2)
    assert clifford.check_positivity(r, [1.0, 0.0]).positive
    assert clifford.check_positivity(r, [1.0, 0.5]).positive
    assert not clifford.check_positivity(r, [-1.0, 0.0]).positive


def test_positivity_over_future_cone(app, rep, rng):
    clifford = app.services.clifford
    r = rep(4)
    for _ in range(20):
        spatial = rng.uniform(-1.0, 1.0, 3)
        spatial *= rng.uniform(0.0, 0.95) / np.linalg.norm(spatial)
        assert clifford.check_positivity(r, np.concatenate([[1.0], spatial])).min_eigenvalue > 0.0


def test_spacelike_vector_is_rejected(app, rep):
    with pytest.raises(InvalidInput):
        app.services.clifford.check_positivity(rep(2), [0.5, 1.0])


def test_odd_dimension_is_unsupported(app):
    with pytest.raises(Unsupported):
        app.services.clifford.build_gamma(3)


def test_minkowski_spin_connection_vanishes(app, family, rep):
    data = app.services.clifford.spin_connection(family('minkowski', 4), rep(4), [0.1, 0.2, -0.3, 0.4])
    assert np.max(np.abs(data.omega)) == 0.0
    assert data.orthonormality_residual < 1e-12


def test_bump_spin_connection_invariants(app, family, rep):
    data = app.services.clifford.spin_connection(family('conformal_bump', 2, amplitude=0.2), rep(2), [0.0, 0.0])
    assert data.orthonormality_residual < 1e-10
    assert data.compatibility_residual < 1e-8
    assert data.metricity_residual < 1e-8


def test_bump_spin_connection_outside_support(app, family, rep):
    data = app.services.clifford.spin_connection(
        family('conformal_bump', 2, amplitude=0.2, cutoff=2.0), rep(2), [3.0, 0.5])
    assert np.max(np.abs(data.omega)) == 0.0


def test_constant_field_curvature(app, rep):
    clifford = app.services.clifford
    twist = clifford.get_twist(TwistSpec(type='u1', potential='constant_field', params={'field': 0.7}), 2)
    curvature = clifford.twisting_curvature(twist, rep(2), [0.3, -0.2])
    assert curvature.field[0, 1] == pytest.approx(0.7j)
    assert curvature.field[1, 0] == pytest.approx(-0.7j)


def test_gauge_shift_leaves_curvature_unchanged(app, rep):
    clifford = app.services.clifford
    x = [0.3, -0.2]
    plain = clifford.get_twist(TwistSpec(type='u1', potential='gaussian_flux', params={}), 2)
    shifted = clifford.get_twist(TwistSpec(type='u1', potential='gaussian_flux', params={'gauge': 0.4}), 2)
    a = clifford.twisting_curvature(plain, rep(2), x)
    b = clifford.twisting_curvature(shifted, rep(2), x)
    assert np.allclose(a.field, b.field, atol=1e-15)


def test_untwisted_curvature_vanishes(app, rep):
    curvature = app.services.clifford.twisting_curvature(None, rep(4), [0.0] * 4)
    assert not np.any(curvature.contraction)


def test_dirac_of_constant_section_vanishes(app, family, rep):
    clifford = app.services.clifford
    u = clifford.test_section(1.0, 16, 2, [0.0, 0.0], boundary='periodic')
    constant = u.with_values(np.ones_like(u.values))
    result = clifford.dirac_apply(family(), rep(2), constant)
    assert np.max(np.abs(result.values)) < 1e-12


def test_dirac_is_linear(app, family, rep, rng):
    clifford = app.services.clifford
    f, r = family('conformal_bump', 2, amplitude=0.1, cutoff=2.0), rep(2)
    u = clifford.test_section(3.0, 24, 2, [0.0, 0.0])
    w = clifford.test_section(3.0, 24, 2, [0.5, -0.5])
    a, b = 0.3 - 1.2j, 2.0 + 0.1j
    combined = clifford.dirac_apply(f, r, u.with_values(a * u.values + b * w.values)).values
    separate = a * clifford.dirac_apply(f, r, u).values + b * clifford.dirac_apply(f, r, w).values
    assert np.allclose(combined, separate, rtol=0.0, atol=1e-12 * np.max(np.abs(separate)))


def test_dirac_on_plane_wave(app, family, rep):
    clifford = app.services.clifford
    L, m = np.pi, 64
    u = clifford.test_section(L, m, 2, [0.0, 0.0], boundary='periodic')
    k = np.array([2.0, 1.0])
    fiber = np.array([1.0, 0.5j])
    wave = np.exp(1j * u.coordinates() @ k)[..., None] * fiber
    result = clifford.dirac_apply(family(), rep(2), u.with_values(wave)).values

    r = rep(2)
    k_sharp = np.array([k[0], -k[1]])
    symbol = np.sin(k * u.hx) / u.hx
    exact = 1j * np.einsum('...j,ij->...i', wave, r.gamma_of(np.array([symbol[0], -symbol[1]])))
    assert np.allclose(result, exact, atol=1e-12)
    continuum = 1j * np.einsum('...j,ij->...i', wave, r.gamma_of(k_sharp))
    assert np.max(np.abs(result - continuum)) < 0.05


@pytest.mark.slow
def test_bochner_lichnerowicz_second_order(app, family, rep):
    clifford = app.services.clifford
    f, r = family('conformal_bump', 2, amplitude=0.1, width=0.5, cutoff=6.0), rep(2)
    residuals = []
    for hx in (1 / 32, 1 / 64, 1 / 128):
        m = int(round(2.0 / hx))
        u = clifford.test_section(1.0, m, 2, [0.0, 0.0], width=0.25)
        residuals.append(clifford.bochner_lichnerowicz_residual(f, r, u).residual)
    ratios = [a / b for a, b in zip(residuals, residuals[1:])]
    assert all(3.0 <= ratio <= 5.0 for ratio in ratios)


def test_bochner_lichnerowicz_zero_section(app, family, rep):
    clifford = app.services.clifford
    u = clifford.test_section(1.0, 16, 2, [0.0, 0.0])
    zero = u.with_values(np.zeros_like(u.values))
    f = family('conformal_bump', 2, amplitude=0.1, width=0.5)
    assert clifford.bochner_lichnerowicz_residual(f, rep(2), zero).residual == 0.0
