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

from lorentz_zeta.exceptions import InvalidInput, NearSpectrum
from lorentz_zeta.services.contour import branch_power


def random_matrix(rng, size, normal=True):
    values = rng.uniform(-3.0, 3.0, size) + 1j * rng.uniform(-0.25, 0.25, size)
    noise = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    if normal:
        q, _ = np.linalg.qr(noise)
        return (q * values) @ q.conj().T
    v = np.eye(size) + 0.3 * noise / np.sqrt(size)
    return (v * values) @ np.linalg.inv(v)


def assert_close(actual, expected, rtol):
    assert np.max(np.abs(actual - expected)) <= rtol * np.max(np.abs(expected))


@pytest.mark.parametrize('normal', [True, False])
@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.5])
def test_power_matches_eigendecomposition(app, rng, normal, alpha):
    spectral = app.services.spectral
    P = random_matrix(rng, 100, normal)
    assert_close(spectral.complex_power(P, 1.0, alpha), spectral.eigen_power(P, 1.0, alpha), 1e-8)


@pytest.mark.slow
def test_power_matches_eigendecomposition_large(app, rng):
    spectral = app.services.spectral
    P = random_matrix(rng, 100, normal=False)
    assert_close(spectral.complex_power(P, 1.0, 1.5 + 0.5j), spectral.eigen_power(P, 1.0, 1.5 + 0.5j), 1e-8)


def test_power_semigroup(app, rng):
    spectral = app.services.spectral
    P = random_matrix(rng, 20)
    half = spectral.complex_power(P, 1.0, 0.5)
    assert_close(half @ half, spectral.complex_power(P, 1.0, 1.0), 1e-8)


def test_nonpositive_exponents(app, rng):
    spectral = app.services.spectral
    P = random_matrix(rng, 20)
    assert np.array_equal(spectral.complex_power(P, 1.0, 0.0), np.eye(20))
    assert_close(spectral.complex_power(P, 1.0, -1.0), P - 1j * np.eye(20), 1e-8)


def test_vector_mode(app, rng):
    spectral = app.services.spectral
    P = random_matrix(rng, 20)
    v = rng.standard_normal(20) + 0j
    assert_close(spectral.complex_power(P, 1.0, 1.5, vector=v, mode='vector'),
                 spectral.eigen_power(P, 1.0, 1.5) @ v, 1e-8)
    with pytest.raises(InvalidInput):
        spectral.complex_power(P, 1.0, 1.5, mode='vector')
    with pytest.raises(InvalidInput):
        spectral.complex_power(P, 1.0, 1.5, mode='trace')


def test_resolvent_solve_near_spectrum(app):
    spectral = app.services.spectral
    P = np.diag([-1.0, 0.5, 2.0]).astype(complex)
    assert np.allclose(spectral.resolvent_solve(P, 1j, np.ones(3)), 1.0 / (np.diag(P) - 1j))
    with pytest.raises(NearSpectrum):
        spectral.resolvent_solve(P, 0.5, np.ones(3))


@pytest.mark.parametrize('center', [0.5, 2.0])
def test_contour_ambiguity_rank(app, center):
    P = np.diag([-1.0, 0.5, 0.5, 2.0, 2.0, 3.0]).astype(complex)
    P[3, 4] = 1.0
    spectral = app.services.spectral
    spectrum = spectral.spectrum(P)
    first = spectral.default_contour(P, 1.0, [1.5])
    second = app.services.contour.with_loop(first, center, 0.2, spectrum=spectrum)

    report = spectral.contour_ambiguity(P, 1.0, 1.5, first, second)
    assert report.rank == 2
    assert spectral.contour_ambiguity(P, 1.0, 1.5, first, first).rank == 0


@pytest.mark.parametrize('alpha', [0.5, 1.5 + 0.5j])
def test_contour_ambiguity_simple_eigenvalue(app, rng, alpha):
    spectral = app.services.spectral
    values = np.array([-1.0, 0.5, 1.0 - 0.3j, 2.0, 3.0])
    V = np.eye(5) + 0.3 * rng.standard_normal((5, 5)) / np.sqrt(5)
    V_inv = np.linalg.inv(V)
    P = (V * values) @ V_inv
    projector = np.outer(V[:, 2], V_inv[2, :])

    first = spectral.default_contour(P, 1.0, [alpha])
    second = app.services.contour.with_loop(first, values[2], 0.2, spectrum=spectral.spectrum(P))
    report = spectral.contour_ambiguity(P, 1.0, alpha, first, second)

    assert report.rank == 1
    expected = branch_power(values[2] - 1j, alpha) * projector
    assert_close(report.difference, expected, 1e-7)


def test_diagonal_blocks_on_lattice(app, family, rep):
    spectral = app.services.spectral
    P = app.services.lattice.assemble(family(), rep(2), 2.0, 4)
    dense = spectral.eigen_power(P, 1.0, 1.5)
    index = P.node_index([0.0, 0.0])
    expected = dense[2 * index:2 * index + 2, 2 * index:2 * index + 2] / P.weights[index]

    block = spectral.complex_power(P, 1.0, 1.5, mode='diagonal', points=[[0.0, 0.0]])
    assert_close(block[0], expected, 1e-8)

    frame = spectral.zeta_diagonal(P, 1.0, [1.5, 2.5], [[0.0, 0.0], [1.0, 0.0]])
    assert list(frame.columns) == ['alpha_re', 'alpha_im', 'x0', 'x1', 'trace_re', 'trace_im', 'provenance']
    assert len(frame) == 4
    first = frame.iloc[0]
    assert first.trace_re + 1j * first.trace_im == pytest.approx(complex(np.trace(expected)), rel=1e-8)


@pytest.mark.parametrize('im_values', [[0.5, 1.0, 2.0], [4.0, 16.0, 64.0]])
def test_flat_resolvent_decay(app, family, rep, im_values):
    P = app.services.lattice.assemble(family(), rep(2), 2.0, 8)
    rows = app.services.spectral.resolvent_decay_scan(P, im_values, samples=2, seed=7)
    assert [row.im_lambda for row in rows] == im_values
    for row in rows:
        assert 0.99 <= row.product <= 1.0 + 1e-8


def test_decay_scan_rejects_real_axis(app, family, rep):
    P = app.services.lattice.assemble(family(), rep(2), 2.0, 8)
    with pytest.raises(InvalidInput):
        app.services.spectral.resolvent_decay_scan(P, [0.0])


@pytest.mark.slow
def test_bump_resolvent_decay_is_bounded(app, family, rep):
    bump = family('conformal_bump', 2, amplitude=0.05, width=0.5, cutoff=3.0)
    P = app.services.lattice.assemble(bump, rep(2), 4.0, 32)
    rows = app.services.spectral.resolvent_decay_scan(P, [4.0, 16.0, 64.0], samples=2, iterations=30)
    assert max(row.product for row in rows) <= 2.0


def test_resolvent_locality(app, family, rep):
    P = app.services.lattice.assemble(family(), rep(2), 4.0, 32)
    rate = app.services.spectral.resolvent_locality(P, 2j, [0.0, 0.0])
    assert rate > 0.0
    with pytest.raises(InvalidInput):
        app.services.spectral.resolvent_locality(np.eye(4), 2j, [0.0, 0.0])
