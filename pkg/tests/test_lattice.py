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

from lorentz_zeta.exceptions import ConfigError, InvalidInput
from lorentz_zeta.services.lattice import flat_symbol

BUMP = {'width': 0.5, 'cutoff': 3.0}


@pytest.fixture
def assemble(app, family, rep):
    def get(name='minkowski', dimension=2, L=2.0, m=8, provenance='dirac-squared', **params):
        return app.services.lattice.assemble(family(name, dimension, **params), rep(dimension), L, m,
                                             provenance=provenance)
    return get


@pytest.mark.parametrize('dimension, m', [(2, 8), (4, 4)])
def test_flat_plane_waves_are_eigenvectors(app, assemble, rng, dimension, m):
    P = assemble(dimension=dimension, m=m)
    lattice = app.services.lattice
    for modes in ([0] * dimension, [1] + [0] * (dimension - 1), list(range(1, dimension + 1))):
        k = np.pi / P.L * np.asarray(modes, dtype=float)
        fiber = rng.standard_normal(P.rank) + 1j * rng.standard_normal(P.rank)
        u = lattice.plane_wave(P, k, fiber)
        expected = flat_symbol(k, P.hx) * u
        assert np.allclose(P.matrix @ u, expected, atol=1e-10 * max(1.0, abs(flat_symbol(k, P.hx))))


def test_flat_symbol_values():
    assert flat_symbol([0.0, 0.0], 0.5) == 0.0
    assert flat_symbol([1.0, 1.0], 0.5) == pytest.approx(0.0, abs=1e-14)
    assert flat_symbol([np.pi, 0.0], 0.5) == pytest.approx(-16.0 * np.sin(np.pi / 4) ** 2)


def test_operator_layout(assemble):
    P = assemble(m=8)
    stats = P.stats()
    assert stats['unknowns'] == 8 * 8 * 2
    assert stats['max_row_nnz'] <= 9 * 2
    assert P.node_index([-2.0, -2.0]) == 0
    assert P.node_index([0.0, 0.0]) == 4 * 8 + 4
    assert np.allclose(P.coordinates()[P.node_index([0.5, -1.0])], [0.5, -1.0])


def test_flat_operator_is_self_adjoint(app, assemble):
    defect = app.services.lattice.adjoint_defect(assemble())
    assert defect.norm == 0.0
    assert defect.outside_max == 0.0


def test_wave_scalar_matches_on_flat_space(assemble):
    dirac = assemble(m=6)
    wave = assemble(m=6, provenance='wave-scalar')
    assert wave.provenance == 'wave-scalar'
    assert np.allclose(wave.matrix.toarray(), dirac.matrix.toarray(), atol=1e-12)


def test_adjoint_defect_is_linear_in_amplitude(app, assemble):
    norms = [app.services.lattice.adjoint_defect(assemble('conformal_bump', m=16, amplitude=a, **BUMP)).norm
             for a in (0.01, 0.02, 0.04)]
    assert norms[0] > 0.0
    assert norms[1] / norms[0] == pytest.approx(2.0, abs=0.15)
    assert norms[2] / norms[1] == pytest.approx(2.0, abs=0.15)


def test_adjoint_defect_support(app, assemble):
    P = assemble('conformal_bump', m=16, amplitude=0.05, **BUMP)
    defect = app.services.lattice.adjoint_defect(P, outside=1.5 + 2.0 * P.hx)
    assert defect.norm > 0.0
    assert defect.outside_max <= 1e-10
    assert defect.support_radius <= 1.5 + 2.0 * P.hx


def test_rejects_unbounded_perturbation(assemble):
    with pytest.raises(ConfigError):
        assemble('warped')


def test_rejects_perturbation_leaving_the_box(assemble):
    with pytest.raises(ConfigError):
        assemble('conformal_bump', L=2.0)


def test_rejects_coarse_grid(assemble):
    with pytest.raises(ConfigError):
        assemble(m=3)


def test_rejects_unknown_provenance(assemble):
    with pytest.raises(InvalidInput):
        assemble(provenance='laplacian')
