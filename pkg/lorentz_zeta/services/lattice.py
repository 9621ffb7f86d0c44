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


import itertools

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from lorentz_zeta.dto.spectral import AdjointDefect, LatticeOperator
from lorentz_zeta.exceptions import ConfigError, InvalidInput
from lorentz_zeta.services.geometry import fd_gradient

PROVENANCES = ('dirac-squared', 'wave-scalar')
CHUNK = 2048


def flat_symbol(k, hx):
    """Discrete symbol of the flat compact stencil for the plane wave exp(i k.x)."""
    k = np.asarray(k, dtype=float)
    s = np.sin(0.5 * k * hx) ** 2
    return -4.0 / hx ** 2 * (s[..., 0] - np.sum(s[..., 1:], axis=-1))


def periodic_distance(points, center, L):
    offset = np.asarray(points) - np.asarray(center)
    offset = (offset + L) % (2.0 * L) - L
    return np.sqrt(np.sum(offset ** 2, axis=-1))


class LatticeService:
    def __init__(self, app):
        self.app = app

    @property
    def clifford(self):
        return self.app.services.clifford

    @property
    def geometry(self):
        return self.app.services.geometry

    def _check_box(self, family, L, m):
        radius = family.perturbation_radius
        if not np.isfinite(radius) or radius >= L:
            raise ConfigError(
                f'{family!r} is not supported strictly inside the box [-{L}, {L}]',
                {'perturbation_radius': float(radius), 'L': L})
        if m < 4:
            raise ConfigError(f'Grid needs at least 4 nodes per side, got {m}', {'m': m})
        hx = 2.0 * L / m
        if 0.0 < radius and hx > radius / 4:
            self.app.log.warning(f'Grid spacing {hx:.3g} barely resolves the perturbation radius {radius:.3g}')

    def _neighbours(self, m, n, offset):
        index = np.arange(m ** n).reshape((m,) * n)
        return np.roll(index, tuple(-np.asarray(offset)), axis=tuple(range(n))).ravel()

    def _block_matrix(self, m, n, rank, blocks):
        """Sparse matrix from per-node N x N coefficient blocks keyed by node offset."""
        nodes = np.arange(m ** n)
        fiber = np.arange(rank)
        rows, cols, data = [], [], []
        for offset, block in blocks.items():
            neighbour = self._neighbours(m, n, offset)
            r = nodes[:, None, None] * rank + fiber[None, :, None]
            c = neighbour[:, None, None] * rank + fiber[None, None, :]
            shape = block.shape
            rows.append(np.broadcast_to(r, shape).ravel())
            cols.append(np.broadcast_to(c, shape).ravel())
            data.append(block.ravel())
        size = m ** n * rank
        matrix = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                               shape=(size, size)).tocsr()
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        return matrix

    def _first_order_terms(self, family, rep, x, twist):
        """B^nu and C_0 of D^2 = -g^{mu nu} d_mu d_nu + B^nu d_nu + C_0 at the points `x`."""
        step = self.app.config['FD_STEP']
        count = len(x)
        b = np.zeros((count, rep.dimension, rep.rank, rep.rank), dtype=complex)
        c0 = np.zeros((count, rep.rank, rep.rank), dtype=complex)

        active = np.ones(count, dtype=bool) if twist is not None else ~family.is_flat_at(x, margin=4.0 * step)
        indices = np.flatnonzero(active)

        def gammas(p):
            return self.clifford.curved_gammas(rep, self.geometry.vielbein(family, p))

        def connection(p):
            return self.clifford.connection_field(family, rep, p, twist)[3]

        for start in range(0, len(indices), CHUNK):
            chunk = indices[start:start + CHUNK]
            points = x[chunk]
            upper = gammas(points)
            omega = connection(points)
            d_upper = fd_gradient(gammas, points, step)
            d_omega = fd_gradient(connection, points, step)

            contracted = np.einsum('pnij,pnjk->pik', upper, omega)
            b[chunk] = (np.einsum('pmij,pmnjk->pnik', upper, d_upper)
                        + np.einsum('pnij,pjk->pnik', upper, contracted)
                        + np.einsum('pij,pnjk->pnik', contracted, upper))
            c0[chunk] = (np.einsum('pmij,pmnjk,pnkl->pil', upper, d_upper, omega)
                         + np.einsum('pmij,pnjk,pmnkl->pil', upper, upper, d_omega)
                         + np.einsum('pij,pjk->pik', contracted, contracted))
        self.app.log.debug(f'First order Dirac terms evaluated at {len(indices)} of {count} nodes')
        return b, c0

    def _dirac_squared_blocks(self, family, rep, x, hx, twist):
        n, rank = rep.dimension, rep.rank
        ginv = np.linalg.inv(family.metric(x))
        identity = np.eye(rank)
        b, c0 = self._first_order_terms(family, rep, x, twist)
        eye = np.eye(n, dtype=int)

        blocks = {}
        center = -2.0 * np.einsum('pmm->p', ginv)[:, None, None] * identity / hx ** 2 - c0
        blocks[(0,) * n] = center
        for mu in range(n):
            for sign in (1, -1):
                blocks[tuple(sign * eye[mu])] = (ginv[:, mu, mu, None, None] * identity / hx ** 2
                                                 - sign * b[:, mu] / (2.0 * hx))
        for mu, nu in itertools.combinations(range(n), 2):
            for s1, s2 in itertools.product((1, -1), repeat=2):
                blocks[tuple(s1 * eye[mu] + s2 * eye[nu])] = (
                    s1 * s2 * ginv[:, mu, nu, None, None] * identity / (2.0 * hx ** 2)).astype(complex)
        return blocks

    def _wave_scalar_blocks(self, family, rep, x, hx):
        n, rank = rep.dimension, rep.rank
        identity = np.eye(rank)
        eye = np.eye(n, dtype=int)
        sqrt_det = np.sqrt(np.abs(np.linalg.det(family.metric(x))))

        def density_inverse(points):
            g = family.metric(points)
            return np.sqrt(np.abs(np.linalg.det(g)))[..., None, None] * np.linalg.inv(g)

        blocks = {(0,) * n: np.zeros((len(x), rank, rank), dtype=complex)}

        def add(offset, values):
            key = tuple(offset)
            blocks.setdefault(key, np.zeros((len(x), rank, rank), dtype=complex))
            blocks[key] += (values / sqrt_det)[:, None, None] * identity

        for mu in range(n):
            plus = density_inverse(x + 0.5 * hx * eye[mu])[:, mu, mu] / hx ** 2
            minus = density_inverse(x - 0.5 * hx * eye[mu])[:, mu, mu] / hx ** 2
            add(eye[mu], plus)
            add(-eye[mu], minus)
            add(np.zeros(n, dtype=int), -(plus + minus))

        shifted = {}
        for mu, nu in itertools.permutations(range(n), 2):
            for sign in (1, -1):
                if (mu, sign) not in shifted:
                    shifted[(mu, sign)] = density_inverse(x + sign * hx * eye[mu])
                a = shifted[(mu, sign)][:, mu, nu] / (4.0 * hx ** 2)
                add(sign * eye[mu] + eye[nu], sign * a)
                add(sign * eye[mu] - eye[nu], -sign * a)
        return blocks

    def assemble(self, family, rep, L, m, twist=None, provenance='dirac-squared'):
        """Assemble P = -D^2 on the periodic box with compact second differences."""
        if provenance not in PROVENANCES:
            raise InvalidInput(f'Unknown assembly provenance {provenance!r}', {'provenance': provenance})
        if family.dimension != rep.dimension:
            raise InvalidInput('Metric family and representation dimensions differ',
                               {'family': family.dimension, 'representation': rep.dimension})
        self._check_box(family, L, m)

        n = rep.dimension
        hx = 2.0 * L / m
        axis = -L + hx * np.arange(m)
        x = np.stack(np.meshgrid(*([axis] * n), indexing='ij'), axis=-1).reshape(-1, n)

        if provenance == 'dirac-squared':
            blocks = self._dirac_squared_blocks(family, rep, x, hx, twist)
        else:
            blocks = self._wave_scalar_blocks(family, rep, x, hx)
        matrix = self._block_matrix(m, n, rep.rank, blocks)

        sqrt_det = np.sqrt(np.abs(np.linalg.det(family.metric(x))))
        flat_family = self.app.services.metric.get_family('minkowski', n)
        flat = matrix if family.is_flat_everywhere() and twist is None else self._block_matrix(
            m, n, rep.rank, self._dirac_squared_blocks(flat_family, rep, x, hx, None))

        operator = LatticeOperator(L=L, m=m, dimension=n, rank=rep.rank, matrix=matrix, provenance=provenance,
                                   family=repr(family), weights=sqrt_det * hx ** n, flat=flat)
        stats = operator.stats()
        self.app.log.info(f"Assembled {provenance} operator with {stats['unknowns']} unknowns, "
                          f"{stats['nnz']} nonzeros, at most {stats['max_row_nnz']} per row")
        return operator

    def adjoint(self, operator):
        """P* with respect to the weighted inner product sum w |u|^2."""
        w = operator.unknown_weights
        return sp.diags(1.0 / w) @ operator.matrix.conj().T @ sp.diags(w)

    def adjoint_defect(self, operator, outside=None):
        defect = (operator.matrix - self.adjoint(operator)).tocsr()
        scale = float(np.max(np.abs(operator.matrix.data))) if operator.matrix.nnz else 1.0
        defect.data[np.abs(defect.data) <= 1e-12 * scale] = 0.0
        defect.eliminate_zeros()

        if defect.nnz == 0:
            return AdjointDefect(norm=0.0, max_entry=0.0, support_radius=0.0, outside_max=0.0)

        rows = np.repeat(np.arange(defect.shape[0]), np.diff(defect.indptr))
        radii = np.linalg.norm(operator.coordinates(), axis=1)[rows // operator.rank]
        magnitudes = np.abs(defect.data)
        if outside is None:
            outside = np.inf
        outside_max = float(np.max(magnitudes[radii > outside], initial=0.0))

        if min(defect.shape) <= 512:
            norm = float(np.linalg.norm(defect.toarray(), 2))
        else:
            v0 = np.ones(defect.shape[0]) / np.sqrt(defect.shape[0])
            norm = float(svds(defect, k=1, v0=v0, return_singular_vectors=False)[0])
        self.app.log.info(f'Adjoint defect norm {norm:.3e}, supported within radius {radii.max():.4g}')
        return AdjointDefect(norm=norm, max_entry=float(magnitudes.max()), support_radius=float(radii.max()),
                             outside_max=outside_max)

    def plane_wave(self, operator, k, fiber=None):
        """exp(i k.x) tensored with a fiber vector, in unknown order."""
        fiber = np.eye(operator.rank)[0] if fiber is None else np.asarray(fiber)
        phase = np.exp(1j * operator.coordinates() @ np.asarray(k, dtype=float))
        return np.kron(phase, fiber)
