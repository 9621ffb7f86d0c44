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


import warnings

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, gmres, spilu, splu

from lorentz_zeta.dto.spectral import AmbiguityReport, DecayRow, LatticeOperator
from lorentz_zeta.exceptions import InvalidInput, NearSpectrum, PoleProximity
from lorentz_zeta.services.contour import CompensatedSum, branch_power
from lorentz_zeta.services.lattice import periodic_distance

DENSE_SPECTRUM_LIMIT = 4096
PIVOT_RATIO = 1e-13
NODE_CHUNK = 64


class Factorization:
    """Solver for (P - z) u = b and its adjoint, built once per shift."""

    def __init__(self, z, solve, adjoint_solve, kind):
        self.z = z
        self._solve = solve
        self._adjoint_solve = adjoint_solve
        self.kind = kind

    def solve(self, rhs, adjoint=False):
        return self._adjoint_solve(rhs) if adjoint else self._solve(rhs)


class SpectralService:
    def __init__(self, app):
        self.app = app

    def _matrix(self, P):
        if isinstance(P, LatticeOperator):
            return P.matrix
        if sp.issparse(P):
            return P.tocsr()
        return np.asarray(P, dtype=complex)

    def _weights(self, P):
        if isinstance(P, LatticeOperator):
            return P.unknown_weights
        return np.ones(self._matrix(P).shape[0])

    def spectrum(self, P):
        """All eigenvalues when the matrix is small enough for a dense solver, otherwise None."""
        matrix = self._matrix(P)
        if matrix.shape[0] > DENSE_SPECTRUM_LIMIT:
            return None
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return np.linalg.eigvals(dense)

    def eigen_power(self, P, epsilon, alpha):
        """(P - i eps)^{-alpha} from an eigendecomposition, for diagonalizable matrices only."""
        matrix = self._matrix(P)
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        values, vectors = np.linalg.eig(dense)
        powers = branch_power(values - 1j * epsilon, complex(alpha))
        return (vectors * powers) @ np.linalg.inv(vectors)

    def spectral_radius(self, P):
        matrix = self._matrix(P)
        if sp.issparse(matrix):
            return float(abs(matrix).sum(axis=1).max())
        return float(np.max(np.abs(np.linalg.eigvals(matrix))))

    # Solves

    def _near_spectrum(self, z, estimate):
        return NearSpectrum(f'z = {z:.6g} is numerically in the spectrum',
                            {'z': [z.real, z.imag], 'estimate': float(estimate)})

    def factorize(self, P, z):
        z = complex(z)
        matrix = self._matrix(P)
        size = matrix.shape[0]

        if not sp.issparse(matrix):
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', LinAlgWarning)
                lu, piv = lu_factor(matrix - z * np.eye(size), check_finite=False)
            pivots = np.abs(np.diag(lu))
            if not np.all(np.isfinite(pivots)) or pivots.min() <= PIVOT_RATIO * pivots.max():
                raise self._near_spectrum(z, pivots.min())
            return Factorization(z, lambda b: lu_solve((lu, piv), b),
                                 lambda b: lu_solve((lu, piv), b, trans=2), 'dense')

        shifted = (matrix - z * sp.identity(size, dtype=complex, format='csr')).tocsc()
        if size <= self.app.config['DIRECT_SOLVE_LIMIT']:
            try:
                lu = splu(shifted)
            except RuntimeError as e:
                raise self._near_spectrum(z, 0.0) from e
            return Factorization(z, lambda b: lu.solve(b), lambda b: lu.solve(b, trans='H'), 'direct')

        flat = P.flat if isinstance(P, LatticeOperator) and P.flat is not None else None
        if flat is not None:
            preconditioner = splu((flat - z * sp.identity(size, dtype=complex, format='csr')).tocsc())
        else:
            preconditioner = spilu(shifted)
        self.app.log.debug(f'Iterative solves at z={z:.4g} with {size} unknowns')

        def iterative(b, adjoint):
            operator = shifted.conj().T.tocsc() if adjoint else shifted
            trans = 'H' if adjoint else 'N'
            M = LinearOperator(shifted.shape, matvec=lambda v: preconditioner.solve(v, trans=trans), dtype=complex)
            columns = b if b.ndim > 1 else b[:, None]
            result = np.empty(columns.shape, dtype=complex)
            for j in range(columns.shape[1]):
                result[:, j], info = gmres(operator, columns[:, j], M=M, rtol=1e-2 * self.app.config['TOL_SOLVE'],
                                           atol=0.0, restart=50, maxiter=200)
                if info != 0:
                    raise self._near_spectrum(z, info)
            return result if b.ndim > 1 else result[:, 0]

        return Factorization(z, lambda b: iterative(b, False), lambda b: iterative(b, True), 'iterative')

    def _certify(self, P, factorization, rhs, u, tol, adjoint=False):
        matrix = self._matrix(P)
        z = factorization.z
        if adjoint:
            applied = matrix.conj().T @ u - np.conj(z) * u
        else:
            applied = matrix @ u - z * u
        scale = np.linalg.norm(rhs)
        residual = float(np.linalg.norm(applied - rhs) / scale) if scale > 0.0 else float(np.linalg.norm(applied))
        if not np.isfinite(residual) or residual > tol:
            raise self._near_spectrum(z, residual)
        return residual

    def resolvent_solve(self, P, z, rhs, tol=None, factorization=None):
        """u = (P - z)^{-1} rhs with a certified relative residual."""
        tol = tol or self.app.config['TOL_SOLVE']
        rhs = np.asarray(rhs, dtype=complex)
        factorization = factorization or self.factorize(P, z)
        u = factorization.solve(rhs)
        residual = self._certify(P, factorization, rhs, u, tol)
        self.app.log.debug(f'Resolvent solve at z={complex(z):.4g}: residual {residual:.2e}')
        return u

    # Complex powers

    def _power_shift(self, alpha):
        """Smallest m >= 0 with Re(alpha + m) > 0."""
        alpha = complex(alpha)
        return 0 if alpha.real > 0.0 else int(np.floor(-alpha.real)) + 1

    def default_contour(self, P, epsilon, alphas, contour=None):
        if contour is not None:
            return contour
        spec = self.app.config['CONTOUR']
        alpha_min = min(complex(a).real + self._power_shift(a) for a in alphas)
        spectrum = self.spectrum(P)
        radius = None if spectrum is not None else self.spectral_radius(P)
        return self.app.services.contour.build_contour(
            epsilon, spec.theta, spec.rtrunc, spec.nodes_per_unit, alpha_min=alpha_min, spectrum=spectrum,
            spectral_radius=radius)

    def _node_solves(self, P, contour, rhs):
        """(z_j, w_j, (P - z_j)^{-1} rhs) in node order, solved in parallel chunks."""
        def solve(node):
            return self.resolvent_solve(P, node, rhs)

        nodes = list(contour.nodes)
        for start in range(0, len(nodes), NODE_CHUNK):
            chunk = nodes[start:start + NODE_CHUNK]
            solutions = self.app.clients.pool.map(solve, chunk)
            for z, w, u in zip(chunk, contour.weights[start:start + NODE_CHUNK], solutions):
                yield z, w, u

    def _contour_sums(self, P, epsilon, alphas, rhs, contour):
        """(P - i eps)^{-alpha} rhs for every alpha from one pass over the contour."""
        shift = 1j * epsilon
        if np.any(np.abs(contour.nodes - shift) < 1e-12):
            raise PoleProximity('A contour node sits on the branch point i epsilon', {'epsilon': epsilon})

        shifts = [self._power_shift(a) for a in alphas]
        exponents = [complex(a) + m for a, m in zip(alphas, shifts)]
        accumulators = [CompensatedSum() for _ in alphas]
        needed = [i for i, a in enumerate(alphas) if complex(a) != 0.0]

        if needed:
            for z, w, u in self._node_solves(P, contour, rhs):
                for i in needed:
                    accumulators[i].add(w * branch_power(z - shift, exponents[i]) * u)

        matrix = self._matrix(P)
        results = []
        for i, alpha in enumerate(alphas):
            if complex(alpha) == 0.0:
                results.append(np.array(rhs, dtype=complex))
                continue
            value = accumulators[i].value / (2j * np.pi)
            for _ in range(shifts[i]):
                value = matrix @ value - shift * value
            results.append(value)
        return results

    def complex_power(self, P, epsilon, alpha, contour=None, vector=None, mode='matrix', points=None):
        """(P - i eps)^{-alpha} from the resolvent integrated along the contour.

        `mode` is 'matrix' for the full (dense) power, 'vector' for its action on
        `vector`, and 'diagonal' for the (x, x) blocks at `points` divided by the volume element."""
        contour = self.default_contour(P, epsilon, [alpha], contour)
        size = self._matrix(P).shape[0]
        if mode == 'matrix':
            if size > DENSE_SPECTRUM_LIMIT:
                raise InvalidInput('The dense power is only formed for small matrices', {'unknowns': size})
            return self._contour_sums(P, epsilon, [alpha], np.eye(size, dtype=complex), contour)[0]
        if mode == 'vector':
            if vector is None:
                raise InvalidInput('Vector mode needs a vector to act on')
            return self._contour_sums(P, epsilon, [alpha], np.asarray(vector, dtype=complex), contour)[0]
        if mode == 'diagonal':
            return self.diagonal_blocks(P, epsilon, [alpha], points, contour)[0]
        raise InvalidInput(f'Unknown complex power mode {mode!r}', {'mode': mode})

    def _point_unknowns(self, P, points):
        if not isinstance(P, LatticeOperator):
            indices = np.atleast_1d(np.asarray(points, dtype=int))
            return indices, 1
        nodes = np.array([P.node_index(x) for x in np.atleast_2d(points)])
        return (nodes[:, None] * P.rank + np.arange(P.rank)[None, :]).ravel(), P.rank

    def diagonal_blocks(self, P, epsilon, alphas, points, contour=None):
        """(x, x) fiber blocks of (P - i eps)^{-alpha} divided by the volume element, per alpha."""
        contour = self.default_contour(P, epsilon, alphas, contour)
        unknowns, rank = self._point_unknowns(P, points)
        size = self._matrix(P).shape[0]
        rhs = np.zeros((size, len(unknowns)), dtype=complex)
        rhs[unknowns, np.arange(len(unknowns))] = 1.0

        weights = self._weights(P)[unknowns[::rank]]
        count = len(unknowns) // rank
        blocks = []
        for columns in self._contour_sums(P, epsilon, alphas, rhs, contour):
            selected = columns[unknowns].reshape(count, rank, count, rank)
            diagonal = np.stack([selected[p, :, p, :] for p in range(count)])
            blocks.append(diagonal / weights[:, None, None])
        return blocks

    def zeta_diagonal(self, P, epsilon, alphas, points, contour=None):
        """Fiber traces of the on-diagonal kernel of (P - i eps)^{-alpha} as a table."""
        blocks = self.diagonal_blocks(P, epsilon, alphas, points, contour)
        points = np.atleast_2d(points) if isinstance(P, LatticeOperator) else np.atleast_1d(points)[:, None]
        rows = []
        for alpha, block in zip(alphas, blocks):
            alpha = complex(alpha)
            for x, value in zip(points, np.trace(block, axis1=1, axis2=2)):
                row = {'alpha_re': alpha.real, 'alpha_im': alpha.imag}
                row.update({f'x{i}': float(c) for i, c in enumerate(x)})
                row.update({'trace_re': value.real, 'trace_im': value.imag, 'provenance': 'contour'})
                rows.append(row)
        self.app.log.info(f'Zeta densities at {len(points)} points for {len(alphas)} exponents')
        return pd.DataFrame(rows)

    def contour_ambiguity(self, P, epsilon, alpha, contour_a, contour_b):
        """The difference of the powers along two contours and its numerical rank."""
        first = self.complex_power(P, epsilon, alpha, contour_a)
        second = self.complex_power(P, epsilon, alpha, contour_b)
        difference = second - first
        singular = np.linalg.svd(difference, compute_uv=False)
        floor = 1e-9 * max(1.0, float(np.linalg.norm(first, 2)))
        rank = 0 if singular[0] <= floor else int(np.sum(singular > 1e-8 * singular[0]))
        self.app.log.info(f'Contour ambiguity has rank {rank}, norm {singular[0]:.3e}')
        return AmbiguityReport(difference=difference, rank=rank, norm=float(singular[0]), singular_values=singular)

    # Resolvent estimates

    def resolvent_decay_scan(self, P, im_values, samples=4, seed=0, iterations=100):
        """|Im lambda| times the weighted 2-norm of (P - lambda)^{-1}, estimated by power iteration."""
        root = np.sqrt(self._weights(P))
        size = len(root)
        streams = np.random.SeedSequence(seed).spawn(len(im_values))
        rows = []
        for im, stream in zip(im_values, streams):
            if im <= 0.0:
                raise InvalidInput('Decay scans need Im lambda > 0', {'im_lambda': im})
            lam = 1j * im
            factorization = self.factorize(P, lam)
            rng = np.random.Generator(np.random.Philox(stream))

            def apply(v):
                return root * factorization.solve(v / root)

            def apply_adjoint(v):
                return factorization.solve(v * root, adjoint=True) / root

            best = 0.0
            for _ in range(samples):
                v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
                v /= np.linalg.norm(v)
                estimate = 0.0
                for _ in range(iterations):
                    y = apply_adjoint(apply(v))
                    current = float(np.sqrt(abs(np.vdot(v, y))))
                    v = y / np.linalg.norm(y)
                    if abs(current - estimate) <= 1e-12 * current:
                        estimate = current
                        break
                    estimate = current
                best = max(best, estimate)
            rows.append(DecayRow(im_lambda=float(im), norm=best, product=float(im * best)))
            self.app.log.info(f'|Im lambda| ||(P - lambda)^-1|| = {im * best:.8f} at Im lambda = {im:g}')
        return rows

    def resolvent_locality(self, P, z, source):
        """Exponential decay rate of |(P - z)^{-1} delta_source| with the distance to the source."""
        if not isinstance(P, LatticeOperator):
            raise InvalidInput('Locality estimates need a lattice operator')
        node = P.node_index(source)
        rhs = np.zeros(P.unknowns, dtype=complex)
        rhs[node * P.rank] = 1.0
        u = self.resolvent_solve(P, z, rhs)

        magnitude = np.linalg.norm(u.reshape(-1, P.rank), axis=1)
        coordinates = P.coordinates()
        distance = periodic_distance(coordinates, coordinates[node], P.L)
        shells = np.rint(distance / P.hx).astype(int)
        radii, envelope = [], []
        for shell in range(1, int(shells.max()) + 1):
            inside = shells == shell
            if np.any(inside) and shell * P.hx <= 0.5 * P.L:
                radii.append(shell * P.hx)
                envelope.append(np.max(magnitude[inside]))
        rate = -float(np.polyfit(radii, np.log(envelope), 1)[0])
        self.app.log.debug(f'Resolvent at z={complex(z):.4g} decays at rate {rate:.4f}')
        return rate
