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

from lorentz_zeta.dto.clifford import (BochnerLichnerowiczResidual, CliffordRep, ConnectionData,
                                       PositivityReport, SectionGrid, TwistCurvature)
from lorentz_zeta.exceptions import ConfigError, InvalidInput, Unsupported
from lorentz_zeta.services.geometry import christoffel, fd_gradient

VIELBEIN_STEP = 1e-3


def shift(values, axis, offset, boundary):
    """Values at node j + offset along `axis`, wrapped or padded with zeros."""
    if boundary == 'periodic':
        return np.roll(values, -offset, axis=axis)
    out = np.zeros_like(values)
    source = [slice(None)] * values.ndim
    target = [slice(None)] * values.ndim
    if offset > 0:
        source[axis], target[axis] = slice(offset, None), slice(0, -offset)
    else:
        source[axis], target[axis] = slice(0, offset), slice(-offset, None)
    out[tuple(target)] = values[tuple(source)]
    return out


def central_difference(values, axis, hx, boundary):
    return (shift(values, axis, 1, boundary) - shift(values, axis, -1, boundary)) / (2.0 * hx)


class AbstractTwistPotential:
    """A u(1) connection A_mu(x), purely imaginary, with an optional gauge term i d chi."""

    def __init__(self, dimension, gauge=0.0, **params):
        self.dimension = dimension
        self.gauge = gauge
        self.params = dict(params, gauge=gauge)

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in sorted(self.params.items()))
        return f'{type(self).__name__}({params})'

    def base_potential(self, x):
        raise NotImplementedError

    def base_d_potential(self, x):
        raise NotImplementedError

    def potential(self, x):
        """A_mu(x), shape (..., n)."""
        x = np.asarray(x, dtype=float)
        return self.base_potential(x) + 1j * self.gauge * np.cos(x)

    def d_potential(self, x):
        """d_k A_nu(x), shape (..., n, n) with k first."""
        x = np.asarray(x, dtype=float)
        gauge = -1j * self.gauge * np.sin(x)[..., :, None] * np.eye(self.dimension)
        return self.base_d_potential(x) + gauge


class ConstantFieldPotential(AbstractTwistPotential):
    """A_1 = i c x_0, so that F_01 = i c everywhere."""

    def __init__(self, dimension, field=0.5, gauge=0.0):
        super().__init__(dimension, gauge=gauge, field=field)
        self.field = field

    def base_potential(self, x):
        result = np.zeros(x.shape, dtype=complex)
        result[..., 1] = 1j * self.field * x[..., 0]
        return result

    def base_d_potential(self, x):
        result = np.zeros(x.shape + (self.dimension,), dtype=complex)
        result[..., 0, 1] = 1j * self.field
        return result


class GaussianFluxPotential(AbstractTwistPotential):
    """A_1 = i b x_0 exp(-|x|^2 / s^2), a localized field strength."""

    def __init__(self, dimension, amplitude=0.5, width=1.0, gauge=0.0):
        super().__init__(dimension, gauge=gauge, amplitude=amplitude, width=width)
        self.amplitude = amplitude
        self.width = width

    def _envelope(self, x):
        return self.amplitude * np.exp(-np.sum(x * x, axis=-1) / self.width ** 2)

    def base_potential(self, x):
        result = np.zeros(x.shape, dtype=complex)
        result[..., 1] = 1j * x[..., 0] * self._envelope(x)
        return result

    def base_d_potential(self, x):
        result = np.zeros(x.shape + (self.dimension,), dtype=complex)
        envelope = self._envelope(x)
        for k in range(self.dimension):
            delta = 1.0 if k == 0 else 0.0
            result[..., k, 1] = 1j * envelope * (delta - 2.0 * x[..., k] * x[..., 0] / self.width ** 2)
        return result


class CliffordService:
    def __init__(self, app):
        self.app = app

        self.potentials = {
            'constant_field': ConstantFieldPotential,
            'gaussian_flux': GaussianFluxPotential
        }

    @property
    def geometry(self):
        return self.app.services.geometry

    def build_gamma(self, n, twist_rank=1):
        if n % 2:
            raise Unsupported(f'Clifford modules are only built in even dimension, got {n}')
        if n not in (2, 4):
            raise Unsupported(f'Clifford modules are built for n = 2 and n = 4, got {n}')
        if twist_rank < 1:
            raise InvalidInput(f'The twist rank must be positive, got {twist_rank}')

        a = np.array([[0, 1], [-1, 0]], dtype=complex)
        b = np.array([[0, 1], [1, 0]], dtype=complex)
        c = a @ b
        if n == 2:
            gammas = [a, b]
        else:
            identity = np.eye(2)
            sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
            sigma_y = np.array([[0, -1j], [1j, 0]], dtype=complex)
            gammas = [np.kron(a, identity), np.kron(b, identity), np.kron(c, sigma_x), np.kron(c, sigma_y)]

        twist = np.eye(twist_rank)
        gammas = np.array([np.kron(gamma, twist) for gamma in gammas])
        return CliffordRep(dimension=n, twist_rank=twist_rank, gammas=gammas, beta=1j * gammas[0])

    def clifford_residuals(self, rep):
        """Largest deviation from the Clifford relations and the conditions on beta."""
        n = rep.dimension
        eta = np.diag(rep.signs)
        anticommutator = (np.einsum('aij,bjk->abik', rep.gammas, rep.gammas)
                          + np.einsum('bij,ajk->abik', rep.gammas, rep.gammas))
        relation = anticommutator + 2.0 * eta[:, :, None, None] * rep.identity
        adjoint = np.array([g.conj().T @ rep.beta + rep.beta @ g for g in rep.gammas])
        return {
            'clifford': float(np.max(np.abs(relation))),
            'beta_hermitian': float(np.max(np.abs(rep.beta - rep.beta.conj().T))),
            'beta_skew': float(np.max(np.abs(adjoint))),
            'positivity': self.check_positivity(rep, np.eye(n)[rep.e_index]).min_eigenvalue
        }

    def check_positivity(self, rep, e_vector):
        e_vector = np.asarray(e_vector, dtype=float)
        if e_vector @ (rep.signs * e_vector) <= 0.0:
            raise InvalidInput('The vector is not timelike', {'e': e_vector.tolist()})

        form = 1j * rep.beta @ rep.gamma_of(e_vector)
        eigenvalues = np.linalg.eigvalsh(0.5 * (form + form.conj().T))
        return PositivityReport(positive=bool(eigenvalues[0] > 0.0), min_eigenvalue=float(eigenvalues[0]))

    def get_twist(self, spec, dimension):
        if spec is None:
            return None

        potential = self.potentials.get(spec.potential, None)

        if potential is None:
            raise ConfigError(f'No twist potential exists with the name {spec.potential!r}')

        return potential(dimension, **spec.params)

    def connection_field(self, family, rep, x, twist=None):
        """Frame, coframe, spin coefficients omega_mu^a_b and Omega_mu over points (..., n).

        Omega_mu = -1/4 omega_{mu ab} gamma^a gamma^b with
        omega_mu^a_b = E^a_nu (d_mu e_b^nu + Gamma^nu_{mu lambda} e_b^lambda),
        plus A_mu times the identity when twisted."""
        x = np.asarray(x, dtype=float)
        frame = self.geometry.vielbein(family, x)
        coframe = self.geometry.coframe(family, x, frame)
        d_frame = fd_gradient(lambda p: self.geometry.vielbein(family, p), x, VIELBEIN_STEP)
        g, dg, _, _ = self.geometry.metric_derivatives(family, x)
        gamma = christoffel(np.linalg.inv(g), dg)

        nabla = d_frame + np.einsum('...nml,...lb->...mnb', gamma, frame)
        mixed = np.einsum('...an,...mnb->...mab', coframe, nabla)
        lowered = rep.signs[:, None] * mixed
        omega = -0.25 * np.einsum('...mab,aij,bjk->...mik', lowered, rep.gammas_upper, rep.gammas_upper)

        if twist is not None:
            omega = omega + twist.potential(x)[..., :, None, None] * rep.identity
        return frame, coframe, mixed, omega

    def spin_connection(self, family, rep, x, twist=None):
        x = np.asarray(x, dtype=float)
        frame, coframe, mixed, omega = self.connection_field(family, rep, x)

        g = family.metric(x)
        orthonormality = np.einsum('ma,mn,nb->ab', frame, g, frame) - np.diag(rep.signs)
        commutator = (np.einsum('mij,bjk->mbik', omega, rep.gammas)
                      - np.einsum('bij,mjk->mbik', rep.gammas, omega))
        compatibility = commutator - np.einsum('mab,aik->mbik', mixed, rep.gammas)

        potential = twist.potential(x) if twist is not None else None
        twisted = omega if potential is None else omega + potential[:, None, None] * rep.identity
        metricity = (np.einsum('mji,jk->mik', twisted.conj(), rep.beta)
                     + np.einsum('ij,mjk->mik', rep.beta, twisted))

        return ConnectionData(
            x=x,
            frame=frame,
            coframe=coframe,
            spin_coefficients=mixed,
            omega=omega,
            twist_potential=potential,
            orthonormality_residual=float(np.max(np.abs(orthonormality))),
            compatibility_residual=float(np.max(np.abs(compatibility))),
            metricity_residual=float(np.max(np.abs(metricity))))

    def curved_gammas(self, rep, frame):
        """gamma^mu = gamma^b e_b^mu over points, shape (..., n, N, N)."""
        return np.einsum('...nb,bij->...nij', frame, rep.gammas_upper)

    def twisting_curvature(self, twist, rep, x, family=None):
        x = np.asarray(x, dtype=float)
        n = rep.dimension
        if twist is None:
            zero = np.zeros((rep.rank, rep.rank), dtype=complex)
            return TwistCurvature(x=x, field=np.zeros((n, n), dtype=complex), contraction=zero,
                                  contraction_lower=zero.copy())

        d_potential = twist.d_potential(x)
        field = d_potential - d_potential.T
        frame = np.eye(n) if family is None else self.geometry.vielbein(family, x)
        upper = self.curved_gammas(rep, frame)
        contraction = 0.5 * np.einsum('mij,njk,mn->ik', upper, upper, field)
        frame_field = np.einsum('ma,nb,mn->ab', frame, frame, field)
        contraction_lower = 0.5 * np.einsum('aij,bjk,ab->ik', rep.gammas, rep.gammas, frame_field)
        return TwistCurvature(x=x, field=field, contraction=contraction, contraction_lower=contraction_lower)

    def twist_contraction_field(self, twist, rep, frame, x):
        """1/2 gamma^mu gamma^nu F_{mu nu} over points (..., n)."""
        d_potential = twist.d_potential(x)
        field = d_potential - np.swapaxes(d_potential, -1, -2)
        upper = self.curved_gammas(rep, frame)
        return 0.5 * np.einsum('...mij,...njk,...mn->...ik', upper, upper, field)

    def test_section(self, L, m, rank, center, width=0.25, boundary='zero'):
        """A smooth Gaussian times polynomial section, centered at `center`."""
        n = len(center)
        grid = SectionGrid(L=L, m=m, values=np.zeros((m,) * n + (rank,), dtype=complex), boundary=boundary)
        offset = grid.coordinates() - np.asarray(center, dtype=float)
        envelope = np.exp(-np.sum(offset ** 2, axis=-1) / width ** 2)
        polynomial = 1.0 + 0.5 * offset[..., 0] - 0.25 * offset[..., -1] ** 2
        fiber = np.exp(0.5j * np.arange(rank)) / np.sqrt(rank)
        return grid.with_values((envelope * polynomial)[..., None] * fiber)

    def _check_section(self, family, rep, u):
        if u.rank != rep.rank or u.dimension != rep.dimension or family.dimension != rep.dimension:
            raise InvalidInput(
                'Section, representation and metric family do not match',
                {'section_rank': u.rank, 'fiber_rank': rep.rank, 'section_dimension': u.dimension,
                 'dimension': rep.dimension})
        radius = family.perturbation_radius
        if 0.0 < radius < np.inf and u.hx > radius / 8:
            self.app.log.warning(f'Grid spacing {u.hx:.3g} does not resolve the perturbation radius {radius:.3g}')

    def dirac_apply(self, family, rep, u, twist=None):
        self._check_section(family, rep, u)
        x = u.coordinates()
        frame, _, _, omega = self.connection_field(family, rep, x, twist)
        upper = self.curved_gammas(rep, frame)

        result = np.zeros_like(u.values)
        for nu in range(rep.dimension):
            covariant = (central_difference(u.values, nu, u.hx, u.boundary)
                         + np.einsum('...ij,...j->...i', omega[..., nu, :, :], u.values))
            result += np.einsum('...ij,...j->...i', upper[..., nu, :, :], covariant)
        return u.with_values(result)

    def bochner_lichnerowicz_residual(self, family, rep, u, twist=None, boundary_layer=2):
        """Compare D^2 u with nabla* nabla u + F u + R/4 u assembled independently.

        The left side applies the first order operator twice. The right side is
        the divergence form with compact second differences, metric at half
        points and the curvature terms added pointwise."""
        self._check_section(family, rep, u)
        n = rep.dimension
        hx = u.hx
        x = u.coordinates()
        values = u.values

        squared = self.dirac_apply(family, rep, self.dirac_apply(family, rep, u, twist), twist).values

        g, dg, _, _ = self.geometry.metric_derivatives(family, x)
        ginv = np.linalg.inv(g)
        log_gradient = 0.5 * np.einsum('...ab,...kba->...k', ginv, dg)
        frame, _, _, omega = self.connection_field(family, rep, x, twist)

        derivative = np.stack([central_difference(values, i, hx, u.boundary) for i in range(n)], axis=-2)
        covariant = derivative + np.einsum('...iab,...b->...ia', omega, values)
        flux = np.einsum('...ji,...ia->...ja', ginv, covariant)
        connection_flux = np.einsum('...ji,...iab,...b->...ja', ginv, omega, values)

        divergence = np.zeros_like(values)
        eye = np.eye(n)
        for j in range(n):
            g_plus = np.linalg.inv(family.metric(x + 0.5 * hx * eye[j]))[..., j, j][..., None]
            g_minus = np.linalg.inv(family.metric(x - 0.5 * hx * eye[j]))[..., j, j][..., None]
            up = shift(values, j, 1, u.boundary)
            down = shift(values, j, -1, u.boundary)
            divergence += (g_plus * (up - values) - g_minus * (values - down)) / hx ** 2
            for i in range(n):
                if i != j:
                    divergence += central_difference(ginv[..., j, i, None] * derivative[..., i, :], j, hx, u.boundary)
            divergence += central_difference(connection_flux[..., j, :], j, hx, u.boundary)
            divergence += np.einsum('...ab,...b->...a', omega[..., j, :, :], flux[..., j, :])
            divergence += log_gradient[..., j, None] * flux[..., j, :]

        scalar = self.geometry.scalar_curvature_field(family, x)
        right = -divergence + 0.25 * scalar[..., None] * values
        if twist is not None:
            right += np.einsum('...ab,...b->...a', self.twist_contraction_field(twist, rep, frame, x), values)

        difference = np.abs(squared - right)
        if u.boundary != 'periodic' and boundary_layer:
            interior = (slice(boundary_layer, -boundary_layer),) * n
            difference = difference[interior]
            squared = squared[interior]
        residual = float(np.max(difference)) if difference.size else 0.0
        self.app.log.debug(f'Bochner-Lichnerowicz residual {residual:.3e} at hx={hx:.4g}')
        return BochnerLichnerowiczResidual(hx=hx, residual=residual, scale=float(np.max(np.abs(squared))))

    def adjoint_defect(self, family, rep, L, m, twist=None, outside=None):
        operator = self.app.services.lattice.assemble(family, rep, L, m, twist=twist)
        return self.app.services.lattice.adjoint_defect(operator, outside=outside)
