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
from numpy.polynomial import chebyshev
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from lorentz_zeta.dto.hadamard import TransportState, TransportTube, U1Report
from lorentz_zeta.exceptions import InvalidInput
from lorentz_zeta.services.geometry import FD_FIRST, FD_SECOND, fd_gradient

STENCIL = np.array([-2, -1, 1, 2])
TRANSPORT_TOL = 1e-13
DEFAULT_SPACING = 0.02
DERIVATIVE_STEP = 1e-3
QUADRATURE_NODES = 24


def stencil_offsets(n):
    """Integer offsets of the fourth order first, second and mixed derivative stencils."""
    offsets = [np.zeros(n, dtype=int)]
    eye = np.eye(n, dtype=int)
    for k in range(n):
        offsets.extend(o * eye[k] for o in STENCIL)
    for k in range(n):
        for l in range(k + 1, n):
            offsets.extend(o1 * eye[k] + o2 * eye[l] for o1 in STENCIL for o2 in STENCIL)
    return np.array(offsets)


def stencil_derivatives(values, offsets, spacing, order=4):
    """Value, gradient and Hessian of a matrix field sampled on `stencil_offsets`."""
    n = offsets.shape[1]
    index = {tuple(o): i for i, o in enumerate(offsets)}
    eye = np.eye(n, dtype=int)

    def at(offset):
        return values[index[tuple(offset)]]

    center = at(np.zeros(n, dtype=int))
    first = np.zeros((n,) + center.shape, dtype=values.dtype)
    second = np.zeros((n, n) + center.shape, dtype=values.dtype)

    for k in range(n):
        if order == 4:
            first[k] = sum(w * at(o * eye[k]) for w, o in zip(FD_FIRST, STENCIL)) / spacing
            second[k, k] = (FD_SECOND[2] * center + sum(
                w * at(o * eye[k]) for w, o in zip(FD_SECOND[[0, 1, 3, 4]], STENCIL))) / spacing ** 2
        else:
            first[k] = (at(eye[k]) - at(-eye[k])) / (2.0 * spacing)
            second[k, k] = (at(eye[k]) - 2.0 * center + at(-eye[k])) / spacing ** 2
        for l in range(k + 1, n):
            if order == 4:
                mixed = sum(w1 * w2 * at(o1 * eye[k] + o2 * eye[l])
                            for w1, o1 in zip(FD_FIRST, STENCIL) for w2, o2 in zip(FD_FIRST, STENCIL))
            else:
                mixed = (at(eye[k] + eye[l]) - at(eye[k] - eye[l])
                         - at(eye[l] - eye[k]) + at(-eye[k] - eye[l])) / 4.0
            second[k, l] = second[l, k] = mixed / spacing ** 2
    return center, first, second


def lobatto_radii(r_max, samples):
    return 0.5 * r_max * (1.0 - np.cos(np.pi * np.arange(samples) / (samples - 1)))


class HadamardService:
    def __init__(self, app):
        self.app = app

    @property
    def geometry(self):
        return self.app.services.geometry

    @property
    def clifford(self):
        return self.app.services.clifford

    def _connection(self, family, rep, twist):
        if family.is_flat_everywhere() and twist is None:
            return None
        return lambda p: self.clifford.connection_field(family, rep, p, twist)[3]

    def _spinors(self, parts, rank, count):
        spinors = parts.get('spinor')
        if spinors is None:
            return np.broadcast_to(np.eye(rank, dtype=complex), (count, rank, rank))
        return spinors

    def apply_operator(self, family, rep, y, stencil_values, spacing, twist=None, order=4):
        """(P psi)(y) = -(D^2 psi)(y) for a matrix section sampled on a stencil around y.

        With D = C^nu (d_nu + Omega_nu) this expands to
        C^mu [(d_mu C^nu) D_nu psi + C^nu (d_mu d_nu psi + (d_mu Omega_nu) psi + Omega_nu d_mu psi)
        + Omega_mu C^nu D_nu psi]."""
        y = np.asarray(y, dtype=float)
        offsets = stencil_offsets(rep.dimension)
        psi, d_psi, dd_psi = stencil_derivatives(np.asarray(stencil_values), offsets, spacing, order)

        def connection(p):
            return self.clifford.connection_field(family, rep, p, twist)[3]

        def gammas(p):
            return self.clifford.curved_gammas(rep, self.geometry.vielbein(family, p))

        upper = gammas(y)
        omega = connection(y)
        d_upper = fd_gradient(gammas, y, DERIVATIVE_STEP)
        d_omega = fd_gradient(connection, y, DERIVATIVE_STEP)

        covariant = d_psi + np.einsum('nij,jk->nik', omega, psi)
        second = (dd_psi + np.einsum('mnij,jk->mnik', d_omega, psi)
                  + np.einsum('nij,mjk->mnik', omega, d_psi))
        inner = (np.einsum('mnij,njk->mik', d_upper, covariant)
                 + np.einsum('nij,mnjk->mik', upper, second)
                 + np.einsum('mij,njk,nkl->mil', omega, upper, covariant))
        return -np.einsum('mij,mjk->ik', upper, inner)

    def section_value(self, family, rep, x0, y, k, twist=None, spacing=DEFAULT_SPACING, tol_ode=TRANSPORT_TOL):
        """u_k(x0, y) as a map from the fiber at x0 to the fiber at y, in frame components."""
        x0 = np.asarray(x0, dtype=float)
        v = self.geometry.shoot(family, x0, y, tol_ode)
        state = self.geometry.geodesic(family, x0, v, 1.0, connection=self._connection(family, rep, twist),
                                       tol=tol_ode, rank=rep.rank)
        spinor = state.spinor if state.spinor is not None else rep.identity
        end = state.dense.unpack(state.dense([1.0]))
        density_end = self.geometry.normal_density(family, x0, end, np.array([1.0]))[0][0]

        if k == 0:
            return spinor / np.sqrt(density_end)

        nodes, weights = leggauss(QUADRATURE_NODES)
        s = 0.5 * (nodes + 1.0)
        parts = state.dense.unpack(state.dense(s))
        density = self.geometry.normal_density(family, x0, parts, s)[0]
        spinors = self._spinors(parts, rep.rank, len(s))
        offsets = stencil_offsets(rep.dimension)

        integral = np.zeros((rep.rank, rep.rank), dtype=complex)
        for q in range(len(s)):
            point = np.real(parts['x'][q])
            stencil = np.array([
                self.section_value(family, rep, x0, point + spacing * o, k - 1, twist, spacing, tol_ode)
                for o in offsets])
            forcing = self.apply_operator(family, rep, point, stencil, spacing, twist)
            integral += 0.5 * weights[q] * s[q] ** (k - 1) * np.sqrt(density[q]) * np.linalg.solve(spinors[q], forcing)
        return spinor @ (-integral / np.sqrt(density_end))

    def _tube(self, family, rep, x0, points, k, twist, spacing, tol_ode):
        offsets = stencil_offsets(rep.dimension)
        values = np.array([
            [self.section_value(family, rep, x0, point + spacing * o, k, twist, spacing, tol_ode) for o in offsets]
            for point in points])
        self.app.log.debug(f'Built a tube of {len(points)} x {len(offsets)} sections of u_{k}')
        return TransportTube(spacing=spacing, offsets=offsets, values=values)

    def _u0_ode(self, family, x0, direction, r_max, radii, tol_ode):
        """Integrate 2 V u0 + h u0 = 0 as d log u0 / dr = -h / (2 r)."""
        state = self.geometry.geodesic(family, x0, direction, r_max, tol=tol_ode)

        def rhs(r, w):
            if r < 1e-6:
                return [0.0]
            parts = state.dense.unpack(state.dense([r]))
            h, _ = self.geometry.transport_scalar(family, parts, np.array([r]))
            return [-h[0] / (2.0 * r)]

        sol = solve_ivp(rhs, (0.0, r_max), [0.0], t_eval=radii, method='DOP853',
                        rtol=max(tol_ode, 1e-12), atol=1e-14)
        return np.exp(sol.y[0])

    def transport_u0(self, family, x0, direction, r_max, samples=9, rep=None, twist=None,
                     tube=False, spacing=None, tol_ode=TRANSPORT_TOL):
        x0 = np.asarray(x0, dtype=float)
        direction = np.asarray(direction, dtype=float)
        rank = rep.rank if rep is not None else 1
        radii = lobatto_radii(r_max, samples)
        connection = self._connection(family, rep, twist) if rep is not None else None

        trivialization = self.geometry.radial_trivialization(
            family, x0, direction, r_max, samples, radii=radii, connection=connection, rank=rank, tol_ode=tol_ode)

        closed_form = trivialization.density ** -0.5
        ode = self._u0_ode(family, x0, direction, r_max, radii, tol_ode)
        deviation = float(np.max(np.abs(ode - closed_form)))
        self.app.log.debug(f'u0 transport ODE deviates {deviation:.3e} from the closed form')

        identity = np.eye(rank, dtype=complex)
        state = TransportState(
            base=x0,
            direction=direction,
            k=0,
            radii=radii,
            values=closed_form[:, None, None] * identity,
            h=trivialization.h,
            density=trivialization.density,
            spinors=trivialization.spinors,
            ode_values=ode[:, None, None] * identity,
            coordinate_values=np.sqrt(trivialization.sqrt_det[0] / trivialization.sqrt_det)[:, None, None] * identity,
            deviation=deviation)

        if tube:
            if rep is None:
                raise InvalidInput('A Clifford representation is needed to sample u0 on a tube')
            spacing = spacing or min(DEFAULT_SPACING, r_max / (samples - 1))
            state.tube = self._tube(family, rep, x0, trivialization.points, 0, twist, spacing, tol_ode)
        return state

    def transport_u1_origin(self, family, rep, x0, twist=None, spacing=DEFAULT_SPACING, tol_ode=TRANSPORT_TOL):
        x0 = np.asarray(x0, dtype=float)
        offsets = stencil_offsets(rep.dimension)
        stencil = np.array([
            self.section_value(family, rep, x0, x0 + spacing * o, 0, twist, spacing, tol_ode) for o in offsets])

        numeric = -self.apply_operator(family, rep, x0, stencil, spacing, twist)
        coarse = -self.apply_operator(family, rep, x0, stencil, spacing, twist, order=2)
        stencil_error = float(np.max(np.abs(numeric - coarse)))

        scalar = self.geometry.curvature_at(family, x0).scalar
        twisting = self.clifford.twisting_curvature(twist, rep, x0, family)
        predicted = scalar / 12.0 * rep.identity + twisting.contraction

        scale = float(np.max(np.abs(predicted)))
        difference = float(np.max(np.abs(numeric - predicted)))
        rel_error = difference / scale if scale > 0.0 else difference

        if stencil_error > 1e-2 * max(scale, 1e-8):
            self.app.log.warning(
                f'Stencil spacing {spacing:.3g} under-resolves u0 near {x0.tolist()}, estimated error {stencil_error:.3e}')
        self.app.log.info(f'u1(0) at {x0.tolist()}: R_g = {scalar:.8g}, relative error {rel_error:.3e}')

        return U1Report(
            x0=x0,
            scalar_curvature=scalar,
            numeric=numeric,
            predicted=predicted,
            rel_error=rel_error,
            twist_contraction=twisting.contraction,
            twist_contraction_lower=twisting.contraction_lower,
            stencil_error=stencil_error)

    def transport_uk(self, family, rep, x0, direction, k, prev, twist=None, tube=False, tol_ode=TRANSPORT_TOL):
        """Solve 2k u_k + h u_k + 2 V u_k + 2 P u_{k-1} = 0 along the ray through `direction`.

        In the radial trivialization the solution regular at r = 0 is
        u_k(r) = -r^{-k} D(r)^{-1/2} int_0^r s^{k-1} D(s)^{1/2} P u_{k-1}(s) ds,
        with P u_{k-1} interpolated through the Lobatto samples of `prev`."""
        if k < 1 or prev.k != k - 1:
            raise InvalidInput(f'transport of u_{k} needs u_{k - 1}, got u_{prev.k}', {'k': k, 'prev_k': prev.k})
        samples = len(prev.radii)
        if samples < 3:
            raise InvalidInput('transport needs at least three radial samples', {'samples': samples})
        if prev.tube is None:
            raise InvalidInput(f'u_{k - 1} has no transverse samples around the ray')
        r_max = prev.radii[-1]
        if prev.tube.spacing > r_max / (samples - 1):
            raise InvalidInput(
                'tube spacing exceeds the radial step',
                {'spacing': prev.tube.spacing, 'radial_step': r_max / (samples - 1)})

        x0 = np.asarray(x0, dtype=float)
        direction = np.asarray(direction, dtype=float)
        state = self.geometry.geodesic(family, x0, direction, r_max, connection=self._connection(family, rep, twist),
                                       tol=tol_ode, rank=rep.rank)
        parts = state.dense.unpack(state.dense(prev.radii))
        spinors = self._spinors(parts, rep.rank, samples)
        density = self.geometry.normal_density(family, x0, parts, prev.radii)[0]
        points = np.real(parts['x'])

        forcing = np.array([
            np.linalg.solve(spinors[i], self.apply_operator(
                family, rep, points[i], prev.tube.values[i], prev.tube.spacing, twist))
            for i in range(samples)])

        mapped = 2.0 * prev.radii / r_max - 1.0
        flat = forcing.reshape(samples, -1)
        coefficients = (chebyshev.chebfit(mapped, flat.real, samples - 1)
                        + 1j * chebyshev.chebfit(mapped, flat.imag, samples - 1))

        nodes, weights = leggauss(QUADRATURE_NODES)
        values = np.zeros_like(forcing)
        values[0] = -forcing[0] / k
        for i in range(1, samples):
            r = prev.radii[i]
            s = 0.5 * r * (nodes + 1.0)
            s_parts = state.dense.unpack(state.dense(s))
            s_density = self.geometry.normal_density(family, x0, s_parts, s)[0]
            interpolated = chebyshev.chebval(2.0 * s / r_max - 1.0, coefficients).T.reshape(len(s), rep.rank, rep.rank)
            weight = 0.5 * r * weights * s ** (k - 1) * np.sqrt(s_density)
            integral = np.einsum('q,qij->ij', weight, interpolated)
            values[i] = -integral / (r ** k * np.sqrt(density[i]))

        result = TransportState(
            base=x0,
            direction=direction,
            k=k,
            radii=prev.radii,
            values=values,
            h=prev.h,
            density=density,
            spinors=parts.get('spinor'))

        if tube:
            result.tube = self._tube(family, rep, x0, points, k, twist, prev.tube.spacing, tol_ode)
        return result
