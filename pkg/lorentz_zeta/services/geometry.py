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
from scipy.integrate import solve_ivp
from scipy.optimize import root

from lorentz_zeta.dto.geometry import CurvatureData, GeodesicState, RadialTrivialization
from lorentz_zeta.exceptions import GeodesicFailure, SingularMetric
from lorentz_zeta.services.cache import cache_for

FD_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
FD_FIRST = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
FD_SECOND_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
FD_SECOND = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def fd_gradient(fn, x, step):
    """Fourth order central first derivatives of a vectorized `fn`.

    `x` has shape (..., n) and `fn` maps (..., n) to (..., *S); the result has
    shape (..., n, *S) with the derivative direction on axis x.ndim - 1."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    shifts = step * FD_OFFSETS[:, None] * np.eye(n)[:, None, :]
    values = np.asarray(fn(x[..., None, None, :] + shifts))
    return np.tensordot(values, FD_FIRST, axes=([x.ndim], [0])) / step


def fd_hessian(fn, x, step):
    """Fourth order central second derivatives, shape (..., n, n, *S)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    eye = np.eye(n)
    rows = []
    for k in range(n):
        row = []
        for l in range(n):
            if k == l:
                shifts = step * FD_SECOND_OFFSETS[:, None] * eye[k]
                values = np.asarray(fn(x[..., None, :] + shifts))
                row.append(np.tensordot(values, FD_SECOND, axes=([x.ndim - 1], [0])) / step ** 2)
            else:
                shifts = step * (FD_OFFSETS[:, None, None] * eye[k] + FD_OFFSETS[None, :, None] * eye[l])
                values = np.asarray(fn(x[..., None, None, :] + shifts))
                weights = np.outer(FD_FIRST, FD_FIRST)
                row.append(np.tensordot(values, weights, axes=([x.ndim - 1, x.ndim], [0, 1])) / step ** 2)
        rows.append(np.stack(row, axis=x.ndim - 1))
    return np.stack(rows, axis=x.ndim - 1)


def christoffel_lower(dg):
    """Gamma_{sigma mu nu} from d_k g_{mu nu} stored as dg[..., k, mu, nu]."""
    return 0.5 * (np.einsum('...msn->...smn', dg) + np.einsum('...nsm->...smn', dg) - dg)


def christoffel(ginv, dg):
    return np.einsum('...ls,...smn->...lmn', ginv, christoffel_lower(dg))


def christoffel_derivative(ginv, dg, ddg):
    """d_k Gamma^lambda_{mu nu} stored as [..., k, lambda, mu, nu]."""
    lower = christoffel_lower(dg)
    d_lower = 0.5 * (np.einsum('...kmsn->...ksmn', ddg) + np.einsum('...knsm->...ksmn', ddg) - ddg)
    d_ginv = -np.einsum('...la,...kab,...bs->...kls', ginv, dg, ginv)
    return np.einsum('...kls,...smn->...klmn', d_ginv, lower) + np.einsum('...ls,...ksmn->...klmn', ginv, d_lower)


def riemann(gamma, d_gamma):
    """R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma} - d_nu Gamma^rho_{mu sigma} + [Gamma, Gamma]."""
    return (np.einsum('...mrns->...rsmn', d_gamma) - np.einsum('...nrms->...rsmn', d_gamma)
            + np.einsum('...rml,...lns->...rsmn', gamma, gamma)
            - np.einsum('...rnl,...lms->...rsmn', gamma, gamma))


class GeodesicSolution:
    """Dense output of an integrated geodesic, continued in closed form past `t_exit`.

    Past `t_exit` the geodesic runs through the flat region, where it is a
    straight line and the Jacobi fields are affine."""

    def __init__(self, n, sol, t_exit, y_exit):
        self.n = n
        self.sol = sol
        self.t_exit = t_exit
        self.y_exit = y_exit

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((len(t), len(self.y_exit)), dtype=self.y_exit.dtype)
        inside = t <= self.t_exit if self.sol is not None else np.zeros(len(t), dtype=bool)
        if np.any(inside):
            out[inside] = self.sol.sol(t[inside]).T
        if np.any(~inside):
            n = self.n
            dt = (t[~inside] - self.t_exit)[:, None]
            y = np.broadcast_to(self.y_exit, out[~inside].shape).copy()
            y[:, :n] = self.y_exit[:n] + dt * self.y_exit[n:2 * n]
            jacobi = slice(2 * n, 2 * n + n * n)
            jacobi_derivative = slice(2 * n + n * n, 2 * n + 2 * n * n)
            y[:, jacobi] = self.y_exit[jacobi] + dt * self.y_exit[jacobi_derivative]
            out[~inside] = y
        return out

    def unpack(self, y):
        n = self.n
        y = np.asarray(y)
        parts = {
            'x': y[..., :n],
            'v': y[..., n:2 * n],
            'jacobi': y[..., 2 * n:2 * n + n * n].reshape(y.shape[:-1] + (n, n)),
            'jacobi_derivative': y[..., 2 * n + n * n:2 * n + 2 * n * n].reshape(y.shape[:-1] + (n, n)),
            'frame': y[..., 2 * n + 2 * n * n:2 * n + 3 * n * n].reshape(y.shape[:-1] + (n, n))
        }
        rest = y[..., 2 * n + 3 * n * n:]
        if rest.shape[-1]:
            rank = int(round(np.sqrt(rest.shape[-1])))
            parts['spinor'] = rest.reshape(y.shape[:-1] + (rank, rank))
        return parts


class GeometryService:
    def __init__(self, app):
        self.app = app

    @property
    def metrics(self):
        return self.app.services.metric

    def metric_derivatives(self, family, x, step=None, method='auto'):
        """Get g, d g and d d g at `x`, analytic when the family provides them."""
        step = step or self.app.config['FD_STEP']
        if method == 'auto':
            method = 'analytic' if family.has_analytic_derivatives else 'finite-difference'
        g = family.metric(x)
        if method == 'analytic':
            return g, family.d_metric(x), family.dd_metric(x), method
        return g, fd_gradient(family.metric, x, step), fd_hessian(family.metric, x, step), method

    def connection_coefficients(self, family, x):
        g, dg, ddg, _ = self.metric_derivatives(family, x)
        ginv = self.metrics.inverse(g)
        return christoffel(ginv, dg), christoffel_derivative(ginv, dg, ddg)

    def curvature_at(self, family, x, step=None, method='auto'):
        x = np.asarray(x, dtype=float)
        step = step or self.app.config['FD_STEP']
        return self._curvature_at(family, x, step, method)

    @cache_for()
    def _curvature_at(self, family, x, step, method):
        n = family.dimension
        g = self.metrics.metric_at(family, x)
        ginv = self.metrics.inverse(g)

        if family.is_flat_at(x, margin=2 * step):
            zero3 = np.zeros((n, n, n))
            zero4 = np.zeros((n, n, n, n))
            return CurvatureData(
                x=x, christoffel=zero3, riemann=zero4, ricci=np.zeros((n, n)), scalar=0.0,
                sqrt_det=1.0, log_sqrt_det_gradient=np.zeros(n), bianchi_residual=0.0,
                method='flat')

        g, dg, ddg, method = self.metric_derivatives(family, x, step, method)
        gamma = christoffel(ginv, dg)
        riem = riemann(gamma, christoffel_derivative(ginv, dg, ddg))
        ricci = np.einsum('msmn->sn', riem)

        bianchi = riem + np.einsum('rmns->rsmn', riem) + np.einsum('rnsm->rsmn', riem)

        return CurvatureData(
            x=x,
            christoffel=gamma,
            riemann=riem,
            ricci=ricci,
            scalar=float(np.einsum('sn,sn->', ginv, ricci)),
            sqrt_det=float(np.sqrt(np.abs(np.linalg.det(g)))),
            log_sqrt_det_gradient=np.einsum('mmk->k', gamma),
            bianchi_residual=float(np.max(np.abs(bianchi))),
            method=method)

    def scalar_curvature_field(self, family, x):
        """Vectorized R_g over points of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        g, dg, ddg, _ = self.metric_derivatives(family, x)
        ginv = np.linalg.inv(g)
        riem = riemann(christoffel(ginv, dg), christoffel_derivative(ginv, dg, ddg))
        return np.einsum('...sn,...msmn->...', ginv, riem)

    def warped_scalar_curvature(self, family, t):
        """-(n-1)(2 a''/a + (n-2) a'^2/a^2), i.e. -2 a''/a in two dimensions."""
        n = family.dimension
        a, a_dot, a_ddot = family.scale(t), family.scale_dot(t), family.scale_ddot(t)
        return -(n - 1) * (2.0 * a_ddot / a + (n - 2) * a_dot ** 2 / a ** 2)

    def conformal_curvature_oracle(self, family, x, step=1e-3):
        """R_g of exp(2 phi) eta from finite differences of phi alone."""
        x = np.asarray(x, dtype=float)
        n = family.dimension
        grad = fd_gradient(family.phi, x, step)
        hess = fd_hessian(family.phi, x, step)
        box = np.einsum('...kl,kl->...', hess, family.eta)
        grad2 = np.einsum('...k,...l,kl->...', grad, grad, family.eta)
        return -np.exp(-2.0 * family.phi(x)) * (2.0 * (n - 1) * box + (n - 2) * (n - 1) * grad2)

    def vielbein(self, family, x):
        """Orthonormal frame e_a^mu stored as [..., mu, a], Gram-Schmidt from d_0."""
        g = family.metric(x)
        n = family.dimension
        signs = np.diag(family.eta)
        frame = np.zeros(g.shape, dtype=g.dtype)
        for a in range(n):
            w = np.zeros(g.shape[:-1], dtype=g.dtype)
            w[..., a] = 1.0
            for b in range(a):
                proj = np.einsum('...m,...mn,...n->...', w, g, frame[..., :, b])
                w = w - signs[b] * proj[..., None] * frame[..., :, b]
            norm2 = signs[a] * np.einsum('...m,...mn,...n->...', w, g, w)
            if np.any(np.real(norm2) <= 1e-14):
                raise SingularMetric(
                    f'Gram-Schmidt degenerates at frame index {a}',
                    {'index': a, 'norm': float(np.min(np.real(norm2)))})
            frame[..., :, a] = w / np.sqrt(norm2)[..., None]
        return frame

    def coframe(self, family, x, frame=None):
        """E^a_mu = eta^{ab} g_{mu nu} e_b^nu stored as [..., a, mu]."""
        frame = self.vielbein(family, x) if frame is None else frame
        g = family.metric(x)
        return np.diag(family.eta)[:, None] * np.einsum('...mn,...nb->...bm', g, frame)

    def geodesic(self, family, x0, v, t_end=1.0, connection=None, tol=None, rank=None):
        """Integrate a geodesic together with its Jacobi fields and parallel frame.

        The Jacobi matrix J = dx(t)/dv starts at J(0) = 0, J'(0) = 1. When a
        `connection` callable x -> (n, N, N) is given, the spinor transport
        S' = -x'^mu Omega_mu S is integrated alongside."""
        tol = tol or self.app.config['TOL_ODE']
        n = family.dimension
        x0 = np.asarray(x0, dtype=float)
        v = np.asarray(v, dtype=float)

        y0 = np.concatenate([
            x0, v, np.zeros(n * n), np.eye(n).ravel(), self.vielbein(family, x0).ravel()])
        if connection is not None:
            y0 = np.concatenate([y0.astype(complex), np.eye(rank, dtype=complex).ravel()])

        if connection is None and family.segment_is_flat(x0, v * t_end):
            solution = GeodesicSolution(n, None, 0.0, y0)
            return self._geodesic_state(family, x0, v, t_end, solution, straight=True)

        def rhs(t, y):
            x = np.real(y[:n])
            velocity = np.real(y[n:2 * n])
            jacobi = np.real(y[2 * n:2 * n + n * n]).reshape(n, n)
            jacobi_derivative = np.real(y[2 * n + n * n:2 * n + 2 * n * n]).reshape(n, n)
            frame = np.real(y[2 * n + 2 * n * n:2 * n + 3 * n * n]).reshape(n, n)
            gamma, d_gamma = self.connection_coefficients(family, x)

            parts = [
                velocity,
                -np.einsum('lmn,m,n->l', gamma, velocity, velocity),
                jacobi_derivative.ravel(),
                (-np.einsum('klmn,kj,m,n->lj', d_gamma, jacobi, velocity, velocity)
                 - 2.0 * np.einsum('lmn,m,nj->lj', gamma, velocity, jacobi_derivative)).ravel(),
                -np.einsum('lmn,m,na->la', gamma, velocity, frame).ravel()
            ]
            if connection is not None:
                spinor = y[2 * n + 3 * n * n:].reshape(rank, rank)
                omega = np.einsum('m,mab->ab', velocity, connection(x))
                parts.append(-(omega @ spinor).ravel())
            return np.concatenate(parts)

        events = None
        if connection is None and np.isfinite(family.perturbation_radius):
            def leave_support(t, y):
                x = np.real(y[:n])
                return x @ x - family.perturbation_radius ** 2
            leave_support.terminal = True
            leave_support.direction = 1
            events = [leave_support]

        sol = solve_ivp(rhs, (0.0, t_end), y0, method='DOP853', rtol=tol, atol=tol * 1e-3,
                        dense_output=True, events=events)

        if sol.status == -1 or not np.all(np.isfinite(sol.y[:, -1])):
            raise GeodesicFailure(
                f'Geodesic integration failed: {sol.message}',
                {'x0': x0.tolist(), 'v': v.tolist(), 't': float(sol.t[-1])})

        t_exit = float(sol.t[-1])
        solution = GeodesicSolution(n, sol, t_exit, sol.y[:, -1].copy())
        if sol.status == 1:
            self.app.log.debug(f'Geodesic from {x0.tolist()} leaves the perturbation at t={t_exit:.6g}')
        return self._geodesic_state(family, x0, v, t_end, solution, straight=False)

    def _geodesic_state(self, family, x0, v, t_end, solution, straight):
        parts = solution.unpack(solution(t_end)[0])
        g0 = family.metric(x0)
        g1 = family.metric(np.real(parts['x']))
        velocity = np.real(parts['v'])
        drift = abs(velocity @ g1 @ velocity - v @ g0 @ v)
        return GeodesicState(
            base=x0,
            tangent=v,
            t=t_end,
            position=np.real(parts['x']),
            velocity=velocity,
            frame=np.real(parts['frame']),
            jacobi=np.real(parts['jacobi']),
            jacobi_derivative=np.real(parts['jacobi_derivative']),
            spinor=parts.get('spinor'),
            energy_drift=float(drift),
            straight=straight,
            dense=solution)

    def exponential_map(self, family, x0, v, tol_ode=None, connection=None, rank=None):
        state = self.geodesic(family, x0, v, 1.0, connection=connection, tol=tol_ode, rank=rank)
        tol = tol_ode or self.app.config['TOL_ODE']
        if state.energy_drift > 100 * tol * (1.0 + np.dot(v, v)):
            self.app.log.warning(f'Geodesic energy drift {state.energy_drift:.3g} exceeds the ODE tolerance')
        return state

    def shoot(self, family, x0, y, tol_ode=None, max_iterations=30):
        """Solve exp(x0, v) = y for v, with the Jacobi matrix J(1) as the Jacobian."""
        x0 = np.asarray(x0, dtype=float)
        y = np.asarray(y, dtype=float)
        v = y - x0
        if family.segment_is_flat(x0, v):
            return v
        tolerance = 10 * (tol_ode or self.app.config['TOL_ODE'])

        def residual(w):
            state = self.geodesic(family, x0, w, 1.0, tol=tol_ode)
            return state.position - y, state.jacobi

        result = root(residual, v, jac=True, method='hybr',
                      options={'xtol': tolerance, 'maxfev': max_iterations * (len(v) + 1)})
        miss = float(np.max(np.abs(residual(result.x)[0])))
        if miss >= tolerance * (1.0 + np.max(np.abs(y))):
            raise GeodesicFailure(
                f'Shooting did not converge: {result.message}',
                {'x0': x0.tolist(), 'y': y.tolist(), 'miss': miss})
        return result.x

    def normal_density(self, family, x0, parts, t):
        """|det d exp| |g(x)|^{1/2} / |g(x0)|^{1/2} along a ray sampled at parameters `t`."""
        t = np.atleast_1d(t)
        jacobi = np.real(parts['jacobi'])
        scaled = np.where(t[:, None, None] > 1e-8, jacobi / np.maximum(t, 1e-300)[:, None, None],
                          np.real(parts['jacobi_derivative']))
        sqrt_det = np.sqrt(np.abs(np.linalg.det(family.metric(np.real(parts['x'])))))
        sqrt_det0 = np.sqrt(np.abs(np.linalg.det(family.metric(x0))))
        return sqrt_det * np.abs(np.linalg.det(scaled)) / sqrt_det0, sqrt_det

    def transport_scalar(self, family, parts, t):
        """h = V(log of the normal-coordinate density) and its coordinate-density part."""
        t = np.atleast_1d(t)
        x = np.real(parts['x'])
        velocity = np.real(parts['v'])
        _, dg, _, _ = self.metric_derivatives(family, x)
        ginv = np.linalg.inv(family.metric(x))
        log_gradient = 0.5 * np.einsum('...ab,...kba->...k', ginv, dg)
        h_coordinate = t * np.einsum('...k,...k->...', log_gradient, velocity)
        h = np.zeros_like(t)
        far = t >= 1e-6
        if np.any(far):
            jacobi = np.real(parts['jacobi'])[far]
            jacobi_derivative = np.real(parts['jacobi_derivative'])[far]
            trace = np.trace(np.linalg.solve(jacobi, jacobi_derivative), axis1=-2, axis2=-1)
            h[far] = h_coordinate[far] + t[far] * trace - family.dimension
        return h, np.where(far, h_coordinate, 0.0)

    def radial_trivialization(self, family, x0, ray_direction, r_max, samples, radii=None,
                              connection=None, rank=None, tol_ode=None):
        x0 = np.asarray(x0, dtype=float)
        direction = np.asarray(ray_direction, dtype=float)
        radii = np.linspace(0.0, r_max, samples) if radii is None else np.asarray(radii, dtype=float)

        state = self.geodesic(family, x0, direction, r_max, connection=connection, tol=tol_ode, rank=rank)
        parts = state.dense.unpack(state.dense(radii))

        frames = np.real(parts['frame'])
        gram = np.einsum('rma,rmn,rnb->rab', frames, family.metric(np.real(parts['x'])), frames)
        gram_det = np.abs(np.linalg.det(gram))
        if np.any(gram_det < self.app.config['TOL_GEOM']):
            raise GeodesicFailure('Parallel frame degenerates along the ray', {'gram_det': float(np.min(gram_det))})

        density, sqrt_det = self.normal_density(family, x0, parts, radii)
        h, h_coordinate = self.transport_scalar(family, parts, radii)

        return RadialTrivialization(
            base=x0,
            direction=direction,
            radii=radii,
            points=np.real(parts['x']),
            frames=frames,
            sqrt_det=sqrt_det,
            density=density,
            h=h,
            h_coordinate=h_coordinate,
            spinors=parts.get('spinor'))
