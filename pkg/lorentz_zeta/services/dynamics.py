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
from scipy.stats import qmc

from lorentz_zeta.dto.dynamics import NontrappingVerdict, PhasePoint, RadialSetReport, Trajectory
from lorentz_zeta.exceptions import ClassificationFailure, IntegrationFailure, InvalidInput

COMPLEX_STEP = 1e-20
BASE_INFINITY = 1e-8
JACOBIAN_STEP = 1e-7
EXPONENT_STEP = 1e-6
SAMPLES_PER_UNIT = 20
MAX_CHART_SWITCHES = 16
CONNECTING_ENDS = {'converged-to-L+', 'converged-to-L-'}


def _to_boundary_state(state):
    """[x, rho_inf, xi] -> [rho, y, rho_inf, xi]."""
    n = (len(state) - 1) // 2
    x = state[:n]
    r = np.linalg.norm(x)
    y = x / r if r > 0.0 else np.zeros(n)
    rho = 1.0 / r if r > 0.0 else np.inf
    return np.concatenate([[rho], y, state[n:]])


def _to_interior_state(state):
    n = (len(state) - 2) // 2
    rho, y = state[0], state[1:n + 1]
    if rho <= 0.0:
        raise InvalidInput('Points at base infinity have no interior coordinates', {'rho': float(rho)})
    return np.concatenate([y / rho, state[n + 1:]])


def connects(forward, backward, tol_dyn):
    """Whether a seed runs from one radial set to the other, or sits in one from the start."""
    ends = {forward.terminal, backward.terminal}
    if ends == CONNECTING_ENDS:
        return True
    if len(ends) == 1 and forward.terminal in CONNECTING_ENDS:
        label = forward.terminal.removeprefix('converged-to-')
        return bool(forward.distances[label][0] < tol_dyn)
    return False


class DynamicsService:
    def __init__(self, app):
        self.app = app

    def _check_family(self, family):
        if not np.isfinite(family.perturbation_radius):
            raise InvalidInput(f'{family!r} has no flat tail at infinity', {'family': family.label})

    def _switch_radii(self, family):
        inner = max(family.perturbation_radius, 1.0) + 1.0
        return inner, inner + 1.0

    def _inverse_metric(self, family, x):
        if x is None or family.is_flat_at(x):
            return family.eta.copy()
        return np.linalg.inv(family.metric(x))

    def _symbol_gradient(self, family, x, xi):
        """d_x q for q = g^{-1}(x)(xi, xi), by complex step differentiation."""
        n = family.dimension
        if x is None or family.is_flat_at(x):
            return np.zeros(n)
        points = x[None, :] + 1j * COMPLEX_STEP * np.eye(n)
        inverse = np.linalg.inv(family.metric(points))
        return np.imag(np.einsum('i,kij,j->k', xi, inverse, xi)) / COMPLEX_STEP

    def symbol(self, family, x, xi):
        return float(xi @ self._inverse_metric(family, x) @ xi)

    # Chart maps

    def to_boundary(self, point):
        if point.chart == 'boundary':
            return point
        state = _to_boundary_state(np.concatenate([point.x, [point.rho_inf], point.xi]))
        n = point.dimension
        y, xi = state[1:n + 1], state[n + 2:]
        tau = -xi @ y
        return PhasePoint.boundary(state[0], y, tau, xi + tau * y, point.rho_inf)

    def to_interior(self, point):
        if point.chart == 'interior':
            return point
        if point.rho <= 0.0:
            raise InvalidInput('Points at base infinity have no interior coordinates', {'rho': point.rho})
        return PhasePoint(chart='interior', rho_inf=point.rho_inf, x=point.y / point.rho, xi=point.covector)

    def _state(self, point):
        if point.chart == 'interior':
            return np.concatenate([point.x, [point.rho_inf], point.xi])
        return np.concatenate([[point.rho], point.y, [point.rho_inf], point.covector])

    def _point(self, state, chart):
        n = (len(state) - 1) // 2 if chart == 'interior' else (len(state) - 2) // 2
        if chart == 'interior':
            return PhasePoint(chart='interior', rho_inf=float(state[n]), x=state[:n], xi=state[n + 1:])
        y, xi = state[1:n + 1], state[n + 2:]
        tau = -xi @ y
        return PhasePoint.boundary(state[0], y, tau, xi + tau * y, state[n + 1])

    # Fields

    def _interior_field(self, family, state):
        n = family.dimension
        x, rho_inf, xi = state[:n], state[n], state[n + 1:]
        weight = np.sqrt(1.0 + x @ x)
        dq = self._symbol_gradient(family, x, xi)
        flux = xi @ dq
        return weight * np.concatenate([
            2.0 * self._inverse_metric(family, x) @ xi,
            [rho_inf * flux],
            -dq + xi * flux])

    def _boundary_field(self, family, state):
        n = family.dimension
        rho, y, rho_inf, xi = state[0], state[1:n + 1], state[n + 1], state[n + 2:]
        x = y / rho if rho > 0.0 else None
        weight = np.sqrt(1.0 + rho * rho)
        inverse = self._inverse_metric(family, x)
        velocity = inverse @ xi
        radial = y @ velocity
        if x is None:
            dq = np.zeros(n)
        else:
            dq = self._symbol_gradient(family, x, xi) / rho
        flux = xi @ dq
        return weight * np.concatenate([
            [-2.0 * rho * radial],
            2.0 * (velocity - y * radial),
            [rho_inf * flux],
            -dq + xi * flux])

    def principal_symbol(self, family, point):
        """p on the compactified fibers: g^{-1}(xi, xi) with xi scaled by rho_inf.

        For rho_inf > 0 the homogeneous value is this divided by rho_inf^2."""
        if point.chart == 'interior':
            return self.symbol(family, point.x, point.xi)
        x = point.y / point.rho if point.rho > 0.0 else None
        return self.symbol(family, x, point.covector)

    def rescaled_hamilton_field(self, family, point):
        """<x> rho_inf H_p in the coordinates of the active chart.

        Interior chart: (x, rho_inf, xi). Boundary chart: (rho, y, rho_inf, tau, mu)."""
        state = self._state(point)
        if point.chart == 'interior':
            return self._interior_field(family, state)
        n = family.dimension
        field = self._boundary_field(family, state)
        y, xi = state[1:n + 1], state[n + 2:]
        dy, dxi = field[1:n + 1], field[n + 2:]
        tau = -xi @ y
        dtau = -dxi @ y - xi @ dy
        dmu = dxi + dtau * y + tau * dy
        return np.concatenate([field[:n + 2], [dtau], dmu])

    # Flow

    def _distances(self, family, states):
        """rho + |y -+ eta xi / |eta xi||, the distance of boundary-chart states to L+ and L-."""
        n = family.dimension
        rho, y, xi = states[:, 0], states[:, 1:n + 1], states[:, n + 2:]
        target = xi @ family.eta
        norm = np.linalg.norm(target, axis=1)
        target = target / np.where(norm > 0.0, norm, 1.0)[:, None]
        return {
            'L+': rho + np.linalg.norm(y - target, axis=1),
            'L-': rho + np.linalg.norm(y + target, axis=1)
        }

    def _segment(self, family, chart, state, t0, t_max, grid, direction, tol):
        inner, outer = self._switch_radii(family)

        if chart == 'interior':
            def rhs(t, s):
                return direction * self._interior_field(family, s)

            def switch(t, s):
                x = s[:family.dimension]
                return x @ x - outer ** 2
            switch.direction = 1
            events = [switch]
        else:
            def rhs(t, s):
                return direction * self._boundary_field(family, s)

            def switch(t, s):
                return s[0] - 1.0 / inner
            switch.direction = 1

            def barrier(t, s):
                return s[0] - BASE_INFINITY
            barrier.direction = -1
            events = [switch, barrier]
        for event in events:
            event.terminal = True

        t_eval = grid[(grid > t0) & (grid <= t_max)]
        sol = solve_ivp(rhs, (t0, t_max), state, method='DOP853', t_eval=t_eval, events=events,
                        rtol=tol, atol=tol * 1e-2)
        if sol.status == -1 or not np.all(np.isfinite(sol.y)):
            raise IntegrationFailure(
                f'Bicharacteristic integration failed: {sol.message}',
                {'chart': chart, 't': float(sol.t[-1]) if len(sol.t) else t0, 'state': state.tolist()})

        if sol.status == 1:
            fired = [i for i, times in enumerate(sol.t_events) if len(times)][0]
            t_stop, end = float(sol.t_events[fired][0]), sol.y_events[fired][0].copy()
            if chart == 'interior':
                next_chart, end = 'boundary', _to_boundary_state(end)
            elif fired == 0:
                next_chart, end = 'interior', _to_interior_state(end)
            else:
                next_chart = 'boundary'
                end[0] = 0.0
            return sol.t, np.asarray(sol.y).T, t_stop, next_chart, end
        return sol.t, sol.y.T, t_max, None, sol.y[:, -1]

    def flow_integrate(self, family, start, t_max, tol_dyn=None, direction=1, mode='bicharacteristic'):
        """Integrate the rescaled Hamilton flow from `start` and classify where it ends."""
        self._check_family(family)
        tol_dyn = tol_dyn or self.app.config['TOL_DYN']
        tol_ode = self.app.config['TOL_ODE']

        covector = start.covector
        q0 = self.principal_symbol(family, start)
        if mode == 'bicharacteristic' and abs(q0) >= tol_dyn * (covector @ covector):
            raise InvalidInput('Seed is not characteristic', {'p': q0, 'tol_dyn': tol_dyn})

        inner, outer = self._switch_radii(family)
        chart, state = start.chart, self._state(start)
        if chart == 'interior' and np.linalg.norm(start.x) > outer:
            chart, state = 'boundary', _to_boundary_state(state)
        elif chart == 'boundary' and start.rho > 1.0 / inner:
            chart, state = 'interior', _to_interior_state(state)

        count = max(int(np.ceil(t_max * SAMPLES_PER_UNIT)), 2)
        grid = np.linspace(0.0, t_max, count + 1)
        times, states, charts = [0.0], [state if chart == 'boundary' else _to_boundary_state(state)], [chart]

        t = 0.0
        for _ in range(MAX_CHART_SWITCHES):
            ts, ys, t, next_chart, state = self._segment(family, chart, state, t, t_max, grid, direction, tol_ode)
            for ti, yi in zip(ts, ys):
                times.append(ti)
                states.append(yi if chart == 'boundary' else _to_boundary_state(yi))
                charts.append(chart)
            if next_chart is None or t >= t_max:
                break
            self.app.log.debug(f'Bicharacteristic switches to the {next_chart} chart at t={t:.6g}')
            chart = next_chart

        states = np.array(states)
        symbol = np.array([self._boundary_symbol(family, s) for s in states])
        distances = self._distances(family, states)
        terminal = self._classify(states, distances, symbol, q0, tol_dyn, mode)

        return Trajectory(direction=direction, t=direction * np.array(times), states=states, charts=charts,
                          symbol=symbol, distances=distances, terminal=terminal)

    def _boundary_symbol(self, family, state):
        n = family.dimension
        rho, y, xi = state[0], state[1:n + 1], state[n + 2:]
        x = y / rho if 0.0 < rho < np.inf else None
        return self.symbol(family, x, xi)

    def _classify(self, states, distances, symbol, q0, tol_dyn, mode):
        n = (states.shape[1] - 2) // 2
        rho_inf = states[:, n + 1]
        drift = np.max(np.abs(symbol - q0)) if mode == 'bicharacteristic' else 0.0
        if np.any(rho_inf < -tol_dyn) or np.any(rho_inf > 1.0 + tol_dyn) or drift > 10.0 * tol_dyn * (1.0 + abs(q0)):
            return 'left-domain'

        window = max(len(states) // 10, 2)
        for label in ('L+', 'L-'):
            tail = distances[label][-window:]
            if tail[-1] < tol_dyn and np.all(np.diff(tail) <= 1e-3 * tol_dyn):
                return f'converged-to-{label}'
        return 'budget-exhausted'

    # Radial sets

    def _null_directions(self, n):
        if n == 2:
            spatial = [np.array([1.0]), np.array([-1.0])]
        else:
            eye = np.eye(n - 1)
            spatial = [sign * eye[i] for i in range(n - 1) for sign in (1.0, -1.0)]
        return [np.concatenate([[sign], omega]) / np.sqrt(2.0) for sign in (1.0, -1.0) for omega in spatial]

    def _face_field(self, family, y, xi):
        """The rescaled field restricted to the corner rho = rho_inf = 0."""
        state = np.concatenate([[0.0], y, [0.0], xi])
        return self._boundary_field(family, state)

    def _locate(self, family, y0, xi0, tol_dyn):
        n = family.dimension

        def residual(z):
            y, xi = z[:n], z[n:]
            field = self._face_field(family, y, xi)
            return np.concatenate([field[1:n + 1], field[n + 2:],
                                   [y @ y - 1.0, xi @ xi - 1.0, xi @ family.eta @ xi]])

        result = root(residual, np.concatenate([y0, xi0]), method='lm', options={'xtol': 1e-14, 'ftol': 1e-14})
        error = float(np.max(np.abs(residual(result.x))))
        if not result.success or error > tol_dyn:
            raise ClassificationFailure(
                'Radial point search diverged',
                {'seed_y': y0.tolist(), 'seed_xi': xi0.tolist(), 'residual': error})
        return result.x[:n], result.x[n:]

    def _exponents(self, family, y, xi, orientation):
        """Signed exponents at a radial point: rho rate, rho_inf rate and the transverse spectrum."""
        n = family.dimension
        rho_rate = orientation * self._boundary_field(
            family, np.concatenate([[EXPONENT_STEP], y, [0.0], xi]))[0] / EXPONENT_STEP
        fiber_rate = orientation * self._boundary_field(
            family, np.concatenate([[EXPONENT_STEP], y, [EXPONENT_STEP], xi]))[n + 1] / EXPONENT_STEP

        tangent = np.linalg.svd(np.eye(n) - np.outer(y, y))[0][:, :n - 1]
        jacobian = np.empty((n, n - 1))
        for j in range(n - 1):
            step = JACOBIAN_STEP * tangent[:, j]
            plus = self._face_field(family, y + step, xi)[1:n + 1]
            minus = self._face_field(family, y - step, xi)[1:n + 1]
            jacobian[:, j] = orientation * (plus - minus) / (2.0 * JACOBIAN_STEP)
        transverse = np.linalg.eigvals(tangent.T @ jacobian)
        return rho_rate, fiber_rate, np.real(transverse)

    def radial_set_classify(self, family, tol_dyn=None, orientation=1):
        """Locate the radial sets over the corner and check the source/sink sign conditions.

        Returns the (source, sink) reports. Reversing `orientation` reverses the flow,
        which swaps the labels."""
        self._check_family(family)
        tol_dyn = tol_dyn or self.app.config['TOL_DYN']
        n = family.dimension

        located = {'L+': [], 'L-': []}
        for xi0 in self._null_directions(n):
            target = family.eta @ xi0
            target = target / np.linalg.norm(target)
            for y0 in (target, -target):
                y, xi = self._locate(family, y0, xi0, tol_dyn)
                rho_rate, fiber_rate, transverse = self._exponents(family, y, xi, orientation)
                label = 'L+' if rho_rate < 0.0 else 'L-'
                sign = -1.0 if label == 'L+' else 1.0
                beta_L = -np.max(transverse) if label == 'L+' else np.min(transverse)
                located[label].append({
                    'point': np.concatenate([[0.0], y, [0.0], xi]),
                    'symbol': float(xi @ family.eta @ xi),
                    'beta': sign * rho_rate,
                    'beta_inf': sign * fiber_rate,
                    'beta_L': beta_L,
                    'field_norm': float(np.linalg.norm(self._face_field(family, y, xi)))
                })

        reports = {}
        for label, entries in located.items():
            if not entries:
                raise ClassificationFailure(f'No radial points classify as {label}', {'orientation': orientation})
            beta = np.array([e['beta'] for e in entries])
            beta_inf = np.array([e['beta_inf'] for e in entries])
            beta_L = np.array([e['beta_L'] for e in entries])
            norms = np.array([e['field_norm'] for e in entries])
            conditions = {
                'characteristic': bool(all(abs(e['symbol']) < tol_dyn for e in entries)),
                'fixed_points': bool(np.all(norms < tol_dyn)),
                'beta_L_positive': bool(np.all(beta_L > tol_dyn)),
                'beta_positive': bool(np.all(beta > tol_dyn)),
                'beta_inf_vanishes': bool(np.all(np.abs(beta_inf) < tol_dyn))
            }
            reports[label] = RadialSetReport(
                label=label,
                points=np.array([e['point'] for e in entries]),
                beta_L=beta_L,
                beta=beta,
                beta_inf=beta_inf,
                conditions=conditions,
                threshold=beta_inf / beta,
                field_norms=norms)
            self.app.log.info(
                f'Radial set {label}: {len(entries)} points, certified={reports[label].certified}, '
                f'beta in [{beta.min():.4g}, {beta.max():.4g}]')
        return reports['L-'], reports['L+']

    # Non-trapping

    def _seed_points(self, family, seeds, seed):
        n = family.dimension
        extent = max(family.perturbation_radius, 1.0)
        dimension = n + (1 if n == 2 else n - 2) + 1
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        sobol = qmc.Sobol(dimension, scramble=True, seed=rng)
        sample = sobol.random_base2(int(np.ceil(np.log2(max(seeds, 2)))))[:seeds]

        points = []
        for row in sample:
            x = extent * (2.0 * row[:n] - 1.0)
            if n == 2:
                omega = np.array([1.0 if row[n] < 0.5 else -1.0])
            else:
                cos_theta = 2.0 * row[n] - 1.0
                phi = 2.0 * np.pi * row[n + 1]
                sin_theta = np.sqrt(max(1.0 - cos_theta ** 2, 0.0))
                omega = np.array([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta])
            inverse = self._inverse_metric(family, x)
            a = inverse[0, 0]
            b = inverse[0, 1:] @ omega
            c = omega @ inverse[1:, 1:] @ omega
            root_sign = 1.0 if row[-1] < 0.5 else -1.0
            xi0 = (-b + root_sign * np.sqrt(b * b - a * c)) / a
            points.append(PhasePoint.at_fiber_infinity(x, np.concatenate([[xi0], omega])))
        return points

    def nontrapping_check(self, family, seeds=200, t_max=30.0, tol_dyn=None, seed=0):
        """Run seeded null bicharacteristics both ways and check they connect the radial sets.

        The verdict is 'true', 'false', or 'inconclusive' when some trajectory ran out of time."""
        tol_dyn = tol_dyn or self.app.config['TOL_DYN']
        sources, sinks = self.radial_set_classify(family, tol_dyn)
        if not (sources.certified and sinks.certified):
            raise ClassificationFailure(
                'Radial sets are not certified',
                {'sources': sources.conditions, 'sinks': sinks.conditions})

        points = self._seed_points(family, seeds, seed)

        def run(point):
            forward = self.flow_integrate(family, point, t_max, tol_dyn, direction=1)
            backward = self.flow_integrate(family, point, t_max, tol_dyn, direction=-1)
            return forward, backward

        results = self.app.clients.pool.map(run, points)
        terminals = [(f.terminal, b.terminal) for f, b in results]

        if any('budget-exhausted' in pair for pair in terminals):
            verdict = 'inconclusive'
        elif all(connects(forward, backward, tol_dyn) for forward, backward in results):
            verdict = 'true'
        else:
            verdict = 'false'
        self.app.log.info(f'Non-trapping check on {family!r} with {seeds} seeds: {verdict}')
        return NontrappingVerdict(verdict=verdict, seeds=seeds, terminals=terminals,
                                  sources=sources, sinks=sinks), results
