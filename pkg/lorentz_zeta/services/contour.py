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
from numpy.polynomial.legendre import leggauss

from lorentz_zeta.dto.spectral import Contour
from lorentz_zeta.exceptions import ContourFailure, InvalidInput

TRUNCATION_TOLERANCE = 1e-12
MAX_LOG_RADIUS = 500.0
MAX_REFINEMENT = 40


class CompensatedSum:
    """Neumaier accumulator for scalars or equally shaped complex arrays."""

    def __init__(self):
        self.parts = None

    @staticmethod
    def _step(total, compensation, term):
        t = total + term
        compensation = compensation + np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        return t, compensation

    def add(self, term):
        term = np.asarray(term, dtype=complex)
        if self.parts is None:
            self.parts = [term.real.copy(), np.zeros(term.shape), term.imag.copy(), np.zeros(term.shape)]
            return
        self.parts[0], self.parts[1] = self._step(self.parts[0], self.parts[1], term.real)
        self.parts[2], self.parts[3] = self._step(self.parts[2], self.parts[3], term.imag)

    @property
    def value(self):
        if self.parts is None:
            return 0.0
        return (self.parts[0] + self.parts[1]) + 1j * (self.parts[2] + self.parts[3])


def compensated_sum(terms):
    """Neumaier summation in the given order."""
    accumulator = CompensatedSum()
    for term in terms:
        accumulator.add(term)
    return accumulator.value


def branch_power(w, alpha):
    """w^{-alpha} with arg w in (-3 pi / 2, pi / 2].

    The cut runs up from the origin, not down: w = lambda - i eps then stays on the
    principal branch for every lambda below i eps, as in the eigendecomposition oracle."""
    w = np.asarray(w, dtype=complex)
    arg = np.angle(w)
    arg = np.where(arg > 0.5 * np.pi, arg - 2.0 * np.pi, arg)
    return np.exp(-alpha * (np.log(np.abs(w)) + 1j * arg))


def _line(origin, direction, start, end, breaks):
    return {'kind': 'line', 'origin': complex(origin), 'direction': complex(direction),
            'start': float(start), 'end': float(end), 'breaks': [float(b) for b in breaks]}


def _circle(center, radius, start, end, breaks):
    return {'kind': 'circle', 'center': complex(center), 'radius': float(radius),
            'start': float(start), 'end': float(end), 'breaks': [float(b) for b in breaks]}


def _angle_breaks(start, end):
    panels = max(int(np.ceil(abs(end - start))), 2)
    return np.linspace(start, end, panels + 1)


def point_on(piece, t):
    t = np.asarray(t, dtype=float)
    if piece['kind'] == 'line':
        return piece['origin'] + t * piece['direction']
    return piece['center'] + piece['radius'] * np.exp(1j * t)


def tangent_on(piece, t):
    t = np.asarray(t, dtype=float)
    if piece['kind'] == 'line':
        return piece['direction'] * np.ones_like(t, dtype=complex)
    return 1j * piece['radius'] * np.exp(1j * t)


class ContourService:
    def __init__(self, app):
        self.app = app

    def truncation_radius(self, alpha_min, spectral_radius=0.0):
        """Radius beyond which the two ray tails contribute less than 1e-12."""
        if alpha_min <= 0.0:
            raise InvalidInput('Contour truncation needs Re alpha > 0', {'alpha_min': alpha_min})
        log_radius = -np.log(np.pi * alpha_min * TRUNCATION_TOLERANCE) / alpha_min
        if log_radius > MAX_LOG_RADIUS:
            raise ContourFailure(
                f'Re alpha = {alpha_min:.3g} needs a truncation radius beyond e^{MAX_LOG_RADIUS:.0f}',
                {'alpha_min': alpha_min})
        return float(np.exp(log_radius) * max(1.0, 2.0 * spectral_radius))

    def _base_pieces(self, epsilon, theta, r_trunc):
        shift = 1j * epsilon
        inner = 0.5 * epsilon
        radii = [inner]
        while radii[-1] * 2.0 < r_trunc:
            radii.append(radii[-1] * 2.0)
        radii.append(r_trunc)
        return [
            _line(shift, np.exp(1j * theta), r_trunc, inner, radii[::-1]),
            _circle(shift, inner, theta, 3.0 * np.pi - theta, _angle_breaks(theta, 3.0 * np.pi - theta)),
            _line(shift, np.exp(1j * (np.pi - theta)), inner, r_trunc, radii)
        ]

    def _closest(self, piece, lam):
        """Parameter of the point of `piece` closest to `lam`, and the distance."""
        lo, hi = sorted((piece['start'], piece['end']))
        if piece['kind'] == 'line':
            t = np.clip(np.real(np.conj(piece['direction']) * (lam - piece['origin'])), lo, hi)
        else:
            phi = np.angle(lam - piece['center'])
            phi += 2.0 * np.pi * np.round((0.5 * (lo + hi) - phi) / (2.0 * np.pi))
            t = np.clip(phi, lo, hi)
        return float(t), float(abs(point_on(piece, t) - lam))

    def _interval(self, piece, lam, radius):
        """Traversal-ordered parameters where `piece` enters and leaves the disk around `lam`."""
        lo, hi = sorted((piece['start'], piece['end']))
        if piece['kind'] == 'line':
            b = np.real(np.conj(piece['direction']) * (piece['origin'] - lam))
            c = abs(piece['origin'] - lam) ** 2 - radius ** 2
            root = np.sqrt(max(b * b - c, 0.0))
            u, v = -b - root, -b + root
        else:
            offset = lam - piece['center']
            d, r0 = abs(offset), piece['radius']
            cos_half = np.clip((r0 ** 2 + d ** 2 - radius ** 2) / (2.0 * r0 * d), -1.0, 1.0)
            half = np.arccos(cos_half)
            phi = np.angle(offset)
            phi += 2.0 * np.pi * np.round((0.5 * (lo + hi) - phi) / (2.0 * np.pi))
            u, v = phi - half, phi + half
        if u <= lo or v >= hi:
            raise ContourFailure('Eigenvalue detour crosses a junction of the contour',
                                 {'eigenvalue': [lam.real, lam.imag], 'radius': radius})
        return (u, v) if piece['start'] < piece['end'] else (v, u)

    def _detour(self, piece, lam, radius):
        t_star, _ = self._closest(piece, lam)
        forward = np.sign(piece['end'] - piece['start'])
        direction = forward * tangent_on(piece, t_star)
        direction /= abs(direction)
        left = np.imag(np.conj(direction) * (lam - point_on(piece, t_star))) > 0.0
        middle = -1j * direction if left else 1j * direction

        t_in, t_out = self._interval(piece, lam, radius)
        a_in = float(np.angle(point_on(piece, t_in) - lam))
        a_out = float(np.angle(point_on(piece, t_out) - lam))
        sweep = (a_out - a_in) % (2.0 * np.pi)
        if np.real(np.conj(np.exp(1j * (a_in + 0.5 * sweep))) * middle) > 0.0:
            a_end = a_in + sweep
        else:
            a_end = a_in - (2.0 * np.pi - sweep)

        def part(start, end):
            inside = [b for b in piece['breaks'] if min(start, end) < b < max(start, end)]
            breaks = [start] + inside + [end]
            if piece['kind'] == 'line':
                return _line(piece['origin'], piece['direction'], start, end, breaks)
            return _circle(piece['center'], piece['radius'], start, end, breaks)

        return [part(piece['start'], t_in),
                _circle(lam, radius, a_in, a_end, _angle_breaks(a_in, a_end)),
                part(t_out, piece['end'])]

    def _insert_bumps(self, pieces, spectrum, dist_min):
        radius = 2.0 * dist_min
        bumps = []
        for lam in sorted(spectrum, key=lambda z: (z.real, z.imag)):
            closest = [self._closest(piece, lam) for piece in pieces]
            index = int(np.argmin([d for _, d in closest]))
            if closest[index][1] >= dist_min:
                continue
            others = np.abs(np.asarray(spectrum) - lam)
            if np.sum(others < radius + dist_min) > 1:
                raise ContourFailure('Eigenvalue cluster blocks every deformation of the contour',
                                     {'eigenvalue': [lam.real, lam.imag], 'dist_min': dist_min})
            pieces = pieces[:index] + self._detour(pieces[index], lam, radius) + pieces[index + 1:]
            bumps.append(complex(lam))
            self.app.log.debug(f'Contour detours around the eigenvalue {lam:.6g}')
        return pieces, bumps

    def _panels(self, piece, spectrum):
        """Panel edges, bisected until each panel is shorter than its distance to the spectrum."""
        scale = 1.0 if piece['kind'] == 'line' else piece['radius']
        queue = [(a, b, 0) for a, b in zip(piece['breaks'][:-1], piece['breaks'][1:])]
        panels = []
        while queue:
            a, b, depth = queue.pop(0)
            if spectrum is not None and len(spectrum) and depth < MAX_REFINEMENT:
                samples = point_on(piece, np.linspace(a, b, 5))
                distance = np.min(np.abs(samples[:, None] - spectrum[None, :]))
                if scale * abs(b - a) > distance:
                    middle = 0.5 * (a + b)
                    queue[:0] = [(a, middle, depth + 1), (middle, b, depth + 1)]
                    continue
            panels.append((a, b))
        return panels

    def _discretize(self, pieces, nodes_per_unit, spectrum):
        x, w = leggauss(nodes_per_unit)
        nodes, weights = [], []
        for piece in pieces:
            for a, b in self._panels(piece, spectrum):
                t = 0.5 * (a + b) + 0.5 * (b - a) * x
                nodes.append(point_on(piece, t))
                weights.append(0.5 * (b - a) * w * tangent_on(piece, t))
        return np.concatenate(nodes), np.concatenate(weights)

    def build_contour(self, epsilon, theta, r_trunc=None, nodes_per_unit=16, alpha_min=None, spectrum=None,
                      spectral_radius=None):
        """Quadrature for the shifted contour around the upward cut from i epsilon.

        With `spectrum` known, detours are inserted around eigenvalues closer than
        dist_min to the path and panels are graded toward nearby eigenvalues."""
        if not 0.5 * np.pi < theta < np.pi:
            raise InvalidInput('theta must lie in (pi/2, pi)', {'theta': theta})
        if epsilon <= 0.0:
            raise InvalidInput('epsilon must be positive', {'epsilon': epsilon})

        spectrum = None if spectrum is None else np.asarray(spectrum, dtype=complex)
        if spectral_radius is None:
            spectral_radius = float(np.max(np.abs(spectrum))) if spectrum is not None and len(spectrum) else 0.0
        if r_trunc is None:
            r_trunc = self.truncation_radius(alpha_min if alpha_min is not None else 1.0, spectral_radius)
        dist_min = self.app.config['DIST_MIN_FACTOR'] * max(spectral_radius, epsilon)

        pieces = self._base_pieces(epsilon, theta, r_trunc)
        bumps = []
        if spectrum is not None:
            pieces, bumps = self._insert_bumps(pieces, spectrum, dist_min)
        else:
            self.app.log.warning('Spectrum unknown, contour is built without eigenvalue checks')

        nodes, weights = self._discretize(pieces, nodes_per_unit, spectrum)
        contour = Contour(theta=theta, epsilon=epsilon, r_trunc=r_trunc, nodes=nodes, weights=weights,
                          pieces=pieces, bumps=bumps, dist_min=dist_min)
        self.check_nodes(contour, spectrum)
        self.app.log.debug(f'Contour with {contour.size} nodes, R_trunc={r_trunc:.3e}, {len(bumps)} detours')
        return contour

    def with_loop(self, contour, center, radius, clockwise=True, nodes_per_unit=16, spectrum=None):
        """The contour with an extra closed circle around `center` appended."""
        end = -2.0 * np.pi if clockwise else 2.0 * np.pi
        loop = _circle(center, radius, 0.0, end, _angle_breaks(0.0, end))
        pieces = contour.pieces + [loop]
        spectrum = None if spectrum is None else np.asarray(spectrum, dtype=complex)
        nodes, weights = self._discretize(pieces, nodes_per_unit, spectrum)
        result = Contour(theta=contour.theta, epsilon=contour.epsilon, r_trunc=contour.r_trunc, nodes=nodes,
                         weights=weights, pieces=pieces, bumps=list(contour.bumps),
                         loops=contour.loops + [(complex(center), float(radius))], dist_min=contour.dist_min)
        self.check_nodes(result, spectrum)
        return result

    def check_nodes(self, contour, spectrum):
        if spectrum is None or not len(spectrum):
            return
        distance = float(np.min(np.abs(contour.nodes[:, None] - np.asarray(spectrum)[None, :])))
        if distance < contour.dist_min:
            raise ContourFailure(
                f'A quadrature node lies within {distance:.3e} of the spectrum',
                {'distance': distance, 'dist_min': contour.dist_min})

    def integrate(self, contour, fn):
        """Sum of w_j fn(z_j) over the nodes."""
        return compensated_sum(w * fn(z) for z, w in zip(contour.nodes, contour.weights))
