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


from math import factorial

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.integrate import quad

from lorentz_zeta.dto.hadamard import ResidueReport, ZetaSample
from lorentz_zeta.exceptions import InvalidInput, PoleProximity, TruncationError

POLE_DISTANCE = 1e-6
RESIDUE_STEP = 1e-3
LINE_HALF_WIDTH = 40.0
LINE_PANEL_WIDTH = 1.0
LINE_PANEL_NODES = 16
LINE_DECAY = 1e-12


def _nearest_integer(value):
    value = complex(value)
    return int(round(value.real)), abs(value - round(value.real))


def vertical_line(c, half_width=LINE_HALF_WIDTH, panel_width=LINE_PANEL_WIDTH, nodes=LINE_PANEL_NODES):
    """Composite Gauss-Legendre nodes alpha = c + iy and weights in y over [-half_width, half_width]."""
    x, w = leggauss(nodes)
    edges = np.arange(-half_width, half_width + 0.5 * panel_width, panel_width)
    y = np.concatenate([0.5 * (b - a) * x + 0.5 * (b + a) for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    return c + 1j * y, weights


class ExponentialProfile:
    """Schwartz profile with Fourier side f^(t) = t e^{-t} on (0, inf)."""

    name = 't*exp(-t)'

    def transform(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0.0, t * np.exp(-t), 0.0)

    def mellin(self, alpha):
        return special.gamma(np.asarray(alpha, dtype=complex) + 1.0)

    def moment(self, n):
        """c_0 = int_0^inf f^(t) t^{n/2-1} dt."""
        return float(special.gamma(n / 2.0 + 1.0))

    def function(self, z):
        w = np.sqrt(-1j * np.asarray(z, dtype=complex))
        return 2.0 * w * special.kv(1, 2.0 * w)


class ResidueService:
    def __init__(self, app):
        self.app = app
        self.profiles = {
            'exponential': ExponentialProfile
        }

    def get_profile(self, name='exponential'):
        if name not in self.profiles:
            raise InvalidInput(f'Unknown Schwartz profile {name}', {'profile': name})
        return self.profiles[name]()

    def flat_F_alpha_diag(self, n, alpha, lam):
        """F^(alpha)_lambda(0) of the flat Lorentzian model.

        Rotating the time momentum reduces the integral to a Euclidean one:
        F = i Gamma(alpha + 1 - n/2) (-lambda)^{n/2 - alpha - 1} / (2^n pi^{n/2})."""
        alpha = complex(alpha)
        lam = complex(lam)
        if lam.imag <= 0.0:
            raise InvalidInput('F_alpha needs Im lambda > 0', {'lambda': [lam.real, lam.imag]})
        nearest, distance = _nearest_integer(alpha)
        if nearest <= -1 and distance < 1e-12:
            raise InvalidInput(f'alpha = {nearest} is excluded', {'alpha': [alpha.real, alpha.imag]})
        shifted = alpha + 1.0 - n / 2.0
        nearest, distance = _nearest_integer(shifted)
        if nearest <= 0 and distance < POLE_DISTANCE:
            raise PoleProximity(
                f'alpha is within {distance:.1e} of the pole at {nearest - 1 + n / 2}',
                {'alpha': [alpha.real, alpha.imag], 'pole': nearest - 1 + n / 2})
        return 1j * special.gamma(shifted) * (-lam) ** (n / 2.0 - alpha - 1.0) / (2 ** n * np.pi ** (n / 2.0))

    def flat_F_alpha_quadrature(self, n, alpha, lam):
        """The same quantity by adaptive radial quadrature of the rotated integral."""
        alpha = complex(alpha)
        lam = complex(lam)

        def integrand(r):
            return r ** (n - 1) * (r * r - lam) ** (-alpha - 1.0)

        real, _ = quad(lambda r: integrand(r).real, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        imag, _ = quad(lambda r: integrand(r).imag, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        sphere = 2.0 * np.pi ** (n / 2.0) / special.gamma(n / 2.0)
        return 1j * sphere * special.gamma(alpha + 1.0) * (real + 1j * imag) / (2.0 * np.pi) ** n

    def mellin_gamma_factor(self, alpha, m):
        """(-1)^m Gamma(1 - alpha) / (Gamma(1 - alpha - m) Gamma(alpha + m)).

        The Gamma ratio in front is a finite product, so poles of Gamma(1 - alpha)
        never appear and the factor is entire in alpha."""
        alpha = complex(alpha)
        product = 1.0 + 0.0j
        for j in range(m):
            product *= 1.0 - alpha - m + j
        return (-1) ** m * product * special.rgamma(alpha + m)

    def mellin_gamma_factor_precise(self, alpha, m, dps=30):
        with mpmath.workdps(dps):
            value = mpmath.gammaprod([1 - mpmath.mpmathify(alpha)],
                                     [1 - mpmath.mpmathify(alpha) - m, mpmath.mpmathify(alpha) + m])
            return complex((-1) ** m * value)

    def flat_zeta_density(self, n, alpha, epsilon, k=0):
        """k-th term of the diagonal density of (P - i eps)^{-alpha} in the flat model."""
        return self.mellin_gamma_factor(alpha, k) * self.flat_F_alpha_diag(n, k + complex(alpha) - 1.0, 1j * epsilon)

    def flat_zeta_residue(self, n, k, epsilon=1.0, step=RESIDUE_STEP):
        """Residue at alpha = n/2 - k from (alpha - pole) * density averaged over three directions.

        The cube roots of unity cancel the first and second order terms of the Laurent tail."""
        pole = n / 2.0 - k
        values = []
        for j in range(3):
            offset = step * np.exp(2j * np.pi * j / 3.0)
            values.append(offset * self.flat_zeta_density(n, pole + offset, epsilon, k))
        residue = sum(values) / 3.0
        self.app.log.debug(f'Flat residue n={n} k={k}: {residue:.12g}')
        return residue

    def residue_prediction(self, k, n, u_k):
        if not 0 <= k <= n // 2 - 1:
            raise InvalidInput(f'No residue for k={k} in dimension {n}', {'k': k, 'n': n})
        return 1j * np.asarray(u_k) / (2 ** n * np.pi ** (n / 2.0) * factorial(n // 2 - k - 1))

    def residue_report(self, n, k, u_k, epsilon=1.0):
        """Both residue normalisations for the trace of u_k, checked against the flat model."""
        trace = complex(np.trace(np.atleast_2d(u_k)))
        transport_constant = 1j / (2 ** n * np.pi ** (n / 2.0) * factorial(n // 2 - k - 1))
        transport = complex(np.trace(np.atleast_2d(self.residue_prediction(k, n, u_k))))

        if n // 2 - 1 >= 1:
            alternate_constant = 2.0 / (1j * (4.0 * np.pi) ** (n / 2.0) * special.gamma(n / 2.0 - 1.0))
            alternate = alternate_constant * trace
            ratio = alternate_constant / transport_constant
        else:
            alternate_constant = alternate = ratio = None

        flat_residue = self.flat_zeta_residue(n, k, epsilon)
        if abs(flat_residue - transport_constant) < 1e-6 * abs(transport_constant):
            confirmed = 'transport'
        elif alternate_constant is not None and abs(flat_residue - alternate_constant) < 1e-6 * abs(alternate_constant):
            confirmed = 'alternate'
        else:
            confirmed = 'none'
        self.app.log.info(f'Residue n={n} k={k}: transport {transport:.10g}, flat model confirms {confirmed}')

        return ResidueReport(n=n, k=k, transport=transport, alternate=alternate, ratio=ratio,
                             flat_residue=flat_residue, confirmed=confirmed)

    def flat_plus_density(self, n, alpha, epsilon, rank=1):
        """Diagonal density of (P + i eps)^{-alpha} in the flat model, the adjoint of the (P - i eps) one."""
        alpha = complex(alpha)
        return np.conj(self.flat_zeta_density(n, np.conj(alpha), epsilon, 0)) * rank

    def schwartz_function_of_power(self, zeta, profile=None, c=1.5, epsilon=1.0, half_width=LINE_HALF_WIDTH,
                                   provenance='flat-closed-form'):
        """f(P + i eps) from the Mellin representation over the line Re alpha = c.

        `zeta` maps alpha to (P + i eps)^{-alpha}, a scalar or a matrix. Returns the value
        together with the samples taken along the line."""
        profile = profile or ExponentialProfile()
        alphas, weights = vertical_line(c, half_width)
        samples = [ZetaSample(alpha=complex(a), epsilon=epsilon, value=zeta(a), provenance=provenance) for a in alphas]

        factors = np.exp(1j * np.pi * alphas / 2.0) * special.gamma(alphas) * profile.mellin(alphas)
        magnitudes = np.array([abs(f) * np.max(np.abs(s.value)) for f, s in zip(factors, samples)])
        tail = max(magnitudes[0], magnitudes[-1])
        if not np.all(np.isfinite(magnitudes)) or tail > LINE_DECAY * np.max(magnitudes):
            raise TruncationError(
                f'Integrand has not decayed at |Im alpha| = {half_width}',
                {'bound': float(tail), 'peak': float(np.max(magnitudes)), 'half_width': half_width})

        total = 0.0
        for weight, factor, sample in zip(weights, factors, samples):
            total = total + weight * factor * np.asarray(sample.value)
        return total / (2.0 * np.pi), samples

    def small_h_terms(self, n, h, rank, epsilon, u1_trace=0.0, profile=None):
        """Leading h^{-n} and subleading h^{2-n} terms of the density of f(h^2 (P + i eps))."""
        profile = profile or ExponentialProfile()
        scale = 1j * 2 ** n * np.pi ** (n / 2.0)
        leading = np.exp(1j * n * np.pi / 4.0) * profile.moment(n) * rank * h ** -n / scale
        coefficient = -1j * epsilon * rank + u1_trace
        subleading = (np.exp(1j * (n - 2) * np.pi / 4.0) * complex(profile.mellin(n / 2.0 - 1.0))
                      * coefficient * h ** (2 - n) / scale)
        return {'leading': complex(leading), 'subleading': complex(subleading)}

    def small_h_scan(self, n, hs=(0.5, 0.25, 0.125), rank=1, epsilon=0.01, profile=None):
        """h-scaling of the flat density of f(h^2 (P + i eps)) and the fitted log-log slope."""
        profile = profile or ExponentialProfile()
        c = n / 2.0 + 0.5
        rows = []
        for h in hs:
            value, _ = self.schwartz_function_of_power(
                lambda a: h ** (-2.0 * a) * self.flat_plus_density(n, a, epsilon, rank),
                profile, c=c, epsilon=epsilon)
            terms = self.small_h_terms(n, h, rank, epsilon, profile=profile)
            rows.append({'h': h, 'value': complex(value), **terms})

        logs = np.log([row['h'] for row in rows])
        slope = float(np.polyfit(logs, np.log([abs(row['value']) for row in rows]), 1)[0])
        self.app.log.info(f'Small-h slope in dimension {n}: {slope:.4f}')
        return {'n': n, 'rank': rank, 'epsilon': epsilon, 'c0': profile.moment(n), 'slope': slope, 'rows': rows}
