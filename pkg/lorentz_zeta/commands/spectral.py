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


import dataclasses

import click
import numpy as np
import pandas as pd

from lorentz_zeta.commands import experiment_command, parse_complex
from lorentz_zeta.exceptions import ConfigError, InvalidInput

ORACLE_LIMIT = 1024


def complex_option(ctx, param, value):
    if value is None:
        return None
    try:
        return complex(value.replace(' ', '').replace('i', 'j'))
    except ValueError:
        raise click.BadParameter(f'{value!r} is not a complex number')


def gaussian_vector(operator, center=None, width=1.0):
    """Normalized Gaussian bump at `center` in the first fiber component."""
    center = np.zeros(operator.dimension) if center is None else np.asarray(center, dtype=float)
    offset = operator.coordinates() - center
    values = np.zeros((len(offset), operator.rank), dtype=complex)
    values[:, 0] = np.exp(-np.sum(offset ** 2, axis=-1) / width ** 2)
    vector = values.ravel()
    return vector / np.sqrt(np.sum(operator.unknown_weights * np.abs(vector) ** 2))


@experiment_command('assemble')
def assemble(run):
    """Operator statistics and the adjoint defect of the assembled lattice operator (assemble.json)."""
    operator = run.operator()
    radius = run.family.perturbation_radius
    defect = run.services.lattice.adjoint_defect(operator, outside=radius if 0.0 < radius < np.inf else None)
    run.results.write_json('assemble.json', {**operator.stats(), 'adjoint_defect': defect.to_dict()})


@experiment_command('power')
@click.option('--alpha', default=None, callback=complex_option, help='Exponent, e.g. 1.5 or 1.5+0.5i.')
@click.option('--epsilon', default=None, type=click.FloatRange(min=0.0, min_open=True), help='Shift i epsilon.')
@click.option('--theta', default=None, type=float, help='Ray angle in (pi/2, pi).')
@click.option('--rtrunc', default=None, type=click.FloatRange(min=0.0, min_open=True), help='Truncation radius.')
def power(run, alpha, epsilon, theta, rtrunc):
    """(P - i eps)^{-alpha} applied to a Gaussian test section (power.csv, power.json)."""
    spec = run.experiment.contour
    alpha = alpha if alpha is not None else parse_complex(run.param('alpha', 1.0))
    epsilon = epsilon or spec.epsilon
    spec = dataclasses.replace(spec, epsilon=epsilon, theta=theta or spec.theta, rtrunc=rtrunc or spec.rtrunc)
    run.app.config['CONTOUR'] = spec

    operator = run.operator()
    spectral = run.services.spectral
    contour = spectral.default_contour(operator, epsilon, [alpha])
    vector = gaussian_vector(operator, run.param('center'), float(run.param('width', 1.0)))
    value = spectral.complex_power(operator, epsilon, alpha, contour, vector=vector, mode='vector')

    report = {
        'alpha': [alpha.real, alpha.imag],
        'epsilon': epsilon,
        'contour': contour.to_dict(),
        'norm': float(np.sqrt(np.sum(operator.unknown_weights * np.abs(value) ** 2)))
    }
    if operator.unknowns <= ORACLE_LIMIT:
        oracle = spectral.eigen_power(operator, epsilon, alpha) @ vector
        report['oracle_rel_error'] = float(np.linalg.norm(value - oracle) / np.linalg.norm(oracle))
    run.results.write_json('power.json', report)

    coordinates = np.repeat(operator.coordinates(), operator.rank, axis=0)
    frame = pd.DataFrame(coordinates, columns=[f'x{i}' for i in range(operator.dimension)])
    frame['fiber'] = np.tile(np.arange(operator.rank), len(operator.weights))
    frame['value_re'] = value.real
    frame['value_im'] = value.imag
    run.results.write_csv('power.csv', frame)


@experiment_command('zeta')
def zeta(run):
    """Fiber traces of the diagonal of (P - i eps)^{-alpha} over an alpha sweep (zeta.csv)."""
    operator = run.operator()
    alphas = [parse_complex(a) for a in run.param('alphas', [0.5, 1.0, 1.5, 2.5])]
    points = np.asarray(run.param('points', [[0.0] * run.dimension]), dtype=float)
    if points.ndim != 2 or points.shape[1] != run.dimension:
        raise ConfigError(f'"points" must be a list of {run.dimension}-vectors', {'key': 'points'})
    epsilon = run.experiment.contour.epsilon
    table = run.services.spectral.zeta_diagonal(operator, epsilon, alphas, points)
    run.results.write_csv('zeta.csv', table)


@experiment_command('ambiguity')
def ambiguity(run):
    """Rank of the difference between the power along a contour and along the same contour with
    an extra loop around an eigenvalue (ambiguity.json)."""
    operator = run.operator()
    spectral = run.services.spectral
    epsilon = run.experiment.contour.epsilon
    alpha = parse_complex(run.param('alpha', 1.5))

    spectrum = spectral.spectrum(operator)
    if spectrum is None:
        raise InvalidInput('Ambiguity reports need the full spectrum', {'unknowns': operator.unknowns})
    center = run.param('center')
    if center is None:
        center = spectrum[np.argmin(np.abs(spectrum - 1j * epsilon))]
    else:
        center = parse_complex(center, 'center')
    distances = np.abs(spectrum - center)
    outside = distances[distances > 1e-8 * max(1.0, abs(center))]
    radius = float(run.param('radius', 0.5 * outside.min() if len(outside) else 0.5))

    contour_a = spectral.default_contour(operator, epsilon, [alpha])
    contour_b = run.services.contour.with_loop(contour_a, center, radius, clockwise=True,
                                               nodes_per_unit=run.experiment.contour.nodes_per_unit,
                                               spectrum=spectrum)
    report = spectral.contour_ambiguity(operator, epsilon, alpha, contour_a, contour_b)
    enclosed = int(np.sum(distances < radius))
    run.results.write_json('ambiguity.json', {
        **report.to_dict(), 'center': [complex(center).real, complex(center).imag], 'radius': radius,
        'enclosed_eigenvalues': enclosed, 'contour': contour_b.to_dict()})


@experiment_command('decay')
def decay(run):
    """|Im lambda| times the weighted resolvent norm along the imaginary axis (decay.json)."""
    operator = run.operator()
    im_values = [float(v) for v in run.param('im_values', [4.0, 16.0, 64.0])]
    rows = run.services.spectral.resolvent_decay_scan(
        operator, im_values, samples=int(run.param('samples', 4)), seed=run.experiment.seed,
        iterations=int(run.param('iterations', 100)))
    run.results.write_json('decay.json', {
        'rows': [dataclasses.asdict(row) for row in rows],
        'max_product': max(row.product for row in rows)})
