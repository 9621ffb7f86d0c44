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
import pandas as pd

from lorentz_zeta.commands import experiment_command, parse_complex

DEFAULT_ALPHAS = (0.25, 0.5, 0.75, 1.25, 1.5, 2.5, [1.5, 1.0], [0.5, -2.0])


@experiment_command('hadamard')
def hadamard(run):
    """u1 on the diagonal against R_g/12 + F, with the residues it produces (hadamard.json)."""
    n = run.dimension
    x0 = np.asarray(run.param('x0', [0.0] * n), dtype=float)
    spacing = float(run.param('spacing', 0.02))
    epsilon = run.experiment.contour.epsilon

    report = run.services.hadamard.transport_u1_origin(run.family, run.rep, x0, run.twist, spacing=spacing)
    coefficients = [run.rep.identity, report.numeric]
    residues = [run.services.residue.residue_report(n, k, coefficients[k], epsilon).to_dict()
                for k in range(n // 2)]

    run.results.write_json('hadamard.json', {**report.to_dict(), 'residues': residues})


@experiment_command('zeta-flat')
def zeta_flat(run):
    """Diagonal zeta density of the flat model along an alpha sweep (zeta_flat.csv, zeta_flat_residues.json)."""
    residue = run.services.residue
    n = run.dimension
    epsilon = float(run.param('epsilon', run.experiment.contour.epsilon))
    alphas = [parse_complex(a) for a in run.param('alphas', DEFAULT_ALPHAS)]

    rows = []
    for alpha in alphas:
        value = complex(residue.flat_zeta_density(n, alpha, epsilon))
        rows.append({'alpha_re': alpha.real, 'alpha_im': alpha.imag, 'value_re': value.real, 'value_im': value.imag})
    run.results.write_csv('zeta_flat.csv', pd.DataFrame(rows))

    residues = [residue.residue_report(n, k, np.eye(1), epsilon).to_dict() for k in range(n // 2)]
    run.results.write_json('zeta_flat_residues.json', {'n': n, 'epsilon': epsilon, 'residues': residues})


@experiment_command('smallh')
def smallh(run):
    """h-scaling of the density of f(h^2 (P + i eps)) for the built-in profile (smallh.json)."""
    hs = tuple(float(h) for h in run.param('hs', (0.5, 0.25, 0.125)))
    epsilon = float(run.param('epsilon', 0.01))
    scan = run.services.residue.small_h_scan(run.dimension, hs, rank=run.rep.rank, epsilon=epsilon)
    run.results.write_json('smallh.json', scan)
