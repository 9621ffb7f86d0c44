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

from lorentz_zeta.commands import experiment_command

DEFAULT_SPACINGS = (1 / 16, 1 / 32, 1 / 64)


@experiment_command('blcheck')
def blcheck(run):
    """Bochner-Lichnerowicz residuals under grid refinement and the Clifford checks (blcheck.json)."""
    clifford = run.services.clifford
    n = run.dimension
    L = float(run.param('L', 1.0))
    spacings = [float(h) for h in run.param('spacings', DEFAULT_SPACINGS)]
    center = run.param('center', [0.0] * n)
    width = float(run.param('width', 0.25))

    residuals = []
    for hx in spacings:
        m = int(round(2 * L / hx))
        u = clifford.test_section(L, m, run.rep.rank, center, width=width)
        residuals.append(clifford.bochner_lichnerowicz_residual(run.family, run.rep, u, run.twist))

    orders = [float(np.log2(coarse.residual / fine.residual))
              for coarse, fine in zip(residuals, residuals[1:]) if fine.residual > 0.0]
    ratios = [coarse.residual / fine.residual for coarse, fine in zip(residuals, residuals[1:]) if fine.residual > 0.0]
    report = {
        'hx': [r.hx for r in residuals],
        'residual': [r.residual for r in residuals],
        'scale': [r.scale for r in residuals],
        'refinement_ratio': ratios,
        'order_estimate': orders[-1] if orders else None,
        'clifford': clifford.clifford_residuals(run.rep)
    }
    run.app.log.info(f"Bochner-Lichnerowicz order estimate {report['order_estimate']}")
    run.results.write_json('blcheck.json', report)
