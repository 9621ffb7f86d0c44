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


import hashlib
import json
import os

import numpy as np
import pandas as pd

from lorentz_zeta import __version__

FLOAT_FORMAT = '%.17g'


def to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(value.real), 'im': float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    return value


def sha256_of(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as artifact:
        for block in iter(lambda: artifact.read(65536), b''):
            digest.update(block)
    return digest.hexdigest()


class ResultsClient:
    """Writes the artifacts of one run and the manifest describing them."""

    def __init__(self, app):
        self.app = app
        self.directory = None
        self.artifacts = []

    def open(self, directory):
        os.makedirs(directory, exist_ok=True)
        self.directory = directory
        self.artifacts = []
        return self

    def _path(self, name):
        if self.directory is None:
            raise RuntimeError('No output directory opened')
        self.artifacts.append(name)
        return os.path.join(self.directory, name)

    def write_json(self, name, data):
        path = self._path(name)
        with open(path, 'w') as output:
            json.dump(to_jsonable(data), output, sort_keys=True, indent=2)
            output.write('\n')
        self.app.log.debug(f'Wrote {path}')
        return path

    def write_csv(self, name, frame):
        if not isinstance(frame, pd.DataFrame):
            frame = pd.DataFrame(frame)
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        self.app.log.debug(f'Wrote {path} ({len(frame)} rows)')
        return path

    def write_manifest(self, subcommand, config, seed):
        digests = {name: sha256_of(os.path.join(self.directory, name)) for name in sorted(set(self.artifacts))}
        manifest = {
            'subcommand': subcommand,
            'version': __version__,
            'seed': seed,
            'out': self.directory,
            'config': config.to_dict(),
            'threads': self.app.config['THREADS'],
            'artifacts': digests
        }
        path = os.path.join(self.directory, 'manifest.json')
        with open(path, 'w') as output:
            json.dump(to_jsonable(manifest), output, sort_keys=True, indent=2)
            output.write('\n')
        self.app.log.info(f'Manifest written to {path}')
        return manifest
