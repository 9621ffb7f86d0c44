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

class LorentzZetaError(Exception):
    """Base class of every failure raised by the library.

    The payload holds the numbers needed to reproduce or diagnose the failure
    and is written out as JSON by the command line interface."""

    exit_code = 3

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.message = message
        self.payload = dict(payload or {})

    def to_dict(self):
        return {
            'error': type(self).__name__,
            'message': self.message,
            'payload': self.payload
        }


class ConfigError(LorentzZetaError, ValueError):
    exit_code = 2


class Unsupported(LorentzZetaError, ValueError):
    pass


class InvalidInput(LorentzZetaError, ValueError):
    pass


class SingularMetric(LorentzZetaError, ArithmeticError):
    pass


class GeodesicFailure(LorentzZetaError, ArithmeticError):
    pass


class PoleProximity(LorentzZetaError, ArithmeticError):
    pass


class TruncationError(LorentzZetaError, ArithmeticError):
    pass


class IntegrationFailure(LorentzZetaError, ArithmeticError):
    pass


class ClassificationFailure(LorentzZetaError, ArithmeticError):
    pass


class NearSpectrum(LorentzZetaError, ArithmeticError):
    pass


class ContourFailure(LorentzZetaError, ArithmeticError):
    pass
