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


from concurrent.futures import ThreadPoolExecutor


class WorkerPool:
    """Thread pool shared by the services; `map` returns results in input order."""

    def __init__(self, app, threads=1):
        self.app = app
        self.threads = max(1, int(threads))
        self.executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix='lorentz_zeta')

    def map(self, fn, items):
        items = list(items)
        if self.threads == 1 or len(items) <= 1:
            return [fn(i) for i in items]
        return list(self.executor.map(fn, items))

    def shutdown(self):
        self.executor.shutdown(wait=True)
