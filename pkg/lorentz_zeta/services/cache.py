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

import zlib

import numpy as np

CACHE = {}
MAX_ENTRIES = 4096


def _key_part(value):
    if isinstance(value, np.ndarray):
        return repr(value.tolist())
    if isinstance(value, (list, tuple)):
        return repr([_key_part(v) for v in value])
    return repr(value)


def cache_for(entries=MAX_ENTRIES):
    def cache(fn):
        def wrapper(*args, **kwargs):
            fn_hash_base = fn.__qualname__
            fn_hash_base += _key_part(args)
            fn_hash_base += _key_part(sorted(kwargs.items()))
            fn_hash = zlib.crc32(fn_hash_base.encode('utf8')) & 0xffffffff

            key_base, cached = CACHE.get(fn_hash, (None, None))

            if key_base == fn_hash_base:
                return cached

            result = fn(*args, **kwargs)
            if len(CACHE) >= entries:
                CACHE.pop(next(iter(CACHE)))
            CACHE[fn_hash] = (fn_hash_base, result)
            return result
        return wrapper
    return cache


class CacheService:
    def __init__(self, app):
        self.app = app

    def clear_cache(self):
        CACHE.clear()

    def size(self):
        return len(CACHE)
