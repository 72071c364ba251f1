"""Hashable immutable mapping used for environments and stores."""

from __future__ import annotations

from collections.abc import Mapping


class FMap(Mapping):
    __slots__ = ("_d", "_hash")

    def __init__(self, items=()):
        self._d = dict(items)
        self._hash = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, FMap):
            if self._hash is not None and other._hash is not None and self._hash != other._hash:
                return False
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def set(self, key, value) -> "FMap":
        d = dict(self._d)
        d[key] = value
        return FMap(d)

    def __repr__(self):
        return f"FMap({self._d!r})"


EMPTY = FMap()
