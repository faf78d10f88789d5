"""Shared name->strategy registry used by loaders, partitioners, reducers, and transforms."""

from __future__ import annotations

import threading
from typing import Generic, TypeVar

from .errors import DuplicateStrategyName, UnknownStrategy

T = TypeVar("T")


class Registry(Generic[T]):
    """Thread-safe registry. Names are case-sensitive ASCII and register once."""

    def __init__(self, kind: str):
        self._kind = kind
        self._items: dict[str, T] = {}
        self._lock = threading.Lock()

    def register(self, name: str, item: T) -> None:
        with self._lock:
            if name in self._items:
                raise DuplicateStrategyName(f"{self._kind} '{name}' is already registered")
            self._items[name] = item

    def get(self, name: str) -> T:
        with self._lock:
            try:
                return self._items[name]
            except KeyError:
                known = ", ".join(sorted(self._items))
                raise UnknownStrategy(
                    f"unknown {self._kind} '{name}' (registered: {known})"
                ) from None

    def __contains__(self, name: str) -> bool:
        with self._lock:
            return name in self._items

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._items)
