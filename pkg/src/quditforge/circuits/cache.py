"""Expression cache: one entry per structurally distinct gate expression.

Caching the same expression twice returns the existing reference, so a
circuit full of identical gates validates its definition exactly once.
Entries also hold the lazily built simplification bundles and compiled
evaluator programs; builds are serialized per entry so concurrent
initializations compile each expression exactly once.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from quditforge.symbolic.unitary import UnitaryExpression


@dataclass
class CacheEntry:
    ref: int
    expr: UnitaryExpression
    # Lazily built artifacts, keyed by kind ("bundle:grad", "program:value", ...).
    built: dict[str, object] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


class ExpressionCache:
    """Append-only map from structural identity to cached gate artifacts."""

    def __init__(self):
        self._by_key: dict[tuple, int] = {}
        self._entries: list[CacheEntry] = []
        self._lock = threading.Lock()
        self.compile_count = 0  # number of factory builds performed

    def __len__(self) -> int:
        return len(self._entries)

    def intern(self, expr: UnitaryExpression) -> int:
        """Return the ref for this expression, inserting it if new."""
        key = expr.structural_key
        ref = self._by_key.get(key)
        if ref is not None:
            return ref
        with self._lock:
            ref = self._by_key.get(key)
            if ref is None:
                ref = len(self._entries)
                self._entries.append(CacheEntry(ref=ref, expr=expr))
                self._by_key[key] = ref
        return ref

    def entry(self, ref: int) -> CacheEntry:
        return self._entries[ref]

    def expr(self, ref: int) -> UnitaryExpression:
        return self._entries[ref].expr

    def get_or_build(self, ref: int, kind: str, factory):
        """Fetch a cached artifact, building it at most once per cache."""
        entry = self._entries[ref]
        hit = entry.built.get(kind)
        if hit is not None:
            return hit
        with entry.lock:
            hit = entry.built.get(kind)
            if hit is None:
                hit = factory()
                with self._lock:
                    self.compile_count += 1
                entry.built[kind] = hit
        return hit
