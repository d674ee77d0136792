"""
Brute-force enumeration of non-intersecting up-right lattice paths.

Cells are 1-based (row, column) pairs and a step moves one row down or one
column right. Used as an independent oracle against the output of the maps.
"""
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

Cell = Tuple[int, int]
CellFilter = Callable[[int, int], bool]


class PathEnumerator:
    """Enumerates directed paths, caching the path list per (start, end)"""

    def __init__(self, allowed: Optional[CellFilter] = None):
        self.allowed = allowed if allowed is not None else (lambda i, j: True)
        self._cache: Dict[Tuple[Cell, Cell], List[FrozenSet[Cell]]] = {}

    def paths(self, start: Cell, end: Cell) -> List[FrozenSet[Cell]]:
        key = (start, end)
        if key not in self._cache:
            self._cache[key] = [frozenset(p) for p in self._walk(start, end)]
        return self._cache[key]

    def _walk(self, start: Cell, end: Cell) -> Iterator[Tuple[Cell, ...]]:
        (i, j), (k, l) = start, end
        if i > k or j > l or not self.allowed(i, j):
            return
        if (i, j) == (k, l):
            yield ((i, j),)
            return
        for step in ((i + 1, j), (i, j + 1)):
            for rest in self._walk(step, end):
                yield ((i, j),) + rest

    def non_intersecting(self, pairs: Sequence[Tuple[Cell, Cell]]) -> Iterator[FrozenSet[Cell]]:
        """Yield the union of cells of every vertex-disjoint tuple of paths"""
        path_lists = [self.paths(s, e) for s, e in pairs]

        def extend(q: int, used: FrozenSet[Cell]) -> Iterator[FrozenSet[Cell]]:
            if q == len(path_lists):
                yield used
                return
            for path in path_lists[q]:
                if used.isdisjoint(path):
                    yield from extend(q + 1, used | path)

        yield from extend(0, frozenset())
