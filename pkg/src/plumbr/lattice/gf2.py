"""Álgebra lineal sobre GF(2) con bitsets enteros."""

from collections.abc import Hashable, Iterable


def gf2_rank(rows: list[int], n_cols: int) -> int:
    """Rango sobre GF(2) por eliminación gaussiana."""
    work = rows[:]
    rank = 0
    for col in range(n_cols):
        pivot = next(
            (r for r in range(rank, len(work)) if (work[r] >> col) & 1), None
        )
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and (work[r] >> col) & 1:
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


class GF2System:
    """Sistema lineal sobre GF(2) con incógnitas indexadas por claves.

    Cada ecuación es la suma (XOR) de un conjunto de incógnitas igualada a
    0 o 1. Repetir una incógnita en la misma ecuación la cancela.
    """

    def __init__(self) -> None:
        self._index: dict[Hashable, int] = {}
        self._keys: list[Hashable] = []
        self._equations: list[tuple[int, int]] = []

    @property
    def n_vars(self) -> int:
        return len(self._keys)

    @property
    def n_equations(self) -> int:
        return len(self._equations)

    def variable(self, key: Hashable) -> int:
        """Índice de la incógnita ``key``, creándola si no existe."""
        if key not in self._index:
            self._index[key] = len(self._keys)
            self._keys.append(key)
        return self._index[key]

    def add_equation(self, keys: Iterable[Hashable], rhs: int = 0) -> None:
        row = 0
        for key in keys:
            row ^= 1 << self.variable(key)
        self._equations.append((row, rhs & 1))

    def _reduce(self) -> tuple[list[int], list[int], bool]:
        """Forma escalonada reducida; devuelve filas, columnas pivote y consistencia."""
        nv = self.n_vars
        rows = [row | (rhs << nv) for row, rhs in self._equations]
        pivots: list[int] = []
        for col in range(nv):
            rank = len(pivots)
            found = next(
                (r for r in range(rank, len(rows)) if (rows[r] >> col) & 1), None
            )
            if found is None:
                continue
            rows[rank], rows[found] = rows[found], rows[rank]
            for r in range(len(rows)):
                if r != rank and (rows[r] >> col) & 1:
                    rows[r] ^= rows[rank]
            pivots.append(col)
        consistent = all(
            not (row >> nv) & 1 for row in rows[len(pivots) :]
        )
        return rows, pivots, consistent

    def solve(self) -> frozenset[Hashable] | None:
        """Una solución particular (libres en 0) como conjunto de claves en 1.

        Returns:
            Claves de las incógnitas que valen 1, o None si es inconsistente
        """
        rows, pivots, consistent = self._reduce()
        if not consistent:
            return None
        nv = self.n_vars
        return frozenset(
            self._keys[col]
            for r, col in enumerate(pivots)
            if (rows[r] >> nv) & 1
        )

    def nullspace(self) -> list[frozenset[Hashable]]:
        """Base del espacio de soluciones homogéneas."""
        rows, pivots, _ = self._reduce()
        pivot_set = set(pivots)
        basis: list[frozenset[Hashable]] = []
        for free in range(self.n_vars):
            if free in pivot_set:
                continue
            ones = {self._keys[free]}
            for r, col in enumerate(pivots):
                if (rows[r] >> free) & 1:
                    ones.add(self._keys[col])
            basis.append(frozenset(ones))
        return basis
