"""Forma de intersección exacta de un grafo de plumbing.

Todo el álgebra lineal de este módulo es exacta: enteros de Python y
``fractions.Fraction``. La definición negativa se certifica con los pivotes
de una descomposición LDLᵀ racional; el determinante se calcula por
eliminación libre de fracciones (Bareiss) y se contrasta con el producto de
los factores invariantes de la forma normal de Smith.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import sympy
from sympy import ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from plumbr.errors import DimensionMismatch, NotNegativeDefinite, SingularMatrix
from plumbr.lattice.graph import PlumbingGraph

logger = logging.getLogger(__name__)

IntMatrix = tuple[tuple[int, ...], ...]
LatticePoint = tuple[int, ...]


# =============================================================================
# Descomposiciones exactas
# =============================================================================


def _ldl(
    matrix: Sequence[Sequence[int]], require_negative: bool
) -> tuple[list[list[Fraction]], list[Fraction]]:
    n = len(matrix)
    lower = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: list[Fraction] = []

    for j in range(n):
        pivot = Fraction(matrix[j][j]) - sum(
            (lower[j][k] ** 2 * pivots[k] for k in range(j)), Fraction(0)
        )
        if require_negative and pivot >= 0:
            raise NotNegativeDefinite(j, pivot)
        if pivot == 0:
            raise SingularMatrix(f"zero pivot at index {j}")
        pivots.append(pivot)
        for i in range(j + 1, n):
            acc = Fraction(matrix[i][j]) - sum(
                (lower[i][k] * lower[j][k] * pivots[k] for k in range(j)),
                Fraction(0),
            )
            lower[i][j] = acc / pivot
    return lower, pivots


def ldl_decomposition(
    matrix: Sequence[Sequence[int]],
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Descomposición M = L·D·Lᵀ sin pivoteo, sobre los racionales.

    Args:
        matrix: Matriz simétrica entera

    Returns:
        (L, D): L unitriangular inferior y la lista de pivotes de D

    Raises:
        SingularMatrix: Si aparece un pivote nulo
    """
    return _ldl(matrix, require_negative=False)


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Determinante por eliminación libre de fracciones."""
    if not matrix:
        return 1
    return int(sympy.Matrix(matrix).det(method="bareiss"))


@dataclass(frozen=True)
class DiscriminantData:
    """Forma normal de Smith U·M·V = D con transformaciones unimodulares."""

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    @property
    def order(self) -> int:
        """Orden del grupo discriminante, ∏ dᵢ."""
        result = 1
        for d in self.diagonal:
            result *= d
        return result

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Factores invariantes no triviales (dᵢ > 1)."""
        return tuple(d for d in self.diagonal if d != 1)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> DiscriminantData:
    """Forma normal de Smith con seguimiento de U y V (vía sympy).

    Los factores diagonales se devuelven positivos, con d₁ | d₂ | … | dₙ.

    Raises:
        SingularMatrix: Si la matriz es singular
    """
    diagonal, left, right = smith_normal_decomp(sympy.Matrix(matrix), domain=ZZ)
    n = len(matrix)
    d = [int(diagonal[i, i]) for i in range(n)]
    if 0 in d:
        raise SingularMatrix("matrix is singular")

    u = [[int(left[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if d[i] < 0:
            d[i] = -d[i]
            u[i] = [-x for x in u[i]]

    logger.debug(f"Smith normal form diagonal: {d}")
    return DiscriminantData(
        diagonal=tuple(d),
        left=tuple(tuple(row) for row in u),
        right=tuple(tuple(int(right[i, j]) for j in range(n)) for i in range(n)),
    )


def mat_mul(x: Sequence[Sequence[int]], y: Sequence[Sequence[int]]) -> IntMatrix:
    """Producto de matrices enteras."""
    columns = list(zip(*y))
    return tuple(
        tuple(sum(p * q for p, q in zip(row, col)) for col in columns) for row in x
    )


# =============================================================================
# IntersectionForm
# =============================================================================


@dataclass(frozen=True)
class IntersectionForm:
    """Retículo L = H₂(X, ℤ) con su forma de intersección M.

    Las coordenadas de cualquier vector siguen el orden canónico de los
    vértices del grafo.
    """

    graph: PlumbingGraph
    matrix: IntMatrix
    det: int
    lower: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def discriminant_order(self) -> int:
        """|H₁(Y, ℤ)| = |det M|."""
        return abs(self.det)

    def check_dimension(self, x: Sequence[int]) -> None:
        if len(x) != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {len(x)}")

    def apply(self, x: Sequence[int]) -> LatticePoint:
        """M·x."""
        self.check_dimension(x)
        return tuple(sum(m * c for m, c in zip(row, x)) for row in self.matrix)

    def dot(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Producto de intersección x·y = xᵀ·M·y."""
        return sum(a * b for a, b in zip(x, self.apply(y)))

    def solve(self, b: Sequence[int | Fraction]) -> tuple[Fraction, ...]:
        """Resuelve M·x = b exactamente usando L·D·Lᵀ."""
        self.check_dimension(b)
        n = self.n
        z: list[Fraction] = []
        for i in range(n):
            z.append(Fraction(b[i]) - sum(self.lower[i][k] * z[k] for k in range(i)))
        w = [z[i] / self.pivots[i] for i in range(n)]
        x = [Fraction(0)] * n
        for i in reversed(range(n)):
            x[i] = w[i] - sum(self.lower[k][i] * x[k] for k in range(i + 1, n))
        return tuple(x)

    @cached_property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        """M⁻¹ con entradas racionales."""
        columns = [
            self.solve([int(i == j) for i in range(self.n)]) for j in range(self.n)
        ]
        return tuple(tuple(col[i] for col in columns) for i in range(self.n))

    @cached_property
    def adjugate(self) -> IntMatrix:
        """det·M⁻¹, matriz entera."""
        return tuple(
            tuple(int(entry * self.det) for entry in row) for row in self.inverse
        )

    @cached_property
    def discriminant(self) -> DiscriminantData:
        """Forma normal de Smith de M."""
        data = smith_normal_form(self.matrix)
        if data.order != abs(self.det):
            raise SingularMatrix(
                f"Smith order {data.order} disagrees with |det| = {abs(self.det)}"
            )
        return data


def intersection_matrix(graph: PlumbingGraph) -> IntMatrix:
    """Matriz de adyacencia con los pesos en la diagonal."""
    n = graph.n
    rows = [[0] * n for _ in range(n)]
    for i, weight in enumerate(graph.weights):
        rows[i][i] = weight
    for a, b in graph.edges:
        i, j = graph.index(a), graph.index(b)
        rows[i][j] = rows[j][i] = 1
    return tuple(tuple(row) for row in rows)


def intersection_form(graph: PlumbingGraph) -> IntersectionForm:
    """Construye la forma de intersección y certifica la definición negativa.

    Args:
        graph: Grafo de plumbing validado

    Returns:
        IntersectionForm con pivotes LDLᵀ y determinante exacto

    Raises:
        NotNegativeDefinite: Con el índice del primer pivote >= 0
    """
    matrix = intersection_matrix(graph)
    lower, pivots = _ldl(matrix, require_negative=True)
    det = bareiss_determinant(matrix)

    logger.debug(f"Intersection form: n={len(matrix)}, det={det}")
    return IntersectionForm(
        graph=graph,
        matrix=matrix,
        det=det,
        lower=tuple(tuple(row) for row in lower),
        pivots=tuple(pivots),
    )
