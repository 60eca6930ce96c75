"""Vectores característicos, clase canónica y funciones de peso.

Un vector característico K se guarda por sus evaluaciones kᵥ = ⟨K, v⟩ sobre
los vértices de la base; nunca como clase racional.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt

from plumbr.errors import DimensionMismatch, InvariantViolated
from plumbr.lattice.form import IntersectionForm, LatticePoint, smith_normal_form


@dataclass(frozen=True)
class CharVector:
    """K ∈ Char(Γ) dado por sus evaluaciones sobre la base."""

    evals: tuple[int, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(str(k) for k in self.evals) + ")"


@dataclass(frozen=True)
class SpincOrbit:
    """Órbita [K] = K + 2·PD(L) con su forma normal."""

    representative: CharVector
    normal_form: tuple[int, ...]


def char_vector(form: IntersectionForm, evals: Sequence[int]) -> CharVector:
    """Construye un CharVector validando longitud y paridad.

    Raises:
        DimensionMismatch: Si la longitud no coincide con el número de vértices
        ValueError: Si algún kᵥ no tiene la paridad de Mᵥᵥ
    """
    form.check_dimension(evals)
    for v, (k, row) in enumerate(zip(evals, form.matrix)):
        if (k - row[v]) % 2:
            raise ValueError(
                f"not characteristic: entry {v} is {k}, weight {row[v]} "
                "has the other parity"
            )
    return CharVector(tuple(int(k) for k in evals))


def canonical_class(form: IntersectionForm) -> CharVector:
    """K₀ con (K₀)ᵥ = Mᵥᵥ + 2 (adjunción)."""
    return CharVector(tuple(form.matrix[v][v] + 2 for v in range(form.n)))


def pd(form: IntersectionForm, x: Sequence[int]) -> LatticePoint:
    """Evaluaciones de PD(x): el vector M·x."""
    return form.apply(x)


def shift(form: IntersectionForm, k: CharVector, x: Sequence[int]) -> CharVector:
    """ι_K(x) = K + 2·PD(x)."""
    return CharVector(tuple(a + 2 * b for a, b in zip(k.evals, pd(form, x))))


def k_squared(form: IntersectionForm, k: CharVector) -> Fraction:
    """K² = kᵀ·M⁻¹·k, racional exacto."""
    form.check_dimension(k.evals)
    solution = form.solve(k.evals)
    return sum((a * b for a, b in zip(k.evals, solution)), Fraction(0))


def w(form: IntersectionForm, k: CharVector) -> Fraction:
    """w(K) = −(K² + n)/8."""
    return -(k_squared(form, k) + form.n) / 8


def chi(form: IntersectionForm, k: CharVector, x: Sequence[int]) -> int:
    """χ_K(x) = −(⟨K, x⟩ + x·x)/2.

    Raises:
        DimensionMismatch: Si x no tiene n coordenadas
        InvariantViolated: Si la suma es impar (K no es característico)
    """
    if len(k.evals) != len(x):
        raise DimensionMismatch(f"K has {len(k.evals)} entries, x has {len(x)}")
    total = sum(a * b for a, b in zip(k.evals, x)) + form.dot(x, x)
    if total % 2:
        raise InvariantViolated(f"odd value {total} in χ: K = {k} is corrupted")
    return -total // 2


def chi_step(
    form: IntersectionForm, k: CharVector, image: Sequence[int], v: int, sign: int
) -> int:
    """χ_K(x ± v) − χ_K(x) a partir de image = M·x."""
    return -(sign * k.evals[v] + 2 * sign * image[v] + form.matrix[v][v]) // 2


# =============================================================================
# Órbitas Spin^c
# =============================================================================


def orbit(form: IntersectionForm, k: CharVector) -> SpincOrbit:
    """Forma normal de k − k₀ módulo las columnas de 2M.

    Con U·(2M)·V = D, el vector U·(k − k₀) reducido coordenada a coordenada
    módulo dᵢ es un invariante completo de la órbita.
    """
    k0 = canonical_class(form)
    delta = [a - b for a, b in zip(k.evals, k0.evals)]
    snf = smith_normal_form([[2 * m for m in row] for row in form.matrix])
    image = [sum(u * c for u, c in zip(row, delta)) for row in snf.left]
    return SpincOrbit(
        representative=k,
        normal_form=tuple(c % d for c, d in zip(image, snf.diagonal)),
    )


def same_orbit(form: IntersectionForm, k1: CharVector, k2: CharVector) -> bool:
    """True si k1 − k2 ∈ 2·M·ℤⁿ."""
    return orbit(form, k1).normal_form == orbit(form, k2).normal_form


def orbit_count(form: IntersectionForm) -> int:
    """Número de órbitas, ∏ dᵢ(2M) / 2ⁿ = |det M|."""
    snf = smith_normal_form([[2 * m for m in row] for row in form.matrix])
    return snf.order // 2**form.n


# =============================================================================
# Cotas
# =============================================================================


def center(form: IntersectionForm, k: CharVector) -> tuple[Fraction, ...]:
    """Minimizador real c = −M⁻¹k/2 de χ_K."""
    return tuple(-s / 2 for s in form.solve(k.evals))


def radius(form: IntersectionForm, k: CharVector, level: int) -> Fraction:
    """R = 2n − K²/4, de modo que χ_K(x) ≤ n ⇔ (x−c)ᵀ(−M)(x−c) ≤ R."""
    return 2 * level - k_squared(form, k) / 4


def integer_interval(middle: Fraction, bound: Fraction) -> range:
    """Enteros t con (t − middle)² ≤ bound."""
    if bound < 0:
        return range(0)
    root = isqrt(floor(bound))
    lo = floor(middle) - root - 1
    hi = ceil(middle) + root + 1
    while lo <= hi and (lo - middle) ** 2 > bound:
        lo += 1
    while hi >= lo and (hi - middle) ** 2 > bound:
        hi -= 1
    return range(lo, hi + 1)


def coordinate_bounds(
    form: IntersectionForm, k: CharVector, level: int
) -> tuple[range, ...]:
    """Caja entera que contiene todo punto con χ_K ≤ level.

    |xᵢ − cᵢ| ≤ √(R·(Q⁻¹)ᵢᵢ) con Q = −M.
    """
    c = center(form, k)
    r = radius(form, k, level)
    return tuple(
        integer_interval(c[i], r * -form.inverse[i][i]) for i in range(form.n)
    )
