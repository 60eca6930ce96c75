"""El F[U]-módulo ℍ(R, χ) de funciones sobre una raíz graduada.

Los valores viven en 𝒯₀⁺ = F[U, U⁻¹]/U·F[U] con F = ℤ/2, truncado a
ker Uᵈ (soporte {U⁻ʲ : j < d}). La cadena infinita por encima de la raíz se
modela con d vértices extra: cualquier función compatible se anula allí
arriba porque Uᵈ mata todo valor truncado.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import cast

from plumbr.errors import (
    EdgeConditionViolated,
    IncompleteRoot,
    InvariantViolated,
    TruncationTooShallow,
)
from plumbr.lattice.gf2 import GF2System
from plumbr.lattice.roots import GradedRoot

logger = logging.getLogger(__name__)

DEFAULT_HEIGHT_CAP = 64


@dataclass(frozen=True)
class TowerElement:
    """Σ U⁻ʲ sobre j en ``support``."""

    support: frozenset[int] = frozenset()

    @classmethod
    def generator(cls, degree: int = 0) -> "TowerElement":
        """U^{-degree}; el generador de grado 0 es 1 = U⁰."""
        return cls(frozenset({degree}))

    @property
    def is_zero(self) -> bool:
        return not self.support

    def u(self, power: int = 1) -> "TowerElement":
        """Uᵖ·self: U·U⁻ʲ = U^{-(j-1)} y U·U⁰ = 0."""
        return TowerElement(frozenset(j - power for j in self.support if j >= power))

    def __add__(self, other: "TowerElement") -> "TowerElement":
        return TowerElement(self.support ^ other.support)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(f"U^{-j}" if j else "U^0" for j in sorted(self.support))


ZERO = TowerElement()


def faithfulness_bound(root: GradedRoot) -> int:
    """Profundidad mínima fiel: (nivel estable − nivel mínimo) + 2."""
    top = root.stable_level if root.stable_level is not None else root.top_level
    return top - root.min_level + 2


@dataclass(frozen=True)
class TruncatedRoot:
    """Raíz más d vértices de cola (si la cadena continúa por arriba).

    ``edges`` son pares (inferior, superior). Los ids de la raíz se
    conservan; la cola usa ids consecutivos a partir de ``len(vertices)``.
    """

    root: GradedRoot
    depth: int
    levels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, root: GradedRoot, depth: int) -> "TruncatedRoot":
        levels = [v.level for v in root.vertices]
        edges = list(root.edges)
        if root.tail:
            tops = root.at_level(root.top_level)
            if len(tops) != 1:
                raise InvariantViolated(
                    f"{len(tops)} vertices at the top level; the chain cannot start"
                )
            below = tops[0].id
            for i in range(depth):
                levels.append(root.top_level + i + 1)
                edges.append((below, len(levels) - 1))
                below = len(levels) - 1
        return cls(root, depth, tuple(levels), tuple(edges))

    @property
    def n_vertices(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class RootFunction:
    """ψ: vértices → 𝒯₀⁺ truncado; solo se guardan los valores no nulos."""

    model: TruncatedRoot
    values: Mapping[int, TowerElement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {v: x for v, x in sorted(self.values.items()) if not x.is_zero}
        for vertex, element in cleaned.items():
            if not 0 <= vertex < self.model.n_vertices:
                raise ValueError(f"vertex {vertex} is not in the truncated root")
            if max(element.support) >= self.model.depth:
                raise ValueError(
                    f"value {element} at vertex {vertex} exceeds depth "
                    f"{self.model.depth}"
                )
        object.__setattr__(self, "values", cleaned)

    def value(self, vertex: int) -> TowerElement:
        return self.values.get(vertex, ZERO)

    @property
    def is_zero(self) -> bool:
        return not self.values

    def violations(self) -> list[tuple[int, int]]:
        """Aristas (inferior, superior) donde U·ψ(inferior) ≠ ψ(superior)."""
        return [
            (lower, upper)
            for lower, upper in self.model.edges
            if self.value(lower).u() != self.value(upper)
        ]

    @property
    def is_valid(self) -> bool:
        return not self.violations()

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            lower, upper = bad[0]
            raise EdgeConditionViolated(
                f"U·ψ({lower}) = {self.value(lower).u()} but ψ({upper}) = "
                f"{self.value(upper)}"
            )

    def at_depth(self, depth: int) -> "RootFunction":
        """La misma función en un modelo más profundo."""
        if depth < self.model.depth:
            raise ValueError("a function can only be moved to a deeper model")
        if depth == self.model.depth:
            return self
        return RootFunction(TruncatedRoot.build(self.model.root, depth), self.values)


@dataclass(frozen=True)
class ImageResult:
    """Resultado de ψ ∈ Uᵖ·ℍ: testigo φ con Uᵖφ = ψ si existe."""

    member: bool
    witness: RootFunction | None
    depth: int
    power: int = 1


@dataclass(frozen=True)
class TowerHeight:
    """ht(ψ₀): None es ∞; ``capped`` indica "al menos ``value``"."""

    value: int | None
    capped: bool = False

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        return f">={self.value}" if self.capped else str(self.value)


# =============================================================================
# Operaciones
# =============================================================================


def psi0(root: GradedRoot, depth: int | None = None) -> RootFunction:
    """ψ₀: U⁰ en w₀ (el vértice de C₀), cero en el resto.

    Raises:
        EdgeConditionViolated: Si w₀ tiene hijos
    """
    d = depth if depth is not None else faithfulness_bound(root)
    w0 = root.zero_vertex_id
    if root.children(w0):
        raise EdgeConditionViolated(
            f"w0 has lower neighbours {root.children(w0)}; C0 is not a leaf"
        )
    model = TruncatedRoot.build(root, d)
    function = RootFunction(model, {w0: TowerElement.generator()})
    function.validate()
    return function


def u_apply(function: RootFunction) -> RootFunction:
    """(Uψ)(v) = U·ψ(v)."""
    return RootFunction(
        function.model, {v: x.u() for v, x in function.values.items()}
    )


def in_ker_u(function: RootFunction) -> bool:
    return u_apply(function).is_zero


def in_im_u_power(
    root: GradedRoot,
    function: RootFunction,
    power: int,
    depth: int | None = None,
) -> ImageResult:
    """Decide si ψ = Uᵖ·φ para alguna φ compatible, por eliminación en GF(2).

    Incógnitas: los coeficientes φ(v)_j para j < d. Ecuaciones: la
    condición de arista φ(w)_j = φ(v)_{j+1} y el objetivo φ(v)_{j+p} = ψ(v)_j.

    Raises:
        TruncationTooShallow: Si d está por debajo de la cota de fidelidad
        ValueError: Si ψ está definida sobre otra raíz
    """
    if function.model.root is not root:
        raise ValueError("the function is defined on another root")
    bound = faithfulness_bound(root)
    d = depth if depth is not None else max(bound, power + 2, function.model.depth)
    if d < bound:
        raise TruncationTooShallow(d, bound)

    target = function.at_depth(d)
    model = target.model
    system = GF2System()
    for vertex in range(model.n_vertices):
        for j in range(d):
            system.variable((vertex, j))

    for lower, upper in model.edges:
        for j in range(d):
            keys = [(upper, j)]
            if j + 1 < d:
                keys.append((lower, j + 1))
            system.add_equation(keys)

    for vertex in range(model.n_vertices):
        support = target.value(vertex).support
        for j in range(d):
            rhs = int(j in support)
            if j + power < d:
                system.add_equation([(vertex, j + power)], rhs)
            elif rhs:
                system.add_equation([], 1)

    solution = system.solve()
    if solution is None:
        return ImageResult(False, None, d, power)

    values: dict[int, TowerElement] = {}
    for key in solution:
        vertex, j = cast(tuple[int, int], key)
        values[vertex] = values.get(vertex, ZERO) + TowerElement.generator(j)
    return ImageResult(True, RootFunction(model, values), d, power)


def in_im_u(
    root: GradedRoot, function: RootFunction, depth: int | None = None
) -> ImageResult:
    """Decide ψ ∈ Im U y devuelve un testigo ψ′ con U·ψ′ = ψ."""
    return in_im_u_power(root, function, 1, depth)


def is_rational(root: GradedRoot) -> bool:
    """True si la raíz es una sola cadena (un vértice por nivel).

    Raises:
        IncompleteRoot: Si la raíz es parcial y no muestra ramas
    """
    single = all(count == 1 for count in root.level_counts().values())
    if not root.complete and single:
        raise IncompleteRoot("a partial root without branches decides nothing")
    return single


def height_of_tower(
    root: GradedRoot,
    cap: int = DEFAULT_HEIGHT_CAP,
    depth: int | None = None,
) -> TowerHeight:
    """ht(ψ₀) = max{n : ψ₀ ∈ Uⁿ·ℍ(R, χ)}.

    Cada potencia se decide directamente con ``in_im_u_power``. Una cadena
    simple da ∞.

    Raises:
        IncompleteRoot: Si la raíz es parcial y ψ₀ ∈ Im U sobre ella
    """
    if root.complete and is_rational(root):
        return TowerHeight(None)

    bound = depth if depth is not None else faithfulness_bound(root)
    for power in range(1, cap + 1):
        d = max(bound, power + 2)
        result = in_im_u_power(root, psi0(root, d), power, d)
        if not result.member:
            logger.debug(f"psi0 is not in U^{power}·H; height {power - 1}")
            return TowerHeight(power - 1)
        if not root.complete:
            raise IncompleteRoot("psi0 lies in Im U on a partial root")
    logger.warning(f"Height search reached the cap {cap}")
    return TowerHeight(cap, capped=True)
