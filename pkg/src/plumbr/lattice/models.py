"""Los tres modelos de la cohomología reticular de grado 0 sobre ventanas finitas.

- Modelo Char: funciones sobre la órbita [K] de vectores característicos.
- Modelo L: funciones sobre el retículo L con la condición de χ_K.
- Modelo raíz: funciones sobre la raíz graduada (R_K, χ_K).

Las tres se comparan sobre la ventana S_N ⊆ [−r, r]ⁿ: ι_K lleva S_N a la
ventana Char y θ lleva cada punto a su componente de S_{χ(x)}. Los espacios
de funciones compatibles truncadas a ker Uᵈ se calculan como núcleos sobre
GF(2).
"""

import logging
from collections.abc import Hashable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import TypeVar, cast

from plumbr.errors import (
    BudgetExceeded,
    EdgeConditionViolated,
    NotConstantOnComponent,
    WindowMisaligned,
)
from plumbr.lattice.chars import CharVector, canonical_class, chi, shift
from plumbr.lattice.form import IntersectionForm, LatticePoint
from plumbr.lattice.gf2 import GF2System, gf2_rank
from plumbr.lattice.roots import (
    DEFAULT_BUDGET,
    GradedRoot,
    SublevelSet,
    build_levels,
    enumerate_sublevel,
    graded_root,
)
from plumbr.lattice.tower import ZERO, RootFunction, TowerElement, TruncatedRoot
from plumbr.schema import CheckResult

logger = logging.getLogger(__name__)

DEFAULT_BOX_RADIUS = 1
DEFAULT_MODEL_DEPTH = 3

Node = TypeVar("Node", bound=Hashable)


# =============================================================================
# Ventanas
# =============================================================================


@dataclass(frozen=True)
class LatticeWindow:
    """S_N dentro de la caja [−radius, radius]ⁿ."""

    form: IntersectionForm
    k: CharVector
    radius: int
    sublevel: SublevelSet

    @property
    def level(self) -> int:
        return self.sublevel.level

    @property
    def points(self) -> frozenset[LatticePoint]:
        return self.sublevel.points

    @property
    def char_points(self) -> frozenset[CharVector]:
        """ι_K(S_N)."""
        return frozenset(shift(self.form, self.k, x) for x in self.sublevel.values)


def sublevel_window(
    form: IntersectionForm,
    k: CharVector,
    radius: int,
    max_level: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> LatticeWindow:
    """Mayor S_N con N ≤ max_level contenido en la caja [−radius, radius]ⁿ.

    Raises:
        WindowMisaligned: Si ni siquiera S_0 cabe en la caja
        BudgetExceeded: Si la enumeración supera ``budget``
    """
    chosen: SublevelSet | None = None
    level = 0
    while max_level is None or level <= max_level:
        sublevel = enumerate_sublevel(form, k, level, budget)
        inside = all(abs(c) <= radius for p in sublevel.values for c in p)
        if not inside:
            break
        chosen = sublevel
        level += 1

    if chosen is None:
        raise WindowMisaligned(
            f"S_0 does not fit in the box of radius {radius}; enlarge the box"
        )
    logger.debug(
        f"Window: S_{chosen.level} with {len(chosen)} points, radius {radius}"
    )
    return LatticeWindow(form, k, radius, chosen)


def root_window(window: LatticeWindow) -> GradedRoot:
    """Estructura graduada de S_N: la raíz hasta el nivel N, sin cola."""
    values = window.sublevel.values
    vertices, edges = build_levels(values, min(values.values()), window.level)
    origin = (0,) * window.form.n
    zero = next(v for v in vertices if v.level == 0 and origin in v.members)
    return GradedRoot(
        vertices=tuple(vertices),
        edges=tuple(edges),
        top_level=window.level,
        stable_level=None,
        zero_vertex_id=zero.id,
        tail=False,
    )


# =============================================================================
# Funciones de los modelos
# =============================================================================


def _relation_holds(low: TowerElement, high: TowerElement, n: int) -> bool:
    """Condición entre φ(x) y φ(x + v) con n = χ(x) − χ(x + v)."""
    if n >= 0:
        return high.u(n) == low
    return high == low.u(-n)


def _clean(
    values: Mapping[Node, TowerElement], window: frozenset[Node], depth: int
) -> dict[Node, TowerElement]:
    cleaned: dict[Node, TowerElement] = {}
    for node, element in values.items():
        if element.is_zero:
            continue
        if node not in window:
            raise WindowMisaligned(f"{node} is outside the window")
        if max(element.support) >= depth:
            raise ValueError(f"value {element} exceeds depth {depth}")
        cleaned[node] = element
    return cleaned


@dataclass(frozen=True)
class CharModelFunction:
    """φ: ventana de [K] → 𝒯₀⁺ truncado a ker Uᵈ."""

    form: IntersectionForm
    window: frozenset[CharVector]
    depth: int
    values: Mapping[CharVector, TowerElement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _clean(self.values, self.window, self.depth)
        )

    def value(self, k: CharVector) -> TowerElement:
        return self.values.get(k, ZERO)

    def pairs(self) -> Iterator[tuple[CharVector, CharVector, int]]:
        """(K′, K′ + 2PD(v), n) con 2n = ⟨K′, v⟩ + v·v, ambos en ventana."""
        yield from _char_pairs(self.form, self.window)

    def violations(self) -> list[tuple[CharVector, CharVector]]:
        return [
            (a, b)
            for a, b, n in self.pairs()
            if not _relation_holds(self.value(a), self.value(b), n)
        ]

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            a, b = bad[0]
            raise EdgeConditionViolated(
                f"Char-model condition fails between {a} and {b}"
            )


@dataclass(frozen=True)
class LModelFunction:
    """φ: ventana de L → 𝒯₀⁺ truncado a ker Uᵈ, compatible con χ_K."""

    form: IntersectionForm
    k: CharVector
    window: frozenset[LatticePoint]
    depth: int
    values: Mapping[LatticePoint, TowerElement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _clean(self.values, self.window, self.depth)
        )

    def value(self, x: LatticePoint) -> TowerElement:
        return self.values.get(x, ZERO)

    def pairs(self) -> Iterator[tuple[LatticePoint, LatticePoint, int]]:
        """(x, x + v, χ(x) − χ(x + v)), ambos en la ventana."""
        yield from _lattice_pairs(self.form, self.k, self.window)

    def violations(self) -> list[tuple[LatticePoint, LatticePoint]]:
        return [
            (a, b)
            for a, b, n in self.pairs()
            if not _relation_holds(self.value(a), self.value(b), n)
        ]

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            a, b = bad[0]
            raise EdgeConditionViolated(
                f"L-model condition fails between {list(a)} and {list(b)}"
            )


def _char_pairs(
    form: IntersectionForm, window: frozenset[CharVector]
) -> Iterator[tuple[CharVector, CharVector, int]]:
    for k in sorted(window, key=lambda c: c.evals):
        for v in range(form.n):
            column = form.matrix[v]
            other = CharVector(tuple(a + 2 * b for a, b in zip(k.evals, column)))
            if other in window:
                yield k, other, (k.evals[v] + column[v]) // 2


def _lattice_pairs(
    form: IntersectionForm, k: CharVector, window: frozenset[LatticePoint]
) -> Iterator[tuple[LatticePoint, LatticePoint, int]]:
    for x in sorted(window):
        image = form.apply(x)
        for v in range(form.n):
            other = x[:v] + (x[v] + 1,) + x[v + 1 :]
            if other in window:
                step = k.evals[v] + 2 * image[v] + form.matrix[v][v]
                yield x, other, step // 2


# =============================================================================
# Espacios de soluciones
# =============================================================================


def _solution_basis(
    nodes: Sequence[Node],
    relations: Sequence[tuple[Node, Node, int]],
    depth: int,
) -> list[dict[Node, TowerElement]]:
    """Base del espacio de funciones con Uⁿ·f(a) = f(b) para cada (a, b, n).

    Cada coeficiente f(node)_j es una incógnita sobre GF(2).
    """
    system = GF2System()
    for node in nodes:
        for j in range(depth):
            system.variable((node, j))
    for a, b, n in relations:
        for j in range(depth):
            keys: list[Hashable] = [(b, j)]
            if j + n < depth:
                keys.append((a, j + n))
            system.add_equation(keys)

    basis = []
    for ones in system.nullspace():
        function: dict[Node, TowerElement] = {}
        for key in ones:
            node, j = cast(tuple[Node, int], key)
            function[node] = function.get(node, ZERO) + TowerElement.generator(j)
        basis.append(function)
    return basis


def _oriented(
    pairs: Iterator[tuple[Node, Node, int]],
) -> list[tuple[Node, Node, int]]:
    """(x, x + v, n) → (origen, destino, potencia ≥ 0)."""
    return [(b, a, n) if n >= 0 else (a, b, -n) for a, b, n in pairs]


def char_model_space(
    form: IntersectionForm, window: frozenset[CharVector], depth: int
) -> list[CharModelFunction]:
    """Base de las funciones compatibles del modelo Char sobre la ventana."""
    nodes = sorted(window, key=lambda c: c.evals)
    basis = _solution_basis(nodes, _oriented(_char_pairs(form, window)), depth)
    return [CharModelFunction(form, window, depth, f) for f in basis]


def l_model_space(window: LatticeWindow, depth: int) -> list[LModelFunction]:
    """Base de las funciones compatibles del modelo L sobre S_N."""
    points = window.points
    relations = _oriented(_lattice_pairs(window.form, window.k, points))
    basis = _solution_basis(sorted(points), relations, depth)
    return [LModelFunction(window.form, window.k, points, depth, f) for f in basis]


def root_model_space(root: GradedRoot, depth: int) -> list[RootFunction]:
    """Base de las funciones sobre la raíz con U·ψ(hijo) = ψ(padre)."""
    model = TruncatedRoot.build(root, depth)
    relations = [(lower, upper, 1) for lower, upper in model.edges]
    basis = _solution_basis(list(range(model.n_vertices)), relations, depth)
    return [RootFunction(model, f) for f in basis]


# =============================================================================
# Las aplicaciones ι_K* y θ*
# =============================================================================


def iota_pullback(phi: CharModelFunction, window: LatticeWindow) -> LModelFunction:
    """φ ∘ ι_K sobre la ventana de L.

    Raises:
        WindowMisaligned: Si ι_K(x) cae fuera de la ventana Char
        EdgeConditionViolated: Si el resultado no es compatible
    """
    values = {}
    for x in window.points:
        image = shift(window.form, window.k, x)
        if image not in phi.window:
            raise WindowMisaligned(
                f"ι_K({list(x)}) = {image} is outside the Char window"
            )
        values[x] = phi.value(image)
    pulled = LModelFunction(window.form, window.k, window.points, phi.depth, values)
    pulled.validate()
    return pulled


def theta_pushforward_check(phi: LModelFunction, root: GradedRoot) -> RootFunction:
    """Devuelve ψ con φ = ψ ∘ θ.

    En el vértice w de nivel ℓ, ψ(w) = U^{ℓ−χ(x)}·φ(x) para cualquier x de
    la componente; todos los miembros deben dar el mismo valor.

    Raises:
        WindowMisaligned: Si la raíz no cubre exactamente la ventana de φ
        NotConstantOnComponent: Con el par de puntos que discrepa
    """
    top = root.at_level(root.top_level)
    covered: frozenset[LatticePoint] = frozenset().union(*(v.members for v in top))
    if covered != phi.window:
        raise WindowMisaligned("the root window and the L window differ")

    levels = {x: chi(phi.form, phi.k, x) for x in phi.window}
    values: dict[int, TowerElement] = {}
    for vertex in root.vertices:
        first = vertex.representative
        expected = phi.value(first).u(vertex.level - levels[first])
        for x in sorted(vertex.members):
            if phi.value(x).u(vertex.level - levels[x]) != expected:
                raise NotConstantOnComponent(first, x)
        values[vertex.id] = expected

    psi = RootFunction(TruncatedRoot.build(root, phi.depth), values)
    psi.validate()
    return psi


# =============================================================================
# Verificación
# =============================================================================


def _bits(
    values: Mapping[Node, TowerElement], index: Mapping[Node, int], depth: int
) -> int:
    row = 0
    for node, element in values.items():
        for j in element.support:
            row |= 1 << (index[node] * depth + j)
    return row


@dataclass
class ModelsOutcome:
    """Dimensiones y comprobaciones de una ventana."""

    radius: int
    depth: int
    window_level: int
    window_size: int
    char_dimension: int
    l_dimension: int
    root_dimension: int
    checks: list[CheckResult]


def check_model_equivalence(
    form: IntersectionForm,
    k: CharVector | None = None,
    radius: int = DEFAULT_BOX_RADIUS,
    depth: int = DEFAULT_MODEL_DEPTH,
    max_level: int | None = None,
    budget: int = DEFAULT_BUDGET,
    phi0: Sequence[CharVector] | None = None,
) -> ModelsOutcome:
    """Compara los tres modelos por fuerza bruta sobre una ventana.

    Calcula las bases de los tres espacios, empuja las bases por ι_K* y θ*
    y compara rangos con dimensiones. Con ``phi0`` (soporte de φ₀ en el
    modelo Char, solo para K₀) comprueba además φ₀ ↦ 𝟙_𝒮 ↦ ψ₀.
    """
    k = k if k is not None else canonical_class(form)
    window = sublevel_window(form, k, radius, max_level, budget)
    root = root_window(window)
    char_window = window.char_points
    checks = [_bridge_identity(window), _cross_check_root(form, k, root, budget)]

    char_basis = char_model_space(form, char_window, depth)
    l_basis = l_model_space(window, depth)
    root_basis = root_model_space(root, depth)
    dims = (len(char_basis), len(l_basis), len(root_basis))
    checks.append(
        CheckResult.ok("dimensions_agree")
        if len(set(dims)) == 1
        else CheckResult.failed(
            "dimensions_agree", f"Char {dims[0]}, L {dims[1]}, root {dims[2]}"
        )
    )

    point_index = {x: i for i, x in enumerate(sorted(window.points))}
    pulled = [iota_pullback(phi, window) for phi in char_basis]
    rows = [_bits(f.values, point_index, depth) for f in pulled]
    rank = gf2_rank(rows, len(point_index) * depth)
    checks.append(
        CheckResult.ok("iota_bijective")
        if rank == len(char_basis) == len(l_basis)
        else CheckResult.failed("iota_bijective", f"rank {rank} of {len(l_basis)}")
    )

    vertex_index = {v.id: v.id for v in root.vertices}
    try:
        pushed = [theta_pushforward_check(phi, root) for phi in l_basis]
    except NotConstantOnComponent as e:
        checks.append(CheckResult.failed("theta_bijective", str(e)))
    else:
        rows = [_bits(f.values, vertex_index, depth) for f in pushed]
        rank = gf2_rank(rows, len(vertex_index) * depth)
        checks.append(
            CheckResult.ok("theta_bijective")
            if rank == len(l_basis) == len(root_basis)
            else CheckResult.failed(
                "theta_bijective", f"rank {rank} of {len(root_basis)}"
            )
        )

    if phi0 is not None:
        checks.append(_phi0_correspondence(window, root, char_window, depth, phi0))

    logger.info(
        f"Models on S_{window.level} (radius {radius}, depth {depth}): "
        f"dimensions Char {dims[0]}, L {dims[1]}, root {dims[2]}"
    )
    return ModelsOutcome(
        radius=radius,
        depth=depth,
        window_level=window.level,
        window_size=len(window.points),
        char_dimension=dims[0],
        l_dimension=dims[1],
        root_dimension=dims[2],
        checks=checks,
    )


def _bridge_identity(window: LatticeWindow) -> CheckResult:
    """⟨K′, v⟩ + v·v = 2(χ(x) − χ(x + v)) con K′ = ι_K(x), en cada par."""
    form, k = window.form, window.k
    for x, other, _ in _lattice_pairs(form, k, window.points):
        v = next(i for i in range(form.n) if x[i] != other[i])
        moved = shift(form, k, x)
        lhs = moved.evals[v] + form.matrix[v][v]
        if lhs != 2 * (chi(form, k, x) - chi(form, k, other)):
            return CheckResult.failed("bridge_identity", f"x = {list(x)}, v = {v}")
    return CheckResult.ok("bridge_identity")


def _cross_check_root(
    form: IntersectionForm, k: CharVector, root: GradedRoot, budget: int
) -> CheckResult:
    """Los vértices de la ventana hasta n* coinciden con los de ``graded_root``."""
    try:
        full = graded_root(form, k, budget)
    except BudgetExceeded as e:
        logger.warning(f"Root cross-check skipped: {e}")
        return CheckResult.skipped("root_window_matches", str(e))

    assert full.stable_level is not None
    highest = min(root.top_level, full.stable_level)
    for level in range(root.min_level, highest + 1):
        mine = sorted(min(v.members) for v in root.at_level(level))
        theirs = sorted(min(v.members) for v in full.at_level(level))
        sizes = sorted(v.size for v in root.at_level(level))
        full_sizes = sorted(v.size for v in full.at_level(level))
        if mine != theirs or sizes != full_sizes:
            return CheckResult.failed(
                "root_window_matches", f"level {level} differs from the graded root"
            )
    return CheckResult.ok("root_window_matches")


def _phi0_correspondence(
    window: LatticeWindow,
    root: GradedRoot,
    char_window: frozenset[CharVector],
    depth: int,
    phi0: Sequence[CharVector],
) -> CheckResult:
    """φ₀ ↦ 𝟙_𝒮 ↦ ψ₀ sobre la ventana."""
    one = TowerElement.generator()
    try:
        support = {k: one for k in phi0}
        char_phi = CharModelFunction(window.form, char_window, depth, support)
        char_phi.validate()
        pulled = iota_pullback(char_phi, window)
        psi = theta_pushforward_check(pulled, root)
    except (WindowMisaligned, EdgeConditionViolated, NotConstantOnComponent) as e:
        return CheckResult.failed("phi0_to_psi0", str(e))

    if psi.values != {root.zero_vertex_id: one}:
        witness = {vid: str(x) for vid, x in psi.values.items()}
        return CheckResult.failed("phi0_to_psi0", f"image is {witness}")
    return CheckResult.ok("phi0_to_psi0")
