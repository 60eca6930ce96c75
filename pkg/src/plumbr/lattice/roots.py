"""Conjuntos de subnivel de χ_K, sus componentes y la raíz graduada.

La raíz se construye a partir de una única enumeración de S_n* ordenada por
valor de χ, con un union-find incremental nivel a nivel. El nivel estable n*
se certifica con las mesetas cerradas: toda componente nueva de un conjunto
de subnivel es una meseta (puntos de igual nivel unidos por pasos de la base)
sin vecinos más bajos, y sus puntos son mínimos locales débiles.
"""

import logging
import math
from collections import deque
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

from networkx.utils import UnionFind

from plumbr.errors import BudgetExceeded
from plumbr.lattice.chars import (
    CharVector,
    canonical_class,
    center,
    chi,
    chi_step,
    integer_interval,
    radius,
)
from plumbr.lattice.form import IntersectionForm, LatticePoint
from plumbr.schema import CheckResult

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000
GERM_BUDGET = 200_000


@dataclass(frozen=True)
class SublevelSet:
    """Puntos con χ_K ≤ level, con su valor de χ."""

    level: int
    values: Mapping[LatticePoint, int]

    @property
    def points(self) -> frozenset[LatticePoint]:
        return frozenset(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, point: object) -> bool:
        return point in self.values

    def restricted(self, level: int) -> "SublevelSet":
        """S_level dentro de un conjunto de nivel mayor."""
        return SublevelSet(
            level, {p: c for p, c in self.values.items() if c <= level}
        )

    def edges(self) -> Iterator[tuple[LatticePoint, LatticePoint]]:
        """Pares (x, x + v) con ambos extremos en el conjunto."""
        for point in self.values:
            for v in range(len(point)):
                other = point[:v] + (point[v] + 1,) + point[v + 1 :]
                if other in self.values:
                    yield point, other


@dataclass(frozen=True)
class Plateau:
    """Meseta cerrada: nace una componente nueva en ``level``."""

    level: int
    points: frozenset[LatticePoint]


@dataclass(frozen=True)
class RootVertex:
    """Componente conexa de S_level."""

    id: int
    level: int
    members: frozenset[LatticePoint]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def representative(self) -> LatticePoint:
        return min(self.members)


@dataclass(frozen=True)
class GradedRoot:
    """Raíz graduada (R_K, χ_K) hasta ``top_level``.

    ``edges`` son pares (hijo, padre) entre niveles consecutivos. Con
    ``tail`` la cadena infinita continúa por encima del vértice superior.
    ``stable_level`` es None cuando no está certificado (raíces parciales y
    ventanas). El certificado por mesetas cerradas equivale al de mínimos
    débiles: por encima del máximo nivel de cualquiera de los dos no nacen
    componentes, y el de mesetas es menor o igual.
    ``complete`` es False si faltan vértices (germen del tronco); en ese caso
    ``sublevel_connected``, ``single_vertex_per_level`` y ``stable_chain`` se
    informan como ``skipped``.
    """

    vertices: tuple[RootVertex, ...]
    edges: tuple[tuple[int, int], ...]
    top_level: int
    stable_level: int | None
    zero_vertex_id: int
    complete: bool = True
    tail: bool = True

    @cached_property
    def _parents(self) -> dict[int, int]:
        return dict(self.edges)

    @cached_property
    def _children(self) -> dict[int, list[int]]:
        children: dict[int, list[int]] = {v.id: [] for v in self.vertices}
        for child, parent in self.edges:
            children[parent].append(child)
        return children

    def vertex(self, vertex_id: int) -> RootVertex:
        return self.vertices[vertex_id]

    @property
    def zero_vertex(self) -> RootVertex:
        return self.vertices[self.zero_vertex_id]

    @property
    def min_level(self) -> int:
        return min(v.level for v in self.vertices)

    def at_level(self, level: int) -> list[RootVertex]:
        return [v for v in self.vertices if v.level == level]

    def parent(self, vertex_id: int) -> int | None:
        return self._parents.get(vertex_id)

    def children(self, vertex_id: int) -> list[int]:
        return list(self._children[vertex_id])

    def level_counts(self) -> dict[int, int]:
        """Número de vértices por nivel."""
        counts: dict[int, int] = {}
        for v in self.vertices:
            counts[v.level] = counts.get(v.level, 0) + 1
        return dict(sorted(counts.items()))

    def leaves(self) -> list[int]:
        return [v.id for v in self.vertices if not self._children[v.id]]

    @property
    def branch_count(self) -> int:
        """Hojas además de la primera: 0 en una cadena simple."""
        return len(self.leaves()) - 1

    def trunk(self) -> list[int]:
        """w₀ y sus ancestros, de abajo hacia arriba."""
        chain = [self.zero_vertex_id]
        while (parent := self.parent(chain[-1])) is not None:
            chain.append(parent)
        return chain


# =============================================================================
# Enumeración
# =============================================================================


def estimated_sublevel_size(
    form: IntersectionForm, k: CharVector, level: int
) -> float:
    """Estimación por volumen del elipsoide de |S_level|.

    Solo se usa para rechazar de antemano instancias fuera de escala.
    """
    r = radius(form, k, level)
    if r < 0:
        return 0.0
    n = form.n
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return ball * float(r) ** (n / 2) / math.sqrt(abs(form.det))


def enumerate_sublevel(
    form: IntersectionForm,
    k: CharVector,
    level: int,
    budget: int = DEFAULT_BUDGET,
) -> SublevelSet:
    """Enumera S_level = {x : χ_K(x) ≤ level} por recursión en el elipsoide.

    Completa el cuadrado sobre Q = −M = L·(−D)·Lᵀ y recorre las coordenadas
    desde la última, acotando cada una con aritmética racional exacta.

    Raises:
        BudgetExceeded: Si se superan ``budget`` puntos
    """
    c = center(form, k)
    r = radius(form, k, level)
    if r < 0:
        return SublevelSet(level, {})

    n = form.n
    q = [-p for p in form.pivots]
    lower = form.lower
    x = [0] * n
    found: dict[LatticePoint, int] = {}

    def descend(i: int, remaining: Fraction) -> None:
        offset = sum(
            (lower[j][i] * (x[j] - c[j]) for j in range(i + 1, n)), Fraction(0)
        )
        middle = c[i] - offset
        for t in integer_interval(middle, remaining / q[i]):
            x[i] = t
            rest = remaining - q[i] * (t - middle) ** 2
            if i == 0:
                point = tuple(x)
                found[point] = chi(form, k, point)
                if len(found) > budget:
                    raise BudgetExceeded(budget, f"enumerating level {level}")
            else:
                descend(i - 1, rest)

    descend(n - 1, r)
    return SublevelSet(level, {p: found[p] for p in sorted(found)})


def components(sublevel: SublevelSet) -> list[frozenset[LatticePoint]]:
    """Partición en componentes conexas, ordenadas por su punto mínimo."""
    forest = UnionFind(sublevel.values)
    for a, b in sublevel.edges():
        forest.union(a, b)
    return sorted((frozenset(group) for group in forest.to_sets()), key=min)


def _neighbors(
    form: IntersectionForm,
    k: CharVector,
    point: LatticePoint,
    image: LatticePoint,
) -> Iterator[tuple[LatticePoint, LatticePoint, int]]:
    """(x ± v, M·(x ± v), χ(x ± v) − χ(x)) para cada vector de la base."""
    for v in range(form.n):
        column = form.matrix[v]
        for sign in (1, -1):
            step = chi_step(form, k, image, v, sign)
            other = point[:v] + (point[v] + sign,) + point[v + 1 :]
            other_image = tuple(a + sign * b for a, b in zip(image, column))
            yield other, other_image, step


def component_of(
    form: IntersectionForm,
    k: CharVector,
    level: int,
    seed: LatticePoint,
    budget: int = DEFAULT_BUDGET,
) -> frozenset[LatticePoint]:
    """Componente de ``seed`` en S_level por inundación, sin enumerar S_level.

    Raises:
        ValueError: Si χ_K(seed) > level
        BudgetExceeded: Si la componente supera ``budget`` puntos
    """
    start = chi(form, k, seed)
    if start > level:
        raise ValueError(f"seed has level {start} > {level}")
    seen = {seed}
    queue = deque([(seed, form.apply(seed), start)])
    while queue:
        point, image, value = queue.popleft()
        for other, other_image, step in _neighbors(form, k, point, image):
            if value + step <= level and other not in seen:
                seen.add(other)
                if len(seen) > budget:
                    raise BudgetExceeded(budget, f"flooding level {level}")
                queue.append((other, other_image, value + step))
    return frozenset(seen)


# =============================================================================
# Mínimos locales y certificado de estabilidad
# =============================================================================


def local_minima(
    form: IntersectionForm, k: CharVector, budget: int = DEFAULT_BUDGET
) -> frozenset[LatticePoint]:
    """Mínimos locales débiles: χ_K(x ± v) ≥ χ_K(x) para todo v.

    Las 2n desigualdades acotan y = M·x a la caja
    (Mᵥᵥ − kᵥ)/2 ≤ yᵥ ≤ (−Mᵥᵥ − kᵥ)/2; se recorre la caja y se conservan
    los y con M⁻¹·y entero.

    Raises:
        BudgetExceeded: Si la caja tiene más de ``budget`` puntos
    """
    ranges = []
    for v in range(form.n):
        weight, value = form.matrix[v][v], k.evals[v]
        ranges.append(range((weight - value) // 2, (-weight - value) // 2 + 1))
    size = math.prod(len(r) for r in ranges)
    if size > budget:
        raise BudgetExceeded(budget, f"scanning {size} local-minimum candidates")

    det = form.det
    adjugate = form.adjugate
    minima: set[LatticePoint] = set()
    for y in product(*ranges):
        numerators = [sum(a * b for a, b in zip(row, y)) for row in adjugate]
        if all(num % det == 0 for num in numerators):
            minima.add(tuple(num // det for num in numerators))
    logger.debug(f"{len(minima)} weak local minima out of {size} candidates")
    return frozenset(minima)


def plateau_minima(
    form: IntersectionForm, k: CharVector, budget: int = DEFAULT_BUDGET
) -> list[Plateau]:
    """Mesetas cerradas de χ_K, ordenadas por (nivel, punto mínimo).

    Una meseta cerrada es una componente de S_level formada solo por puntos
    de nivel ``level``: exactamente las hojas de la raíz graduada.
    """
    classified: set[LatticePoint] = set()
    plateaus: list[Plateau] = []
    visited = 0

    for start in sorted(local_minima(form, k, budget)):
        if start in classified:
            continue
        level = chi(form, k, start)
        seen = {start}
        stack = [(start, form.apply(start))]
        closed = True
        while stack and closed:
            point, image = stack.pop()
            for other, other_image, step in _neighbors(form, k, point, image):
                if step < 0:
                    closed = False
                    break
                if step == 0 and other not in seen:
                    seen.add(other)
                    stack.append((other, other_image))
        visited += len(seen)
        if visited > budget:
            raise BudgetExceeded(budget, "classifying plateaus")
        classified |= seen
        if closed:
            plateaus.append(Plateau(level, frozenset(seen)))

    return sorted(plateaus, key=lambda p: (p.level, min(p.points)))


# =============================================================================
# Raíz graduada
# =============================================================================


def build_levels(
    values: Mapping[LatticePoint, int], lowest: int, highest: int
) -> tuple[list[RootVertex], list[tuple[int, int]]]:
    """Vértices y aristas de la raíz para los niveles [lowest, highest].

    ``values`` debe contener S_highest completo.
    """
    order = sorted(values, key=lambda p: (values[p], p))
    forest = UnionFind()
    present: set[LatticePoint] = set()
    vertices: list[RootVertex] = []
    edges: list[tuple[int, int]] = []
    previous: list[RootVertex] = []
    cursor = 0

    for level in range(lowest, highest + 1):
        while cursor < len(order) and values[order[cursor]] <= level:
            point = order[cursor]
            forest[point]
            present.add(point)
            for v in range(len(point)):
                for sign in (1, -1):
                    other = point[:v] + (point[v] + sign,) + point[v + 1 :]
                    if other in present:
                        forest.union(point, other)
            cursor += 1

        groups: dict[LatticePoint, set[LatticePoint]] = {}
        for point in present:
            groups.setdefault(forest[point], set()).add(point)
        by_root: dict[LatticePoint, int] = {}
        for members in sorted(groups.values(), key=min):
            vertex = RootVertex(len(vertices), level, frozenset(members))
            vertices.append(vertex)
            by_root[forest[vertex.representative]] = vertex.id

        for child in previous:
            edges.append((child.id, by_root[forest[child.representative]]))
        previous = [v for v in vertices if v.level == level]

    return vertices, edges


def _guard(
    form: IntersectionForm, k: CharVector, level: int, budget: int
) -> None:
    estimate = estimated_sublevel_size(form, k, level)
    if estimate > budget:
        raise BudgetExceeded(
            budget, f"about {estimate:.3g} points expected at level {level}"
        )


def graded_root(
    form: IntersectionForm,
    k: CharVector,
    budget: int = DEFAULT_BUDGET,
    max_level: int | None = None,
) -> GradedRoot:
    """Construye la raíz graduada de χ_K con nivel estable certificado.

    n* es el menor n ≥ max(nivel de las mesetas cerradas, 0) con S_n conexo.
    Por encima de n* ninguna componente nueva puede nacer, así que la raíz
    es una cadena.

    Args:
        form: Forma de intersección
        k: Vector característico
        budget: Cota de puntos enumerados
        max_level: Materializa la cadena hasta este nivel si supera n*

    Returns:
        GradedRoot completa desde el nivel mínimo hasta max(n*, max_level)

    Raises:
        BudgetExceeded: Si la instancia está fuera de escala
    """
    _guard(form, k, 0, budget)
    plateaus = plateau_minima(form, k, budget)
    lowest = plateaus[0].level
    level = max(max(p.level for p in plateaus), 0)

    while True:
        _guard(form, k, level, budget)
        sublevel = enumerate_sublevel(form, k, level, budget)
        if len(components(sublevel)) == 1:
            break
        level += 1
    stable = level

    top = stable
    if max_level is not None and max_level > stable:
        _guard(form, k, max_level, budget)
        sublevel = enumerate_sublevel(form, k, max_level, budget)
        top = max_level

    vertices, edges = build_levels(sublevel.values, lowest, top)
    origin = (0,) * form.n
    zero = next(v for v in vertices if v.level == 0 and origin in v.members)

    logger.info(
        f"Graded root: levels {lowest}..{top}, stable at {stable}, "
        f"{len(vertices)} vertices, {len(plateaus)} leaves"
    )
    return GradedRoot(
        vertices=tuple(vertices),
        edges=tuple(edges),
        top_level=top,
        stable_level=stable,
        zero_vertex_id=zero.id,
    )


def canonical_trunk_germ(
    form: IntersectionForm, budget: int = GERM_BUDGET
) -> GradedRoot:
    """Germen del tronco de R_{K₀} cuando la raíz completa no es alcanzable.

    Calcula C₀ por inundación y busca, dentro de S_1 y partiendo de C₀, un
    punto de nivel ≤ 0 fuera de C₀: su componente es un vértice w′ ≠ w₀ de
    nivel 0 bajo w₁. El resultado es una subraíz genuina (w₀, w′, w₁ y la
    cadena de ancestros de w₁), marcada como incompleta.
    """
    k0 = canonical_class(form)
    origin = (0,) * form.n
    c0 = component_of(form, k0, 0, origin, budget)

    seen = set(c0)
    queue = deque((p, form.apply(p), chi(form, k0, p)) for p in sorted(c0))
    witness: LatticePoint | None = None
    while queue and witness is None and len(seen) <= budget:
        point, image, value = queue.popleft()
        for other, other_image, step in _neighbors(form, k0, point, image):
            if value + step <= 1 and other not in seen:
                seen.add(other)
                if value + step <= 0:
                    witness = other
                    break
                queue.append((other, other_image, value + step))

    vertices = [RootVertex(0, 0, c0)]
    if witness is not None:
        vertices.append(RootVertex(1, 0, frozenset({witness})))
        logger.info(f"Trunk germ: second level-0 vertex found at {list(witness)}")
    else:
        logger.warning("Trunk germ: no second level-0 vertex within the search budget")
    top = RootVertex(len(vertices), 1, frozenset(seen))
    vertices.append(top)

    return GradedRoot(
        vertices=tuple(vertices),
        edges=tuple((v.id, top.id) for v in vertices[:-1]),
        top_level=1,
        stable_level=None,
        zero_vertex_id=0,
        complete=False,
    )


# =============================================================================
# Forma del tronco canónico
# =============================================================================


def verify_canonical_root_shape(
    form: IntersectionForm,
    root: GradedRoot | None = None,
    budget: int = DEFAULT_BUDGET,
    chain_margin: int = 5,
) -> list[CheckResult]:
    """Comprueba las propiedades del vértice canónico sobre la raíz de K₀.

    - ``c0_zero_level``: χ_{K₀} ≡ 0 en C₀
    - ``c0_end_vertex``: w₀ no tiene hijos y ningún vecino de C₀ baja de 0
    - ``sublevel_connected``: S_n conexo para n ∈ [1, n*+3]
    - ``single_vertex_per_level``: un vértice por nivel ≥ 1
    - ``stable_chain``: una componente para n* < n ≤ n* + chain_margin

    Las comprobaciones que requieren conjuntos de subnivel completos se
    marcan ``skipped`` sobre una raíz incompleta.
    """
    k0 = canonical_class(form)
    if root is None:
        root = graded_root(form, k0, budget)
    w0 = root.zero_vertex
    checks: list[CheckResult] = []

    off_level = next((p for p in sorted(w0.members) if chi(form, k0, p) != 0), None)
    checks.append(
        CheckResult.ok("c0_zero_level")
        if off_level is None
        else CheckResult.failed(
            "c0_zero_level",
            f"χ = {chi(form, k0, off_level)} at {list(off_level)}",
        )
    )

    lower_neighbor = next(
        (
            other
            for point in sorted(w0.members)
            for other, _, step in _neighbors(form, k0, point, form.apply(point))
            if chi(form, k0, point) + step < 0
        ),
        None,
    )
    if root.children(w0.id):
        checks.append(
            CheckResult.failed(
                "c0_end_vertex", f"w0 has children {root.children(w0.id)}"
            )
        )
    elif lower_neighbor is not None:
        checks.append(
            CheckResult.failed(
                "c0_end_vertex", f"neighbor {list(lower_neighbor)} below level 0"
            )
        )
    else:
        checks.append(CheckResult.ok("c0_end_vertex"))

    if not root.complete or root.stable_level is None:
        reason = "full root beyond budget; only the trunk germ was built"
        for name in ("sublevel_connected", "single_vertex_per_level", "stable_chain"):
            checks.append(CheckResult.skipped(name, reason))
        return checks

    stable = root.stable_level
    highest = stable + max(3, chain_margin)
    counts: dict[int, int] | None
    try:
        counts = _component_counts(form, k0, root.min_level, highest, budget)
    except BudgetExceeded as e:
        logger.warning(f"Sublevel sets up to level {highest} out of budget: {e}")
        counts = None
    unavailable = f"S_{highest} beyond budget"

    if counts is None:
        checks.append(CheckResult.skipped("sublevel_connected", unavailable))
    else:
        split = next((n for n in range(1, stable + 4) if counts[n] != 1), None)
        checks.append(
            CheckResult.ok("sublevel_connected")
            if split is None
            else CheckResult.failed(
                "sublevel_connected", f"level {split} has {counts[split]} components"
            )
        )

    crowded = next(
        (lvl for lvl, count in root.level_counts().items() if lvl >= 1 and count > 1),
        None,
    )
    checks.append(
        CheckResult.ok("single_vertex_per_level")
        if crowded is None
        else CheckResult.failed(
            "single_vertex_per_level", f"level {crowded} has several vertices"
        )
    )

    if counts is None:
        checks.append(CheckResult.skipped("stable_chain", unavailable))
        return checks
    broken = next(
        (n for n in range(stable + 1, stable + chain_margin + 1) if counts[n] != 1),
        None,
    )
    checks.append(
        CheckResult.ok("stable_chain")
        if broken is None
        else CheckResult.failed(
            "stable_chain", f"level {broken} has {counts[broken]} components"
        )
    )
    return checks


def _component_counts(
    form: IntersectionForm, k: CharVector, lowest: int, highest: int, budget: int
) -> dict[int, int]:
    _guard(form, k, highest, budget)
    sublevel = enumerate_sublevel(form, k, highest, budget)
    vertices, _ = build_levels(sublevel.values, min(lowest, 1), highest)
    counts: dict[int, int] = {}
    for v in vertices:
        counts[v.level] = counts.get(v.level, 0) + 1
    return counts


# =============================================================================
# Exportación
# =============================================================================


def root_to_dot(root: GradedRoot) -> str:
    """Raíz en formato Graphviz DOT con el tronco resaltado."""
    trunk = set(root.trunk())
    size_prefix = "" if root.complete else ">="
    lines = ["graph graded_root {", "  rankdir=BT;", "  node [shape=box];"]
    for v in root.vertices:
        style = ", color=red, penwidth=2" if v.id in trunk else ""
        label = f"level={v.level}, size={size_prefix}{v.size}"
        lines.append(f'  v{v.id} [label="{label}"{style}];')
    for child, parent in root.edges:
        on_trunk = child in trunk and parent in trunk
        style = " [color=red, penwidth=2]" if on_trunk else ""
        lines.append(f"  v{child} -- v{parent}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
