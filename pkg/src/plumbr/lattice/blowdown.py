"""Cálculo de blowdowns sobre H₂(X), proximidad y los conjuntos 𝒟 y 𝒮.

Los blowdowns se hacen en el retículo fijo H₂(X) y nunca reescribiendo el
grafo: tras varios rounds la configuración puede tener tangencias o puntos
triples y deja de ser un árbol de plumbing.
"""

import logging
from dataclasses import dataclass, field

from plumbr.errors import InvariantViolated, RecursionMismatch, SubsetCapExceeded
from plumbr.lattice.chars import (
    CharVector,
    canonical_class,
    char_vector,
    chi,
    same_orbit,
    shift,
    w,
)
from plumbr.lattice.form import IntersectionForm, LatticePoint, intersection_form
from plumbr.lattice.graph import PlumbingGraph
from plumbr.lattice.roots import DEFAULT_BUDGET, component_of
from plumbr.schema import CheckResult

logger = logging.getLogger(__name__)

DEFAULT_SUBSET_CAP = 20


@dataclass(frozen=True)
class BlownDownClass:
    """Clase D de la curva del vértice ``vertex``, contraída en ``round``."""

    vertex: str
    index: int
    round: int
    vector: LatticePoint


@dataclass(frozen=True)
class Proximity:
    """E^source ⇝ E^target con su número de intersección."""

    source: str
    target: str
    round: int
    multiplicity: int
    target_blown_down: bool = False


@dataclass(frozen=True)
class Survivor:
    """Imagen de una curva que no se contrae."""

    vertex: str
    vector: LatticePoint
    self_intersection: int
    smooth: bool


@dataclass
class CurveState:
    """Estado mutable durante los rounds: clase actual, vida y suavidad."""

    classes: list[list[int]]
    alive: list[bool]
    smooth: list[bool]
    round: int = 0

    @classmethod
    def initial(cls, n: int) -> "CurveState":
        return cls(
            classes=[[int(i == j) for j in range(n)] for i in range(n)],
            alive=[True] * n,
            smooth=[True] * n,
        )


@dataclass(frozen=True)
class BlowdownTrace:
    """Rounds de blowdown, relación de proximidad y estado terminal."""

    form: IntersectionForm
    rounds: tuple[tuple[BlownDownClass, ...], ...]
    proximities: tuple[Proximity, ...]
    survivors: tuple[Survivor, ...]

    @property
    def classes(self) -> tuple[BlownDownClass, ...]:
        """𝒟 en orden de contracción."""
        return tuple(c for round_ in self.rounds for c in round_)

    def class_of(self, vertex: str) -> BlownDownClass:
        for c in self.classes:
            if c.vertex == vertex:
                return c
        raise KeyError(vertex)

    def survivor_intersections(self) -> list[tuple[str, str, int]]:
        """Intersecciones entre las imágenes supervivientes."""
        return [
            (a.vertex, b.vertex, self.form.dot(a.vector, b.vector))
            for i, a in enumerate(self.survivors)
            for b in self.survivors[i + 1 :]
        ]


def blowdown_sequence(source: IntersectionForm | PlumbingGraph) -> BlowdownTrace:
    """Contrae greedy todas las (−1)-curvas lisas, round a round.

    En cada round se contraen a la vez todas las curvas vivas, lisas y con
    autointersección −1. Cada clase viva C pasa a C + (C·d)·d; sigue lisa
    si C·d ≤ 1 para toda d del round.

    Raises:
        InvariantViolated: Si dos clases simultáneas se cortan o si una
            proximidad entre clases contraídas tiene número distinto de 1
    """
    form = source if isinstance(source, IntersectionForm) else intersection_form(source)
    names = form.graph.names
    state = CurveState.initial(form.n)
    rounds: list[tuple[BlownDownClass, ...]] = []
    proximities: list[Proximity] = []

    while True:
        eligible = [
            b
            for b in range(form.n)
            if state.alive[b]
            and state.smooth[b]
            and form.dot(state.classes[b], state.classes[b]) == -1
        ]
        if not eligible:
            break
        state.round += 1
        blown = [
            BlownDownClass(names[b], b, state.round, tuple(state.classes[b]))
            for b in eligible
        ]

        for i, d in enumerate(blown):
            for other in blown[i + 1 :]:
                if form.dot(d.vector, other.vector) != 0:
                    raise InvariantViolated(
                        f"simultaneous classes of {d.vertex} and {other.vertex} "
                        "intersect"
                    )
        for b in eligible:
            state.alive[b] = False

        for c in range(form.n):
            if not state.alive[c]:
                continue
            current = state.classes[c]
            updated = list(current)
            for d in blown:
                m = form.dot(current, d.vector)
                if m < 0:
                    raise InvariantViolated(
                        f"negative intersection {m} between {d.vertex} and {names[c]}"
                    )
                if m == 0:
                    continue
                proximities.append(Proximity(d.vertex, names[c], state.round, m))
                if m > 1:
                    state.smooth[c] = False
                updated = [a + m * b for a, b in zip(updated, d.vector)]
            state.classes[c] = updated

        logger.debug(f"Round {state.round}: blew down {[d.vertex for d in blown]}")
        rounds.append(tuple(blown))

    blown_names = {c.vertex for r in rounds for c in r}
    marked = []
    for p in proximities:
        if p.target in blown_names:
            if p.multiplicity != 1:
                raise InvariantViolated(
                    f"{p.source} meets {p.target} with multiplicity {p.multiplicity}"
                )
            p = Proximity(p.source, p.target, p.round, p.multiplicity, True)
        marked.append(p)

    survivors = tuple(
        Survivor(
            names[c],
            tuple(state.classes[c]),
            form.dot(state.classes[c], state.classes[c]),
            state.smooth[c],
        )
        for c in range(form.n)
        if state.alive[c]
    )
    logger.info(
        f"Blowdown finished after {len(rounds)} rounds: "
        f"{len(blown_names)} classes, {len(survivors)} survivors"
    )
    return BlowdownTrace(form, tuple(rounds), tuple(marked), survivors)


def proximity_relation(trace: BlowdownTrace) -> tuple[Proximity, ...]:
    """Pares E^a ⇝ E^b con su multiplicidad.

    Las proximidades hacia curvas supervivientes pueden tener multiplicidad
    ≥ 2 (imagen singular) y quedan fuera de la recursión de 𝒟.
    """
    return trace.proximities


def d_classes(trace: BlowdownTrace) -> list[LatticePoint]:
    """Devuelve 𝒟 comprobando D^m = E^m + Σ_{E^n ⇝ E^m} D^n.

    Raises:
        RecursionMismatch: Si la recursión no reproduce la clase registrada
    """
    n = trace.form.n
    for c in trace.classes:
        expected = [int(i == c.index) for i in range(n)]
        for p in trace.proximities:
            if p.target == c.vertex:
                source = trace.class_of(p.source).vector
                expected = [a + b for a, b in zip(expected, source)]
        if tuple(expected) != c.vector:
            raise RecursionMismatch(
                f"class of {c.vertex}: recorded {list(c.vector)}, "
                f"recursion gives {expected}"
            )
    return [c.vector for c in trace.classes]


# =============================================================================
# 𝒮 y sus verificaciones
# =============================================================================


@dataclass(frozen=True)
class SSet:
    """Sumas de subconjuntos de 𝒟, indexadas por posiciones en 𝒟."""

    classes: tuple[BlownDownClass, ...]
    sums: dict[frozenset[int], LatticePoint] = field(hash=False)

    @property
    def points(self) -> frozenset[LatticePoint]:
        return frozenset(self.sums.values())

    def __len__(self) -> int:
        return len(self.sums)


def s_set(trace: BlowdownTrace, cap: int = DEFAULT_SUBSET_CAP) -> SSet:
    """Materializa 𝒮 y verifica los invariantes de 𝒟.

    Comprueba ⟨K₀, d⟩ = 1, d·d = −1, d·d′ = 0 y χ_{K₀} = 0 sobre cada suma.

    Raises:
        SubsetCapExceeded: Si |𝒟| > cap
        InvariantViolated: Si falla alguno de los invariantes
    """
    form = trace.form
    k0 = canonical_class(form)
    classes = trace.classes
    if len(classes) > cap:
        raise SubsetCapExceeded(cap, f"materializing 2^{len(classes)} subset sums")

    for i, d in enumerate(classes):
        pairing = sum(a * b for a, b in zip(k0.evals, d.vector))
        if pairing != 1 or form.dot(d.vector, d.vector) != -1:
            raise InvariantViolated(
                f"class of {d.vertex}: <K0, d> = {pairing}, "
                f"d·d = {form.dot(d.vector, d.vector)}"
            )
        for other in classes[i + 1 :]:
            if form.dot(d.vector, other.vector) != 0:
                raise InvariantViolated(
                    f"classes of {d.vertex} and {other.vertex} are not orthogonal"
                )

    zero = (0,) * form.n
    by_mask: list[LatticePoint] = [zero]
    for mask in range(1, 2 ** len(classes)):
        low = (mask & -mask).bit_length() - 1
        rest = by_mask[mask & (mask - 1)]
        by_mask.append(tuple(a + b for a, b in zip(rest, classes[low].vector)))

    sums: dict[frozenset[int], LatticePoint] = {}
    for mask, point in enumerate(by_mask):
        if chi(form, k0, point) != 0:
            raise InvariantViolated(f"χ = {chi(form, k0, point)} at {list(point)}")
        sums[frozenset(i for i in range(len(classes)) if mask >> i & 1)] = point
    return SSet(classes, sums)


def lexicographic_path(
    trace: BlowdownTrace,
    subset: frozenset[int],
    memo: dict[frozenset[int], list[int]] | None = None,
) -> list[int]:
    """Camino de pasos de la base de 0 a Σ_F.

    Se toma el sumando D^u de menor round, se escribe D^u = E^u + D̄ con D̄ la
    suma de las clases próximas a E^u, y F = (F − D^u + D̄) + E^u. Devuelve
    los índices de vértice de cada paso.

    Raises:
        RecursionMismatch: Si F − D^u y D̄ se solapan
    """
    memo = {} if memo is None else memo
    if not subset:
        return []
    if subset in memo:
        return memo[subset]

    classes = trace.classes
    position = {c.vertex: i for i, c in enumerate(classes)}
    first = min(subset, key=lambda i: (classes[i].round, i))
    chosen = classes[first]
    rest = subset - {first}
    below = frozenset(
        position[p.source] for p in trace.proximities if p.target == chosen.vertex
    )
    if rest & below:
        raise RecursionMismatch(
            f"subset {sorted(subset)} overlaps the proximate classes of "
            f"{chosen.vertex}"
        )
    path = lexicographic_path(trace, rest | below, memo) + [chosen.index]
    memo[subset] = path
    return path


@dataclass
class SEqualsC0Report:
    """Resultado de comparar 𝒮 con la componente C₀."""

    checks: list[CheckResult]
    s_size: int
    c0_size: int
    deepest_path: list[str] = field(default_factory=list)


def verify_s_equals_c0(
    source: IntersectionForm | PlumbingGraph,
    trace: BlowdownTrace | None = None,
    budget: int = DEFAULT_BUDGET,
    cap: int = DEFAULT_SUBSET_CAP,
) -> SEqualsC0Report:
    """Comprueba 𝒮 = C₀ y reconstruye el camino de cada F ∈ 𝒮 hasta 0."""
    form = source if isinstance(source, IntersectionForm) else intersection_form(source)
    trace = trace or blowdown_sequence(form)
    k0 = canonical_class(form)
    sset = s_set(trace, cap)
    c0 = component_of(form, k0, 0, (0,) * form.n, budget)
    points = sset.points

    checks: list[CheckResult] = []
    missing = sorted(c0 - points)
    extra = sorted(points - c0)
    if not missing and not extra:
        checks.append(CheckResult.ok("s_equals_c0"))
    else:
        witness = missing[0] if missing else extra[0]
        side = "in C0 but not in S" if missing else "in S but not in C0"
        checks.append(CheckResult.failed("s_equals_c0", f"{list(witness)} {side}"))

    memo: dict[frozenset[int], list[int]] = {}
    failure: str | None = None
    for subset, target in sorted(sset.sums.items(), key=lambda kv: sorted(kv[0])):
        try:
            steps = lexicographic_path(trace, subset, memo)
        except RecursionMismatch as e:
            failure = str(e)
            break
        walk = [0] * form.n
        for vertex in steps:
            walk[vertex] += 1
            if tuple(walk) not in points:
                failure = f"partial sum {walk} of {sorted(subset)} leaves S"
                break
        if failure is None and tuple(walk) != target:
            failure = f"path of {sorted(subset)} ends at {walk}"
        if failure:
            break
    checks.append(
        CheckResult.ok("s_paths")
        if failure is None
        else CheckResult.failed("s_paths", failure)
    )

    deepest: list[str] = []
    if trace.classes and failure is None:
        last = frozenset({len(trace.classes) - 1})
        deepest = [form.graph.names[v] for v in lexicographic_path(trace, last, memo)]

    return SEqualsC0Report(checks, len(sset), len(c0), deepest)


@dataclass
class Phi0Support:
    """Soporte {K₀ + 2PD(s) : s ∈ 𝒮} de φ₀ con sus verificaciones."""

    vectors: list[CharVector]
    checks: list[CheckResult]


def phi0_support(
    trace: BlowdownTrace, cap: int = DEFAULT_SUBSET_CAP
) -> Phi0Support:
    """Soporte de φ₀ en el modelo Char.

    Cada elemento debe ser característico, estar en la órbita [K₀] y tener
    w igual a w(K₀), porque χ_{K₀}(s) = 0.
    """
    form = trace.form
    k0 = canonical_class(form)
    target_w = w(form, k0)
    vectors = [shift(form, k0, s) for s in sorted(s_set(trace, cap).points)]

    def is_characteristic(k: CharVector) -> bool:
        try:
            char_vector(form, k.evals)
        except ValueError:
            return False
        return True

    parity = next((k for k in vectors if not is_characteristic(k)), None)
    foreign = next((k for k in vectors if not same_orbit(form, k0, k)), None)
    uneven = next((k for k in vectors if w(form, k) != target_w), None)

    checks = [
        CheckResult.ok("phi0_characteristic")
        if parity is None
        else CheckResult.failed("phi0_characteristic", str(parity)),
        CheckResult.ok("phi0_orbit")
        if foreign is None
        else CheckResult.failed("phi0_orbit", str(foreign)),
        CheckResult.ok("phi0_weight")
        if uneven is None
        else CheckResult.failed("phi0_weight", f"w({uneven}) = {w(form, uneven)}"),
    ]
    return Phi0Support(vectors, checks)
