"""Grafos de plumbing: tipos, parser y serialización.

Formato de texto (UTF-8, por líneas):

    # comentario
    vertex <nombre> <peso entero>
    edge <nombre> <nombre>

El orden de declaración de los vértices es el orden canónico de la base en
todo el resto del paquete. También se acepta el espejo JSON
``{"vertices": [{"name": ..., "weight": ...}], "edges": [["a", "b"]]}``.
"""

import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import networkx as nx
from pydantic import ValidationError

from plumbr.errors import GraphParseError, GraphValidationError

logger = logging.getLogger(__name__)

NAME_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")
INTEGER_PATTERN = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class Vertex:
    """Vértice esférico (género 0) con su peso de Euler."""

    name: str
    weight: int


@dataclass(frozen=True)
class PlumbingGraph:
    """Árbol ponderado de esferas.

    Las aristas se guardan normalizadas: cada par ordenado y la lista
    ordenada lexicográficamente.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphValidationError("empty graph: no vertices declared")

        names = [v.name for v in self.vertices]
        seen: set[str] = set()
        for name in names:
            if not NAME_PATTERN.match(name):
                raise GraphValidationError(f"invalid vertex name '{name}'")
            if name in seen:
                raise GraphValidationError(f"duplicate vertex '{name}'")
            seen.add(name)

        normalized: set[tuple[str, str]] = set()
        for a, b in self.edges:
            for end in (a, b):
                if end not in seen:
                    raise GraphValidationError(f"unknown vertex '{end}' in edge")
            if a == b:
                raise GraphValidationError(f"self-loop at '{a}': cycle detected")
            pair = (a, b) if a < b else (b, a)
            if pair in normalized:
                raise GraphValidationError(
                    f"duplicate edge {pair[0]}-{pair[1]}: cycle detected"
                )
            normalized.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

        tree = self.to_networkx()
        if not nx.is_forest(tree):
            cycle = nx.find_cycle(tree)
            raise GraphValidationError(
                f"cycle detected through {[edge[0] for edge in cycle]}"
            )
        if not nx.is_connected(tree):
            raise GraphValidationError(
                f"disconnected graph: {nx.number_connected_components(tree)} "
                "components"
            )

    # =========================================================================
    # Acceso
    # =========================================================================

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vertices)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(v.weight for v in self.vertices)

    def index(self, name: str) -> int:
        """Posición del vértice en la base canónica."""
        for i, v in enumerate(self.vertices):
            if v.name == name:
                return i
        raise KeyError(name)

    def neighbors(self, name: str) -> list[str]:
        """Vecinos de un vértice, en orden canónico."""
        adjacent = {b if a == name else a for a, b in self.edges if name in (a, b)}
        return [v for v in self.names if v in adjacent]

    def to_networkx(self) -> nx.Graph:
        """Árbol como ``networkx.Graph`` con el peso en el atributo ``weight``."""
        tree = nx.Graph()
        for v in self.vertices:
            tree.add_node(v.name, weight=v.weight)
        tree.add_edges_from(self.edges)
        return tree

    def permuted(self, order: Sequence[str]) -> "PlumbingGraph":
        """Mismo grafo con otro orden de declaración."""
        if sorted(order) != sorted(self.names):
            raise GraphValidationError("permutation must list every vertex once")
        by_name = {v.name: v for v in self.vertices}
        return PlumbingGraph(
            vertices=tuple(by_name[name] for name in order),
            edges=self.edges,
        )

    # =========================================================================
    # Serialización
    # =========================================================================

    def to_text(self) -> str:
        """Forma canónica en el formato de texto."""
        lines = [f"vertex {v.name} {v.weight}" for v in self.vertices]
        lines.extend(f"edge {a} {b}" for a, b in self.edges)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        """Forma canónica en el espejo JSON."""
        from plumbr.schema import GraphDocument

        return GraphDocument.from_graph(self).model_dump_json(indent=2)


def make_graph(
    vertices: Iterable[tuple[str, int]],
    edges: Iterable[tuple[str, str]] = (),
) -> PlumbingGraph:
    """Atajo para construir un grafo desde pares (nombre, peso)."""
    return PlumbingGraph(
        vertices=tuple(Vertex(name, weight) for name, weight in vertices),
        edges=tuple(edges),
    )


# =============================================================================
# Parser
# =============================================================================


def _looks_like_json(text: str) -> bool:
    return text.lstrip().startswith("{")


def _column_of(raw: str, token_index: int) -> int:
    """Columna 1-based del token ``token_index`` de la línea."""
    position = 0
    for i, match in enumerate(re.finditer(r"\S+", raw)):
        position = match.start()
        if i == token_index:
            break
    return position + 1


def _parse_json(text: str) -> PlumbingGraph:
    from plumbr.schema import GraphDocument

    try:
        document = GraphDocument.model_validate_json(text)
    except ValidationError as e:
        raise GraphParseError(f"invalid JSON graph: {e.errors()[0]['msg']}", 1) from e
    return document.to_graph()


def parse_graph(text: str) -> PlumbingGraph:
    """Parsea un grafo de plumbing desde texto o JSON.

    Args:
        text: Fuente del grafo en el formato de líneas o el espejo JSON

    Returns:
        PlumbingGraph validado (árbol conexo, nombres únicos)

    Raises:
        GraphParseError: Si hay un error de sintaxis (con línea y columna)
        GraphValidationError: Si el grafo no es un árbol válido
    """
    if _looks_like_json(text):
        return _parse_json(text)

    vertices: list[Vertex] = []
    declared: dict[str, int] = {}
    edges: list[tuple[str, str, int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        keyword = tokens[0]

        if keyword == "vertex":
            if len(tokens) < 3:
                raise GraphParseError(
                    "expected 'vertex <name> <weight>'", lineno, _column_of(raw, 0)
                )
            if len(tokens) > 3:
                raise GraphParseError(
                    f"unexpected token '{tokens[3]}' (genus decorations are "
                    "not supported)",
                    lineno,
                    _column_of(raw, 3),
                )
            name, weight = tokens[1], tokens[2]
            if not NAME_PATTERN.match(name):
                raise GraphParseError(
                    f"invalid vertex name '{name}'", lineno, _column_of(raw, 1)
                )
            if not INTEGER_PATTERN.match(weight):
                raise GraphParseError(
                    f"weight must be an integer, got '{weight}'",
                    lineno,
                    _column_of(raw, 2),
                )
            if name in declared:
                raise GraphParseError(
                    f"duplicate vertex '{name}' (first declared on line "
                    f"{declared[name]})",
                    lineno,
                    _column_of(raw, 1),
                )
            declared[name] = lineno
            vertices.append(Vertex(name, int(weight)))

        elif keyword == "edge":
            if len(tokens) != 3:
                raise GraphParseError(
                    "expected 'edge <name> <name>'", lineno, _column_of(raw, 0)
                )
            for position in (1, 2):
                if not NAME_PATTERN.match(tokens[position]):
                    raise GraphParseError(
                        f"invalid vertex name '{tokens[position]}'",
                        lineno,
                        _column_of(raw, position),
                    )
            edges.append((tokens[1], tokens[2], lineno, raw))

        else:
            raise GraphParseError(
                f"unknown keyword '{keyword}'", lineno, _column_of(raw, 0)
            )

    # Las aristas pueden citar vértices declarados más abajo
    for a, b, lineno, raw in edges:
        for position, end in ((1, a), (2, b)):
            if end not in declared:
                raise GraphParseError(
                    f"unknown vertex '{end}' in edge",
                    lineno,
                    _column_of(raw, position),
                )

    graph = PlumbingGraph(
        vertices=tuple(vertices),
        edges=tuple((a, b) for a, b, _, _ in edges),
    )
    logger.debug(f"Parsed graph with {graph.n} vertices and {len(graph.edges)} edges")
    return graph
