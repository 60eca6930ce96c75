"""Corpus de grafos: grafos con nombre, esferas de Brieskorn y árboles aleatorios."""

import logging
import random
from dataclasses import dataclass
from importlib import resources
from math import gcd

import yaml

from plumbr.errors import NotNegativeDefinite, SingularMatrix
from plumbr.lattice.form import intersection_form
from plumbr.lattice.graph import PlumbingGraph, Vertex, make_graph, parse_graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    description: str
    graph: PlumbingGraph


def load_corpus() -> dict[str, CorpusEntry]:
    """Carga los grafos con nombre de ``config/corpus.yaml``."""
    text = resources.files("plumbr.config").joinpath("corpus.yaml").read_text()
    data = yaml.safe_load(text)
    return {
        name: CorpusEntry(
            name, entry.get("description", ""), parse_graph(entry["graph"])
        )
        for name, entry in data.items()
    }


def corpus_graph(name: str) -> PlumbingGraph:
    """Grafo del corpus por nombre.

    Raises:
        KeyError: Si el nombre no existe en el corpus
    """
    corpus = load_corpus()
    if name not in corpus:
        raise KeyError(f"unknown corpus graph '{name}'; known: {', '.join(corpus)}")
    return corpus[name].graph


# =============================================================================
# Esferas de Brieskorn
# =============================================================================


def negative_continued_fraction(a: int, b: int) -> list[int]:
    """[c₁, …, c_k] con a/b = c₁ − 1/(c₂ − 1/(… − 1/c_k)), cᵢ ≥ 2."""
    if not 0 < b < a:
        raise ValueError(f"expected 0 < b < a, got a={a}, b={b}")
    coefficients = []
    while b:
        c = -(-a // b)
        coefficients.append(c)
        a, b = b, c * b - a
    return coefficients


def brieskorn_graph(p: int, q: int, r: int) -> PlumbingGraph:
    """Plumbing definido negativo en forma de estrella de Σ(p, q, r).

    Con α ∈ {p, q, r} y N = pqr/α, los invariantes de Seifert son
    ω ≡ −N⁻¹ (mod α); el peso central es e₀ = (−1 − Σ ω·N)/pqr y cada pata
    es la fracción continua negativa de α/ω.

    Raises:
        ValueError: Si los exponentes no son ≥ 2 y coprimos dos a dos
    """
    alphas = (p, q, r)
    if min(alphas) < 2 or gcd(p, q) != 1 or gcd(q, r) != 1 or gcd(p, r) != 1:
        raise ValueError(f"({p}, {q}, {r}) must be pairwise coprime integers >= 2")

    total = p * q * r
    omegas = [(-pow(total // a, -1, a)) % a for a in alphas]
    numerator = -1 - sum(w * (total // a) for w, a in zip(omegas, alphas))
    if numerator % total:
        raise ValueError(f"central weight of Σ({p}, {q}, {r}) is not integral")

    vertices = [("c", numerator // total)]
    edges = []
    for leg, (a, w) in enumerate(zip(alphas, omegas), start=1):
        previous = "c"
        for j, weight in enumerate(negative_continued_fraction(a, w), start=1):
            name = f"l{leg}_{j}"
            vertices.append((name, -weight))
            edges.append((previous, name))
            previous = name
    return make_graph(vertices, edges)


# =============================================================================
# Árboles aleatorios
# =============================================================================


def _is_negative_definite(graph: PlumbingGraph) -> bool:
    try:
        intersection_form(graph)
    except (NotNegativeDefinite, SingularMatrix):
        return False
    return True


def random_tree(
    rng: random.Random,
    max_vertices: int = 5,
    weights: tuple[int, int] = (-4, -2),
    attempts: int = 100,
) -> PlumbingGraph:
    """Árbol aleatorio definido negativo con pesos en [weights[0], weights[1]].

    Raises:
        RuntimeError: Si ningún intento resulta definido negativo
    """
    for _ in range(attempts):
        n = rng.randint(1, max_vertices)
        vertices = [(f"v{i}", rng.randint(*weights)) for i in range(n)]
        edges = [(f"v{rng.randrange(i)}", f"v{i}") for i in range(1, n)]
        graph = make_graph(vertices, edges)
        if _is_negative_definite(graph):
            return graph
    raise RuntimeError(f"no negative-definite tree after {attempts} attempts")


def _fresh_name(graph: PlumbingGraph) -> str:
    i = 0
    while f"x{i}" in graph.names:
        i += 1
    return f"x{i}"


def blow_up_vertex(graph: PlumbingGraph, name: str) -> PlumbingGraph:
    """Blowup de un punto genérico de la curva ``name``: nueva hoja −1."""
    new = _fresh_name(graph)
    vertices = [
        Vertex(v.name, v.weight - 1) if v.name == name else v for v in graph.vertices
    ]
    vertices.append(Vertex(new, -1))
    return PlumbingGraph(tuple(vertices), graph.edges + ((name, new),))


def blow_up_edge(graph: PlumbingGraph, a: str, b: str) -> PlumbingGraph:
    """Blowup del punto de corte de a y b: un vértice −1 entre ambos."""
    edge = tuple(sorted((a, b)))
    if edge not in graph.edges:
        raise ValueError(f"{a} and {b} are not adjacent")
    new = _fresh_name(graph)
    vertices = [
        Vertex(v.name, v.weight - 1) if v.name in (a, b) else v
        for v in graph.vertices
    ]
    vertices.append(Vertex(new, -1))
    edges = tuple(e for e in graph.edges if e != edge) + ((a, new), (new, b))
    return PlumbingGraph(tuple(vertices), edges)


def random_blowups(
    graph: PlumbingGraph, rng: random.Random, blowups: int = 2
) -> PlumbingGraph:
    """Aplica ``blowups`` blowups al azar; la 3-variedad frontera no cambia."""
    for _ in range(blowups):
        if graph.edges and rng.random() < 0.5:
            a, b = rng.choice(graph.edges)
            graph = blow_up_edge(graph, a, b)
        else:
            graph = blow_up_vertex(graph, rng.choice(graph.names))
    return graph


def random_blown_up_tree(
    rng: random.Random, max_vertices: int = 4, blowups: int = 2
) -> PlumbingGraph:
    """Árbol aleatorio seguido de ``blowups`` blowups buenos al azar."""
    graph = random_blowups(random_tree(rng, max_vertices), rng, blowups)
    logger.debug(f"Random blown-up tree with {graph.n} vertices")
    return graph
