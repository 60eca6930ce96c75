"""Pytest fixtures para los tests de plumbr."""

import json
import tempfile
from pathlib import Path
from typing import Any, Callable, Generator

import pytest

from plumbr.corpus import corpus_graph
from plumbr.lattice.form import IntersectionForm, intersection_form
from plumbr.lattice.graph import PlumbingGraph
from plumbr.schema import Settings


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Directorio temporal para tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def sigma_graph() -> PlumbingGraph:
    """Σ(2,3,7): C(−1) unido a A(−2), B(−3) y F(−7)."""
    return corpus_graph("sigma_2_3_7")


@pytest.fixture
def sigma_form(sigma_graph: PlumbingGraph) -> IntersectionForm:
    return intersection_form(sigma_graph)


@pytest.fixture
def torus_form() -> IntersectionForm:
    """Cirugía −1 sobre el nudo tórico (8, 11)."""
    return intersection_form(corpus_graph("torus_8_11_surgery"))


@pytest.fixture
def e8_form() -> IntersectionForm:
    return intersection_form(corpus_graph("e8"))


@pytest.fixture
def chain_form() -> IntersectionForm:
    """Cadena v1(−1), v2(−2)."""
    return intersection_form(corpus_graph("chain_m1_m2"))


@pytest.fixture
def small_settings() -> Settings:
    """Presupuestos pequeños para que los tests sean rápidos."""
    return Settings(budget=200_000, germ_budget=50_000, chain_margin=3)


@pytest.fixture
def sample_graph_text() -> str:
    """Grafo de ejemplo en el formato de líneas."""
    return """
# Σ(2,3,7)
vertex C -1
vertex A -2
vertex B -3
vertex F -7
edge C A
edge C B
edge C F
"""


@pytest.fixture
def sample_graph_file(temp_dir: Path, sample_graph_text: str) -> Path:
    """Archivo de grafo de ejemplo."""
    path = temp_dir / "sigma.txt"
    path.write_text(sample_graph_text)
    return path


def _json_output(stdout: str) -> Any:
    lines = stdout.splitlines()
    start = lines.index("{")
    end = len(lines) - 1 - lines[::-1].index("}")
    return json.loads("\n".join(lines[start : end + 1]))


@pytest.fixture
def json_output() -> Callable[[str], Any]:
    """Extrae el documento JSON de la salida de la CLI.

    El documento empieza en la primera línea "{" y termina en la última "}".
    """
    return _json_output
