"""plumbr - Cohomología reticular de grafos de plumbing.

Construye la raíz graduada de χ_K de un árbol de plumbing definido negativo,
contrae las (−1)-curvas sobre H₂(X) para obtener 𝒟 y 𝒮, y decide si la
función ψ₀ del vértice canónico está en la imagen de U.
"""

__version__ = "0.1.0"

from plumbr.lattice.form import IntersectionForm, intersection_form
from plumbr.lattice.graph import PlumbingGraph, parse_graph
from plumbr.orchestrator import Verifier
from plumbr.schema import Settings, VerifyReport

__all__ = [
    "__version__",
    "IntersectionForm",
    "PlumbingGraph",
    "Settings",
    "Verifier",
    "VerifyReport",
    "intersection_form",
    "parse_graph",
]
