"""Núcleo numérico: grafo, forma, vectores característicos, raíces y modelos."""

from plumbr.lattice.blowdown import BlowdownTrace, blowdown_sequence, s_set
from plumbr.lattice.chars import CharVector, canonical_class, chi
from plumbr.lattice.form import IntersectionForm, intersection_form
from plumbr.lattice.graph import PlumbingGraph, Vertex, make_graph, parse_graph
from plumbr.lattice.roots import GradedRoot, graded_root
from plumbr.lattice.tower import RootFunction, TowerElement, in_im_u, psi0

__all__ = [
    "BlowdownTrace",
    "CharVector",
    "GradedRoot",
    "IntersectionForm",
    "PlumbingGraph",
    "RootFunction",
    "TowerElement",
    "Vertex",
    "blowdown_sequence",
    "canonical_class",
    "chi",
    "graded_root",
    "in_im_u",
    "intersection_form",
    "make_graph",
    "parse_graph",
    "psi0",
    "s_set",
]
