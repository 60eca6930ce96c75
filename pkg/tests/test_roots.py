"""Tests de conjuntos de subnivel, mínimos locales y la raíz graduada."""

from fractions import Fraction
from itertools import product
from math import ceil, sqrt

import pytest

from plumbr.corpus import corpus_graph
from plumbr.errors import BudgetExceeded
from plumbr.lattice.chars import (
    CharVector,
    canonical_class,
    chi,
    same_orbit,
    shift,
)
from plumbr.lattice.form import IntersectionForm, intersection_form, ldl_decomposition
from plumbr.lattice.graph import make_graph
from plumbr.lattice.roots import (
    build_levels,
    canonical_trunk_germ,
    component_of,
    components,
    enumerate_sublevel,
    graded_root,
    local_minima,
    plateau_minima,
    root_to_dot,
    verify_canonical_root_shape,
)

TOP_LEVEL = 5


def _form(name: str) -> IntersectionForm:
    return intersection_form(corpus_graph(name))


def _small_forms() -> list[tuple[str, IntersectionForm]]:
    """Grafos del corpus con a lo sumo 3 vértices y la cadena (−2, −2, −7)."""
    forms = [
        (name, _form(name)) for name in ("single_m1", "single_m2", "a2", "chain_m1_m2")
    ]
    chain = make_graph([("a", -2), ("b", -2), ("c", -7)], [("a", "b"), ("b", "c")])
    forms.append(("chain_m2_m2_m7", intersection_form(chain)))
    return forms


SMALL_FORMS = _small_forms()


def _naive_radius(form: IntersectionForm, k: CharVector, level: int) -> int:
    """Radio B con |x|∞ ≤ B para todo x con χ_K(x) ≤ level.

    Con M = L·D·Lᵀ y y = Lᵀx se tiene −x·x = Σ|dᵢ|·yᵢ² ≥ λ·|x|², donde
    λ = min|dᵢ| / ‖L⁻¹‖²_F. De 2χ = −x·x − ⟨K, x⟩ ≤ 2·level sale
    λ·s² − |K|·s ≤ 2·level para s = |x|.
    """
    lower, pivots = ldl_decomposition(form.matrix)
    n = form.n
    inverse = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            inverse[i][j] = -sum(
                (lower[i][m] * inverse[m][j] for m in range(j, i)), Fraction(0)
            )
    frobenius = sum(entry**2 for row in inverse for entry in row)
    lam = float(min(-p for p in pivots) / frobenius)
    k_norm = sqrt(sum(c * c for c in k.evals))
    disc = max(k_norm**2 + 8 * lam * level, 0.0)
    return ceil((k_norm + sqrt(disc)) / (2 * lam)) + 1


def _brute_force(
    form: IntersectionForm, k: CharVector, top: int = TOP_LEVEL
) -> dict[tuple[int, ...], int]:
    """χ_K sobre la caja [−B, B]ⁿ, filtrado a χ_K ≤ top."""
    b = _naive_radius(form, k, top)
    values = {x: chi(form, k, x) for x in product(range(-b, b + 1), repeat=form.n)}
    return {x: value for x, value in values.items() if value <= top}


def _other_class(form: IntersectionForm) -> CharVector:
    """K₀ + 2·e₀: en otra órbita cuando e₀ ∉ M·ℤⁿ."""
    k0 = canonical_class(form)
    return CharVector((k0.evals[0] + 2,) + k0.evals[1:])


class TestEnumeration:
    """Tests de la enumeración de S_n contra fuerza bruta."""

    @pytest.mark.parametrize("name,form", SMALL_FORMS, ids=[n for n, _ in SMALL_FORMS])
    def test_matches_brute_force(self, name: str, form: IntersectionForm) -> None:
        """Verifica S_n = caja ingenua filtrada para todo n ≤ 5."""
        k0 = canonical_class(form)
        values = _brute_force(form, k0)
        lowest = min(values.values())

        assert lowest == graded_root(form, k0).min_level
        for level in range(lowest - 1, TOP_LEVEL + 1):
            expected = {x for x, value in values.items() if value <= level}
            assert set(enumerate_sublevel(form, k0, level).points) == expected

    @pytest.mark.parametrize("name,form", SMALL_FORMS, ids=[n for n, _ in SMALL_FORMS])
    def test_other_class_matches_brute_force(
        self, name: str, form: IntersectionForm
    ) -> None:
        k = _other_class(form)
        values = _brute_force(form, k)
        lowest = min(values.values())

        if abs(form.det) > 1:
            assert not same_orbit(form, k, canonical_class(form))
        for level in range(lowest - 1, TOP_LEVEL + 1):
            expected = {x for x, value in values.items() if value <= level}
            assert set(enumerate_sublevel(form, k, level).points) == expected

    def test_shifted_class_translates_sublevel(self) -> None:
        """Verifica S_n(K + 2·PD(y)) = S_{n + χ(y)}(K) − y."""
        form = _form("a2")
        k0 = canonical_class(form)
        y = (1, -1)
        moved = shift(form, k0, y)
        offset = chi(form, k0, y)

        for level in range(0, 4):
            original = enumerate_sublevel(form, k0, level + offset).points
            translated = {tuple(a - b for a, b in zip(x, y)) for x in original}
            assert set(enumerate_sublevel(form, moved, level).points) == translated

    def test_values_are_chi(self, sigma_form: IntersectionForm) -> None:
        k0 = canonical_class(sigma_form)
        sublevel = enumerate_sublevel(sigma_form, k0, 1)

        for point, value in sublevel.values.items():
            assert value == chi(sigma_form, k0, point) <= 1

    def test_single_m1_level_one(self) -> None:
        form = _form("single_m1")
        sublevel = enumerate_sublevel(form, canonical_class(form), 1)

        assert sorted(sublevel.points) == [(-1,), (0,), (1,), (2,)]

    def test_below_minimum_is_empty(self) -> None:
        form = _form("single_m2")

        assert len(enumerate_sublevel(form, canonical_class(form), -1)) == 0

    def test_budget(self, e8_form: IntersectionForm) -> None:
        with pytest.raises(BudgetExceeded):
            enumerate_sublevel(e8_form, canonical_class(e8_form), 1, budget=10)

    def test_restricted(self) -> None:
        form = _form("single_m1")
        sublevel = enumerate_sublevel(form, canonical_class(form), 3)

        assert sorted(sublevel.restricted(0).points) == [(0,), (1,)]


class TestComponents:
    def test_c0_single_m1(self) -> None:
        form = _form("single_m1")

        assert component_of(form, canonical_class(form), 0, (0,)) == {(0,), (1,)}

    def test_c0_chain(self, chain_form: IntersectionForm) -> None:
        """Verifica C₀ = {0, v1, v1+v2, 2v1+v2}."""
        c0 = component_of(chain_form, canonical_class(chain_form), 0, (0, 0))

        assert c0 == {(0, 0), (1, 0), (1, 1), (2, 1)}

    def test_seed_above_level(self, chain_form: IntersectionForm) -> None:
        with pytest.raises(ValueError):
            component_of(chain_form, canonical_class(chain_form), 0, (0, 1))

    def test_sigma_level_zero_has_two_components(
        self, sigma_form: IntersectionForm
    ) -> None:
        sublevel = enumerate_sublevel(sigma_form, canonical_class(sigma_form), 0)

        assert len(components(sublevel)) == 2


class TestLocalMinima:
    """Tests de los mínimos locales débiles y las mesetas cerradas."""

    def test_single_m2(self) -> None:
        form = _form("single_m2")

        assert local_minima(form, canonical_class(form)) == {(0,)}

    def test_e8_weak_minima(self, e8_form: IntersectionForm) -> None:
        """Verifica que E8 tiene 3⁸ mínimos débiles pero una sola hoja."""
        k0 = canonical_class(e8_form)

        assert len(local_minima(e8_form, k0)) == 6561
        plateaus = plateau_minima(e8_form, k0)
        assert len(plateaus) == 1
        assert plateaus[0].level == 0
        assert plateaus[0].points == {(0,) * 8}

    def test_sigma_plateaus(self, sigma_form: IntersectionForm) -> None:
        plateaus = plateau_minima(sigma_form, canonical_class(sigma_form))

        assert [p.level for p in plateaus] == [0, 0]

    @pytest.mark.parametrize("name", ["a2", "chain_m1_m2", "sigma_2_3_7"])
    def test_plateau_certificate_matches_weak_minima(self, name: str) -> None:
        """Verifica que S_n es conexo desde n* hasta el nivel de los mínimos débiles."""
        form = _form(name)
        k0 = canonical_class(form)
        stable = graded_root(form, k0).stable_level
        weak = max(chi(form, k0, x) for x in local_minima(form, k0))
        closed = max(p.level for p in plateau_minima(form, k0))

        assert stable is not None
        assert closed <= weak
        for level in range(stable, max(weak, stable) + 2):
            assert len(components(enumerate_sublevel(form, k0, level))) == 1

    def test_minima_are_minimal(self, sigma_form: IntersectionForm) -> None:
        k0 = canonical_class(sigma_form)
        for x in local_minima(sigma_form, k0):
            for v in range(4):
                for sign in (1, -1):
                    moved = list(x)
                    moved[v] += sign
                    assert chi(sigma_form, k0, moved) >= chi(sigma_form, k0, x)


class TestGradedRoot:
    """Tests de la raíz graduada."""

    def test_single_m1(self) -> None:
        form = _form("single_m1")
        root = graded_root(form, canonical_class(form))

        assert root.level_counts() == {0: 1}
        assert root.stable_level == 0
        assert root.zero_vertex.members == {(0,), (1,)}

    def test_e8_single_chain(self, e8_form: IntersectionForm) -> None:
        root = graded_root(e8_form, canonical_class(e8_form))

        assert root.stable_level == 0
        assert root.level_counts() == {0: 1}
        assert root.branch_count == 0

    def test_sigma_branches(self, sigma_form: IntersectionForm) -> None:
        """Verifica dos hojas de nivel 0 unidas en el nivel 1."""
        root = graded_root(sigma_form, canonical_class(sigma_form))

        assert root.stable_level == 1
        assert root.level_counts() == {0: 2, 1: 1}
        assert root.branch_count == 1
        top = root.at_level(1)[0]
        assert sorted(root.children(top.id)) == [v.id for v in root.at_level(0)]
        assert (0, 0, 0, 0) in root.zero_vertex.members

    def test_max_level_extends_chain(self) -> None:
        form = _form("single_m2")
        root = graded_root(form, canonical_class(form), max_level=3)

        assert root.level_counts() == {0: 1, 1: 1, 2: 1, 3: 1}
        assert root.top_level == 3
        assert root.stable_level == 0
        assert root.trunk() == [0, 1, 2, 3]

    def test_other_class(self) -> None:
        """Verifica la raíz de K = 2 en L(2,1): χ = x² − x."""
        form = _form("single_m2")
        root = graded_root(form, CharVector((2,)), max_level=2)

        assert root.min_level == 0
        assert root.zero_vertex.members == {(0,), (1,)}

    def test_budget_guard(self, torus_form: IntersectionForm) -> None:
        with pytest.raises(BudgetExceeded):
            graded_root(torus_form, canonical_class(torus_form))

    def test_build_levels(self) -> None:
        values = {(0,): 0, (1,): 0, (-1,): 1, (2,): 1}
        vertices, edges = build_levels(values, 0, 1)

        assert [(v.level, v.size) for v in vertices] == [(0, 2), (1, 4)]
        assert edges == [(0, 1)]

    def test_dot_export(self, sigma_form: IntersectionForm) -> None:
        root = graded_root(sigma_form, canonical_class(sigma_form))
        dot = root_to_dot(root)

        assert dot.startswith("graph graded_root {")
        assert dot.count("--") == 2
        assert "color=red" in dot


class TestCanonicalShape:
    """Tests de las comprobaciones del vértice canónico."""

    def test_sigma_shape(self, sigma_form: IntersectionForm) -> None:
        checks = verify_canonical_root_shape(sigma_form, chain_margin=3)

        assert [c.name for c in checks] == [
            "c0_zero_level",
            "c0_end_vertex",
            "sublevel_connected",
            "single_vertex_per_level",
            "stable_chain",
        ]
        assert all(c.passed for c in checks)

    def test_e8_shape(self, e8_form: IntersectionForm) -> None:
        checks = verify_canonical_root_shape(e8_form, chain_margin=1)

        assert all(c.passed for c in checks)

    def test_shape_out_of_budget_is_skipped(
        self, sigma_form: IntersectionForm
    ) -> None:
        """Verifica que S_{n*+margen} fuera de presupuesto no es un fallo."""
        root = graded_root(sigma_form, canonical_class(sigma_form))
        checks = verify_canonical_root_shape(sigma_form, root, budget=100)
        status = {c.name: c.status for c in checks}

        assert status["sublevel_connected"] == "skipped"
        assert status["single_vertex_per_level"] == "pass"
        assert status["stable_chain"] == "skipped"


@pytest.mark.slow
class TestTrunkGerm:
    """Tests del germen del tronco sobre la cirugía del nudo tórico."""

    def test_germ(self, torus_form: IntersectionForm) -> None:
        root = canonical_trunk_germ(torus_form)

        assert not root.complete
        assert root.zero_vertex.size == 64
        assert len(root.at_level(0)) == 2
        assert len(root.at_level(1)) == 1

    def test_germ_shape(self, torus_form: IntersectionForm) -> None:
        root = canonical_trunk_germ(torus_form)
        checks = verify_canonical_root_shape(torus_form, root)
        status = {c.name: c.status for c in checks}

        assert status["c0_zero_level"] == "pass"
        assert status["c0_end_vertex"] == "pass"
        assert status["sublevel_connected"] == "skipped"
        assert status["stable_chain"] == "skipped"
