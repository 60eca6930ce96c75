"""Tests de vectores característicos, χ y órbitas."""

import random
from fractions import Fraction
from itertools import product

import pytest

from plumbr.corpus import corpus_graph
from plumbr.errors import DimensionMismatch
from plumbr.lattice.chars import (
    CharVector,
    canonical_class,
    char_vector,
    chi,
    chi_step,
    coordinate_bounds,
    k_squared,
    orbit_count,
    same_orbit,
    shift,
    w,
)
from plumbr.lattice.form import IntersectionForm, intersection_form


def _form(name: str) -> IntersectionForm:
    return intersection_form(corpus_graph(name))


class TestCanonicalClass:
    def test_adjunction(self, sigma_form: IntersectionForm) -> None:
        """Verifica (K₀)ᵥ = Mᵥᵥ + 2."""
        assert canonical_class(sigma_form).evals == (1, 0, -1, -5)

    def test_k_squared(self, sigma_form: IntersectionForm) -> None:
        k0 = canonical_class(sigma_form)

        assert k_squared(sigma_form, k0) == -4
        assert w(sigma_form, k0) == 0

    def test_k_squared_single_vertices(self) -> None:
        m1 = _form("single_m1")
        m2 = _form("single_m2")

        assert k_squared(m1, canonical_class(m1)) == -1
        assert k_squared(m2, canonical_class(m2)) == 0
        assert w(m2, canonical_class(m2)) == Fraction(-1, 8)

    def test_char_vector_parity(self, sigma_form: IntersectionForm) -> None:
        assert char_vector(sigma_form, [3, 2, 1, -3]).evals == (3, 2, 1, -3)
        with pytest.raises(ValueError, match="not characteristic"):
            char_vector(sigma_form, [0, 0, 1, 1])

    def test_char_vector_length(self, sigma_form: IntersectionForm) -> None:
        with pytest.raises(DimensionMismatch):
            char_vector(sigma_form, [1, 0])


class TestChi:
    """Tests de la función de pesos χ_K."""

    def test_single_m1(self) -> None:
        """Verifica χ(x) = (x² − x)/2 para un vértice −1."""
        form = _form("single_m1")
        k0 = canonical_class(form)

        for x in range(-4, 5):
            assert chi(form, k0, (x,)) == (x * x - x) // 2

    def test_single_m2(self) -> None:
        form = _form("single_m2")
        k0 = canonical_class(form)

        for x in range(-4, 5):
            assert chi(form, k0, (x,)) == x * x

    def test_chi_on_blowdown_classes(self, chain_form: IntersectionForm) -> None:
        k0 = canonical_class(chain_form)

        for point in [(0, 0), (1, 0), (1, 1), (2, 1)]:
            assert chi(chain_form, k0, point) == 0
        assert chi(chain_form, k0, (0, 1)) == 1

    def test_step_matches_difference(self, sigma_form: IntersectionForm) -> None:
        """Verifica chi_step contra la diferencia directa."""
        k0 = canonical_class(sigma_form)
        for x in product(range(-1, 2), repeat=4):
            image = sigma_form.apply(x)
            for v in range(4):
                for sign in (1, -1):
                    moved = list(x)
                    moved[v] += sign
                    expected = chi(sigma_form, k0, moved) - chi(sigma_form, k0, x)
                    assert chi_step(sigma_form, k0, image, v, sign) == expected

    def test_shift_identity(self, sigma_form: IntersectionForm) -> None:
        """Verifica χ_K(x + y) = χ_K(x) + χ_{K+2PD(x)}(y)."""
        k0 = canonical_class(sigma_form)
        x, y = (1, 0, 2, -1), (0, 1, -1, 3)
        total = tuple(a + b for a, b in zip(x, y))

        moved = shift(sigma_form, k0, x)
        assert chi(sigma_form, k0, total) == chi(sigma_form, k0, x) + chi(
            sigma_form, moved, y
        )

    def test_dimension_mismatch(self, sigma_form: IntersectionForm) -> None:
        with pytest.raises(DimensionMismatch):
            chi(sigma_form, canonical_class(sigma_form), (1, 2))


CORPUS = [
    "single_m1",
    "single_m2",
    "a2",
    "e8",
    "sigma_2_3_7",
    "torus_8_11_surgery",
    "chain_m1_m2",
]


def _random_point(rng: random.Random, n: int, radius: int = 6) -> tuple[int, ...]:
    return tuple(rng.randint(-radius, radius) for _ in range(n))


class TestRandomIdentities:
    """Identidades exactas sobre ternas (K, x, y) aleatorias del corpus."""

    @pytest.mark.parametrize("name", CORPUS)
    def test_chi_of_sum(self, name: str) -> None:
        """Verifica χ_K(x + y) = χ_K(x) + χ_K(y) − x·y."""
        form = _form(name)
        rng = random.Random(name)
        k0 = canonical_class(form)

        for _ in range(10_000):
            k = shift(form, k0, _random_point(rng, form.n, 2))
            x = _random_point(rng, form.n)
            y = _random_point(rng, form.n)
            total = tuple(a + b for a, b in zip(x, y))
            expected = chi(form, k, x) + chi(form, k, y) - form.dot(x, y)
            assert chi(form, k, total) == expected

    @pytest.mark.slow
    @pytest.mark.parametrize("name", CORPUS)
    def test_w_chi_bridge(self, name: str) -> None:
        """Verifica w(K + 2PD(x)) = w(K) + χ_K(x)."""
        form = _form(name)
        rng = random.Random(name)
        k0 = canonical_class(form)

        for _ in range(10_000):
            k = shift(form, k0, _random_point(rng, form.n, 2))
            x = _random_point(rng, form.n)
            assert w(form, shift(form, k, x)) == w(form, k) + chi(form, k, x)


class TestOrbits:
    """Tests de las órbitas Spin^c."""

    @pytest.mark.parametrize(
        "name", ["single_m1", "single_m2", "a2", "e8", "sigma_2_3_7"]
    )
    def test_orbit_count_is_det(self, name: str) -> None:
        form = _form(name)

        assert orbit_count(form) == abs(form.det)

    def test_shift_stays_in_orbit(self, sigma_form: IntersectionForm) -> None:
        k0 = canonical_class(sigma_form)

        assert same_orbit(sigma_form, k0, shift(sigma_form, k0, (2, -1, 0, 5)))

    def test_distinct_orbits_single_m2(self) -> None:
        """Verifica las dos órbitas de L(2,1): K = 0 y K = 2."""
        form = _form("single_m2")
        zero = CharVector((0,))

        assert same_orbit(form, zero, CharVector((4,)))
        assert not same_orbit(form, zero, CharVector((2,)))


class TestBounds:
    def test_box_contains_sublevel(self) -> None:
        """Verifica que la caja contiene todo punto con χ ≤ level."""
        form = _form("a2")
        k0 = canonical_class(form)
        box = coordinate_bounds(form, k0, 3)

        for x in product(range(-6, 7), repeat=2):
            if chi(form, k0, x) <= 3:
                assert all(c in r for c, r in zip(x, box))
