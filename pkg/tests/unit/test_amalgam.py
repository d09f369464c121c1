"""Unit tests for amalgamated products: normal forms, conjugacy, commutation, center and roots."""

import itertools
from typing import Dict, Iterator, List, Set, Tuple

import pytest
from sympy import ImmutableMatrix

from bass_serre import amalgam
from bass_serre.amalgam import AmalgamPresentation
from bass_serre.types import BassSerreError, CenterCase, CommuteCase, NotCommutingError, Verdict
from bass_serre.words import Word

from tests.conftest import names_for


# a and b go to S and S T, an isomorphism onto SL(2, Z)
SL2_MATRICES = {
    "a": ImmutableMatrix([[0, -1], [1, 0]]),
    "b": ImmutableMatrix([[0, -1], [1, 1]]),
}


def _syllable_words(max_syllables: int) -> Iterator[List[Tuple[str, int]]]:
    """Alternating runs a^i (0 < i < 4) and b^j (0 < j < 6), shortest first."""
    powers = {"a": range(1, 4), "b": range(1, 6)}
    layer: List[List[Tuple[str, int]]] = [[]]
    yield []
    for _ in range(max_syllables):
        layer = [
            w + [(letter, e)]
            for w in layer
            for letter in ("a", "b")
            if not w or w[-1][0] != letter
            for e in powers[letter]
        ]
        yield from layer


@pytest.fixture
def trefoil_names():
    return names_for("trefoil")


@pytest.fixture
def sl2_names():
    return names_for("sl2")


class TestAmalgamNormalForm:
    """Reduced sequences in A *_C B."""

    def test_defining_relation_reduces_to_identity(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x^2 = y^3, so x^2 y^-3 is the identity."""
        nf = trefoil_amalgam.normal_form(trefoil_names.parse("x^2 y^-3"))
        assert nf == trefoil_amalgam.identity

    def test_alternating_length(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x y x has three syllables."""
        nf = trefoil_amalgam.normal_form(trefoil_names.parse("x y x"))
        assert nf.length == 3

    def test_normal_form_is_idempotent(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """Reading back a normal form gives the same normal form."""
        atoms = ["x", "x^-1", "y", "y^-1"]
        for combo in itertools.product(atoms, repeat=3):
            nf = trefoil_amalgam.normal_form(trefoil_names.parse(" ".join(combo)))
            assert trefoil_amalgam.normal_form(trefoil_amalgam.to_word(nf)) == nf

    def test_multiplication_matches_concatenation(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """nf(u) nf(v) = nf(u v)."""
        u, v = trefoil_names.parse("x y^-1"), trefoil_names.parse("y x^3")
        p = trefoil_amalgam
        assert p.mul(p.normal_form(u), p.normal_form(v)) == p.normal_form(u * v)

    def test_normal_forms_match_matrices(self, sl2_amalgam: AmalgamPresentation, sl2_names) -> None:
        """Up to five syllables, two words share a normal form exactly when their matrices agree."""
        by_form: Dict[object, Set[ImmutableMatrix]] = {}
        by_matrix: Dict[ImmutableMatrix, Set[object]] = {}
        for syllables in _syllable_words(5):
            matrix = ImmutableMatrix.eye(2)
            for letter, e in syllables:
                matrix = matrix * SL2_MATRICES[letter] ** e
            nf = sl2_amalgam.normal_form(sl2_names.parse(" ".join(f"{letter}^{e}" for letter, e in syllables)))
            by_form.setdefault(nf, set()).add(matrix)
            by_matrix.setdefault(matrix, set()).add(nf)
        assert all(len(found) == 1 for found in by_form.values())
        assert all(len(found) == 1 for found in by_matrix.values())

    def test_cyclic_reduction(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x y x^-1 is conjugate to y; the returned conjugator recovers the word."""
        p = trefoil_amalgam
        g = trefoil_names.parse("x y x^-1")
        reduced, conjugator = amalgam.cyclically_reduce(p, g)
        nf = p.normal_form(reduced)
        assert nf.length == 1
        assert p.conjugate(p.normal_form(conjugator), nf) == p.normal_form(g)


class TestAmalgamConjugacy:
    """Conjugacy decisions with verified witnesses."""

    def test_generators_of_different_factors(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x and y are not conjugate."""
        result = amalgam.is_conjugate(trefoil_amalgam, trefoil_names.parse("x"), trefoil_names.parse("y"))
        assert result.verdict == Verdict.NO

    def test_cyclic_permutation(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x y and y x are conjugate by the returned element."""
        p = trefoil_amalgam
        u, v = trefoil_names.parse("x y"), trefoil_names.parse("y x")
        result = amalgam.is_conjugate(p, u, v)
        assert result.verdict == Verdict.YES
        assert result.conjugator is not None
        assert p.conjugate(p.normal_form(result.conjugator), p.normal_form(v)) == p.normal_form(u)

    def test_equal_elements(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """Equal elements are conjugate by the empty word."""
        result = amalgam.is_conjugate(trefoil_amalgam, trefoil_names.parse("x^2"), trefoil_names.parse("y^3"))
        assert result.verdict == Verdict.YES
        assert result.conjugator == Word()

    def test_lengths_differ(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """An elliptic and a hyperbolic element are never conjugate."""
        result = amalgam.is_conjugate(trefoil_amalgam, trefoil_names.parse("x"), trefoil_names.parse("x y"))
        assert result.verdict == Verdict.NO

    def test_finite_factors(self, sl2_amalgam: AmalgamPresentation, sl2_names) -> None:
        """a b and b a are conjugate in Z4 *_Z2 Z6."""
        p = sl2_amalgam
        u, v = sl2_names.parse("a b"), sl2_names.parse("b a")
        result = amalgam.is_conjugate(p, u, v)
        assert result.verdict == Verdict.YES
        assert p.conjugate(p.normal_form(result.conjugator), p.normal_form(v)) == p.normal_form(u)


class TestAmalgamCommutation:
    """Classification of commuting pairs."""

    def test_edge_group_element(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x^2 lies in the edge group, so the pair falls under the C-sequence case."""
        report = amalgam.commute_classify(trefoil_amalgam, trefoil_names.parse("x^2"), trefoil_names.parse("y"))
        assert report.case == CommuteCase.C_SEQUENCE
        assert report.sequence

    def test_non_commuting_pair(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """x and y do not commute."""
        with pytest.raises(NotCommutingError):
            amalgam.commute_classify(trefoil_amalgam, trefoil_names.parse("x"), trefoil_names.parse("y"))

    def test_powers_of_hyperbolic_element(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """Two powers of x y commute through a cyclic structure."""
        report = amalgam.commute_classify(
            trefoil_amalgam, trefoil_names.parse("x y"), trefoil_names.parse("x y x y")
        )
        assert report.case == CommuteCase.CYCLIC


class TestAmalgamCenter:
    """Centers of amalgams with proper edge groups."""

    def test_trefoil_center(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """The center of the trefoil group is generated by x^2."""
        p = trefoil_amalgam
        report = amalgam.center(p)
        assert report.case == CenterCase.AMALGAM
        assert len(report.generators) == 1
        found = p.normal_form(report.generators[0])
        assert found in (p.normal_form(trefoil_names.parse("x^2")), p.normal_form(trefoil_names.parse("x^-2")))

    def test_finite_factor_center(self, sl2_amalgam: AmalgamPresentation, sl2_names) -> None:
        """The center of Z4 *_Z2 Z6 is the edge group, generated by a^2."""
        p = sl2_amalgam
        report = amalgam.center(p)
        assert [p.normal_form(z) for z in report.generators] == [p.normal_form(sl2_names.parse("a^2"))]


class TestAmalgamRoots:
    """Primitive roots of hyperbolic elements."""

    def test_cube_of_product(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """(x y)^3 has a cube root."""
        p = trefoil_amalgam
        g = trefoil_names.parse("x y x y x y")
        root, k = amalgam.primitive_root(p, g)
        assert k == 3
        assert p.power(p.normal_form(root), 3) == p.normal_form(g)

    def test_elliptic_element_has_no_root(self, trefoil_amalgam: AmalgamPresentation, trefoil_names) -> None:
        """Factor elements are rejected."""
        with pytest.raises(BassSerreError) as exc:
            amalgam.primitive_root(trefoil_amalgam, trefoil_names.parse("x"))
        assert exc.value.code == "NOT_HYPERBOLIC"
