"""Unit tests for the fundamental-group oracle over reduced lacets."""

import pytest

from bass_serre.pi1 import GraphGroupOracle
from bass_serre.types import BassSerreError, ForeignElementError, GogValidationError
from bass_serre.words import GeneratorId, Scope, Word

from tests.conftest import names_for


class TestLacetArithmetic:
    """Equal elements have equal lacets."""

    def test_trefoil_relation(self, trefoil) -> None:
        """x^2 y^-3 is the identity lacet."""
        gog, dec = trefoil
        oracle = gog.pi1(dec)
        names = names_for("trefoil")
        assert oracle.evaluate(names.parse("x^2 y^-3")) == oracle.identity

    def test_non_commuting_generators(self, trefoil) -> None:
        """x y and y x are different elements."""
        gog, dec = trefoil
        oracle = gog.pi1(dec)
        names = names_for("trefoil")
        assert oracle.evaluate(names.parse("x y")) != oracle.evaluate(names.parse("y x"))

    def test_backtrack_folds(self, klein) -> None:
        """t a t^-1 folds to a^-1."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        names = names_for("klein")
        assert oracle.evaluate(names.parse("t a t^-1")) == oracle.evaluate(names.parse("a^-1"))

    def test_inverse(self, klein) -> None:
        """g g^-1 is the identity."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        g = oracle.evaluate(names_for("klein").parse("a t^2 a^3 t^-1"))
        assert oracle.mul(g, oracle.inv(g)) == oracle.identity

    def test_words_read_back(self, s3dbl) -> None:
        """Evaluating the word of a lacet gives the lacet back."""
        gog, dec = s3dbl
        oracle = gog.pi1(dec)
        for word in ("s.g1 s2.g2", "s2.g2 s.g1 s2.g1", "s.g2^2 s2.g1"):
            g = oracle.evaluate(names_for("s3dbl").parse(word))
            assert oracle.evaluate(oracle.to_word(g)) == g

    def test_foreign_letter(self, trefoil) -> None:
        """Letters of vertices outside the graph are rejected."""
        gog, dec = trefoil
        oracle = gog.pi1(dec)
        with pytest.raises(ForeignElementError):
            oracle.evaluate(Word.of(GeneratorId(Scope.VERTEX, "Z", 0)))

    def test_disconnected_subgraph(self, trefoil) -> None:
        """Both vertices without the joining edge do not form a subgraph of groups."""
        gog, dec = trefoil
        with pytest.raises(GogValidationError):
            GraphGroupOracle(gog, dec, ["A", "B"], [])


class TestHyperbolicGeometry:
    """Translation lengths and primitive roots."""

    def test_translation_lengths(self, trefoil) -> None:
        """x fixes a vertex; x y translates by two edges."""
        gog, dec = trefoil
        oracle = gog.pi1(dec)
        names = names_for("trefoil")
        assert oracle.translation_length(oracle.evaluate(names.parse("x"))) == 0
        assert oracle.translation_length(oracle.evaluate(names.parse("x y"))) == 2

    def test_cyclic_core_conjugates_back(self, trefoil) -> None:
        """g = conj . core . conj^-1."""
        gog, dec = trefoil
        oracle = gog.pi1(dec)
        g = oracle.evaluate(names_for("trefoil").parse("y x y x^-1 y^-1"))
        core, conj = oracle.cyclic_core(g)
        assert oracle.conjugate(conj, oracle.unbase(core)) == g

    def test_primitive_root(self, klein) -> None:
        """t^4 has a fourth root."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        g = oracle.evaluate(names_for("klein").parse("t^4"))
        root, k = oracle.primitive_root(g)
        assert k == 4
        assert oracle.power(root, 4) == g

    def test_elliptic_element_has_no_root(self, klein) -> None:
        """Vertex elements are rejected."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        with pytest.raises(BassSerreError) as exc:
            oracle.primitive_root(oracle.evaluate(names_for("klein").parse("a^2")))
        assert exc.value.code == "NOT_HYPERBOLIC"
