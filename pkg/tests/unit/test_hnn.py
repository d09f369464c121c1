"""Unit tests for HNN extensions: Britton reduction, conjugacy, commutation, center and roots."""

import random

import pytest

from bass_serre import hnn
from bass_serre.hnn import HnnPresentation
from bass_serre.types import BassSerreError, CenterCase, CommuteCase, NotCommutingError, Verdict

from tests.conftest import names_for


@pytest.fixture
def klein_names():
    return names_for("klein")


@pytest.fixture
def z6_names():
    return names_for("z6")


class TestBrittonReduction:
    """Pinch removal and reduced forms."""

    def test_pinch_is_removed(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """t a t^-1 is a pinch and reduces to a^-1."""
        p = klein_hnn
        assert p.normal_form(klein_names.parse("t a t^-1")) == p.normal_form(klein_names.parse("a^-1"))

    def test_base_letters_move_through_stable_letter(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """a t a^-1 = a^2 t."""
        p = klein_hnn
        assert p.normal_form(klein_names.parse("a t a^-1")) == p.normal_form(klein_names.parse("a^2 t"))

    def test_reduced_forms_have_no_pinch(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """Britton reduction leaves no t^e c t^-e subword."""
        for text in ("t a t^-1 a", "t^2 a t^-1", "a t^-1 a^3 t a"):
            nf = hnn.britton_reduce(klein_hnn, klein_names.parse(text))
            assert hnn.find_pinch(klein_hnn, nf) is None

    def test_stable_letter_count(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """t a t has two stable letters left after reduction."""
        nf = klein_hnn.normal_form(klein_names.parse("t a t"))
        assert nf.exponents == (1, 1)
        assert nf.length == 3

    def test_proper_edge_groups_block_pinches(self, z6_hnn: HnnPresentation, z6_names) -> None:
        """a is outside the edge groups of the Z6 extension, so t a t^-1 stays as it is."""
        nf = z6_hnn.normal_form(z6_names.parse("t a t^-1"))
        assert len(nf.tail) == 2

    def test_cyclic_reduction(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """The returned conjugator recovers the original element."""
        p = klein_hnn
        g = klein_names.parse("a t^2 a^-1")
        reduced, conjugator = hnn.cyclically_reduce(p, g)
        nf = p.normal_form(reduced)
        assert hnn.is_cyclically_reduced(p, nf)
        assert hnn.translation_length(p, nf) == 2
        assert p.conjugate(p.normal_form(conjugator), nf) == p.normal_form(g)


class TestHnnConjugacy:
    """Conjugacy decisions with verified witnesses."""

    def test_inverse_conjugate_in_klein_bottle(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """t conjugates a to a^-1."""
        p = klein_hnn
        u, v = klein_names.parse("a"), klein_names.parse("a^-1")
        result = hnn.is_conjugate(p, u, v)
        assert result.verdict == Verdict.YES
        assert p.conjugate(p.normal_form(result.conjugator), p.normal_form(v)) == p.normal_form(u)

    def test_edge_orbit_exhausted(self, z6_hnn: HnnPresentation, z6_names) -> None:
        """a is outside the edge groups and the base is abelian, so a and a^-1 are not conjugate."""
        result = hnn.is_conjugate(z6_hnn, z6_names.parse("a"), z6_names.parse("a^-1"))
        assert result.verdict == Verdict.NO

    def test_edge_elements_swapped_by_stable_letter(self, z6_hnn: HnnPresentation, z6_names) -> None:
        """a^2 and a^4 are conjugate through the stable letter."""
        p = z6_hnn
        u, v = z6_names.parse("a^2"), z6_names.parse("a^4")
        result = hnn.is_conjugate(p, u, v)
        assert result.verdict == Verdict.YES
        assert p.conjugate(p.normal_form(result.conjugator), p.normal_form(v)) == p.normal_form(u)

    def test_lengths_differ(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """A base element is not conjugate to the stable letter."""
        result = hnn.is_conjugate(klein_hnn, klein_names.parse("a"), klein_names.parse("t"))
        assert result.verdict == Verdict.NO

    def test_exponent_signs_differ(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """t and t^-1 have stable-letter exponents of opposite sign."""
        result = hnn.is_conjugate(klein_hnn, klein_names.parse("t"), klein_names.parse("t^-1"))
        assert result.verdict == Verdict.NO


class TestHnnCommutation:
    """Classification of commuting pairs."""

    def test_base_element_with_central_square(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """a lies in the edge group and commutes with t^2."""
        report = hnn.commute_classify(klein_hnn, klein_names.parse("a"), klein_names.parse("t^2"))
        assert report.case == CommuteCase.C_SEQUENCE

    def test_non_commuting_pair(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """a and t do not commute."""
        with pytest.raises(NotCommutingError):
            hnn.commute_classify(klein_hnn, klein_names.parse("a"), klein_names.parse("t"))


class TestHnnCenter:
    """Centers of HNN extensions."""

    def test_klein_bottle_center(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """Inversion has outer order two, so t^2 is central."""
        p = klein_hnn
        report = hnn.center(p)
        assert report.case == CenterCase.FINITE_OUTER_ORDER
        assert [p.normal_form(z) for z in report.generators] == [p.normal_form(klein_names.parse("t^2"))]

    def test_proper_edge_group(self, z6_hnn: HnnPresentation) -> None:
        """Proper edge groups leave only central fixed points of phi, and phi inverts Z3."""
        report = hnn.center(z6_hnn)
        assert report.case == CenterCase.PROPER_EDGE_GROUP
        assert report.generators == []

    def test_fixed_subgroup_of_inversion(self, klein_hnn: HnnPresentation) -> None:
        """Negation on Z fixes only zero."""
        assert hnn.fix_phi(klein_hnn).is_trivial()


class TestHnnRoots:
    """Primitive roots of hyperbolic elements."""

    def test_power_of_stable_letter(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """t^4 is the fourth power of t."""
        p = klein_hnn
        g = klein_names.parse("t^4")
        root, k = hnn.primitive_root(p, g)
        assert k == 4
        assert p.normal_form(root) == p.normal_form(klein_names.parse("t"))

    def test_base_element_has_no_root(self, klein_hnn: HnnPresentation, klein_names) -> None:
        """Base elements are rejected."""
        with pytest.raises(BassSerreError) as exc:
            hnn.primitive_root(klein_hnn, klein_names.parse("a"))
        assert exc.value.code == "NOT_HYPERBOLIC"


class TestPinchedWords:
    """Inserting a pinch t^e c t^-e or its value leaves the normal form unchanged."""

    @pytest.mark.parametrize(
        "name, fixture, edge_powers",
        [("klein", "klein_hnn", [1, 2, -3]), ("z6", "z6_hnn", [2, 4])],
    )
    def test_random_pinches(self, name: str, fixture: str, edge_powers, request: pytest.FixtureRequest) -> None:
        """Random words with up to three pinches reduce like the unpinched words."""
        p = request.getfixturevalue(fixture)
        names = names_for(name)
        rng = random.Random(20240517)
        atoms = ["a", "a^-1", "t", "t^-1"]
        for _ in range(500):
            letters = [rng.choice(atoms) for _ in range(rng.randint(0, 12))]
            pinched, plain = list(letters), list(letters)
            spots = sorted((rng.randint(0, len(letters)) for _ in range(rng.randint(1, 3))), reverse=True)
            for at in spots:
                # t^e a^c t^-e = a^-c on both fixtures
                c = rng.choice(edge_powers)
                e = rng.choice([1, -1])
                pinched[at:at] = [f"t^{e}", f"a^{c}", f"t^{-e}"]
                plain[at:at] = [f"a^{-c}"]
            u = p.normal_form(names.parse(" ".join(pinched)))
            v = p.normal_form(names.parse(" ".join(plain)))
            assert u == v
