"""Unit tests for the vertex-group backends and monomorphisms."""

import pytest

from bass_serre.backends import (
    Capability,
    FiniteGroup,
    FreeAbelianGroup,
    FreeGroup,
    Monomorphism,
    PresentedGroup,
    center_meet,
    is_central,
)
from bass_serre.types import BackendValidationError, CapabilityError, ForeignElementError, OuterOrderKind

from tests.conftest import cyclic_table


class TestFiniteGroup:
    """Multiplication-table backend."""

    def test_rejects_non_latin_table(self) -> None:
        """A table with a repeated entry in a row is not a group."""
        with pytest.raises(BackendValidationError) as exc:
            FiniteGroup([[0, 1], [1, 1]])
        assert any("row 1" in v for v in exc.value.violations)

    def test_rejects_non_generating_gens(self) -> None:
        """Declared generators must reach every element."""
        with pytest.raises(BackendValidationError):
            FiniteGroup(cyclic_table(4), gens=[2])

    def test_greedy_generators(self, s3: FiniteGroup) -> None:
        """Two transpositions generate S3."""
        assert s3.generator_indices() == [1, 2]
        assert s3.order() == 6

    def test_words_evaluate_back(self, s3: FiniteGroup) -> None:
        """Every element's spanning word evaluates to it."""
        for x in s3.elements():
            assert s3.evaluate(s3.to_word(x)) == x

    def test_presentation_relators_hold(self, s3: FiniteGroup) -> None:
        """Cayley-graph relators evaluate to the identity."""
        relators = s3.presentation_relators()
        assert relators
        assert all(s3.is_identity(s3.evaluate(r)) for r in relators)

    def test_subgroup_membership_witness(self, s3: FiniteGroup) -> None:
        """The subgroup generated by a 3-cycle holds both 3-cycles and no transposition."""
        H = s3.subgroup([4])
        assert H.elements() == [0, 4, 5]
        assert H.contains(5)
        assert not H.contains(1)

    def test_decompose_uses_least_coset_representative(self, s3: FiniteGroup) -> None:
        """g = rep h with rep the least element of g H, or the identity on H."""
        H = s3.subgroup([1])
        for g in s3.elements():
            rep, h = s3.decompose(H, g)
            assert s3.mul(rep, h) == g
            assert H.contains(h)
            if H.contains(g):
                assert rep == 0

    def test_conjugators_into_lists_each_target_once(self, s3: FiniteGroup) -> None:
        """A transposition meets a transposition subgroup in exactly one element."""
        H = s3.subgroup([3])
        result = s3.conjugators_into(1, H)
        assert result.exhaustive
        assert [c for _, c in result.pairs] == [3]
        h, c = result.pairs[0]
        assert s3.conjugate(h, c) == 1

    def test_conjugacy_classes(self, s3: FiniteGroup) -> None:
        """Transpositions are conjugate; a transposition is not conjugate to a 3-cycle."""
        assert s3.conjugacy_search(1, 2) is not None
        assert s3.conjugacy_search(1, 4) is None

    def test_center_of_s3_is_trivial(self, s3: FiniteGroup) -> None:
        """S3 has trivial center."""
        assert s3.center_gens() == []
        assert not is_central(s3, 4)

    def test_center_meet_of_cyclic_group(self, z6: FiniteGroup) -> None:
        """In an abelian group every subgroup is central."""
        assert center_meet(z6, z6.subgroup([2])) == [2]

    def test_letter_outside_group(self, z6: FiniteGroup) -> None:
        """Letters name elements, so indices are bounded by the order."""
        with pytest.raises(ForeignElementError):
            z6.letter_value(6)

    def test_equalizer_of_inversion(self, z6: FiniteGroup) -> None:
        """Inversion on the order-3 subgroup fixes only the identity."""
        H = z6.subgroup([2])
        phi = Monomorphism(H, H, [4], check=True)
        assert z6.equalizer(phi).is_trivial()

    def test_as_group_embeds_subgroup(self, s3: FiniteGroup) -> None:
        """A subgroup becomes a standalone group with an injective embedding."""
        group, embedding = s3.as_group(s3.subgroup([4]))
        assert group.order() == 3
        assert embedding.validate() == []


class TestFreeAbelianGroup:
    """Integer-lattice backend."""

    def test_membership_and_witness(self, z2_abelian: FreeAbelianGroup) -> None:
        """(4, 6) lies in the lattice spanned by (2, 0) and (0, 3)."""
        H = z2_abelian.subgroup([(2, 0), (0, 3)])
        assert H.contains((4, 6))
        assert not H.contains((1, 0))
        assert not H.is_finite()

    def test_decompose_gives_residue(self, z2_abelian: FreeAbelianGroup) -> None:
        """Coset representatives are least non-negative residues."""
        H = z2_abelian.subgroup([(2, 0), (0, 3)])
        rep, h = z2_abelian.decompose(H, (5, 7))
        assert rep == (1, 1)
        assert z2_abelian.mul(rep, h) == (5, 7)

    def test_commutator_relators(self, z2_abelian: FreeAbelianGroup) -> None:
        """Rank two has one commutator relator."""
        assert len(z2_abelian.presentation_relators()) == 1

    def test_outer_order_of_inversion(self) -> None:
        """Negation on Z has outer order 2."""
        z = FreeAbelianGroup(1, owner="v")
        phi = Monomorphism(z.whole(), z.whole(), [(-1,)])
        order = z.outer_order(phi)
        assert order.kind == OuterOrderKind.FINITE
        assert order.n == 2

    def test_outer_order_of_hyperbolic_matrix(self, z2_abelian: FreeAbelianGroup) -> None:
        """[[2, 1], [1, 1]] has infinite order."""
        phi = Monomorphism(z2_abelian.whole(), z2_abelian.whole(), [(2, 1), (1, 1)])
        assert z2_abelian.outer_order(phi).kind == OuterOrderKind.INFINITE

    def test_rank_must_be_positive(self) -> None:
        """Rank zero is rejected."""
        with pytest.raises(BackendValidationError):
            FreeAbelianGroup(0)


class TestFreeGroup:
    """Free backend with cyclic subgroups."""

    def test_free_reduction(self, f2: FreeGroup) -> None:
        """x x^-1 y multiplies to y."""
        x, y = f2.generators()
        assert f2.mul(f2.mul(x, f2.inv(x)), y) == y

    def test_cyclic_subgroup_membership(self, f2: FreeGroup) -> None:
        """x^3 is not in <x^2>, x^4 is."""
        x = f2.letter_value(0)
        H = f2.subgroup([f2.power(x, 2)])
        assert not H.contains(f2.power(x, 3))
        assert H.contains(f2.power(x, 4))

    def test_non_cyclic_subgroup_rejected(self, f2: FreeGroup) -> None:
        """Only cyclic subgroups and the whole group are supported."""
        x, y = f2.generators()
        with pytest.raises(CapabilityError):
            f2.subgroup([f2.mul(x, y), x])

    def test_conjugacy_by_cyclic_permutation(self, f2: FreeGroup) -> None:
        """x y and y x are conjugate; the conjugator is verified."""
        x, y = f2.generators()
        u, v = f2.mul(x, y), f2.mul(y, x)
        h = f2.conjugacy_search(u, v)
        assert h is not None
        assert f2.conjugate(h, v) == u

    def test_centralizer_is_primitive_root(self, f2: FreeGroup) -> None:
        """The centralizer of x^2 is generated by x."""
        x = f2.letter_value(0)
        assert f2.centralizer_gens(f2.power(x, 2)) == [x]

    def test_center_of_rank_two_is_trivial(self, f2: FreeGroup) -> None:
        """Nonabelian free groups have trivial center."""
        assert f2.center_gens() == []


class TestPresentedGroup:
    """Symbolic backend."""

    def test_named_generators(self) -> None:
        """Generators resolve by name."""
        group = PresentedGroup(["x", "y"], owner="S")
        assert group.parse("x y^-1") == (1, -2)
        assert group.name(1) == "y"

    def test_no_capabilities(self) -> None:
        """Nothing beyond presentation-level operations is exact."""
        group = PresentedGroup(["x"], owner="S")
        assert group.capabilities == Capability.NONE
        with pytest.raises(CapabilityError):
            group.elements()

    def test_membership_only_for_generators(self) -> None:
        """Subgroup generators are recognised, anything else is undecided."""
        group = PresentedGroup(["x", "y"], owner="S")
        H = group.subgroup([group.parse("x y")])
        assert H.contains(group.parse("x y"))
        with pytest.raises(CapabilityError):
            H.contains(group.parse("x"))

    def test_duplicate_names(self) -> None:
        """Generator names must be distinct."""
        with pytest.raises(BackendValidationError):
            PresentedGroup(["x", "x"])


class TestMonomorphism:
    """Validation, inversion and composition."""

    def test_image_count_must_match(self, z6: FiniteGroup) -> None:
        """One image per domain generator."""
        with pytest.raises(BackendValidationError):
            Monomorphism(z6.subgroup([2]), z6.subgroup([2]), [])

    def test_non_injective_map_flagged(self, z6: FiniteGroup) -> None:
        """Sending a generator of order 3 to the identity is not injective."""
        phi = Monomorphism(z6.subgroup([2]), z6.subgroup([]), [0])
        assert phi.validate()

    def test_inverse_and_compose(self, z6: FiniteGroup) -> None:
        """phi followed by its inverse is the identity on the domain."""
        H = z6.subgroup([2])
        phi = Monomorphism(H, H, [4])
        round_trip = phi.compose(phi.inverse())
        assert all(round_trip.apply(x) == x for x in H.elements())

    def test_apply_outside_domain(self, z6: FiniteGroup) -> None:
        """Applying outside the domain subgroup is a foreign element."""
        phi = Monomorphism(z6.subgroup([2]), z6.subgroup([2]), [4])
        with pytest.raises(ForeignElementError):
            phi.apply(1)
