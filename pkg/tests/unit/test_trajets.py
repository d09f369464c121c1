"""Unit tests for trajets: search, verification, reduction and the sans-circuit test."""

import pytest

from bass_serre.trajets import (
    Trajet,
    circuit_along,
    find_trajet,
    format_trajet,
    is_sans_circuit,
    reduce_trajet,
    reduce_window,
    reducible_windows,
    tree_trajet,
)
from bass_serre.types import BassSerreError, Verdict

from tests.conftest import names_for


def _abelian(gog, vertex: str, n: int):
    group = gog.vertex_group(vertex)
    return group.power(group.letter_value(group.generator_indices()[0]), n)


class TestTrajetSearch:
    """Breadth-first transport through edge images."""

    def test_across_amalgamating_edge(self, trefoil) -> None:
        """x^2 at A is carried to y^3 at B."""
        gog, dec = trefoil
        result = find_trajet(gog, dec, _abelian(gog, "A", 2), "A", _abelian(gog, "B", 3), "B")
        assert result.verdict == Verdict.YES
        assert result.trajet.length == 1
        assert result.trajet.verify(gog)

    def test_tree_trajet(self, trefoil) -> None:
        """x^4 follows the tree edge to y^6 with identity conjugators."""
        gog, dec = trefoil
        trajet = tree_trajet(gog, dec, _abelian(gog, "A", 4), "A", "B")
        assert trajet is not None
        assert trajet.verify(gog)
        assert trajet.v == _abelian(gog, "B", 6)

    def test_tree_trajet_blocked(self, trefoil) -> None:
        """x^3 is outside the image of the edge group at A."""
        gog, dec = trefoil
        assert tree_trajet(gog, dec, _abelian(gog, "A", 3), "A", "B") is None

    def test_circuit_along_label(self, klein) -> None:
        """t^2 carries a back to itself through a^-1."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        a = _abelian(gog, "v", 1)
        t2 = oracle.evaluate(names_for("klein").parse("t^2"))
        circuit = circuit_along(gog, oracle, a, "v", t2)
        assert circuit is not None
        assert circuit.is_circuit
        assert circuit.length == 2
        assert circuit.verify(gog)
        assert oracle.eq(circuit.label_element(oracle), t2)

    def test_circuit_along_refuses_non_centralizing_label(self, klein) -> None:
        """t sends a to a^-1, so no circuit at a has label t."""
        gog, dec = klein
        oracle = gog.pi1(dec)
        t = oracle.evaluate(names_for("klein").parse("t"))
        assert circuit_along(gog, oracle, _abelian(gog, "v", 1), "v", t) is None

    def test_outside_edge_image(self, trefoil) -> None:
        """x never enters the edge group, so it stays at A."""
        gog, dec = trefoil
        result = find_trajet(gog, dec, _abelian(gog, "A", 1), "A", _abelian(gog, "B", 1), "B")
        assert result.verdict == Verdict.NO

    def test_through_conjugacy_class(self, s3dbl) -> None:
        """Transposition 2 is conjugate to 1 in S3, which crosses the edge."""
        gog, dec = s3dbl
        result = find_trajet(gog, dec, 2, "s", 1, "s2")
        assert result.verdict == Verdict.YES
        assert result.trajet.verify(gog)

    def test_three_cycle_stays_home(self, s3dbl) -> None:
        """3-cycles meet no conjugate of the edge group."""
        gog, dec = s3dbl
        assert find_trajet(gog, dec, 4, "s", 4, "s2").verdict == Verdict.NO

    def test_same_vertex_conjugates(self, s3dbl) -> None:
        """Conjugate elements of one vertex group are joined by a trajet of length zero or more."""
        gog, dec = s3dbl
        result = find_trajet(gog, dec, 4, "s", 5, "s")
        assert result.verdict == Verdict.YES
        assert result.trajet.verify(gog)


class TestTrajetAlgebra:
    """Inverses, products, reduction and printing."""

    def test_inverse_verifies(self, s3dbl) -> None:
        """Reversing a trajet gives a trajet from v to u."""
        gog, dec = s3dbl
        t = find_trajet(gog, dec, 2, "s", 1, "s2").trajet
        back = t.inverse(gog)
        assert (back.start, back.end) == ("s2", "s")
        assert back.verify(gog)

    def test_product_with_inverse_is_circuit(self, s3dbl) -> None:
        """t followed by t^-1 returns to u and reduces away."""
        gog, dec = s3dbl
        t = find_trajet(gog, dec, 2, "s", 1, "s2").trajet
        loop = t.product(t.inverse(gog), gog)
        assert loop.is_circuit
        assert loop.verify(gog)
        assert reducible_windows(gog, loop)
        assert reduce_trajet(gog, loop).length == 0

    def test_reduction_order_is_irrelevant(self, s3dbl) -> None:
        """Folding windows in any order reaches the same path and the same label."""
        gog, dec = s3dbl
        oracle = gog.pi1(dec)
        legs = {x: find_trajet(gog, dec, x, "s", 1, "s2").trajet for x in (1, 2, 3)}
        assert all(leg is not None for leg in legs.values())
        loops = {(a, b): legs[a].product(legs[b].inverse(gog), gog) for a in legs for b in legs}
        candidates = list(loops.values()) + [
            loops[a, b].product(loops[b, c], gog) for a in legs for b in legs for c in legs
        ]
        checked = 0
        for t in candidates:
            windows = reducible_windows(gog, t)
            if not 1 <= len(windows) <= 2:
                continue
            label = t.label_element(oracle)
            results = [reduce_trajet(gog, reduce_window(gog, t, i)) for i in windows]
            for r in results:
                assert r.verify(gog)
                assert not reducible_windows(gog, r)
                assert r.path == results[0].path
                assert oracle.eq(r.label_element(oracle), label)
            checked += 1
        assert checked

    def test_product_mismatch(self, s3dbl) -> None:
        """Trajets compose only when the end of one is the start of the next."""
        gog, dec = s3dbl
        t = find_trajet(gog, dec, 2, "s", 1, "s2").trajet
        with pytest.raises(BassSerreError) as exc:
            t.product(t, gog)
        assert exc.value.code == "TRAJET_MISMATCH"

    def test_verify_rejects_bad_lengths(self, s3dbl) -> None:
        """Element lists must match the path."""
        gog, _ = s3dbl
        t = Trajet(1, 1, "s", "s2", ("1",), (1,), (1,), (0,))
        check = t.verify(gog)
        assert not check
        assert "path length" in check.reason

    def test_format(self, trefoil) -> None:
        """One header line, then h0, then an arrow line and an h line per step."""
        gog, dec = trefoil
        t = find_trajet(gog, dec, _abelian(gog, "A", 2), "A", _abelian(gog, "B", 3), "B").trajet
        lines = format_trajet(gog, t)
        assert lines[0].startswith("TRAJET: ")
        assert lines[0].endswith("@B")
        assert len(lines) == 4
        assert lines[2].lstrip().startswith("c: ")


class TestSansCircuit:
    """Graphs of groups without nontrivial reduced circuits."""

    def test_double_of_s3(self, s3dbl) -> None:
        """The transposition is only conjugated back through its own centralizer."""
        gog, dec = s3dbl
        assert is_sans_circuit(gog, dec).verdict == Verdict.YES

    def test_z6_loop_has_circuit(self, z6_hnn_gog) -> None:
        """The loop carries an order-3 element back to its inverse and on around."""
        gog, dec = z6_hnn_gog
        result = is_sans_circuit(gog, dec)
        assert result.verdict == Verdict.NO
        assert result.trajet is not None
        assert result.trajet.verify(gog)

    def test_infinite_edge_image(self, trefoil) -> None:
        """Infinite edge images cannot be enumerated."""
        gog, dec = trefoil
        assert is_sans_circuit(gog, dec).verdict == Verdict.UNKNOWN
