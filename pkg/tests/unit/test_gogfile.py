"""Unit tests for the GOG document format."""

import pytest

from bass_serre.gogfile import DocumentNames, format_gog, parse_gog
from bass_serre.types import BackendValidationError, BassSerreError, GogParseError, GogValidationError, WordError
from bass_serre.words import Scope

from tests.conftest import fixture_text, load_document, names_for

TWO_PRESENTED = """\
vertex P presented gens=x
vertex Q presented gens=x,y
edge e from=P to=Q tree
  group abelian rank=1
  phi- g0 = x
  phi+ g0 = y
"""


class TestParsing:
    """Declarations, defaults and the printed form."""

    def test_trefoil_declarations(self) -> None:
        """Two vertices, one tree edge and two named elements."""
        doc = load_document("trefoil")
        assert [v.id for v in doc.vertices] == ["A", "B"]
        edge = doc.edges[0]
        assert (edge.id, edge.source, edge.target, edge.tree) == ("c", "A", "B", True)
        assert edge.phi_minus == {"g0": "g0^2"}
        assert doc.elements == {"x": "A.g0", "y": "B.g0"}

    def test_comments_and_blank_lines(self) -> None:
        """Comments run to the end of the line."""
        doc = parse_gog("# header\n\nvertex v abelian rank=2  # a torus\n")
        assert doc.vertices[0].group.rank == 2

    def test_single_row_table(self) -> None:
        """A flat table of order^2 entries is split into rows."""
        doc = parse_gog("vertex z finite order=2 table=0,1,1,0\n")
        assert doc.vertices[0].group.table == [[0, 1], [1, 0]]

    def test_relators_take_rest_of_line(self) -> None:
        """rels= is split on semicolons."""
        doc = load_document("jsj")
        assert doc.vertex("S1").group.rels == ["[x1,y1]", "[x1,z1]"]

    @pytest.mark.parametrize("name", ["trefoil", "klein", "z6", "sl2", "s3dbl", "jsj"])
    def test_printed_form_parses_back(self, name: str) -> None:
        """Printing a document and parsing it again gives the same declarations."""
        doc = load_document(name)
        assert parse_gog(format_gog(doc)) == doc


class TestParseErrors:
    """Errors carry a line and a column."""

    def test_unknown_keyword(self) -> None:
        """Lines start with a known keyword."""
        with pytest.raises(GogParseError) as exc:
            parse_gog("vertx A abelian rank=1\n")
        assert (exc.value.line, exc.value.column) == (1, 1)

    def test_undeclared_vertex(self) -> None:
        """Edges name declared vertices; the column points at the bad reference."""
        text = "vertex A abelian rank=1\nedge e from=A to=Z\n  group abelian rank=1\n"
        with pytest.raises(GogParseError) as exc:
            parse_gog(text)
        assert "undeclared vertex Z" in exc.value.message
        assert (exc.value.line, exc.value.column) == (2, 15)

    def test_indented_line_outside_edge(self) -> None:
        """Group and phi lines belong to an edge."""
        with pytest.raises(GogParseError) as exc:
            parse_gog("  group abelian rank=1\n")
        assert exc.value.line == 1

    def test_edge_without_group(self) -> None:
        """Every edge needs a group line."""
        text = "vertex v abelian rank=1\nedge 1 from=v to=v\n"
        with pytest.raises(GogParseError) as exc:
            parse_gog(text)
        assert "has no group line" in exc.value.message
        assert exc.value.line == 2

    def test_table_size(self) -> None:
        """A finite table has order^2 entries."""
        with pytest.raises(GogParseError) as exc:
            parse_gog("vertex z finite order=2 table=0,1;1\n")
        assert "expected 4" in exc.value.message

    def test_unknown_group_kind(self) -> None:
        """Only the four backends are known."""
        with pytest.raises(GogParseError):
            parse_gog("vertex z cyclic order=3\n")

    def test_non_latin_table(self) -> None:
        """Tables are checked by the finite backend."""
        with pytest.raises(BackendValidationError):
            parse_gog("vertex z finite order=2 table=0,1;1,1\n")

    def test_missing_image(self) -> None:
        """Each edge generator needs images on both sides."""
        text = "vertex v abelian rank=1\nedge 1 from=v to=v\n  group abelian rank=1\n  phi- g0 = g0\n"
        with pytest.raises(GogValidationError) as exc:
            parse_gog(text)
        assert "phi+" in exc.value.message

    def test_bad_tree(self) -> None:
        """Flagged tree edges must span."""
        text = fixture_text("klein").replace("edge 1 from=v to=v", "edge 1 from=v to=v tree")
        with pytest.raises(GogValidationError):
            parse_gog(text)


class TestDocumentNames:
    """Resolving and printing generator names."""

    def test_named_elements(self) -> None:
        """Declared elements are atoms with exponents."""
        names = names_for("trefoil")
        assert names.parse("x^2") == names.parse("A.g0 A.g0")

    def test_qualified_names_print_back(self) -> None:
        """Abelian generators are printed qualified."""
        names = names_for("trefoil")
        assert names.format(names.parse("x y^-1")) == "A.g0 B.g0^-1"

    def test_stable_letter(self) -> None:
        """t<edge> names the stable letter of a non-tree edge."""
        names = names_for("klein")
        gen = names.resolve("t1")
        assert gen.scope == Scope.STABLE
        assert names.name(gen) == "t1"

    def test_single_vertex_bare_names(self) -> None:
        """With one vertex, bare local names resolve to it."""
        names = names_for("klein")
        assert names.resolve("g0").owner == "v"

    def test_tree_edge_has_no_stable_letter(self) -> None:
        """Tree edges contribute no generator."""
        with pytest.raises(WordError) as exc:
            names_for("trefoil").resolve("tc")
        assert exc.value.code == "UNKNOWN_GENERATOR"

    def test_unique_presented_name(self) -> None:
        """Presented generators with a unique name need no qualifier."""
        names = names_for("jsj")
        gen = names.resolve("x1")
        assert gen.owner == "S1"
        assert names.name(gen) == "x1"

    def test_ambiguous_presented_name(self) -> None:
        """A name shared by two vertices must be qualified."""
        doc = parse_gog(TWO_PRESENTED)
        names = DocumentNames(doc, *doc.build())
        with pytest.raises(WordError) as exc:
            names.resolve("x")
        assert exc.value.code == "AMBIGUOUS_GENERATOR"
        assert names.name(names.resolve("P.x")) == "P.x"
        assert names.name(names.resolve("y")) == "y"

    def test_located(self) -> None:
        """word@vertex splits at the last @."""
        names = names_for("trefoil")
        assert names.located("x^2@A") == ("x^2", "A")
        with pytest.raises(BassSerreError) as exc:
            names.located("x^2@Z")
        assert exc.value.code == "BAD_ARGUMENT"
