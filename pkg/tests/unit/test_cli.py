"""Unit tests for the command-line front end."""

import pytest

from bass_serre.cli import EXIT_DECIDED, EXIT_ERROR, EXIT_UNKNOWN, build_parser, main, run
from bass_serre.config import Settings

from tests.conftest import FIXTURES, fixture_text


def lines_of(text: str) -> list:
    return text.splitlines()


class TestCommands:
    """Report lines and exit codes per subcommand."""

    def test_validate(self, test_settings: Settings) -> None:
        """A valid document reports its shape."""
        code, text = run("validate", fixture_text("klein"), settings=test_settings)
        assert code == EXIT_DECIDED
        assert "VALID: yes" in lines_of(text)
        assert "TREE: -" in lines_of(text)

    def test_present_graph_manifold(self, test_settings: Settings) -> None:
        """Generator and relation counts of the six-piece graph."""
        code, text = run("present", fixture_text("jsj"), settings=test_settings)
        lines = lines_of(text)
        assert code == EXIT_DECIDED
        assert lines[0] == "GENERATORS: 16"
        assert "RELATIONS: 20" in lines

    def test_nf_of_relation(self, test_settings: Settings) -> None:
        """x^2 y^-3 is the identity of the trefoil group."""
        code, text = run("nf", fixture_text("trefoil"), ["x^2 y^-3"], test_settings)
        assert code == EXIT_DECIDED
        assert lines_of(text)[0] == "NORMAL_FORM: eps"

    def test_nf_of_hyperbolic_word(self, test_settings: Settings) -> None:
        """Long elements report their edge and length."""
        code, text = run("nf", fixture_text("trefoil"), ["x y"], test_settings)
        lines = lines_of(text)
        assert code == EXIT_DECIDED
        assert "EDGE: c" in lines
        assert "LENGTH: 2" in lines

    def test_conj_equal_words(self, test_settings: Settings) -> None:
        """Equal words are conjugate by the empty word."""
        code, text = run("conj", fixture_text("trefoil"), ["x y", "x y"], test_settings)
        assert code == EXIT_DECIDED
        assert text == "YES conjugator: eps\n"

    def test_conj_no(self, test_settings: Settings) -> None:
        """x and y are not conjugate in the trefoil group."""
        code, text = run("conj", fixture_text("trefoil"), ["x", "y"], test_settings)
        assert (code, text) == (EXIT_DECIDED, "NO\n")

    def test_conj_yes(self, test_settings: Settings) -> None:
        """a and a^-1 are conjugate in the Klein bottle group."""
        code, text = run("conj", fixture_text("klein"), ["a", "a^-1"], test_settings)
        assert code == EXIT_DECIDED
        assert text.startswith("YES conjugator: ")

    def test_commute(self, test_settings: Settings) -> None:
        """A commuting pair reports its case first."""
        code, text = run("commute", fixture_text("klein"), ["a", "t^2"], test_settings)
        assert code == EXIT_DECIDED
        assert lines_of(text)[0] == "CASE: CIRCUIT_LABEL"
        assert "CIRCUIT: 1 1" in lines_of(text)

    def test_center_klein(self, test_settings: Settings) -> None:
        """The Klein bottle group has center generated by t1^2."""
        code, text = run("center", fixture_text("klein"), settings=test_settings)
        assert code == EXIT_DECIDED
        assert "CENTER: ⟨t1^2⟩" in lines_of(text)

    def test_centralizer(self, test_settings: Settings) -> None:
        """Elliptic elements get the circuit centralizer."""
        code, text = run("centralizer", fixture_text("klein"), ["a"], test_settings)
        assert code == EXIT_DECIDED
        assert lines_of(text)[0] == "CASE: VERTEX"

    def test_trajet(self, test_settings: Settings) -> None:
        """x^2 at A reaches y^3 at B."""
        code, text = run("trajet", fixture_text("trefoil"), ["g0^2@A", "g0^3@B"], test_settings)
        lines = lines_of(text)
        assert code == EXIT_DECIDED
        assert lines[0] == "YES"
        assert lines[1].startswith("TRAJET: ")
        assert lines[-1].startswith("LABEL: ")

    def test_trajet_needs_vertex(self, test_settings: Settings) -> None:
        """Arguments are word@vertex."""
        code, text = run("trajet", fixture_text("trefoil"), ["g0^2", "g0^3@B"], test_settings)
        assert code == EXIT_ERROR
        assert text.startswith("ERROR: BAD_ARGUMENT: ")

    def test_double(self, test_settings: Settings) -> None:
        """Z4 doubled along its order-two subgroup agrees on every pair."""
        code, text = run("double", fixture_text("sl2"), ["A", "g2"], test_settings)
        lines = lines_of(text)
        assert code == EXIT_DECIDED
        assert "PAIRS: 16" in lines
        assert "AGREE: 16" in lines
        assert "UNKNOWN: 0" in lines

    def test_sans_circuit(self, test_settings: Settings) -> None:
        """The Z6 loop has a circuit, the S3 double has none."""
        code, text = run("sans-circuit", fixture_text("z6"), settings=test_settings)
        assert code == EXIT_DECIDED
        assert lines_of(text)[0] == "SANS_CIRCUIT: NO"
        code, text = run("sans-circuit", fixture_text("s3dbl"), settings=test_settings)
        assert text == "SANS_CIRCUIT: YES\n"

    def test_sans_circuit_unknown(self, test_settings: Settings) -> None:
        """Infinite edge images leave the test undecided."""
        code, text = run("sans-circuit", fixture_text("trefoil"), settings=test_settings)
        assert code == EXIT_UNKNOWN
        assert text.startswith("SANS_CIRCUIT: UNKNOWN reason: ")


class TestErrors:
    """Errors print one ERROR line and exit with 1."""

    def test_unknown_command(self, test_settings: Settings) -> None:
        """Only registered subcommands run."""
        code, text = run("frobnicate", fixture_text("klein"), settings=test_settings)
        assert code == EXIT_ERROR
        assert text.startswith("ERROR: UNKNOWN_COMMAND: ")

    def test_parse_error(self, test_settings: Settings) -> None:
        """Parse errors carry line and column."""
        code, text = run("validate", "vertex A abelian rank=1\nedge e from=A to=Z\n", settings=test_settings)
        assert code == EXIT_ERROR
        assert text.startswith("ERROR: PARSE_ERROR: line 2, column 15: ")

    def test_wrong_arity(self, test_settings: Settings) -> None:
        """conj takes two words."""
        code, text = run("conj", fixture_text("klein"), ["a"], test_settings)
        assert code == EXIT_ERROR
        assert "usage: conj" in text

    def test_unknown_generator(self, test_settings: Settings) -> None:
        """Words name declared generators."""
        code, text = run("nf", fixture_text("trefoil"), ["q"], test_settings)
        assert code == EXIT_ERROR
        assert text.startswith("ERROR: UNKNOWN_GENERATOR: ")


class TestEntryPoint:
    """Argument parsing and file handling."""

    def test_parser(self) -> None:
        """document, command, then free arguments."""
        parsed = build_parser().parse_args(["doc.gog", "conj", "a", "b"])
        assert (parsed.document, parsed.command, parsed.args) == ("doc.gog", "conj", ["a", "b"])

    def test_parser_rejects_unknown_command(self) -> None:
        """argparse exits on an unknown subcommand."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["doc.gog", "frobnicate"])

    def test_main_reads_file(self, test_settings: Settings, capsys: pytest.CaptureFixture) -> None:
        """main prints the report and returns the exit code."""
        code = main([str(FIXTURES / "trefoil.gog"), "conj", "x", "y"])
        assert code == EXIT_DECIDED
        assert capsys.readouterr().out == "NO\n"

    def test_main_missing_file(self, test_settings: Settings, capsys: pytest.CaptureFixture) -> None:
        """Unreadable documents are IO errors."""
        code = main(["/nonexistent/document.gog", "validate"])
        assert code == EXIT_ERROR
        assert capsys.readouterr().out.startswith("ERROR: IO_ERROR: ")
