"""Command-line front end: run deciders on a GOG document and print `KEY: value` reports."""

import argparse
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import structlog

from .backends import Capability
from .config import Settings, load_settings, setup_logging
from .decide import (
    build_double,
    center_graph,
    centralizer_graph,
    commute_classify_graph,
    conjugacy_via_double,
    is_conjugate_graph,
    roots_report,
    successive_cyclic_reduction,
)
from .gog import canonical_presentation, validate
from .gogfile import DocumentNames, GogDocument, parse_gog
from .trajets import find_trajet, format_trajet, is_sans_circuit
from .types import BassSerreError, CentralizerCase, CommuteReport, Verdict
from .utils import report_lines
from .words import Word

logger = structlog.get_logger(__name__)

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2

Report = Tuple[int, List[str]]


class Context:
    """A parsed document with its built graph of groups and the search bounds."""

    def __init__(self, doc: GogDocument, settings: Settings):
        self.doc = doc
        self.settings = settings
        self.gog, self.dec = doc.build()
        self.names = DocumentNames(doc, self.gog, self.dec)

    def word(self, text: str) -> Word:
        return self.names.parse(text)

    def show(self, word: Optional[Word]) -> str:
        return self.names.format(word) if word is not None else "-"


def _arity(args: Sequence[str], count: int, usage: str) -> None:
    if len(args) != count:
        raise BassSerreError("BAD_ARGUMENT", f"usage: {usage}")


def _span(ctx: Context, words: Sequence[Word]) -> str:
    return "⟨" + ", ".join(ctx.show(w) for w in words) + "⟩"


def cmd_validate(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 0, "validate")
    report = validate(ctx.gog, ctx.dec)
    lines = report_lines([
        ("VALID", "yes" if report.valid else "no"),
        ("VERTICES", len(ctx.gog.graph.vertices)),
        ("EDGES", len(ctx.gog.graph.edges)),
        ("TREE", " ".join(sorted(ctx.dec.tree)) or "-"),
        ("ORDER", " ".join(ctx.dec.order) or "-"),
    ])
    lines.extend(f"  {item}" for item in report.violations)
    return (EXIT_DECIDED if report.valid else EXIT_ERROR), lines


def cmd_present(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 0, "present")
    presentation = canonical_presentation(ctx.gog, ctx.dec)
    lines = [f"GENERATORS: {len(presentation.generators)}"]
    lines.append("  " + ", ".join(ctx.names.name(g) for g in presentation.generators))
    lines.append(f"RELATIONS: {len(presentation.relations)}")
    lines.extend(f"  {ctx.show(r)}" for r in presentation.relations)
    return EXIT_DECIDED, lines


def cmd_nf(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 1, "nf <word>")
    word = ctx.word(args[0])
    oracle = ctx.gog.pi1(ctx.dec)
    lines = [f"NORMAL_FORM: {ctx.show(oracle.to_word(oracle.evaluate(word)))}"]
    trace = successive_cyclic_reduction(ctx.gog, ctx.dec, word)
    if trace.verdict == Verdict.UNKNOWN:
        lines.append(f"REDUCTION: UNKNOWN reason: {trace.reason}")
        return EXIT_UNKNOWN, lines
    lines.extend(report_lines([
        ("REDUCTION", trace.kind.value),
        ("CYCLICALLY_REDUCED", ctx.show(trace.final)),
        ("CONJUGATOR", ctx.show(trace.conjugator)),
        ("SUBGRAPH", " ".join(trace.vertices)),
    ]))
    if trace.vertex is not None:
        lines.append(f"VERTEX: {trace.vertex}")
    if trace.edge is not None:
        lines.append(f"EDGE: {trace.edge}")
    lines.append(f"LENGTH: {trace.length}")
    return EXIT_DECIDED, lines


def cmd_conj(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 2, "conj <w1> <w2>")
    result = is_conjugate_graph(
        ctx.gog,
        ctx.dec,
        ctx.word(args[0]),
        ctx.word(args[1]),
        depth=ctx.settings.conjugacy_depth,
        max_states=ctx.settings.trajet_max_states,
    )
    if result.verdict == Verdict.YES:
        return EXIT_DECIDED, [f"YES conjugator: {ctx.show(result.conjugator)}"]
    if result.verdict == Verdict.NO:
        return EXIT_DECIDED, ["NO"]
    return EXIT_UNKNOWN, [f"UNKNOWN reason: {result.reason}"]


def _commute_lines(ctx: Context, report: CommuteReport) -> List[str]:
    lines = [f"CASE: {report.case.value}"]
    for key in ("g", "h", "h_prime", "w", "edge_element"):
        value = getattr(report, key)
        if value is not None:
            lines.append(f"{key.upper()}: {ctx.show(value)}")
    for key in ("j", "k", "factor"):
        value = getattr(report, key)
        if value is not None:
            lines.append(f"{key.upper()}: {value}")
    if report.circuit:
        lines.append("CIRCUIT: " + " ".join(report.circuit))
    if report.sequence:
        lines.append("SEQUENCE: " + ", ".join(ctx.show(c) for c in report.sequence))
    if report.swapped:
        lines.append("SWAPPED: yes")
    return lines


def cmd_commute(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 2, "commute <w1> <w2>")
    report = commute_classify_graph(
        ctx.gog, ctx.dec, ctx.word(args[0]), ctx.word(args[1]), depth=ctx.settings.conjugacy_depth
    )
    lines = _commute_lines(ctx, report)
    if report.case.value == "UNKNOWN":
        lines.append(f"REASON: {report.reason}")
        return EXIT_UNKNOWN, lines
    return EXIT_DECIDED, lines


def cmd_center(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 0, "center")
    report = center_graph(
        ctx.gog, ctx.dec, depth=ctx.settings.conjugacy_depth, limit=ctx.settings.outer_order_limit
    )
    if report.verdict == Verdict.UNKNOWN:
        return EXIT_UNKNOWN, [f"CASE: {report.case.value}", f"CENTER: UNKNOWN reason: {report.reason}"]
    return EXIT_DECIDED, [f"CASE: {report.case.value}", f"CENTER: {_span(ctx, report.generators)}"]


def cmd_centralizer(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 1, "centralizer <word>")
    report = centralizer_graph(
        ctx.gog,
        ctx.dec,
        ctx.word(args[0]),
        depth=ctx.settings.conjugacy_depth,
        max_states=ctx.settings.trajet_max_states,
    )
    lines = [f"CASE: {report.case.value}"]
    if report.case == CentralizerCase.UNKNOWN:
        return EXIT_UNKNOWN, lines
    lines.append(f"CENTRALIZER: {_span(ctx, report.generators)}")
    if report.vertex is not None:
        lines.append(f"VERTEX: {report.vertex}")
    if report.root is not None:
        lines.append(f"ROOT: {ctx.show(report.root)}")
        lines.append(f"POWER: {report.power}")
    return EXIT_DECIDED, lines


def cmd_roots(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 1, "roots <word>")
    report = roots_report(
        ctx.gog,
        ctx.dec,
        ctx.word(args[0]),
        k_max=ctx.settings.root_k_max,
        radius=ctx.settings.ball_radius,
        depth=ctx.settings.conjugacy_depth,
        max_states=ctx.settings.trajet_max_states,
    )
    lines = [f"ROOTS: {len(report.roots)}"]
    lines.extend(
        f"  {ctx.show(r.root)}^{r.exponent} {r.branch.value}" + ("" if r.ok else " VIOLATION")
        for r in report.roots
    )
    lines.append(f"VIOLATIONS: {report.violations}")
    return EXIT_DECIDED, lines


def cmd_trajet(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 2, "trajet <w1>@<s1> <w2>@<s2>")
    (w1, s1), (w2, s2) = (ctx.names.located(a) for a in args)
    u = ctx.gog.vertex_group(s1).parse(w1)
    v = ctx.gog.vertex_group(s2).parse(w2)
    search = find_trajet(ctx.gog, ctx.dec, u, s1, v, s2, max_states=ctx.settings.trajet_max_states)
    if search.verdict == Verdict.UNKNOWN:
        return EXIT_UNKNOWN, [f"UNKNOWN reason: {search.reason}"]
    if search.trajet is None:
        return EXIT_DECIDED, ["NO", f"STATES: {search.states}"]
    lines = ["YES"] + format_trajet(ctx.gog, search.trajet)
    lines.append(f"LABEL: {ctx.show(search.trajet.label(ctx.gog, ctx.dec))}")
    return EXIT_DECIDED, lines


def cmd_double(ctx: Context, args: Sequence[str]) -> Report:
    if len(args) < 2:
        raise BassSerreError("BAD_ARGUMENT", "usage: double <base> <subgroup> [<subgroup> ...]")
    base = args[0]
    if base not in ctx.gog.vertex_groups:
        raise BassSerreError("BAD_ARGUMENT", f"unknown vertex {base!r}")
    group = ctx.gog.vertex_group(base)
    subgroups = [group.subgroup([group.parse(w) for w in text.split(",")]) for text in args[1:]]
    double = build_double(group, subgroups)
    presentation = canonical_presentation(double.gog, double.dec)
    lines = report_lines([
        ("BASE", base),
        ("EDGES", len(double.gog.graph.edges)),
        ("GENERATORS", len(presentation.generators)),
        ("RELATIONS", len(presentation.relations)),
    ])
    if Capability.ENUMERATE not in group.capabilities:
        lines.append("PAIRS: skipped")
        return EXIT_DECIDED, lines
    elements = group.elements()
    agreements = [
        conjugacy_via_double(
            group,
            subgroups,
            u,
            v,
            depth=ctx.settings.conjugacy_depth,
            max_states=ctx.settings.trajet_max_states,
            double=double,
        )
        for u in elements
        for v in elements
    ]
    unknown = sum(1 for a in agreements if Verdict.UNKNOWN in (a.in_group, a.in_double))
    lines.append(f"PAIRS: {len(agreements)}")
    lines.append(f"AGREE: {sum(1 for a in agreements if a.agree)}")
    lines.append(f"UNKNOWN: {unknown}")
    return (EXIT_UNKNOWN if unknown else EXIT_DECIDED), lines


def cmd_sans_circuit(ctx: Context, args: Sequence[str]) -> Report:
    _arity(args, 0, "sans-circuit")
    search = is_sans_circuit(ctx.gog, ctx.dec, max_states=ctx.settings.trajet_max_states)
    if search.verdict == Verdict.UNKNOWN:
        return EXIT_UNKNOWN, [f"SANS_CIRCUIT: UNKNOWN reason: {search.reason}"]
    lines = [f"SANS_CIRCUIT: {search.verdict.value}"]
    if search.trajet is not None:
        lines.extend(format_trajet(ctx.gog, search.trajet))
    return EXIT_DECIDED, lines


COMMANDS: Dict[str, Callable[[Context, Sequence[str]], Report]] = {
    "validate": cmd_validate,
    "present": cmd_present,
    "nf": cmd_nf,
    "conj": cmd_conj,
    "commute": cmd_commute,
    "center": cmd_center,
    "centralizer": cmd_centralizer,
    "roots": cmd_roots,
    "trajet": cmd_trajet,
    "double": cmd_double,
    "sans-circuit": cmd_sans_circuit,
}


def run(
    command: str, document: str, args: Sequence[str] = (), settings: Optional[Settings] = None
) -> Tuple[int, str]:
    """Run one subcommand on a document; returns the exit code and the report text."""
    settings = settings or Settings()
    handler = COMMANDS.get(command)
    try:
        if handler is None:
            raise BassSerreError("UNKNOWN_COMMAND", f"unknown command {command!r}")
        ctx = Context(parse_gog(document), settings)
        code, lines = handler(ctx, list(args))
    except BassSerreError as e:
        logger.warning("Command failed", command=command, code=e.code, error=e.message)
        return EXIT_ERROR, f"ERROR: {e.code}: {e.message}\n"
    logger.debug("Command finished", command=command, exit_code=code)
    return code, "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bass-serre",
        description="Decide word, conjugacy and commutation problems in graphs of groups.",
    )
    parser.add_argument("document", help="GOG document path, or - for stdin")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("args", nargs="*", help="command arguments")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parsed = build_parser().parse_args(argv)
    settings = load_settings()
    setup_logging(settings)
    if parsed.document == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(parsed.document, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as e:
            print(f"ERROR: IO_ERROR: {e}")
            return EXIT_ERROR
    code, output = run(parsed.command, text, parsed.args, settings)
    sys.stdout.write(output)
    return code


if __name__ == "__main__":
    sys.exit(main())
