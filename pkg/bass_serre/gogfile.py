"""The GOG text format: graph-of-groups documents, their parser and printer.

    # comments run to the end of the line
    vertex <id> finite order=<n> table=<row;row;...> [gens=<i,j,...>]
    vertex <id> abelian rank=<n>
    vertex <id> free rank=<n>
    vertex <id> presented gens=<a,b,...> rels=<word>; <word>; ...
    edge <id> from=<v> to=<v> [tree]
      group finite|abelian|free|presented ...
      phi- <edge generator> = <word over the origin group>
      phi+ <edge generator> = <word over the end group>
    order <edge ids...>
    element <name> = <word>

``rels=`` takes the rest of its line. Document words name vertex generators
as ``v.g3`` or ``v.x``, presented generators by their bare name when it is
unique, and stable letters as ``t<edge>``.
"""

from typing import Dict, List, Optional, Tuple

import structlog
from pydantic import BaseModel, Field

from .backends import FiniteGroup, FreeAbelianGroup, FreeGroup, GroupOracle, Monomorphism, PresentedGroup
from .gog import Decomposition, EdgeGroup, Graph, GraphOfGroups, default_decomposition
from .types import BassSerreError, GogParseError, GogValidationError, WordError
from .words import GeneratorId, Scope, Word, format_word, parse_word, power, product

logger = structlog.get_logger(__name__)

GROUP_KINDS = ("finite", "abelian", "free", "presented")


class GroupDecl(BaseModel):
    """Declaration of a vertex or edge group."""
    kind: str
    order: Optional[int] = None
    table: List[List[int]] = Field(default_factory=list)
    gens: List[int] = Field(default_factory=list)
    rank: Optional[int] = None
    names: List[str] = Field(default_factory=list)
    rels: List[str] = Field(default_factory=list)


class VertexDecl(BaseModel):
    id: str
    group: GroupDecl


class EdgeDecl(BaseModel):
    id: str
    source: str
    target: str
    tree: bool = False
    group: Optional[GroupDecl] = None
    phi_minus: Dict[str, str] = Field(default_factory=dict)
    phi_plus: Dict[str, str] = Field(default_factory=dict)


class GogDocument(BaseModel):
    """Parsed GOG document: declarations only, rebuilt into groups on demand."""
    vertices: List[VertexDecl] = Field(default_factory=list)
    edges: List[EdgeDecl] = Field(default_factory=list)
    order: Optional[List[str]] = None
    elements: Dict[str, str] = Field(default_factory=dict)

    def build(self) -> Tuple[GraphOfGroups, Decomposition]:
        return build_gog(self)

    def vertex(self, vertex_id: str) -> Optional[VertexDecl]:
        return next((v for v in self.vertices if v.id == vertex_id), None)


# parsing


def _options(tokens: List[Tuple[str, int]], line: int) -> Dict[str, Tuple[str, int]]:
    options: Dict[str, Tuple[str, int]] = {}
    for token, column in tokens:
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise GogParseError(f"expected key=value, got {token!r}", line, column)
        options[key] = (value, column)
    return options


def _int(value: Tuple[str, int], line: int, key: str) -> int:
    text, column = value
    try:
        return int(text)
    except ValueError:
        raise GogParseError(f"{key} must be an integer, got {text!r}", line, column) from None


def _tokens(text: str, offset: int = 0) -> List[Tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based columns."""
    tokens = []
    column = 0
    for piece in text.split():
        column = text.index(piece, column)
        tokens.append((piece, column + offset + 1))
        column += len(piece)
    return tokens


def _group_decl(text: str, line: int, offset: int) -> GroupDecl:
    rels: List[str] = []
    if " rels=" in f" {text}":
        head, _, tail = text.partition("rels=")
        rels = [" ".join(r.split()) for r in tail.split(";") if r.strip()]
        text = head
    tokens = _tokens(text, offset)
    if not tokens:
        raise GogParseError("missing group kind", line, offset + 1)
    kind, column = tokens[0]
    if kind not in GROUP_KINDS:
        raise GogParseError(f"unknown group kind {kind!r}", line, column)
    options = _options(tokens[1:], line)
    decl = GroupDecl(kind=kind, rels=rels)
    if kind == "finite":
        if "order" not in options or "table" not in options:
            raise GogParseError("finite groups need order= and table=", line, column)
        decl.order = _int(options["order"], line, "order")
        table_text, table_column = options["table"]
        try:
            decl.table = [[int(x) for x in row.split(",")] for row in table_text.split(";")]
        except ValueError:
            raise GogParseError("table entries must be integers", line, table_column) from None
        flat = [x for row in decl.table for x in row]
        if len(flat) != decl.order * decl.order:
            raise GogParseError(
                f"table has {len(flat)} entries, expected {decl.order * decl.order}", line, table_column
            )
        if len(decl.table) == 1 and decl.order > 1:
            decl.table = [flat[i * decl.order:(i + 1) * decl.order] for i in range(decl.order)]
        if "gens" in options:
            decl.gens = [int(x) for x in options["gens"][0].split(",")]
    elif kind in ("abelian", "free"):
        if "rank" not in options:
            raise GogParseError(f"{kind} groups need rank=", line, column)
        decl.rank = _int(options["rank"], line, "rank")
    else:
        if "gens" not in options:
            raise GogParseError("presented groups need gens=", line, column)
        decl.names = options["gens"][0].split(",")
    return decl


def _phi_line(edge: EdgeDecl, text: str, line: int, column: int) -> None:
    key, _, rest = text.partition(" ")
    name, sep, word = rest.partition("=")
    if not sep or not name.strip():
        raise GogParseError(f"expected '{key} <generator> = <word>'", line, column)
    target = edge.phi_minus if key == "phi-" else edge.phi_plus
    target[name.strip()] = " ".join(word.split())


def parse_gog(text: str) -> GogDocument:
    """Parse and validate a GOG document."""
    doc = GogDocument()
    current: Optional[EdgeDecl] = None
    edge_lines: Dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        indent = len(content) - len(content.lstrip())
        body = content.strip()
        keyword, _, rest = body.partition(" ")
        rest_offset = indent + len(keyword) + 1
        if indent:
            if current is None:
                raise GogParseError("indented line outside an edge block", number, indent + 1)
            if keyword == "group":
                current.group = _group_decl(rest, number, rest_offset)
            elif keyword in ("phi-", "phi+"):
                _phi_line(current, body, number, indent + 1)
            else:
                raise GogParseError(f"unknown edge line {keyword!r}", number, indent + 1)
            continue
        current = None
        tokens = _tokens(rest, rest_offset)
        if keyword == "vertex":
            if not tokens:
                raise GogParseError("vertex needs an id", number, 1)
            vertex_id = tokens[0][0]
            if doc.vertex(vertex_id) is not None:
                raise GogParseError(f"vertex {vertex_id} declared twice", number, tokens[0][1])
            cut = rest.index(vertex_id) + len(vertex_id)
            doc.vertices.append(
                VertexDecl(id=vertex_id, group=_group_decl(rest[cut:], number, rest_offset + cut))
            )
        elif keyword == "edge":
            if not tokens:
                raise GogParseError("edge needs an id", number, 1)
            edge_id, _ = tokens[0]
            if any(e.id == edge_id for e in doc.edges):
                raise GogParseError(f"edge {edge_id} declared twice", number, tokens[0][1])
            flags = [t for t in tokens[1:] if "=" not in t[0]]
            options = _options([t for t in tokens[1:] if "=" in t[0]], number)
            for key in ("from", "to"):
                if key not in options:
                    raise GogParseError(f"edge {edge_id} needs {key}=", number, tokens[0][1])
                vertex_id, column = options[key]
                if doc.vertex(vertex_id) is None:
                    raise GogParseError(f"edge {edge_id} references undeclared vertex {vertex_id}", number, column)
            for flag, column in flags:
                if flag != "tree":
                    raise GogParseError(f"unknown edge flag {flag!r}", number, column)
            current = EdgeDecl(id=edge_id, source=options["from"][0], target=options["to"][0], tree=bool(flags))
            doc.edges.append(current)
            edge_lines[edge_id] = number
        elif keyword == "order":
            doc.order = [t for t, _ in tokens]
        elif keyword == "element":
            name, sep, word = rest.partition("=")
            if not sep or not name.strip():
                raise GogParseError("expected 'element <name> = <word>'", number, rest_offset + 1)
            doc.elements[name.strip()] = " ".join(word.split())
        else:
            raise GogParseError(f"unknown keyword {keyword!r}", number, indent + 1)
    for edge in doc.edges:
        if edge.group is None:
            raise GogParseError(f"edge {edge.id} has no group line", edge_lines[edge.id], 1)
    doc.build()
    logger.debug("GOG document parsed", vertices=len(doc.vertices), edges=len(doc.edges))
    return doc


# building


def make_group(decl: GroupDecl, owner: str, scope: Scope = Scope.VERTEX) -> GroupOracle:
    if decl.kind == "finite":
        return FiniteGroup(decl.table, decl.gens or None, owner=owner, scope=scope)
    if decl.kind == "abelian":
        return FreeAbelianGroup(decl.rank or 0, owner=owner, scope=scope)
    if decl.kind == "free":
        return FreeGroup(decl.rank or 0, owner=owner, scope=scope)
    group = PresentedGroup(decl.names, owner=owner)
    group.scope = scope
    group.relators = [group.reduce(group.parse(r)) for r in decl.rels]  # type: ignore[arg-type]
    return group


def _embedding(
    edge: EdgeDecl, oracle: GroupOracle, target: GroupOracle, images: Dict[str, str], side: str
) -> Monomorphism:
    values = []
    for index in oracle.generator_indices():
        name = oracle.name(index)
        if name not in images:
            raise GogValidationError(f"edge {edge.id} has no {side} image for {name}", [f"{edge.id}:{side}:{name}"])
        values.append(target.parse(images[name]))
    unknown = set(images) - {oracle.name(i) for i in oracle.generator_indices()}
    if unknown:
        raise GogValidationError(f"edge {edge.id} maps unknown generators", sorted(unknown))
    return Monomorphism(oracle.whole(), target.subgroup(values), values)


def build_gog(doc: GogDocument) -> Tuple[GraphOfGroups, Decomposition]:
    """Backends, graph and decomposition declared by a document, validated."""
    vertex_groups = {v.id: make_group(v.group, v.id) for v in doc.vertices}
    edges = {e.id: (e.source, e.target) for e in doc.edges}
    edge_groups = {}
    for e in doc.edges:
        oracle = make_group(e.group, e.id, Scope.EDGE_GROUP)  # type: ignore[arg-type]
        edge_groups[e.id] = EdgeGroup(
            oracle,
            _embedding(e, oracle, vertex_groups[e.source], e.phi_minus, "phi-"),
            _embedding(e, oracle, vertex_groups[e.target], e.phi_plus, "phi+"),
        )
    graph = Graph([v.id for v in doc.vertices], edges)
    gog = GraphOfGroups(graph, vertex_groups, edge_groups)
    violations = gog.violations()
    if violations:
        logger.warning("GOG document failed validation", violations=violations)
        raise GogValidationError("graph of groups is invalid", violations)
    flagged = [e.id for e in doc.edges if e.tree]
    dec = default_decomposition(graph, flagged if flagged else None, doc.order)
    return gog, dec


# naming


class DocumentNames:
    """Resolver and namer for words over a document's canonical generators."""

    def __init__(self, doc: GogDocument, gog: GraphOfGroups, dec: Decomposition):
        self.doc = doc
        self.gog = gog
        self.dec = dec
        self._bare: Dict[str, List[str]] = {}
        for v in doc.vertices:
            for name in v.group.names:
                self._bare.setdefault(name, []).append(v.id)

    def resolve(self, name: str) -> GeneratorId:
        if "." in name:
            owner, _, local = name.partition(".")
            if owner not in self.gog.vertex_groups:
                raise WordError("UNKNOWN_GENERATOR", f"{name!r} names undeclared vertex {owner!r}")
            return self.gog.vertex_group(owner).resolve_name(local)
        owners = self._bare.get(name, [])
        if len(owners) == 1:
            return self.gog.vertex_group(owners[0]).resolve_name(name)
        if len(owners) > 1:
            raise WordError("AMBIGUOUS_GENERATOR", f"{name!r} is a generator of {', '.join(owners)}")
        if name.startswith("t") and name[1:] in self.gog.graph.edges:
            if name[1:] in self.dec.tree:
                raise WordError("UNKNOWN_GENERATOR", f"tree edge {name[1:]} has no stable letter")
            return self.gog.stable(name[1:])
        if len(self.gog.graph.vertices) == 1:
            return self.gog.vertex_group(self.gog.graph.vertices[0]).resolve_name(name)
        raise WordError("UNKNOWN_GENERATOR", f"cannot resolve generator {name!r}")

    def name(self, gen: GeneratorId) -> str:
        if gen.scope == Scope.STABLE:
            return f"t{gen.owner}"
        group = self.gog.vertex_groups.get(gen.owner)
        if group is None:
            return f"{gen.owner}.g{gen.index}"
        local = group.name(gen.index)
        if len(self._bare.get(local, [])) == 1:
            return local
        return f"{gen.owner}.{local}"

    def parse(self, text: str) -> Word:
        """A word whose atoms may also be named elements, as in `a t a^-1`."""
        pieces = []
        for token in text.split():
            name, _, exp = token.partition("^")
            if name in self.doc.elements:
                if exp and not exp.lstrip("-").isdigit():
                    raise WordError("WORD_SYNTAX", f"malformed word atom {token!r}")
                pieces.append(power(parse_word(self.doc.elements[name], self.resolve), int(exp or 1)))
            else:
                pieces.append(parse_word(token, self.resolve))
        return product(pieces)

    def format(self, word: Word) -> str:
        return format_word(word, self.name)

    def located(self, text: str) -> Tuple[str, str]:
        """Split ``<word>@<vertex>``."""
        word, sep, vertex = text.rpartition("@")
        if not sep or vertex not in self.gog.vertex_groups:
            raise BassSerreError("BAD_ARGUMENT", f"expected <word>@<vertex>, got {text!r}")
        return word, vertex


# printing


def _format_group(decl: GroupDecl) -> str:
    if decl.kind == "finite":
        table = ";".join(",".join(str(x) for x in row) for row in decl.table)
        text = f"finite order={decl.order} table={table}"
        if decl.gens:
            text += " gens=" + ",".join(str(g) for g in decl.gens)
        return text
    if decl.kind in ("abelian", "free"):
        return f"{decl.kind} rank={decl.rank}"
    text = "presented gens=" + ",".join(decl.names)
    if decl.rels:
        text += " rels=" + "; ".join(decl.rels)
    return text


def format_gog(doc: GogDocument) -> str:
    lines = [f"vertex {v.id} {_format_group(v.group)}" for v in doc.vertices]
    for e in doc.edges:
        lines.append(f"edge {e.id} from={e.source} to={e.target}" + (" tree" if e.tree else ""))
        if e.group is not None:
            lines.append(f"  group {_format_group(e.group)}")
        lines.extend(f"  phi- {name} = {word}" for name, word in e.phi_minus.items())
        lines.extend(f"  phi+ {name} = {word}" for name, word in e.phi_plus.items())
    if doc.order is not None:
        lines.append("order " + " ".join(doc.order))
    lines.extend(f"element {name} = {word}" for name, word in doc.elements.items())
    return "\n".join(lines) + "\n"
