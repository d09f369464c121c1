"""Graphs of groups: graphs with an edge involution, decompositions and presentations.

An edge id ``e`` names the positive arrow; ``-e`` is its reverse. The
monomorphism at the origin of an arrow maps the edge group into G_o(a), the
one at its end into G_e(a).
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import structlog

from .amalgam import AmalgamPresentation
from .backends import GroupOracle, Monomorphism, Subgroup
from .hnn import HnnPresentation
from .types import CapabilityError, GogValidationError, ValidationReport
from .words import GeneratorId, Letter, Scope, Word, invert, product

logger = structlog.get_logger(__name__)


class Graph:
    """Finite connected graph; each edge id stands for an arrow and its reverse."""

    def __init__(self, vertices: Iterable[str], edges: Mapping[str, Tuple[str, str]]):
        self.vertices: Tuple[str, ...] = tuple(vertices)
        self.edges: Dict[str, Tuple[str, str]] = dict(edges)

    @classmethod
    def from_involution(
        cls,
        vertices: Iterable[str],
        origin: Mapping[str, str],
        involution: Mapping[str, str],
        orientation: Iterable[str],
    ) -> "Graph":
        """Build a graph from arrows, origins, the reversal involution and one arrow per pair."""
        violations: List[str] = []
        for arrow, reverse in involution.items():
            if reverse == arrow:
                violations.append(f"involution fixes arrow {arrow}")
            elif involution.get(reverse) != arrow:
                violations.append(f"involution is not an involution at {arrow}")
        positive = list(orientation)
        for arrow in positive:
            if involution.get(arrow) in positive:
                violations.append(f"orientation contains both {arrow} and its reverse")
        covered = set(positive) | {involution.get(a) for a in positive}
        if covered != set(involution):
            violations.append("orientation does not meet every arrow pair")
        if violations:
            raise GogValidationError("invalid edge involution", violations)
        edges = {a: (origin[a], origin[involution[a]]) for a in positive}
        return cls(vertices, edges)

    @staticmethod
    def reverse(arrow: str) -> str:
        return arrow[1:] if arrow.startswith("-") else f"-{arrow}"

    @staticmethod
    def edge_of(arrow: str) -> str:
        return arrow.lstrip("-")

    @staticmethod
    def sign(arrow: str) -> int:
        return -1 if arrow.startswith("-") else 1

    def origin(self, arrow: str) -> str:
        o, e = self.edges[self.edge_of(arrow)]
        return o if self.sign(arrow) > 0 else e

    def terminus(self, arrow: str) -> str:
        return self.origin(self.reverse(arrow))

    def arrows(self) -> List[str]:
        return [a for e in sorted(self.edges) for a in (e, self.reverse(e))]

    def arrows_at(self, vertex: str, edges: Optional[Iterable[str]] = None) -> List[str]:
        allowed = set(self.edges if edges is None else edges)
        return [a for a in self.arrows() if self.edge_of(a) in allowed and self.origin(a) == vertex]

    def nx_graph(self, vertices: Optional[Iterable[str]] = None, edges: Optional[Iterable[str]] = None) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices if vertices is None else vertices)
        for e in sorted(self.edges if edges is None else edges):
            o, t = self.edges[e]
            graph.add_edge(o, t, key=e)
        return graph

    def is_connected(self, vertices: Optional[Iterable[str]] = None, edges: Optional[Iterable[str]] = None) -> bool:
        graph = self.nx_graph(vertices, edges)
        return graph.number_of_nodes() > 0 and nx.is_connected(graph)

    def violations(self) -> List[str]:
        violations: List[str] = []
        if not self.vertices:
            violations.append("graph has no vertices")
            return violations
        if len(set(self.vertices)) != len(self.vertices):
            violations.append("duplicate vertex ids")
        known = set(self.vertices)
        for e, (o, t) in sorted(self.edges.items()):
            if e.startswith("-"):
                violations.append(f"edge id {e} collides with a reversed arrow")
            for v in (o, t):
                if v not in known:
                    violations.append(f"edge {e} references undeclared vertex {v}")
        if not violations and not self.is_connected():
            violations.append("graph is disconnected")
        return violations


@dataclass
class EdgeGroup:
    """Edge group G_a with its embeddings at the origin (phi_minus) and end (phi_plus)."""

    oracle: GroupOracle
    phi_minus: Monomorphism
    phi_plus: Monomorphism


class Presentation(NamedTuple):
    generators: List[GeneratorId]
    relations: List[Word]


class Subgraph(NamedTuple):
    vertices: FrozenSet[str]
    edges: FrozenSet[str]


@dataclass(frozen=True)
class Decomposition:
    """Spanning tree plus the decomposition order on positive arrows."""

    tree: FrozenSet[str]
    order: Tuple[str, ...]

    def violations(self, graph: Graph) -> List[str]:
        violations: List[str] = []
        if sorted(self.order) != sorted(graph.edges):
            violations.append("decomposition order is not a permutation of the edges")
        unknown = self.tree - set(graph.edges)
        if unknown:
            violations.append(f"tree names unknown edges {sorted(unknown)}")
            return violations
        tree_graph = graph.nx_graph(edges=self.tree)
        if len(self.tree) != len(graph.vertices) - 1 or not nx.is_connected(tree_graph):
            violations.append("tree is not a spanning tree")
        seen_tree = False
        for e in self.order:
            if e in self.tree:
                seen_tree = True
            elif seen_tree:
                violations.append(f"non-tree edge {e} follows a tree edge in the order")
        return violations


def spanning_tree(graph: Graph) -> FrozenSet[str]:
    """BFS from the least vertex id, taking edges by least id."""
    if not graph.is_connected():
        raise GogValidationError("graph is disconnected", ["DISCONNECTED"])
    nxg = graph.nx_graph()
    # edges were inserted by id, so neighbours come out by their least edge id
    return frozenset(min(nxg[v][w]) for v, w in nx.bfs_edges(nxg, min(graph.vertices)))


def default_order(graph: Graph, tree: FrozenSet[str]) -> Tuple[str, ...]:
    """Non-tree edges by id, then tree edges by id."""
    edges = sorted(graph.edges)
    return tuple([e for e in edges if e not in tree] + [e for e in edges if e in tree])


def default_decomposition(
    graph: Graph, tree: Optional[Iterable[str]] = None, order: Optional[Sequence[str]] = None
) -> Decomposition:
    chosen = frozenset(tree) if tree is not None else spanning_tree(graph)
    dec = Decomposition(chosen, tuple(order) if order is not None else default_order(graph, chosen))
    violations = dec.violations(graph)
    if violations:
        raise GogValidationError("invalid decomposition", violations)
    return dec


class GraphOfGroups:
    """Vertex and edge groups over a graph, with per-arrow edge monomorphisms."""

    def __init__(
        self,
        graph: Graph,
        vertex_groups: Mapping[str, GroupOracle],
        edge_groups: Mapping[str, EdgeGroup],
    ):
        self.graph = graph
        self.vertex_groups: Dict[str, GroupOracle] = dict(vertex_groups)
        self.edge_groups: Dict[str, EdgeGroup] = dict(edge_groups)
        self._transfers: Dict[str, Monomorphism] = {}

    def vertex_group(self, v: str) -> GroupOracle:
        return self.vertex_groups[v]

    def phi_at_origin(self, arrow: str) -> Monomorphism:
        edge = self.edge_groups[Graph.edge_of(arrow)]
        return edge.phi_minus if Graph.sign(arrow) > 0 else edge.phi_plus

    def phi_at_end(self, arrow: str) -> Monomorphism:
        return self.phi_at_origin(Graph.reverse(arrow))

    def image_at_origin(self, arrow: str) -> Subgroup:
        return self.phi_at_origin(arrow).codomain

    def image_at_end(self, arrow: str) -> Subgroup:
        return self.phi_at_end(arrow).codomain

    def transfer(self, arrow: str) -> Monomorphism:
        """Isomorphism image_at_origin(a) -> image_at_end(a) through the edge group."""
        if arrow not in self._transfers:
            self._transfers[arrow] = self.phi_at_origin(arrow).inverse().compose(self.phi_at_end(arrow))
        return self._transfers[arrow]

    def stable(self, edge: str) -> GeneratorId:
        return GeneratorId(Scope.STABLE, Graph.edge_of(edge), 0)

    def stable_word(self, arrow: str, dec: Decomposition) -> Word:
        if Graph.edge_of(arrow) in dec.tree:
            return Word()
        return Word.of(self.stable(arrow), Graph.sign(arrow))

    def fix_edge(self, arrow: str) -> Subgroup:
        """Elements of the origin image fixed by the transfer along a loop."""
        if self.graph.origin(arrow) != self.graph.terminus(arrow):
            raise CapabilityError(f"fixed points of non-loop edge {arrow} compare different vertex groups")
        return self.vertex_group(self.graph.origin(arrow)).equalizer(self.transfer(arrow))

    def pi1(self, dec: Decomposition) -> GroupOracle:
        from .pi1 import GraphGroupOracle

        return GraphGroupOracle(self, dec)

    def violations(self) -> List[str]:
        violations = self.graph.violations()
        if violations:
            return violations
        for v in self.graph.vertices:
            if v not in self.vertex_groups:
                violations.append(f"vertex {v} has no group")
        for e, (o, t) in sorted(self.graph.edges.items()):
            edge = self.edge_groups.get(e)
            if edge is None:
                violations.append(f"edge {e} has no group")
                continue
            for side, phi, v in (("phi-", edge.phi_minus, o), ("phi+", edge.phi_plus, t)):
                if phi.source is not edge.oracle:
                    violations.append(f"edge {e} {side} is not defined on the edge group")
                if phi.target is not self.vertex_groups.get(v):
                    violations.append(f"edge {e} {side} does not land in vertex group {v}")
                violations.extend(f"edge {e} {side}: {item}" for item in phi.validate())
        return violations


def validate(gog: GraphOfGroups, dec: Optional[Decomposition] = None) -> ValidationReport:
    violations = gog.violations()
    if dec is not None and not violations:
        violations.extend(dec.violations(gog.graph))
    if violations:
        logger.warning("Graph of groups validation failed", violations=violations)
    return ValidationReport(valid=not violations, violations=violations)


def canonical_presentation(gog: GraphOfGroups, dec: Decomposition) -> Presentation:
    """Vertex generators and stable letters, vertex relations and one relation per edge generator."""
    generators: List[GeneratorId] = []
    relations: List[Word] = []
    for v in gog.graph.vertices:
        oracle = gog.vertex_group(v)
        generators.extend(oracle.generator_id(i) for i in oracle.generator_indices())
    generators.extend(gog.stable(e) for e in sorted(gog.graph.edges) if e not in dec.tree)
    for v in gog.graph.vertices:
        relations.extend(gog.vertex_group(v).presentation_relators())
    for e in dec.order:
        edge = gog.edge_groups[e]
        o, t = gog.graph.edges[e]
        stable = gog.stable_word(e, dec)
        for left, right in zip(edge.phi_minus.images, edge.phi_plus.images):
            lw = gog.vertex_group(o).to_word(left)
            rw = gog.vertex_group(t).to_word(right)
            relations.append(product([lw, stable, invert(rw), invert(stable)]))
    logger.debug("Canonical presentation built", generators=len(generators), relations=len(relations))
    return Presentation(generators, relations)


def whole_subgraph(gog: GraphOfGroups) -> Subgraph:
    return Subgraph(frozenset(gog.graph.vertices), frozenset(gog.graph.edges))


def split_subgraph(gog: GraphOfGroups, dec: Decomposition, edge: str, within: Subgraph) -> Dict[str, Subgraph]:
    """Pieces left after cutting ``edge``: tags A and B for a tree edge, BASE otherwise."""
    rest = within.edges - {edge}
    if edge not in dec.tree:
        return {"BASE": Subgraph(within.vertices, rest)}
    o, t = gog.graph.edges[edge]
    graph = gog.graph.nx_graph(within.vertices, rest)
    side_a = frozenset(nx.node_connected_component(graph, o))
    side_b = frozenset(nx.node_connected_component(graph, t))
    edges_a = frozenset(e for e in rest if gog.graph.edges[e][0] in side_a)
    edges_b = frozenset(e for e in rest if gog.graph.edges[e][0] in side_b)
    return {"A": Subgraph(side_a, edges_a), "B": Subgraph(side_b, edges_b)}


def subgraph_oracle(gog: GraphOfGroups, dec: Decomposition, sub: Subgraph) -> GroupOracle:
    if len(sub.vertices) == 1 and not sub.edges:
        return gog.vertex_group(next(iter(sub.vertices)))
    from .pi1 import GraphGroupOracle

    return GraphGroupOracle(gog, dec, sub.vertices, sub.edges)


def _image_in(oracle: GroupOracle, vertex: str, subgroup: Subgroup) -> Subgroup:
    if subgroup.ambient is oracle:
        return subgroup
    return oracle.vertex_subgroup(vertex, subgroup)  # type: ignore[attr-defined]


def _values_in(gog: GraphOfGroups, oracle: GroupOracle, vertex: str, values: Sequence) -> List:
    if oracle is gog.vertex_group(vertex):
        return list(values)
    return [oracle.embed(vertex, x) for x in values]  # type: ignore[attr-defined]


def decompose_edge(
    gog: GraphOfGroups, dec: Decomposition, edge: str, within: Optional[Subgraph] = None
) -> Union[AmalgamPresentation, HnnPresentation]:
    """Split the fundamental group of ``within`` along ``edge``."""
    within = within or whole_subgraph(gog)
    if edge not in within.edges:
        raise GogValidationError(f"edge {edge} is not in the subgraph", [edge])
    pieces = split_subgraph(gog, dec, edge, within)
    o, t = gog.graph.edges[edge]
    images_end = gog.phi_at_end(edge).images
    if edge in dec.tree:
        factor_a = subgraph_oracle(gog, dec, pieces["A"])
        factor_b = subgraph_oracle(gog, dec, pieces["B"])
        c_a = _image_in(factor_a, o, gog.image_at_origin(edge))
        c_b = _image_in(factor_b, t, gog.image_at_end(edge))
        phi = Monomorphism(c_a, c_b, _values_in(gog, factor_b, t, images_end))
        logger.debug("Split along tree edge", edge=edge)
        return AmalgamPresentation(factor_a, factor_b, c_a, c_b, phi, edge=edge, check=False)
    base = subgraph_oracle(gog, dec, pieces["BASE"])
    c_minus = _image_in(base, o, gog.image_at_origin(edge))
    c_plus = _image_in(base, t, gog.image_at_end(edge))
    phi = Monomorphism(c_minus, c_plus, _values_in(gog, base, t, images_end))
    logger.debug("Split along non-tree edge", edge=edge)
    return HnnPresentation(base, c_minus, c_plus, phi, gog.stable(edge), edge=edge, check=False)


@dataclass
class MinimalizationStep:
    """A collapsed tree edge and the rewriting of the removed vertex's generators."""

    edge: str
    removed: str
    kept: str
    images: Dict[GeneratorId, Word] = field(default_factory=dict)


def _collapsible(gog: GraphOfGroups, dec: Decomposition) -> Optional[Tuple[str, str]]:
    """(edge, arrow) of a tree edge whose image at the arrow's end is a whole vertex group."""
    for e in dec.order:
        if e not in dec.tree:
            continue
        for arrow in (e, Graph.reverse(e)):
            end = gog.graph.terminus(arrow)
            if gog.vertex_group(end).is_whole(gog.image_at_end(arrow)):
                return e, arrow
    return None


def make_minimal(
    gog: GraphOfGroups, dec: Decomposition
) -> Tuple[GraphOfGroups, Decomposition, List[MinimalizationStep]]:
    """Collapse tree edges whose group equals a whole endpoint group."""
    steps: List[MinimalizationStep] = []
    while True:
        found = _collapsible(gog, dec)
        if found is None:
            break
        edge, arrow = found
        kept, removed = gog.graph.origin(arrow), gog.graph.terminus(arrow)
        into_kept = gog.transfer(Graph.reverse(arrow))
        removed_group = gog.vertex_group(removed)
        kept_group = gog.vertex_group(kept)
        images = {
            removed_group.generator_id(i): kept_group.to_word(into_kept.apply(removed_group.letter_value(i)))
            for i in removed_group.generator_indices()
        }
        steps.append(MinimalizationStep(edge, removed, kept, images))
        edges: Dict[str, Tuple[str, str]] = {}
        edge_groups: Dict[str, EdgeGroup] = {}
        for e, (o, t) in gog.graph.edges.items():
            if e == edge:
                continue
            group = gog.edge_groups[e]
            phi_minus, phi_plus = group.phi_minus, group.phi_plus
            if o == removed:
                o, phi_minus = kept, phi_minus.compose(into_kept)
            if t == removed:
                t, phi_plus = kept, phi_plus.compose(into_kept)
            edges[e] = (o, t)
            edge_groups[e] = EdgeGroup(group.oracle, phi_minus, phi_plus)
        vertices = [v for v in gog.graph.vertices if v != removed]
        gog = GraphOfGroups(
            Graph(vertices, edges),
            {v: gog.vertex_groups[v] for v in vertices},
            edge_groups,
        )
        dec = Decomposition(dec.tree - {edge}, tuple(e for e in dec.order if e != edge))
        logger.debug("Collapsed tree edge", edge=edge, removed=removed, kept=kept)
    return gog, dec, steps


def translate_word(word: Word, steps: Sequence[MinimalizationStep]) -> Word:
    """Rewrite a word over the original generators into the minimal graph's generators."""
    for step in steps:
        letters: List[Letter] = []
        for letter in word:
            image = step.images.get(letter.gen)
            if image is None:
                letters.append(letter)
            else:
                letters.extend((image if letter.exp > 0 else invert(image)).letters)
        word = Word(tuple(letters))
    return word
