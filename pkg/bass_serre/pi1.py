"""Fundamental group of a connected subgraph of groups, as reduced lacets.

A lacet is a closed path g0 a1 g1 ... an gn at the base vertex with g_i in the
vertex group at its position. Backtracks a y -a with y in the end image of a
are folded away, and every g_i before an arrow is a canonical coset
representative of the origin image of that arrow, so equal elements have equal
lacets.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import structlog
from sympy import divisors

from .backends import Capability, Element, GroupOracle, Subgroup
from .config import DEFAULT_CONJUGACY_DEPTH
from .types import BassSerreError, CapabilityError, ForeignElementError, GogValidationError
from .words import GeneratorId, Scope, Word, product

if TYPE_CHECKING:
    from .gog import Decomposition, GraphOfGroups

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Lacet:
    """Path g0 a1 g1 ... an gn starting at ``start``."""

    start: str
    elements: Tuple[Element, ...]
    arrows: Tuple[str, ...] = ()


Token = Tuple[str, object]


class _LacetBuilder:
    def __init__(self, oracle: "GraphGroupOracle", start: str):
        self.oracle = oracle
        self.vertices = [start]
        self.elements: List[Element] = [oracle.vertex_group(start).identity]
        self.arrows: List[str] = []

    def push_element(self, x: Element) -> None:
        group = self.oracle.vertex_group(self.vertices[-1])
        self.elements[-1] = group.mul(self.elements[-1], x)

    def push_arrow(self, arrow: str) -> None:
        gog = self.oracle.gog
        if gog.graph.origin(arrow) != self.vertices[-1]:
            raise ForeignElementError(f"arrow {arrow} does not start at {self.vertices[-1]}")
        if self.arrows and self.arrows[-1] == gog.graph.reverse(arrow):
            previous = self.arrows[-1]
            y = self.elements[-1]
            end_image = gog.image_at_end(previous)
            if end_image.ambient.subgroup_contains(end_image, y) is not None:
                self.arrows.pop()
                self.elements.pop()
                self.vertices.pop()
                self.push_element(gog.transfer(arrow).apply(y))
                return
        self.arrows.append(arrow)
        self.vertices.append(gog.graph.terminus(arrow))
        self.elements.append(self.oracle.vertex_group(self.vertices[-1]).identity)

    def extend(self, tokens: Iterable[Token]) -> "_LacetBuilder":
        for kind, value in tokens:
            if kind == "a":
                self.push_arrow(value)  # type: ignore[arg-type]
            else:
                self.push_element(value)
        return self

    def lacet(self) -> Lacet:
        gog = self.oracle.gog
        elements = list(self.elements)
        for i, arrow in enumerate(self.arrows):
            group = self.oracle.vertex_group(self.vertices[i])
            rep, h = group.decompose(gog.image_at_origin(arrow), elements[i])
            elements[i] = rep
            following = self.oracle.vertex_group(self.vertices[i + 1])
            elements[i + 1] = following.mul(gog.transfer(arrow).apply(h), elements[i + 1])
        return Lacet(self.vertices[0], tuple(elements), tuple(self.arrows))


def _tokens(lacet: Lacet) -> List[Token]:
    tokens: List[Token] = [("e", lacet.elements[0])]
    for arrow, x in zip(lacet.arrows, lacet.elements[1:]):
        tokens.append(("a", arrow))
        tokens.append(("e", x))
    return tokens


class GraphGroupOracle(GroupOracle):
    """pi_1 of the subgraph (vertices, edges) based at its least vertex."""

    kind = "graph"
    capabilities = Capability.SUBGROUP_MEMBERSHIP | Capability.TRANSVERSAL

    def __init__(
        self,
        gog: "GraphOfGroups",
        dec: "Decomposition",
        vertices: Optional[Iterable[str]] = None,
        edges: Optional[Iterable[str]] = None,
        base: Optional[str] = None,
    ):
        self.gog = gog
        self.dec = dec
        self.vertices: Tuple[str, ...] = tuple(sorted(vertices if vertices is not None else gog.graph.vertices))
        self.edges: FrozenSet[str] = frozenset(edges if edges is not None else gog.graph.edges)
        super().__init__(owner="{" + ",".join(self.vertices) + "}", scope=Scope.VERTEX)
        if not gog.graph.is_connected(self.vertices, self.edges):
            raise GogValidationError("subgraph is disconnected", [self.owner])
        self.base = base or self.vertices[0]
        self.tree = self._subgraph_tree()
        self._tree_graph = nx.Graph()
        self._tree_graph.add_nodes_from(self.vertices)
        for e in sorted(self.tree):
            o, t = gog.graph.edges[e]
            self._tree_graph.add_edge(o, t, edge=e)
        self._paths: Dict[str, Tuple[str, ...]] = {}

    def _subgraph_tree(self) -> FrozenSet[str]:
        """Decomposition tree edges inside the subgraph, completed by least id."""
        parent = {v: v for v in self.vertices}

        def find(v: str) -> str:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        chosen = []
        candidates = sorted(self.edges, key=lambda e: (e not in self.dec.tree, e))
        for e in candidates:
            o, t = self.gog.graph.edges[e]
            ro, rt = find(o), find(t)
            if ro != rt:
                parent[ro] = rt
                chosen.append(e)
        return frozenset(chosen)

    def vertex_group(self, v: str) -> GroupOracle:
        return self.gog.vertex_group(v)

    def tree_path(self, v: str) -> Tuple[str, ...]:
        """Arrows of the tree path from the base vertex to v."""
        if v not in self._paths:
            nodes = nx.shortest_path(self._tree_graph, self.base, v)
            arrows = []
            for a, b in zip(nodes, nodes[1:]):
                e = self._tree_graph[a][b]["edge"]
                arrows.append(e if self.gog.graph.origin(e) == a else self.gog.graph.reverse(e))
            self._paths[v] = tuple(arrows)
        return self._paths[v]

    def _back_path(self, v: str) -> List[Token]:
        return [("a", self.gog.graph.reverse(a)) for a in reversed(self.tree_path(v))]

    def _build(self, tokens: Iterable[Token], start: Optional[str] = None) -> Lacet:
        return _LacetBuilder(self, start or self.base).extend(tokens).lacet()

    # group structure

    @property
    def identity(self) -> Lacet:
        return Lacet(self.base, (self.vertex_group(self.base).identity,))

    def mul(self, g: Element, h: Element) -> Lacet:
        return self._build(_tokens(g) + _tokens(h), g.start)  # type: ignore[attr-defined]

    def inv(self, g: Element) -> Lacet:
        lacet: Lacet = g  # type: ignore[assignment]
        vertices = self.path_vertices(lacet)
        tokens: List[Token] = []
        for i in range(len(lacet.elements) - 1, -1, -1):
            tokens.append(("e", self.vertex_group(vertices[i]).inv(lacet.elements[i])))
            if i:
                tokens.append(("a", self.gog.graph.reverse(lacet.arrows[i - 1])))
        return self._build(tokens, vertices[-1])

    def path_vertices(self, lacet: Lacet) -> List[str]:
        vertices = [lacet.start]
        for a in lacet.arrows:
            vertices.append(self.gog.graph.terminus(a))
        return vertices

    def embed(self, v: str, x: Element) -> Lacet:
        """iota_v(x): the tree path to v, x, and back."""
        tokens: List[Token] = [("a", a) for a in self.tree_path(v)] + [("e", x)] + self._back_path(v)
        return self._build(tokens)

    def stable_lacet(self, arrow: str) -> Lacet:
        o, t = self.gog.graph.origin(arrow), self.gog.graph.terminus(arrow)
        tokens = [("a", a) for a in self.tree_path(o)] + [("a", arrow)] + self._back_path(t)
        return self._build(tokens)

    def rebase(self, g: Element, v: str) -> Lacet:
        """The closed path at v corresponding to g."""
        tokens = self._back_path(v) + _tokens(g) + [("a", a) for a in self.tree_path(v)]  # type: ignore[arg-type]
        return self._build(tokens, v)

    def unbase(self, path: Lacet) -> Lacet:
        """Inverse of rebase: a closed path at v read as a based lacet."""
        tokens = [("a", a) for a in self.tree_path(path.start)] + _tokens(path) + self._back_path(path.start)
        return self._build(tokens)

    def path_lacet(self, start: str, tokens: Sequence[Token], end: str) -> Lacet:
        """tau_start . path . tau_end^-1 for an open path from start to end."""
        full = [("a", a) for a in self.tree_path(start)] + list(tokens) + self._back_path(end)
        return self._build(full)

    # words

    def owns(self, gen: GeneratorId) -> bool:
        if gen.scope == Scope.VERTEX:
            return gen.owner in self.vertices
        if gen.scope == Scope.STABLE:
            return gen.owner in self.edges
        return False

    def evaluate(self, word: Word) -> Lacet:
        tokens: List[Token] = []
        for letter in word:
            gen = letter.gen
            if gen.scope == Scope.VERTEX and gen.owner in self.vertices:
                group = self.vertex_group(gen.owner)
                value = group.letter_value(gen.index)
                tokens += [("a", a) for a in self.tree_path(gen.owner)]
                tokens.append(("e", value if letter.exp > 0 else group.inv(value)))
                tokens += self._back_path(gen.owner)
            elif gen.scope == Scope.STABLE and gen.owner in self.edges:
                arrow = gen.owner if letter.exp > 0 else self.gog.graph.reverse(gen.owner)
                o, t = self.gog.graph.origin(arrow), self.gog.graph.terminus(arrow)
                tokens += [("a", a) for a in self.tree_path(o)] + [("a", arrow)] + self._back_path(t)
            else:
                raise ForeignElementError(
                    f"letter {gen} does not belong to {self.owner}", details={"letter": str(gen)}
                )
        return self._build(tokens)

    def to_word(self, g: Element) -> Word:
        lacet: Lacet = g  # type: ignore[assignment]
        vertices = self.path_vertices(lacet)
        parts = [self.vertex_group(vertices[0]).to_word(lacet.elements[0])]
        for i, arrow in enumerate(lacet.arrows):
            if self.gog.graph.edge_of(arrow) not in self.tree:
                parts.append(Word.of(self.gog.stable(arrow), self.gog.graph.sign(arrow)))
            parts.append(self.vertex_group(vertices[i + 1]).to_word(lacet.elements[i + 1]))
        return product(parts)

    def generator_words(self) -> List[Word]:
        words: List[Word] = []
        for v in self.vertices:
            words.extend(self.vertex_group(v).generator_words())
        words.extend(Word.of(self.gog.stable(e)) for e in sorted(self.edges) if e not in self.tree)
        return words

    def generators(self) -> List[Element]:
        return [self.evaluate(w) for w in self.generator_words()]

    def generator_indices(self) -> List[int]:
        return list(range(len(self.generator_words())))

    def letter_value(self, index: int) -> Lacet:
        return self.evaluate(self.generator_words()[index])

    def presentation_relators(self) -> List[Word]:
        relators: List[Word] = []
        for v in self.vertices:
            relators.extend(self.vertex_group(v).presentation_relators())
        return relators

    # vertex subgroups

    def vertex_subgroup(self, v: str, K: Subgroup) -> Subgroup:
        return Subgroup(self, [self.embed(v, k) for k in K.gens], data=(v, K))

    def _vertex_data(self, H: Subgroup) -> Tuple[str, Subgroup]:
        if H.data is None:
            raise CapabilityError(
                f"{self.owner} decides membership only in conjugates of vertex subgroups",
                capability="SUBGROUP_MEMBERSHIP",
            )
        return H.data

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        if H.whole:
            return None if g is None else Word()
        v, K = self._vertex_data(H)
        path = self.rebase(g, v)
        if path.arrows:
            return None
        return K.ambient.subgroup_contains(K, path.elements[0])

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        v, K = self._vertex_data(H)
        return K.is_finite()

    def subgroup_elements(self, H: Subgroup) -> List[Element]:
        v, K = self._vertex_data(H)
        return [self.embed(v, k) for k in K.elements()]

    def subgroup_ball(self, H: Subgroup, radius: int) -> List[Element]:
        v, K = self._vertex_data(H)
        return [self.embed(v, k) for k in K.ball(radius)]

    def decompose(self, H: Subgroup, g: Element) -> Tuple[Lacet, Lacet]:
        v, K = self._vertex_data(H)
        path = self.rebase(g, v)
        _, k = K.ambient.decompose(K, path.elements[-1])
        h = self.embed(v, k)
        return self.mul(g, self.inv(h)), h

    def is_whole(self, H: Subgroup) -> bool:
        if H.whole:
            return True
        v, K = self._vertex_data(H)
        return len(self.vertices) == 1 and not self.edges and K.ambient.is_whole(K)

    # hyperbolic geometry

    def cyclic_core(self, g: Element) -> Tuple[Lacet, Lacet]:
        """(core, conj): g = conj . unbase(core) . conj^-1 with core cyclically reduced at its start."""
        graph = self.gog.graph
        conj = self.identity
        core = self.rebase(g, self.base)
        while core.arrows:
            w = core.start
            head = core.elements[0]
            group = self.vertex_group(w)
            if not group.is_identity(head):
                conj = self.mul(conj, self.embed(w, head))
                core = self._build([("e", group.inv(head))] + _tokens(core) + [("e", head)], w)
                continue
            first, last = core.arrows[0], core.arrows[-1]
            end_image = self.gog.image_at_end(last)
            if first == graph.reverse(last) and end_image.ambient.subgroup_contains(end_image, core.elements[-1]) is not None:
                w2 = graph.terminus(first)
                conj = self.mul(conj, self.path_lacet(w, [("a", first)], w2))
                core = self._build([("a", graph.reverse(first))] + _tokens(core) + [("a", first)], w2)
                continue
            break
        return core, conj

    def translation_length(self, g: Element) -> int:
        core, _ = self.cyclic_core(g)
        return len(core.arrows)

    def primitive_root(self, g: Element, depth: int = DEFAULT_CONJUGACY_DEPTH) -> Tuple[Lacet, int]:
        """(W, k) with g = W^k and k the largest exponent found for a hyperbolic g."""
        core, conj = self.cyclic_core(g)
        n = len(core.arrows)
        if not n:
            raise BassSerreError("NOT_HYPERBOLIC", "elements of a vertex group conjugate have no cyclic root")
        w = core.start
        group = self.vertex_group(w)
        for k in sorted(divisors(n), reverse=True):
            m = n // k
            if k == 1 or any(core.arrows[i] != core.arrows[i % m] for i in range(n)):
                continue
            image = self.gog.image_at_origin(core.arrows[0])
            shifts = image.elements() if image.is_finite() else image.ball(depth)
            for c in shifts:
                z = group.mul(core.elements[m], c)
                candidate = self._build(_tokens(Lacet(w, core.elements[:m] + (z,), core.arrows[:m])), w)
                if self._build(_tokens(candidate) * k, w) == core:
                    root = self.mul(self.mul(conj, self.unbase(candidate)), self.inv(conj))
                    return root, k
        return g, 1  # type: ignore[return-value]
