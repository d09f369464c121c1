"""Trajets and circuits between vertex-group elements.

A trajet from u at s_0 to v at s_n follows arrows a_1 .. a_n. Each arrow
carries c_i^- in the origin image of a_i and its transfer c_i^+ in the end
image, and the vertex elements h_0 .. h_n satisfy

    u = h_0 c_1^- h_0^-1,  c_i^+ = h_i c_{i+1}^- h_i^-1,  c_n^+ = h_n v h_n^-1

(u = h_0 v h_0^-1 when the path is empty). Its label h_0 t_1 h_1 .. t_n h_n
conjugates v to u in the fundamental group.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import structlog
from pydantic import BaseModel

from .backends import Capability, Element, GroupOracle
from .config import DEFAULT_TRAJET_MAX_STATES
from .gog import Decomposition, Graph, GraphOfGroups
from .types import BassSerreError, CapabilityError, CentralizerCase, CentralizerReport, Verdict, WitnessError
from .words import Word, format_word, product

logger = structlog.get_logger(__name__)


class TrajetCheck(BaseModel):
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Trajet:
    """Trajet from u at ``start`` to v at ``end``."""

    u: Element
    v: Element
    start: str
    end: str
    path: Tuple[str, ...] = ()
    c_minus: Tuple[Element, ...] = ()
    c_plus: Tuple[Element, ...] = ()
    h: Tuple[Element, ...] = ()

    @property
    def length(self) -> int:
        return len(self.path)

    @property
    def is_circuit(self) -> bool:
        return self.start == self.end and self.u == self.v

    def vertices(self, gog: GraphOfGroups) -> List[str]:
        return [self.start] + [gog.graph.terminus(a) for a in self.path]

    def verify(self, gog: GraphOfGroups) -> TrajetCheck:
        graph = gog.graph
        n = len(self.path)
        if len(self.c_minus) != n or len(self.c_plus) != n or len(self.h) != n + 1:
            return TrajetCheck(ok=False, reason="element lists do not match the path length")
        at = self.start
        for i, arrow in enumerate(self.path):
            if Graph.edge_of(arrow) not in graph.edges:
                return TrajetCheck(ok=False, reason=f"unknown arrow {arrow}")
            if graph.origin(arrow) != at:
                return TrajetCheck(ok=False, reason=f"arrow {arrow} does not start at {at}")
            at = graph.terminus(arrow)
        if at != self.end:
            return TrajetCheck(ok=False, reason=f"path ends at {at}, not {self.end}")
        vertices = self.vertices(gog)
        try:
            for i, arrow in enumerate(self.path):
                if not gog.image_at_origin(arrow).contains(self.c_minus[i]):
                    return TrajetCheck(ok=False, reason=f"c{i + 1}- is outside the edge image of {arrow}")
                group = gog.vertex_group(vertices[i + 1])
                if not group.eq(gog.transfer(arrow).apply(self.c_minus[i]), self.c_plus[i]):
                    return TrajetCheck(ok=False, reason=f"c{i + 1}+ is not the transfer of c{i + 1}-")
            lefts = [self.u] + list(self.c_plus)
            rights = list(self.c_minus) + [self.v]
            for i, (left, right) in enumerate(zip(lefts, rights)):
                group = gog.vertex_group(vertices[i])
                if not group.eq(left, group.conjugate(self.h[i], right)):
                    return TrajetCheck(ok=False, reason=f"conjugation by h{i} fails at {vertices[i]}")
        except BassSerreError as exc:
            return TrajetCheck(ok=False, reason=exc.message)
        return TrajetCheck(ok=True)

    def tokens(self) -> List[Tuple[str, object]]:
        tokens: List[Tuple[str, object]] = [("e", self.h[0])]
        for arrow, x in zip(self.path, self.h[1:]):
            tokens += [("a", arrow), ("e", x)]
        return tokens

    def label(self, gog: GraphOfGroups, dec: Decomposition) -> Word:
        vertices = self.vertices(gog)
        parts = [gog.vertex_group(vertices[0]).to_word(self.h[0])]
        for i, arrow in enumerate(self.path):
            parts.append(gog.stable_word(arrow, dec))
            parts.append(gog.vertex_group(vertices[i + 1]).to_word(self.h[i + 1]))
        return product(parts)

    def label_element(self, oracle: GroupOracle) -> Element:
        """The label as an element of a fundamental-group oracle."""
        return oracle.path_lacet(self.start, self.tokens(), self.end)  # type: ignore[attr-defined]

    def product(self, other: "Trajet", gog: GraphOfGroups) -> "Trajet":
        """This trajet followed by ``other``; labels multiply."""
        if self.end != other.start or not gog.vertex_group(self.end).eq(self.v, other.u):
            raise BassSerreError("TRAJET_MISMATCH", "trajets do not compose")
        middle = gog.vertex_group(self.end).mul(self.h[-1], other.h[0])
        return Trajet(
            self.u,
            other.v,
            self.start,
            other.end,
            self.path + other.path,
            self.c_minus + other.c_minus,
            self.c_plus + other.c_plus,
            self.h[:-1] + (middle,) + other.h[1:],
        )

    def inverse(self, gog: GraphOfGroups) -> "Trajet":
        vertices = self.vertices(gog)
        h = tuple(gog.vertex_group(w).inv(x) for w, x in zip(reversed(vertices), reversed(self.h)))
        return Trajet(
            self.v,
            self.u,
            self.end,
            self.start,
            tuple(Graph.reverse(a) for a in reversed(self.path)),
            tuple(reversed(self.c_plus)),
            tuple(reversed(self.c_minus)),
            h,
        )


@dataclass
class TrajetSearch:
    """Outcome of a trajet or circuit search."""

    verdict: Verdict
    trajet: Optional[Trajet] = None
    reason: Optional[str] = None
    states: int = 0

    def __bool__(self) -> bool:
        return self.verdict == Verdict.YES


def _tree_arrows(gog: GraphOfGroups, dec: Decomposition, s1: str, s2: str) -> List[str]:
    tree = gog.graph.nx_graph(edges=dec.tree)
    nodes = nx.shortest_path(tree, s1, s2)
    arrows = []
    for a, b in zip(nodes, nodes[1:]):
        e = min(tree[a][b])
        arrows.append(e if gog.graph.origin(e) == a else Graph.reverse(e))
    return arrows


def tree_trajet(gog: GraphOfGroups, dec: Decomposition, u: Element, s1: str, s2: str) -> Optional[Trajet]:
    """The all-identity trajet along the tree path, when u survives every edge image on it."""
    x = u
    c_minus: List[Element] = []
    c_plus: List[Element] = []
    arrows = _tree_arrows(gog, dec, s1, s2)
    for arrow in arrows:
        if not gog.image_at_origin(arrow).contains(x):
            return None
        c_minus.append(x)
        x = gog.transfer(arrow).apply(x)
        c_plus.append(x)
    h = tuple(gog.vertex_group(w).identity for w in [s1] + [gog.graph.terminus(a) for a in arrows])
    return Trajet(u, x, s1, s2, tuple(arrows), tuple(c_minus), tuple(c_plus), h)


def circuit_along(gog: GraphOfGroups, oracle: GroupOracle, x: Element, s: str, y: Element) -> Optional[Trajet]:
    """The circuit at x@s whose label is y, read off the reduced path of y at s.

    None when x does not survive the path or the result fails to verify.
    """
    lacet = oracle.rebase(y, s)  # type: ignore[attr-defined]
    vertices = [s] + [gog.graph.terminus(a) for a in lacet.arrows]
    c_minus: List[Element] = []
    c_plus: List[Element] = []
    current = x
    try:
        for i, arrow in enumerate(lacet.arrows):
            group = gog.vertex_group(vertices[i])
            c = group.conjugate(group.inv(lacet.elements[i]), current)
            if not gog.image_at_origin(arrow).contains(c):
                return None
            c_minus.append(c)
            current = gog.transfer(arrow).apply(c)
            c_plus.append(current)
        group = gog.vertex_group(s)
        if not group.eq(group.conjugate(group.inv(lacet.elements[-1]), current), x):
            return None
    except BassSerreError as exc:
        logger.debug("Circuit transport failed", vertex=s, reason=exc.message)
        return None
    circuit = Trajet(x, x, s, s, tuple(lacet.arrows), tuple(c_minus), tuple(c_plus), tuple(lacet.elements))
    if not circuit.verify(gog) or not oracle.eq(circuit.label_element(oracle), y):
        return None
    return circuit


@dataclass
class _Step:
    """Transition into a state: previous state, h, arrow and c^-."""

    parent: Tuple[str, Element]
    h: Element
    arrow: str
    c: Element


@dataclass
class _Orbit:
    """States reachable from (s, u) by transport, with BFS-tree parents."""

    start: Tuple[str, Element]
    parents: Dict[Tuple[str, Element], Optional[_Step]] = field(default_factory=dict)
    chords: List[Tuple[Tuple[str, Element], _Step]] = field(default_factory=list)
    complete: bool = True
    reason: Optional[str] = None


def _transitions(gog: GraphOfGroups, state: Tuple[str, Element]) -> Tuple[List[Tuple[Tuple[str, Element], _Step]], bool]:
    w, x = state
    group = gog.vertex_group(w)
    moves = []
    exhaustive = True
    for arrow in gog.graph.arrows_at(w):
        found = group.conjugators_into(x, gog.image_at_origin(arrow))
        exhaustive = exhaustive and found.exhaustive
        for h, c in found.pairs:
            target = (gog.graph.terminus(arrow), gog.transfer(arrow).apply(c))
            moves.append((target, _Step(state, h, arrow, c)))
    return moves, exhaustive


def _explore(
    gog: GraphOfGroups,
    start: Tuple[str, Element],
    max_states: int,
    goal: Optional[Tuple[str, Element]] = None,
) -> Tuple[_Orbit, Optional[Tuple[Tuple[str, Element], Element]]]:
    orbit = _Orbit(start, {start: None})
    queue = deque([start])
    while queue:
        state = queue.popleft()
        if goal is not None and state[0] == goal[0]:
            h = gog.vertex_group(state[0]).conjugacy_search(state[1], goal[1])
            if h is not None:
                return orbit, (state, h)
        try:
            moves, exhaustive = _transitions(gog, state)
        except CapabilityError as exc:
            orbit.complete = False
            orbit.reason = exc.message
            continue
        if not exhaustive:
            orbit.complete = False
            orbit.reason = "conjugator enumeration into an edge image is not exhaustive"
        for target, step in moves:
            if target in orbit.parents:
                orbit.chords.append((target, step))
                continue
            if len(orbit.parents) >= max_states:
                orbit.complete = False
                orbit.reason = f"state budget of {max_states} exhausted"
                continue
            orbit.parents[target] = step
            queue.append(target)
    return orbit, None


def _chain(orbit: _Orbit, state: Tuple[str, Element]) -> List[_Step]:
    steps: List[_Step] = []
    step = orbit.parents[state]
    while step is not None:
        steps.append(step)
        step = orbit.parents[step.parent]
    steps.reverse()
    return steps


def _trajet_from_chain(
    gog: GraphOfGroups, start: Tuple[str, Element], steps: Sequence[_Step], end: Tuple[str, Element], v: Element, last: Element
) -> Trajet:
    return Trajet(
        start[1],
        v,
        start[0],
        end[0],
        tuple(s.arrow for s in steps),
        tuple(s.c for s in steps),
        tuple(gog.transfer(s.arrow).apply(s.c) for s in steps),
        tuple(s.h for s in steps) + (last,),
    )


def find_trajet(
    gog: GraphOfGroups,
    dec: Decomposition,
    u: Element,
    s1: str,
    v: Element,
    s2: str,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> TrajetSearch:
    """Search for a trajet from u at s1 to v at s2 by breadth-first transport."""
    start = (s1, u)
    try:
        orbit, hit = _explore(gog, start, max_states, goal=(s2, v))
    except CapabilityError as exc:
        logger.info("Trajet search undecided", reason=exc.message)
        return TrajetSearch(Verdict.UNKNOWN, reason=exc.message)
    if hit is None:
        if orbit.complete:
            logger.debug("No trajet", source=s1, target=s2, states=len(orbit.parents))
            return TrajetSearch(Verdict.NO, reason="state space exhausted", states=len(orbit.parents))
        logger.info("Trajet search undecided", reason=orbit.reason)
        return TrajetSearch(Verdict.UNKNOWN, reason=orbit.reason, states=len(orbit.parents))
    state, h = hit
    trajet = _trajet_from_chain(gog, start, _chain(orbit, state), state, v, h)
    check = trajet.verify(gog)
    if not check:
        raise WitnessError(f"found trajet fails verification: {check.reason}")
    logger.debug("Trajet found", source=s1, target=s2, length=trajet.length)
    return TrajetSearch(Verdict.YES, trajet, states=len(orbit.parents))


def centralizer_circuits(
    gog: GraphOfGroups,
    dec: Decomposition,
    u: Element,
    s: str,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> CentralizerReport:
    """Generators of Z(u) in the fundamental group, read off the circuits at u."""
    oracle = gog.pi1(dec)
    start = (s, u)
    orbit, _ = _explore(gog, start, max_states)
    if not orbit.complete:
        logger.info("Circuit centralizer undecided", reason=orbit.reason)
        return CentralizerReport(case=CentralizerCase.UNKNOWN, vertex=s)
    labels: Dict[Tuple[str, Element], Trajet] = {}
    for state in orbit.parents:
        labels[state] = _trajet_from_chain(
            gog, start, _chain(orbit, state), state, state[1], gog.vertex_group(state[0]).identity
        )
    candidates: List[Element] = []
    for state, trajet in labels.items():
        w, x = state
        label = trajet.label_element(oracle)
        for z in gog.vertex_group(w).centralizer_gens(x):
            candidates.append(oracle.conjugate(label, oracle.embed(w, z)))  # type: ignore[attr-defined]
    for target, step in orbit.chords:
        source = labels[step.parent]
        closing = oracle.path_lacet(step.parent[0], [("e", step.h), ("a", step.arrow)], target[0])  # type: ignore[attr-defined]
        loop = oracle.mul(oracle.mul(source.label_element(oracle), closing), oracle.inv(labels[target].label_element(oracle)))
        candidates.append(loop)
    image = oracle.embed(s, u)  # type: ignore[attr-defined]
    generators: List[Word] = []
    seen = set()
    for g in candidates:
        if oracle.is_identity(g) or g in seen:
            continue
        if not oracle.commutes(g, image):
            raise WitnessError("circuit label does not commute with the element")
        seen.add(g)
        seen.add(oracle.inv(g))
        generators.append(oracle.to_word(g))
    logger.debug("Circuit centralizer", vertex=s, generators=len(generators), states=len(orbit.parents))
    return CentralizerReport(case=CentralizerCase.CIRCUITS, generators=generators, vertex=s)


def reducible_windows(gog: GraphOfGroups, t: Trajet) -> List[int]:
    """Indices i with path[i+1] = -path[i] and h[i+1] in the end image of path[i]."""
    windows = []
    for i in range(len(t.path) - 1):
        arrow = t.path[i]
        if t.path[i + 1] == Graph.reverse(arrow) and gog.image_at_end(arrow).contains(t.h[i + 1]):
            windows.append(i)
    return windows


def reduce_window(gog: GraphOfGroups, t: Trajet, i: int) -> Trajet:
    """Fold a y -a into the element transfer(-a)(y) at the origin of a."""
    arrow = t.path[i]
    group = gog.vertex_group(gog.graph.origin(arrow))
    folded = gog.transfer(Graph.reverse(arrow)).apply(t.h[i + 1])
    merged = group.mul(group.mul(t.h[i], folded), t.h[i + 2])
    return Trajet(
        t.u,
        t.v,
        t.start,
        t.end,
        t.path[:i] + t.path[i + 2:],
        t.c_minus[:i] + t.c_minus[i + 2:],
        t.c_plus[:i] + t.c_plus[i + 2:],
        t.h[:i] + (merged,) + t.h[i + 3:],
    )


def reduce_trajet(gog: GraphOfGroups, t: Trajet) -> Trajet:
    while True:
        windows = reducible_windows(gog, t)
        if not windows:
            return t
        t = reduce_window(gog, t, windows[0])


def _escaping_conjugators(
    group: GroupOracle, x: Element, c: Element, first: Element, avoid
) -> Tuple[Optional[Element], bool]:
    """Some h with x = h c h^-1 outside ``avoid``, and whether the search was exhaustive."""
    if not avoid.contains(first):
        return first, True
    if Capability.ENUMERATE not in group.capabilities:
        return None, False
    for h in group.elements():
        if group.eq(group.conjugate(h, c), x) and not avoid.contains(h):
            return h, True
    return None, True


def is_sans_circuit(
    gog: GraphOfGroups, dec: Decomposition, max_states: int = DEFAULT_TRAJET_MAX_STATES
) -> TrajetSearch:
    """YES when every reduced circuit at a nontrivial element is trivial; NO carries a witness."""
    graph = gog.graph
    complete = True
    reason: Optional[str] = None
    explored = 0
    for beta in graph.arrows():
        image = gog.image_at_origin(beta)
        try:
            if not image.is_finite():
                return TrajetSearch(Verdict.UNKNOWN, reason=f"edge image of {beta} is infinite")
            starts = [c for c in image.elements() if not image.ambient.is_identity(c)]
        except CapabilityError as exc:
            return TrajetSearch(Verdict.UNKNOWN, reason=exc.message)
        s = graph.origin(beta)
        for c0 in starts:
            witness, done, count = _circuit_from(gog, s, c0, beta, max_states)
            explored += count
            if witness is not None:
                check = witness.verify(gog)
                if not check or reducible_windows(gog, witness):
                    raise WitnessError(f"circuit witness is invalid: {check.reason or 'reducible'}")
                logger.debug("Nontrivial reduced circuit", vertex=s, length=witness.length)
                return TrajetSearch(Verdict.NO, witness, states=explored)
            if not done:
                complete = False
                reason = f"circuit search from {beta} did not exhaust its states"
    if not complete:
        logger.info("Sans-circuit test undecided", reason=reason)
        return TrajetSearch(Verdict.UNKNOWN, reason=reason, states=explored)
    return TrajetSearch(Verdict.YES, states=explored)


_State = Tuple[str, Element, str]


def _circuit_from(
    gog: GraphOfGroups, s: str, c0: Element, beta: str, max_states: int
) -> Tuple[Optional[Trajet], bool, int]:
    """Search reduced circuits at c0 that leave s along beta with h_0 = 1."""
    graph = gog.graph
    first = (graph.terminus(beta), gog.transfer(beta).apply(c0), beta)
    parents: Dict[_State, Optional[Tuple[_State, Element, str, Element]]] = {first: None}
    queue = deque([first])
    done = True
    while queue:
        state = queue.popleft()
        w, x, incoming = state
        group = gog.vertex_group(w)
        if w == s:
            h_last = group.conjugacy_search(x, c0)
            if h_last is not None:
                steps = []
                cursor: Optional[_State] = state
                while cursor is not None and parents[cursor] is not None:
                    previous, h, arrow, c = parents[cursor]  # type: ignore[misc]
                    steps.append((h, arrow, c))
                    cursor = previous
                steps.reverse()
                path = (beta,) + tuple(a for _, a, _ in steps)
                cm = (c0,) + tuple(c for _, _, c in steps)
                cp = tuple(gog.transfer(a).apply(c) for a, c in zip(path, cm))
                hs = (gog.vertex_group(s).identity,) + tuple(h for h, _, _ in steps) + (h_last,)
                return Trajet(c0, c0, s, s, path, cm, cp, hs), True, len(parents)
        try:
            for arrow in graph.arrows_at(w):
                found = group.conjugators_into(x, gog.image_at_origin(arrow))
                done = done and found.exhaustive
                for h, c in found.pairs:
                    if arrow == Graph.reverse(incoming):
                        h, exhaustive = _escaping_conjugators(group, x, c, h, gog.image_at_end(incoming))
                        done = done and exhaustive
                        if h is None:
                            continue
                    target = (graph.terminus(arrow), gog.transfer(arrow).apply(c), arrow)
                    if target in parents:
                        continue
                    if len(parents) >= max_states:
                        done = False
                        continue
                    parents[target] = (state, h, arrow, c)
                    queue.append(target)
        except CapabilityError:
            done = False
    return None, done, len(parents)


def format_trajet(gog: GraphOfGroups, t: Trajet) -> List[str]:
    """Arrow notation, one line per vertex element and per crossed arrow."""
    vertices = t.vertices(gog)

    def show(vertex: str, x: Element) -> str:
        return format_word(gog.vertex_group(vertex).to_word(x))

    lines = [f"TRAJET: {show(t.start, t.u)}@{t.start} -> {show(t.end, t.v)}@{t.end}"]
    lines.append(f"  h0: {show(vertices[0], t.h[0])}")
    for i, arrow in enumerate(t.path):
        lines.append(
            f"  {arrow}: {show(vertices[i], t.c_minus[i])} -> {show(vertices[i + 1], t.c_plus[i])}"
        )
        lines.append(f"  h{i + 1}: {show(vertices[i + 1], t.h[i + 1])}")
    return lines
