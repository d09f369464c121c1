"""Decision procedures on a whole graph of groups.

Everything here works on words over the canonical presentation and answers
with pydantic reports. Positive answers carry witnesses checked in the
fundamental-group oracle; searches that run out of budget or capability
answer UNKNOWN.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import structlog

from . import amalgam, hnn
from .amalgam import AmalgamPresentation
from .backends import (
    Capability,
    Element,
    FreeAbelianGroup,
    GroupOracle,
    Monomorphism,
    Subgroup,
    greedy_generators,
    is_central,
)
from .config import (
    DEFAULT_BALL_RADIUS,
    DEFAULT_CONJUGACY_DEPTH,
    DEFAULT_OUTER_ORDER_LIMIT,
    DEFAULT_ROOT_K_MAX,
    DEFAULT_TRAJET_MAX_STATES,
)
from .gog import (
    Decomposition,
    EdgeGroup,
    Graph,
    GraphOfGroups,
    Subgraph,
    decompose_edge,
    make_minimal,
    split_subgraph,
    whole_subgraph,
)
from .hnn import HnnPresentation
from .pi1 import GraphGroupOracle
from .trajets import centralizer_circuits, circuit_along, find_trajet, is_sans_circuit, tree_trajet
from .types import (
    BassSerreError,
    CapabilityError,
    CenterCase,
    CenterReport,
    CentralizerCase,
    CentralizerReport,
    CommuteCase,
    CommuteReport,
    ConjugacyResult,
    DoubleAgreement,
    GogValidationError,
    NotCommutingError,
    NotSansCircuitError,
    ReductionTrace,
    RootRecord,
    RootsReport,
    TerminalKind,
    Verdict,
    WitnessError,
)
from .utils import extended_gcd, integer_kernel
from .words import Word, invert, product

logger = structlog.get_logger(__name__)

Split = Union[AmalgamPresentation, HnnPresentation]


def _oracle(gog: GraphOfGroups, dec: Decomposition) -> GraphGroupOracle:
    return gog.pi1(dec)  # type: ignore[return-value]


def _conjugates(oracle: GroupOracle, u: Word, h: Word, v: Word) -> bool:
    """u = h v h^-1 in the oracle."""
    return oracle.eq(oracle.evaluate(u), oracle.conjugate(oracle.evaluate(h), oracle.evaluate(v)))


# successive cyclic reduction


def _split_step(p: Split, word: Word) -> Tuple[Word, Word, int, Optional[str], Element]:
    """Cyclic reduction inside one splitting: (reduced, conjugator, length, piece tag, piece element)."""
    if isinstance(p, AmalgamPresentation):
        reduced, conj = amalgam.cyclically_reduce(p, word)
        nf = p.normal_form(reduced)
        if nf.length > 1:
            return reduced, conj, nf.length, None, None
        if nf.length == 0:
            return reduced, conj, 1, "A", p.factor_a.identity
        tag, x = p.factor_value(nf)
        return reduced, conj, 1, tag, x
    reduced, conj = hnn.cyclically_reduce(p, word)
    nf = p.normal_form(reduced)
    if nf.length > 1:
        return reduced, conj, nf.length, None, None
    return reduced, conj, 1, "BASE", nf.head


def successive_cyclic_reduction(gog: GraphOfGroups, dec: Decomposition, word: Word) -> ReductionTrace:
    """Cyclically reduce along the decomposition order, descending while the element stays elliptic."""
    within = whole_subgraph(gog)
    conjugator = Word()
    current = word
    try:
        while True:
            edges = [e for e in dec.order if e in within.edges]
            if not edges:
                vertex = next(iter(within.vertices))
                trace = ReductionTrace(
                    input=word,
                    conjugator=conjugator,
                    final=current,
                    vertices=sorted(within.vertices),
                    edges=[],
                    kind=TerminalKind.VERTEX,
                    vertex=vertex,
                )
                break
            edge = edges[0]
            p = decompose_edge(gog, dec, edge, within)
            reduced, conj, length, tag, x = _split_step(p, current)
            conjugator = product([conjugator, conj])
            if tag is None:
                trace = ReductionTrace(
                    input=word,
                    conjugator=conjugator,
                    final=reduced,
                    vertices=sorted(within.vertices),
                    edges=sorted(within.edges),
                    kind=TerminalKind.LONG,
                    edge=edge,
                    length=length,
                )
                break
            piece = split_subgraph(gog, dec, edge, within)[tag]
            factor = p.factor(tag) if isinstance(p, AmalgamPresentation) else p.base
            current = factor.to_word(x)
            within = piece
    except CapabilityError as exc:
        logger.info("Successive reduction undecided", reason=exc.message)
        return ReductionTrace(
            input=word,
            conjugator=conjugator,
            final=current,
            vertices=sorted(within.vertices),
            edges=sorted(within.edges),
            kind=TerminalKind.VERTEX,
            verdict=Verdict.UNKNOWN,
            reason=exc.message,
        )
    try:
        if not _conjugates(_oracle(gog, dec), word, trace.conjugator, trace.final):
            raise WitnessError("reduction conjugator does not conjugate the reduced word back")
    except CapabilityError as exc:
        logger.debug("Reduction trace left unchecked", reason=exc.message)
    logger.debug("Successive reduction", kind=trace.kind.value, length=trace.length, vertex=trace.vertex)
    return trace


# conjugacy


def is_conjugate_graph(
    gog: GraphOfGroups,
    dec: Decomposition,
    u: Word,
    v: Word,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> ConjugacyResult:
    """Decide u = h v h^-1 in the fundamental group from the two reduction traces."""
    if u == v:
        return ConjugacyResult(verdict=Verdict.YES, conjugator=Word(), reason="equal words")
    tu = successive_cyclic_reduction(gog, dec, u)
    tv = successive_cyclic_reduction(gog, dec, v)
    if Verdict.UNKNOWN in (tu.verdict, tv.verdict):
        return ConjugacyResult(verdict=Verdict.UNKNOWN, reason=tu.reason or tv.reason)
    if tu.kind != tv.kind:
        return ConjugacyResult(verdict=Verdict.NO, reason="one element is elliptic and the other is not")
    if tu.kind == TerminalKind.VERTEX:
        gu, gv = gog.vertex_group(tu.vertex), gog.vertex_group(tv.vertex)  # type: ignore[arg-type]
        try:
            search = find_trajet(
                gog, dec, gu.evaluate(tu.final), tu.vertex, gv.evaluate(tv.final), tv.vertex, max_states  # type: ignore[arg-type]
            )
        except CapabilityError as exc:
            return ConjugacyResult(verdict=Verdict.UNKNOWN, reason=exc.message)
        if search.verdict != Verdict.YES or search.trajet is None:
            return ConjugacyResult(verdict=search.verdict, reason=search.reason)
        middle = search.trajet.label(gog, dec)
        reason = "trajet between the reduced elements"
    else:
        if (tu.vertices, tu.edges, tu.edge) != (tv.vertices, tv.edges, tv.edge):
            return ConjugacyResult(verdict=Verdict.NO, reason="reductions end in different subgraphs")
        if tu.length != tv.length:
            return ConjugacyResult(verdict=Verdict.NO, reason="cyclically reduced lengths differ")
        within = Subgraph(frozenset(tu.vertices), frozenset(tu.edges))
        p = decompose_edge(gog, dec, tu.edge, within)  # type: ignore[arg-type]
        module = amalgam if isinstance(p, AmalgamPresentation) else hnn
        result = module.is_conjugate(p, tu.final, tv.final, depth, max_states)  # type: ignore[attr-defined]
        if result.verdict != Verdict.YES:
            return result
        middle = result.conjugator
        reason = result.reason or "cyclic conjugacy"
    conjugator = product([tu.conjugator, middle, invert(tv.conjugator)])
    try:
        if not _conjugates(_oracle(gog, dec), u, conjugator, v):
            raise WitnessError("graph conjugator failed verification")
    except CapabilityError as exc:
        logger.debug("Graph conjugator left unchecked", reason=exc.message)
    logger.debug("Graph conjugacy decided", verdict="YES", reason=reason)
    return ConjugacyResult(verdict=Verdict.YES, conjugator=conjugator, reason=reason)


# commutation


def _elliptic_report(
    gog: GraphOfGroups,
    dec: Decomposition,
    oracle: GraphGroupOracle,
    trace: ReductionTrace,
    other: Element,
    swapped: bool,
) -> CommuteReport:
    s = trace.vertex
    group = gog.vertex_group(s)  # type: ignore[arg-type]
    x1 = group.evaluate(trace.final)
    g = oracle.evaluate(trace.conjugator)
    y1 = oracle.mul(oracle.mul(oracle.inv(g), other), g)
    for arrow in gog.graph.arrows_at(s):  # type: ignore[arg-type]
        if group.conjugators_into(x1, gog.image_at_origin(arrow)).pairs:
            circuit = circuit_along(gog, oracle, x1, s, y1)  # type: ignore[arg-type]
            if circuit is None:
                return CommuteReport(
                    case=CommuteCase.UNKNOWN,
                    factor=s,
                    swapped=swapped,
                    reason="no verified circuit carries the conjugated partner",
                )
            return CommuteReport(
                case=CommuteCase.CIRCUIT_LABEL,
                g=trace.conjugator,
                edge_element=trace.final,
                h_prime=oracle.to_word(y1),
                circuit=list(circuit.path),
                factor=s,
                swapped=swapped,
            )
    path = oracle.rebase(y1, s)  # type: ignore[arg-type]
    if path.arrows:
        raise WitnessError("centralizer of an element outside the edge groups left its vertex group")
    return CommuteReport(
        case=CommuteCase.VERTEX_COSET,
        g=trace.conjugator,
        h=trace.final,
        h_prime=group.to_word(path.elements[0]),
        factor=s,
        swapped=swapped,
    )


def _cyclic_report(oracle: GraphGroupOracle, x: Element, y: Element) -> CommuteReport:
    """Common axis of two commuting hyperbolic elements.

    W = x^a y^(sigma b) translates by gcd(|x|, |y|) along the shared axis, so
    h = x W^-j and h' = y W^-k fix it. All three lie in the abelian group <x, y>.
    """
    tx = oracle.translation_length(x)
    ty = oracle.translation_length(y)
    if not tx or not ty:
        return CommuteReport(case=CommuteCase.UNKNOWN, reason="both elements must be hyperbolic")
    sigma = 1 if oracle.translation_length(oracle.mul(x, y)) == tx + ty else -1
    d, a, b = extended_gcd(tx, ty)
    w = oracle.mul(oracle.power(x, a), oracle.power(y, sigma * b))
    j, k = tx // d, sigma * ty // d
    root, m = oracle.primitive_root(w)
    if m > 1 and oracle.eq(oracle.power(root, m), w) and oracle.commutes(root, x) and oracle.commutes(root, y):
        w, j, k = root, j * m, k * m
    h = oracle.mul(x, oracle.power(w, -j))
    h_prime = oracle.mul(y, oracle.power(w, -k))
    if oracle.translation_length(h) or oracle.translation_length(h_prime):
        raise WitnessError("common root leaves a hyperbolic remainder")
    if not all(oracle.commutes(p, q) for p, q in ((h, h_prime), (h, w), (h_prime, w))):
        raise WitnessError("cyclic structure does not commute")
    return CommuteReport(
        case=CommuteCase.CYCLIC_STRUCTURE,
        g=Word(),
        h=oracle.to_word(h),
        h_prime=oracle.to_word(h_prime),
        w=oracle.to_word(w),
        j=j,
        k=k,
    )


def commute_classify_graph(
    gog: GraphOfGroups, dec: Decomposition, x: Word, y: Word, depth: int = DEFAULT_CONJUGACY_DEPTH
) -> CommuteReport:
    """Classify a commuting pair: circuit label, vertex coset, or common cyclic structure."""
    oracle = _oracle(gog, dec)
    try:
        gx, gy = oracle.evaluate(x), oracle.evaluate(y)
        if not oracle.commutes(gx, gy):
            raise NotCommutingError()
        tx = successive_cyclic_reduction(gog, dec, x)
        if tx.verdict == Verdict.YES and tx.kind == TerminalKind.VERTEX:
            return _elliptic_report(gog, dec, oracle, tx, gy, swapped=False)
        ty = successive_cyclic_reduction(gog, dec, y)
        if ty.verdict == Verdict.YES and ty.kind == TerminalKind.VERTEX:
            return _elliptic_report(gog, dec, oracle, ty, gx, swapped=True)
        if Verdict.UNKNOWN in (tx.verdict, ty.verdict):
            return CommuteReport(case=CommuteCase.UNKNOWN, reason=tx.reason or ty.reason)
        return _cyclic_report(oracle, gx, gy)
    except CapabilityError as exc:
        logger.info("Graph commutation undecided", reason=exc.message)
        return CommuteReport(case=CommuteCase.UNKNOWN, reason=exc.message)


# center


def _transport(gog: GraphOfGroups, dec: Decomposition, z: Element, s0: str, s: str) -> Optional[Element]:
    trajet = tree_trajet(gog, dec, z, s0, s)
    return None if trajet is None else trajet.v


def _survives(gog: GraphOfGroups, dec: Decomposition, z: Element, s0: str) -> bool:
    """z lies in every vertex center along the tree and is fixed by every non-tree edge."""
    images = {}
    for s in gog.graph.vertices:
        image = _transport(gog, dec, z, s0, s)
        if image is None or not is_central(gog.vertex_group(s), image):
            return False
        images[s] = image
    for e in dec.order:
        if e in dec.tree:
            continue
        o, t = gog.graph.edges[e]
        if not gog.image_at_origin(e).contains(images[o]):
            return False
        if not gog.vertex_group(t).eq(gog.transfer(e).apply(images[o]), images[t]):
            return False
    return True


def _meet(
    group: FreeAbelianGroup, values: List[Element], lattice: Sequence[Element]
) -> List[Tuple[int, ...]]:
    """Integer combinations x with sum x_i values_i in the lattice."""
    columns = [list(v) for v in values] + [[-a for a in b] for b in lattice]
    rows = [[c[r] for c in columns] for r in range(group.rank)]
    return [tuple(x[: len(values)]) for x in integer_kernel(rows, len(columns))]


def _combine(group: GroupOracle, values: Sequence[Element], x: Sequence[int]) -> Element:
    result = group.identity
    for value, e in zip(values, x):
        result = group.mul(result, group.power(value, e))
    return result


def _abelian_center(gog: GraphOfGroups, dec: Decomposition, s0: str) -> List[Element]:
    """Lattice of z in G_s0 transported through every tree edge and fixed by every non-tree edge."""
    base = gog.vertex_group(s0)
    gens: List[Element] = list(base.generators())
    values = {s0: list(gens)}
    order = [s0]
    tree = gog.graph.nx_graph(edges=dec.tree)
    for a, b, e in _bfs_edges(tree, s0):
        arrow = e if gog.graph.origin(e) == a else Graph.reverse(e)
        group = gog.vertex_group(a)
        kernel = _meet(group, values[a], gog.image_at_origin(arrow).gens)  # type: ignore[arg-type]
        gens = [_combine(base, gens, x) for x in kernel]
        for s in order:
            values[s] = [_combine(gog.vertex_group(s), values[s], x) for x in kernel]
        values[b] = [gog.transfer(arrow).apply(y) for y in values[a]]
        order.append(b)
    for e in dec.order:
        if e in dec.tree:
            continue
        o, t = gog.graph.edges[e]
        kernel = _meet(gog.vertex_group(o), values[o], gog.image_at_origin(e).gens)  # type: ignore[arg-type]
        gens = [_combine(base, gens, x) for x in kernel]
        values = {s: [_combine(gog.vertex_group(s), vs, x) for x in kernel] for s, vs in values.items()}
        target = gog.vertex_group(t)
        diffs = [target.mul(gog.transfer(e).apply(yo), target.inv(yt)) for yo, yt in zip(values[o], values[t])]
        rows = [[d[r] for d in diffs] for r in range(target.rank)]  # type: ignore[attr-defined]
        kernel = list(integer_kernel(rows, len(diffs)))
        gens = [_combine(base, gens, x) for x in kernel]
        values = {s: [_combine(gog.vertex_group(s), vs, x) for x in kernel] for s, vs in values.items()}
    return [g for g in gens if not base.is_identity(g)]


def _bfs_edges(tree, root: str) -> List[Tuple[str, str, str]]:
    seen = {root}
    queue = [root]
    found = []
    while queue:
        a = queue.pop(0)
        for b in sorted(tree[a]):
            if b in seen:
                continue
            e = min(tree[a][b])
            seen.add(b)
            found.append((a, b, e))
            queue.append(b)
    return found


def center_graph(
    gog: GraphOfGroups,
    dec: Decomposition,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    limit: int = DEFAULT_OUTER_ORDER_LIMIT,
) -> CenterReport:
    """Center of the fundamental group, computed on a minimal decomposition."""
    try:
        mgog, mdec, steps = make_minimal(gog, dec)
        vertices = list(mgog.graph.vertices)
        edges = list(mgog.graph.edges)
        if len(vertices) == 1 and not edges:
            group = mgog.vertex_group(vertices[0])
            return CenterReport(
                generators=[group.to_word(z) for z in group.center_gens()], case=CenterCase.SINGLE_VERTEX
            )
        if len(edges) == 1:
            p = decompose_edge(mgog, mdec, edges[0])
            if isinstance(p, HnnPresentation):
                return hnn.center(p, depth, limit)
            return amalgam.center(p)
        s0 = next((v for v in vertices if Capability.ENUMERATE in mgog.vertex_group(v).capabilities), None)
        if s0 is not None:
            group = mgog.vertex_group(s0)
            survivors = [z for z in group.elements() if _survives(mgog, mdec, z, s0)]
            gens = greedy_generators(group, survivors)
        elif all(isinstance(mgog.vertex_group(v), FreeAbelianGroup) for v in vertices):
            s0 = min(vertices)
            group = mgog.vertex_group(s0)
            gens = _abelian_center(mgog, mdec, s0)
        else:
            return CenterReport(
                case=CenterCase.UNKNOWN,
                verdict=Verdict.UNKNOWN,
                reason="vertex centers are neither finite nor free abelian",
            )
    except CapabilityError as exc:
        logger.info("Graph center undecided", reason=exc.message)
        return CenterReport(case=CenterCase.UNKNOWN, verdict=Verdict.UNKNOWN, reason=exc.message)
    words = [group.to_word(z) for z in gens]
    oracle = _oracle(mgog, mdec)
    for w in words:
        z = oracle.evaluate(w)
        if not all(oracle.commutes(z, s) for s in oracle.generators()):
            raise WitnessError("graph center generator is not central")
    logger.debug("Graph center computed", vertex=s0, generators=len(words), collapsed=len(steps))
    return CenterReport(generators=words, case=CenterCase.VERTEX_INTERSECTION)


# sans-circuit structure


def _require_sans_circuit(gog: GraphOfGroups, dec: Decomposition, max_states: int) -> Optional[str]:
    """None when sans circuit, the undecided reason when unknown; raises when a circuit exists."""
    result = is_sans_circuit(gog, dec, max_states)
    if result.verdict == Verdict.NO:
        raise NotSansCircuitError(
            "graph of groups has a nontrivial reduced circuit",
            details={"length": result.trajet.length if result.trajet else 0},
        )
    if result.verdict == Verdict.UNKNOWN:
        return result.reason or "sans-circuit test undecided"
    return None


def _elliptic_centralizer(
    gog: GraphOfGroups, dec: Decomposition, trace: ReductionTrace, max_states: int
) -> CentralizerReport:
    """Circuit centralizer at the terminal vertex, conjugated back to the input element."""
    oracle = _oracle(gog, dec)
    s = trace.vertex
    x1 = gog.vertex_group(s).evaluate(trace.final)  # type: ignore[arg-type]
    inner = centralizer_circuits(gog, dec, x1, s, max_states)  # type: ignore[arg-type]
    if inner.case == CentralizerCase.UNKNOWN:
        return inner
    conj = oracle.evaluate(trace.conjugator)
    gens = [oracle.to_word(oracle.conjugate(conj, oracle.evaluate(w))) for w in inner.generators]
    return CentralizerReport(case=CentralizerCase.VERTEX, generators=gens, vertex=s)


def centralizer_graph(
    gog: GraphOfGroups,
    dec: Decomposition,
    word: Word,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> CentralizerReport:
    """Centralizer of any element: circuits when elliptic, the sans-circuit structure otherwise."""
    trace = successive_cyclic_reduction(gog, dec, word)
    if trace.verdict == Verdict.UNKNOWN:
        logger.info("Centralizer undecided", reason=trace.reason)
        return CentralizerReport(case=CentralizerCase.UNKNOWN)
    if trace.kind == TerminalKind.VERTEX:
        return _elliptic_centralizer(gog, dec, trace, max_states)
    return centralizer_structure(gog, dec, word, depth, max_states)


def centralizer_structure(
    gog: GraphOfGroups,
    dec: Decomposition,
    word: Word,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> CentralizerReport:
    """Centralizer of an element of a sans-circuit graph of groups."""
    reason = _require_sans_circuit(gog, dec, max_states)
    if reason is not None:
        logger.info("Centralizer structure undecided", reason=reason)
        return CentralizerReport(case=CentralizerCase.UNKNOWN)
    oracle = _oracle(gog, dec)
    trace = successive_cyclic_reduction(gog, dec, word)
    if trace.verdict == Verdict.UNKNOWN:
        return CentralizerReport(case=CentralizerCase.UNKNOWN)
    if trace.kind == TerminalKind.VERTEX:
        return _elliptic_centralizer(gog, dec, trace, max_states)
    g = oracle.evaluate(word)
    root, k = oracle.primitive_root(g, depth)
    if not oracle.eq(oracle.power(root, k), g) or not oracle.translation_length(root):
        raise WitnessError("cyclic centralizer generator failed verification")
    w = oracle.to_word(root)
    logger.debug("Cyclic centralizer", power=k)
    return CentralizerReport(case=CentralizerCase.CYCLIC, generators=[w], root=w, power=k)


def roots_report(
    gog: GraphOfGroups,
    dec: Decomposition,
    word: Word,
    k_max: int = DEFAULT_ROOT_K_MAX,
    radius: int = DEFAULT_BALL_RADIUS,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> RootsReport:
    """Roots x^n = g found in a ball, each checked against the root dichotomy."""
    reason = _require_sans_circuit(gog, dec, max_states)
    if reason is not None:
        raise CapabilityError(f"root dichotomy needs a decided sans-circuit test: {reason}")
    oracle = _oracle(gog, dec)
    g = oracle.evaluate(word)
    hyperbolic = oracle.translation_length(g) > 0
    if hyperbolic:
        root, k = oracle.primitive_root(g, depth)
    records: List[RootRecord] = []
    for x in oracle.ball(radius):
        for n in range(2, k_max + 1):
            if not oracle.eq(oracle.power(x, n), g):
                continue
            if hyperbolic:
                ok = k % n == 0 and any(oracle.eq(x, oracle.power(root, sign * (k // n))) for sign in (1, -1))
                branch = CentralizerCase.CYCLIC
            else:
                ok = oracle.translation_length(x) == 0
                branch = CentralizerCase.VERTEX
            records.append(RootRecord(root=oracle.to_word(x), exponent=n, branch=branch, ok=ok))
    violations = sum(1 for r in records if not r.ok)
    if violations:
        logger.warning("Root dichotomy violated", violations=violations)
    return RootsReport(element=word, roots=records, violations=violations)


# doubles


@dataclass
class GroupDouble:
    """Two copies of a group glued along subgroups, one edge per subgroup."""

    base: GroupOracle
    subgroups: List[Subgroup]
    gog: GraphOfGroups
    dec: Decomposition
    left: GroupOracle
    right: GroupOracle


def build_double(G: GroupOracle, subgroups: Sequence[Subgroup], left: str = "s", right: str = "s'") -> GroupDouble:
    if not subgroups:
        raise BassSerreError("EMPTY_DOUBLE", "a double needs at least one subgroup")
    gs = G.with_owner(left)
    gt = G.with_owner(right)
    edges = {}
    edge_groups = {}
    for i, H in enumerate(subgroups, start=1):
        e = str(i)
        hs = gs.subgroup(H.gens)
        ht = gt.subgroup(H.gens)
        oracle, embedding = gs.as_group(hs)
        phi_minus = Monomorphism(embedding.domain, hs, embedding.images)
        phi_plus = Monomorphism(embedding.domain, ht, embedding.images)
        edges[e] = (left, right)
        edge_groups[e] = EdgeGroup(oracle, phi_minus, phi_plus)
    graph = Graph([left, right], edges)
    gog = GraphOfGroups(graph, {left: gs, right: gt}, edge_groups)
    names = sorted(edges, key=int)
    dec = Decomposition(frozenset({"1"}), tuple(names[1:] + ["1"]))
    violations = gog.violations() + dec.violations(graph)
    if violations:
        raise GogValidationError("invalid double", violations)
    logger.debug("Double built", subgroups=len(subgroups))
    return GroupDouble(G, list(subgroups), gog, dec, gs, gt)


def conjugacy_via_double(
    G: GroupOracle,
    subgroups: Sequence[Subgroup],
    u: Element,
    v: Element,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
    double: Optional[GroupDouble] = None,
) -> DoubleAgreement:
    """Decide conjugacy of u and v in G and in its double, and compare."""
    double = double or build_double(G, subgroups)
    try:
        in_group = Verdict.YES if G.conjugacy_search(u, v) is not None else Verdict.NO
    except CapabilityError:
        in_group = Verdict.UNKNOWN
    result = is_conjugate_graph(
        double.gog, double.dec, double.left.to_word(u), double.left.to_word(v), depth, max_states
    )
    agree = in_group == result.verdict and in_group != Verdict.UNKNOWN
    if not agree:
        logger.warning("Double conjugacy disagreement", in_group=in_group.value, in_double=result.verdict.value)
    return DoubleAgreement(in_group=in_group, in_double=result.verdict, agree=agree)
