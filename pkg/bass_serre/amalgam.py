"""Amalgamated products A *_C B over two oracles.

Normal forms use left-coset representatives of C in each factor and push the
edge-group part rightwards into ``trailing``, so equal elements get identical
normal forms.
"""

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple

import structlog
from sympy import divisors

from .backends import (
    Capability,
    Element,
    GroupOracle,
    Monomorphism,
    Subgroup,
    center_meet,
    greedy_generators,
    is_central,
)
from .config import DEFAULT_CONJUGACY_DEPTH, DEFAULT_TRAJET_MAX_STATES
from .types import (
    BackendValidationError,
    BassSerreError,
    CapabilityError,
    CenterCase,
    CenterReport,
    CommuteCase,
    CommuteReport,
    ConjugacyResult,
    ForeignElementError,
    NonTrivialityError,
    NotCommutingError,
    Verdict,
    WitnessError,
)
from .utils import extended_gcd
from .words import GeneratorId, Letter, Word, product

logger = structlog.get_logger(__name__)

TAG_A = "A"
TAG_B = "B"

Syllable = Tuple[str, Element]


@dataclass(frozen=True)
class AmalgamNormalForm:
    """Alternating syllables of coset representatives followed by an element of C_A."""

    syllables: Tuple[Syllable, ...]
    trailing: Element

    @property
    def length(self) -> int:
        return len(self.syllables)


class AmalgamPresentation:
    """A *_C B with phi: C_A -> C_B identifying the edge subgroups."""

    def __init__(
        self,
        factor_a: GroupOracle,
        factor_b: GroupOracle,
        c_a: Subgroup,
        c_b: Subgroup,
        phi: Monomorphism,
        edge: Optional[str] = None,
        check: bool = True,
    ):
        self.factor_a = factor_a
        self.factor_b = factor_b
        self.c_a = c_a
        self.c_b = c_b
        self.phi = phi
        self.edge = edge
        if check:
            violations = phi.validate()
            if violations:
                raise BackendValidationError("edge identification is not an isomorphism", violations)
        self._phi_inverse = phi.inverse()

    # factor plumbing

    def factor(self, tag: str) -> GroupOracle:
        return self.factor_a if tag == TAG_A else self.factor_b

    def edge_subgroup(self, tag: str) -> Subgroup:
        return self.c_a if tag == TAG_A else self.c_b

    @staticmethod
    def other(tag: str) -> str:
        return TAG_B if tag == TAG_A else TAG_A

    def transport(self, tag: str, c: Element) -> Element:
        """The element of the other factor identified with c in C."""
        return self.phi.apply(c) if tag == TAG_A else self._phi_inverse.apply(c)

    def in_edge(self, tag: str, x: Element) -> bool:
        return self.factor(tag).subgroup_contains(self.edge_subgroup(tag), x) is not None

    def tag_of(self, gen: GeneratorId) -> str:
        if self.factor_a.owns(gen):
            return TAG_A
        if self.factor_b.owns(gen):
            return TAG_B
        raise ForeignElementError(f"letter {gen} belongs to neither factor", details={"letter": str(gen)})

    # normal forms

    def syllables_of(self, word: Word) -> List[Syllable]:
        syllables: List[Syllable] = []
        run: List[Letter] = []
        run_tag: Optional[str] = None
        for letter in word:
            tag = self.tag_of(letter.gen)
            if run and tag != run_tag:
                syllables.append((run_tag, self.factor(run_tag).evaluate(Word(tuple(run)))))  # type: ignore[arg-type]
                run = []
            run.append(letter)
            run_tag = tag
        if run:
            syllables.append((run_tag, self.factor(run_tag).evaluate(Word(tuple(run)))))  # type: ignore[arg-type]
        return syllables

    def _push(self, stack: List[List], tag: str, x: Element) -> None:
        group = self.factor(tag)
        if stack and stack[-1][0] == tag:
            x = group.mul(stack.pop()[1], x)
        elif len(stack) == 1 and self.in_edge(stack[0][0], stack[0][1]):
            prev_tag, prev = stack.pop()
            x = group.mul(self.transport(prev_tag, prev), x)
        if stack and self.in_edge(tag, x):
            prev_tag, prev = stack.pop()
            self._push(stack, prev_tag, self.factor(prev_tag).mul(prev, self.transport(tag, x)))
            return
        stack.append([tag, x])

    def reduce(self, syllables: List[Syllable]) -> AmalgamNormalForm:
        stack: List[List] = []
        for tag, x in syllables:
            self._push(stack, tag, x)
        if not stack:
            return self.identity
        trailing = self.factor_a.identity
        for i, item in enumerate(stack):
            tag, x = item
            rep, c = self.factor(tag).decompose(self.edge_subgroup(tag), x)
            item[1] = rep
            if i + 1 < len(stack):
                after = self.factor(self.other(tag))
                stack[i + 1][1] = after.mul(self.transport(tag, c), stack[i + 1][1])
            else:
                trailing = c if tag == TAG_A else self.transport(tag, c)
        if len(stack) == 1 and self.factor(stack[0][0]).is_identity(stack[0][1]):
            return AmalgamNormalForm(((TAG_A, self.factor_a.identity),), trailing)
        return AmalgamNormalForm(tuple((tag, x) for tag, x in stack), trailing)

    @property
    def identity(self) -> AmalgamNormalForm:
        return AmalgamNormalForm(((TAG_A, self.factor_a.identity),), self.factor_a.identity)

    def normal_form(self, word: Word) -> AmalgamNormalForm:
        return self.reduce(self.syllables_of(word))

    def factor_element(self, tag: str, x: Element) -> AmalgamNormalForm:
        return self.reduce([(tag, x)])

    def expand(self, nf: AmalgamNormalForm) -> List[Syllable]:
        return list(nf.syllables) + [(TAG_A, nf.trailing)]

    def pieces(self, nf: AmalgamNormalForm) -> List[Syllable]:
        """Syllables with the trailing edge element merged into the last one."""
        pieces = list(nf.syllables)
        tag, x = pieces[-1]
        carry = nf.trailing if tag == TAG_A else self.transport(TAG_A, nf.trailing)
        pieces[-1] = (tag, self.factor(tag).mul(x, carry))
        return pieces

    def mul(self, x: AmalgamNormalForm, y: AmalgamNormalForm) -> AmalgamNormalForm:
        return self.reduce(self.expand(x) + self.expand(y))

    def inv(self, x: AmalgamNormalForm) -> AmalgamNormalForm:
        return self.reduce([(tag, self.factor(tag).inv(g)) for tag, g in reversed(self.expand(x))])

    def power(self, x: AmalgamNormalForm, n: int) -> AmalgamNormalForm:
        base = x if n >= 0 else self.inv(x)
        result = self.identity
        for _ in range(abs(n)):
            result = self.mul(result, base)
        return result

    def conjugate(self, h: AmalgamNormalForm, g: AmalgamNormalForm) -> AmalgamNormalForm:
        return self.mul(self.mul(h, g), self.inv(h))

    def commutes(self, x: AmalgamNormalForm, y: AmalgamNormalForm) -> bool:
        return self.mul(x, y) == self.mul(y, x)

    def to_word(self, nf: AmalgamNormalForm) -> Word:
        parts = [self.factor(tag).to_word(x) for tag, x in nf.syllables]
        parts.append(self.factor_a.to_word(nf.trailing))
        return product(parts)

    def in_edge_group(self, nf: AmalgamNormalForm) -> bool:
        return nf.length == 1 and nf.syllables[0][0] == TAG_A and self.factor_a.is_identity(nf.syllables[0][1])

    def factor_value(self, nf: AmalgamNormalForm) -> Syllable:
        """(tag, element) of a length-one normal form."""
        return self.pieces(nf)[0]

    def generators(self) -> List[AmalgamNormalForm]:
        return [self.factor_element(TAG_A, g) for g in self.factor_a.generators()] + [
            self.factor_element(TAG_B, g) for g in self.factor_b.generators()
        ]


def normal_form(p: AmalgamPresentation, w: Word) -> AmalgamNormalForm:
    return p.normal_form(w)


def is_cyclically_reduced(p: AmalgamPresentation, nf: AmalgamNormalForm) -> bool:
    return nf.length <= 1 or nf.syllables[0][0] != nf.syllables[-1][0]


def _cyclic_reduction(
    p: AmalgamPresentation, nf: AmalgamNormalForm
) -> Tuple[AmalgamNormalForm, AmalgamNormalForm]:
    conjugator = p.identity
    current = nf
    while not is_cyclically_reduced(p, current):
        tag, first = current.syllables[0]
        step = p.factor_element(tag, first)
        current = p.mul(p.mul(p.inv(step), current), step)
        conjugator = p.mul(conjugator, step)
    return current, conjugator


def cyclically_reduce(p: AmalgamPresentation, g: Word) -> Tuple[Word, Word]:
    """(g', c) with g = c g' c^-1 and g' cyclically reduced."""
    reduced, conjugator = _cyclic_reduction(p, p.normal_form(g))
    return p.to_word(reduced), p.to_word(conjugator)


def translation_length(p: AmalgamPresentation, nf: AmalgamNormalForm) -> int:
    reduced, _ = _cyclic_reduction(p, nf)
    return reduced.length if reduced.length > 1 else 0


def _edge_elements(p: AmalgamPresentation, depth: int) -> Tuple[List[Element], bool]:
    if p.c_a.is_finite():
        return p.c_a.elements(), True
    return p.c_a.ball(depth), False


def _conjugate_in_factors(
    p: AmalgamPresentation, ru: AmalgamNormalForm, rv: AmalgamNormalForm, max_states: int
) -> Tuple[Verdict, Optional[AmalgamNormalForm], str]:
    target_tag, target = p.factor_value(ru)
    start = p.factor_value(rv)
    queue = deque([(start, p.identity)])
    seen = {start}
    exhaustive = True
    while queue:
        (tag, x), k = queue.popleft()
        if tag == target_tag:
            g = p.factor(tag).conjugacy_search(target, x)
            if g is not None:
                return Verdict.YES, p.mul(p.factor_element(tag, g), p.inv(k)), "factor conjugacy"
        if len(seen) > max_states:
            return Verdict.UNKNOWN, None, f"edge-group orbit exceeded {max_states} states"
        found = p.factor(tag).conjugators_into(x, p.edge_subgroup(tag))
        exhaustive = exhaustive and found.exhaustive
        for h, c in found.pairs:
            state = (p.other(tag), p.transport(tag, c))
            if state not in seen:
                seen.add(state)
                queue.append((state, p.mul(k, p.factor_element(tag, h))))
    if exhaustive:
        return Verdict.NO, None, "edge-group orbit exhausted"
    return Verdict.UNKNOWN, None, "conjugators into the edge group were not enumerated exhaustively"


def _conjugate_cyclic(
    p: AmalgamPresentation, ru: AmalgamNormalForm, rv: AmalgamNormalForm, depth: int
) -> Tuple[Verdict, Optional[AmalgamNormalForm], str]:
    pieces = p.pieces(rv)
    alphas, exact = _edge_elements(p, depth)
    prefix = p.identity
    for tag, x in pieces:
        rotated = p.mul(p.mul(p.inv(prefix), rv), prefix)
        for alpha in alphas:
            a = p.factor_element(TAG_A, alpha)
            if p.conjugate(a, rotated) == ru:
                return Verdict.YES, p.mul(a, p.inv(prefix)), "cyclic conjugate"
        prefix = p.mul(prefix, p.factor_element(tag, x))
    if exact:
        return Verdict.NO, None, "no cyclic conjugate matches up to the edge group"
    return Verdict.UNKNOWN, None, f"edge-group search stopped at radius {depth}"


def is_conjugate(
    p: AmalgamPresentation,
    u: Word,
    v: Word,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    max_states: int = DEFAULT_TRAJET_MAX_STATES,
) -> ConjugacyResult:
    """Decide whether u = h v h^-1 for some h; YES answers carry a verified h."""
    nu, nv = p.normal_form(u), p.normal_form(v)
    if nu == nv:
        return ConjugacyResult(verdict=Verdict.YES, conjugator=Word(), reason="equal elements")
    try:
        ru, cu = _cyclic_reduction(p, nu)
        rv, cv = _cyclic_reduction(p, nv)
        if ru.length != rv.length:
            return ConjugacyResult(verdict=Verdict.NO, reason="cyclically reduced lengths differ")
        if ru.length == 1:
            verdict, h, reason = _conjugate_in_factors(p, ru, rv, max_states)
        else:
            verdict, h, reason = _conjugate_cyclic(p, ru, rv, depth)
    except CapabilityError as e:
        logger.info("Amalgam conjugacy undecided", reason=e.message)
        return ConjugacyResult(verdict=Verdict.UNKNOWN, reason=e.message)
    if verdict != Verdict.YES or h is None:
        if verdict == Verdict.UNKNOWN:
            logger.info("Amalgam conjugacy undecided", reason=reason)
        return ConjugacyResult(verdict=verdict, reason=reason)
    conjugator = p.mul(p.mul(cu, h), p.inv(cv))
    if p.conjugate(conjugator, nv) != nu:
        raise WitnessError("amalgam conjugator failed verification")
    logger.debug("Amalgam conjugacy decided", verdict=verdict.value, reason=reason)
    return ConjugacyResult(verdict=Verdict.YES, conjugator=p.to_word(conjugator), reason=reason)


def _c_sequence(p: AmalgamPresentation, x: AmalgamNormalForm, y: AmalgamNormalForm, swapped: bool) -> CommuteReport:
    start = x.trailing
    c = start
    sequence = [p.factor_a.to_word(c)]
    for tag, piece in p.pieces(y):
        group = p.factor(tag)
        local = c if tag == TAG_A else p.transport(TAG_A, c)
        local = group.mul(group.mul(group.inv(piece), local), piece)
        if not p.in_edge(tag, local):
            raise WitnessError("conjugation sequence left the edge group")
        c = local if tag == TAG_A else p.transport(tag, local)
        sequence.append(p.factor_a.to_word(c))
    if c != start:
        raise WitnessError("conjugation sequence does not close up")
    return CommuteReport(case=CommuteCase.C_SEQUENCE, sequence=sequence, swapped=swapped)


def _edge_conjugate(p: AmalgamPresentation, x: AmalgamNormalForm, swapped: bool) -> Optional[CommuteReport]:
    reduced, conjugator = _cyclic_reduction(p, x)
    if reduced.length != 1:
        return None
    tag, value = p.factor_value(reduced)
    found = p.factor(tag).conjugators_into(value, p.edge_subgroup(tag))
    if not found.pairs:
        return None
    h, c = found.pairs[0]
    g = p.mul(conjugator, p.factor_element(tag, h))
    edge = p.factor_element(tag, c)
    if p.conjugate(g, edge) != x:
        raise WitnessError("edge conjugate failed verification")
    return CommuteReport(
        case=CommuteCase.EDGE_CONJUGATE,
        g=p.to_word(g),
        edge_element=p.to_word(edge),
        factor=tag,
        swapped=swapped,
    )


def _same_factor(
    p: AmalgamPresentation, x: AmalgamNormalForm, y: AmalgamNormalForm, swapped: bool
) -> Optional[CommuteReport]:
    reduced, conjugator = _cyclic_reduction(p, x)
    if reduced.length != 1:
        return None
    tag, _ = p.factor_value(reduced)
    inner = p.conjugate(p.inv(conjugator), y)
    if inner.length != 1 or (p.factor_value(inner)[0] != tag and not p.in_edge_group(inner)):
        raise WitnessError("commuting elements are not in the same conjugate of a factor")
    return CommuteReport(case=CommuteCase.SAME_FACTOR, g=p.to_word(conjugator), factor=tag, swapped=swapped)


def _cyclic(p: AmalgamPresentation, x: AmalgamNormalForm, y: AmalgamNormalForm) -> CommuteReport:
    tx, ty = translation_length(p, x), translation_length(p, y)
    sigma = 1 if translation_length(p, p.mul(x, y)) == tx + ty else -1
    d, a, b = extended_gcd(tx, ty)
    w = p.mul(p.power(x, a), p.power(y, sigma * b))
    j, k = tx // d, sigma * (ty // d)
    ex = p.mul(x, p.power(w, -j))
    ey = p.mul(y, p.power(w, -k))
    reduced, g = _cyclic_reduction(p, w)
    candidate = g
    for tag, piece in [(TAG_A, p.factor_a.identity)] + p.pieces(reduced):
        candidate = p.mul(candidate, p.factor_element(tag, piece))
        h = p.conjugate(p.inv(candidate), ex)
        h_prime = p.conjugate(p.inv(candidate), ey)
        if p.in_edge_group(h) and p.in_edge_group(h_prime):
            break
    else:
        raise WitnessError("elliptic parts of commuting hyperbolic elements fix no common edge")
    gh, gh_prime = p.conjugate(candidate, h), p.conjugate(candidate, h_prime)
    if p.mul(gh, p.power(w, j)) != x or p.mul(gh_prime, p.power(w, k)) != y:
        raise WitnessError("cyclic decomposition failed verification")
    if not (p.commutes(gh, gh_prime) and p.commutes(gh, w) and p.commutes(gh_prime, w)):
        raise WitnessError("cyclic decomposition parts do not commute")
    return CommuteReport(
        case=CommuteCase.CYCLIC,
        g=p.to_word(candidate),
        h=p.to_word(h),
        h_prime=p.to_word(h_prime),
        w=p.to_word(w),
        j=j,
        k=k,
    )


def commute_classify(p: AmalgamPresentation, x: Word, y: Word) -> CommuteReport:
    """Classify a commuting pair by the case of the amalgam commutation theorem it falls under."""
    nx, ny = p.normal_form(x), p.normal_form(y)
    if not p.commutes(nx, ny):
        raise NotCommutingError()
    pairs = ((nx, ny, False), (ny, nx, True))
    try:
        for a, b, swapped in pairs:
            if p.in_edge_group(a):
                return _c_sequence(p, a, b, swapped)
        for a, _, swapped in pairs:
            report = _edge_conjugate(p, a, swapped)
            if report is not None:
                return report
        for a, b, swapped in pairs:
            report = _same_factor(p, a, b, swapped)
            if report is not None:
                return report
        return _cyclic(p, nx, ny)
    except CapabilityError as e:
        logger.info("Amalgam commutation undecided", reason=e.message)
        return CommuteReport(case=CommuteCase.UNKNOWN, reason=e.message)


def center(p: AmalgamPresentation) -> CenterReport:
    """Z(A) intersected with Z(B), computed inside the edge group."""
    if p.factor_a.is_whole(p.c_a) or p.factor_b.is_whole(p.c_b):
        raise NonTrivialityError("an amalgam factor equals the edge group")
    try:
        candidates = p.factor_a.subgroup(center_meet(p.factor_a, p.c_a))
        gens = _central_in_b(p, candidates)
    except CapabilityError as e:
        logger.info("Amalgam center undecided", reason=e.message)
        return CenterReport(case=CenterCase.UNKNOWN, verdict=Verdict.UNKNOWN, reason=e.message)
    nfs = [p.factor_element(TAG_A, g) for g in gens]
    for z in nfs:
        if not all(p.commutes(z, s) for s in p.generators()):
            raise WitnessError("center generator is not central")
    logger.debug("Amalgam center computed", generators=len(nfs))
    return CenterReport(generators=[p.to_word(z) for z in nfs], case=CenterCase.AMALGAM)


def _central_in_b(p: AmalgamPresentation, candidates: Subgroup) -> List[Element]:
    b = p.factor_b
    if b.is_abelian():
        return [g for g in candidates.gens if not p.factor_a.is_identity(g)]
    if Capability.ENUMERATE in b.capabilities:
        central = [c for c in candidates.elements() if is_central(b, p.transport(TAG_A, c))]
        return greedy_generators(p.factor_a, central)
    if b.kind == "free":
        return []
    raise CapabilityError(f"cannot intersect centers through {b.kind} factor {b.owner!r}")


def primitive_root(p: AmalgamPresentation, g: Word, depth: int = DEFAULT_CONJUGACY_DEPTH) -> Tuple[Word, int]:
    """(W, k) with g = W^k and k the largest exponent found for a hyperbolic g."""
    nf = p.normal_form(g)
    reduced, conjugator = _cyclic_reduction(p, nf)
    if reduced.length < 2:
        raise BassSerreError("NOT_HYPERBOLIC", "elements of a factor conjugate have no cyclic root")
    pieces = p.pieces(reduced)
    n = len(pieces)
    alphas, _ = _edge_elements(p, depth)
    for k in sorted(divisors(n), reverse=True):
        m = n // k
        if k == 1 or m % 2:
            continue
        prefix = p.identity
        for tag, x in pieces[:m]:
            prefix = p.mul(prefix, p.factor_element(tag, x))
        for alpha in alphas:
            candidate = p.mul(prefix, p.factor_element(TAG_A, alpha))
            if p.power(candidate, k) == reduced:
                root = p.conjugate(conjugator, candidate)
                return p.to_word(root), k
    return p.to_word(nf), 1
