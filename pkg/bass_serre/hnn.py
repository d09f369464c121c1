"""HNN extensions A*_phi with t^-1 c t = phi(c) for c in C_minus.

Normal forms are Britton reduced (pinch free) and canonicalized right to left:
every element after a stable letter t^e is a right-coset representative of
C_e, and the edge-group parts are pushed leftwards into the head.
"""

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple

import structlog
from sympy import divisors

from .backends import (
    Element,
    GroupOracle,
    Monomorphism,
    Subgroup,
    center_meet,
    is_central,
)
from .config import DEFAULT_CONJUGACY_DEPTH, DEFAULT_OUTER_ORDER_LIMIT, DEFAULT_TRAJET_MAX_STATES
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
    NotCommutingError,
    OuterOrderKind,
    Verdict,
    WitnessError,
)
from .utils import extended_gcd
from .words import GeneratorId, Letter, Word, product

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class HnnNormalForm:
    """head t^e1 g1 ... t^en gn."""

    head: Element
    tail: Tuple[Tuple[int, Element], ...] = ()

    @property
    def length(self) -> int:
        return len(self.tail) + 1

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(eps for eps, _ in self.tail)


class HnnPresentation:
    """A*_phi over a base oracle with phi: C_minus -> C_plus."""

    def __init__(
        self,
        base: GroupOracle,
        c_minus: Subgroup,
        c_plus: Subgroup,
        phi: Monomorphism,
        stable: GeneratorId,
        edge: Optional[str] = None,
        check: bool = True,
    ):
        self.base = base
        self.c_minus = c_minus
        self.c_plus = c_plus
        self.phi = phi
        self.stable = stable
        self.edge = edge
        if check:
            violations = phi.validate()
            if violations:
                raise BackendValidationError("stable-letter identification is not an isomorphism", violations)
        self._phi_inverse = phi.inverse()

    def edge_subgroup(self, eps: int) -> Subgroup:
        return self.c_minus if eps < 0 else self.c_plus

    def in_edge(self, eps: int, x: Element) -> bool:
        return self.base.subgroup_contains(self.edge_subgroup(eps), x) is not None

    def through(self, eps: int, c: Element) -> Element:
        """t^eps c t^-eps for c in C_eps."""
        return self._phi_inverse.apply(c) if eps > 0 else self.phi.apply(c)

    # Britton reduction

    def _push_stable(self, elements: List[Element], eps_list: List[int], eps: int) -> None:
        if eps_list and eps_list[-1] == -eps and self.in_edge(eps_list[-1], elements[-1]):
            mu = eps_list.pop()
            c = elements.pop()
            elements[-1] = self.base.mul(elements[-1], self.through(mu, c))
            return
        eps_list.append(eps)
        elements.append(self.base.identity)

    def _canonical(self, elements: List[Element], eps_list: List[int]) -> HnnNormalForm:
        base = self.base
        for i in range(len(eps_list), 0, -1):
            eps = eps_list[i - 1]
            rep, h = base.decompose(self.edge_subgroup(eps), base.inv(elements[i]))
            c = base.inv(h)
            elements[i] = base.inv(rep)
            elements[i - 1] = base.mul(elements[i - 1], self.through(eps, c))
        return HnnNormalForm(elements[0], tuple(zip(eps_list, elements[1:])))

    def _reduce(self, tokens: List[Tuple[Optional[int], Element]]) -> HnnNormalForm:
        elements: List[Element] = [self.base.identity]
        eps_list: List[int] = []
        for eps, x in tokens:
            if eps is None:
                elements[-1] = self.base.mul(elements[-1], x)
            else:
                self._push_stable(elements, eps_list, eps)
        return self._canonical(elements, eps_list)

    def _tokens(self, nf: HnnNormalForm) -> List[Tuple[Optional[int], Element]]:
        tokens: List[Tuple[Optional[int], Element]] = [(None, nf.head)]
        for eps, g in nf.tail:
            tokens.append((eps, None))
            tokens.append((None, g))
        return tokens

    def normal_form(self, word: Word) -> HnnNormalForm:
        tokens: List[Tuple[Optional[int], Element]] = []
        run: List[Letter] = []
        for letter in word:
            if letter.gen == self.stable:
                if run:
                    tokens.append((None, self.base.evaluate(Word(tuple(run)))))
                    run = []
                tokens.append((letter.exp, None))
            elif self.base.owns(letter.gen):
                run.append(letter)
            else:
                raise ForeignElementError(
                    f"letter {letter.gen} belongs neither to the base nor to the stable letter",
                    details={"letter": str(letter.gen)},
                )
        if run:
            tokens.append((None, self.base.evaluate(Word(tuple(run)))))
        return self._reduce(tokens)

    @property
    def identity(self) -> HnnNormalForm:
        return HnnNormalForm(self.base.identity)

    def base_element(self, x: Element) -> HnnNormalForm:
        return HnnNormalForm(x)

    def stable_power(self, n: int) -> HnnNormalForm:
        eps = 1 if n >= 0 else -1
        return self._reduce([(eps, None)] * abs(n))

    def mul(self, x: HnnNormalForm, y: HnnNormalForm) -> HnnNormalForm:
        return self._reduce(self._tokens(x) + self._tokens(y))

    def inv(self, x: HnnNormalForm) -> HnnNormalForm:
        tokens: List[Tuple[Optional[int], Element]] = []
        for eps, g in reversed(self._tokens(x)):
            tokens.append((None, self.base.inv(g)) if eps is None else (-eps, None))
        return self._reduce(tokens)

    def power(self, x: HnnNormalForm, n: int) -> HnnNormalForm:
        base = x if n >= 0 else self.inv(x)
        result = self.identity
        for _ in range(abs(n)):
            result = self.mul(result, base)
        return result

    def conjugate(self, h: HnnNormalForm, g: HnnNormalForm) -> HnnNormalForm:
        return self.mul(self.mul(h, g), self.inv(h))

    def commutes(self, x: HnnNormalForm, y: HnnNormalForm) -> bool:
        return self.mul(x, y) == self.mul(y, x)

    def to_word(self, nf: HnnNormalForm) -> Word:
        parts = [self.base.to_word(nf.head)]
        for eps, g in nf.tail:
            parts.append(Word.of(self.stable, eps))
            parts.append(self.base.to_word(g))
        return product(parts)

    def generators(self) -> List[HnnNormalForm]:
        return [self.base_element(g) for g in self.base.generators()] + [self.stable_power(1)]

    def pieces(self, nf: HnnNormalForm) -> List[Tuple[Element, int]]:
        """(v_i, mu_i) with nf = v_1 t^mu_1 ... v_m t^mu_m, for a trailing identity."""
        elements = [nf.head] + [g for _, g in nf.tail[:-1]]
        return list(zip(elements, nf.exponents))

    def piece(self, v: Element, eps: int) -> HnnNormalForm:
        return self._reduce([(None, v), (eps, None)])


def britton_reduce(p: HnnPresentation, w: Word) -> HnnNormalForm:
    return p.normal_form(w)


def find_pinch(p: HnnPresentation, nf: HnnNormalForm) -> Optional[int]:
    """Index i of a pinch t^e_i g_i t^e_(i+1) in the tail, if any."""
    for i in range(len(nf.tail) - 1):
        eps, g = nf.tail[i]
        if nf.tail[i + 1][0] == -eps and p.in_edge(eps, g):
            return i
    return None


def is_cyclically_reduced(p: HnnPresentation, nf: HnnNormalForm) -> bool:
    if not nf.tail:
        return True
    if len(nf.tail) == 1:
        return True
    merged = p.base.mul(nf.tail[-1][1], nf.head)
    last_eps, first_eps = nf.tail[-1][0], nf.tail[0][0]
    return not (first_eps == -last_eps and p.in_edge(last_eps, merged))


def _cyclic_reduction(p: HnnPresentation, nf: HnnNormalForm) -> Tuple[HnnNormalForm, HnnNormalForm]:
    conjugator = p.identity
    current = nf
    while current.tail:
        last = current.tail[-1][1]
        if not p.base.is_identity(last):
            step = p.base_element(last)
            current = p.conjugate(step, current)
            conjugator = p.mul(conjugator, p.inv(step))
            continue
        first_eps, last_eps = current.tail[0][0], current.tail[-1][0]
        if len(current.tail) >= 2 and first_eps == -last_eps and p.in_edge(last_eps, current.head):
            step = p.stable_power(last_eps)
            current = p.conjugate(step, current)
            conjugator = p.mul(conjugator, p.inv(step))
            continue
        break
    return current, conjugator


def cyclically_reduce(p: HnnPresentation, g: Word) -> Tuple[Word, Word]:
    """(g', c) with g = c g' c^-1 and g' cyclically reduced with trailing element 1."""
    reduced, conjugator = _cyclic_reduction(p, p.normal_form(g))
    return p.to_word(reduced), p.to_word(conjugator)


def translation_length(p: HnnPresentation, nf: HnnNormalForm) -> int:
    reduced, _ = _cyclic_reduction(p, nf)
    return len(reduced.tail)


def _edge_elements(p: HnnPresentation, eps: int, depth: int) -> Tuple[List[Element], bool]:
    subgroup = p.edge_subgroup(eps)
    if subgroup.is_finite():
        return subgroup.elements(), True
    return subgroup.ball(depth), False


def _conjugate_in_base(
    p: HnnPresentation, target: Element, start: Element, max_states: int
) -> Tuple[Verdict, Optional[HnnNormalForm], str]:
    base = p.base
    queue = deque([(start, p.identity)])
    seen = {start}
    exhaustive = True
    t_plus, t_minus = p.stable_power(1), p.stable_power(-1)
    while queue:
        x, k = queue.popleft()
        g = base.conjugacy_search(target, x)
        if g is not None:
            return Verdict.YES, p.mul(p.base_element(g), p.inv(k)), "base conjugacy"
        if len(seen) > max_states:
            return Verdict.UNKNOWN, None, f"edge-group orbit exceeded {max_states} states"
        for eps, t in ((-1, t_plus), (1, t_minus)):
            found = base.conjugators_into(x, p.edge_subgroup(eps))
            exhaustive = exhaustive and found.exhaustive
            for h, c in found.pairs:
                y = p.through(eps, c)
                if y not in seen:
                    seen.add(y)
                    queue.append((y, p.mul(p.mul(k, p.base_element(h)), t)))
    if exhaustive:
        return Verdict.NO, None, "edge-group orbit exhausted"
    return Verdict.UNKNOWN, None, "conjugators into the edge groups were not enumerated exhaustively"


def _conjugate_cyclic(
    p: HnnPresentation, ru: HnnNormalForm, rv: HnnNormalForm, depth: int
) -> Tuple[Verdict, Optional[HnnNormalForm], str]:
    exact = True
    prefix = p.identity
    pieces = p.pieces(rv)
    for index, (v, mu) in enumerate(pieces):
        rotated = p.conjugate(p.inv(prefix), rv)
        last_mu = pieces[index - 1][1] if index else pieces[-1][1]
        for eps in (last_mu, -last_mu):
            alphas, finite = _edge_elements(p, eps, depth)
            exact = exact and finite
            for alpha in alphas:
                a = p.base_element(alpha)
                if p.conjugate(a, rotated) == ru:
                    return Verdict.YES, p.mul(a, p.inv(prefix)), "cyclic conjugate"
        prefix = p.mul(prefix, p.piece(v, mu))
    if exact:
        return Verdict.NO, None, "no cyclic conjugate matches up to the edge groups"
    return Verdict.UNKNOWN, None, f"edge-group search stopped at radius {depth}"


def is_conjugate(
    p: HnnPresentation,
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
            verdict, h, reason = _conjugate_in_base(p, ru.head, rv.head, max_states)
        elif sorted(ru.exponents) != sorted(rv.exponents):
            verdict, h, reason = Verdict.NO, None, "stable-letter exponents differ"
        else:
            verdict, h, reason = _conjugate_cyclic(p, ru, rv, depth)
    except CapabilityError as e:
        logger.info("HNN conjugacy undecided", reason=e.message)
        return ConjugacyResult(verdict=Verdict.UNKNOWN, reason=e.message)
    if verdict != Verdict.YES or h is None:
        if verdict == Verdict.UNKNOWN:
            logger.info("HNN conjugacy undecided", reason=reason)
        return ConjugacyResult(verdict=verdict, reason=reason)
    conjugator = p.mul(p.mul(cu, h), p.inv(cv))
    if p.conjugate(conjugator, nv) != nu:
        raise WitnessError("HNN conjugator failed verification")
    logger.debug("HNN conjugacy decided", verdict=verdict.value, reason=reason)
    return ConjugacyResult(verdict=Verdict.YES, conjugator=p.to_word(conjugator), reason=reason)


def _in_some_edge(p: HnnPresentation, nf: HnnNormalForm) -> bool:
    return not nf.tail and (p.in_edge(-1, nf.head) or p.in_edge(1, nf.head))


def _c_sequence(p: HnnPresentation, x: HnnNormalForm, y: HnnNormalForm, swapped: bool) -> CommuteReport:
    base = p.base
    start = x.head
    c = base.conjugate(base.inv(y.head), start)
    sequence = [base.to_word(start), base.to_word(c)]
    try:
        for eps, g in y.tail:
            # t^-eps c t^eps
            c = p.through(-eps, c)
            sequence.append(base.to_word(c))
            c = base.conjugate(base.inv(g), c)
            sequence.append(base.to_word(c))
    except ForeignElementError as e:
        raise WitnessError("conjugation sequence left the edge groups") from e
    if c != start:
        raise WitnessError("conjugation sequence does not close up")
    return CommuteReport(case=CommuteCase.C_SEQUENCE, sequence=sequence, swapped=swapped)


def _edge_conjugate(p: HnnPresentation, x: HnnNormalForm, swapped: bool) -> Optional[CommuteReport]:
    reduced, conjugator = _cyclic_reduction(p, x)
    if reduced.tail:
        return None
    for eps in (-1, 1):
        found = p.base.conjugators_into(reduced.head, p.edge_subgroup(eps))
        if found.pairs:
            h, c = found.pairs[0]
            g = p.mul(conjugator, p.base_element(h))
            edge = p.base_element(c)
            if p.conjugate(g, edge) != x:
                raise WitnessError("edge conjugate failed verification")
            return CommuteReport(
                case=CommuteCase.EDGE_CONJUGATE,
                g=p.to_word(g),
                edge_element=p.to_word(edge),
                swapped=swapped,
            )
    return None


def _same_conjugate_of_base(
    p: HnnPresentation, x: HnnNormalForm, y: HnnNormalForm, swapped: bool
) -> Optional[CommuteReport]:
    reduced, conjugator = _cyclic_reduction(p, x)
    if reduced.tail:
        return None
    if p.conjugate(p.inv(conjugator), y).tail:
        raise WitnessError("commuting elements are not in the same conjugate of the base")
    return CommuteReport(case=CommuteCase.SAME_CONJUGATE_OF_A, g=p.to_word(conjugator), swapped=swapped)


def _cyclic(p: HnnPresentation, x: HnnNormalForm, y: HnnNormalForm) -> CommuteReport:
    tx, ty = translation_length(p, x), translation_length(p, y)
    sigma = 1 if translation_length(p, p.mul(x, y)) == tx + ty else -1
    d, a, b = extended_gcd(tx, ty)
    w = p.mul(p.power(x, a), p.power(y, sigma * b))
    j, k = tx // d, sigma * (ty // d)
    ex = p.mul(x, p.power(w, -j))
    ey = p.mul(y, p.power(w, -k))
    reduced, g = _cyclic_reduction(p, w)
    candidates = [g]
    prefix = g
    for v, mu in p.pieces(reduced):
        candidates.append(p.mul(prefix, p.base_element(v)))
        prefix = p.mul(prefix, p.piece(v, mu))
        candidates.append(prefix)
    for candidate in candidates:
        h = p.conjugate(p.inv(candidate), ex)
        h_prime = p.conjugate(p.inv(candidate), ey)
        if h.tail or h_prime.tail:
            continue
        if any(p.in_edge(eps, h.head) and p.in_edge(eps, h_prime.head) for eps in (-1, 1)):
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


def commute_classify(p: HnnPresentation, x: Word, y: Word) -> CommuteReport:
    """Classify a commuting pair by the case of the HNN commutation theorem it falls under."""
    nx, ny = p.normal_form(x), p.normal_form(y)
    if not p.commutes(nx, ny):
        raise NotCommutingError()
    pairs = ((nx, ny, False), (ny, nx, True))
    try:
        for a, b, swapped in pairs:
            if _in_some_edge(p, a):
                return _c_sequence(p, a, b, swapped)
        for a, _, swapped in pairs:
            report = _edge_conjugate(p, a, swapped)
            if report is not None:
                return report
        for a, b, swapped in pairs:
            report = _same_conjugate_of_base(p, a, b, swapped)
            if report is not None:
                return report
        return _cyclic(p, nx, ny)
    except CapabilityError as e:
        logger.info("HNN commutation undecided", reason=e.message)
        return CommuteReport(case=CommuteCase.UNKNOWN, reason=e.message)


def fix_phi(p: HnnPresentation) -> Subgroup:
    """Elements of C_minus fixed by phi."""
    return p.base.equalizer(p.phi)


def center(
    p: HnnPresentation,
    depth: int = DEFAULT_CONJUGACY_DEPTH,
    limit: int = DEFAULT_OUTER_ORDER_LIMIT,
) -> CenterReport:
    base = p.base
    try:
        fixed = fix_phi(p)
        gens = [p.base_element(z) for z in center_meet(base, fixed)]
        if not (base.is_whole(p.c_minus) and base.is_whole(p.c_plus)):
            case = CenterCase.PROPER_EDGE_GROUP
        else:
            order = base.outer_order(p.phi, limit)
            if order.kind == OuterOrderKind.UNKNOWN:
                return CenterReport(
                    case=CenterCase.UNKNOWN,
                    verdict=Verdict.UNKNOWN,
                    reason=f"outer order of phi not found within {limit} powers",
                )
            if order.kind == OuterOrderKind.INFINITE:
                case = CenterCase.INFINITE_OUTER_ORDER
            else:
                case = CenterCase.FINITE_OUTER_ORDER
                translate = _stable_translate(p, fixed, order.n, order.a0, depth, limit)
                if translate is not None:
                    gens.append(translate)
    except CapabilityError as e:
        logger.info("HNN center undecided", reason=e.message)
        return CenterReport(case=CenterCase.UNKNOWN, verdict=Verdict.UNKNOWN, reason=e.message)
    for z in gens:
        if not all(p.commutes(z, s) for s in p.generators()):
            raise WitnessError("center generator is not central")
    logger.debug("HNN center computed", case=case.value, generators=len(gens))
    return CenterReport(generators=[p.to_word(z) for z in gens], case=case)


def _stable_translate(
    p: HnnPresentation, fixed: Subgroup, n: int, a0: Element, depth: int, limit: int
) -> Optional[HnnNormalForm]:
    """t^(pn) x for the least p >= 1 with x in Fix phi and a0^-p x central in the base."""
    base = p.base
    candidates = [base.identity] + (fixed.elements() if fixed.is_finite() else fixed.ball(depth))
    bound = base.order() or limit
    for q in range(1, bound + 1):
        shift = base.power(base.inv(a0), q)
        for x in candidates:
            if is_central(base, base.mul(shift, x)):
                return p.mul(p.stable_power(q * n), p.base_element(x))
    return None


def primitive_root(p: HnnPresentation, g: Word, depth: int = DEFAULT_CONJUGACY_DEPTH) -> Tuple[Word, int]:
    """(W, k) with g = W^k and k the largest exponent found for a hyperbolic g."""
    nf = p.normal_form(g)
    reduced, conjugator = _cyclic_reduction(p, nf)
    if not reduced.tail:
        raise BassSerreError("NOT_HYPERBOLIC", "elements of a base conjugate have no cyclic root")
    pieces = p.pieces(reduced)
    n = len(pieces)
    alphas = [p.base.identity]
    for eps in (-1, 1):
        alphas.extend(_edge_elements(p, eps, depth)[0])
    for k in sorted(divisors(n), reverse=True):
        if k == 1:
            continue
        prefix = p.identity
        for v, mu in pieces[: n // k]:
            prefix = p.mul(prefix, p.piece(v, mu))
        for alpha in alphas:
            a = p.base_element(alpha)
            for candidate in (p.mul(prefix, a), p.mul(a, prefix)):
                if p.power(candidate, k) == reduced:
                    return p.to_word(p.conjugate(conjugator, candidate)), k
    return p.to_word(nf), 1
