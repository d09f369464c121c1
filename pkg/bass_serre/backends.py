"""Vertex and edge group backends behind one capability-tagged oracle interface.

Each oracle answers the word problem for its group and, depending on its
capabilities, subgroup membership with witnesses, canonical coset
transversals, conjugator enumeration into subgroups, centralizers, centers
and outer-automorphism orders.
"""

import copy
import itertools
import math
from abc import ABC, abstractmethod
from collections import deque
from enum import Flag
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import structlog
import sympy

from .config import DEFAULT_OUTER_ORDER_LIMIT
from .types import (
    BackendValidationError,
    CapabilityError,
    ForeignElementError,
    OuterOrderKind,
)
from .utils import (
    extended_gcd,
    hermite_columns,
    integer_kernel,
    lattice_rank,
    mat_vec,
    pivot_row,
    solve_integer,
)
from .words import GeneratorId, Letter, Scope, Word, free_reduce, invert, parse_word

logger = structlog.get_logger(__name__)

Element = Hashable


class Capability(Flag):
    """Operations a backend can answer exactly."""
    NONE = 0
    ENUMERATE = 1
    SUBGROUP_MEMBERSHIP = 2
    TRANSVERSAL = 4
    CONJUGACY = 8
    CONJUGATORS_INTO_SUBGROUP = 16
    CENTRALIZER_GENS = 32
    CENTER_GENS = 64
    OUTER_ORDER = 128
    ALL = 255


INFINITE_BACKEND = (
    Capability.SUBGROUP_MEMBERSHIP
    | Capability.TRANSVERSAL
    | Capability.CONJUGACY
    | Capability.CONJUGATORS_INTO_SUBGROUP
    | Capability.CENTRALIZER_GENS
    | Capability.CENTER_GENS
    | Capability.OUTER_ORDER
)


class ConjugatorSet(NamedTuple):
    """Solutions (h, c) of g = h c h^-1 with c in a subgroup.

    When exhaustive, pairs lists every reachable c once. Otherwise pairs holds
    witnesses and centralizer generates Z(c) for the first one.
    """
    pairs: List[Tuple[Element, Element]]
    exhaustive: bool
    centralizer: List[Element] = []


class OuterOrder(NamedTuple):
    kind: OuterOrderKind
    n: Optional[int] = None
    a0: Optional[Element] = None


class Subgroup:
    """A finitely generated subgroup of an oracle, with backend-specific data."""

    def __init__(self, ambient: "GroupOracle", gens: Iterable[Element], data: Any = None, whole: bool = False):
        self.ambient = ambient
        self.gens: Tuple[Element, ...] = tuple(gens)
        self.data = data
        self.whole = whole

    def contains(self, g: Element) -> bool:
        return self.ambient.subgroup_contains(self, g) is not None

    def is_finite(self) -> bool:
        return self.ambient.subgroup_is_finite(self)

    def elements(self) -> List[Element]:
        return self.ambient.subgroup_elements(self)

    def ball(self, radius: int) -> List[Element]:
        return self.ambient.subgroup_ball(self, radius)

    def is_trivial(self) -> bool:
        return all(self.ambient.is_identity(g) for g in self.gens)

    def __repr__(self) -> str:
        return f"Subgroup({self.ambient.owner!r}, gens={list(self.gens)!r})"


def subgroup_letter(index: int, exp: int = 1) -> Letter:
    return Letter(GeneratorId(Scope.EDGE_GROUP, "", index), exp)


def subgroup_word(exponents: Sequence[int]) -> Word:
    """Witness word prod_j h_j^exponents[j] over subgroup generators."""
    letters: List[Letter] = []
    for j, e in enumerate(exponents):
        sign = 1 if e > 0 else -1
        letters.extend(subgroup_letter(j, sign) for _ in range(abs(e)))
    return Word(tuple(letters))


def greedy_generators(oracle: "GroupOracle", elements: Iterable[Element]) -> List[Element]:
    """A generating subset of the subgroup generated by a finite set of elements."""
    gens: List[Element] = []
    closure = {oracle.identity}
    for x in elements:
        if x in closure:
            continue
        gens.append(x)
        queue = deque(closure)
        while queue:
            y = queue.popleft()
            for g in gens:
                z = oracle.mul(y, g)
                if z not in closure:
                    closure.add(z)
                    queue.append(z)
    return gens


def evaluate_over(oracle: "GroupOracle", values: Sequence[Element], witness: Word) -> Element:
    """Evaluate a witness word by substituting values for the subgroup letters."""
    result = oracle.identity
    for letter in witness:
        value = values[letter.gen.index]
        result = oracle.mul(result, value if letter.exp > 0 else oracle.inv(value))
    return result


class GroupOracle(ABC):
    """Interface every vertex or edge group implements."""

    kind = "abstract"
    capabilities = Capability.NONE

    def __init__(self, owner: str = "", scope: Scope = Scope.VERTEX):
        self.owner = owner
        self.scope = scope

    # identity and naming

    def with_owner(self, owner: str, scope: Optional[Scope] = None) -> "GroupOracle":
        """Same group, with its generator letters attributed to another owner."""
        clone = copy.copy(self)
        clone.owner = owner
        if scope is not None:
            clone.scope = scope
        return clone

    def require(self, capability: Capability) -> None:
        if capability not in self.capabilities:
            raise CapabilityError(
                f"{self.kind} group {self.owner!r} lacks {capability.name}",
                capability=capability.name,
            )

    def generator_id(self, index: int) -> GeneratorId:
        return GeneratorId(self.scope, self.owner, index)

    def owns(self, gen: GeneratorId) -> bool:
        return gen.scope == self.scope and gen.owner == self.owner

    def name(self, index: int) -> str:
        return f"g{index}"

    def index_of(self, name: str) -> int:
        if name.startswith("g") and name[1:].isdigit():
            index = int(name[1:])
            self.letter_value(index)
            return index
        raise ForeignElementError(f"{name!r} is not a generator of {self.owner!r}")

    def resolve_name(self, name: str) -> GeneratorId:
        if "." in name:
            owner, _, name = name.partition(".")
            if owner != self.owner:
                raise ForeignElementError(f"{owner}.{name} does not belong to {self.owner!r}")
        return self.generator_id(self.index_of(name))

    def parse(self, text: str) -> Element:
        return self.evaluate(parse_word(text, self.resolve_name))

    # word problem

    @property
    @abstractmethod
    def identity(self) -> Element:
        ...

    @abstractmethod
    def mul(self, g: Element, h: Element) -> Element:
        ...

    @abstractmethod
    def inv(self, g: Element) -> Element:
        ...

    @abstractmethod
    def letter_value(self, index: int) -> Element:
        """Element denoted by the generator letter with this index."""

    @abstractmethod
    def generator_indices(self) -> List[int]:
        ...

    @abstractmethod
    def to_word(self, g: Element) -> Word:
        ...

    def eq(self, g: Element, h: Element) -> bool:
        return g == h

    def is_identity(self, g: Element) -> bool:
        return self.eq(g, self.identity)

    def power(self, g: Element, n: int) -> Element:
        base = g if n >= 0 else self.inv(g)
        result = self.identity
        for _ in range(abs(n)):
            result = self.mul(result, base)
        return result

    def conjugate(self, h: Element, g: Element) -> Element:
        """h g h^-1."""
        return self.mul(self.mul(h, g), self.inv(h))

    def commutes(self, g: Element, h: Element) -> bool:
        return self.eq(self.mul(g, h), self.mul(h, g))

    def evaluate(self, word: Word) -> Element:
        result = self.identity
        for letter in word:
            if not self.owns(letter.gen):
                raise ForeignElementError(
                    f"letter {letter.gen} does not belong to {self.owner!r}",
                    details={"letter": str(letter.gen)},
                )
            value = self.letter_value(letter.gen.index)
            result = self.mul(result, value if letter.exp > 0 else self.inv(value))
        return result

    def generators(self) -> List[Element]:
        return [self.letter_value(i) for i in self.generator_indices()]

    def generator_words(self) -> List[Word]:
        return [Word.of(self.generator_id(i)) for i in self.generator_indices()]

    def presentation_relators(self) -> List[Word]:
        return []

    def order(self) -> Optional[int]:
        return None

    def elements(self) -> List[Element]:
        self.require(Capability.ENUMERATE)
        return []

    def is_abelian(self) -> bool:
        gens = self.generators()
        return all(self.commutes(a, b) for a, b in itertools.combinations(gens, 2))

    def ball(self, radius: int) -> List[Element]:
        return self._bfs_ball(self.generators(), radius)

    def _bfs_ball(self, gens: Sequence[Element], radius: int) -> List[Element]:
        steps = list(gens) + [self.inv(g) for g in gens]
        seen = {self.identity}
        layer = [self.identity]
        found = [self.identity]
        for _ in range(radius):
            next_layer = []
            for x in layer:
                for s in steps:
                    y = self.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        next_layer.append(y)
                        found.append(y)
            layer = next_layer
        return found

    # subgroups

    def subgroup(self, gens: Iterable[Element]) -> Subgroup:
        return Subgroup(self, gens)

    def whole(self) -> Subgroup:
        return self.subgroup(self.generators())

    def is_whole(self, H: Subgroup) -> bool:
        return all(self.subgroup_contains(H, g) is not None for g in self.generators())

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        """Witness word over H's generators when g lies in H."""
        raise CapabilityError(f"{self.kind} group cannot test membership", capability="SUBGROUP_MEMBERSHIP")

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        return H.is_trivial()

    def subgroup_elements(self, H: Subgroup) -> List[Element]:
        if H.is_trivial():
            return [self.identity]
        raise CapabilityError(f"cannot enumerate an infinite subgroup of {self.owner!r}", capability="ENUMERATE")

    def subgroup_ball(self, H: Subgroup, radius: int) -> List[Element]:
        return self._bfs_ball(H.gens, radius)

    def decompose(self, H: Subgroup, g: Element) -> Tuple[Element, Element]:
        """(rep, h) with g = rep h, h in H and rep canonical for the coset gH."""
        raise CapabilityError(f"{self.kind} group has no transversal", capability="TRANSVERSAL")

    def conjugators_into(self, g: Element, H: Subgroup) -> ConjugatorSet:
        raise CapabilityError(
            f"{self.kind} group cannot enumerate conjugators", capability="CONJUGATORS_INTO_SUBGROUP"
        )

    def conjugacy_search(self, u: Element, v: Element) -> Optional[Element]:
        """h with u = h v h^-1, or None."""
        raise CapabilityError(f"{self.kind} group cannot decide conjugacy", capability="CONJUGACY")

    def centralizer_gens(self, g: Element) -> List[Element]:
        raise CapabilityError(f"{self.kind} group cannot compute centralizers", capability="CENTRALIZER_GENS")

    def center_gens(self) -> List[Element]:
        raise CapabilityError(f"{self.kind} group cannot compute its center", capability="CENTER_GENS")

    def outer_order(self, phi: "Monomorphism", limit: int = DEFAULT_OUTER_ORDER_LIMIT) -> OuterOrder:
        raise CapabilityError(f"{self.kind} group cannot compute outer orders", capability="OUTER_ORDER")

    def equalizer(self, phi: "Monomorphism") -> Subgroup:
        """Subgroup {c in domain(phi) : phi(c) = c}."""
        if not phi.domain.is_finite():
            raise CapabilityError(f"fixed points of an infinite subgroup of {self.owner!r}")
        fixed = [c for c in phi.domain.elements() if self.eq(phi.apply(c), c)]
        return self.subgroup(fixed)

    def as_group(self, H: Subgroup) -> Tuple["GroupOracle", "Monomorphism"]:
        """A standalone oracle isomorphic to H together with its embedding."""
        raise CapabilityError(f"{self.kind} group cannot realize subgroups as groups")


class FiniteGroup(GroupOracle):
    """Finite group given by its multiplication table; elements are row indices."""

    kind = "finite"
    capabilities = Capability.ALL

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        gens: Optional[Sequence[int]] = None,
        owner: str = "",
        scope: Scope = Scope.VERTEX,
    ):
        super().__init__(owner, scope)
        self.table: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(x) for x in row) for row in table)
        self.n = len(self.table)
        violations = self._check_table()
        if violations:
            raise BackendValidationError("multiplication table is not a group", violations)
        self._identity = next(
            e for e in range(self.n)
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.n))
        )
        self._inverse = tuple(self.table[x].index(self._identity) for x in range(self.n))
        if gens is None:
            self._gens = tuple(self._greedy_generators(range(self.n)))
        else:
            self._gens = tuple(int(g) for g in gens)
            for g in self._gens:
                self.letter_value(g)
        self._words = self._spanning_words()

    def _check_table(self) -> List[str]:
        n = self.n
        if n == 0:
            return ["empty table"]
        violations = []
        for r, row in enumerate(self.table):
            if len(row) != n:
                violations.append(f"row {r} has {len(row)} entries, expected {n}")
        if violations:
            return violations
        full = set(range(n))
        for r in range(n):
            if set(self.table[r]) != full:
                violations.append(f"row {r} is not a permutation of 0..{n - 1}")
        for c in range(n):
            if {self.table[r][c] for r in range(n)} != full:
                violations.append(f"column {c} is not a permutation of 0..{n - 1}")
        if violations:
            return violations
        if not any(all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)) for e in range(n)):
            return ["no identity element"]
        t = self.table
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        return [f"associativity fails for ({a}, {b}, {c})"]
        return []

    def _closure(self, gens: Sequence[int]) -> set:
        seen = {self._identity}
        queue = deque([self._identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def _greedy_generators(self, elements: Iterable[int]) -> List[int]:
        gens: List[int] = []
        closure = {self._identity}
        for x in sorted(elements):
            if x not in closure:
                gens.append(x)
                closure = self._closure(gens)
        return gens

    def _spanning_words(self) -> Dict[int, Word]:
        words = {self._identity: Word()}
        queue = deque([self._identity])
        while queue:
            x = queue.popleft()
            for g in self._gens:
                for value, exp in ((g, 1), (self._inverse[g], -1)):
                    y = self.table[x][value]
                    if y not in words:
                        words[y] = Word(words[x].letters + (Letter(self.generator_id(g), exp),))
                        queue.append(y)
        if len(words) != self.n:
            raise BackendValidationError(
                "declared generators do not generate the group",
                [f"generators {list(self._gens)} reach {len(words)} of {self.n} elements"],
            )
        return words

    @property
    def identity(self) -> int:
        return self._identity

    def mul(self, g: Element, h: Element) -> int:
        return self.table[g][h]  # type: ignore[index]

    def inv(self, g: Element) -> int:
        return self._inverse[g]  # type: ignore[index]

    def letter_value(self, index: int) -> int:
        if not 0 <= index < self.n:
            raise ForeignElementError(f"no element {index} in a group of order {self.n}")
        return index

    def generator_indices(self) -> List[int]:
        return list(self._gens)

    def to_word(self, g: Element) -> Word:
        return self._words[g]  # type: ignore[index]

    def with_owner(self, owner: str, scope: Optional[Scope] = None) -> "FiniteGroup":
        clone = copy.copy(self)
        clone.owner = owner
        if scope is not None:
            clone.scope = scope
        clone._words = clone._spanning_words()
        return clone

    def presentation_relators(self) -> List[Word]:
        """Relators read off the Cayley graph over the spanning words."""
        relators: List[Word] = []
        seen = set()
        for x in range(self.n):
            for g in self._gens:
                y = self.table[x][g]
                rel = free_reduce(
                    Word(self._words[x].letters + (Letter(self.generator_id(g), 1),) + invert(self._words[y]).letters)
                )
                if rel and rel not in seen and invert(rel) not in seen:
                    seen.add(rel)
                    relators.append(rel)
        return relators

    def order(self) -> int:
        return self.n

    def elements(self) -> List[int]:
        return list(range(self.n))

    def subgroup(self, gens: Iterable[Element]) -> Subgroup:
        gens = [self.letter_value(int(g)) for g in gens]  # type: ignore[arg-type]
        witnesses: Dict[int, Tuple[Tuple[int, int], ...]] = {self._identity: ()}
        queue = deque([self._identity])
        while queue:
            x = queue.popleft()
            for j, g in enumerate(gens):
                for value, exp in ((g, 1), (self._inverse[g], -1)):
                    y = self.table[x][value]
                    if y not in witnesses:
                        witnesses[y] = witnesses[x] + ((j, exp),)
                        queue.append(y)
        return Subgroup(self, gens, data=witnesses)

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        path = H.data.get(g)
        if path is None:
            return None
        return Word(tuple(subgroup_letter(j, exp) for j, exp in path))

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        return True

    def subgroup_elements(self, H: Subgroup) -> List[int]:
        return sorted(H.data)

    def decompose(self, H: Subgroup, g: Element) -> Tuple[int, int]:
        coset = {self.table[g][h] for h in H.data}  # type: ignore[index]
        rep = self._identity if self._identity in coset else min(coset)
        return rep, self.table[self._inverse[rep]][g]  # type: ignore[index]

    def conjugators_into(self, g: Element, H: Subgroup) -> ConjugatorSet:
        pairs: List[Tuple[Element, Element]] = []
        seen = set()
        for h in range(self.n):
            c = self.table[self.table[self._inverse[h]][g]][h]  # type: ignore[index]
            if c in H.data and c not in seen:
                seen.add(c)
                pairs.append((h, c))
        pairs.sort(key=lambda pair: pair[1])
        return ConjugatorSet(pairs, exhaustive=True)

    def conjugacy_search(self, u: Element, v: Element) -> Optional[int]:
        for h in range(self.n):
            if self.conjugate(h, v) == u:
                return h
        return None

    def centralizer_gens(self, g: Element) -> List[int]:
        return self._greedy_generators(h for h in range(self.n) if self.commutes(g, h))

    def center_gens(self) -> List[int]:
        return self._greedy_generators(
            z for z in range(self.n) if all(self.commutes(z, g) for g in self._gens)
        )

    def is_central(self, z: Element) -> bool:
        return all(self.commutes(z, g) for g in self._gens)

    def outer_order(self, phi: "Monomorphism", limit: int = DEFAULT_OUTER_ORDER_LIMIT) -> OuterOrder:
        images = {x: phi.apply(x) for x in range(self.n)}
        current = dict(images)
        for n in range(1, limit + 1):
            for a0 in range(self.n):
                if all(current[g] == self.conjugate(a0, g) for g in self._gens):
                    logger.debug("Outer order found", owner=self.owner, n=n, a0=a0)
                    return OuterOrder(OuterOrderKind.FINITE, n, a0)
            current = {x: images[current[x]] for x in range(self.n)}
        return OuterOrder(OuterOrderKind.UNKNOWN)

    def equalizer(self, phi: "Monomorphism") -> Subgroup:
        fixed = [c for c in phi.domain.elements() if phi.apply(c) == c]
        return self.subgroup(self._greedy_generators(fixed))

    def as_group(self, H: Subgroup) -> Tuple["FiniteGroup", "Monomorphism"]:
        elements = self.subgroup_elements(H)
        position = {x: i for i, x in enumerate(elements)}
        table = [[position[self.table[a][b]] for b in elements] for a in elements]
        group = FiniteGroup(table, scope=Scope.EDGE_GROUP)
        embedding = Monomorphism(group.whole(), H, [elements[i] for i in group.generators()])
        return group, embedding


class FreeAbelianGroup(GroupOracle):
    """Z^rank with integer-vector elements and lattice subgroups."""

    kind = "abelian"
    capabilities = INFINITE_BACKEND

    def __init__(self, rank: int, owner: str = "", scope: Scope = Scope.VERTEX):
        super().__init__(owner, scope)
        if rank < 1:
            raise BackendValidationError("free abelian rank must be positive", [f"rank={rank}"])
        self.rank = rank
        self._identity = (0,) * rank

    @property
    def identity(self) -> Tuple[int, ...]:
        return self._identity

    def _vector(self, g: Element) -> Tuple[int, ...]:
        if not isinstance(g, tuple) or len(g) != self.rank:
            raise ForeignElementError(f"{g!r} is not a vector of length {self.rank}")
        return g

    def mul(self, g: Element, h: Element) -> Tuple[int, ...]:
        return tuple(a + b for a, b in zip(self._vector(g), self._vector(h)))

    def inv(self, g: Element) -> Tuple[int, ...]:
        return tuple(-a for a in self._vector(g))

    def power(self, g: Element, n: int) -> Tuple[int, ...]:
        return tuple(n * a for a in self._vector(g))

    def letter_value(self, index: int) -> Tuple[int, ...]:
        if not 0 <= index < self.rank:
            raise ForeignElementError(f"no basis vector {index} in rank {self.rank}")
        return tuple(1 if i == index else 0 for i in range(self.rank))

    def generator_indices(self) -> List[int]:
        return list(range(self.rank))

    def to_word(self, g: Element) -> Word:
        letters: Tuple[Letter, ...] = ()
        for i, a in enumerate(self._vector(g)):
            letters += Word.of(self.generator_id(i), a).letters
        return Word(letters)

    def presentation_relators(self) -> List[Word]:
        relators = []
        for i, j in itertools.combinations(range(self.rank), 2):
            x, y = Word.of(self.generator_id(i)), Word.of(self.generator_id(j))
            relators.append(Word(x.letters + y.letters + invert(x).letters + invert(y).letters))
        return relators

    def is_abelian(self) -> bool:
        return True

    def subgroup(self, gens: Iterable[Element]) -> Subgroup:
        gens = [self._vector(tuple(g)) for g in gens]  # type: ignore[arg-type]
        return Subgroup(self, gens, data=hermite_columns(gens, self.rank))

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        x = solve_integer(H.gens, self._vector(g))  # type: ignore[arg-type]
        if x is None:
            return None
        return subgroup_word(x)

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        return not H.data

    def decompose(self, H: Subgroup, g: Element) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        remainder = list(self._vector(g))
        for column in H.data:
            r = pivot_row(column)
            q = remainder[r] // column[r]
            remainder = [a - q * b for a, b in zip(remainder, column)]
        rep = tuple(remainder)
        return rep, self.mul(self.inv(rep), g)

    def conjugators_into(self, g: Element, H: Subgroup) -> ConjugatorSet:
        if self.subgroup_contains(H, g) is None:
            return ConjugatorSet([], exhaustive=True)
        return ConjugatorSet([(self.identity, g)], exhaustive=True)

    def conjugacy_search(self, u: Element, v: Element) -> Optional[Tuple[int, ...]]:
        return self.identity if u == v else None

    def centralizer_gens(self, g: Element) -> List[Element]:
        return self.generators()

    def center_gens(self) -> List[Element]:
        return self.generators()

    def matrix_of(self, phi: "Monomorphism") -> List[List[int]]:
        columns = [phi.apply(e) for e in self.generators()]
        return [[columns[c][r] for c in range(self.rank)] for r in range(self.rank)]

    def outer_order(self, phi: "Monomorphism", limit: int = DEFAULT_OUTER_ORDER_LIMIT) -> OuterOrder:
        matrix = sympy.Matrix(self.matrix_of(phi))
        x = sympy.Symbol("x")
        _, factors = sympy.factor_list(matrix.charpoly(x).as_expr(), x)
        indices = []
        for factor, _multiplicity in factors:
            k = _cyclotomic_index(sympy.Poly(factor, x))
            if k is None:
                logger.debug("Non-cyclotomic characteristic factor", owner=self.owner, factor=str(factor))
                return OuterOrder(OuterOrderKind.INFINITE)
            indices.append(k)
        period = math.lcm(*indices) if indices else 1
        identity = sympy.eye(self.rank)
        if matrix ** period != identity:
            return OuterOrder(OuterOrderKind.INFINITE)
        for d in sympy.divisors(period):
            if matrix ** d == identity:
                return OuterOrder(OuterOrderKind.FINITE, d, self.identity)
        return OuterOrder(OuterOrderKind.UNKNOWN)

    def equalizer(self, phi: "Monomorphism") -> Subgroup:
        basis = phi.domain.data
        images = [phi.apply(b) for b in basis]
        rows = [[images[j][r] - basis[j][r] for j in range(len(basis))] for r in range(self.rank)]
        kernel = integer_kernel(rows, len(basis))
        return self.subgroup(mat_vec(basis, x, self.rank) for x in kernel)

    def as_group(self, H: Subgroup) -> Tuple[GroupOracle, "Monomorphism"]:
        basis = list(H.data)
        if not basis:
            trivial = FiniteGroup([[0]], scope=Scope.EDGE_GROUP)
            return trivial, Monomorphism(trivial.whole(), H, [])
        group = FreeAbelianGroup(len(basis), scope=Scope.EDGE_GROUP)
        return group, Monomorphism(group.whole(), H, basis)


def _cyclotomic_index(poly: sympy.Poly) -> Optional[int]:
    degree = poly.degree()
    if degree < 1:
        return None
    x = poly.gens[0]
    monic = poly.monic()
    for k in range(1, 2 * degree * degree + 3):
        if sympy.totient(k) != degree:
            continue
        if sympy.Poly(sympy.cyclotomic_poly(k, x), x) == monic:
            return k
    return None


class _CyclicData(NamedTuple):
    root: Tuple[int, ...]
    step: int
    exponents: Tuple[int, ...]
    coefficients: Tuple[int, ...]


class FreeGroup(GroupOracle):
    """Free group of a given rank; elements are reduced tuples of signed 1-based letters.

    Subgroups are restricted to cyclic ones (and the whole group).
    """

    kind = "free"
    capabilities = INFINITE_BACKEND

    def __init__(self, rank: int, owner: str = "", scope: Scope = Scope.VERTEX):
        super().__init__(owner, scope)
        if rank < 1:
            raise BackendValidationError("free rank must be positive", [f"rank={rank}"])
        self.rank = rank

    @property
    def identity(self) -> Tuple[int, ...]:
        return ()

    @staticmethod
    def reduce(letters: Iterable[int]) -> Tuple[int, ...]:
        stack: List[int] = []
        for a in letters:
            if stack and stack[-1] == -a:
                stack.pop()
            else:
                stack.append(a)
        return tuple(stack)

    def mul(self, g: Element, h: Element) -> Tuple[int, ...]:
        return self.reduce(g + h)  # type: ignore[operator]

    def inv(self, g: Element) -> Tuple[int, ...]:
        return tuple(-a for a in reversed(g))  # type: ignore[call-overload]

    def letter_value(self, index: int) -> Tuple[int, ...]:
        if not 0 <= index < self.rank:
            raise ForeignElementError(f"no free generator {index} in rank {self.rank}")
        return (index + 1,)

    def generator_indices(self) -> List[int]:
        return list(range(self.rank))

    def to_word(self, g: Element) -> Word:
        return Word(tuple(Letter(self.generator_id(abs(a) - 1), 1 if a > 0 else -1) for a in g))  # type: ignore[attr-defined]

    def is_abelian(self) -> bool:
        return self.rank == 1

    def cyclic_core(self, g: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """(p, c) with g = p c p^-1 and c cyclically reduced."""
        i, j = 0, len(g) - 1
        while i < j and g[i] == -g[j]:
            i += 1
            j -= 1
        return g[:i], g[i:j + 1]

    def primitive_root(self, g: Tuple[int, ...]) -> Tuple[Tuple[int, ...], int]:
        """(r, m) with g = r^m and r not a proper power; g must be nontrivial."""
        p, c = self.cyclic_core(g)
        n = len(c)
        for period in range(1, n + 1):
            if n % period == 0 and c == c[:period] * (n // period):
                root = self.mul(self.mul(p, c[:period]), self.inv(p))
                return root, n // period
        raise ForeignElementError("the identity has no primitive root")

    def _cyclic_exponent(self, root: Tuple[int, ...], g: Tuple[int, ...]) -> Optional[int]:
        if not g:
            return 0
        r, m = self.primitive_root(g)
        if r == root:
            return m
        if r == self.inv(root):
            return -m
        return None

    def subgroup(self, gens: Iterable[Element]) -> Subgroup:
        gens = [self.reduce(g) for g in gens]  # type: ignore[arg-type]
        standard = {self.letter_value(i) for i in range(self.rank)}
        if self.rank > 1 and standard <= set(gens):
            return Subgroup(self, gens, whole=True)
        nontrivial = [g for g in gens if g]
        if not nontrivial:
            return Subgroup(self, gens, data=None)
        root, _ = self.primitive_root(nontrivial[0])
        exponents = []
        for g in gens:
            e = self._cyclic_exponent(root, g)
            if e is None:
                raise CapabilityError(
                    "free-group subgroups must be cyclic", capability="SUBGROUP_MEMBERSHIP"
                )
            exponents.append(e)
        step, coefficients = 0, [0] * len(gens)
        for i, e in enumerate(exponents):
            d, a, b = extended_gcd(step, e)
            coefficients = [a * c for c in coefficients]
            coefficients[i] += b
            step = d
        return Subgroup(self, gens, data=_CyclicData(root, step, tuple(exponents), tuple(coefficients)))

    def _subgroup_generator(self, H: Subgroup) -> Tuple[int, ...]:
        data: _CyclicData = H.data
        return self.power(data.root, data.step)

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        g = self.reduce(g)  # type: ignore[arg-type]
        if H.whole:
            return Word(tuple(subgroup_letter(abs(a) - 1, 1 if a > 0 else -1) for a in g))
        if not g:
            return Word()
        if H.data is None:
            return None
        data: _CyclicData = H.data
        e = self._cyclic_exponent(data.root, g)
        if e is None or e % data.step:
            return None
        unit = subgroup_word(data.coefficients)
        q = e // data.step
        return Word((unit if q > 0 else invert(unit)).letters * abs(q))

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        return not H.whole and H.data is None

    def decompose(self, H: Subgroup, g: Element) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        g = self.reduce(g)  # type: ignore[arg-type]
        if H.whole:
            return (), g
        if H.data is None:
            return g, ()
        w = self._subgroup_generator(H)
        bound = 2 * len(g) + 2
        candidates = [self.mul(g, self.power(w, k)) for k in range(-bound, bound + 1)]
        rep = min(candidates, key=lambda x: (len(x), x))
        return rep, self.mul(self.inv(rep), g)

    def conjugators_into(self, g: Element, H: Subgroup) -> ConjugatorSet:
        g = self.reduce(g)  # type: ignore[arg-type]
        if not g:
            return ConjugatorSet([((), ())], exhaustive=True)
        if H.whole:
            return ConjugatorSet([((), g)], exhaustive=False, centralizer=self.centralizer_gens(g))
        if H.data is None:
            return ConjugatorSet([], exhaustive=True)
        _, core = self.cyclic_core(g)
        _, w_core = self.cyclic_core(self._subgroup_generator(H))
        if len(core) % len(w_core):
            return ConjugatorSet([], exhaustive=True)
        m = len(core) // len(w_core)
        w = self._subgroup_generator(H)
        for e in (m, -m):
            candidate = self.power(w, e)
            h = self.conjugacy_search(g, candidate)
            if h is not None:
                return ConjugatorSet([(h, candidate)], exhaustive=True)
        return ConjugatorSet([], exhaustive=True)

    def conjugacy_search(self, u: Element, v: Element) -> Optional[Tuple[int, ...]]:
        pu, cu = self.cyclic_core(self.reduce(u))  # type: ignore[arg-type]
        pv, cv = self.cyclic_core(self.reduce(v))  # type: ignore[arg-type]
        if len(cu) != len(cv):
            return None
        if not cu:
            return ()
        for i in range(len(cv)):
            if cv[i:] + cv[:i] == cu:
                shift = cv[:i]
                return self.mul(self.mul(pu, self.inv(shift)), self.inv(pv))
        return None

    def centralizer_gens(self, g: Element) -> List[Element]:
        g = self.reduce(g)  # type: ignore[arg-type]
        if not g:
            return self.generators()
        return [self.primitive_root(g)[0]]

    def center_gens(self) -> List[Element]:
        return self.generators() if self.rank == 1 else []

    def substitute(self, g: Tuple[int, ...], images: Sequence[Tuple[int, ...]]) -> Tuple[int, ...]:
        result: Tuple[int, ...] = ()
        for a in g:
            image = images[abs(a) - 1]
            result = self.mul(result, image if a > 0 else self.inv(image))
        return result

    def outer_order(self, phi: "Monomorphism", limit: int = DEFAULT_OUTER_ORDER_LIMIT) -> OuterOrder:
        basis = self.generators()
        images = [phi.apply(x) for x in basis]
        current = list(images)
        for n in range(1, limit + 1):
            h = self.conjugacy_search(current[0], basis[0])
            if h is not None:
                for k in range(-limit, limit + 1):
                    a0 = self.mul(h, self.power(basis[0], k))
                    if all(current[i] == self.conjugate(a0, basis[i]) for i in range(self.rank)):
                        return OuterOrder(OuterOrderKind.FINITE, n, a0)
            current = [self.substitute(c, images) for c in current]
        return OuterOrder(OuterOrderKind.UNKNOWN)

    def equalizer(self, phi: "Monomorphism") -> Subgroup:
        if phi.domain.whole:
            raise CapabilityError("fixed subgroup of a free automorphism", capability="OUTER_ORDER")
        if phi.domain.data is None:
            return self.subgroup([])
        w = self._subgroup_generator(phi.domain)
        return self.subgroup([w] if phi.apply(w) == w else [])

    def as_group(self, H: Subgroup) -> Tuple[GroupOracle, "Monomorphism"]:
        if H.whole:
            group = FreeGroup(self.rank, scope=Scope.EDGE_GROUP)
            return group, Monomorphism(group.whole(), H, self.generators())
        if H.data is None:
            trivial = FiniteGroup([[0]], scope=Scope.EDGE_GROUP)
            return trivial, Monomorphism(trivial.whole(), H, [])
        group = FreeGroup(1, scope=Scope.EDGE_GROUP)
        return group, Monomorphism(group.whole(), H, [self._subgroup_generator(H)])


class PresentedGroup(FreeGroup):
    """Symbolic group given by a presentation; only presentation-level operations apply.

    Elements are freely reduced words, so equality is only a sufficient test
    and membership is recognised for single generators.
    """

    kind = "presented"
    capabilities = Capability.NONE

    def __init__(self, names: Sequence[str], relators: Sequence[Sequence[int]] = (), owner: str = ""):
        if not names:
            raise BackendValidationError("a presented group needs generators", ["gens is empty"])
        if len(set(names)) != len(names):
            raise BackendValidationError("duplicate generator names", [", ".join(names)])
        super().__init__(len(names), owner)
        self.names = list(names)
        self.relators = [self.reduce(r) for r in relators]

    def name(self, index: int) -> str:
        return self.names[index]

    def index_of(self, name: str) -> int:
        if name in self.names:
            return self.names.index(name)
        raise ForeignElementError(f"{name!r} is not a generator of {self.owner!r}")

    def presentation_relators(self) -> List[Word]:
        return [self.to_word(r) for r in self.relators]

    def subgroup(self, gens: Iterable[Element]) -> Subgroup:
        return Subgroup(self, [self.reduce(g) for g in gens])  # type: ignore[arg-type]

    def subgroup_contains(self, H: Subgroup, g: Element) -> Optional[Word]:
        g = self.reduce(g)  # type: ignore[arg-type]
        if not g:
            return Word()
        for j, gen in enumerate(H.gens):
            if gen == g:
                return Word((subgroup_letter(j, 1),))
            if self.inv(gen) == g:
                return Word((subgroup_letter(j, -1),))
        raise CapabilityError(
            f"symbolic group {self.owner!r} decides membership only for subgroup generators",
            capability="SUBGROUP_MEMBERSHIP",
        )

    def subgroup_is_finite(self, H: Subgroup) -> bool:
        return H.is_trivial()

    def decompose(self, H: Subgroup, g: Element) -> Tuple[Element, Element]:
        return GroupOracle.decompose(self, H, g)

    def conjugators_into(self, g: Element, H: Subgroup) -> ConjugatorSet:
        return GroupOracle.conjugators_into(self, g, H)

    def conjugacy_search(self, u: Element, v: Element) -> Optional[Element]:
        if self.reduce(u) == self.reduce(v):  # type: ignore[arg-type]
            return ()
        return GroupOracle.conjugacy_search(self, u, v)

    def centralizer_gens(self, g: Element) -> List[Element]:
        return GroupOracle.centralizer_gens(self, g)

    def center_gens(self) -> List[Element]:
        return GroupOracle.center_gens(self)

    def outer_order(self, phi: "Monomorphism", limit: int = DEFAULT_OUTER_ORDER_LIMIT) -> OuterOrder:
        return GroupOracle.outer_order(self, phi, limit)

    def equalizer(self, phi: "Monomorphism") -> Subgroup:
        raise CapabilityError(f"symbolic group {self.owner!r} has no fixed-point computation")


class Monomorphism:
    """Injective homomorphism from a subgroup onto a subgroup, given on generators."""

    def __init__(self, domain: Subgroup, codomain: Subgroup, images: Sequence[Element], check: bool = False):
        if len(images) != len(domain.gens):
            raise BackendValidationError(
                "monomorphism needs one image per domain generator",
                [f"{len(domain.gens)} generators, {len(images)} images"],
            )
        self.domain = domain
        self.codomain = codomain
        self.images: Tuple[Element, ...] = tuple(images)
        if check:
            violations = self.validate()
            if violations:
                raise BackendValidationError("invalid monomorphism", violations)

    @property
    def source(self) -> GroupOracle:
        return self.domain.ambient

    @property
    def target(self) -> GroupOracle:
        return self.codomain.ambient

    def apply(self, x: Element) -> Element:
        witness = self.source.subgroup_contains(self.domain, x)
        if witness is None:
            raise ForeignElementError(
                f"{x!r} is outside the domain of a monomorphism from {self.source.owner!r}"
            )
        return evaluate_over(self.target, self.images, witness)

    def inverse(self) -> "Monomorphism":
        return Monomorphism(self.target.subgroup(self.images), self.domain, self.domain.gens)

    def compose(self, after: "Monomorphism") -> "Monomorphism":
        """after composed with self (self applied first)."""
        images = [after.apply(img) for img in self.images]
        return Monomorphism(self.domain, after.target.subgroup(images), images)

    def is_identity(self) -> bool:
        return self.source is self.target and all(
            self.target.eq(img, gen) for img, gen in zip(self.images, self.domain.gens)
        )

    def validate(self) -> List[str]:
        """Violations of homomorphism, injectivity and image conditions."""
        src, tgt = self.source, self.target
        if src.kind == "presented" or tgt.kind == "presented":
            logger.debug("Symbolic monomorphism left unchecked", source=src.owner, target=tgt.owner)
            return []
        violations: List[str] = []
        for i, img in enumerate(self.images):
            if tgt.subgroup_contains(self.codomain, img) is None:
                violations.append(f"image of generator {i} lies outside the declared image subgroup")
        image_group = tgt.subgroup(self.images)
        for j, gen in enumerate(self.codomain.gens):
            if tgt.subgroup_contains(image_group, gen) is None:
                violations.append(f"image subgroup generator {j} is not hit")
        violations.extend(self._check_homomorphism())
        return violations

    def _check_homomorphism(self) -> List[str]:
        src, tgt = self.source, self.target
        if Capability.ENUMERATE in src.capabilities:
            mapping = {src.identity: tgt.identity}
            queue = deque([src.identity])
            while queue:
                x = queue.popleft()
                for g, img in zip(self.domain.gens, self.images):
                    for gv, iv in ((g, img), (src.inv(g), tgt.inv(img))):
                        y = src.mul(x, gv)
                        value = tgt.mul(mapping[x], iv)
                        if y in mapping:
                            if not tgt.eq(mapping[y], value):
                                return ["generator images do not respect the relations"]
                        else:
                            mapping[y] = value
                            queue.append(y)
            if len(set(mapping.values())) != len(mapping):
                return ["map is not injective"]
            return []
        if isinstance(src, FreeAbelianGroup):
            gens = [list(g) for g in self.domain.gens]
            k = len(gens)
            violations = []
            for a, b in itertools.combinations(self.images, 2):
                if not tgt.commutes(a, b):
                    return ["images of an abelian group do not commute"]
            rows = [[gens[j][r] for j in range(k)] for r in range(src.rank)]
            for relation in integer_kernel(rows, k):
                value = tgt.identity
                for img, e in zip(self.images, relation):
                    value = tgt.mul(value, tgt.power(img, e))
                if not tgt.is_identity(value):
                    violations.append("generator images do not respect the relations")
                    break
            domain_rank = lattice_rank(gens, src.rank)
            if isinstance(tgt, FreeAbelianGroup):
                if lattice_rank([list(img) for img in self.images], tgt.rank) != domain_rank:
                    violations.append("map is not injective")
            elif isinstance(tgt, FreeGroup):
                if domain_rank > 1 or (domain_rank == 1 and all(tgt.is_identity(i) for i in self.images)):
                    violations.append("map is not injective")
            elif domain_rank > 0:
                violations.append("map is not injective")
            return violations
        if isinstance(src, FreeGroup):
            if self.domain.whole or self.domain.data is None:
                return []
            data: _CyclicData = self.domain.data
            w_image = evaluate_over(tgt, self.images, subgroup_word(data.coefficients))
            for img, e in zip(self.images, data.exponents):
                if not tgt.eq(img, tgt.power(w_image, e // data.step)):
                    return ["generator images do not respect the relations"]
            if Capability.ENUMERATE in tgt.capabilities or tgt.is_identity(w_image):
                return ["map is not injective"]
            return []
        logger.debug("Monomorphism check skipped", source=src.kind, target=tgt.kind)
        return []


def is_central(oracle: GroupOracle, z: Element) -> bool:
    return all(oracle.commutes(z, s) for s in oracle.generators())


def center_meet(oracle: GroupOracle, H: Subgroup) -> List[Element]:
    """Generators of Z(G) intersected with H."""
    if oracle.is_abelian():
        return [g for g in H.gens if not oracle.is_identity(g)]
    if Capability.ENUMERATE in oracle.capabilities:
        return greedy_generators(oracle, [h for h in H.elements() if is_central(oracle, h)])
    if oracle.kind == "free":
        return []
    raise CapabilityError(f"cannot intersect the center of {oracle.kind} group {oracle.owner!r}")
