"""Signed-letter words: the element syntax shared by every backend and by fundamental groups.

A word mixes vertex-group generators, stable letters and subgroup-generator
letters; each letter carries an explicit scope so one word can live in a
whole graph of groups.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterator, List, NamedTuple, Optional, Tuple, Union, overload

from pydantic_core import core_schema


class Scope(str, Enum):
    """Where a generator lives."""
    VERTEX = "vertex"
    STABLE = "stable"
    EDGE_GROUP = "edge"


class GeneratorId(NamedTuple):
    scope: Scope
    owner: str
    index: int


class Letter(NamedTuple):
    gen: GeneratorId
    exp: int

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.exp)


def _word_error(code: str, message: str) -> Exception:
    from .types import WordError

    return WordError(code, message)


@dataclass(frozen=True)
class Word:
    """Finite sequence of letters; exponents are always +1 or -1."""

    letters: Tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        for letter in self.letters:
            if letter.exp not in (1, -1):
                raise _word_error("BAD_EXPONENT", f"letter exponent must be +1 or -1, got {letter.exp}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    @overload
    def __getitem__(self, item: int) -> Letter: ...

    @overload
    def __getitem__(self, item: slice) -> "Word": ...

    def __getitem__(self, item: Union[int, slice]) -> Union[Letter, "Word"]:
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def inverse(self) -> "Word":
        return invert(self)

    def is_empty(self) -> bool:
        return not self.letters

    @classmethod
    def of(cls, gen: GeneratorId, exp: int = 1) -> "Word":
        """Word for gen^exp, one letter per unit of exponent."""
        sign = 1 if exp > 0 else -1
        return cls(tuple(Letter(gen, sign) for _ in range(abs(exp))))

    @classmethod
    def __get_pydantic_core_schema__(cls, source: Any, handler: Any) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            _coerce_word,
            serialization=core_schema.plain_serializer_function_ser_schema(str),
        )


EMPTY = Word()


def _coerce_word(value: Any) -> Word:
    if isinstance(value, Word):
        return value
    if isinstance(value, str):
        return parse_word(value)
    raise ValueError(f"cannot interpret {value!r} as a word")


def free_reduce(w: Word) -> Word:
    stack: List[Letter] = []
    for letter in w.letters:
        if stack and stack[-1].gen == letter.gen and stack[-1].exp == -letter.exp:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def concat(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters)


def invert(w: Word) -> Word:
    return Word(tuple(letter.inverse() for letter in reversed(w.letters)))


def cyclic_shift(w: Word, k: int) -> Word:
    """Rotate w left by k letters."""
    if not 0 <= k <= len(w):
        raise _word_error("SHIFT_OUT_OF_RANGE", f"shift {k} outside 0..{len(w)}")
    return Word(w.letters[k:] + w.letters[:k])


def power(w: Word, n: int) -> Word:
    base = w if n >= 0 else invert(w)
    return Word(base.letters * abs(n))


def product(words: List[Word]) -> Word:
    letters: Tuple[Letter, ...] = ()
    for w in words:
        letters += w.letters
    return Word(letters)


def commutator(u: Word, v: Word) -> Word:
    return product([u, v, invert(u), invert(v)])


# Literal syntax

Namer = Callable[[GeneratorId], str]
Resolver = Callable[[str], GeneratorId]

_ATOM = re.compile(r"^(?P<name>[A-Za-z_][\w.']*)(?:\^(?P<exp>-?\d+))?$")
_COMMUTATOR = re.compile(r"^\[(?P<left>[^,\]]+),(?P<right>[^\]]+)\](?:\^(?P<exp>-?\d+))?$")
_DEFAULT_VERTEX = re.compile(r"^(?:(?P<owner>[\w']+)\.)?g(?P<index>\d+)$")
_DEFAULT_SUBGROUP = re.compile(r"^h(?P<index>\d+)$")


def default_namer(gen: GeneratorId) -> str:
    if gen.scope == Scope.STABLE:
        return f"t{gen.owner}"
    if gen.scope == Scope.EDGE_GROUP:
        return f"h{gen.index}" if not gen.owner else f"{gen.owner}.h{gen.index}"
    return f"{gen.owner}.g{gen.index}" if gen.owner else f"g{gen.index}"


def default_resolver(name: str) -> GeneratorId:
    """Resolve `v.g3`, `g3`, `h2` and `t<edge>` without any context."""
    match = _DEFAULT_VERTEX.match(name)
    if match:
        return GeneratorId(Scope.VERTEX, match.group("owner") or "", int(match.group("index")))
    match = _DEFAULT_SUBGROUP.match(name)
    if match:
        return GeneratorId(Scope.EDGE_GROUP, "", int(match.group("index")))
    if name.startswith("t") and len(name) > 1:
        return GeneratorId(Scope.STABLE, name[1:], 0)
    raise _word_error("UNKNOWN_GENERATOR", f"cannot resolve generator {name!r}")


def format_word(w: Word, namer: Optional[Namer] = None) -> str:
    """Render w in literal syntax, compressing runs of one letter into powers."""
    if not w.letters:
        return "eps"
    name_of = namer or default_namer
    atoms: List[str] = []
    run_letter = w.letters[0]
    run = 0
    for letter in w.letters + (None,):  # type: ignore[operator]
        if letter == run_letter:
            run += 1
            continue
        exp = run * run_letter.exp
        name = name_of(run_letter.gen)
        atoms.append(name if exp == 1 else f"{name}^{exp}")
        if letter is not None:
            run_letter, run = letter, 1
    return " ".join(atoms)


def parse_word(text: str, resolve: Optional[Resolver] = None) -> Word:
    """Parse whitespace-separated atoms `x`, `x^k`, `[x,y]` or `eps`."""
    resolver = resolve or default_resolver
    letters: Tuple[Letter, ...] = ()
    for token in text.split():
        if token in ("eps", "1"):
            continue
        commutator_match = _COMMUTATOR.match(token)
        if commutator_match:
            left = Word.of(resolver(commutator_match.group("left").strip()))
            right = Word.of(resolver(commutator_match.group("right").strip()))
            piece = commutator(left, right)
            exp = int(commutator_match.group("exp") or 1)
            letters += power(piece, exp).letters
            continue
        atom = _ATOM.match(token)
        if not atom:
            raise _word_error("WORD_SYNTAX", f"malformed word atom {token!r}")
        gen = resolver(atom.group("name"))
        letters += Word.of(gen, int(atom.group("exp") or 1)).letters
    return Word(letters)
