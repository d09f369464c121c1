"""Type definitions for the Bass-Serre toolkit."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .words import Word


class LogLevel(str, Enum):
    """Logging levels."""
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


class Verdict(str, Enum):
    """Outcome of a decision procedure."""
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class OuterOrderKind(str, Enum):
    """Outcome of an outer-automorphism order computation."""
    FINITE = "FINITE"
    INFINITE = "INFINITE"
    UNKNOWN = "UNKNOWN"


class CommuteCase(str, Enum):
    """Cases of the commutation theorems (amalgam, HNN and graph level)."""
    C_SEQUENCE = "C_SEQUENCE"
    EDGE_CONJUGATE = "EDGE_CONJUGATE"
    SAME_FACTOR = "SAME_FACTOR"
    SAME_CONJUGATE_OF_A = "SAME_CONJUGATE_OF_A"
    CYCLIC = "CYCLIC"
    CIRCUIT_LABEL = "CIRCUIT_LABEL"
    VERTEX_COSET = "VERTEX_COSET"
    CYCLIC_STRUCTURE = "CYCLIC_STRUCTURE"
    UNKNOWN = "UNKNOWN"


class CenterCase(str, Enum):
    """Which center theorem produced a center report."""
    AMALGAM = "AMALGAM"
    PROPER_EDGE_GROUP = "PROPER_EDGE_GROUP"
    INFINITE_OUTER_ORDER = "INFINITE_OUTER_ORDER"
    FINITE_OUTER_ORDER = "FINITE_OUTER_ORDER"
    VERTEX_INTERSECTION = "VERTEX_INTERSECTION"
    SINGLE_VERTEX = "SINGLE_VERTEX"
    UNKNOWN = "UNKNOWN"


class CentralizerCase(str, Enum):
    """Shape of a centralizer, also the branch a root falls in."""
    VERTEX = "VERTEX"
    CIRCUITS = "CIRCUITS"
    CYCLIC = "CYCLIC"
    UNKNOWN = "UNKNOWN"


class TerminalKind(str, Enum):
    """How a successive cyclic reduction stopped."""
    VERTEX = "VERTEX"
    LONG = "LONG"


class ConjugacyResult(BaseModel):
    """Answer to a conjugacy question; YES carries h with u = h v h^-1."""
    verdict: Verdict
    conjugator: Optional[Word] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.verdict == Verdict.YES


class CommuteReport(BaseModel):
    """Classification of a commuting pair with its verified witnesses."""
    case: CommuteCase
    sequence: List[Word] = Field(default_factory=list)
    g: Optional[Word] = None
    h: Optional[Word] = None
    h_prime: Optional[Word] = None
    w: Optional[Word] = None
    j: Optional[int] = None
    k: Optional[int] = None
    factor: Optional[str] = None
    edge_element: Optional[Word] = None
    circuit: List[str] = Field(default_factory=list)
    swapped: bool = False
    reason: Optional[str] = None


class CenterReport(BaseModel):
    """Generators of a center, with the case that produced them."""
    generators: List[Word] = Field(default_factory=list)
    case: CenterCase
    verdict: Verdict = Verdict.YES
    reason: Optional[str] = None


class ReductionTrace(BaseModel):
    """Result of the successive cyclic reduction of a word."""
    input: Word
    conjugator: Word
    final: Word
    vertices: List[str]
    edges: List[str]
    kind: TerminalKind
    vertex: Optional[str] = None
    edge: Optional[str] = None
    length: int = 1
    verdict: Verdict = Verdict.YES
    reason: Optional[str] = None


class CentralizerReport(BaseModel):
    """Centralizer of an element of a sans-circuit graph of groups."""
    case: CentralizerCase
    generators: List[Word] = Field(default_factory=list)
    vertex: Optional[str] = None
    root: Optional[Word] = None
    power: Optional[int] = None


class RootRecord(BaseModel):
    """A root x with x^n = g and the branch of the root dichotomy it satisfies."""
    root: Word
    exponent: int
    branch: CentralizerCase
    ok: bool


class RootsReport(BaseModel):
    """All roots found for an element, with dichotomy violations counted."""
    element: Word
    roots: List[RootRecord] = Field(default_factory=list)
    violations: int = 0


class DoubleAgreement(BaseModel):
    """Conjugacy of two base elements decided in the base group and in its double."""
    in_group: Verdict
    in_double: Verdict
    agree: bool


class ValidationReport(BaseModel):
    """Itemized validation outcome."""
    valid: bool
    violations: List[str] = Field(default_factory=list)


# Error classes
class BassSerreError(Exception):
    """Base error class for toolkit operations."""
    def __init__(self, code: str, message: str, details: Optional[Dict[str, Any]] = None):
        self.code = code
        self.message = message
        self.details = details or {}
        super().__init__(message)


class CapabilityError(BassSerreError):
    """A backend lacks the capability an operation needs."""
    def __init__(self, message: str, capability: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__("CAPABILITY", message, details)
        self.capability = capability


class ForeignElementError(BassSerreError):
    """An element or letter does not belong to the group it was given to."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__("FOREIGN_ELEMENT", message, details)


class WordError(BassSerreError):
    """Malformed word literal or out-of-range word operation."""
    def __init__(self, code: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(code, message, details)


class BackendValidationError(BassSerreError):
    """A backend table or monomorphism violates the group axioms."""
    def __init__(self, message: str, violations: Optional[List[str]] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__("BACKEND_INVALID", message, details)
        self.violations = violations or []


class GogValidationError(BassSerreError):
    """A graph of groups failed validation."""
    def __init__(self, message: str, violations: Optional[List[str]] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__("GOG_INVALID", message, details)
        self.violations = violations or []


class GogParseError(BassSerreError):
    """Syntax or reference error in a GOG document."""
    def __init__(self, message: str, line: int = 0, column: int = 0, details: Optional[Dict[str, Any]] = None):
        super().__init__("PARSE_ERROR", f"line {line}, column {column}: {message}", details)
        self.line = line
        self.column = column


class NotCommutingError(BassSerreError):
    """Commutation classification was asked for a non-commuting pair."""
    def __init__(self, message: str = "elements do not commute", details: Optional[Dict[str, Any]] = None):
        super().__init__("NOT_COMMUTING", message, details)


class NonTrivialityError(BassSerreError):
    """An amalgam whose edge group equals a factor."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__("NONTRIVIALITY", message, details)


class NotSansCircuitError(BassSerreError):
    """An operation that needs a sans-circuit graph of groups got one with circuits."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__("NOT_SANS_CIRCUIT", message, details)


class WitnessError(BassSerreError):
    """A computed witness failed its verification."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__("WITNESS_FAILED", message, details)


# MCP request/response models
class DocumentRequest(BaseModel):
    """Base request: a GOG document given as text."""
    document: str = Field(..., min_length=1)


class WordRequest(DocumentRequest):
    """Request carrying one word literal."""
    word: str


class WordPairRequest(DocumentRequest):
    """Request carrying two word literals."""
    first: str
    second: str
    depth: Optional[int] = Field(default=None, ge=0, le=64)


class TrajetRequest(DocumentRequest):
    """Request for a trajet between two vertex elements written `word@vertex`."""
    source: str
    target: str


class DoubleRequest(DocumentRequest):
    """Request for the double of a vertex group along subgroups."""
    base: str
    subgroups: List[str] = Field(..., min_length=1)


class ToolResponse(BaseModel):
    """Response of every MCP tool."""
    success: bool
    command: str
    exit_code: int
    lines: List[str] = Field(default_factory=list)
    error: Optional[str] = None
