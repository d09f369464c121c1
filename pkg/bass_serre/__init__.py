"""Bass-Serre toolkit

Decision procedures for fundamental groups of graphs of groups: normal forms,
conjugacy, commutation, centers and centralizers, over finite, free abelian,
free and presented vertex groups. Ships a command-line front end and an MCP
server exposing the same deciders as tools.
"""

__version__ = "0.3.0"

from .gog import GraphOfGroups, canonical_presentation
from .gogfile import GogDocument, parse_gog
from .server import BassSerreMCPServer
from .types import BassSerreError, ConjugacyResult, Verdict
from .words import Word, format_word, parse_word

__all__ = [
    "BassSerreMCPServer",
    "BassSerreError",
    "ConjugacyResult",
    "GogDocument",
    "GraphOfGroups",
    "Verdict",
    "Word",
    "canonical_presentation",
    "format_word",
    "parse_gog",
    "parse_word",
]
