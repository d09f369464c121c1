"""Pytest configuration and fixtures."""

import sys
from pathlib import Path
from typing import Iterator, Tuple

import pytest
import structlog

from bass_serre.amalgam import AmalgamPresentation
from bass_serre.backends import FiniteGroup, FreeAbelianGroup, FreeGroup
from bass_serre.config import Settings
from bass_serre.gog import Decomposition, GraphOfGroups, decompose_edge
from bass_serre.gogfile import DocumentNames, GogDocument, parse_gog
from bass_serre.hnn import HnnPresentation

FIXTURES = Path(__file__).parent / "fixtures"

S3_TABLE = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 5, 4, 3, 2],
    [2, 4, 0, 5, 1, 3],
    [3, 5, 4, 0, 2, 1],
    [4, 2, 3, 1, 5, 0],
    [5, 3, 1, 2, 0, 4],
]

Built = Tuple[GraphOfGroups, Decomposition]


def cyclic_table(n: int) -> list:
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def fixture_text(name: str) -> str:
    return (FIXTURES / f"{name}.gog").read_text(encoding="utf-8")


def load_document(name: str) -> GogDocument:
    return parse_gog(fixture_text(name))


def names_for(name: str) -> DocumentNames:
    doc = load_document(name)
    gog, dec = doc.build()
    return DocumentNames(doc, gog, dec)


@pytest.fixture(autouse=True)
def _isolate_structlog() -> Iterator[None]:
    """Undo global structlog configuration so cached loggers never outlive a test's capture streams."""
    yield
    structlog.reset_defaults()
    for name, module in list(sys.modules.items()):
        if name.startswith("bass_serre"):
            proxy = getattr(module, "logger", None)
            if isinstance(proxy, structlog._config.BoundLoggerLazyProxy):
                proxy.__dict__.pop("bind", None)


@pytest.fixture
def test_settings(monkeypatch: pytest.MonkeyPatch) -> Settings:
    """Test settings fixture."""
    monkeypatch.setenv("LOG_LEVEL", "debug")
    monkeypatch.setenv("CONJUGACY_DEPTH", "4")
    return Settings()


@pytest.fixture
def s3() -> FiniteGroup:
    """Symmetric group of degree 3: elements 1, 2, 3 are transpositions, 4 and 5 the 3-cycles."""
    return FiniteGroup(S3_TABLE, owner="s")


@pytest.fixture
def z6() -> FiniteGroup:
    return FiniteGroup(cyclic_table(6), owner="v")


@pytest.fixture
def z2_abelian() -> FreeAbelianGroup:
    return FreeAbelianGroup(2, owner="A")


@pytest.fixture
def f2() -> FreeGroup:
    return FreeGroup(2, owner="F")


@pytest.fixture
def trefoil() -> Built:
    return load_document("trefoil").build()


@pytest.fixture
def klein() -> Built:
    return load_document("klein").build()


@pytest.fixture
def z6_hnn_gog() -> Built:
    return load_document("z6").build()


@pytest.fixture
def sl2() -> Built:
    return load_document("sl2").build()


@pytest.fixture
def s3dbl() -> Built:
    return load_document("s3dbl").build()


@pytest.fixture
def jsj() -> Built:
    return load_document("jsj").build()


@pytest.fixture
def trefoil_amalgam(trefoil: Built) -> AmalgamPresentation:
    gog, dec = trefoil
    return decompose_edge(gog, dec, "c")  # type: ignore[return-value]


@pytest.fixture
def sl2_amalgam(sl2: Built) -> AmalgamPresentation:
    gog, dec = sl2
    return decompose_edge(gog, dec, "c")  # type: ignore[return-value]


@pytest.fixture
def klein_hnn(klein: Built) -> HnnPresentation:
    gog, dec = klein
    return decompose_edge(gog, dec, "1")  # type: ignore[return-value]


@pytest.fixture
def z6_hnn(z6_hnn_gog: Built) -> HnnPresentation:
    gog, dec = z6_hnn_gog
    return decompose_edge(gog, dec, "1")  # type: ignore[return-value]
