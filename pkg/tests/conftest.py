import pytest

from lamshift.cli import prelude
from lamshift.parser import parse_term

DEFS = prelude()


def term(text: str):
    return parse_term(text, DEFS)


@pytest.fixture
def P():
    return term


@pytest.fixture
def C():
    """Parse a context written as a term with hole ``_``."""
    return lambda text: parse_term(text, DEFS, allow_hole=True)
