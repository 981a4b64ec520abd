"""Relation symbols and the integer codes used by the array kernels.

Every cell of an event chain holds one of the spellings below.  The
integer code of a symbol is its position in :data:`SYMBOLS`; the compiled
kernels hard-code the same order (checked by the test-suite).
"""

from __future__ import annotations

from enum import Enum

SYMBOLS: tuple[str, ...] = (
    "U", "T", "N", "X", "A",
    "Ab", "Be", "R", "L", "F", "Ba", "Ar", "To", "Bo", "ArT", "In", "Sa", "Bw", "O",
    "MT", "HT", "FMT", "GC", "MA", "S", "Q",
)
CODE: dict[str, int] = {s: i for i, s in enumerate(SYMBOLS)}


class TnRelation(str, Enum):
    T = "T"
    N = "N"
    U = "U"
    X = "X"
    A = "A"


class SsrRelation(str, Enum):
    Ab = "Ab"
    Be = "Be"
    R = "R"
    L = "L"
    F = "F"
    Ba = "Ba"
    Ar = "Ar"
    To = "To"
    Bo = "Bo"
    ArT = "ArT"
    In = "In"
    Sa = "Sa"
    Bw = "Bw"
    O = "O"  # noqa: E741
    U = "U"


class DsrRelation(str, Enum):
    MT = "MT"
    HT = "HT"
    FMT = "FMT"
    GC = "GC"
    MA = "MA"
    S = "S"
    Q = "Q"
    U = "U"


# Row order of each 10-row sub-table.
ROLES: tuple[str, ...] = ("H", "1", "2", "3", "G")
PAIRS: tuple[tuple[str, str], ...] = (
    ("H", "1"), ("H", "2"), ("H", "3"), ("H", "G"),
    ("1", "2"), ("1", "3"), ("1", "G"),
    ("2", "3"), ("2", "G"),
    ("3", "G"),
)
PAIR_NAMES: tuple[str, ...] = tuple(f"{a},{b}" for a, b in PAIRS)


def code(symbol: str) -> int:
    """Integer code of a relation spelling; raises KeyError on unknown symbols."""
    return CODE[str(symbol.value if isinstance(symbol, Enum) else symbol)]


def symbol(code_: int) -> str:
    return SYMBOLS[int(code_)]
