"""Bundled grammar (``.sg``) and commutation-matrix (``.cm``) fixtures."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

# grammars with finitely many trees per word
FINITE = (
    "ex1", "ex1_g1", "odd_a", "ex2", "ex3_even", "ex3_mult6", "ex4", "ex5a", "ex5",
    "abc_union", "astar_bstar", "twice_a", "eps_cancel", "ex5a_literal",
)
# grammars with infinitely many trees for some word
CYCLIC = ("cyclic", "unit_cycle", "nullable_cycle")
MATRICES = ("two-commuting", "three-ab-ac", "three-full", "free-two")


def path(filename: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(filename)))


def text(name: str, ext: str = ".sg") -> str:
    return path(name if name.endswith(ext) else name + ext).read_text(encoding="utf-8")


def grammar(name: str):
    from ..grammar import parse_grammar
    return parse_grammar(text(name, ".sg"))


def matrix(name: str):
    from ..cartier_foata import parse_matrix
    return parse_matrix(text(name, ".cm"))
