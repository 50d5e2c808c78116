"""Closure constructions on signed grammars.

Every construction renames its inputs apart (``A`` becomes ``A#1``, ``A#2``,
... per input), adds a fresh start symbol and returns the reduced result.
Hypotheses about the generated languages (disjointness, inclusion) cannot be
checked statically; they are listed in the report and can be verified up to a
length bound with :func:`signedgram.series.check_listing`.  The coefficient
identities behind each construction hold unconditionally.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .errors import ConstructionError
from .grammar import Production, SignedGrammar, check_symbol_name, fresh_name, reduce

KINDS = ("complement", "union", "minus", "concat-dollar", "concat-disjoint", "split")


@dataclass(frozen=True)
class ConstructionReport:
    kind: str
    grammars: tuple[SignedGrammar, ...]
    renaming: tuple[Mapping[str, str], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def grammar(self) -> SignedGrammar:
        if len(self.grammars) != 1:
            raise ValueError(f"{self.kind} produces {len(self.grammars)} grammars")
        return self.grammars[0]

    def describe(self) -> str:
        lines = [f"construction: {self.kind}"]
        for k, ren in enumerate(self.renaming, start=1):
            pairs = ", ".join(f"{a} => {b}" for a, b in ren.items())
            lines.append(f"input {k} renaming: {pairs}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "renaming": [dict(r) for r in self.renaming],
                "notes": list(self.notes)}


def _merge_alphabets(*alphabets: Sequence[str]) -> tuple[str, ...]:
    out: dict[str, None] = {}
    for alpha in alphabets:
        out.update(dict.fromkeys(alpha))
    return tuple(out)


def _rename_apart(grammars: Sequence[SignedGrammar], terminals: Sequence[str],
                  tags: Sequence[str] | None = None):
    """Fresh start name, renamed copies and their renaming maps."""
    taken = set(terminals)
    start = fresh_name("S", taken)
    tags = tags or [str(k) for k in range(1, len(grammars) + 1)]
    copies, maps = [], []
    for g, tag in zip(grammars, tags):
        ren = {a: fresh_name(f"{a}#{tag}", taken) for a in g.nonterminal_order}
        prods = tuple(Production(ren[p.lhs], tuple(ren.get(s, s) for s in p.rhs), p.sign)
                      for p in g.productions)
        copies.append(SignedGrammar(tuple(terminals), frozenset(ren.values()), ren[g.start], prods))
        maps.append(ren)
    return start, copies, maps


def _assemble(terminals, start, head: Sequence[Production], parts: Sequence[SignedGrammar]):
    prods = list(head)
    for part in parts:
        prods.extend(part.productions)
    nts = {start}.union(*(p.nonterminals for p in parts))
    return reduce(SignedGrammar(tuple(terminals), frozenset(nts), start, tuple(prods)))


def sigma_star_grammar(alphabet: Sequence[str], start: str = "S") -> SignedGrammar:
    """Right-linear, unambiguous grammar for every word over ``alphabet``."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ConstructionError("alphabet must be nonempty")
    start = fresh_name(start, set(alphabet))
    prods = [Production(start, (x, start)) for x in alphabet] + [Production(start, ())]
    return SignedGrammar(alphabet, frozenset({start}), start, tuple(prods))


def _complement(g: SignedGrammar) -> ConstructionReport:
    terminals = g.terminals
    start, (full, copy), maps = _rename_apart([sigma_star_grammar(terminals), g], terminals)
    out = _assemble(terminals, start,
                    [Production(start, (full.start,)), Production(start, (copy.start,), -1)],
                    [full, copy])
    return ConstructionReport("complement", (out,), tuple(maps), (
        "input 1 is the built-in unambiguous grammar for all words over the alphabet",
        "the output lists the complement only where the input itself is a listing series; "
        "check the input with check_listing first",
    ))


def _union(g1: SignedGrammar, g2: SignedGrammar) -> ConstructionReport:
    terminals = _merge_alphabets(g1.terminals, g2.terminals)
    start, (c1, c2), maps = _rename_apart([g1, g2], terminals)
    out = _assemble(terminals, start,
                    [Production(start, (c1.start,)), Production(start, (c2.start,))], [c1, c2])
    return ConstructionReport("union", (out,), tuple(maps), (
        "deferred hypothesis: the two languages are disjoint; "
        "a coefficient 2 in check_listing of the output refutes it",
    ))


def _minus(superset: SignedGrammar, subset: SignedGrammar) -> ConstructionReport:
    terminals = _merge_alphabets(superset.terminals, subset.terminals)
    start, (big, small), maps = _rename_apart([superset, subset], terminals)
    out = _assemble(terminals, start,
                    [Production(start, (big.start,)), Production(start, (small.start,), -1)],
                    [big, small])
    return ConstructionReport("minus", (out,), tuple(maps), (
        "input 1 is the superset (positive branch), input 2 the subset (negative branch)",
        "deferred hypothesis: L(input 2) is a subset of L(input 1); "
        "a coefficient -1 in check_listing of the output refutes it",
    ))


def _concat_dollar(g1: SignedGrammar, g2: SignedGrammar, marker: str = "$") -> ConstructionReport:
    check_symbol_name(marker)
    if marker in g1.terminals or marker in g2.terminals:
        raise ConstructionError(f"marker {marker!r} already occurs in an input alphabet")
    terminals = _merge_alphabets(g1.terminals, g2.terminals, (marker,))
    m = fresh_name("S", {marker})
    mark = SignedGrammar((marker,), frozenset({m}), m, (Production(m, (marker,)),))
    start, (c1, cm, c3), maps = _rename_apart([g1, mark, g2], terminals)
    out = _assemble(terminals, start, [Production(start, (c1.start, cm.start, c3.start))],
                    [c1, cm, c3])
    return ConstructionReport("concat-dollar", (out,), (maps[0], maps[2]), (
        f"marker nonterminal {cm.start} derives only {marker!r}",
        "no deferred hypothesis: the marker makes every factorization unique",
    ))


def _concat_disjoint(g1: SignedGrammar, g2: SignedGrammar) -> ConstructionReport:
    shared = [x for x in g1.terminals if x in g2.terminal_set]
    if shared:
        raise ConstructionError(f"alphabets must be disjoint; both contain {shared}")
    terminals = _merge_alphabets(g1.terminals, g2.terminals)
    start, (c1, c2), maps = _rename_apart([g1, g2], terminals)
    out = _assemble(terminals, start, [Production(start, (c1.start, c2.start))], [c1, c2])
    return ConstructionReport("concat-disjoint", (out,), tuple(maps), (
        "alphabet disjointness checked statically",
    ))


def _split(g: SignedGrammar) -> ConstructionReport:
    taken = set(g.terminals)
    names = {(a, p): fresh_name(f"{a}#{p}", taken) for a in g.nonterminal_order for p in (0, 1)}
    prods = []
    for prod in g.productions:
        slots = [k for k, s in enumerate(prod.rhs) if not g.is_terminal(s)]
        base = 1 if prod.sign < 0 else 0
        for parities in product((0, 1), repeat=len(slots)):
            rhs = list(prod.rhs)
            for k, q in zip(slots, parities):
                rhs[k] = names[prod.rhs[k], q]
            parity = (base + sum(parities)) % 2
            prods.append(Production(names[prod.lhs, parity], tuple(rhs)))
    nts = frozenset(names.values())
    even = reduce(SignedGrammar(g.terminals, nts, names[g.start, 0], tuple(prods)))
    odd = reduce(SignedGrammar(g.terminals, nts, names[g.start, 1], tuple(prods)))
    ren = {f"{a}@{p}": n for (a, p), n in names.items()}
    return ConstructionReport("split", (even, odd), (ren,), (
        "output 1 counts the positive trees of the input, output 2 the negative ones",
        "both outputs are unsigned",
    ))


_BUILDERS = {
    "complement": (_complement, 1),
    "union": (_union, 2),
    "minus": (_minus, 2),
    "concat-dollar": (_concat_dollar, 2),
    "concat-disjoint": (_concat_disjoint, 2),
    "split": (_split, 1),
}


def construct(kind: str, *grammars: SignedGrammar, **options) -> ConstructionReport:
    """Run the construction ``kind`` (one of :data:`KINDS`) and describe it."""
    try:
        builder, arity = _BUILDERS[kind]
    except KeyError:
        raise ConstructionError(f"unknown construction {kind!r}; expected one of {KINDS}") from None
    if len(grammars) != arity:
        raise ConstructionError(f"{kind} takes {arity} grammar(s), got {len(grammars)}")
    return builder(*grammars, **options)


def complement(g: SignedGrammar) -> SignedGrammar:
    """``S -> S1 | - S2`` with S1 generating every word and S2 a copy of ``g``."""
    return _complement(g).grammar


def disjoint_union(g1: SignedGrammar, g2: SignedGrammar) -> SignedGrammar:
    return _union(g1, g2).grammar


def subset_minus(superset: SignedGrammar, subset: SignedGrammar) -> SignedGrammar:
    """Series ``f(superset) - f(subset)``."""
    return _minus(superset, subset).grammar


def dollar_concat(g1: SignedGrammar, g2: SignedGrammar, marker: str = "$") -> SignedGrammar:
    return _concat_dollar(g1, g2, marker).grammar


def disjoint_concat(g1: SignedGrammar, g2: SignedGrammar) -> SignedGrammar:
    return _concat_disjoint(g1, g2).grammar


def parity_split(g: SignedGrammar) -> tuple[SignedGrammar, SignedGrammar]:
    """Two unsigned grammars counting the positive and the negative trees of ``g``.

    Nonterminal ``A`` becomes ``(A, 0)`` and ``(A, 1)``, tracking the parity of
    negative productions used below it.  Trees of the first output for ``w``
    are in bijection with positive trees of ``g`` for ``w``; the second with
    negative ones.
    """
    even, odd = _split(g).grammars
    return even, odd
