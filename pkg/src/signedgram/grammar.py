"""Signed grammar types, the ``.sg`` text format and structural analyses.

A signed grammar is a context-free grammar whose productions each carry a
sign of +1 or -1.  The sign of a parse tree is the product of the signs of
the productions it applies.  Everything in this module ignores signs except
for carrying them around: nullability, productivity, reachability and the
finite-tree check are properties of the underlying unsigned grammar.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import GrammarSyntaxError, GrammarValidationError, InfiniteTreesError

ARROW = "->"
ALT = "|"
END = ";"
NEG = "-"
EPSILON = "_"
EPSILON_SYNONYMS = (EPSILON, "lambda")
RESERVED = frozenset({ARROW, ALT, END, NEG, *EPSILON_SYNONYMS})

_TOKEN = re.compile(r"[|;]|[^\s|;]+")


def check_symbol_name(name: str) -> None:
    """Raise :class:`GrammarValidationError` unless ``name`` can be written to a ``.sg`` file."""
    if not isinstance(name, str) or not name:
        raise GrammarValidationError(f"symbol names must be nonempty strings, got {name!r}")
    if name in RESERVED or name.startswith("#") or name.endswith(":"):
        raise GrammarValidationError(f"{name!r} is a reserved token")
    if any(ch.isspace() for ch in name) or ALT in name or END in name or not name.isprintable():
        raise GrammarValidationError(f"symbol {name!r} contains whitespace, '|' or ';'")


@dataclass(frozen=True)
class Production:
    """``lhs -> sign rhs``; an empty ``rhs`` is the empty word."""

    lhs: str
    rhs: tuple[str, ...] = ()
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if self.sign not in (1, -1) or isinstance(self.sign, bool):
            raise GrammarValidationError(f"production sign must be +1 or -1, got {self.sign!r}")

    def negated(self) -> Production:
        return Production(self.lhs, self.rhs, -self.sign)

    def rhs_text(self) -> str:
        body = " ".join(self.rhs) if self.rhs else EPSILON
        return f"- {body}" if self.sign < 0 else body

    def __str__(self):
        return f"{self.lhs} {ARROW} {self.rhs_text()}"


@dataclass(frozen=True)
class SignedGrammar:
    """An immutable, validated signed grammar.

    Terminal declaration order is significant: it fixes the alphabet order
    used to sort words.  Production order is preserved but carries no meaning
    beyond rendering.
    """

    terminals: tuple[str, ...]
    nonterminals: frozenset[str]
    start: str
    productions: tuple[Production, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "productions", tuple(self.productions))
        self._validate()

    @classmethod
    def build(cls, terminals: Iterable[str], start: str,
              productions: Iterable[Production | tuple]) -> SignedGrammar:
        """Build a grammar whose nonterminals are every non-terminal symbol mentioned.

        ``productions`` may hold :class:`Production` objects or
        ``(lhs, rhs)`` / ``(lhs, rhs, sign)`` tuples.
        """
        terminals = tuple(terminals)
        prods = tuple(p if isinstance(p, Production) else Production(*p) for p in productions)
        tset = set(terminals)
        nts = {start}
        for p in prods:
            nts.add(p.lhs)
            nts.update(s for s in p.rhs if s not in tset)
        return cls(terminals, frozenset(nts), start, prods)

    def _validate(self):
        if len(set(self.terminals)) != len(self.terminals):
            raise GrammarValidationError("duplicate terminal in alphabet")
        for name in (*self.terminals, *self.nonterminals):
            check_symbol_name(name)
        overlap = set(self.terminals) & self.nonterminals
        if overlap:
            raise GrammarValidationError(
                f"symbols declared both terminal and nonterminal: {sorted(overlap)}")
        if self.start not in self.nonterminals:
            raise GrammarValidationError(f"start symbol {self.start!r} is not a nonterminal")
        seen = set()
        for p in self.productions:
            if p.lhs not in self.nonterminals:
                raise GrammarValidationError(f"left-hand side {p.lhs!r} is not a nonterminal")
            for s in p.rhs:
                if s not in self.nonterminals and s not in self.terminal_set:
                    raise GrammarValidationError(f"undeclared symbol {s!r} in {p}")
            if p in seen:
                raise GrammarValidationError(f"duplicate production {p}")
            seen.add(p)

    @cached_property
    def terminal_set(self) -> frozenset[str]:
        return frozenset(self.terminals)

    def is_terminal(self, symbol: str) -> bool:
        return symbol in self.terminal_set

    @cached_property
    def by_lhs(self) -> Mapping[str, tuple[Production, ...]]:
        groups: dict[str, list[Production]] = {a: [] for a in self.nonterminal_order}
        for p in self.productions:
            groups[p.lhs].append(p)
        return {a: tuple(ps) for a, ps in groups.items()}

    @cached_property
    def nonterminal_order(self) -> tuple[str, ...]:
        """Start first, then order of first mention in the productions."""
        order = {self.start: None}
        for p in self.productions:
            order.setdefault(p.lhs)
            for s in p.rhs:
                if s in self.nonterminals:
                    order.setdefault(s)
        for a in sorted(self.nonterminals - order.keys()):
            order.setdefault(a)
        return tuple(order)

    @property
    def is_unsigned(self) -> bool:
        return all(p.sign > 0 for p in self.productions)

    def with_signs_flipped(self) -> SignedGrammar:
        return SignedGrammar(self.terminals, self.nonterminals, self.start,
                             tuple(p.negated() for p in self.productions))

    def __str__(self):
        return render_grammar(self)


# --- text format ------------------------------------------------------------

@dataclass
class _Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[list[_Token]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = []
        for m in _TOKEN.finditer(raw):
            if m.group().startswith("#"):
                break
            toks.append(_Token(m.group(), lineno, m.start() + 1))
        if toks:
            lines.append(toks)
    return lines


def _header(lines, key, what):
    if not lines:
        raise GrammarSyntaxError(f"missing '{key}' line")
    toks = lines.pop(0)
    head = toks[0]
    if head.text == key:
        return toks[1:]
    if head.text.startswith(key):
        # "alphabet:a" glued to its first value
        return [_Token(head.text[len(key):], head.line, head.column + len(key))] + toks[1:]
    raise GrammarSyntaxError(f"expected '{key}' {what}", head.line, head.column)


def parse_grammar(text: str) -> SignedGrammar:
    """Parse the ``.sg`` format into a validated :class:`SignedGrammar`.

    >>> g = parse_grammar("alphabet: a\\nstart: S\\nS -> A | B ;\\nA -> - a A | _ ;\\nB -> a a B | a ;")
    >>> len(g.productions), sum(p.sign < 0 for p in g.productions)
    (6, 1)
    """
    lines = _tokenize(text)
    alpha = _header(lines, "alphabet:", "as the first line")
    start_toks = _header(lines, "start:", "as the second line")
    terminals = []
    for t in alpha:
        try:
            check_symbol_name(t.text)
        except GrammarValidationError as exc:
            raise GrammarSyntaxError(str(exc), t.line, t.column) from None
        if t.text in terminals:
            raise GrammarSyntaxError(f"terminal {t.text!r} declared twice", t.line, t.column)
        terminals.append(t.text)
    if len(start_toks) != 1:
        tok = start_toks[1] if start_toks else None
        raise GrammarSyntaxError("'start:' takes exactly one symbol",
                                 tok.line if tok else None, tok.column if tok else None)
    start = start_toks[0]
    if start.text in terminals:
        raise GrammarValidationError(
            f"line {start.line}: start symbol {start.text!r} is declared as a terminal")

    stream = [t for toks in lines for t in toks]
    raw: list[tuple[Production, _Token]] = []
    pos = 0
    last = stream[-1] if stream else start

    def peek():
        return stream[pos] if pos < len(stream) else None

    def fail(msg, tok):
        if tok is None:
            raise GrammarSyntaxError(msg + " at end of input", last.line, last.column + len(last.text))
        raise GrammarSyntaxError(msg, tok.line, tok.column)

    while pos < len(stream):
        lhs = stream[pos]
        if lhs.text in RESERVED:
            fail(f"expected a nonterminal, found {lhs.text!r}", lhs)
        if lhs.text in terminals:
            raise GrammarValidationError(
                f"line {lhs.line}, column {lhs.column}: terminal {lhs.text!r} used as a left-hand side")
        pos += 1
        if peek() is None or peek().text != ARROW:
            fail(f"expected '{ARROW}' after {lhs.text!r}", peek())
        pos += 1
        while True:
            alt_start = peek()
            sign = 1
            if peek() is not None and peek().text == NEG:
                sign = -1
                pos += 1
            body = []
            while peek() is not None and peek().text not in (ALT, END):
                tok = peek()
                if tok.text in (ARROW, NEG):
                    fail(f"unexpected {tok.text!r}", tok)
                body.append(tok)
                pos += 1
            if not body:
                fail("empty alternative (write '_' for the empty word)", peek() or alt_start)
            eps = [t for t in body if t.text in EPSILON_SYNONYMS]
            if eps and len(body) > 1:
                fail("'_' must be the only symbol of its alternative", eps[0])
            rhs = () if eps else tuple(t.text for t in body)
            raw.append((Production(lhs.text, rhs, sign), alt_start))
            sep = peek()
            if sep is None:
                fail(f"missing '{END}'", None)
            pos += 1
            if sep.text == END:
                break

    defined = {start.text} | {p.lhs for p, _ in raw}
    seen = set()
    tset = set(terminals)
    for p, tok in raw:
        for s in p.rhs:
            if s not in tset and s not in defined:
                raise GrammarValidationError(
                    f"line {tok.line}: undeclared symbol {s!r} in {p}")
        if p in seen:
            raise GrammarValidationError(f"line {tok.line}: duplicate production {p}")
        seen.add(p)
    return SignedGrammar(tuple(terminals), frozenset(defined), start.text, tuple(p for p, _ in raw))


def render_grammar(g: SignedGrammar) -> str:
    """Emit the ``.sg`` format; consecutive productions of one lhs share a line."""
    out = [" ".join(["alphabet:", *g.terminals]), f"start: {g.start}"]
    run: list[Production] = []
    for p in (*g.productions, None):
        if run and (p is None or p.lhs != run[0].lhs):
            out.append(f"{run[0].lhs} {ARROW} " + f" {ALT} ".join(q.rhs_text() for q in run) + f" {END}")
            run = []
        if p is not None:
            run.append(p)
    return "\n".join(out) + "\n"


# --- structural analysis ----------------------------------------------------

@dataclass(frozen=True)
class GrammarAnalysis:
    nullable: frozenset[str]
    productive: frozenset[str]
    reachable: frozenset[str]
    # A -> B iff some A -> alpha B beta has alpha and beta entirely nullable
    same_length: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def useful(self) -> frozenset[str]:
        return self.productive & self.reachable


@dataclass(frozen=True)
class CycleWitness:
    """A cycle ``A1 -> A2 -> ... -> A1`` in the same-length graph."""

    cycle: tuple[str, ...]

    def __str__(self):
        return f" {ARROW} ".join(self.cycle)


def nullable_set(g: SignedGrammar) -> frozenset[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                nullable.add(p.lhs)
                changed = True
    return frozenset(nullable)


def productive_set(g: SignedGrammar) -> frozenset[str]:
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in productive and all(
                    g.is_terminal(s) or s in productive for s in p.rhs):
                productive.add(p.lhs)
                changed = True
    return frozenset(productive)


def reachable_set(g: SignedGrammar, productions: Sequence[Production] | None = None) -> frozenset[str]:
    prods = g.productions if productions is None else productions
    succ: dict[str, list[str]] = {}
    for p in prods:
        succ.setdefault(p.lhs, []).extend(s for s in p.rhs if s in g.nonterminals)
    seen = {g.start}
    stack = [g.start]
    while stack:
        for b in succ.get(stack.pop(), ()):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return frozenset(seen)


def same_length_graph(g: SignedGrammar, nullable: frozenset[str],
                      nodes: Iterable[str] | None = None) -> dict[str, tuple[str, ...]]:
    """Edges A -> B through productions whose other rhs symbols are all nullable.

    Restricted to ``nodes`` (and to productions over ``nodes`` and terminals)
    when given.
    """
    keep = set(g.nonterminals if nodes is None else nodes)
    edges: dict[str, dict[str, None]] = {a: {} for a in g.nonterminal_order if a in keep}
    for p in g.productions:
        if p.lhs not in keep or any(s not in keep and not g.is_terminal(s) for s in p.rhs):
            continue
        for i, b in enumerate(p.rhs):
            if b in keep and all(s in nullable for j, s in enumerate(p.rhs) if j != i):
                edges[p.lhs][b] = None
    return {a: tuple(bs) for a, bs in edges.items()}


def analyze(g: SignedGrammar) -> GrammarAnalysis:
    nullable = nullable_set(g)
    productive = productive_set(g)
    reachable = reachable_set(g)
    graph = same_length_graph(g, nullable, productive & reachable)
    return GrammarAnalysis(nullable, productive, reachable, graph)


def reduce(g: SignedGrammar) -> SignedGrammar:
    """Drop unproductive, then unreachable, nonterminals and their productions.

    Complete derivations from the start symbol are untouched, so the signed
    series is preserved tree for tree.
    """
    productive = productive_set(g)
    if g.start not in productive:
        return SignedGrammar(g.terminals, frozenset({g.start}), g.start, ())
    prods = [p for p in g.productions
             if p.lhs in productive and all(g.is_terminal(s) or s in productive for s in p.rhs)]
    reachable = reachable_set(g, prods)
    prods = [p for p in prods if p.lhs in reachable]
    return SignedGrammar(g.terminals, reachable, g.start, tuple(prods))


def find_cycle(graph: Mapping[str, Sequence[str]]) -> tuple[str, ...] | None:
    """Return some cycle ``(v1, ..., vk, v1)`` of a directed graph, or ``None``."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in graph}
    for root in graph:
        if color[root] != WHITE:
            continue
        path = [root]
        iters = [iter(graph[root])]
        color[root] = GREY
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = BLACK
                iters.pop()
            elif color.get(nxt, BLACK) == GREY:
                return tuple(path[path.index(nxt):]) + (nxt,)
            elif color.get(nxt) == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                iters.append(iter(graph[nxt]))
    return None


def check_finite_trees(g: SignedGrammar) -> CycleWitness | None:
    """``None`` if every word has finitely many parse trees, else a witness cycle.

    Decided on the reduced grammar: a cycle A =>+ A whose context derives the
    empty word can be pumped without changing the yield.
    """
    r = reduce(g)
    graph = same_length_graph(r, nullable_set(r))
    cycle = find_cycle(graph)
    return None if cycle is None else CycleWitness(cycle)


def require_finite_trees(g: SignedGrammar) -> None:
    witness = check_finite_trees(g)
    if witness is not None:
        raise InfiniteTreesError(witness)


def fresh_name(base: str, taken: set[str]) -> str:
    """``base`` itself if free, else the first free ``base#k``; records the result in ``taken``."""
    name = base
    k = 1
    while name in taken:
        name = f"{base}#{k}"
        k += 1
    taken.add(name)
    return name
