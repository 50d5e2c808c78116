"""Signed series of derivation-tree yields.

Three counting routes live here and are deliberately kept apart:

* :func:`series` -- a length-stratified dynamic program over the whole
  language up to a length bound;
* :func:`coefficient` -- a span chart for one word over an internally
  binarized copy of the grammar;
* :func:`enumerate_trees` -- explicit top-down construction of every parse
  tree, used as the oracle for the other two.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from graphlib import TopologicalSorter
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import AlphabetError, InfiniteTreesError, ResourceGuardError, SignedProductionError
from .grammar import (
    CycleWitness,
    Production,
    SignedGrammar,
    find_cycle,
    fresh_name,
    nullable_set,
    reduce,
    require_finite_trees,
    same_length_graph,
)

Word = tuple[str, ...]

DEFAULT_WORD_CAP = 10**7
DEFAULT_TREE_CAP = 10**5


# --- words ------------------------------------------------------------------

def _single_char(alphabet: Sequence[str]) -> bool:
    return all(len(x) == 1 for x in alphabet)


def parse_word(text: str | Sequence[str], alphabet: Sequence[str]) -> Word:
    """Split user text into letters.

    Over an alphabet of single characters every non-space character is a
    letter; otherwise letters are separated by whitespace.  Sequences are
    taken as already split.  No membership check is done here.
    """
    if not isinstance(text, str):
        return tuple(text)
    if _single_char(alphabet):
        return tuple(ch for ch in text if not ch.isspace())
    return tuple(text.split())


def format_word(word: Word, alphabet: Sequence[str] = (), empty: str = "") -> str:
    if not word:
        return empty
    return "".join(word) if _single_char(alphabet or word) else " ".join(word)


def word_key(alphabet: Sequence[str]):
    """Sort key: by length, then lexicographically in declared alphabet order."""
    index = {x: i for i, x in enumerate(alphabet)}
    n = len(index)

    def key(word: Word):
        return (len(word), tuple(index.get(x, n) for x in word), word)

    return key


def all_words(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)


# --- series type ------------------------------------------------------------

class SignedSeries:
    """A formal series truncated at ``max_len``: word -> nonzero integer.

    Zero coefficients are never stored.  Equality compares the bound and the
    coefficients; the alphabet only fixes the sort order of :meth:`items`.
    """

    __slots__ = ("max_len", "alphabet", "_coeffs")

    def __init__(self, coeffs: Mapping[Word, int] | Iterable[tuple[Word, int]] = (),
                 max_len: int = 0, alphabet: Sequence[str] = ()):
        if max_len < 0:
            raise ValueError("max_len must be nonnegative")
        self.max_len = max_len
        self.alphabet = tuple(alphabet)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[Word, int] = defaultdict(int)
        for w, n in items:
            acc[tuple(w)] += n
        letters = set(self.alphabet)
        for w, n in acc.items():
            if n and len(w) > max_len:
                raise ValueError(f"word {w!r} exceeds max_len {max_len}")
            if n and letters and not letters.issuperset(w):
                raise AlphabetError(f"word {w!r} uses letters outside {self.alphabet}")
        self._coeffs = {w: n for w, n in acc.items() if n}

    @classmethod
    def one(cls, max_len: int = 0, alphabet: Sequence[str] = ()) -> SignedSeries:
        return cls({(): 1}, max_len, alphabet)

    @property
    def coeffs(self) -> Mapping[Word, int]:
        return dict(self._coeffs)

    def __getitem__(self, word) -> int:
        return self._coeffs.get(tuple(word), 0)

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __contains__(self, word):
        return tuple(word) in self._coeffs

    def __eq__(self, other):
        if not isinstance(other, SignedSeries):
            return NotImplemented
        return self.max_len == other.max_len and self._coeffs == other._coeffs

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{n}*{format_word(w, self.alphabet, 'λ')}" for w, n in self.items()[:8])
        more = " + ..." if len(self) > 8 else ""
        return f"SignedSeries(max_len={self.max_len}: {body or '0'}{more})"

    def _merged_alphabet(self, other: SignedSeries) -> tuple[str, ...]:
        return self.alphabet + tuple(x for x in other.alphabet if x not in self.alphabet)

    def items(self) -> list[tuple[Word, int]]:
        """Entries sorted by length, then by declared alphabet order."""
        key = word_key(self.alphabet)
        return sorted(self._coeffs.items(), key=lambda kv: key(kv[0]))

    def words(self) -> list[Word]:
        return [w for w, _ in self.items()]

    def truncate(self, max_len: int) -> SignedSeries:
        max_len = min(max_len, self.max_len)
        return SignedSeries({w: n for w, n in self._coeffs.items() if len(w) <= max_len},
                            max_len, self.alphabet)

    def __neg__(self):
        return SignedSeries({w: -n for w, n in self._coeffs.items()}, self.max_len, self.alphabet)

    def __add__(self, other: SignedSeries) -> SignedSeries:
        bound = min(self.max_len, other.max_len)
        acc = Counter({w: n for w, n in self._coeffs.items() if len(w) <= bound})
        for w, n in other._coeffs.items():
            if len(w) <= bound:
                acc[w] += n
        return SignedSeries(acc, bound, self._merged_alphabet(other))

    def __sub__(self, other: SignedSeries) -> SignedSeries:
        return self + (-other)

    def __mul__(self, other: SignedSeries) -> SignedSeries:
        """Concatenation product (convolution), truncated at the smaller bound."""
        bound = min(self.max_len, other.max_len)
        acc: dict[Word, int] = defaultdict(int)
        for u, m in self._coeffs.items():
            room = bound - len(u)
            if room < 0:
                continue
            for v, n in other._coeffs.items():
                if len(v) <= room:
                    acc[u + v] += m * n
        return SignedSeries(acc, bound, self._merged_alphabet(other))

    def as_polynomial(self, max_len: int) -> SignedSeries:
        """Reread the stored terms as an exact polynomial, re-bounded at ``max_len``."""
        return SignedSeries({w: n for w, n in self._coeffs.items() if len(w) <= max_len},
                            max_len, self.alphabet)

    def star(self, max_len: int) -> SignedSeries:
        """``1 + p + p^2 + ...`` up to ``max_len``, reading ``self`` as a polynomial.

        Each round lengthens every term by at least one letter, so at most
        ``max_len`` rounds contribute.
        """
        if self[()]:
            raise ValueError("star of a series with a nonzero constant term diverges")
        step = self.as_polynomial(max_len)
        total = power = SignedSeries.one(max_len, self.alphabet)
        for _ in range(max_len):
            power = power * step
            if not power:
                break
            total = total + power
        return total

    def to_json(self) -> dict:
        return {
            "maxLen": self.max_len,
            "coefficients": [{"word": format_word(w, self.alphabet), "n": n} for w, n in self.items()],
        }


def power_terms(terms: Sequence[tuple[int, Word]], n: int) -> list[tuple[int, Word]]:
    """All ``len(terms)**n`` signed products of ``n`` terms, uncollapsed, in expansion order."""
    out = [(1, ())]
    for _ in range(n):
        out = [(s * t, u + v) for s, u in out for t, v in terms]
    return out


# --- parse trees ------------------------------------------------------------

@dataclass(frozen=True)
class ParseTree:
    """A derivation tree.  Leaves are terminals (``production is None``)."""

    symbol: str
    production: Production | None = None
    children: tuple[ParseTree, ...] = ()

    @cached_property
    def yield_(self) -> Word:
        if self.production is None:
            return (self.symbol,)
        return tuple(x for c in self.children for x in c.yield_)

    @cached_property
    def negatives(self) -> int:
        own = 1 if self.production is not None and self.production.sign < 0 else 0
        return own + sum(c.negatives for c in self.children)

    @property
    def sign(self) -> int:
        return -1 if self.negatives % 2 else 1

    def count(self, production: Production) -> int:
        """Number of nodes applying ``production``."""
        own = 1 if self.production == production else 0
        return own + sum(c.count(production) for c in self.children)

    def signed_under(self, flipped: Production) -> int:
        """Sign of this tree after negating the single production ``flipped``."""
        return self.sign * (-1) ** self.count(flipped)

    def bracketed(self) -> str:
        """``(S (A- a (A _)))``; a ``-`` after a label marks a negative production."""
        if self.production is None:
            return self.symbol
        mark = "-" if self.production.sign < 0 else ""
        kids = " ".join(c.bracketed() for c in self.children) or "_"
        return f"({self.symbol}{mark} {kids})"

    def __str__(self):
        return self.bracketed()


@dataclass(frozen=True)
class TreeEnumeration:
    """Result of :func:`enumerate_trees`.

    ``complete`` is true when ``trees`` is the exhaustive set; false when the
    cap cut enumeration short.  ``infinite`` records that trees deeper than
    any finite grammar allows were found, i.e. the true set is infinite.
    """

    word: Word
    trees: tuple[ParseTree, ...]
    complete: bool
    infinite: bool = False

    @property
    def positive(self) -> int:
        return sum(1 for t in self.trees if t.sign > 0)

    @property
    def negative(self) -> int:
        return sum(1 for t in self.trees if t.sign < 0)

    @property
    def coefficient(self) -> int:
        return self.positive - self.negative

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)


def enumerate_trees(g: SignedGrammar, word, cap: int = DEFAULT_TREE_CAP) -> TreeEnumeration:
    """Every parse tree of ``g`` rooted at the start symbol with yield ``word``.

    Works on any grammar.  Enumeration is top down over spans of the word,
    bounding the number of consecutive nodes that share one span; a finite
    grammar never needs more than one such node per nonterminal, so the
    result is exhaustive unless a deeper tree exists, in which case the tree
    set is infinite and the bound is raised until ``cap`` trees are found.
    """
    w = parse_word(word, g.terminals)
    if any(x not in g.terminal_set for x in w):
        return TreeEnumeration(w, (), True)
    n = len(w)
    rules: dict[str, list[Production]] = defaultdict(list)
    for p in g.productions:
        rules[p.lhs].append(p)

    def run(depth: int):
        memo: dict[tuple, list[ParseTree]] = {}
        hit_cap = False

        def trees(sym: str, i: int, j: int, budget: int) -> list[ParseTree]:
            # budget: nodes still allowed on the span (i, j) along this path
            nonlocal hit_cap
            if sym in g.terminal_set:
                return [ParseTree(sym)] if j == i + 1 and w[i] == sym else []
            if budget == 0:
                return []
            key = (sym, i, j, budget)
            if key in memo:
                return memo[key]
            memo[key] = []
            out: list[ParseTree] = []
            for p in rules.get(sym, ()):
                for kids in splits(p.rhs, 0, i, j, i, j, budget):
                    out.append(ParseTree(sym, p, kids))
                    if len(out) >= cap:
                        hit_cap = True
                        break
                if len(out) >= cap:
                    break
            memo[key] = out
            return out

        def splits(rhs, k, i, j, pi, pj, budget):
            if k == len(rhs):
                if i == j:
                    yield ()
                return
            last = k == len(rhs) - 1
            if rhs[k] in g.terminal_set:
                if i == j or w[i] != rhs[k] or (last and j != i + 1):
                    return
                ends = [i + 1]
            else:
                ends = [j] if last else range(i, j + 1)
            for m in ends:
                child_budget = budget - 1 if (i, m) == (pi, pj) else depth
                for t in trees(rhs[k], i, m, child_budget):
                    for rest in splits(rhs, k + 1, m, j, pi, pj, budget):
                        yield (t,) + rest

        return trees(g.start, 0, n, depth), hit_cap

    depth = len(g.nonterminals)
    found, hit_cap = run(depth)
    if hit_cap:
        return TreeEnumeration(w, tuple(found[:cap]), False)
    deeper, hit_cap = run(depth + 1)
    if len(deeper) == len(found) and not hit_cap:
        return TreeEnumeration(w, tuple(found), True)
    while not hit_cap:
        depth += 1
        deeper, hit_cap = run(depth)
    return TreeEnumeration(w, tuple(deeper[:cap]), False, infinite=True)


# --- epsilon counts and the length DP ---------------------------------------

def _dependencies_first(graph: Mapping[str, Sequence[str]]) -> list[str]:
    cycle = find_cycle(graph)
    if cycle is not None:
        raise InfiniteTreesError(CycleWitness(cycle))
    return list(TopologicalSorter(graph).static_order())


def epsilon_counts(g: SignedGrammar) -> dict[str, int]:
    """Signed number of parse trees with yield ε, for every nonterminal."""
    require_finite_trees(g)
    nullable = nullable_set(g)
    graph = same_length_graph(g, nullable, nullable)
    counts = {a: 0 for a in g.nonterminal_order}
    for a in _dependencies_first(graph):
        total = 0
        for p in g.by_lhs[a]:
            if all(s in nullable for s in p.rhs):
                term = p.sign
                for s in p.rhs:
                    term *= counts[s]
                total += term
        counts[a] = total
    return counts


def _min_lengths(g: SignedGrammar) -> dict[str, int]:
    inf = float("inf")
    best = {a: inf for a in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            m = sum(1 if g.is_terminal(s) else best[s] for s in p.rhs)
            if m < best[p.lhs]:
                best[p.lhs] = m
                changed = True
    return best


def series(g: SignedGrammar, max_len: int, *, word_cap: int = DEFAULT_WORD_CAP) -> SignedSeries:
    """Signed series of the start symbol truncated at ``max_len``.

    Tables are filled one length at a time; within a length, nonterminals are
    processed so that any B reachable from A by a same-length edge is done
    before A.
    """
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    r = reduce(g)
    require_finite_trees(r)
    tables = _length_tables(r, max_len, word_cap)
    coeffs = {}
    for level in tables[r.start]:
        coeffs.update(level)
    return SignedSeries(coeffs, max_len, g.terminals)


def _length_tables(r: SignedGrammar, max_len: int, word_cap: int) -> dict[str, list[dict[Word, int]]]:
    eps = epsilon_counts(r)
    order = _dependencies_first(same_length_graph(r, nullable_set(r)))
    minlen = _min_lengths(r)
    tables: dict[str, list[dict[Word, int]]] = {
        a: [{(): eps[a]} if eps[a] else {}] for a in r.nonterminals}
    suffix_min = {}
    for p in r.productions:
        acc = [0]
        for s in reversed(p.rhs):
            acc.append(acc[-1] + (1 if r.is_terminal(s) else minlen[s]))
        suffix_min[p] = acc[::-1]
    stored = 0
    for n in range(1, max_len + 1):
        for a in order:
            acc: dict[Word, int] = defaultdict(int)
            for p in r.by_lhs[a]:
                for word, c in _expand(r, p, n, tables, suffix_min[p]).items():
                    acc[word] += p.sign * c
            level = {w: c for w, c in acc.items() if c}
            tables[a].append(level)
            stored += len(level)
            if stored > word_cap:
                raise ResourceGuardError(
                    f"series table exceeded {word_cap} stored words at length {n}")
    return tables


def _expand(r, p, n, tables, suffix_min) -> dict[Word, int]:
    """Signless contribution of ``p`` to words of length exactly ``n``."""
    partial: dict[int, dict[Word, int]] = {0: {(): 1}}
    for k, s in enumerate(p.rhs):
        limit = n - suffix_min[k + 1]
        nxt: dict[int, dict[Word, int]] = defaultdict(lambda: defaultdict(int))
        if r.is_terminal(s):
            for length, words in partial.items():
                if length + 1 <= limit:
                    bucket = nxt[length + 1]
                    for u, c in words.items():
                        bucket[u + (s,)] += c
        else:
            table = tables[s]
            for length, words in partial.items():
                for m in range(0, limit - length + 1):
                    # table[s][n] may be unfilled only when s cannot carry the
                    # whole length alone; such splits die at a later position
                    level = table[m] if m < len(table) else {}
                    if not level:
                        continue
                    bucket = nxt[length + m]
                    for u, c in words.items():
                        for v, d in level.items():
                            bucket[u + v] += c * d
        partial = nxt
        if not partial:
            return {}
    return partial.get(n, {})


# --- span chart -------------------------------------------------------------

def binarize(g: SignedGrammar) -> SignedGrammar:
    """Right-chain every long rhs through fresh nonterminals.

    ``A -> ± X1 X2 ... Xk`` becomes ``A -> ± X1 A@i.1``, ``A@i.1 -> X2 A@i.2``,
    ..., ``A@i.(k-2) -> X(k-1) Xk``.  Each original tree maps to exactly one
    binarized tree with the same sign and yield.
    """
    taken = set(g.terminals) | set(g.nonterminals)
    prods: list[Production] = []
    for idx, p in enumerate(g.productions):
        if len(p.rhs) <= 2:
            prods.append(p)
            continue
        links = [fresh_name(f"{p.lhs}@{idx}.{k}", taken) for k in range(1, len(p.rhs) - 1)]
        heads = [p.lhs, *links]
        for k, head in enumerate(heads):
            rest = links[k] if k < len(links) else p.rhs[-1]
            prods.append(Production(head, (p.rhs[k], rest), p.sign if k == 0 else 1))
    return SignedGrammar(g.terminals, g.nonterminals | set(taken - set(g.terminals)),
                         g.start, tuple(prods))


def coefficient(g: SignedGrammar, word) -> int:
    """Signed tree count of one word, computed with a span chart."""
    w = parse_word(word, g.terminals)
    bad = [x for x in w if x not in g.terminal_set]
    if bad:
        raise AlphabetError(f"letter {bad[0]!r} is not in the alphabet {g.terminals}")
    return _chart(_chart_plan(g), w)


@dataclass(frozen=True)
class _ChartPlan:
    start: str
    eps: Mapping[str, int]
    # binary rules keyed by their first symbol: y -> ((lhs, sign, z), ...)
    by_first: Mapping[str, tuple]
    # same-span terms, dependencies first: (lhs, ((factor, symbol), ...))
    same_span: tuple


@lru_cache(maxsize=128)
def _chart_plan(g: SignedGrammar) -> _ChartPlan:
    r = reduce(g)
    require_finite_trees(r)
    b = binarize(r)
    eps = epsilon_counts(b)
    by_first: dict[str, list] = defaultdict(list)
    for p in b.productions:
        if len(p.rhs) == 2:
            by_first[p.rhs[0]].append((p.lhs, p.sign, p.rhs[1]))
    same_span = []
    for a in _dependencies_first(same_length_graph(b, nullable_set(b))):
        terms = []
        for p in b.by_lhs[a]:
            if len(p.rhs) == 1:
                terms.append((p.sign, p.rhs[0]))
            elif len(p.rhs) == 2:
                y, z = p.rhs
                # y or z takes the whole span while the other derives the empty word
                if eps.get(y):
                    terms.append((p.sign * eps[y], z))
                if eps.get(z):
                    terms.append((p.sign * eps[z], y))
        if terms:
            same_span.append((a, tuple(terms)))
    return _ChartPlan(b.start, eps, {y: tuple(v) for y, v in by_first.items()}, tuple(same_span))


def _chart(plan: _ChartPlan, w: Word) -> int:
    n = len(w)
    if n == 0:
        return plan.eps.get(plan.start, 0)
    by_first = plan.by_first
    # chart[i][j] maps symbols (terminals included) to signed counts on w[i:j]
    chart = [[None] * (n + 1) for _ in range(n + 1)]
    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length
            cell: dict[str, int] = defaultdict(int)
            if length == 1:
                cell[w[i]] = 1
            for m in range(i + 1, j):
                right = chart[m][j]
                for y, cy in chart[i][m].items():
                    for a, sign, z in by_first.get(y, ()):
                        cz = right.get(z)
                        if cz:
                            cell[a] += sign * cy * cz
            for a, terms in plan.same_span:
                total = 0
                for factor, x in terms:
                    c = cell.get(x)
                    if c:
                        total += factor * c
                if total:
                    cell[a] += total
            chart[i][j] = {x: c for x, c in cell.items() if c}
    return chart[0][n].get(plan.start, 0)


# --- listing and ambiguity --------------------------------------------------

@dataclass(frozen=True)
class ListingResult:
    """Outcome of :func:`check_listing` up to ``max_len``."""

    max_len: int
    words: tuple[Word, ...]
    violations: tuple[tuple[Word, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def check_listing(g: SignedGrammar, max_len: int, **kw) -> ListingResult:
    """Is the truncated series a listing series (every coefficient 0 or 1)?"""
    s = series(g, max_len, **kw)
    words = tuple(w for w, n in s.items() if n == 1)
    bad = tuple((w, n) for w, n in s.items() if n != 1)
    return ListingResult(max_len, words, bad)


@dataclass(frozen=True)
class LengthStats:
    length: int
    max_coefficient: int
    ambiguous_words: int
    histogram: Mapping[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class AmbiguityProfile:
    max_len: int
    lengths: tuple[LengthStats, ...]

    @property
    def degree_lower_bound(self) -> int:
        """Largest tree count seen; a lower bound on the degree of ambiguity."""
        return max((s.max_coefficient for s in self.lengths), default=0)

    def to_json(self) -> dict:
        return {
            "maxLen": self.max_len,
            "degreeLowerBound": self.degree_lower_bound,
            "lengths": [{"length": s.length, "max": s.max_coefficient,
                         "ambiguous": s.ambiguous_words,
                         "histogram": {str(k): v for k, v in sorted(s.histogram.items())}}
                        for s in self.lengths],
        }


def ambiguity_profile(g: SignedGrammar, max_len: int, **kw) -> AmbiguityProfile:
    if not g.is_unsigned:
        neg = next(p for p in g.productions if p.sign < 0)
        raise SignedProductionError(f"ambiguity profiles need an unsigned grammar; found {neg}")
    s = series(g, max_len, **kw)
    hist: dict[int, Counter] = {n: Counter() for n in range(max_len + 1)}
    for w, c in s.items():
        hist[len(w)][c] += 1
    stats = tuple(
        LengthStats(n, max(h, default=0), sum(v for k, v in h.items() if k >= 2), dict(sorted(h.items())))
        for n, h in hist.items())
    return AmbiguityProfile(max_len, stats)
