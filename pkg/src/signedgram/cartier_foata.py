"""Partial commutation: commuting sets, the signed star expansion and traces.

For a commutation relation on an ordered alphabet the expansion

    ( sum over nonempty commuting sets F of (-1)^(#F + 1) w(F) )^*

is expected to be a listing series holding one word from every trace class.
``w(F)`` juxtaposes the letters of ``F`` in decreasing alphabet order, so over
``a < b`` commuting the polynomial is ``a + b - ba``.  That arrangement only
works when the order orients the commutation relation transitively (see
:func:`juxtaposition_order`).  :func:`verify_cf` checks the listing and
one-per-class claims against brute-force trace classes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

from .errors import GrammarSyntaxError, GrammarValidationError, ResourceGuardError
from .grammar import Production, SignedGrammar, check_symbol_name, fresh_name
from .series import SignedSeries, Word, all_words, format_word, series, word_key

TRACE_GUARD = 10**6


@dataclass(frozen=True)
class CommutationMatrix:
    alphabet: tuple[str, ...]
    relation: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "relation", tuple(tuple(bool(x) for x in row) for row in self.relation))
        m = len(self.alphabet)
        if len(set(self.alphabet)) != m:
            raise GrammarValidationError("duplicate letter in alphabet")
        for x in self.alphabet:
            check_symbol_name(x)
        if len(self.relation) != m or any(len(row) != m for row in self.relation):
            raise GrammarValidationError(f"relation must be a {m}x{m} matrix")
        for i in range(m):
            if not self.relation[i][i]:
                raise GrammarValidationError(f"diagonal entry for {self.alphabet[i]!r} must be true")
            for j in range(i):
                if self.relation[i][j] != self.relation[j][i]:
                    raise GrammarValidationError(
                        f"relation is not symmetric at ({self.alphabet[j]}, {self.alphabet[i]})")

    @classmethod
    def from_pairs(cls, alphabet: Sequence[str], pairs: Iterable[tuple[str, str]] = ()) -> CommutationMatrix:
        alphabet = tuple(alphabet)
        index = {x: i for i, x in enumerate(alphabet)}
        rel = [[i == j for j in range(len(alphabet))] for i in range(len(alphabet))]
        for x, y in pairs:
            if x not in index or y not in index:
                raise GrammarValidationError(f"pair ({x}, {y}) uses a letter outside the alphabet")
            if x == y:
                raise GrammarValidationError(f"commuting pair needs distinct letters, got ({x}, {y})")
            rel[index[x]][index[y]] = rel[index[y]][index[x]] = True
        return cls(alphabet, tuple(map(tuple, rel)))

    @classmethod
    def identity(cls, alphabet: Sequence[str]) -> CommutationMatrix:
        return cls.from_pairs(alphabet)

    def commutes(self, x: str, y: str) -> bool:
        index = self.index
        return self.relation[index[x]][index[y]]

    @property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.alphabet)}

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.alphabet[i], self.alphabet[j])
                for i, j in combinations(range(len(self.alphabet)), 2) if self.relation[i][j]]

    def reordered(self, alphabet: Sequence[str]) -> CommutationMatrix:
        """Same relation over a permuted declaration order."""
        if sorted(alphabet) != sorted(self.alphabet):
            raise GrammarValidationError("reordering must permute the alphabet")
        return CommutationMatrix.from_pairs(alphabet, self.pairs())


def parse_matrix(text: str) -> CommutationMatrix:
    """Parse the ``.cm`` format: an ``alphabet:`` line, then ``commute: x y`` lines."""
    alphabet = None
    pairs = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        toks = toks[:next((k for k, t in enumerate(toks) if t.startswith("#")), len(toks))]
        if not toks:
            continue
        key, rest = toks[0], toks[1:]
        if alphabet is None:
            if key != "alphabet:":
                raise GrammarSyntaxError("expected 'alphabet:' as the first line", lineno, 1)
            alphabet = rest
            continue
        if key != "commute:":
            raise GrammarSyntaxError(f"expected 'commute:', found {key!r}", lineno, 1)
        if len(rest) != 2:
            raise GrammarSyntaxError("'commute:' takes exactly two letters", lineno, 1)
        x, y = rest
        if x == y:
            raise GrammarSyntaxError(f"a letter cannot be paired with itself ({x})", lineno, 1)
        if x not in alphabet or y not in alphabet:
            raise GrammarSyntaxError(f"pair ({x}, {y}) uses a letter outside the alphabet", lineno, 1)
        if frozenset((x, y)) in seen:
            raise GrammarSyntaxError(f"pair ({x}, {y}) declared twice", lineno, 1)
        seen.add(frozenset((x, y)))
        pairs.append((x, y))
    if alphabet is None:
        raise GrammarSyntaxError("missing 'alphabet:' line")
    return CommutationMatrix.from_pairs(alphabet, pairs)


def render_matrix(m: CommutationMatrix) -> str:
    lines = [" ".join(["alphabet:", *m.alphabet])]
    lines += [f"commute: {x} {y}" for x, y in m.pairs()]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CommutingSet:
    letters: tuple[str, ...]  # in declared order
    word: Word  # decreasing juxtaposition order

    @property
    def sign(self) -> int:
        return 1 if len(self.letters) % 2 else -1


def order_violation(m: CommutationMatrix, order: Sequence[str]) -> tuple[str, str, str] | None:
    """Some ``x < y < z`` in ``order`` with xy and yz commuting but not xz, else ``None``."""
    for x, y, z in combinations(order, 3):
        if m.commutes(x, y) and m.commutes(y, z) and not m.commutes(x, z):
            return x, y, z
    return None


def _transitive_orders(m: CommutationMatrix) -> Iterator[tuple[str, ...]]:
    # backtracking in declared-lexicographic order; prunes on the newest letter as z
    letters = m.alphabet
    order: list[str] = []

    def extend():
        if len(order) == len(letters):
            yield tuple(order)
            return
        for z in letters:
            if z in order:
                continue
            if any(m.commutes(x, y) and m.commutes(y, z) and not m.commutes(x, z)
                   for x, y in combinations(order, 2)):
                continue
            order.append(z)
            yield from extend()
            order.pop()

    return extend()


def juxtaposition_order(m: CommutationMatrix) -> tuple[str, ...]:
    """Total order whose decreasing arrangement writes each ``w(F)``.

    The expansion lists one word per trace only when the order orients the
    commutation relation transitively.  The declared order is used whenever it
    does; otherwise the first such order found, and the declared order again if
    the commutation graph admits none.
    """
    if order_violation(m, m.alphabet) is None:
        return m.alphabet
    return next(_transitive_orders(m), m.alphabet)


def commuting_sets(m: CommutationMatrix) -> list[CommutingSet]:
    """All nonempty pairwise-commuting subsets, by size then lexicographically."""
    n = len(m.alphabet)
    rank = {x: i for i, x in enumerate(juxtaposition_order(m))}
    out = []
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if all(m.relation[i][j] for i, j in combinations(idx, 2)):
                letters = tuple(m.alphabet[i] for i in idx)
                out.append(CommutingSet(letters, tuple(sorted(letters, key=rank.get, reverse=True))))
    return out


def cf_polynomial(m: CommutationMatrix) -> SignedSeries:
    """``sum over F of (-1)^(#F+1) w(F)``: singletons +1, pairs -1, triples +1, ..."""
    return SignedSeries({f.word: f.sign for f in commuting_sets(m)}, len(m.alphabet), m.alphabet)


def cf_series(m: CommutationMatrix, max_len: int) -> SignedSeries:
    """The starred polynomial, truncated at ``max_len``."""
    return cf_polynomial(m).star(max_len)


def cf_grammar(m: CommutationMatrix) -> SignedGrammar:
    """``S -> _ | sign w(F) S`` for every commuting set ``F``."""
    start = fresh_name("S", set(m.alphabet))
    prods = [Production(start, ())]
    prods += [Production(start, f.word + (start,), f.sign) for f in commuting_sets(m)]
    return SignedGrammar(m.alphabet, frozenset({start}), start, tuple(prods))


@dataclass(frozen=True)
class TracePartition:
    """Trace classes of every word of length at most ``max_len``."""

    max_len: int
    alphabet: tuple[str, ...]
    classes: tuple[tuple[Word, ...], ...]  # each class sorted, lexicographic minimum first

    @cached_property
    def _lookup(self) -> dict[Word, tuple[Word, ...]]:
        return {w: c for c in self.classes for w in c}

    def class_of(self, word: Word) -> tuple[Word, ...]:
        return self._lookup[tuple(word)]

    def minimum(self, word: Word) -> Word:
        return self.class_of(word)[0]

    def classes_of_length(self, n: int) -> list[tuple[Word, ...]]:
        return [c for c in self.classes if len(c[0]) == n]


def trace_classes(m: CommutationMatrix, max_len: int, guard: int = TRACE_GUARD) -> TracePartition:
    """Classes under swapping adjacent commuting letters, by breadth-first closure."""
    k = len(m.alphabet)
    if k ** max_len > guard:
        raise ResourceGuardError(f"{k}^{max_len} words exceed the trace enumeration guard {guard}")
    key = word_key(m.alphabet)
    index = m.index
    rel = m.relation
    seen: set[Word] = set()
    classes = []
    for w in all_words(m.alphabet, max_len):
        if w in seen:
            continue
        seen.add(w)
        members = [w]
        queue = deque([w])
        while queue:
            u = queue.popleft()
            for i in range(len(u) - 1):
                x, y = u[i], u[i + 1]
                if x != y and rel[index[x]][index[y]]:
                    v = u[:i] + (y, x) + u[i + 2:]
                    if v not in seen:
                        seen.add(v)
                        members.append(v)
                        queue.append(v)
        classes.append(tuple(sorted(members, key=key)))
    return TracePartition(max_len, m.alphabet, tuple(classes))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: str = ""


@dataclass(frozen=True)
class CFReport:
    max_len: int
    checks: tuple[Check, ...]
    survivors: tuple[Word, ...]
    survivors_lexmin: bool
    observations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self, alphabet: Sequence[str] = ()) -> dict:
        return {
            "maxLen": self.max_len,
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness} for c in self.checks],
            "survivors": [format_word(w, alphabet) for w in self.survivors],
            "survivorsLexMin": self.survivors_lexmin,
        }


def verify_cf(m: CommutationMatrix, max_len: int) -> CFReport:
    """Check the expansion against brute-force trace classes up to ``max_len``.

    1. every coefficient is 0 or 1;
    2. each trace class holds exactly one word with coefficient 1;
    3. that word is the class's lexicographic minimum (an observation, it
       does not fail the report);
    4. the series of :func:`cf_grammar` equals the direct expansion.
    """
    s = cf_series(m, max_len)
    part = trace_classes(m, max_len)
    show = lambda w: format_word(w, m.alphabet, "λ")  # noqa: E731

    bad = [(w, n) for w, n in s.items() if n not in (0, 1)]
    c1 = Check("coefficients in {0,1}", not bad,
               f"{show(bad[0][0])} has coefficient {bad[0][1]}" if bad else "")

    wrong = None
    survivors = []
    lexmin = True
    for cls in part.classes:
        chosen = [w for w in cls if s[w] == 1]
        if len(chosen) != 1 and wrong is None:
            wrong = (cls, chosen)
        if len(chosen) == 1:
            survivors.append(chosen[0])
            lexmin = lexmin and chosen[0] == cls[0]
    c2 = Check("one survivor per trace class", wrong is None,
               "" if wrong is None else
               f"class {{{', '.join(map(show, wrong[0]))}}} has {len(wrong[1])} survivors")
    c3 = Check("survivors are lexicographic minima", True,
               "" if lexmin else "some survivor is not its class minimum")

    gs = series(cf_grammar(m), max_len)
    diff = (gs - s)
    c4 = Check("grammar series equals expansion", not diff,
               "" if not diff else f"differ at {show(diff.words()[0])}")
    key = word_key(m.alphabet)
    obs = []
    order = juxtaposition_order(m)
    if order != m.alphabet:
        obs.append("declared order is not transitive on commuting letters; "
                   f"juxtaposing by {' < '.join(order)}")
    elif order_violation(m, order) is not None:
        obs.append("no order orients the commutation graph transitively")
    if not lexmin:
        obs.append("survivors are not all lexicographic minima")
    obs = tuple(obs)
    return CFReport(max_len, (c1, c2, c3, c4), tuple(sorted(survivors, key=key)), lexmin, obs)


def alphabet_orderings(m: CommutationMatrix) -> list[CommutationMatrix]:
    return [m.reordered(p) for p in permutations(m.alphabet)]
