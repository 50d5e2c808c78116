"""Command-line front end.

Exit codes: 0 success (listing holds), 1 listing violation, failed hypothesis
or infinite tree set (witnesses printed), 2 usage or input error, 3 resource
guard tripped.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cartier_foata import cf_grammar, cf_series, parse_matrix, verify_cf
from .constructions import KINDS, construct
from .errors import (
    ConstructionError,
    InfiniteTreesError,
    ResourceGuardError,
    SignedGrammarError,
    SignedProductionError,
)
from .grammar import parse_grammar, render_grammar
from .series import (
    DEFAULT_TREE_CAP,
    DEFAULT_WORD_CAP,
    ambiguity_profile,
    check_listing,
    enumerate_trees,
    format_word,
    parse_word,
    series,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3
HUMAN_WITNESS_CAP = 20


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _grammar(path):
    return parse_grammar(_read(path))


def _default_len(alphabet) -> int:
    return 8 if len(alphabet) <= 3 else 4


def _dump(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2))


def _show(word, alphabet) -> str:
    return format_word(word, alphabet, "λ")


def _capped(items, fmt):
    lines = [fmt(x) for x in items[:HUMAN_WITNESS_CAP]]
    if len(items) > HUMAN_WITNESS_CAP:
        lines.append(f"... ({len(items) - HUMAN_WITNESS_CAP} more; use --json for all)")
    return lines


def cmd_series(args) -> int:
    g = _grammar(args.grammar)
    L = args.max_len if args.max_len is not None else _default_len(g.terminals)
    s = series(g, L, word_cap=args.word_cap)
    if args.json:
        _dump(s.to_json())
    else:
        print(f"series up to length {L}: {len(s)} nonzero coefficients")
        for w, n in s.items():
            print(f"{_show(w, g.terminals)}\t{n}")
    return EXIT_OK


def cmd_check(args) -> int:
    g = _grammar(args.grammar)
    L = args.max_len if args.max_len is not None else _default_len(g.terminals)
    res = check_listing(g, L, word_cap=args.word_cap)
    if args.json:
        _dump({"maxLen": L, "ok": res.ok,
               "words": [format_word(w, g.terminals) for w in res.words],
               "violations": [{"word": format_word(w, g.terminals), "n": n}
                              for w, n in res.violations]})
    elif res.ok:
        print(f"listing series up to length {L}: {len(res.words)} words")
        for w in res.words:
            print(_show(w, g.terminals))
    else:
        print(f"not a listing series up to length {L}: {len(res.violations)} violations")
        for line in _capped(res.violations, lambda v: f"{_show(v[0], g.terminals)}\t{v[1]}"):
            print(line)
    return EXIT_OK if res.ok else EXIT_VIOLATION


def cmd_trees(args) -> int:
    g = _grammar(args.grammar)
    word = parse_word(args.word, g.terminals)
    res = enumerate_trees(g, word, cap=args.cap)
    if args.json:
        _dump({"word": format_word(word, g.terminals), "complete": res.complete,
               "infinite": res.infinite, "positive": res.positive,
               "negative": res.negative, "coefficient": res.coefficient,
               "trees": [{"sign": t.sign, "tree": t.bracketed()} for t in res.trees]})
    else:
        for t in res.trees:
            print(f"{'+' if t.sign > 0 else '-'} {t.bracketed()}")
        print(f"positive: {res.positive}")
        print(f"negative: {res.negative}")
        print(f"coefficient: {res.coefficient}")
        if not res.complete:
            print(f"truncated at cap {args.cap}" + (" (infinitely many trees)" if res.infinite else ""))
    return EXIT_OK if res.complete else EXIT_GUARD


def cmd_construct(args) -> int:
    inputs = [_grammar(p) for p in args.inputs]
    options = {"marker": args.marker} if args.kind == "concat-dollar" else {}
    report = construct(args.kind, *inputs, **options)
    outs = args.out or []
    if outs and len(outs) != len(report.grammars):
        raise InputError(f"{args.kind} writes {len(report.grammars)} file(s); got {len(outs)} --out paths")
    for path, g in zip(outs, report.grammars):
        Path(path).write_text(render_grammar(g), encoding="utf-8")
    status = EXIT_OK
    checks = []
    if args.verify is not None:
        for k, g in enumerate(report.grammars, start=1):
            res = check_listing(g, args.verify)
            checks.append((k, g, res))
            if not res.ok:
                status = EXIT_VIOLATION
    if args.json:
        out = report.to_json()
        out["outputs"] = outs or [render_grammar(g) for g in report.grammars]
        if checks:
            out["verify"] = [{"output": k, "maxLen": args.verify, "ok": r.ok,
                              "violations": [{"word": format_word(w, g.terminals), "n": n}
                                             for w, n in r.violations]} for k, g, r in checks]
        _dump(out)
        return status
    print(report.describe())
    for path in outs:
        print(f"wrote {path}")
    if not outs:
        for g in report.grammars:
            print(render_grammar(g), end="")
    for k, g, res in checks:
        if res.ok:
            print(f"output {k}: listing series up to length {args.verify} ({len(res.words)} words)")
        else:
            print(f"output {k}: hypothesis refuted up to length {args.verify}")
            for line in _capped(res.violations, lambda v: f"{_show(v[0], g.terminals)}\t{v[1]}"):
                print(line)
    return status


def cmd_profile(args) -> int:
    g = _grammar(args.grammar)
    L = args.max_len if args.max_len is not None else _default_len(g.terminals)
    prof = ambiguity_profile(g, L, word_cap=args.word_cap)
    if args.json:
        _dump(prof.to_json())
    else:
        print(f"degree of ambiguity is at least {prof.degree_lower_bound} (lengths <= {L})")
        for s in prof.lengths:
            hist = " ".join(f"{k}:{v}" for k, v in sorted(s.histogram.items()))
            print(f"length {s.length}: max {s.max_coefficient}, ambiguous {s.ambiguous_words}, "
                  f"histogram {hist or '-'}")
    return EXIT_OK


def cmd_cf(args) -> int:
    m = parse_matrix(_read(args.matrix))
    if args.grammar:
        print(render_grammar(cf_grammar(m)), end="")
        return EXIT_OK
    if args.series is not None:
        s = cf_series(m, args.series)
        if args.json:
            _dump(s.to_json())
        else:
            for w, n in s.items():
                print(f"{_show(w, m.alphabet)}\t{n}")
        return EXIT_OK
    rep = verify_cf(m, args.verify)
    if args.json:
        out = rep.to_json(m.alphabet)
        out["observations"] = list(rep.observations)
        _dump(out)
    else:
        for c in rep.checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.witness}" if c.witness else ""))
        for o in rep.observations:
            print(f"note: {o}")
        print(f"survivors ({len(rep.survivors)}):")
        for line in _capped(list(rep.survivors), lambda w: _show(w, m.alphabet)):
            print(line)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="signedgram", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def grammar_cmd(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("grammar", help=".sg grammar file")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)
        return p

    for name, func, help in (("series", cmd_series, "print the signed series"),
                             ("check", cmd_check, "check the listing property"),
                             ("profile", cmd_profile, "ambiguity profile of an unsigned grammar")):
        p = grammar_cmd(name, func, help)
        p.add_argument("--max-len", type=int, default=None)
        p.add_argument("--word-cap", type=int, default=DEFAULT_WORD_CAP,
                       help="abort when the series tables hold more words than this")

    p = grammar_cmd("trees", cmd_trees, "enumerate the signed parse trees of a word")
    p.add_argument("--word", required=True, help="the word; '' for the empty word")
    p.add_argument("--cap", type=int, default=DEFAULT_TREE_CAP)

    p = sub.add_parser("construct", help="closure constructions")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("inputs", nargs="+", help=".sg input grammar(s)")
    p.add_argument("--out", nargs="+", help="output .sg file(s); split writes two")
    p.add_argument("--marker", default="$", help="marker letter for concat-dollar")
    p.add_argument("--verify", type=int, metavar="L", help="check_listing every output up to L")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("cf", help="Cartier-Foata expansion of a commutation matrix")
    p.add_argument("matrix", help=".cm commutation matrix file")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--series", type=int, metavar="L")
    mode.add_argument("--grammar", action="store_true")
    mode.add_argument("--verify", type=int, metavar="L")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cf)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "max_len", None) is not None and args.max_len < 0:
            raise InputError("--max-len must be nonnegative")
        return args.func(args)
    except InfiniteTreesError as exc:
        print(f"infinitely many parse trees: {exc.witness}", file=sys.stderr)
        print(f"witness: {exc.witness}")
        return EXIT_VIOLATION
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, ConstructionError, SignedProductionError, SignedGrammarError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
