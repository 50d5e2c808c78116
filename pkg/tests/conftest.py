import pytest

from signedgram import coefficient, enumerate_trees, fixtures, series
from signedgram.series import all_words

ORACLE_LEN = 5


def three_route_mismatches(g, max_len=ORACLE_LEN):
    """Words of length <= max_len where DP, span chart and tree enumeration disagree."""
    dp = series(g, max_len)
    bad = []
    for w in all_words(g.terminals, max_len):
        trees = enumerate_trees(g, w, cap=10**5)
        assert trees.complete, w
        chart = coefficient(g, w)
        if not (dp[w] == chart == trees.coefficient):
            bad.append((w, dp[w], chart, trees.coefficient))
    return bad


@pytest.fixture(scope="session")
def oracle_sweep():
    """Three-route comparison on every finite fixture; shared because the
    decimal fixtures alone have 111,111 words of length <= 5."""
    return {name: three_route_mismatches(fixtures.grammar(name)) for name in fixtures.FINITE}


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, detail = results[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
