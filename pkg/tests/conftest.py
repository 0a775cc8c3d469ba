import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from factorcodes.blockcode import normalize_code
from factorcodes.fixtures import FIXTURES, random_code, random_corpus, random_right_resolving_code
from factorcodes.fto import is_finite_to_one

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# property corpus: every named fixture plus 60 seeded random codes
CORPUS_SEEDS = range(6)
CORPUS_PER_SEED = 10


def corpus():
    out = [(name, make()) for name, make in sorted(FIXTURES.items())]
    for s in CORPUS_SEEDS:
        out.extend(random_corpus(s, CORPUS_PER_SEED))
    return out


_NORMAL = {}


def normal_corpus():
    """(name, normalized 1-block code, finite_to_one) for the property corpus, cached."""
    if not _NORMAL:
        for name, code in corpus():
            n = normalize_code(code).pi
            _NORMAL[name] = (n, is_finite_to_one(n)[0])
    return [(k, *v) for k, v in _NORMAL.items()]


def small_normal_corpus(max_symbols=6):
    return [(k, c, f) for k, c, f in normal_corpus() if len(c.domain.alphabet) <= max_symbols]


@pytest.fixture(scope="session")
def normal_codes():
    return normal_corpus()


codes = st.integers(0, 2**32 - 1).map(lambda s: normalize_code(random_code(random.Random(s))).pi)
small_codes = st.integers(0, 2**32 - 1).map(
    lambda s: normalize_code(random_code(random.Random(s), 3, 3)).pi)
fto_codes = st.integers(0, 2**32 - 1).map(
    lambda s: random_right_resolving_code(random.Random(s)))


# acceptance verdicts, filled by test_acceptance and printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            ok, detail = ACCEPTANCE[n]
            terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
