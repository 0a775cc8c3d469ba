import random

import pytest
from conftest import codes, small_codes, small_normal_corpus
from hypothesis import given
from hypothesis import strategies as st
from oracles import class_degree_trace, preimages_by_image, routable

from factorcodes.blockcode import normalize_code
from factorcodes.classdeg import (TransitionBlock, class_degree_upper, is_transition_block,
                                  min_hitting_set, minimal_depth_for_word, preimage_words,
                                  routable_through, routing_table, unique_routing_symbol)
from factorcodes.errors import BadPosition, NotAPreimage, NotMinimal
from factorcodes.fixtures import identity_full2, merge, xor
from factorcodes.fto import degree


def nxor():
    return normalize_code(xor()).pi


def X(code, text):
    return code.domain.parse(text)


def Y(code, text):
    return tuple(code.codomain.index(c) for c in text)


def xw(code, *names):
    return tuple(code.domain.alphabet.index(n) for n in names)


class TestPreimages:
    def test_merge(self):
        m = merge()
        assert {m.domain.spell(u) for u in preimage_words(m, Y(m, "01"))} == {"ab", "ac"}

    def test_identity(self):
        c = identity_full2()
        assert preimage_words(c, Y(c, "0110")) == {X(c, "0110")}

    def test_xor_two_tracks(self):
        c = nxor()
        pre = preimage_words(c, Y(c, "00"))
        assert pre == {xw(c, "00", "00"), xw(c, "11", "11")}


class TestRouting:
    def test_merge_replace_middle(self):
        m = merge()
        assert routable_through(m, Y(m, "111"), 1, X(m, "bcb"), m.domain.alphabet.index("b"))
        assert routable_through(m, Y(m, "010"), 1, X(m, "aba"), m.domain.alphabet.index("c"))

    def test_xor_tracks_never_cross(self):
        c = nxor()
        u = xw(c, "00", "00", "00")
        assert not routable_through(c, Y(c, "000"), 1, u, c.domain.alphabet.index("11"))

    def test_errors(self):
        m = merge()
        with pytest.raises(BadPosition):
            routable_through(m, Y(m, "111"), 0, X(m, "bbb"), 1)
        with pytest.raises(BadPosition):
            routable_through(m, Y(m, "11"), 1, X(m, "bb"), 1)
        with pytest.raises(NotAPreimage):
            routable_through(m, Y(m, "111"), 1, X(m, "aaa"), 1)


class TestTransitionBlocks:
    def test_merge(self):
        m = merge()
        assert is_transition_block(m, Y(m, "000"), 1, [0])
        assert is_transition_block(m, Y(m, "111"), 1, [1])

    def test_xor_needs_two(self):
        c = nxor()
        for s in range(4):
            assert not is_transition_block(c, Y(c, "000"), 1, [s])

    def test_bad_position(self):
        with pytest.raises(BadPosition):
            is_transition_block(merge(), (0, 0), 1, [0])


class TestMinimalDepth:
    def test_merge_forced(self):
        m = merge()
        tb = minimal_depth_for_word(m, Y(m, "000"))
        assert (tb.depth, tb.M) == (1, (0,))

    def test_merge_tie_break(self):
        m = merge()
        tb = minimal_depth_for_word(m, Y(m, "111"))
        assert (tb.depth, tb.M) == (1, (1,))

    def test_xor_depth_two(self):
        c = nxor()
        for w in ("000", "010", "111", "101"):
            assert minimal_depth_for_word(c, Y(c, w)).depth == 2


class TestClassDegree:
    def test_merge(self):
        r = class_degree_upper(merge(), 3)
        assert r.value == 1
        assert r.witness == TransitionBlock((0, 0, 0), 1, (0,), True)

    def test_xor(self):
        r = class_degree_upper(nxor(), 6)
        assert r.trace == [2, 2, 2, 2]
        assert r.value == degree(nxor()).degree == 2

    def test_identity(self):
        assert class_degree_upper(identity_full2(), 3).value == 1

    def test_stabilizes(self):
        for c in (merge(), nxor(), identity_full2()):
            r = class_degree_upper(c)
            assert r.stabilized and r.exact

    def test_serialization(self):
        r = class_degree_upper(nxor())
        d = r.witness.to_dict(nxor().view)
        assert set(d) == {"w", "n", "M", "depth", "certified"}
        assert TransitionBlock.from_dict(d, nxor().view) == r.witness


class TestUniqueRouting:
    def test_merge_forced(self):
        m = merge()
        tb = TransitionBlock(Y(m, "000"), 1, (0,))
        assert unique_routing_symbol(m, tb, X(m, "aaa")) == 0

    def test_merge_reroute(self):
        m = merge()
        tb = TransitionBlock(Y(m, "111"), 1, (1,))
        assert unique_routing_symbol(m, tb, X(m, "ccc")) == 1

    def test_xor_tracks(self):
        c = nxor()
        tb = class_degree_upper(c).witness
        for u in preimage_words(c, tb.w):
            a = unique_routing_symbol(c, tb, u)
            assert a in tb.M and a == u[tb.n]

    def test_non_minimal_rejected(self):
        m = merge()
        tb = TransitionBlock(Y(m, "111"), 1, (1, 2))
        with pytest.raises(NotMinimal):
            unique_routing_symbol(m, tb, X(m, "bbb"))


class TestHittingSet:
    def test_small(self):
        assert min_hitting_set([0b011, 0b110]) == (1,)
        assert min_hitting_set([0b001, 0b010]) == (0, 1)
        assert min_hitting_set([0b001, 0b010], limit=1) is None

    @given(st.lists(st.integers(1, 2**6 - 1), min_size=1, max_size=8))
    def test_brute_force(self, sets):
        from itertools import combinations
        best = None
        for k in range(1, 7):
            for M in combinations(range(6), k):
                mask = sum(1 << a for a in M)
                if all(s & mask for s in sets):
                    best = M
                    break
            if best:
                break
        assert min_hitting_set(sets) == best


def test_trace_matches_brute_force_on_corpus():
    for name, code, _ in small_normal_corpus():
        r = class_degree_upper(code, 6)
        assert r.trace == class_degree_trace(code, 6), name
        r1 = class_degree_upper(code, 6, target=1)
        assert r1.trace == [v if v == 1 else None for v in r.trace], name


@given(small_codes)
def test_trace_matches_brute_force(code):
    assert class_degree_upper(code, 6).trace == class_degree_trace(code, 6)


@given(codes)
def test_monotone_and_witness_certifies(code):
    r = class_degree_upper(code)
    trace = [v for v in r.trace if v is not None]
    assert all(a >= b for a, b in zip(trace, trace[1:]))
    tb = r.witness
    assert is_transition_block(code, tb.w, tb.n, tb.M)
    assert tb.depth == r.value


@given(small_codes, st.integers(0, 2**32 - 1))
def test_routability_depends_on_endpoints_only(code, seed):
    rng = random.Random(seed)
    groups = preimages_by_image(code, 4)
    w = rng.choice(sorted(groups))
    us = groups[w]
    n = rng.randrange(1, 3)
    for u in us:
        for v in us:
            if (u[0], u[-1]) == (v[0], v[-1]):
                for a in range(code.view.n):
                    assert routable_through(code, w, n, u, a) == routable_through(code, w, n, v, a)
        a = rng.randrange(code.view.n)
        assert routable_through(code, w, n, u, a) == routable(code, w, n, u, a)


@given(small_codes, st.integers(0, 2**32 - 1))
def test_extension_stability(code, seed):
    rng = random.Random(seed)
    tb = class_degree_upper(code).witness
    groups = preimages_by_image(code, len(tb.w) + 2)
    exts = [w for w in groups if w[1:-1] == tuple(tb.w)]
    w2 = rng.choice(exts)
    assert is_transition_block(code, w2, tb.n + 1, tb.M)
    assert is_transition_block(code, w2[1:], tb.n, tb.M)
    assert is_transition_block(code, w2[:-1], tb.n + 1, tb.M)


@given(small_codes)
def test_unique_routing_on_minimal_blocks(code):
    tb = class_degree_upper(code).witness
    table = routing_table(code, tb.w, tb.n)
    Mmask = sum(1 << a for a in tb.M)
    for u in preimage_words(code, tb.w):
        hits = [a for a in tb.M if routable(code, tb.w, tb.n, u, a)]
        assert len(hits) == 1
        assert unique_routing_symbol(code, tb, u) == hits[0]
        assert (table.table[(u[0], u[-1])] & Mmask).bit_count() == 1


def test_class_degree_equals_degree_on_finite_to_one_corpus():
    for name, code, fto in small_normal_corpus(64):
        if fto:
            r = class_degree_upper(code)
            assert r.stabilized, name
            assert r.value == degree(code).degree, name
