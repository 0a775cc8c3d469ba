import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from factorcodes.errors import EmptyShift, ParseError, ResourceLimit
from factorcodes.fixtures import random_irreducible_sft
from factorcodes.shiftspace import (Presentation, count_words, enumerate_words, even_shift,
                                    from_forbidden, full_shift, golden_mean, higher_block,
                                    is_irreducible, period, power_shift, to_vertex_form,
                                    trim_essential, vertex_shift)


def golden_graph_with_sink():
    # states A, B form the golden-mean graph; C is a sink reached from A
    return Presentation(["0", "1"], ["A", "B", "C"], [(0, 0, 0), (0, 1, 1), (1, 0, 0), (0, 2, 1)])


def words(p, L):
    return {p.spell(w) for w in enumerate_words(p, L)}


class TestTrim:
    def test_full_shift_unchanged(self):
        p = full_shift(2)
        assert trim_essential(p) is p

    def test_sink_removed(self):
        t = trim_essential(golden_graph_with_sink())
        assert t.states == ("A", "B")
        assert words(t, 3) == {"000", "001", "010", "100", "101"}

    def test_chain_is_empty(self):
        p = Presentation(["x"], ["a", "b", "c"], [(0, 1, 0), (1, 2, 0)])
        with pytest.raises(EmptyShift):
            trim_essential(p)

    def test_idempotent(self):
        t = trim_essential(golden_graph_with_sink())
        assert trim_essential(t) is t


class TestIrreducibility:
    def test_golden(self):
        assert is_irreducible(golden_mean())

    def test_two_loops(self):
        p = Presentation(["0", "1"], ["A", "B"], [(0, 0, 0), (1, 1, 1)])
        assert not is_irreducible(p)

    def test_full_three(self):
        assert is_irreducible(full_shift(3))

    def test_periods(self):
        assert period(golden_mean()) == 1
        assert period(vertex_shift(["a", "b"], [(0, 1), (1, 0)])) == 2
        assert period(full_shift(2)) == 1


class TestWords:
    def test_counts(self):
        assert len(enumerate_words(full_shift(2), 3)) == 8
        assert words(golden_mean(), 3) == {"000", "001", "010", "100", "101"}
        assert [count_words(golden_mean(), L) for L in (1, 2, 3)] == [2, 3, 5]

    def test_even_shift(self):
        assert words(even_shift(), 2) == {"00", "01", "10", "11"}
        # 1 0 1 is forbidden (odd run of zeros between ones)
        assert "101" not in words(even_shift(), 3)

    def test_count_matches_enumeration(self):
        for L in range(1, 9):
            assert count_words(even_shift(), L) == len(enumerate_words(even_shift(), L))

    def test_cap_is_an_error(self):
        with pytest.raises(ResourceLimit):
            enumerate_words(full_shift(2), 12, max_words=100)


class TestRecoding:
    def test_full_two_block(self):
        r = higher_block(full_shift(2), 2)
        assert sorted(r.presentation.alphabet) == ["00", "01", "10", "11"]
        assert len(r.presentation.edges) == 8

    def test_golden_two_block(self):
        r = higher_block(golden_mean(), 2)
        assert sorted(r.presentation.alphabet) == ["00", "01", "10"]
        assert count_words(r.presentation, 2) == count_words(golden_mean(), 3)

    def test_window_one_is_identity(self):
        r = higher_block(golden_mean(), 1)
        assert r.presentation == golden_mean()
        assert r.forward.is_one_block and r.forward.table == {(0,): 0, (1,): 1}

    def test_forbidden_words(self):
        p = from_forbidden(["0", "1"], [(1, 1)])
        assert [count_words(p, L) for L in range(1, 6)] == [2, 3, 5, 8, 13]
        q = from_forbidden(["0", "1"], [(1, 1, 1)])
        # the recoded symbols are 2-words; L symbols spell L + 1 original symbols
        assert count_words(q, 2) == 7

    def test_power_shift(self):
        p = power_shift(golden_mean(), 2)
        assert count_words(p, 2) == count_words(golden_mean(), 4)


class TestSerialization:
    def test_roundtrip(self):
        for p in (full_shift(3), golden_mean(), even_shift()):
            q = Presentation.from_dict(json.loads(json.dumps(p.to_dict())))
            assert q == p

    def test_duplicate_state(self):
        with pytest.raises(ParseError, match="duplicate"):
            Presentation.from_dict({"alphabet": ["a"], "states": ["x", "x"], "edges": []})

    def test_label_out_of_range(self):
        with pytest.raises(ParseError, match=r"edges\[0\]"):
            Presentation.from_dict({"alphabet": ["a"], "states": ["x"], "edges": [["x", "x", 3]]})


sfts = st.tuples(st.integers(0, 2**32 - 1), st.integers(1, 5)).map(
    lambda t: random_irreducible_sft(random.Random(t[0]), t[1]))


@given(sfts, st.integers(1, 4), st.integers(1, 4))
def test_word_counts_subadditive(p, a, b):
    assert count_words(p, a + b) <= count_words(p, a) * count_words(p, b)


@given(sfts, st.integers(1, 3), st.integers(1, 5))
def test_higher_block_preserves_counts(p, N, L):
    r = higher_block(p, N)
    assert count_words(r.presentation, L) == count_words(p, L + N - 1)


@given(sfts, st.integers(2, 3))
def test_higher_block_keeps_irreducibility_and_period(p, N):
    q = higher_block(p, N).presentation
    assert is_irreducible(q) == is_irreducible(p)
    assert period(q) == period(p)


@given(sfts)
def test_vertex_form_same_words(p):
    q = to_vertex_form(p)
    for L in range(1, 5):
        assert set(enumerate_words(p, L)) == set(enumerate_words(q, L))
