import math
import random

import numpy as np
import pytest
from conftest import fto_codes, small_normal_corpus
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import brute_pushforward, markov_word_prob, spectral_pressure

from factorcodes.blockcode import FactorTriple, SlidingBlockCode, normalize_code
from factorcodes.errors import NotFiniteToOne, NotIrreducible, WindowMismatch
from factorcodes.fixtures import (FIXTURES, even_cover, fixture, identity_golden, merge,
                                  random_irreducible_sft, xor)
from factorcodes.shiftspace import (enumerate_words, even_shift, full_shift,
                                    golden_mean, period, power_shift, vertex_shift)
from factorcodes.thermo import (MarkovMeasure, Potential, cocycle_sum, entropy, equilibrium_state,
                                equilibrium_words, gibbs_ratio_bounds, measure_pressure,
                                power_potential, pressure, pullback, pushforward_words,
                                relative_entropy_bounds, tuncel_lift)

PHI = (1 + math.sqrt(5)) / 2


class TestCocycle:
    def test_m_one(self):
        phi = Potential.indicator(full_shift(2), "1", 0.7)
        assert cocycle_sum(phi, 1).table == phi.table

    def test_constant(self):
        assert set(cocycle_sum(Potential.constant(golden_mean(), 0.5), 3).table.values()) == {1.5}

    def test_indicator_two(self):
        s = cocycle_sum(Potential.indicator(full_shift(2), "1"), 2)
        assert {full_shift(2).spell(w): v for w, v in s.table.items()} == \
               {"00": 0, "01": 1, "10": 1, "11": 2}


class TestPressure:
    def test_full_shift(self):
        assert abs(pressure(Potential.constant(full_shift(2))).value - math.log(2)) < 1e-12

    def test_golden(self):
        assert abs(pressure(Potential.constant(golden_mean())).value - math.log(PHI)) < 1e-10

    def test_indicator(self):
        phi = Potential.indicator(full_shift(2), "1", math.log(3))
        assert abs(pressure(phi).value - math.log(4)) < 1e-10

    def test_sofic(self):
        # even shift: entropy log of the golden ratio
        assert abs(pressure(Potential.constant(even_shift())).value - math.log(PHI)) < 1e-10

    def test_periodic(self):
        two_cycle = vertex_shift(["a", "b"], [(0, 1), (1, 0)])
        assert abs(pressure(Potential.constant(two_cycle, 1.0)).value - 1.0) < 1e-12

    def test_reducible(self):
        p = vertex_shift(["a", "b"], [(0, 0), (1, 1), (0, 1)])
        with pytest.raises(NotIrreducible):
            pressure(Potential.constant(p))


class TestEquilibrium:
    def test_bernoulli_half(self):
        mu = equilibrium_state(Potential.constant(full_shift(2)))
        assert np.allclose(mu.P, 0.5, atol=1e-12)

    def test_parry(self):
        mu = equilibrium_state(Potential.constant(golden_mean()))
        assert abs(mu.P[0, 0] - 1 / PHI) < 1e-10
        assert abs(mu.P[0, 1] - (1 - 1 / PHI)) < 1e-10
        assert abs(mu.P[1, 0] - 1) < 1e-12

    def test_bernoulli_quarter(self):
        mu = equilibrium_state(Potential.indicator(full_shift(2), "1", math.log(3)))
        assert np.allclose(mu.P, [[0.25, 0.75], [0.25, 0.75]], atol=1e-10)

    def test_bernoulli_quarter_maximizes(self):
        # h + mu(phi) over Bernoulli(p) peaks at p = 3/4
        ps = np.linspace(0.01, 0.99, 981)
        vals = -(ps * np.log(ps) + (1 - ps) * np.log(1 - ps)) + ps * math.log(3)
        assert abs(ps[np.argmax(vals)] - 0.75) < 1e-3


class TestEntropy:
    def test_values(self):
        assert abs(entropy(MarkovMeasure.bernoulli(full_shift(2), [0.5, 0.5])) - math.log(2)) < 1e-15
        parry = equilibrium_state(Potential.constant(golden_mean()))
        assert abs(entropy(parry) - math.log(PHI)) < 1e-10

    def test_cycle(self):
        cyc = vertex_shift(["a", "b", "c"], [(0, 1), (1, 2), (2, 0)])
        mu = MarkovMeasure.from_transitions(cyc, 1, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        assert entropy(mu) == 0

    def test_measure_pressure(self):
        F2 = full_shift(2)
        assert abs(measure_pressure(MarkovMeasure.bernoulli(F2, [.5, .5]), Potential.constant(F2))
                   - math.log(2)) < 1e-15
        phi = Potential.indicator(F2, "1", math.log(3))
        assert abs(measure_pressure(MarkovMeasure.bernoulli(F2, [.25, .75]), phi) - math.log(4)) < 1e-12
        G = golden_mean()
        assert abs(measure_pressure(equilibrium_state(Potential.constant(G)), Potential.constant(G))
                   - math.log(PHI)) < 1e-10

    def test_window_mismatch(self):
        with pytest.raises(WindowMismatch):
            measure_pressure(MarkovMeasure.bernoulli(full_shift(2), [.5, .5]),
                             Potential.constant(full_shift(3)))


class TestPushforward:
    def test_identity(self):
        mu = equilibrium_state(Potential.constant(golden_mean()))
        t = pushforward_words(mu, identity_golden(), 2)
        for w, p in t.probs.items():
            assert abs(p - markov_word_prob(mu, w)) < 1e-15

    def test_merge(self):
        mu = MarkovMeasure.bernoulli(merge().domain, [.5, .25, .25])
        t = pushforward_words(mu, merge(), 5)
        assert max(abs(p - 0.5 ** len(w)) for w, p in t.probs.items()) < 1e-15

    def test_xor(self):
        x = normalize_code(xor()).pi
        mu = equilibrium_state(Potential.constant(x.domain))
        t = pushforward_words(mu, x, 6)
        assert max(abs(p - 0.5 ** len(w)) for w, p in t.probs.items()) < 1e-12


class TestLift:
    def test_identity(self):
        G = golden_mean()
        psi = Potential.from_function(G, 2, lambda w: 0.3 * w[0] - 0.2 * w[1])
        r = tuncel_lift(identity_golden(), psi)
        mu = equilibrium_state(psi)
        assert np.allclose(r.lift.P, mu.P, atol=1e-10)

    def test_xor(self):
        r = tuncel_lift(xor(), Potential.constant(full_shift(2)))
        assert r.ok
        assert np.allclose(r.lift.stationary, 0.25, atol=1e-10)

    def test_even_cover(self):
        r = tuncel_lift(even_cover(), Potential.constant(even_shift()))
        assert r.ok and r.pushforward_error < 1e-9

    def test_infinite_to_one(self):
        with pytest.raises(NotFiniteToOne):
            tuncel_lift(merge(), Potential.constant(full_shift(2)))


class TestBracket:
    def test_identity(self):
        mu = equilibrium_state(Potential.constant(golden_mean()))
        b = relative_entropy_bounds(mu, identity_golden(), 6)
        # the bracket is padded by 1e-9 on each side
        assert b.contains(0.0) and b.width < 3e-9

    def test_xor_tight(self):
        # the image of the uniform measure is uniform, so every length is already tight
        x = normalize_code(xor()).pi
        mu = equilibrium_state(Potential.constant(x.domain))
        widths = [relative_entropy_bounds(mu, x, L).width for L in (2, 4, 8)]
        assert all(relative_entropy_bounds(mu, x, L).contains(0.0) for L in (2, 4, 8))
        assert max(widths) < 3e-9

    def test_merge(self):
        mu = MarkovMeasure.bernoulli(merge().domain, [.5, .25, .25])
        b = relative_entropy_bounds(mu, merge(), 8)
        assert b.contains(0.5 * math.log(2))


def random_potential(seed, window):
    rng = random.Random(seed)
    X = random_irreducible_sft(rng, rng.randint(1, 4))
    return Potential.from_function(X, window, lambda w: rng.uniform(-2, 2))


potentials = st.tuples(st.integers(0, 2**32 - 1), st.integers(1, 3)).map(lambda t: random_potential(*t))


@given(potentials)
def test_pressure_matches_dense_eigenvalues(phi):
    assert abs(pressure(phi).value - spectral_pressure(phi)) < 1e-9


@given(potentials, st.integers(0, 2**32 - 1))
def test_variational_inequality(phi, seed):
    X = phi.shift
    rng = np.random.default_rng(seed)
    A = X.adjacency().astype(float)
    P = A * rng.uniform(0.05, 1, A.shape)
    P /= P.sum(axis=1, keepdims=True)
    mu = MarkovMeasure.from_transitions(X, 1, P)
    top = pressure(phi).value
    assert measure_pressure(mu, phi) <= top + 1e-9
    assert abs(measure_pressure(equilibrium_state(phi), phi) - top) < 1e-9


@given(potentials, st.integers(2, 3))
def test_cocycle_scaling(phi, m):
    # the power of a periodic shift splits into components
    assume(period(phi.shift) == 1)
    assert abs(pressure(power_potential(phi, m)).value - m * pressure(phi).value) < 1e-9


@given(potentials, st.integers(2, 5))
def test_pushforward_marginal_consistency(phi, L):
    mu = equilibrium_state(phi)
    t = pushforward_words(mu, SlidingBlockCode.identity(mu.shift), L)
    longer, shorter = t.level(L), t.level(L - 1)
    for u, p in shorter.items():
        right = sum(q for w, q in longer.items() if w[:-1] == u)
        left = sum(q for w, q in longer.items() if w[1:] == u)
        assert abs(right - p) < 1e-12 and abs(left - p) < 1e-12


@given(potentials)
def test_gibbs_ratio_bounds(phi):
    pv = pressure(phi)
    mu = equilibrium_state(phi, pv=pv)
    lo, hi = gibbs_ratio_bounds(pv)
    c = len(pv.contexts[0])
    X = mu.shift
    for u in enumerate_words(X, c + 1):
        for v in enumerate_words(X, c + 1):
            uv = u + v
            if not all(X.symbol_successors[a] >> b & 1 for a, b in zip(uv, uv[1:])):
                continue
            r = mu.prob(uv) / (mu.prob(u) * mu.prob(v))
            assert lo * (1 - 1e-9) <= r <= hi * (1 + 1e-9)


@given(fto_codes, st.integers(0, 2**32 - 1))
def test_pushforward_matches_enumeration(code, seed):
    rng = np.random.default_rng(seed)
    A = code.domain.adjacency().astype(float)
    P = A * rng.uniform(0.05, 1, A.shape)
    P /= P.sum(axis=1, keepdims=True)
    mu = MarkovMeasure.from_transitions(code.domain, 1, P)
    t = pushforward_words(mu, code, 5)
    brute = brute_pushforward(mu, code, 5)
    assert max(abs(t.probs.get(w, 0.0) - p) for w, p in brute.items()) < 1e-12


def test_pressure_inequality_on_corpus():
    for name, code, fto in small_normal_corpus(12):
        Y = FactorTriple.of(code).Y
        psi = Potential.from_function(Y, 1, lambda w: 0.1 * w[0])
        up = pressure(pullback(psi, code)).value
        down = pressure(psi).value
        assert up >= down - 1e-9, name
        if fto:
            assert abs(up - down) < 1e-9, name
        else:
            assert up > down + 1e-9, name


def test_lift_on_fixtures():
    for name in sorted(FIXTURES):
        code = fixture(name)
        n = normalize_code(code).pi
        Y = FactorTriple.of(code).Y
        psi = Potential.from_function(Y, 1, lambda w: -0.3 * w[0])
        try:
            r = tuncel_lift(code, psi)
        except NotFiniteToOne:
            continue
        assert r.ok, name
        b = relative_entropy_bounds(r.lift, n, 10)
        assert b.contains(0.0) and b.width < 1e-3, name


def test_equilibrium_words_sofic_sum_to_one():
    t = equilibrium_words(Potential.constant(even_shift()), 4)
    for L in range(1, 5):
        assert abs(sum(t.level(L).values()) - 1) < 1e-12


def test_serialization_roundtrip():
    mu = equilibrium_state(Potential.constant(golden_mean()))
    back = MarkovMeasure.from_dict(mu.to_dict(), golden_mean())
    assert np.allclose(back.P, mu.P) and np.allclose(back.stationary, mu.stationary)
    phi = Potential.indicator(full_shift(2), "1", 0.5)
    assert Potential.from_dict(phi.to_dict(), full_shift(2)).table == phi.table


def test_power_shift_alphabet():
    assert sorted(power_shift(golden_mean(), 2).alphabet) == ["00", "01", "10"]
