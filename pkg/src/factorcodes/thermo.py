"""Pressure, equilibrium states and pushforwards for locally constant potentials.

A potential with window k is a table on the words of length k. On an
irreducible SFT its pressure is the log of the Perron root of the transfer
matrix on (k-1)-word contexts (1-word contexts when k = 1), and its
equilibrium state is the Markov measure built from the Perron eigenvectors.
Potentials on sofic shifts are handled through the Fischer cover, whose
projection is finite-to-one and so preserves pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blockcode import SlidingBlockCode, apply_to_word, minimal_right_resolving, normalize_code
from .config import DEFAULT, AnalysisConfig
from .errors import (NotFiniteToOne, NotInLanguage, NotIrreducible, ParseError, ResourceLimit,
                     SolverStalled, WindowMismatch)
from .fto import is_finite_to_one
from .shiftspace import (Presentation, enumerate_words, is_irreducible, parse_word,
                         power_shift, spell, to_vertex_form)


# -- potentials ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Potential:
    """Locally constant function given by its values on the words of length ``window``."""

    shift: Presentation
    window: int
    table: dict = field(repr=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        table = {}
        for w in enumerate_words(self.shift, self.window):
            if w not in self.table:
                raise ValueError(f"potential undefined on {self.shift.spell(w)!r}")
            val = float(self.table[w])
            if not math.isfinite(val):
                raise ValueError(f"potential value on {self.shift.spell(w)!r} is not finite")
            table[w] = val
        object.__setattr__(self, "table", table)

    @classmethod
    def constant(cls, shift: Presentation, c: float = 0.0, window: int = 1) -> Potential:
        return cls(shift, window, {w: c for w in enumerate_words(shift, window)})

    @classmethod
    def from_function(cls, shift: Presentation, window: int, f) -> Potential:
        return cls(shift, window, {w: f(w) for w in enumerate_words(shift, window)})

    @classmethod
    def indicator(cls, shift: Presentation, symbol: str, beta: float = 1.0) -> Potential:
        """beta * 1[x_0 = symbol]."""
        a = shift.alphabet.index(symbol)
        return cls.from_function(shift, 1, lambda w: beta * (w[0] == a))

    def __call__(self, word) -> float:
        return self.table[tuple(word)]

    def to_dict(self) -> dict:
        return {"window": self.window,
                "table": {self.shift.spell(w): v for w, v in sorted(self.table.items())}}

    @classmethod
    def from_dict(cls, d: dict, shift: Presentation) -> Potential:
        try:
            k = int(d["window"])
            table = {parse_word(shift.alphabet, key): float(v) for key, v in d["table"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed potential: {exc}") from None
        if any(len(w) != k for w in table):
            raise ParseError(f"potential keys must have length {k}")
        try:
            return cls(shift, k, table)
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def cocycle_sum(phi: Potential, m: int) -> Potential:
    """phi + phi o T + ... + phi o T^(m-1), with window k + m - 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = phi.window
    return Potential(phi.shift, k + m - 1,
                     {u: sum(phi.table[u[i:i + k]] for i in range(m))
                      for u in enumerate_words(phi.shift, k + m - 1)})


def power_potential(phi: Potential, m: int) -> Potential:
    """The cocycle sum of phi over m steps as a potential on the m-th power shift."""
    X = to_vertex_form(phi.shift)
    P = power_shift(X, m)
    blocks = enumerate_words(X, m)
    S = cocycle_sum(phi, m)
    need = S.window
    kk = 1 + -(-(need - m) // m)  # blocks covering need symbols
    table = {}
    for w in enumerate_words(P, kk):
        u = tuple(s for b in w for s in blocks[b])
        table[w] = S.table[u[:need]]
    return Potential(P, kk, table)


def pullback(psi: Potential, pi: SlidingBlockCode) -> Potential:
    """psi o pi, a potential on the domain of pi with window pi.window + psi.window - 1."""
    index = {a: i for i, a in enumerate(psi.shift.alphabet)}
    missing = [c for c in pi.codomain if c not in index]
    if missing:
        raise WindowMismatch(f"code symbols {missing} are not in the potential's alphabet")
    to_y = [index[c] for c in pi.codomain]
    K = pi.window + psi.window - 1
    table = {}
    for u in enumerate_words(pi.domain, K):
        y = tuple(to_y[s] for s in apply_to_word(pi, u))
        if y not in psi.table:
            raise NotInLanguage(f"image word {psi.shift.spell(y)!r} outside the potential's shift")
        table[u] = psi.table[y]
    return Potential(pi.domain, K, table)


# -- Perron data --------------------------------------------------------------


def perron(B: np.ndarray, tol: float = DEFAULT.eig_tol, max_iter: int = DEFAULT.eig_max_iter):
    """Perron root and positive right/left eigenvectors of an irreducible matrix.

    Power iteration on B + a I from the all-ones vector; the shift makes the
    iteration converge for periodic matrices as well.
    """
    n = B.shape[0]
    alpha = float(B.sum(axis=1).min())
    M = B + alpha * np.eye(n)

    def iterate(A):
        x = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            y = A @ x
            y /= y.sum()
            if np.max(np.abs(y - x)) <= tol * np.max(y):
                return y
            x = y
        raise SolverStalled(f"power iteration did not converge in {max_iter} steps")

    r = iterate(M)
    l = iterate(M.T)
    lam = float((B @ r).sum() / r.sum())
    return lam, r, l


@dataclass(eq=False)
class PressureValue:
    value: float
    root: float
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    contexts: list = field(repr=False)
    B: np.ndarray = field(repr=False)
    shift: Presentation = field(repr=False)
    potential: Potential = field(repr=False)

    def to_dict(self) -> dict:
        sp = self.shift.spell
        return {"pressure": self.value, "perron_root": self.root,
                "right": {sp(u): float(x) for u, x in zip(self.contexts, self.right)},
                "left": {sp(u): float(x) for u, x in zip(self.contexts, self.left)}}


def _sft_potential(phi: Potential, config: AnalysisConfig) -> tuple[Potential, SlidingBlockCode | None]:
    """phi on a vertex-SFT: itself, or its pullback to the Fischer cover for sofic shifts."""
    X = phi.shift
    if X.is_sft:
        Xv = to_vertex_form(X)
        return (phi if Xv is X else Potential(Xv, phi.window, phi.table)), None
    _, code = minimal_right_resolving(X, config.max_states)
    lifted = pullback(phi, code)
    Ev = to_vertex_form(code.domain)
    code_v = SlidingBlockCode(Ev, code.codomain, 0, 0, code.table)
    return Potential(Ev, lifted.window, lifted.table), code_v


def transfer_matrix(phi: Potential) -> tuple[list, np.ndarray]:
    """Contexts (words of length max(k-1, 1)) and B[u, v] = exp(phi on the step u -> v)."""
    X = to_vertex_form(phi.shift)
    k = phi.window
    c = max(k - 1, 1)
    ctx = enumerate_words(X, c)
    index = {u: i for i, u in enumerate(ctx)}
    succ = X.symbol_successors
    B = np.zeros((len(ctx), len(ctx)))
    for u in ctx:
        for b in range(len(X.alphabet)):
            if succ[u[-1]] >> b & 1:
                v = u[1:] + (b,)
                val = phi.table[(b,)] if k == 1 else phi.table[u + (b,)]
                B[index[u], index[v]] = math.exp(val)
    return ctx, B


def pressure(phi: Potential, config: AnalysisConfig = DEFAULT) -> PressureValue:
    """Topological pressure (natural log) of a locally constant potential."""
    psi, _ = _sft_potential(phi, config)
    if not is_irreducible(psi.shift):
        raise NotIrreducible("pressure needs an irreducible shift")
    ctx, B = transfer_matrix(psi)
    lam, r, l = perron(B, config.eig_tol, config.eig_max_iter)
    return PressureValue(math.log(lam), lam, r, l, ctx, B, to_vertex_form(psi.shift), psi)


# -- Markov measures ----------------------------------------------------------


@dataclass(eq=False)
class MarkovMeasure:
    """Stationary Markov measure of a given order on a vertex-SFT.

    ``P[i, b]`` is the probability of symbol b after context ``contexts[i]``;
    order 0 uses the single empty context.
    """

    shift: Presentation
    order: int
    contexts: list
    P: np.ndarray
    stationary: np.ndarray

    def __post_init__(self):
        self.shift = to_vertex_form(self.shift)
        self._index = {u: i for i, u in enumerate(self.contexts)}

    @classmethod
    def bernoulli(cls, shift: Presentation, probs) -> MarkovMeasure:
        p = np.asarray(probs, dtype=float)
        return cls(shift, 0, [()], p[None, :], np.ones(1))

    @classmethod
    def from_transitions(cls, shift: Presentation, order: int, P) -> MarkovMeasure:
        """Markov measure with given transitions; the stationary vector is solved for."""
        shift = to_vertex_form(shift)
        ctx = enumerate_words(shift, order) if order else [()]
        P = np.asarray(P, dtype=float)
        T = _context_matrix(ctx, P, order)
        n = len(ctx)
        A = np.vstack([T.T - np.eye(n), np.ones(n)])
        rhs = np.zeros(n + 1)
        rhs[-1] = 1.0
        pi = np.linalg.lstsq(A, rhs, rcond=None)[0]
        pi = np.clip(pi, 0.0, None)
        return cls(shift, order, ctx, P, pi / pi.sum())

    @property
    def context_matrix(self) -> np.ndarray:
        return _context_matrix(self.contexts, self.P, self.order)

    def prob(self, word) -> float:
        w = tuple(word)
        c = self.order
        if c == 0:
            return float(np.prod([self.P[0, a] for a in w]))
        if len(w) <= c:
            return float(sum(p for u, p in zip(self.contexts, self.stationary) if u[:len(w)] == w))
        i = self._index.get(w[:c])
        if i is None:
            return 0.0
        p = float(self.stationary[i])
        for t in range(c, len(w)):
            j = self._index.get(w[t - c:t])
            if j is None:
                return 0.0
            p *= self.P[j, w[t]]
        return p

    def word_table(self, L: int, max_words: int = DEFAULT.max_words) -> dict:
        return {w: self.prob(w) for w in enumerate_words(self.shift, L, max_words)}

    def entropy(self) -> float:
        return entropy(self)

    def validate(self, tol: float = 1e-12) -> list:
        """Violated invariants (empty when the measure is valid)."""
        problems = []
        rows = self.P.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > tol:
            problems.append(f"rows sum to 1 only within {np.max(np.abs(rows - 1.0)):.3e}")
        if np.min(self.P) < -tol or np.min(self.stationary) < -tol:
            problems.append("negative probability")
        if abs(self.stationary.sum() - 1.0) > tol:
            problems.append("stationary vector does not sum to 1")
        if self.order:
            T = self.context_matrix
            err = np.max(np.abs(self.stationary @ T - self.stationary))
            if err > tol:
                problems.append(f"stationary vector not invariant ({err:.3e})")
        succ = self.shift.symbol_successors
        for i, u in enumerate(self.contexts):
            for b in range(len(self.shift.alphabet)):
                if self.P[i, b] > tol and u and not succ[u[-1]] >> b & 1:
                    problems.append(f"support outside the language at {self.shift.spell(u + (b,))!r}")
        return problems

    def as_order(self, c: int) -> MarkovMeasure:
        """The same measure presented with contexts of length c >= order."""
        if c < self.order:
            raise WindowMismatch("cannot lower the order of a Markov measure")
        if c == self.order:
            return self
        ctx = enumerate_words(self.shift, c) if c else [()]
        nA = len(self.shift.alphabet)
        P = np.zeros((len(ctx), nA))
        succ = self.shift.symbol_successors
        pi = np.array([self.prob(u) for u in ctx])
        for i, u in enumerate(ctx):
            last = u[len(u) - self.order:] if self.order else ()
            j = self._index[last]
            for b in range(nA):
                if succ[u[-1]] >> b & 1:
                    P[i, b] = self.P[j, b]
        return MarkovMeasure(self.shift, c, ctx, P, pi)

    def to_dict(self) -> dict:
        sp = self.shift.spell
        A = self.shift.alphabet
        return {
            "order": self.order,
            "alphabet": list(A),
            "transitions": {sp(u): {A[b]: float(self.P[i, b]) for b in range(len(A)) if self.P[i, b] > 0}
                            for i, u in enumerate(self.contexts)},
            "stationary": {sp(u): float(p) for u, p in zip(self.contexts, self.stationary)},
        }

    @classmethod
    def from_dict(cls, d: dict, shift: Presentation) -> MarkovMeasure:
        shift = to_vertex_form(shift)
        try:
            c = int(d["order"])
            ctx = enumerate_words(shift, c) if c else [()]
            A = shift.alphabet
            P = np.zeros((len(ctx), len(A)))
            for i, u in enumerate(ctx):
                row = d["transitions"].get(shift.spell(u), {})
                for name, p in row.items():
                    P[i, A.index(name)] = float(p)
            stat = d.get("stationary")
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed Markov measure: {exc}") from None
        if stat is None:
            return cls.from_transitions(shift, c, P)
        pi = np.array([float(stat.get(shift.spell(u), 0.0)) for u in ctx]) if c else np.ones(1)
        return cls(shift, c, ctx, P, pi)


def _context_matrix(ctx, P, order) -> np.ndarray:
    if order == 0:
        return np.ones((1, 1))
    index = {u: i for i, u in enumerate(ctx)}
    T = np.zeros((len(ctx), len(ctx)))
    for i, u in enumerate(ctx):
        for b in range(P.shape[1]):
            if P[i, b] > 0:
                j = index.get(u[1:] + (b,))
                if j is None:
                    raise ValueError(f"transition to a non-word from context {u}")
                T[i, j] += P[i, b]
    return T


def _xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def entropy(mu: MarkovMeasure) -> float:
    """Entropy rate: sum_u stationary(u) * H(P[u, .])."""
    return float(-(mu.stationary @ _xlogx(mu.P).sum(axis=1)))


def equilibrium_state(phi: Potential, config: AnalysisConfig = DEFAULT,
                      pv: PressureValue | None = None) -> MarkovMeasure:
    """Equilibrium state of phi on an irreducible SFT (Markov of order max(k-1, 1))."""
    if not phi.shift.is_sft:
        raise ValueError("equilibrium_state needs an SFT; use sofic_equilibrium for sofic shifts")
    pv = pv or pressure(phi, config)
    ctx, B, r, l, lam = pv.contexts, pv.B, pv.right, pv.left, pv.root
    X = pv.shift
    nA = len(X.alphabet)
    index = {u: i for i, u in enumerate(ctx)}
    P = np.zeros((len(ctx), nA))
    for i, u in enumerate(ctx):
        for b in range(nA):
            j = index.get(u[1:] + (b,))
            if j is not None and B[i, j] > 0:
                P[i, b] = B[i, j] * r[j] / (lam * r[i])
    P /= P.sum(axis=1, keepdims=True)
    pi = l * r
    return MarkovMeasure(X, len(ctx[0]), ctx, P, pi / pi.sum())


def measure_pressure(mu: MarkovMeasure, phi: Potential) -> float:
    """h(mu) + integral of phi."""
    if tuple(to_vertex_form(phi.shift).alphabet) != tuple(mu.shift.alphabet):
        raise WindowMismatch("potential and measure live on different alphabets")
    integral = sum(mu.prob(w) * v for w, v in phi.table.items())
    return entropy(mu) + integral


def gibbs_ratio_bounds(pv: PressureValue) -> tuple[float, float]:
    """Constants bounding mu(uv) / (mu(u) mu(v)) for the equilibrium state.

    Valid for words u, v of length at least the context length c with uv a
    word: the ratio equals exp(S) (l.r) / (lam^c r(a) l(b)) where S sums the
    potential over the c transitions joining the last context a of u to the
    first context b of v.
    """
    c = len(pv.contexts[0])
    pos = pv.B[pv.B > 0]
    lr = float(pv.left @ pv.right)
    lo = pos.min() ** c * lr / (pv.root ** c * pv.right.max() * pv.left.max())
    hi = pos.max() ** c * lr / (pv.root ** c * pv.right.min() * pv.left.min())
    return float(lo), float(hi)


# -- pushforwards ---------------------------------------------------------------


@dataclass
class WordTable:
    """Probabilities of words (all lengths 1..L) over a named alphabet."""

    alphabet: tuple
    probs: dict

    def level(self, L: int) -> dict:
        return {w: p for w, p in self.probs.items() if len(w) == L}

    def named(self) -> dict:
        return {spell(self.alphabet, w): p for w, p in self.probs.items()}

    def get_named(self, word_names) -> float:
        idx = {a: i for i, a in enumerate(self.alphabet)}
        return self.probs.get(tuple(idx[a] for a in word_names), 0.0)

    def max_difference(self, other: WordTable) -> float:
        """Largest |p - q| over words, matched by symbol names."""
        mine = {tuple(self.alphabet[s] for s in w): p for w, p in self.probs.items()}
        theirs = {tuple(other.alphabet[s] for s in w): p for w, p in other.probs.items()}
        keys = set(mine) | set(theirs)
        return max((abs(mine.get(k, 0.0) - theirs.get(k, 0.0)) for k in keys), default=0.0)

    def to_dict(self) -> dict:
        return {"alphabet": list(self.alphabet),
                "probs": {spell(self.alphabet, w): p for w, p in sorted(self.probs.items())}}


def pushforward_words(mu: MarkovMeasure, pi: SlidingBlockCode, L: int,
                      max_words: int = DEFAULT.max_words, floor: float = 0.0) -> WordTable:
    """Image measure of every image word of length 1..L (hidden-Markov forward pass)."""
    if not pi.is_one_block:
        raise WindowMismatch("pushforward_words needs a 1-block code")
    if tuple(pi.domain.alphabet) != tuple(mu.shift.alphabet):
        raise WindowMismatch("code domain and measure alphabet differ")
    m = mu.as_order(max(mu.order, 1))
    c = m.order
    ny = len(pi.codomain)
    lab = [pi.table[(s,)] for s in range(len(mu.shift.alphabet))]
    ctx_lab = [tuple(lab[s] for s in u) for u in m.contexts]
    T = m.context_matrix
    emit = np.zeros((ny, len(m.contexts)))
    for i, u in enumerate(m.contexts):
        emit[lab[u[-1]], i] = 1.0
    probs: dict = {}
    for ell in range(1, min(c, L) + 1):
        acc: dict = {}
        for lu, p in zip(ctx_lab, m.stationary):
            acc[lu[:ell]] = acc.get(lu[:ell], 0.0) + float(p)
        probs.update({w: p for w, p in acc.items() if p > floor})
    if L > c:
        stack = []
        for v in sorted({lu for lu in ctx_lab}):
            alpha = m.stationary * np.array([lu == v for lu in ctx_lab], dtype=float)
            stack.append((v, alpha))
        while stack:
            v, alpha = stack.pop()
            if len(v) == L:
                continue
            for b in range(ny):
                a2 = (alpha @ T) * emit[b]
                p = float(a2.sum())
                if p > floor:
                    w = v + (b,)
                    probs[w] = p
                    if len(probs) > max_words:
                        raise ResourceLimit(f"more than {max_words} image words")
                    stack.append((w, a2))
    return WordTable(tuple(pi.codomain), probs)


def sofic_equilibrium(psi: Potential, config: AnalysisConfig = DEFAULT
                      ) -> tuple[MarkovMeasure, SlidingBlockCode]:
    """Equilibrium state of psi, as a measure on an SFT plus the 1-block code down to psi's shift.

    For SFTs the code is the identity; for sofic shifts the measure lives on
    the edge shift of the Fischer cover.
    """
    lifted, code = _sft_potential(psi, config)
    mu = equilibrium_state(lifted, config)
    if code is None:
        code = SlidingBlockCode.identity(mu.shift)
    return mu, code


def equilibrium_words(psi: Potential, L: int, config: AnalysisConfig = DEFAULT) -> WordTable:
    mu, code = sofic_equilibrium(psi, config)
    return pushforward_words(mu, code, L, config.max_words)


@dataclass
class LiftReport:
    lift: MarkovMeasure
    potential: Potential
    pressure_lift: float
    pressure_downstream: float
    pushforward_error: float
    length: int
    tolerance: float = 1e-9

    @property
    def pressure_gap(self) -> float:
        return abs(self.pressure_lift - self.pressure_downstream)

    @property
    def ok(self) -> bool:
        return self.pushforward_error <= self.tolerance and self.pressure_gap <= self.tolerance

    def to_dict(self) -> dict:
        return {"lift": self.lift.to_dict(), "pressure_lift": self.pressure_lift,
                "pressure_downstream": self.pressure_downstream, "pressure_gap": self.pressure_gap,
                "pushforward_max_error": self.pushforward_error, "checked_length": self.length,
                "tolerance": self.tolerance, "ok": self.ok}


def tuncel_lift(pi: SlidingBlockCode, psi: Potential, config: AnalysisConfig = DEFAULT,
                L: int | None = None) -> LiftReport:
    """Equilibrium state of psi o pi on the (normalized) domain, with its checks.

    The lift is returned on the domain of the normalized code, a conjugate
    copy of X. Checks: its pushforward matches the equilibrium state of psi
    on all words up to length L, and its measure pressure equals P(psi).
    """
    L = config.lift_length if L is None else L
    normal = normalize_code(pi, config.max_words).pi
    ok, diamond = is_finite_to_one(normal)
    if not ok:
        raise NotFiniteToOne("the lift is unique only for finite-to-one codes")
    phi = pullback(psi, normal)
    lift = equilibrium_state(phi, config)
    image = pushforward_words(lift, normal, L, config.max_words)
    target = equilibrium_words(psi, L, config)
    err = image.max_difference(target)
    return LiftReport(lift, phi, measure_pressure(lift, phi), pressure(psi, config).value, err, L)


# -- entropy brackets -----------------------------------------------------------


def _joint_entropies(mu: MarkovMeasure, pi: SlidingBlockCode, L: int, max_words: int):
    """H(Y_1..Y_j) and H(S_1, Y_1..Y_j) for j = 1..L (S the context chain)."""
    m = mu.as_order(max(mu.order, 1))
    T = m.context_matrix
    lab = [pi.table[(s,)] for s in range(len(mu.shift.alphabet))]
    ny = len(pi.codomain)
    n = len(m.contexts)
    emit = np.zeros((ny, n))
    for i, u in enumerate(m.contexts):
        emit[lab[u[-1]], i] = 1.0
    HY = np.zeros(L + 1)
    HSY = np.zeros(L + 1)
    stack = []
    for b in range(ny):
        A = np.diag(m.stationary * emit[b])  # rows: S_1, columns: current state
        if A.sum() > 0:
            stack.append((1, A))
    count = 0
    while stack:
        j, A = stack.pop()
        joint = A.sum(axis=1)
        p = joint.sum()
        HY[j] -= p * math.log(p)
        HSY[j] -= float(_xlogx(joint).sum())
        count += 1
        if count > max_words:
            raise ResourceLimit(f"more than {max_words} image words")
        if j < L:
            AT = A @ T
            for b in range(ny):
                A2 = AT * emit[b]
                if A2.sum() > 0:
                    stack.append((j + 1, A2))
    return HY, HSY


@dataclass
class EntropyBracket:
    lower: float
    upper: float
    h_mu: float
    h_image_lower: float
    h_image_upper: float
    length: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "width": self.width, "h_mu": self.h_mu,
                "h_image_lower": self.h_image_lower, "h_image_upper": self.h_image_upper,
                "length": self.length}


def relative_entropy_bounds(mu: MarkovMeasure, pi: SlidingBlockCode, L: int,
                            max_words: int = DEFAULT.max_words, pad: float = 1e-9) -> EntropyBracket:
    """Bracket for h(mu) - h(pi mu) from word entropies of the image.

    h(pi mu) lies between H(Y_L | Y_1..Y_{L-1}, S_1) and H(Y_L | Y_1..Y_{L-1}),
    where S_1 is the initial state of the Markov chain generating mu. The
    relative entropy is also nonnegative, which caps the lower end at 0.
    Both ends are widened by ``pad`` to absorb rounding in the word entropies,
    which reaches a few 1e-12 at L = 10.
    """
    if not pi.is_one_block:
        raise WindowMismatch("relative_entropy_bounds needs a 1-block code")
    if L < 2:
        raise ValueError("L must be >= 2")
    HY, HSY = _joint_entropies(mu, pi, L, max_words)
    h_hi = float(HY[L] - HY[L - 1])
    h_lo = float(HSY[L] - HSY[L - 1])
    h = entropy(mu)
    return EntropyBracket(max(0.0, h - h_hi) - pad, h - h_lo + pad, h, h_lo, h_hi, L)
