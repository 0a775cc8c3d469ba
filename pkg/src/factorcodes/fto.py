"""Finite-to-one tests, degree computation and periodic fiber counts.

All routines take a 1-block code on a 1-step SFT (see
:func:`factorcodes.blockcode.normalize_code`).

The degree of a finite-to-one code is the minimum, over image words w and
positions i, of the number of distinct domain symbols seen at position i
among the preimages of w. For a word the set at position i is the
intersection of a *forward* set (symbols reachable from the prefix) and a
*backward* set (symbols that reach the suffix), so the per-length minimum
is computed from layers of reachable forward and backward subsets rather
than from the words themselves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import lcm

from .blockcode import OneBlockView, bits
from .config import DEFAULT, AnalysisConfig
from .errors import NotFiniteToOne, NotInLanguage, ResourceLimit
from .shiftspace import Word, spell, strong_components


@dataclass(frozen=True)
class Diamond:
    """Two distinct domain paths with equal endpoints and equal image."""

    upper: Word
    lower: Word

    def to_dict(self, view: OneBlockView) -> dict:
        return {"upper": spell(view.x_names, self.upper), "lower": spell(view.x_names, self.lower),
                "image": spell(view.y_names, [view.label[s] for s in self.upper])}


@dataclass
class DegreeReport:
    finite_to_one: bool
    degree: int | None = None
    witness: Word | None = None
    position: int | None = None
    diamond: Diamond | None = None
    trace: list = field(default_factory=list)
    stabilized: bool = False
    rule: str | None = None
    plateau: int | None = None
    exact: bool = False
    witness_stable: bool | None = None
    note: str = ""

    def to_dict(self, view: OneBlockView) -> dict:
        return {
            "finite_to_one": self.finite_to_one,
            "degree": self.degree,
            "witness": None if self.witness is None else spell(view.y_names, self.witness),
            "position": self.position,
            "diamond": None if self.diamond is None else self.diamond.to_dict(view),
            "trace": list(self.trace),
            "stabilized": self.stabilized,
            "rule": self.rule,
            "plateau": self.plateau,
            "exact": self.exact,
            "witness_stable": self.witness_stable,
            "note": self.note,
        }


def _view(pi) -> OneBlockView:
    return pi if isinstance(pi, OneBlockView) else pi.view


def find_diamond(pi) -> Diamond | None:
    """Search the pair graph for a path that leaves and re-enters the diagonal."""
    v = _view(pi)
    parent: dict = {}
    queue = deque()
    for s in range(v.n):
        succ = bits(v.succ[s])
        for i, p in enumerate(succ):
            for q in succ[i + 1:]:
                if v.label[p] == v.label[q] and (p, q) not in parent:
                    parent[(p, q)] = ("start", s)
                    queue.append((p, q))
    while queue:
        p, q = queue.popleft()
        common = v.succ[p] & v.succ[q]
        if common:
            t = (common & -common).bit_length() - 1
            upper, lower = [t], [t]
            node = (p, q)
            while True:
                upper.append(node[0])
                lower.append(node[1])
                prev = parent[node]
                if prev[0] == "start":
                    upper.append(prev[1])
                    lower.append(prev[1])
                    break
                node = prev
            return Diamond(tuple(reversed(upper)), tuple(reversed(lower)))
        for p2 in bits(v.succ[p]):
            for q2 in bits(v.succ[q] & v.fiber[v.label[p2]]):
                if p2 != q2 and (p2, q2) not in parent:
                    parent[(p2, q2)] = (p, q)
                    queue.append((p2, q2))
    return None


def is_finite_to_one(pi) -> tuple[bool, Diamond | None]:
    """(True, None) if no diamond exists, else (False, diamond)."""
    d = find_diamond(pi)
    return d is None, d


def d_star(pi, w: Word, i: int) -> int:
    """Number of distinct domain symbols at position i among preimages of w."""
    v = _view(pi)
    F = v.fiber[w[0]]
    for b in w[1:i + 1]:
        F = v.step(F, b)
    B = v.fiber[w[-1]]
    for b in reversed(w[i:-1]):
        B = v.back(B, b)
    return (F & B).bit_count()


def preimage_symbol_sets(pi, w: Word) -> list:
    """For each position of w, the bitmask of symbols seen there among preimages."""
    v = _view(pi)
    fw = [v.fiber[w[0]]]
    for b in w[1:]:
        fw.append(v.step(fw[-1], b))
    bw = [v.fiber[w[-1]]]
    for b in reversed(w[:-1]):
        bw.append(v.back(bw[-1], b))
    bw.reverse()
    return [f & b for f, b in zip(fw, bw)]


class LayerSequence:
    """Layers of reachable subset-like objects, indexed by number of steps.

    ``layers[k]`` maps each object reachable in exactly k steps to the
    lexicographically smallest word realizing it. Layer contents (as sets)
    evolve deterministically, so the sequence of layer sets is eventually
    periodic; ``cycle_start`` is set once a layer set repeats.
    """

    def __init__(self, initial: dict, extend, max_states: int):
        self.layers = [initial]
        self.extend = extend
        self.max_states = max_states
        self.keys: dict = {frozenset(initial): 0}
        self.key_ids = [0]
        self.cycle_start: int | None = None

    def get(self, k: int) -> dict:
        while len(self.layers) <= k:
            nxt = self.extend(self.layers[-1])
            if len(nxt) > self.max_states:
                raise ResourceLimit(f"layer with more than {self.max_states} reachable objects")
            key = frozenset(nxt)
            if key in self.keys:
                if self.cycle_start is None:
                    self.cycle_start = len(self.layers)
            else:
                self.keys[key] = len(self.keys)
            self.key_ids.append(self.keys[key])
            self.layers.append(nxt)
        return self.layers[k]

    def key(self, k: int) -> int:
        self.get(k)
        return self.key_ids[k]

    @property
    def distinct(self) -> int | None:
        """Number of distinct layer sets, known once the sequence has cycled."""
        return None if self.cycle_start is None else len(self.keys)


def _forward_layers(v: OneBlockView, max_states: int) -> LayerSequence:
    init = {v.fiber[b]: (b,) for b in range(v.ny) if v.fiber[b]}

    def extend(layer):
        out: dict = {}
        for mask, word in sorted(layer.items(), key=lambda kv: kv[1]):
            for b in range(v.ny):
                m2 = v.step(mask, b)
                if m2 and m2 not in out:
                    out[m2] = word + (b,)
        return out

    return LayerSequence(init, extend, max_states)


def _backward_layers(v: OneBlockView, max_states: int) -> LayerSequence:
    init = {v.fiber[b]: (b,) for b in range(v.ny) if v.fiber[b]}

    def extend(layer):
        out: dict = {}
        for b in range(v.ny):
            for mask, word in layer.items():
                m2 = v.back(mask, b)
                if m2:
                    cand = (b,) + word
                    if m2 not in out or cand < out[m2]:
                        out[m2] = cand
        return out

    return LayerSequence(init, extend, max_states)


def _plateau_for(n: int, config: AnalysisConfig) -> int:
    return config.plateau if config.plateau is not None else n * n


def degree(pi, config: AnalysisConfig = DEFAULT, strict: bool = True) -> DegreeReport:
    """Degree of a finite-to-one 1-block code, with its search trace.

    The sweep stops at the first length L where one of these holds:
    the value is 1 (the trivial lower bound), the value has been constant
    over a plateau of s further lengths (s = squared domain alphabet size,
    or ``config.plateau``), or L is long enough that every pair of distinct
    forward/backward layer sets has been combined (exact). Raises
    :class:`NotFiniteToOne` unless ``strict`` is False, in which case an
    infinite-to-one report carrying the diamond is returned.
    """
    v = _view(pi)
    ok, diamond = is_finite_to_one(v)
    if not ok:
        if strict:
            raise NotFiniteToOne(f"diamond {spell(v.x_names, diamond.upper)} / "
                                 f"{spell(v.x_names, diamond.lower)}")
        return DegreeReport(False, diamond=diamond, note="infinite-to-one: diamond found")
    s = _plateau_for(v.n, config)
    fwd = _forward_layers(v, config.max_states)
    bwd = _backward_layers(v, config.max_states)
    cache: dict = {}

    def value(i, j):
        key = (fwd.key(i), bwd.key(j))
        if key not in cache:
            best = None
            F, B = fwd.get(i), bwd.get(j)
            for f in F:
                for b in B:
                    c = (f & b).bit_count()
                    if c and (best is None or c < best):
                        best = c
            cache[key] = best
        return cache[key]

    trace: list[int] = []
    rule = None
    for L in range(1, config.max_length + 1):
        m_L = min(x for x in (value(i, L - 1 - i) for i in range(L)) if x is not None)
        trace.append(m_L)
        if m_L == 1:
            rule = "trivial-bound"
            break
        if fwd.distinct is not None and bwd.distinct is not None \
                and L >= fwd.distinct + bwd.distinct - 1:
            rule = "layer-cycle"
            break
        if L > s and trace[L - 1 - s] == m_L:
            rule = "plateau"
            break
    d = trace[-1]
    first = trace.index(d) + 1
    witness, position = _degree_witness(v, fwd, bwd, first, d)
    stable = _witness_stable(v, witness, position, d)
    exact = rule in ("trivial-bound", "layer-cycle")
    if rule is None:
        note = f"no stabilization within max_length={config.max_length}; value is an upper bound"
    elif exact:
        note = "exact: " + ("value equals the lower bound 1" if rule == "trivial-bound"
                            else "all reachable forward/backward set pairs combined")
    else:
        note = f"stabilized over a plateau of {s} lengths; upper bound, stabilized"
    return DegreeReport(True, d, witness, position, None, trace, rule is not None, rule, s, exact,
                        stable, note)


def _degree_witness(v, fwd, bwd, L, d):
    best = None
    for i in range(L):
        F, B = fwd.get(i), bwd.get(L - 1 - i)
        for f, fw in F.items():
            for b, bw in B.items():
                if (f & b).bit_count() == d:
                    cand = (fw + bw[1:], i)
                    if best is None or cand < best:
                        best = cand
    return best


def _witness_stable(v: OneBlockView, w: Word, i: int, d: int) -> bool:
    """All one-symbol extensions of the witness keep the same count."""
    for b in range(v.ny):
        for ext, pos in (((b,) + w, i + 1), (w + (b,), i)):
            c = d_star(v, ext, pos)
            if c and c != d:
                return False
    return True


def periodic_fiber_count(pi, y: Word, cap: int = 64) -> int:
    """Number of points mapping to the periodic point y^inf (finite-to-one codes).

    The fiber is encoded by the multigraph on symbols over y[0] whose edges
    are domain paths reading one period of y. Points of the fiber are
    bi-infinite walks; the count is finite exactly when cyclic components
    are simple cycles not connected to each other.
    """
    v = _view(pi)
    y = tuple(y)
    p = len(y)
    if p == 0:
        raise ValueError("empty period")
    verts = bits(v.fiber[y[0]])
    idx = {s: k for k, s in enumerate(verts)}
    n = len(verts)
    T = [[0] * n for _ in range(n)]
    for s in verts:
        counts = {s: 1}
        for k in range(1, p + 1):
            b = y[k % p]
            nxt: dict = {}
            for x, c in counts.items():
                for t in bits(v.succ[x] & v.fiber[b]):
                    nxt[t] = nxt.get(t, 0) + c
            counts = nxt
        for t, c in counts.items():
            T[idx[s]][idx[t]] = c
    comp = strong_components(n, [[j for j in range(n) if T[i][j]] for i in range(n)]) if n else []
    groups: dict = {}
    for i in range(n):
        groups.setdefault(comp[i], []).append(i)
    cyclic = []
    for c, members in groups.items():
        internal = sum(T[i][j] for i in members for j in members)
        if internal == 0:
            continue
        if internal != len(members):
            raise NotFiniteToOne(f"fiber over ({spell(v.y_names, y)})^inf is infinite")
        cyclic.append(c)
    if not cyclic:
        raise NotInLanguage(f"({spell(v.y_names, y)})^inf is not a point of the image")
    # no walk may pass from one cyclic component to another
    adj = [[j for j in range(n) if T[i][j]] for i in range(n)]
    for c in cyclic:
        seen = set(groups[c])
        stack = list(groups[c])
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
                    if comp[j] in cyclic and comp[j] != c:
                        raise NotFiniteToOne(f"fiber over ({spell(v.y_names, y)})^inf is infinite")
    count = sum(len(groups[c]) for c in cyclic)
    K = lcm(*(len(groups[c]) for c in cyclic))
    if K <= cap:
        M = [row[:] for row in T]
        P = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(K):
            P = [[sum(P[i][k] * M[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert sum(P[i][i] for i in range(n)) == count
    return count
