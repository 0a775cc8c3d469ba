"""Sliding block codes between presented shifts.

Codes are stored as explicit tables from domain words of length
``memory + 1 + anticipation`` to codomain symbol ids. Most analyses need
the normal form (1-step vertex-SFT domain, 1-block code), obtained with
:func:`normalize`; :class:`OneBlockView` is the bitmask form of such a
code used by the combinatorial and numerical modules.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .config import DEFAULT
from .errors import AlphabetMismatch, NotInLanguage, NotIrreducible, ResourceLimit, WordTooShort
from .shiftspace import (Presentation, Word, accepts, edge_shift_of, enumerate_words, higher_block,
                         is_irreducible, parse_word, spell, strong_components, to_vertex_form,
                         trim_essential)


@dataclass(frozen=True, eq=False)
class SlidingBlockCode:
    domain: Presentation
    codomain: tuple
    memory: int
    anticipation: int
    table: dict = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "codomain", tuple(str(c) for c in self.codomain))
        if self.memory < 0 or self.anticipation < 0:
            raise ValueError("memory and anticipation must be non-negative")
        W = self.window
        lang = enumerate_words(self.domain, W)
        table = {}
        for w in lang:
            if w not in self.table:
                raise ValueError(f"block map undefined on domain word {self.domain.spell(w)!r}")
            table[w] = int(self.table[w])
        if any(not 0 <= v < len(self.codomain) for v in table.values()):
            raise ValueError("block map value outside the codomain alphabet")
        if set(table.values()) != set(range(len(self.codomain))):
            raise ValueError("codomain alphabet contains symbols the block map never attains")
        object.__setattr__(self, "table", table)

    @property
    def window(self) -> int:
        return self.memory + 1 + self.anticipation

    @property
    def is_one_block(self) -> bool:
        return self.memory == 0 and self.anticipation == 0

    @classmethod
    def identity(cls, p: Presentation) -> "SlidingBlockCode":
        return cls(p, p.alphabet, 0, 0, {(a,): a for a in range(len(p.alphabet))})

    @classmethod
    def one_block(cls, p: Presentation, codomain: Sequence[str], symbol_map: Sequence[int]):
        return cls(p, codomain, 0, 0, {(a,): symbol_map[a] for a in range(len(p.alphabet))})

    def apply(self, word: Sequence[int]) -> Word:
        return apply_to_word(self, word)

    def spell(self, word) -> str:
        return spell(self.codomain, word)

    def to_dict(self) -> dict:
        return {
            "memory": self.memory,
            "anticipation": self.anticipation,
            "codomain": list(self.codomain),
            "table": {self.domain.spell(w): v for w, v in sorted(self.table.items())},
            "domain": self.domain.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict, domain: Presentation | None = None) -> "SlidingBlockCode":
        from .errors import ParseError

        if domain is None:
            if not isinstance(d.get("domain"), dict):
                raise ParseError("code needs an embedded 'domain' presentation")
            domain = Presentation.from_dict(d["domain"])
        try:
            m, a = int(d.get("memory", 0)), int(d.get("anticipation", 0))
            raw = d["table"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed code: {exc}") from None
        table = {}
        for key, v in raw.items():
            w = parse_word(domain.alphabet, key)
            if len(w) != m + 1 + a:
                raise ParseError(f"table key {key!r} does not have length {m + 1 + a}")
            table[w] = v
        codomain = d.get("codomain")
        if codomain is None:
            codomain = [str(i) for i in range(max(table.values()) + 1)]
        try:
            return cls(domain, codomain, m, a, table)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    @cached_property
    def view(self) -> "OneBlockView":
        return OneBlockView.of(self)


_BIG = 256  # alphabets above this size use the vectorized step


def mask_to_array(mask: int, n: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def array_to_mask(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


class OneBlockView(NamedTuple):
    """Bitmask form of a 1-block code on a 1-step SFT."""

    n: int
    succ: tuple
    pred: tuple
    label: tuple
    fiber: tuple
    x_names: tuple
    y_names: tuple
    fwd_matrix: object = None  # sparse transpose adjacency, large alphabets only
    back_matrix: object = None

    @property
    def ny(self) -> int:
        return len(self.y_names)

    @classmethod
    def of(cls, code: SlidingBlockCode) -> "OneBlockView":
        if not code.is_one_block or not code.domain.is_sft:
            raise ValueError("expected a 1-block code on an SFT (use normalize first)")
        X = code.domain
        n = len(X.alphabet)
        succ = X.symbol_successors
        pred = [0] * n
        pairs = []
        for s in range(n):
            for t in bits(succ[s]):
                pred[t] |= 1 << s
                pairs.append((s, t))
        label = tuple(code.table[(s,)] for s in range(n))
        fiber = [0] * len(code.codomain)
        for s, b in enumerate(label):
            fiber[b] |= 1 << s
        fm = bm = None
        if n > _BIG:
            rows = np.array([s for s, _ in pairs]), np.array([t for _, t in pairs])
            A = csr_matrix((np.ones(len(pairs), dtype=np.int32), rows), shape=(n, n))
            fm, bm = A.T.tocsr(), A
        return cls(n, tuple(succ), tuple(pred), label, tuple(fiber), X.alphabet, code.codomain,
                   fm, bm)

    def _spread(self, mask: int, table, matrix) -> int:
        if matrix is not None and mask.bit_count() > 16:
            return array_to_mask(matrix @ mask_to_array(mask, self.n) > 0)
        out = 0
        m = mask
        while m:
            low = m & -m
            out |= table[low.bit_length() - 1]
            m ^= low
        return out

    def step(self, mask: int, b: int) -> int:
        """Symbols labeled b that follow some symbol in mask."""
        return self._spread(mask, self.succ, self.fwd_matrix) & self.fiber[b]

    def back(self, mask: int, b: int) -> int:
        """Symbols labeled b that precede some symbol in mask."""
        return self._spread(mask, self.pred, self.back_matrix) & self.fiber[b]


def bits(mask: int) -> list:
    if mask.bit_length() > 512:
        return np.flatnonzero(mask_to_array(mask, mask.bit_length())).tolist()
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# -- word level -------------------------------------------------------------


def apply_to_word(c: SlidingBlockCode, w: Sequence[int]) -> Word:
    w = tuple(w)
    W = c.window
    if len(w) < W:
        raise WordTooShort(f"need at least {W} symbols, got {len(w)}")
    if any(not 0 <= a < len(c.domain.alphabet) for a in w) or not accepts(c.domain, w):
        raise NotInLanguage(f"{c.domain.spell(w)!r} is not a domain word")
    return tuple(c.table[w[i:i + W]] for i in range(len(w) - W + 1))


def compose(outer: SlidingBlockCode, inner: SlidingBlockCode,
            max_words: int = DEFAULT.max_words) -> SlidingBlockCode:
    """The code ``outer o inner`` (apply inner first)."""
    index = {a: i for i, a in enumerate(outer.domain.alphabet)}
    missing = [c for c in inner.codomain if c not in index]
    if missing:
        raise AlphabetMismatch(f"inner codomain symbols {missing} are not in the outer domain")
    to_outer = [index[c] for c in inner.codomain]
    m = outer.memory + inner.memory
    a = outer.anticipation + inner.anticipation
    W = m + 1 + a
    raw = {}
    for u in enumerate_words(inner.domain, W, max_words):
        v = tuple(to_outer[s] for s in apply_to_word(inner, u))
        if v not in outer.table:
            raise AlphabetMismatch(f"inner image word {outer.domain.spell(v)!r} is not an outer domain word")
        raw[u] = outer.table[v]
    used = sorted(set(raw.values()))
    reindex = {s: i for i, s in enumerate(used)}
    return SlidingBlockCode(inner.domain, [outer.codomain[s] for s in used], m, a,
                            {u: reindex[s] for u, s in raw.items()})


def codes_agree(c1: SlidingBlockCode, c2: SlidingBlockCode, max_words: int = DEFAULT.max_words) -> bool:
    """Whether two codes on the same domain define the same map.

    Outputs are aligned by memory; comparing the block maps on the common
    window decides equality on words of every length.
    """
    if c1.domain.alphabet != c2.domain.alphabet:
        return False
    m = max(c1.memory, c2.memory)
    a = max(c1.anticipation, c2.anticipation)
    W = m + 1 + a
    for u in enumerate_words(c1.domain, W, max_words):
        y1 = c1.table[u[m - c1.memory: m + 1 + c1.anticipation]]
        y2 = c2.table[u[m - c2.memory: m + 1 + c2.anticipation]]
        if c1.codomain[y1] != c2.codomain[y2]:
            return False
    return True


def image_words(c: SlidingBlockCode, L: int, max_words: int = DEFAULT.max_words) -> set:
    """Set of images of all domain words of length L + window - 1."""
    return {apply_to_word(c, u) for u in enumerate_words(c.domain, L + c.window - 1, max_words)}


# -- normal form --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FactorTriple:
    X: Presentation
    pi: SlidingBlockCode
    Y: Presentation

    @classmethod
    def of(cls, pi: SlidingBlockCode, max_states: int = DEFAULT.max_states) -> "FactorTriple":
        if not pi.domain.is_sft:
            raise ValueError("factor triples need an SFT domain")
        if not is_irreducible(pi.domain):
            raise NotIrreducible("domain of the factor code is not irreducible")
        norm = normalize_code(pi)
        return cls(pi.domain, pi, image_presentation(norm.pi, max_states))

    def check(self, cap: int = DEFAULT.word_cap, max_words: int = DEFAULT.max_words) -> bool:
        """Y's words agree with the image words for every length up to cap."""
        for L in range(1, cap + 1):
            if set(enumerate_words(self.Y, L, max_words)) != {
                    tuple(self.Y.alphabet.index(self.pi.codomain[s]) for s in w)
                    for w in image_words(self.pi, L, max_words)}:
                return False
        return True


class NormalForm(NamedTuple):
    triple: FactorTriple
    to_normal: SlidingBlockCode
    from_normal: SlidingBlockCode

    @property
    def X(self) -> Presentation:
        return self.triple.X

    @property
    def pi(self) -> SlidingBlockCode:
        return self.triple.pi


class _CodeNormalForm(NamedTuple):
    pi: SlidingBlockCode
    to_normal: SlidingBlockCode
    from_normal: SlidingBlockCode


def normalize_code(pi: SlidingBlockCode, max_words: int = DEFAULT.max_words) -> _CodeNormalForm:
    X = pi.domain
    if not X.is_sft:
        raise ValueError("normalization needs an SFT domain")
    Xv = to_vertex_form(X)
    if pi.is_one_block:
        code = pi if Xv is X else SlidingBlockCode(Xv, pi.codomain, 0, 0, pi.table)
        ident = SlidingBlockCode.identity(Xv)
        return _CodeNormalForm(code, ident, ident)
    rec = higher_block(Xv, pi.window, pi.memory, max_words)
    table = {(i,): pi.table[w] for w, i in rec.forward.table.items()}
    code = SlidingBlockCode(rec.presentation, pi.codomain, 0, 0, table)
    if Xv is not X:
        fwd = SlidingBlockCode(X, rec.forward.codomain, rec.forward.memory,
                               rec.forward.anticipation, rec.forward.table)
        inv = SlidingBlockCode(rec.presentation, X.alphabet, 0, 0, rec.inverse.table)
        return _CodeNormalForm(code, fwd, inv)
    return _CodeNormalForm(code, rec.forward, rec.inverse)


def normalize(t: FactorTriple, max_words: int = DEFAULT.max_words) -> NormalForm:
    """Recode so that X is a vertex-SFT and pi is 1-block; Y is unchanged."""
    nf = normalize_code(t.pi, max_words)
    return NormalForm(FactorTriple(nf.pi.domain, nf.pi, t.Y), nf.to_normal, nf.from_normal)


# -- sofic images and Fischer covers ----------------------------------------


def label_graph(pi: SlidingBlockCode) -> Presentation:
    """X's graph relabeled through a 1-block code (not yet right-resolving)."""
    if not pi.is_one_block:
        raise ValueError("label_graph needs a 1-block code")
    X = pi.domain
    if X.is_sft:
        Xv = to_vertex_form(X)
        edges = [(s, t, pi.table[(t,)]) for s, t, _ in Xv.edges]
        return Presentation(pi.codomain, Xv.states, edges, "labeled-sofic")
    edges = [(s, t, pi.table[(a,)]) for s, t, a in X.edges]
    return Presentation(pi.codomain, X.states, edges, "labeled-sofic")


def fischer_cover(g: Presentation, max_states: int = DEFAULT.max_states) -> Presentation:
    """Minimal right-resolving presentation of the (irreducible) shift of g.

    Subset construction from the full state set, merging of states with
    equal follower sets by partition refinement, then the unique terminal
    strong component of the quotient.
    """
    g = trim_essential(g)
    start = frozenset(range(len(g.states)))
    index = {start: 0}
    subsets = [start]
    delta: list[dict] = []
    queue = deque([start])
    while queue:
        S = queue.popleft()
        out: dict[int, set] = {}
        for s in S:
            for a, ts in g.moves[s].items():
                out.setdefault(a, set()).update(ts)
        row = {}
        for a in sorted(out):
            T = frozenset(out[a])
            if T not in index:
                index[T] = len(subsets)
                subsets.append(T)
                queue.append(T)
                if len(subsets) > max_states:
                    raise ResourceLimit(f"subset construction exceeded {max_states} states")
            row[a] = index[T]
        delta.append(row)

    # partition refinement by follower behaviour
    n = len(subsets)
    block = [0] * n
    sig = {}
    for i in range(n):
        key = tuple(sorted(delta[i]))
        block[i] = sig.setdefault(key, len(sig))
    while True:
        sig = {}
        new = [0] * n
        for i in range(n):
            key = (block[i], tuple((a, block[j]) for a, j in sorted(delta[i].items())))
            new[i] = sig.setdefault(key, len(sig))
        if len(sig) == len(set(block)):
            block = new
            break
        block = new
    nb = max(block) + 1
    qdelta: list[dict] = [dict() for _ in range(nb)]
    for i in range(n):
        for a, j in delta[i].items():
            qdelta[block[i]][a] = block[j]

    comp = strong_components(nb, [set(d.values()) for d in qdelta])
    sinks = []
    for c in sorted(set(comp)):
        members = [b for b in range(nb) if comp[b] == c]
        closed = all(comp[t] == c for b in members for t in qdelta[b].values())
        if closed:
            sinks.append(members)
    if len(sinks) != 1:
        raise NotIrreducible("shift has no unique terminal follower-set component")
    members = set(sinks[0])
    # canonical state order: BFS from the member reached first from the start
    order = []
    seen = set()
    first = min(members, key=lambda b: _bfs_distance(qdelta, block[0]).get(b, 1 << 30))
    queue = deque([first])
    seen.add(first)
    while queue:
        b = queue.popleft()
        order.append(b)
        for a in sorted(qdelta[b]):
            t = qdelta[b][a]
            if t not in seen:
                seen.add(t)
                queue.append(t)
    rename = {b: i for i, b in enumerate(order)}
    edges = [(rename[b], rename[t], a) for b in order for a, t in sorted(qdelta[b].items())]
    used = sorted({a for _, _, a in edges})
    relabel = {a: i for i, a in enumerate(used)}
    return Presentation([g.alphabet[a] for a in used], [f"q{i}" for i in range(len(order))],
                        [(s, t, relabel[a]) for s, t, a in edges], "labeled-sofic", right_resolving=True)


def _bfs_distance(delta, start) -> dict:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        b = queue.popleft()
        for a in sorted(delta[b]):
            t = delta[b][a]
            if t not in dist:
                dist[t] = dist[b] + 1
                queue.append(t)
    return dist


def image_presentation(pi: SlidingBlockCode, max_states: int = DEFAULT.max_states) -> Presentation:
    """Right-resolving presentation (Fischer cover) of the image of a 1-block code."""
    if not pi.is_one_block:
        raise ValueError("image_presentation needs a 1-block code (normalize first)")
    cover = fischer_cover(label_graph(pi), max_states)
    # keep the codomain ordering of the code
    order = [a for a in pi.codomain if a in cover.alphabet]
    remap = {cover.alphabet.index(a): i for i, a in enumerate(order)}
    return Presentation(order, cover.states, [(s, t, remap[a]) for s, t, a in cover.edges],
                        "labeled-sofic", right_resolving=True)


def minimal_right_resolving(p: Presentation, max_states: int = DEFAULT.max_states):
    """Fischer cover of p and the 1-block code from its edge shift onto p's shift."""
    p = trim_essential(p)
    if not is_irreducible(p):
        raise NotIrreducible("minimal right-resolving presentations need an irreducible input")
    cover = fischer_cover(p, max_states)
    E = edge_shift_of(cover)
    code = SlidingBlockCode(E, cover.alphabet, 0, 0, {(i,): a for i, (_, _, a) in enumerate(cover.edges)})
    return cover, code


def through_cover(code: SlidingBlockCode, max_states: int = DEFAULT.max_states) -> SlidingBlockCode:
    """Precompose a code on a sofic domain with the domain's degree-one cover."""
    if code.domain.is_sft:
        return code
    _, cover_code = minimal_right_resolving(code.domain, max_states)
    return compose(code, cover_code)


def isomorphic_covers(a: Presentation, b: Presentation) -> bool:
    """Labeled-graph isomorphism of two right-resolving irreducible graphs."""
    if len(a.states) != len(b.states) or len(a.edges) != len(b.edges):
        return False
    if sorted(a.alphabet) != sorted(b.alphabet):
        return False
    la = [{a.alphabet[x]: t for x, ts in a.moves[s].items() for t in ts} for s in range(len(a.states))]
    lb = [{b.alphabet[x]: t for x, ts in b.moves[s].items() for t in ts} for s in range(len(b.states))]
    for target in range(len(b.states)):
        f = {0: target}
        queue = deque([0])
        ok = True
        while queue and ok:
            s = queue.popleft()
            if set(la[s]) != set(lb[f[s]]):
                ok = False
                break
            for name, t in la[s].items():
                u = lb[f[s]][name]
                if t in f:
                    if f[t] != u:
                        ok = False
                        break
                else:
                    f[t] = u
                    queue.append(t)
        if ok and len(set(f.values())) == len(f) == len(a.states):
            return True
    return False


def same_shift(p: Presentation, q: Presentation, max_states: int = DEFAULT.max_states) -> bool:
    """Exact equality of irreducible sofic shifts via their Fischer covers."""
    return isomorphic_covers(fischer_cover(p, max_states), fischer_cover(q, max_states))
