"""Shift spaces presented by finite labeled multigraphs.

A :class:`Presentation` is a directed multigraph whose edges carry labels
from a finite alphabet. The presented shift is the set of label sequences
of bi-infinite paths, so every language operation here assumes the graph
is *essential* (each state has an incoming and an outgoing edge). Three
kinds are distinguished:

* ``vertex-SFT``: states are the symbols and every edge is labeled by its
  destination. Such a shift is a 1-step shift of finite type.
* ``edge-SFT``: every edge carries its own private symbol (the edge shift).
* ``labeled-sofic``: arbitrary labels, presenting a sofic shift.

Words are tuples of symbol ids. All presentations are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT
from .errors import EmptyShift, NotInLanguage, NotIrreducible, ParseError, ResourceLimit

Word = tuple  # tuple[int, ...]

KINDS = ("vertex-SFT", "edge-SFT", "labeled-sofic")


def spell(alphabet: Sequence[str], word: Iterable[int]) -> str:
    """Render a word with the display names of `alphabet`."""
    names = [alphabet[s] for s in word]
    if all(len(a) == 1 for a in alphabet):
        return "".join(names)
    return " ".join(names)


def parse_word(alphabet: Sequence[str], text: str) -> Word:
    """Inverse of :func:`spell`: space separated names, or single characters."""
    index = {a: i for i, a in enumerate(alphabet)}
    tokens = text.split() if (" " in text or not all(len(a) == 1 for a in alphabet)) else list(text)
    try:
        return tuple(index[t] for t in tokens)
    except KeyError as exc:
        raise ParseError(f"unknown symbol {exc.args[0]!r} in word {text!r}") from None


@dataclass(frozen=True)
class Presentation:
    alphabet: tuple
    states: tuple
    edges: tuple
    kind: str = "labeled-sofic"
    right_resolving: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(str(a) for a in self.alphabet))
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "edges", tuple((int(s), int(t), int(a)) for s, t, a in self.edges))
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate symbol names")
        ns, na = len(self.states), len(self.alphabet)
        for i, (s, t, a) in enumerate(self.edges):
            if not (0 <= s < ns and 0 <= t < ns):
                raise ValueError(f"edge {i} has an out-of-range state")
            if not 0 <= a < na:
                raise ValueError(f"edge {i} has an out-of-range label {a}")
        if self.kind == "vertex-SFT":
            if ns != na:
                raise ValueError("vertex-SFT needs one state per symbol")
            if any(a != t for _, t, a in self.edges):
                raise ValueError("vertex-SFT edges must be labeled by their destination")
            if len(set(self.edges)) != len(self.edges):
                raise ValueError("vertex-SFT cannot have parallel edges")
        elif self.kind == "edge-SFT":
            if sorted(a for _, _, a in self.edges) != list(range(na)):
                raise ValueError("edge-SFT needs exactly one edge per symbol")
        if self.right_resolving and not self.is_right_resolving:
            raise ValueError("right_resolving flag set on a graph with duplicate outgoing labels")

    # -- derived structure -------------------------------------------------

    @cached_property
    def out_edges(self) -> tuple:
        out = [[] for _ in self.states]
        for i, (s, t, a) in enumerate(self.edges):
            out[s].append((a, t, i))
        return tuple(tuple(sorted(o)) for o in out)

    @cached_property
    def moves(self) -> tuple:
        """moves[state] maps a label to the tuple of successor states."""
        res = []
        for out in self.out_edges:
            d: dict[int, list[int]] = {}
            for a, t, _ in out:
                d.setdefault(a, []).append(t)
            res.append({a: tuple(sorted(set(ts))) for a, ts in d.items()})
        return tuple(res)

    @cached_property
    def is_right_resolving(self) -> bool:
        return all(len(set(a for a, _, _ in out)) == len(out) for out in self.out_edges)

    @cached_property
    def is_essential(self) -> bool:
        has_in = {t for _, t, _ in self.edges}
        has_out = {s for s, _, _ in self.edges}
        return len(self.states) > 0 and has_in == has_out == set(range(len(self.states)))

    @property
    def is_sft(self) -> bool:
        return self.kind != "labeled-sofic"

    @cached_property
    def symbol_successors(self) -> tuple:
        """For SFT kinds: successor bitmask of every symbol (1-step rule)."""
        if not self.is_sft:
            raise ValueError("symbol successors are only defined for SFT presentations")
        n = len(self.alphabet)
        succ = [0] * n
        if self.kind == "vertex-SFT":
            for s, t, _ in self.edges:
                succ[s] |= 1 << t
        else:
            by_src: dict[int, int] = {}
            for s, _, a in self.edges:
                by_src[s] = by_src.get(s, 0) | (1 << a)
            for s, t, a in self.edges:
                succ[a] = by_src.get(t, 0)
        return tuple(succ)

    def adjacency(self) -> np.ndarray:
        """Symbol transition matrix of an SFT presentation."""
        n = len(self.alphabet)
        A = np.zeros((n, n), dtype=np.int64)
        for s, m in enumerate(self.symbol_successors):
            for t in range(n):
                if m >> t & 1:
                    A[s, t] = 1
        return A

    def spell(self, word: Iterable[int]) -> str:
        return spell(self.alphabet, word)

    def parse(self, text: str) -> Word:
        return parse_word(self.alphabet, text)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "alphabet": list(self.alphabet),
            "states": list(self.states),
            "edges": [[self.states[s], self.states[t], a] for s, t, a in self.edges],
            "kind": self.kind,
        }
        if self.right_resolving:
            d["right_resolving"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Presentation":
        for key in ("alphabet", "states", "edges"):
            if key not in d:
                raise ParseError(f"presentation is missing field {key!r}")
        states = [str(s) for s in d["states"]]
        seen = set()
        for s in states:
            if s in seen:
                raise ParseError(f"duplicate state name {s!r}")
            seen.add(s)
        index = {s: i for i, s in enumerate(states)}
        na = len(d["alphabet"])
        edges = []
        for i, rec in enumerate(d["edges"]):
            if not isinstance(rec, (list, tuple)) or len(rec) != 3:
                raise ParseError(f"edges[{i}]: expected [src, dst, label-index], got {rec!r}")
            ends = []
            for end in rec[:2]:
                if isinstance(end, int) and not isinstance(end, bool) and 0 <= end < len(states):
                    ends.append(end)
                elif isinstance(end, str) and end in index:
                    ends.append(index[end])
                else:
                    raise ParseError(f"edges[{i}]: unknown state {end!r}")
            label = rec[2]
            if not isinstance(label, int) or isinstance(label, bool) or not 0 <= label < na:
                raise ParseError(f"edges[{i}]: label index {label!r} out of range 0..{na - 1}")
            edges.append((ends[0], ends[1], label))
        try:
            return cls(d["alphabet"], states, edges, d.get("kind", "labeled-sofic"),
                       bool(d.get("right_resolving", False)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None


# -- constructors -----------------------------------------------------------


def vertex_shift(alphabet: Sequence[str] | int, allowed: Iterable[tuple[int, int]]) -> Presentation:
    """1-step SFT on `alphabet` with the given allowed transitions, trimmed."""
    if isinstance(alphabet, int):
        alphabet = [str(i) for i in range(alphabet)]
    alphabet = list(alphabet)
    edges = sorted({(int(s), int(t), int(t)) for s, t in allowed})
    return trim_essential(Presentation(alphabet, alphabet, edges, "vertex-SFT"))


def from_matrix(A, alphabet: Sequence[str] | None = None) -> Presentation:
    A = np.asarray(A)
    n = A.shape[0]
    if alphabet is None:
        alphabet = [str(i) for i in range(n)]
    return vertex_shift(alphabet, [(i, j) for i in range(n) for j in range(n) if A[i, j]])


def full_shift(alphabet: Sequence[str] | int) -> Presentation:
    if isinstance(alphabet, int):
        alphabet = [str(i) for i in range(alphabet)]
    n = len(alphabet)
    return vertex_shift(alphabet, [(i, j) for i in range(n) for j in range(n)])


def golden_mean() -> Presentation:
    return vertex_shift(["0", "1"], [(0, 0), (0, 1), (1, 0)])


def even_shift() -> Presentation:
    """Right-resolving 2-state presentation: 1s separated by even runs of 0s."""
    return Presentation(["0", "1"], ["A", "B"], [(0, 0, 1), (0, 1, 0), (1, 0, 0)],
                        "labeled-sofic", right_resolving=True)


def from_forbidden(alphabet: Sequence[str], forbidden: Iterable[Sequence[int]],
                   max_words: int = DEFAULT.max_words) -> Presentation:
    """Recode an SFT given by forbidden words as a vertex-SFT.

    The symbols of the result are the allowed words of length
    ``max(1, longest forbidden - 1)``.
    """
    forbidden = [tuple(f) for f in forbidden]
    alphabet = list(alphabet)
    window = max(1, max((len(f) for f in forbidden), default=1) - 1)

    def ok(w):
        return not any(w[i:i + len(f)] == f for f in forbidden for i in range(len(w) - len(f) + 1))

    n = len(alphabet)
    if n ** window > max_words:
        raise ResourceLimit(f"{n}**{window} candidate words exceed cap {max_words}")
    words = [w for w in product(range(n), repeat=window) if ok(w)]
    index = {w: i for i, w in enumerate(words)}
    allowed = [(index[u], index[u[1:] + (a,)]) for u in words for a in range(n)
               if u[1:] + (a,) in index and ok(u + (a,))]
    names = [spell(alphabet, w) for w in words]
    return vertex_shift(names, allowed)


def edge_shift_of(p: Presentation) -> Presentation:
    """Edge-SFT on the graph of `p` (each edge becomes its own symbol)."""
    names = [f"e{i}" for i in range(len(p.edges))]
    return Presentation(names, p.states, [(s, t, i) for i, (s, t, _) in enumerate(p.edges)], "edge-SFT")


def to_vertex_form(p: Presentation) -> Presentation:
    """The same SFT (same alphabet, same words) as a vertex-SFT."""
    if p.kind == "vertex-SFT":
        return p
    if p.kind != "edge-SFT":
        raise ValueError("only SFT presentations have a vertex form")
    succ = p.symbol_successors
    n = len(p.alphabet)
    return vertex_shift(p.alphabet, [(s, t) for s in range(n) for t in range(n) if succ[s] >> t & 1])


def power_shift(p: Presentation, m: int) -> Presentation:
    """The m-th power shift (non-overlapping m-blocks) of a 1-step SFT."""
    p = to_vertex_form(p)
    words = enumerate_words(p, m)
    succ = p.symbol_successors
    index = {w: i for i, w in enumerate(words)}
    allowed = [(index[u], index[v]) for u in words for v in words if succ[u[-1]] >> v[0] & 1]
    return vertex_shift([p.spell(w) for w in words], allowed)


# -- structural operations --------------------------------------------------


def trim_essential(p: Presentation) -> Presentation:
    """Delete states that do not lie on a bi-infinite path."""
    alive = set(range(len(p.states)))
    edges = list(p.edges)
    while True:
        live_edges = [e for e in edges if e[0] in alive and e[1] in alive]
        has_in = {t for _, t, _ in live_edges}
        has_out = {s for s, _, _ in live_edges}
        keep = alive & has_in & has_out
        edges = live_edges
        if keep == alive:
            break
        alive = keep
    if not alive:
        raise EmptyShift("no state lies on a bi-infinite path")
    if len(alive) == len(p.states) and len(edges) == len(p.edges):
        return p
    order = sorted(alive)
    remap = {s: i for i, s in enumerate(order)}
    if p.kind == "vertex-SFT":
        return Presentation([p.alphabet[s] for s in order], [p.states[s] for s in order],
                            [(remap[s], remap[t], remap[t]) for s, t, _ in edges], "vertex-SFT")
    if p.kind == "edge-SFT":
        used = sorted(a for _, _, a in edges)
        relabel = {a: i for i, a in enumerate(used)}
        return Presentation([p.alphabet[a] for a in used], [p.states[s] for s in order],
                            [(remap[s], remap[t], relabel[a]) for s, t, a in edges], "edge-SFT")
    rr = p.right_resolving
    return Presentation(p.alphabet, [p.states[s] for s in order],
                        [(remap[s], remap[t], a) for s, t, a in edges], p.kind, rr)


def _require_essential(p: Presentation):
    if not p.is_essential:
        raise ValueError("presentation is not essential; call trim_essential first")


def _state_graph(p: Presentation) -> csr_matrix:
    n = len(p.states)
    rows = [s for s, _, _ in p.edges]
    cols = [t for _, t, _ in p.edges]
    return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def is_irreducible(p: Presentation) -> bool:
    _require_essential(p)
    ncomp, _ = connected_components(_state_graph(p), directed=True, connection="strong")
    return ncomp == 1


def strong_components(n: int, succ: Sequence[Iterable[int]]) -> np.ndarray:
    """Strong-component labels of a graph given by successor lists."""
    rows, cols = [], []
    for s, ts in enumerate(succ):
        for t in ts:
            rows.append(s)
            cols.append(t)
    g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(g, directed=True, connection="strong")[1]


def period(p: Presentation) -> int:
    """gcd of cycle lengths, by BFS levels."""
    if not is_irreducible(p):
        raise NotIrreducible("period is defined for irreducible presentations")
    level = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for _, t, _ in p.out_edges[s]:
                if t not in level:
                    level[t] = level[s] + 1
                    nxt.append(t)
        frontier = nxt
    g = 0
    for s, t, _ in p.edges:
        g = gcd(g, level[s] + 1 - level[t])
    return abs(g)


# -- language ---------------------------------------------------------------


def follow(p: Presentation, word: Sequence[int], start: Iterable[int] | None = None) -> frozenset:
    """States reachable by paths labeled `word` (from `start`, default all)."""
    current = set(range(len(p.states))) if start is None else set(start)
    for a in word:
        current = {t for s in current for t in p.moves[s].get(a, ())}
        if not current:
            break
    return frozenset(current)


def accepts(p: Presentation, word: Sequence[int]) -> bool:
    _require_essential(p)
    return bool(follow(p, word)) or len(word) == 0


def enumerate_words(p: Presentation, L: int, max_words: int = DEFAULT.max_words) -> list:
    """Sorted list of the distinct length-L words of the presented shift."""
    if L < 1:
        raise ValueError("L must be >= 1")
    _require_essential(p)
    layer = {(): frozenset(range(len(p.states)))}
    for _ in range(L):
        nxt: dict = {}
        for w, states in layer.items():
            step: dict[int, set] = {}
            for s in states:
                for a, ts in p.moves[s].items():
                    step.setdefault(a, set()).update(ts)
            for a, ts in step.items():
                nxt[w + (a,)] = frozenset(ts)
        if len(nxt) > max_words:
            raise ResourceLimit(f"more than {max_words} words of length <= {L}")
        layer = nxt
    return sorted(layer)


def count_words(p: Presentation, L: int, max_states: int = DEFAULT.max_states) -> int:
    """Number of length-L words, by dynamic programming over reachable state sets."""
    _require_essential(p)
    counts = {frozenset(range(len(p.states))): 1}
    for _ in range(L):
        nxt: dict = {}
        for states, c in counts.items():
            step: dict[int, set] = {}
            for s in states:
                for a, ts in p.moves[s].items():
                    step.setdefault(a, set()).update(ts)
            for ts in step.values():
                key = frozenset(ts)
                nxt[key] = nxt.get(key, 0) + c
        if len(nxt) > max_states:
            raise ResourceLimit(f"more than {max_states} state sets while counting words")
        counts = nxt
    return sum(counts.values())


def require_word(p: Presentation, word: Sequence[int]):
    if any(not 0 <= a < len(p.alphabet) for a in word) or not accepts(p, word):
        raise NotInLanguage(f"{list(word)} is not a word of the shift")


# -- recoding ---------------------------------------------------------------


class Recoding(NamedTuple):
    presentation: Presentation
    forward: "object"  # SlidingBlockCode: p -> recoded
    inverse: "object"  # SlidingBlockCode: recoded -> p


def higher_block(p: Presentation, N: int, memory: int = 0,
                 max_words: int = DEFAULT.max_words) -> Recoding:
    """N-th higher block presentation with the conjugacies both ways.

    The forward code sends x to the point whose i-th symbol is the word
    ``x[i - memory : i - memory + N]``.
    """
    from .blockcode import SlidingBlockCode

    if N < 1 or not 0 <= memory < N:
        raise ValueError("need N >= 1 and 0 <= memory < N")
    _require_essential(p)
    if N == 1:
        ident = SlidingBlockCode.identity(p)
        return Recoding(p, ident, ident)
    words = enumerate_words(p, N, max_words)
    index = {w: i for i, w in enumerate(words)}
    names = [p.spell(w) for w in words]
    if p.is_sft:
        longer = set(enumerate_words(p, N + 1, max_words))
        allowed = [(index[w[:-1]], index[w[1:]]) for w in longer]
        new = Presentation(names, names, sorted((s, t, t) for s, t in allowed), "vertex-SFT")
    else:
        # states: paths of length N-1, edges: paths of length N
        paths = [((s,), ()) for s in range(len(p.states))]
        for _ in range(N - 1):
            paths = [(st + (t,), lab + (a,)) for st, lab in paths for a, t, _ in p.out_edges[st[-1]]]
        if len(paths) > max_words:
            raise ResourceLimit("too many paths in higher block construction")
        pindex = {st: i for i, (st, _) in enumerate(paths)}
        edges = set()
        for st, lab in paths:
            for a, t, _ in p.out_edges[st[-1]]:
                edges.add((pindex[st], pindex[st[1:] + (t,)], index[lab + (a,)]))
        new = trim_essential(Presentation(names, [f"q{i}" for i in range(len(paths))], sorted(edges)))
    forward = SlidingBlockCode(p, names, memory, N - 1 - memory, {w: index[w] for w in words})
    inverse = SlidingBlockCode(new, p.alphabet, 0, 0,
                               {(i,): w[memory] for i, w in enumerate(words)})
    return Recoding(new, forward, inverse)
