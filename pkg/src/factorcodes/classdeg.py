"""Routability, transition blocks and class degree.

Inputs are 1-block codes on 1-step vertex-SFTs (normalized codes) or their
:class:`~factorcodes.blockcode.OneBlockView`; words are tuples of symbol
indices.

For an image word w = w_0 ... w_p and a position 0 < n < p, a preimage u
can be rerouted through a symbol a at time n iff a lies in both the set of
symbols reachable at time n from u_0 (reading w_0 ... w_n) and the set of
symbols at time n from which u_p is reachable (reading w_n ... w_p). So
routability depends on the endpoint pair only, and the routing sets are
intersections ``P & Q`` of a forward mask and a backward mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blockcode import OneBlockView, bits
from .config import DEFAULT, AnalysisConfig
from .errors import BadPosition, NotAPreimage, NotInLanguage, NotMinimal, ParseError, ResourceLimit
from .fto import LayerSequence
from .shiftspace import Word, parse_word, spell


def _view(pi) -> OneBlockView:
    return pi if isinstance(pi, OneBlockView) else pi.view


def _mask(symbols) -> int:
    m = 0
    for s in symbols:
        m |= 1 << s
    return m


@dataclass(frozen=True)
class TransitionBlock:
    """Triple (w, n, M) with M a set of domain symbols over w_n."""

    w: Word
    n: int
    M: tuple
    certified: bool = False

    @property
    def depth(self) -> int:
        return len(self.M)

    def to_dict(self, view: OneBlockView | None = None) -> dict:
        if view is None:
            return {"w": list(self.w), "n": self.n, "M": list(self.M), "depth": self.depth,
                    "certified": self.certified}
        return {"w": spell(view.y_names, self.w), "n": self.n,
                "M": [view.x_names[a] for a in self.M], "depth": self.depth,
                "certified": self.certified}

    @classmethod
    def from_dict(cls, d: dict, view: OneBlockView) -> TransitionBlock:
        yi = {name: i for i, name in enumerate(view.y_names)}
        xi = {name: i for i, name in enumerate(view.x_names)}
        try:
            w = parse_word(view.y_names, d["w"]) if isinstance(d["w"], str) else \
                tuple(yi[b] if isinstance(b, str) else int(b) for b in d["w"])
            M = tuple(sorted(xi[a] if isinstance(a, str) else int(a) for a in d["M"]))
        except KeyError as exc:
            raise ParseError(f"unknown symbol {exc.args[0]!r} in transition block") from None
        return cls(tuple(w), int(d["n"]), M, bool(d.get("certified", False)))


@dataclass(frozen=True)
class RoutingTable:
    """Endpoint pair -> bitmask of symbols the pair can be routed through."""

    w: Word
    n: int
    table: dict

    def sets(self) -> list:
        return sorted(set(self.table.values()))


def _check_word(v: OneBlockView, w: Word) -> None:
    if any(not 0 <= b < v.ny for b in w):
        raise NotInLanguage("symbol outside the image alphabet")


def _check_position(w: Word, n: int) -> None:
    if len(w) < 3:
        raise BadPosition(f"word of length {len(w)} has no interior position")
    if not 0 < n < len(w) - 1:
        raise BadPosition(f"position {n} outside 0 < n < {len(w) - 1}")


def _grouped_masks(v: OneBlockView, start: int, word, move) -> dict:
    """Symbol of ``start`` -> mask after moving along word; equal masks stepped once."""
    groups = {1 << s: [s] for s in bits(start)}
    for b in word:
        nxt: dict = {}
        for m, members in groups.items():
            m2 = move(m, b)
            if m2:
                nxt.setdefault(m2, []).extend(members)
        groups = nxt
    return {s: m for m, members in groups.items() for s in members}


def _forward_masks(v: OneBlockView, w: Word, n: int) -> dict:
    """Start symbol -> mask of symbols reachable at time n."""
    return _grouped_masks(v, v.fiber[w[0]], w[1:n + 1], v.step)


def _backward_masks(v: OneBlockView, w: Word, n: int) -> dict:
    """End symbol -> mask of symbols at time n from which it is reachable."""
    return _grouped_masks(v, v.fiber[w[-1]], tuple(reversed(w[n:-1])), v.back)


def depth_one_symbols(P, Q) -> int:
    """Mask of symbols hitting every nonempty intersection p & q (p in P, q in Q).

    A forward mask meets some backward mask iff it meets their union, so the
    common symbols are the intersection of those masks on both sides.
    """
    uq = uP = 0
    for q in Q:
        uq |= q
    for p in P:
        uP |= p
    common = -1
    for p in P:
        if p & uq:
            common &= p
    for q in Q:
        if q & uP:
            common &= q
    return common if common != -1 else 0


def preimage_words(pi, w: Word, cap: int | None = None) -> set:
    """All domain words mapping to w (depth-first over the trimmed fiber)."""
    v = _view(pi)
    w = tuple(w)
    _check_word(v, w)
    cap = DEFAULT.max_words if cap is None else cap
    if not w:
        return {()}
    # alive[k]: symbols at time k lying on some full preimage path
    fwd = [v.fiber[w[0]]]
    for b in w[1:]:
        fwd.append(v.step(fwd[-1], b))
    alive = [0] * len(w)
    alive[-1] = fwd[-1]
    for k in range(len(w) - 2, -1, -1):
        alive[k] = fwd[k] & v.back(alive[k + 1], w[k])
    out: set = set()
    stack = [(s,) for s in reversed(bits(alive[0]))]
    while stack:
        u = stack.pop()
        if len(u) == len(w):
            out.add(u)
            if len(out) > cap:
                raise ResourceLimit(f"more than {cap} preimages")
            continue
        for t in reversed(bits(v.succ[u[-1]] & alive[len(u)])):
            stack.append(u + (t,))
    return out


def _is_preimage(v: OneBlockView, w: Word, u: Word) -> bool:
    if len(u) != len(w):
        return False
    for k, (s, b) in enumerate(zip(u, w)):
        if not 0 <= s < v.n or v.label[s] != b:
            return False
        if k and not v.succ[u[k - 1]] >> s & 1:
            return False
    return True


def routable_through(pi, w: Word, n: int, u: Word, a: int) -> bool:
    """Whether some preimage with the endpoints of u passes through a at time n."""
    v = _view(pi)
    w, u = tuple(w), tuple(u)
    _check_position(w, n)
    if not _is_preimage(v, w, u):
        raise NotAPreimage(f"{spell(v.x_names, u)} is not a preimage of {spell(v.y_names, w)}")
    m = 1 << u[0]
    for b in w[1:n + 1]:
        m = v.step(m, b)
    q = 1 << u[-1]
    for b in reversed(w[n:-1]):
        q = v.back(q, b)
    return bool((m & q) >> a & 1)


def routing_table(pi, w: Word, n: int) -> RoutingTable:
    v = _view(pi)
    w = tuple(w)
    _check_word(v, w)
    _check_position(w, n)
    P, Q = _forward_masks(v, w, n), _backward_masks(v, w, n)
    table = {}
    for s, pm in P.items():
        for t, qm in Q.items():
            if pm & qm:
                table[(s, t)] = pm & qm
    return RoutingTable(w, n, table)


def is_transition_block(pi, w: Word, n: int, M) -> bool:
    """Every realizable endpoint pair can be routed through a symbol of M."""
    v = _view(pi)
    w = tuple(w)
    _check_word(v, w)
    _check_position(w, n)
    P = set(_forward_masks(v, w, n).values())
    Q = set(_backward_masks(v, w, n).values())
    mm = _mask(M)
    if len(M) == 1:
        return bool(depth_one_symbols(P, Q) & mm)
    return all(not p & q or p & q & mm for p in P for q in Q)


def _minimal_family(sets) -> list:
    """Drop duplicates and supersets; hitting sets are unchanged."""
    uniq = sorted(set(sets), key=lambda m: (m.bit_count(), m))
    kept: list = []
    for m in uniq:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def _disjoint_lower_bound(sets) -> int:
    used, count = 0, 0
    for m in sorted(sets, key=lambda m: m.bit_count()):
        if not m & used:
            used |= m
            count += 1
    return count


def _greedy_hitting_size(sets) -> int:
    unhit, size = list(sets), 0
    while unhit:
        counts: dict = {}
        for m in unhit:
            for a in bits(m):
                counts[a] = counts.get(a, 0) + 1
        a = max(sorted(counts), key=counts.__getitem__)
        unhit = [m for m in unhit if not m >> a & 1]
        size += 1
    return size


def min_hitting_set(sets, limit: int | None = None) -> tuple | None:
    """Lexicographically smallest minimum-size set of symbols meeting every mask.

    Iterative deepening over the size; inside, a depth-first search picks
    symbols in increasing order and prunes when the unhit sets contain more
    pairwise-disjoint members than picks remaining. With ``limit`` only
    sizes up to the limit are searched and None means none exists.
    """
    family = _minimal_family(sets)
    if not family:
        return ()
    if family[0] == 0:
        raise ValueError("empty set cannot be hit")
    universe = bits(_mask(s for m in family for s in bits(m)))
    top = len(universe) if limit is None else min(limit, len(universe))

    def search(start, chosen, unhit, k):
        if not unhit:
            return chosen
        if len(chosen) == k:
            return None
        allowed = _mask(universe[start:])
        rest = [m & allowed for m in unhit]
        if 0 in rest or _disjoint_lower_bound(rest) > k - len(chosen):
            return None
        for idx in range(start, len(universe)):
            a = universe[idx]
            bit = 1 << a
            res = search(idx + 1, chosen + (a,), [m for m in unhit if not m & bit], k)
            if res is not None:
                return res
        return None

    for k in range(max(1, _disjoint_lower_bound(family)), top + 1):
        res = search(0, (), family, k)
        if res is not None:
            return res
    if limit is None:
        raise AssertionError("unreachable: the universe hits every set")
    return None


def minimal_depth_for_word(pi, w: Word) -> TransitionBlock:
    """Minimal-depth transition block for a fixed word; ties by smallest n then M."""
    v = _view(pi)
    w = tuple(w)
    if len(w) < 3:
        raise BadPosition(f"word of length {len(w)} has no interior position")
    best = None
    for n in range(1, len(w) - 1):
        rt = routing_table(v, w, n)
        if not rt.table:
            raise NotInLanguage(f"{spell(v.y_names, w)} has no preimage")
        M = min_hitting_set(rt.table.values())
        if best is None or len(M) < len(best[1]):
            best = (n, M)
    return TransitionBlock(w, best[0], best[1], True)


@dataclass
class ClassDegreeReport:
    value: int | None
    witness: TransitionBlock | None
    trace: list = field(default_factory=list)
    max_length: int = 0
    stabilized: bool = False
    rule: str | None = None
    plateau: int | None = None
    exact: bool = False
    note: str = ""

    @property
    def trace_start(self) -> int:
        return 3

    def to_dict(self, view: OneBlockView) -> dict:
        return {
            "class_degree": self.value,
            "witness": None if self.witness is None else self.witness.to_dict(view),
            "trace": list(self.trace),
            "trace_start_length": 3,
            "max_length": self.max_length,
            "stabilized": self.stabilized,
            "rule": self.rule,
            "plateau": self.plateau,
            "exact": self.exact,
            "note": self.note,
        }


def _prefix_layers(v: OneBlockView, max_states: int) -> LayerSequence:
    """Objects: frozensets of forward masks, one per start symbol."""
    init = {}
    for b in range(v.ny):
        if v.fiber[b]:
            init[frozenset(1 << s for s in bits(v.fiber[b]))] = (b,)

    def extend(layer):
        out: dict = {}
        for obj, word in sorted(layer.items(), key=lambda kv: kv[1]):
            for b in range(v.ny):
                nxt = frozenset(m2 for m in obj if (m2 := v.step(m, b)))
                if nxt and nxt not in out:
                    out[nxt] = word + (b,)
        return out

    return LayerSequence(init, extend, max_states)


def _suffix_layers(v: OneBlockView, max_states: int) -> LayerSequence:
    """Objects: frozensets of backward masks, one per end symbol."""
    init = {}
    for b in range(v.ny):
        if v.fiber[b]:
            init[frozenset(1 << s for s in bits(v.fiber[b]))] = (b,)

    def extend(layer):
        out: dict = {}
        for b in range(v.ny):
            for obj, word in layer.items():
                nxt = frozenset(m2 for m in obj if (m2 := v.back(m, b)))
                if nxt:
                    cand = (b,) + word
                    if nxt not in out or cand < out[nxt]:
                        out[nxt] = cand
        return out

    return LayerSequence(init, extend, max_states)


def _center(v: OneBlockView, obj) -> int:
    m = next(iter(obj))
    return v.label[(m & -m).bit_length() - 1]


def class_degree_upper(pi, max_length: int | None = None, config: AnalysisConfig = DEFAULT,
                       stop_early: bool | None = None, target: int | None = None
                       ) -> ClassDegreeReport:
    """Per-length minimal transition-block depth c_L for L = 3, 4, ...

    Stop rules, checked after each length: the value 1 (no block has depth
    below 1, exact); every pair of reachable prefix/suffix layer sets has
    been combined (exact, since the layer sets are eventually periodic);
    a plateau c_L = c_{L-s} with s the squared domain alphabet size (an
    upper bound that has stabilized). With an explicit ``max_length`` the
    trace runs to that length; exact stops fill the remaining entries.

    With ``target`` only depths up to the target are searched and trace
    entries above it are None; this decides whether the class degree is at
    most the target without computing large depths.
    """
    v = _view(pi)
    if stop_early is None:
        stop_early = max_length is None
    L_max = config.max_length if max_length is None else max_length
    if L_max < 3:
        raise BadPosition("class degree needs words of length at least 3")
    s = config.plateau if config.plateau is not None else v.n * v.n
    pre = _prefix_layers(v, config.max_states)
    suf = _suffix_layers(v, config.max_states)
    fam_cache: dict = {}
    pair_cache: dict = {}   # (p, q) -> (M, None) exact or (None, lo): no set below lo
    layer_cache: dict = {}  # (key_i, key_j) -> (value, None) or (None, lo)

    def family(p_obj, q_obj):
        key = (p_obj, q_obj)
        if key not in fam_cache:
            fam_cache[key] = _minimal_family(pm & qm for pm in p_obj for qm in q_obj if pm & qm)
        return fam_cache[key]

    def pair_value(p_obj, q_obj, below):
        """Exact minimum hitting set if its size is < below, else None."""
        key = (p_obj, q_obj)
        M, lo = pair_cache.get(key, (None, 0))
        if M is not None:
            return M if len(M) < below else None
        if lo >= below or below <= 1:
            return None
        one = depth_one_symbols(p_obj, q_obj)
        if one:
            M = ((one & -one).bit_length() - 1,)
            pair_cache[key] = (M, None)
            return M
        if below == 2:
            pair_cache[key] = (None, 2)
            return None
        fam = family(p_obj, q_obj)
        if not fam:
            pair_cache[key] = (None, float("inf"))
            return None
        M = min_hitting_set(fam, limit=below - 1)
        pair_cache[key] = (M, None) if M is not None else (None, below)
        return M

    def pairs(i, j):
        P, Q = pre.get(i), suf.get(j)
        by_center: dict = {}
        for q in Q:
            by_center.setdefault(_center(v, q), []).append(q)
        return [(p, q) for p in P for q in by_center.get(_center(v, p), ())]

    def layer_value(i, j, below):
        key = (pre.key(i), suf.key(j))
        val, lo = layer_cache.get(key, (None, 0))
        if val is not None:
            return val if val < below else None
        if lo >= below:
            return None
        if below <= 2:
            cands = [(1, p, q) for p, q in pairs(i, j)]
        else:
            cands = [(_disjoint_lower_bound(family(p, q)), p, q) for p, q in pairs(i, j)]
        best = None
        for lb, p, q in sorted(cands, key=lambda c: c[0]):
            bound = below if best is None else best
            if lb >= bound:
                break
            M = pair_value(p, q, bound)
            if M is not None:
                best = len(M)
        layer_cache[key] = (best, None) if best is not None else (None, below)
        return best

    trace: list = []
    rule = None
    for L in range(3, L_max + 1):
        if trace and trace[-1] is not None:
            below = trace[-1]
        elif target is not None:
            below = target + 1
        else:
            below = None
            for i in range(1, L - 1):
                sizes = [_greedy_hitting_size(family(p, q)) for p, q in pairs(i, L - 1 - i)]
                sizes = [x for x in sizes if x]
                if sizes:
                    below = min(sizes) if below is None else min(below, min(sizes))
            if below is None:
                raise NotInLanguage("image has no words of length 3")
            below += 1
        if target is not None:
            below = min(below, target + 1)
        vals = [x for x in (layer_value(i, L - 1 - i, below) for i in range(1, L - 1))
                if x is not None]
        if vals:
            c_L = min(vals)
        elif trace and trace[-1] is not None:
            c_L = trace[-1]
        else:
            c_L = None
        trace.append(c_L)
        if rule is None:
            if c_L == 1:
                rule = "trivial-bound"
            elif pre.distinct is not None and suf.distinct is not None \
                    and L >= pre.distinct + suf.distinct + 1:
                rule = "layer-cycle"
            elif len(trace) > s and trace[-1 - s] == c_L and c_L is not None:
                rule = "plateau"
            if rule is not None and stop_early:
                break
        if rule in ("trivial-bound", "layer-cycle") and not stop_early:
            trace.extend([c_L] * (L_max - L))
            break
    c = trace[-1]
    exact = rule in ("trivial-bound", "layer-cycle")
    if c is None:
        witness = None
        note = (f"class degree exceeds {target}" if exact
                else f"no block of depth <= {target} up to length {L_max}")
        return ClassDegreeReport(None, None, trace, L_max, exact, rule, s, exact, note)
    first_L = trace.index(c) + 3
    witness = _witness(v, pre, suf, first_L, c, pair_value)
    if rule is None:
        note = f"no stabilization up to length {L_max}; value is an upper bound"
    elif exact:
        note = "exact: " + ("value equals the lower bound 1" if rule == "trivial-bound"
                            else "all reachable prefix/suffix layer pairs combined")
    else:
        note = f"stabilized over a plateau of {s} lengths; upper bound, stabilized"
    return ClassDegreeReport(c, witness, trace, L_max, rule is not None, rule, s, exact, note)


def _witness(v, pre, suf, L, c, pair_value) -> TransitionBlock:
    """Smallest (n, M, w) among blocks of length L and depth c."""
    best = None
    for i in range(1, L - 1):
        P, Q = pre.get(i), suf.get(L - 1 - i)
        for p, pw in P.items():
            for q, qw in Q.items():
                if pw[-1] != qw[0]:
                    continue
                M = pair_value(p, q, c + 1)
                if M is not None and len(M) == c:
                    cand = (i, M, pw + qw[1:])
                    if best is None or cand < best:
                        best = cand
    n, M, w = best
    return TransitionBlock(w, n, M, is_transition_block(v, w, n, M))


def unique_routing_symbol(pi, tb: TransitionBlock, u: Word) -> int:
    """The single symbol of M through which u can be routed at time n."""
    v = _view(pi)
    hits = [a for a in tb.M if routable_through(v, tb.w, tb.n, u, a)]
    if len(hits) != 1:
        raise NotMinimal(f"{spell(v.x_names, u)} routes through {len(hits)} symbols of M; "
                         "the block is not minimal")
    return hits[0]
