"""Class-degree decomposition pi = pi2 o pi1.

Given a minimal transition block (w, n, M) of a 1-block code pi, the code
pi1 outputs pairs (pi(x)_i, mark_i): the mark is the unique symbol of M
through which the local preimage routes when pi(x) reads w around i (with
w_n at i), and the reserved empty mark otherwise. Ytilde is the image of
pi1 and pi2 forgets the mark.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blockcode import (SlidingBlockCode, apply_to_word, codes_agree, compose, image_presentation,
                        normalize_code, through_cover)
from .classdeg import (ClassDegreeReport, TransitionBlock, class_degree_upper, is_transition_block,
                       unique_routing_symbol)
from .config import DEFAULT, AnalysisConfig
from .errors import NotMinimal, ResourceLimit, StabilizationInconclusive
from .fto import DegreeReport, degree
from .shiftspace import Presentation, count_words, enumerate_words

EMPTY_MARK = "-"


def pair_name(y: str, mark: str | None) -> str:
    return f"{y}|{EMPTY_MARK if mark is None else mark}"


@dataclass
class DecompositionReport:
    composition_ok: bool
    words_checked: int
    class_degree: ClassDegreeReport
    pi2_degree: DegreeReport
    pi1_class_degree: ClassDegreeReport
    pi2_degree_equals_class_degree: bool
    pi1_class_degree_one: bool
    stabilization_confirmed: bool
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.composition_ok and self.pi2_degree_equals_class_degree
                and self.pi1_class_degree_one)

    def to_dict(self, views: dict) -> dict:
        return {
            "ok": self.ok,
            "composition_ok": self.composition_ok,
            "composition_words_checked_up_to_domain_length": self.words_checked,
            "class_degree": self.class_degree.to_dict(views["pi"]),
            "pi2_degree": self.pi2_degree.to_dict(views["pi2"]),
            "pi1_class_degree": self.pi1_class_degree.to_dict(views["pi1"]),
            "pi2_degree_equals_class_degree": self.pi2_degree_equals_class_degree,
            "pi1_class_degree_one": self.pi1_class_degree_one,
            "stabilization_confirmed": self.stabilization_confirmed,
            "notes": list(self.notes),
        }


@dataclass(eq=False)
class Decomposition:
    """pi = pi2 o pi1 with pi1: X -> Ytilde and pi2: Ytilde -> Y."""

    pi: SlidingBlockCode
    normal: SlidingBlockCode
    tb: TransitionBlock
    pairs: tuple
    pi1: SlidingBlockCode
    Ytilde: Presentation
    pi2: SlidingBlockCode
    verification: DecompositionReport | None = None

    def to_dict(self) -> dict:
        v = self.normal.view
        return {
            "transition_block": self.tb.to_dict(v),
            "pairs": [[v.y_names[y], None if m is None else v.x_names[m]] for y, m in self.pairs],
            "pi1": self.pi1.to_dict(),
            "ytilde": self.Ytilde.to_dict(),
            "pi2": self.pi2.to_dict(),
        }


def build_pi1(pi: SlidingBlockCode, tb: TransitionBlock) -> tuple[SlidingBlockCode, tuple]:
    """pi1 on the domain of the normalized code pi; returns (code, pairs).

    ``pairs[k]`` is (image symbol, mark symbol or None) for codomain symbol k.
    """
    v = pi.view
    w, n = tuple(tb.w), tb.n
    mem, ant = n, len(w) - n - 1
    raw = {}
    for u in enumerate_words(pi.domain, len(w)):
        y = tuple(v.label[s] for s in u)
        mark = unique_routing_symbol(v, tb, u) if y == w else None
        raw[u] = (y[n], mark)
    pairs = tuple(sorted(set(raw.values()), key=lambda p: (p[0], -1 if p[1] is None else p[1])))
    index = {p: i for i, p in enumerate(pairs)}
    names = [pair_name(v.y_names[y], None if m is None else v.x_names[m]) for y, m in pairs]
    code = SlidingBlockCode(pi.domain, names, mem, ant, {u: index[p] for u, p in raw.items()})
    return code, pairs


def build_decomposition(pi: SlidingBlockCode, config: AnalysisConfig = DEFAULT,
                        tb: TransitionBlock | None = None, strict: bool = False,
                        verify: bool = True) -> Decomposition:
    """Decompose pi through a minimal transition block and verify the result.

    Without ``tb`` the witness of the class-degree sweep is used (shortest
    word, then smallest n, then smallest M). ``strict`` raises
    :class:`StabilizationInconclusive` when the sweep did not stabilize.
    """
    nf = normalize_code(pi, config.max_words)
    normal = nf.pi
    cd = class_degree_upper(normal, config=config)
    if not cd.stabilized and strict:
        raise StabilizationInconclusive(cd.note)
    if tb is None:
        tb = cd.witness
    else:
        if not is_transition_block(normal, tb.w, tb.n, tb.M):
            raise NotMinimal("supplied block is not a transition block")
        if tb.depth != cd.value:
            raise NotMinimal(f"supplied block has depth {tb.depth}, class degree is {cd.value}")
        tb = TransitionBlock(tuple(tb.w), tb.n, tuple(sorted(tb.M)), True)
    pi1n, pairs = build_pi1(normal, tb)
    pi1 = pi1n if normal is pi else compose(pi1n, nf.to_normal, config.max_words)
    Ytilde = image_presentation(normalize_code(pi1n, config.max_words).pi, config.max_states)
    y_of = {pair_name(normal.view.y_names[y], None if m is None else normal.view.x_names[m]): y
            for y, m in pairs}
    pi2 = SlidingBlockCode.one_block(Ytilde, normal.codomain, [y_of[a] for a in Ytilde.alphabet])
    d = Decomposition(pi, normal, tb, pairs, pi1, Ytilde, pi2)
    if verify:
        d.verification = verify_decomposition(d, config, class_report=cd)
    return d


def _word_check(d: Decomposition, config: AnalysisConfig, budget: int = 5_000) -> int:
    """Largest domain word length on which both sides were compared; negative on mismatch."""
    X = d.pi.domain
    W = max(d.pi1.window, d.pi.window)
    proj = {k: d.pi2.codomain[d.pi2.table[(d.Ytilde.alphabet.index(a),)]]
            for k, a in enumerate(d.pi1.codomain)}
    W1, W0 = d.pi1.window, d.pi.window
    # both outputs indexed by the domain position they are centered on
    off = d.pi1.memory - d.pi.memory
    checked = 0
    for L in range(W, W + config.word_cap):
        if count_words(X, L) > min(config.max_words, budget):
            break
        for u in enumerate_words(X, L, config.max_words):
            lhs = [proj[d.pi1.table[u[i:i + W1]]] for i in range(L - W1 + 1)]
            rhs = [d.pi.codomain[d.pi.table[u[i:i + W0]]] for i in range(L - W0 + 1)]
            if off >= 0:
                rhs = rhs[off:off + len(lhs)]
            else:
                lhs = lhs[-off:-off + len(rhs)]
            if lhs != rhs:
                return -L
        checked = L
    return checked


def verify_decomposition(d: Decomposition, config: AnalysisConfig = DEFAULT,
                         class_report: ClassDegreeReport | None = None) -> DecompositionReport:
    """Check composition, deg(pi2) = class degree of pi and class degree of pi1 = 1.

    Failures are recorded in the report, never raised.
    """
    notes = []
    try:
        comp = compose(d.pi2, d.pi1, config.max_words)
        agree = codes_agree(comp, d.pi, config.max_words)
    except Exception as exc:  # recorded, not raised
        agree = False
        notes.append(f"composition failed: {exc}")
    words = _word_check(d, config) if agree else 0
    if words < 0:
        agree = False
        notes.append(f"word-level mismatch on domain words of length {-words}")
        words = 0
    cd = class_report or class_degree_upper(d.normal, config=config)
    cover_code = normalize_code(through_cover(d.pi2, config.max_states), config.max_words).pi
    deg2 = degree(cover_code, config, strict=False)
    deg_ok = bool(deg2.finite_to_one and deg2.degree == cd.value)
    if not deg2.finite_to_one:
        notes.append("pi2 is not finite-to-one")
    try:
        cd1 = class_degree_upper(normalize_code(d.pi1, config.max_words).pi, config=config, target=1)
    except ResourceLimit as exc:
        notes.append(f"class degree of pi1 not computed: {exc}")
        cd1 = ClassDegreeReport(None, None, note=str(exc))
    one = cd1.value == 1
    confirmed = cd.stabilized and cd1.stabilized and deg2.stabilized
    if not cd.exact:
        notes.append("class degree of pi is " + cd.note)
    if not confirmed:
        notes.append("stabilization inconclusive: degree equality unconfirmed")
    return DecompositionReport(agree, words, cd, deg2, cd1, deg_ok, one, confirmed, notes)


def report_views(d: Decomposition) -> dict:
    return {
        "pi": d.normal.view,
        "pi1": normalize_code(d.pi1).pi.view,
        "pi2": normalize_code(through_cover(d.pi2)).pi.view,
    }


def marks_of(d: Decomposition, u) -> list:
    """Second coordinates of pi1 along a domain word, None for the empty mark."""
    v = d.normal.view
    by_name = {pair_name(v.y_names[y], None if m is None else v.x_names[m]): m for y, m in d.pairs}
    return [by_name[d.pi1.codomain[s]] for s in apply_to_word(d.pi1, u)]
