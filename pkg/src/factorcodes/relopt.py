"""Relative equilibrium states approximated by word-level concave programs.

At order k the unknown is a shift-consistent distribution q on the X-words
of length k whose image under pi matches the target nu on Y-words of length
k. The objective is the conditional entropy H_k(q) - H_{k-1}(q) plus the
integral of phi, which is concave in q. Since the constraint only sees words
up to length k, the optimal value is an upper bound at order k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .blockcode import SlidingBlockCode, compose, minimal_right_resolving, normalize_code
from .config import DEFAULT, AnalysisConfig
from .errors import Infeasible, SolverStalled, WindowMismatch
from .shiftspace import Presentation, enumerate_words, spell, to_vertex_form
from .thermo import (MarkovMeasure, Potential, WordTable, equilibrium_state, equilibrium_words,
                     pullback, pushforward_words)


@dataclass
class WordDistribution:
    k: int
    alphabet: tuple
    probs: dict

    def tv(self, other: WordDistribution) -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.probs.get(w, 0.0) - other.probs.get(w, 0.0)) for w in keys)

    def check(self, tol: float = 1e-10) -> list:
        """Violated invariants: sign, normalization, shift consistency."""
        problems = []
        if min(self.probs.values(), default=0.0) < -tol:
            problems.append("negative probability")
        if abs(sum(self.probs.values()) - 1.0) > tol:
            problems.append("does not sum to 1")
        if self.k >= 2:
            left: dict = {}
            right: dict = {}
            for w, p in self.probs.items():
                left[w[1:]] = left.get(w[1:], 0.0) + p
                right[w[:-1]] = right.get(w[:-1], 0.0) + p
            for u in set(left) | set(right):
                if abs(left.get(u, 0.0) - right.get(u, 0.0)) > tol:
                    problems.append(f"marginals disagree on {spell(self.alphabet, u)!r}")
                    break
        return problems

    def to_dict(self) -> dict:
        return {"k": self.k, "probs": {spell(self.alphabet, w): p for w, p in sorted(self.probs.items())}}


@dataclass(eq=False)
class RelaxationProblem:
    """Maximize H_k - H_{k-1} + <q, phi> subject to A q = b, q >= 0."""

    pi: SlidingBlockCode
    k: int
    words: list
    phi_values: np.ndarray
    A: np.ndarray
    b: np.ndarray
    nu_words: dict
    fixed_zero: np.ndarray
    row_kinds: list = field(default_factory=list)

    @property
    def X(self) -> Presentation:
        return self.pi.domain

    def objective(self, q: np.ndarray) -> float:
        return objective(self, q)

    def gradient(self, q: np.ndarray) -> np.ndarray:
        return gradient(self, q)


def _prefix_index(words) -> tuple[np.ndarray, int]:
    idx: dict = {}
    out = np.array([idx.setdefault(w[:-1], len(idx)) for w in words])
    return out, len(idx)


def objective(p: RelaxationProblem, q: np.ndarray) -> float:
    q = np.asarray(q, dtype=float)
    pos = q > 0
    h = -float(np.sum(q[pos] * np.log(q[pos])))
    if p.k >= 2:
        pref, n = _prefix_cache(p)
        m = np.bincount(pref, weights=q, minlength=n)
        mp = m > 0
        h += float(np.sum(m[mp] * np.log(m[mp])))
    return h + float(q @ p.phi_values)


def gradient(p: RelaxationProblem, q: np.ndarray, floor: float = 1e-300) -> np.ndarray:
    """d/dq(w) = -log(q(w) / m(prefix of w)) + phi(w); 0 log 0 conventions clamp at floor."""
    q = np.maximum(np.asarray(q, dtype=float), floor)
    g = -np.log(q)
    if p.k >= 2:
        pref, n = _prefix_cache(p)
        m = np.bincount(pref, weights=q, minlength=n)
        g += np.log(np.maximum(m[pref], floor))
    else:
        g -= 1.0
    return g + p.phi_values


def hessian(p: RelaxationProblem, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    H = np.diag(-1.0 / q)
    if p.k >= 2:
        pref, n = _prefix_cache(p)
        m = np.bincount(pref, weights=q, minlength=n)
        same = pref[:, None] == pref[None, :]
        H += same / m[pref][:, None]
    return H


def _prefix_cache(p: RelaxationProblem):
    if not hasattr(p, "_pref"):
        p._pref = _prefix_index(p.words)
    return p._pref


def _target_table(nu, pi: SlidingBlockCode, k: int, config: AnalysisConfig) -> dict:
    """Target probabilities of image words of length k, keyed by symbol-name tuples."""
    if isinstance(nu, Potential):
        table = equilibrium_words(nu, k, config)
    elif isinstance(nu, MarkovMeasure):
        if nu.order + 1 > k and nu.order > 0:
            raise WindowMismatch(f"order k={k} is below the measure's order + 1 = {nu.order + 1}")
        table = pushforward_words(nu, SlidingBlockCode.identity(nu.shift), k, config.max_words)
    elif isinstance(nu, WordTable):
        table = nu
    else:
        raise TypeError("nu must be a Potential, MarkovMeasure or WordTable")
    return {tuple(table.alphabet[s] for s in w): p for w, p in table.probs.items() if len(w) == k}


def build_relaxation(pi: SlidingBlockCode, nu, phi: Potential | None, k: int,
                     config: AnalysisConfig = DEFAULT) -> RelaxationProblem:
    """Linear constraints and objective data for the order-k relaxation.

    ``nu`` is the target on the image: a Potential (its equilibrium state),
    a MarkovMeasure on a shift over the image alphabet, or a WordTable.
    ``phi`` lives on the domain of pi, or on the domain of its normal form.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    nf = normalize_code(pi, config.max_words)
    code = nf.pi
    X = code.domain
    if phi is not None and phi.window > k:
        raise WindowMismatch(f"potential window {phi.window} exceeds the order {k}")
    if phi is not None and tuple(to_vertex_form(phi.shift).alphabet) != tuple(X.alphabet):
        phi = pullback(phi, nf.from_normal)
        if phi.window > k:
            raise WindowMismatch(f"recoded potential window {phi.window} exceeds the order {k}")
    target = _target_table(nu, code, k, config)
    words = enumerate_words(X, k, config.max_words)
    lab = [code.table[(s,)] for s in range(len(X.alphabet))]
    names = code.codomain
    image = [tuple(names[lab[s]] for s in w) for w in words]
    extra = set(target) - set(image)
    if any(target[v] > config.support_floor for v in extra):
        raise Infeasible("target charges image words that have no preimage")
    rows, rhs, kinds = [np.ones(len(words))], [1.0], ["total"]
    if k >= 2:
        index = {w: i for i, w in enumerate(words)}
        for u in enumerate_words(X, k - 1, config.max_words):
            row = np.zeros(len(words))
            for a in range(len(X.alphabet)):
                if (a,) + u in index:
                    row[index[(a,) + u]] += 1.0
                if u + (a,) in index:
                    row[index[u + (a,)]] -= 1.0
            if np.any(row):
                rows.append(row)
                rhs.append(0.0)
                kinds.append("shift:" + X.spell(u))
    for v in sorted(set(image)):
        row = np.array([1.0 if im == v else 0.0 for im in image])
        rows.append(row)
        rhs.append(target.get(v, 0.0))
        kinds.append("image:" + spell(names, [names.index(c) for c in v]))
    phi_vals = np.zeros(len(words))
    if phi is not None:
        j = phi.window
        phi_vals = np.array([phi.table[w[:j]] for w in words])
    zero = np.array([target.get(v, 0.0) <= 0.0 for v in image])
    return RelaxationProblem(code, k, words, phi_vals, np.array(rows), np.array(rhs),
                             target, zero, kinds)


@dataclass
class SolveReport:
    optimum: WordDistribution
    value: float
    constraint_residual: float
    seeds_used: int
    max_pairwise_distance: float
    support_min: float
    iterations: list = field(default_factory=list)
    converged: bool = True
    projected_gradient: float = 0.0
    values: list = field(default_factory=list)
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "optimum": self.optimum.to_dict(),
            "value": self.value,
            "value_label": self.label,
            "constraint_residual": self.constraint_residual,
            "seeds_used": self.seeds_used,
            "max_pairwise_tv": self.max_pairwise_distance,
            "support_min": self.support_min,
            "iterations": list(self.iterations),
            "converged": self.converged,
            "projected_gradient_norm": self.projected_gradient,
            "values_by_seed": list(self.values),
        }


def _presolve(p: RelaxationProblem, floor: float):
    """Support of the feasible polytope and one LP maximizer per supported coordinate."""
    n = len(p.words)
    free = np.flatnonzero(~p.fixed_zero)
    A = p.A[:, free]
    res = linprog(np.zeros(len(free)), A_eq=A, b_eq=p.b, bounds=(0, None), method="highs")
    if res.status == 2:
        raise Infeasible("no word distribution has the target image")
    if res.status != 0:
        raise SolverStalled(f"feasibility LP failed: {res.message}")
    support, vertices = [], []
    for j, i in enumerate(free):
        c = np.zeros(len(free))
        c[j] = -1.0
        r = linprog(c, A_eq=A, b_eq=p.b, bounds=(0, None), method="highs")
        if r.status == 0 and -r.fun > floor:
            support.append(i)
            x = np.zeros(n)
            x[free] = r.x
            vertices.append(x)
    return np.array(support, dtype=int), vertices


def _ascend(p: RelaxationProblem, S: np.ndarray, N: np.ndarray, q: np.ndarray,
            config: AnalysisConfig) -> tuple[np.ndarray, int, float]:
    """Projected gradient ascent with Barzilai-Borwein steps, then damped Newton."""
    f = objective(p, q)
    prev_d = prev_q = None
    small = 0
    it = 0
    for it in range(1, config.solver_max_iter + 1):
        g = gradient(p, q)[S]
        d = N @ (N.T @ g)
        gn = float(np.linalg.norm(d))
        if gn <= config.solver_gtol:
            break
        if prev_d is None:
            t = 1e-2 / max(gn, 1e-300)
        else:
            s = q[S] - prev_q
            y = prev_d - d
            sy = float(s @ y)
            t = float(s @ s) / sy if sy > 0 else 1e-2 / gn
        neg = d < 0
        if np.any(neg):
            t = min(t, 0.95 * float(np.min(-q[S][neg] / d[neg])))
        while True:
            qn = q.copy()
            qn[S] = q[S] + t * d
            fn = objective(p, qn)
            if fn >= f + 1e-4 * t * gn * gn or t < 1e-18:
                break
            t *= 0.5
        prev_d, prev_q = d, q[S].copy()
        small = small + 1 if abs(fn - f) < config.solver_ftol else 0
        q, f = qn, fn
        if small >= 3:
            break
    # Newton polish in the constraint null space
    for _ in range(50):
        g = gradient(p, q)[S]
        rg = N.T @ g
        if float(np.linalg.norm(rg)) <= config.solver_gtol:
            break
        H = hessian(p, q[S])
        Hr = N.T @ H @ N
        z = np.linalg.lstsq(Hr - 1e-14 * np.eye(len(rg)), -rg, rcond=None)[0]
        d = N @ z
        if float(d @ g) <= 0:
            d = N @ rg
        t = 1.0
        neg = d < 0
        if np.any(neg):
            t = min(1.0, 0.95 * float(np.min(-q[S][neg] / d[neg])))
        while t > 1e-18:
            qn = q.copy()
            qn[S] = q[S] + t * d
            fn = objective(p, qn)
            if fn >= f - 1e-15:
                break
            t *= 0.5
        q, f = qn, fn
        it += 1
    g = gradient(p, q)[S]
    return q, it, float(np.linalg.norm(N.T @ g))


def solve_relaxation(p: RelaxationProblem, seeds: int | None = None,
                     config: AnalysisConfig = DEFAULT) -> SolveReport:
    """Maximize the concave objective from several random interior starts."""
    seeds = config.seeds if seeds is None else seeds
    S, vertices = _presolve(p, config.support_floor)
    n = len(p.words)
    if len(S) == 0:
        raise Infeasible("empty support")
    V = np.array([v[S] for v in vertices])
    N = null_space(p.A[:, S])
    results = []
    for seed in range(seeds):
        rng = np.random.default_rng([config.seed, seed])
        w = rng.dirichlet(np.ones(len(V)))
        q = np.zeros(n)
        q[S] = w @ V
        if N.shape[1] == 0:
            results.append((q, 0, 0.0))
            continue
        results.append(_ascend(p, S, N, q, config))
    qs = [r[0] for r in results]
    vals = [objective(p, q) for q in qs]
    dist = max((0.5 * float(np.abs(a - b).sum()) for i, a in enumerate(qs) for b in qs[i + 1:]),
               default=0.0)
    best = int(np.argmax(vals))
    q = qs[best]
    resid = float(np.max(np.abs(p.A @ q - p.b)))
    pg = max(r[2] for r in results)
    converged = pg <= max(config.solver_gtol, 1e-8)
    if not converged and pg > 1e-6:
        raise SolverStalled(f"projected gradient norm {pg:.3e} after {config.solver_max_iter} iterations")
    X = p.X
    dist_q = WordDistribution(p.k, X.alphabet, {w: float(x) for w, x in zip(p.words, q)})
    return SolveReport(dist_q, vals[best], resid, seeds, dist, float(q.min()),
                       [r[1] for r in results], converged, pg, vals,
                       f"upper bound at order {p.k}")


@dataclass
class SupportVerdict:
    full_support: bool
    floor: float
    min_probability: float
    violations: list

    def to_dict(self) -> dict:
        return {"full_support": self.full_support, "floor": self.floor,
                "min_probability": self.min_probability, "violations": self.violations}


def support_report(r: SolveReport, floor: float = DEFAULT.support_floor) -> SupportVerdict:
    opt = r.optimum
    bad = sorted(spell(opt.alphabet, w) for w, p in opt.probs.items() if p <= floor)
    return SupportVerdict(not bad, floor, min(opt.probs.values()), bad)


# -- decomposition cross-check ------------------------------------------------


@dataclass
class CrosscheckReport:
    direct: SolveReport
    via_pi1: SolveReport
    order_direct: int
    order_pi1: int
    value_gap: float
    table_tv: float
    tolerance: float = 1e-6

    @property
    def ok(self) -> bool:
        return self.value_gap <= self.tolerance and self.table_tv <= self.tolerance

    def to_dict(self) -> dict:
        return {"ok": self.ok, "order_direct": self.order_direct, "order_pi1": self.order_pi1,
                "value_direct": self.direct.value, "value_pi1": self.via_pi1.value,
                "value_gap": self.value_gap, "table_tv": self.table_tv,
                "tolerance": self.tolerance}


def lifted_target(d, psi: Potential, k: int, config: AnalysisConfig = DEFAULT) -> WordTable:
    """Words of nu-tilde on Ytilde: the equilibrium state rho of psi o pi2 o pi_R on the
    Fischer cover R of Ytilde, pushed down to Ytilde."""
    cover, piR = minimal_right_resolving(d.Ytilde, config.max_states)
    Ev = to_vertex_form(piR.domain)
    piR = SlidingBlockCode(Ev, piR.codomain, 0, 0, piR.table)
    down = compose(d.pi2, piR, config.max_words)
    rho = equilibrium_state(pullback(psi, down), config)
    return pushforward_words(rho, piR, k, config.max_words)


def decomposition_crosscheck(d, psi: Potential, phi: Potential | None, k: int,
                             config: AnalysisConfig = DEFAULT) -> CrosscheckReport:
    """Compare the relaxation over pi (order k + N - 1) with the one over pi1 (order k).

    N is the window of pi1 on the normal-form domain; its k-words over the
    N-block presentation are the (k + N - 1)-words of that domain, so both
    tables are compared on the same X-words.
    """
    k = max(k, 2)
    pi1n = _pi1_on_normal(d, config)
    N = pi1n.window
    K = k + N - 1
    direct = solve_relaxation(build_relaxation(d.normal, psi, phi, K, config), config=config)
    nf1 = normalize_code(pi1n, config.max_words)
    phi1 = None if phi is None else pullback(_on_normal(phi, d, config), nf1.from_normal)
    target = lifted_target(d, psi, k, config)
    via = solve_relaxation(build_relaxation(nf1.pi, target, phi1, k, config), config=config)
    block = {i: w for w, i in _block_words(nf1).items()}
    mapped = {}
    for w, p in via.optimum.probs.items():
        u = block[w[0]] + tuple(block[s][-1] for s in w[1:])
        mapped[u] = p
    via_on_x = WordDistribution(K, d.normal.domain.alphabet, mapped)
    return CrosscheckReport(direct, via, K, k, abs(direct.value - via.value), direct.optimum.tv(via_on_x))


def _pi1_on_normal(d, config: AnalysisConfig) -> SlidingBlockCode:
    from .decomp import build_pi1
    return build_pi1(d.normal, d.tb)[0]


def _on_normal(phi: Potential, d, config: AnalysisConfig) -> Potential:
    if tuple(to_vertex_form(phi.shift).alphabet) == tuple(d.normal.domain.alphabet):
        return phi
    return pullback(phi, normalize_code(d.pi, config.max_words).from_normal)


def _block_words(nf) -> dict:
    """Domain word of length N -> symbol of the N-block presentation."""
    return {w: i for w, i in nf.to_normal.table.items()}
