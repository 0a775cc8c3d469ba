"""Built-in fixture codes and a seeded random corpus generator."""

from __future__ import annotations

import random

from .blockcode import SlidingBlockCode, minimal_right_resolving, normalize_code
from .shiftspace import (Presentation, even_shift, full_shift, golden_mean, is_irreducible,
                         vertex_shift)


def merge() -> SlidingBlockCode:
    """Full 3-shift on a, b, c onto the full 2-shift: a -> 0, b -> 1, c -> 1."""
    return SlidingBlockCode.one_block(full_shift(["a", "b", "c"]), ["0", "1"], [0, 1, 1])


def xor() -> SlidingBlockCode:
    """x -> (x_i + x_{i+1} mod 2) on the full 2-shift; degree 2."""
    return SlidingBlockCode(full_shift(2), ["0", "1"], 0, 1,
                            {(a, b): a ^ b for a in range(2) for b in range(2)})


def identity_golden() -> SlidingBlockCode:
    return SlidingBlockCode.identity(golden_mean())


def identity_full2() -> SlidingBlockCode:
    return SlidingBlockCode.identity(full_shift(2))


def even_cover() -> SlidingBlockCode:
    """Degree-one cover of the even shift by the edge shift of its Fischer cover."""
    return minimal_right_resolving(even_shift())[1]


def constant_golden() -> SlidingBlockCode:
    return SlidingBlockCode.one_block(golden_mean(), ["0"], [0, 0])


def golden_to_full() -> SlidingBlockCode:
    """Three-symbol SFT (b and c never adjacent) merged onto the full 2-shift."""
    X = vertex_shift(["a", "b", "c"], [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (2, 2)])
    return SlidingBlockCode.one_block(X, ["0", "1"], [0, 1, 1])


FIXTURES = {
    "merge": merge,
    "xor": xor,
    "identity": identity_full2,
    "identity-golden": identity_golden,
    "even-cover": even_cover,
    "constant": constant_golden,
    "golden-merge": golden_to_full,
}


def fixture(name: str) -> SlidingBlockCode:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def random_irreducible_sft(rng: random.Random, n: int, density: float = 0.5) -> Presentation:
    """Vertex-SFT on n symbols: a random Hamiltonian cycle plus random extra edges."""
    order = list(range(n))
    rng.shuffle(order)
    allowed = {(order[i], order[(i + 1) % n]) for i in range(n)}
    for s in range(n):
        for t in range(n):
            if rng.random() < density:
                allowed.add((s, t))
    X = vertex_shift([chr(ord("a") + i) for i in range(n)], sorted(allowed))
    assert is_irreducible(X)
    return X


def random_code(rng: random.Random, max_symbols: int = 5, max_states: int = 5,
                density: float | None = None) -> SlidingBlockCode:
    """Random surjective 1-block code from an irreducible vertex-SFT.

    The domain has between 2 and ``max_states`` symbols; the image alphabet
    has between 1 and ``min(max_symbols, domain size)`` symbols, each used.
    """
    n = rng.randint(2, max_states)
    if density is None:
        density = rng.choice([0.25, 0.4, 0.6])
    X = random_irreducible_sft(rng, n, density)
    n = len(X.alphabet)
    k = rng.randint(1, min(max_symbols, n))
    labels = list(range(k)) + [rng.randrange(k) for _ in range(n - k)]
    rng.shuffle(labels)
    return SlidingBlockCode.one_block(X, [str(i) for i in range(k)], labels)


def random_right_resolving_code(rng: random.Random, max_symbols: int = 3, max_states: int = 4,
                                max_out: int = 2) -> SlidingBlockCode:
    """Finite-to-one code: a random right-resolving labeling of an edge shift."""
    while True:
        n = rng.randint(1, max_states)
        k = rng.randint(1, max_symbols)
        edges = []
        for s in range(n):
            labs = rng.sample(range(k), rng.randint(1, min(max_out, k)))
            for a in labs:
                edges.append((s, rng.randrange(n), a))
        for s in range(n):  # guarantee irreducibility through a cycle
            edges.append((s, (s + 1) % n, rng.randrange(k)))
        g = Presentation([str(i) for i in range(k)], [f"s{i}" for i in range(n)], edges)
        # restore right-resolvability: keep the first edge per (state, label)
        seen, kept = set(), []
        for s, t, a in edges:
            if (s, a) not in seen:
                seen.add((s, a))
                kept.append((s, t, a))
        names = [f"e{i}" for i in range(len(kept))]
        E = Presentation(names, g.states, [(s, t, i) for i, (s, t, _) in enumerate(kept)], "edge-SFT")
        try:
            if not is_irreducible(E):
                continue
        except ValueError:
            continue
        used = sorted({a for _, _, a in kept})
        remap = {a: i for i, a in enumerate(used)}
        code = SlidingBlockCode.one_block(E, [str(a) for a in used], [remap[a] for _, _, a in kept])
        return normalize_code(code).pi


def random_corpus(seed: int, count: int, max_symbols: int = 5, max_states: int = 5,
                  finite_to_one_share: float = 0.25) -> list:
    """Deterministic list of (name, code) pairs."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if rng.random() < finite_to_one_share:
            code = random_right_resolving_code(rng, min(3, max_symbols), min(4, max_states))
            out.append((f"rr-{seed}-{i}", code))
        else:
            out.append((f"rand-{seed}-{i}", random_code(rng, max_symbols, max_states)))
    return out
