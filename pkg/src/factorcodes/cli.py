"""Command-line frontend.

Every command writes one JSON report (to ``--out`` or standard output) that
embeds the full analysis configuration and the tool version. Exit codes:
0 success, 1 verification failure, 2 precondition violation, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .blockcode import FactorTriple, SlidingBlockCode, codes_agree, normalize_code
from .classdeg import TransitionBlock, class_degree_upper
from .config import DEFAULT, AnalysisConfig
from .decomp import build_decomposition, report_views
from .errors import FactorCodeError, ParseError, WindowMismatch
from .fixtures import FIXTURES, fixture, random_corpus
from .fto import degree
from .relopt import build_relaxation, decomposition_crosscheck, solve_relaxation, support_report
from .shiftspace import Presentation, even_shift, full_shift, golden_mean, is_irreducible, period
from .thermo import (MarkovMeasure, Potential, gibbs_ratio_bounds, pressure, pushforward_words,
                     relative_entropy_bounds, sofic_equilibrium, tuncel_lift)

CORPUS_BOUND = 6


class UsageError(FactorCodeError):
    exit_code = 2


# -- input loading ------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def load_code(source: str) -> SlidingBlockCode:
    """A code file, or ``fixture:NAME`` for a built-in fixture."""
    if source.startswith("fixture:"):
        try:
            return fixture(source.split(":", 1)[1])
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    d = _read_json(source)
    dom = d.get("domain")
    if isinstance(dom, str):
        d = dict(d, domain=_read_json(str(Path(source).parent / dom)))
    return SlidingBlockCode.from_dict(d)


def load_shift(source: str) -> Presentation:
    """A presentation file, ``full:N``, ``golden``, ``even`` or ``fixture:NAME`` (its domain)."""
    if source.startswith("fixture:"):
        return load_code(source).domain
    if source.startswith("full:"):
        try:
            return full_shift(int(source[5:]))
        except ValueError:
            raise UsageError(f"bad full shift size in {source!r}") from None
    if source == "golden":
        return golden_mean()
    if source == "even":
        return even_shift()
    return Presentation.from_dict(_read_json(source))


def load_potential(path: str | None, shift: Presentation) -> Potential:
    if path is None:
        return Potential.constant(shift)
    return Potential.from_dict(_read_json(path), shift)


def load_target(path: str | None, Y: Presentation):
    """Target measure on the image: a potential file (its equilibrium state) or a Markov measure.

    A Markov measure file may embed its own ``shift``; otherwise it lives on Y, or on the
    full shift over Y's alphabet when Y is presented by a sofic cover.
    """
    if path is None:
        return Potential.constant(Y)
    d = _read_json(path)
    if "transitions" in d:
        if "shift" in d:
            shift = Presentation.from_dict(d["shift"])
            if not shift.is_sft:
                raise ParseError("the shift of a Markov target must be an SFT")
        else:
            # on a sofic image, read the chain on the full shift over its alphabet;
            # mass outside Y is caught when the relaxation is built
            shift = Y if Y.is_sft else full_shift(list(Y.alphabet))
        return MarkovMeasure.from_dict(d, shift)
    return Potential.from_dict(d, Y)


def load_config(args) -> AnalysisConfig:
    cfg = DEFAULT
    if args.config:
        try:
            cfg = AnalysisConfig.from_dict(_read_json(args.config))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad config: {exc}") from None
    over = {k: getattr(args, k) for k in ("max_length", "seed", "word_cap")
            if getattr(args, k, None) is not None}
    out = getattr(args, "out", None)
    if out is not None:
        over["output_dir"] = str(out)
    try:
        return cfg.with_(**over)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- output ---------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(report: dict, cfg: AnalysisConfig, out: str | None, summary: str) -> None:
    report = dict(report, config=cfg.to_dict(), version=__version__)
    text = dumps(report)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        print(summary)


def _require_irreducible(X: Presentation) -> None:
    from .errors import NotIrreducible
    if not is_irreducible(X):
        raise NotIrreducible("the domain is not irreducible")


# -- commands -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    cfg = load_config(args)
    pi = load_code(args.code)
    X = pi.domain
    irreducible = is_irreducible(X)
    report = {"domain": {"irreducible": irreducible, "sft": X.is_sft,
                         "period": period(X) if irreducible else None}}
    if not irreducible:
        _emit(report, cfg, args.out, "domain is not irreducible")
        return 2
    normal = normalize_code(pi, cfg.max_words).pi
    deg = degree(normal, cfg, strict=False)
    report["finite_to_one"] = deg.finite_to_one
    report["degree"] = deg.to_dict(normal.view)
    cd = class_degree_upper(normal, config=cfg)
    report["class_degree"] = cd.to_dict(normal.view)
    stable = cd.stabilized and (deg.stabilized or not deg.finite_to_one)
    kind = f"finite-to-one, degree {deg.degree}" if deg.finite_to_one else "infinite-to-one"
    _emit(report, cfg, args.out, f"{kind}; class degree {cd.value}")
    return 0 if stable else 1


def cmd_degree(args) -> int:
    cfg = load_config(args)
    pi = load_code(args.code)
    _require_irreducible(pi.domain)
    normal = normalize_code(pi, cfg.max_words).pi
    rep = degree(normal, cfg, strict=False)
    _emit({"degree": rep.to_dict(normal.view)}, cfg, args.out,
          f"degree {rep.degree}" if rep.finite_to_one else "not finite-to-one")
    return 0 if rep.stabilized or not rep.finite_to_one else 1


def cmd_class_degree(args) -> int:
    cfg = load_config(args)
    pi = load_code(args.code)
    _require_irreducible(pi.domain)
    normal = normalize_code(pi, cfg.max_words).pi
    rep = class_degree_upper(normal, max_length=args.max_length, config=cfg)
    _emit({"class_degree": rep.to_dict(normal.view)}, cfg, args.out, f"class degree {rep.value}")
    return 0 if rep.stabilized else 1


def cmd_decompose(args) -> int:
    cfg = load_config(args)
    pi = load_code(args.code)
    _require_irreducible(pi.domain)
    if not pi.domain.is_sft:
        raise UsageError("the domain must be an SFT")
    tb = None
    if args.block:
        tb = TransitionBlock.from_dict(_read_json(args.block), normalize_code(pi).pi.view)
    d = build_decomposition(pi, cfg, tb=tb, strict=args.strict)
    v = d.verification
    body = d.to_dict()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ytilde.json").write_text(dumps(body["ytilde"]), encoding="utf-8")
    (out / "pi1.json").write_text(dumps(body["pi1"]), encoding="utf-8")
    (out / "pi2.json").write_text(dumps(body["pi2"]), encoding="utf-8")
    report = {"transition_block": body["transition_block"], "pairs": body["pairs"],
              "verification": v.to_dict(report_views(d)), "input": pi.to_dict(),
              "config": cfg.to_dict(), "version": __version__}
    (out / "report.json").write_text(dumps(report), encoding="utf-8")
    ok = v.ok and v.stabilization_confirmed
    print(f"class degree {v.class_degree.value}; deg(pi2) {v.pi2_degree.degree}; "
          f"{'all checks pass' if ok else 'verification failed or inconclusive'}")
    return 0 if ok else 1


def cmd_pressure(args) -> int:
    cfg = load_config(args)
    shift = load_shift(args.shift)
    phi = load_potential(args.phi, shift)
    pv = pressure(phi, cfg)
    lo, hi = gibbs_ratio_bounds(pv)
    _emit({"pressure": pv.value, "perron_root": pv.root,
           "gibbs_ratio_bounds": [lo, hi]}, cfg, args.out, f"pressure {pv.value:.15g}")
    return 0


def cmd_equilibrium(args) -> int:
    cfg = load_config(args)
    shift = load_shift(args.shift)
    phi = load_potential(args.phi, shift)
    mu, code = sofic_equilibrium(phi, cfg)
    report = {"measure": mu.to_dict(), "measure_shift": mu.shift.to_dict(),
              "entropy": mu.entropy()}
    if args.length:
        report["words"] = pushforward_words(mu, code, args.length, cfg.max_words).to_dict()
    _emit(report, cfg, args.out, f"equilibrium state with entropy {mu.entropy():.15g}")
    return 0


def cmd_lift(args) -> int:
    cfg = load_config(args)
    pi = load_code(args.code)
    _require_irreducible(pi.domain)
    Y = FactorTriple.of(pi, cfg.max_states).Y
    psi = load_potential(args.psi, Y)
    L = args.length or cfg.lift_length
    rep = tuncel_lift(pi, psi, cfg, L)
    normal = normalize_code(pi, cfg.max_words).pi
    br = relative_entropy_bounds(rep.lift, normal, L, cfg.max_words)
    report = {"lift": rep.to_dict(), "lift_shift": rep.lift.shift.to_dict(),
              "relative_entropy_bracket": br.to_dict()}
    ok = rep.ok and br.contains(0.0)
    _emit(report, cfg, args.out, f"lift {'verified' if ok else 'FAILED'}; pressure gap {rep.pressure_gap:.3g}")
    return 0 if ok else 1


def cmd_mmre(args) -> int:
    cfg = load_config(args)
    if args.seeds is not None:
        cfg = cfg.with_(seeds=args.seeds)
    pi = load_code(args.code)
    _require_irreducible(pi.domain)
    Y = FactorTriple.of(pi, cfg.max_states).Y
    nu = load_target(args.nu, Y)
    phi = load_potential(args.phi, pi.domain) if args.phi else None
    if phi is not None and phi.window > args.order:
        raise WindowMismatch(f"potential window {phi.window} exceeds the order {args.order}")
    problem = build_relaxation(pi, nu, phi, args.order, cfg)
    sol = solve_relaxation(problem, cfg.seeds, cfg)
    verdict = support_report(sol, cfg.support_floor)
    report = {"order": args.order, "solve": sol.to_dict(), "support": verdict.to_dict()}
    ok = sol.constraint_residual < 1e-8 and sol.max_pairwise_distance < 1e-6
    if args.crosscheck:
        if not isinstance(nu, Potential):
            raise UsageError("--crosscheck needs the target given as a potential (or the default)")
        d = _load_decomposition(args.crosscheck, pi, cfg)
        cc = decomposition_crosscheck(d, nu, phi, max(args.order, 2), cfg)
        report["crosscheck"] = cc.to_dict()
        ok = ok and cc.ok
    _emit(report, cfg, args.out, f"value {sol.value:.12g} ({sol.label})")
    return 0 if ok else 1


def _load_decomposition(directory: str, pi: SlidingBlockCode, cfg: AnalysisConfig):
    """Rebuild the decomposition recorded in a ``decompose`` output directory."""
    base = Path(directory)
    rep = _read_json(str(base / "report.json"))
    normal = normalize_code(pi, cfg.max_words).pi
    try:
        tb = TransitionBlock.from_dict(rep["transition_block"], normal.view)
    except KeyError:
        raise ParseError(f"{base / 'report.json'} has no transition block") from None
    d = build_decomposition(pi, cfg, tb=tb, verify=False)
    saved = SlidingBlockCode.from_dict(_read_json(str(base / "pi1.json")))
    if not codes_agree(SlidingBlockCode(pi.domain, saved.codomain, saved.memory, saved.anticipation,
                                        saved.table), d.pi1, cfg.max_words):
        raise ParseError(f"{base / 'pi1.json'} does not match the recorded transition block")
    return d


def cmd_random_corpus(args) -> int:
    cfg = load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = random_corpus(args.seed_value, args.count, args.max_symbols, args.max_states)
    index = []
    for name, code in corpus:
        ok = is_irreducible(code.domain)
        normalize_code(code, cfg.max_words)
        (out / f"{name}.json").write_text(dumps(code.to_dict()), encoding="utf-8")
        index.append({"name": name, "file": f"{name}.json", "irreducible": ok,
                      "domain_symbols": len(code.domain.alphabet),
                      "image_symbols": len(code.codomain)})
    (out / "index.json").write_text(dumps({"seed": args.seed_value, "count": args.count,
                                           "max_symbols": args.max_symbols,
                                           "max_states": args.max_states, "codes": index,
                                           "version": __version__}), encoding="utf-8")
    print(f"{len(index)} codes written to {out}")
    return 0


# -- parser ---------------------------------------------------------------------


def _bounded(value: str) -> int:
    n = int(value)
    if not 1 <= n <= CORPUS_BOUND:
        raise argparse.ArgumentTypeError(f"must be between 1 and {CORPUS_BOUND}")
    return n


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="factorcodes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=False):
        sp.add_argument("--config", help="AnalysisConfig JSON file")
        sp.add_argument("--out", required=out_required, help="output path")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        sp.add_argument("--word-cap", type=_positive, dest="word_cap")

    code_help = "code JSON file or fixture:NAME (" + ", ".join(sorted(FIXTURES)) + ")"
    shift_help = "presentation JSON file, full:N, golden, even or fixture:NAME"

    sp = sub.add_parser("analyze", help="irreducibility, period, degree and class-degree trace")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--max-length", type=_positive, dest="max_length")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("degree", help="finite-to-one test and degree")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--max-length", type=_positive, dest="max_length")
    common(sp)
    sp.set_defaults(func=cmd_degree)

    sp = sub.add_parser("class-degree", help="class-degree trace and minimal transition block")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--max-length", type=_positive, dest="max_length")
    common(sp)
    sp.set_defaults(func=cmd_class_degree)

    sp = sub.add_parser("decompose", help="class-degree decomposition into a directory")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--block", help="transition block JSON {w, n, M} to decompose through")
    sp.add_argument("--strict", action="store_true", help="fail when the trace does not stabilize")
    sp.add_argument("--max-length", type=_positive, dest="max_length")
    common(sp, out_required=True)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("pressure", help="topological pressure of a locally constant potential")
    sp.add_argument("shift", help=shift_help)
    sp.add_argument("--phi", help="potential JSON {window, table}; default 0")
    common(sp)
    sp.set_defaults(func=cmd_pressure)

    sp = sub.add_parser("equilibrium", help="equilibrium state as a Markov measure")
    sp.add_argument("shift", help=shift_help)
    sp.add_argument("--phi", help="potential JSON {window, table}; default 0")
    sp.add_argument("--length", type=_positive, help="also tabulate words up to this length")
    common(sp)
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("lift", help="unique lift of an equilibrium state through a finite-to-one code")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--psi", help="potential on the image; default 0")
    sp.add_argument("--length", type=_positive, help="word length for the checks")
    common(sp)
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("mmre", help="order-k relaxation of the relative equilibrium state")
    sp.add_argument("code", help=code_help)
    sp.add_argument("--order", type=_positive, required=True)
    sp.add_argument("--seeds", type=_positive)
    sp.add_argument("--phi", help="potential on the domain; default 0")
    sp.add_argument("--nu", help="target on the image: potential or Markov measure JSON; "
                                 "default the equilibrium state of 0")
    sp.add_argument("--crosscheck", metavar="DIR", help="decomposition directory to cross-check against")
    common(sp)
    sp.set_defaults(func=cmd_mmre)

    sp = sub.add_parser("random-corpus", help="deterministic corpus of random 1-block codes")
    sp.add_argument("--seed", type=int, default=1, dest="seed_value")
    sp.add_argument("--count", type=_positive, default=10)
    sp.add_argument("--max-symbols", type=_bounded, default=5)
    sp.add_argument("--max-states", type=_bounded, default=5)
    sp.add_argument("--out", required=True)
    sp.add_argument("--config", help="AnalysisConfig JSON file")
    sp.set_defaults(func=cmd_random_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FactorCodeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
