"""Command-line interface.

Exit status: 0 on success, 2 for bad arguments, 3 when a shape, word or
pipe-dream file fails validation.
"""

from __future__ import annotations

import argparse
import math
import secrets
import sys

from . import estimate as est
from . import walk
from .errors import InputError
from .io import load_pipedream, load_shape, load_word, write_atomic
from .pipedream import sample, trace
from .rng import MASK64, Stream
from .shape import hypothesis_report, staircase, strip
from .svg import render_svg
from .table import Table, build_id, dumps
from .word import permutation_of

EXIT_USAGE = 2
EXIT_INPUT = 3


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {p}")
    return p


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s <= MASK64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_shape(spec: str):
    """staircase:N | strip:N:RHO | word:FILE | boxes:FILE"""
    kind, _, rest = spec.partition(":")
    if kind == "staircase":
        try:
            return staircase(int(rest)), spec
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise UsageError(f"bad shape spec {spec!r}") from None
    if kind == "strip":
        parts = rest.split(":")
        try:
            n, rho = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise UsageError(f"bad shape spec {spec!r}; expected strip:N:RHO") from None
        return strip(n, rho), spec
    if kind == "word":
        from .shape import from_word

        return from_word(load_word(rest))[0], spec
    if kind == "boxes":
        return load_shape(rest), spec
    raise UsageError(f"unknown shape spec {spec!r}; use staircase:N, strip:N:RHO, word:FILE or boxes:FILE")


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(64)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _emit_table(args, table: Table) -> None:
    _emit(args, table.render(args.format))


def _emit_record(args, name: str, record: dict) -> None:
    t = Table(name, list(record), meta={"build": build_id()})
    t.add(**record)
    _emit_table(args, t)


# commands ----------------------------------------------------------------

def cmd_estimate(args) -> None:
    s, label = parse_shape(args.shape)
    seed = _resolve_seed(args)
    _emit_table(args, est.estimate_table(s, args.p, args.trials, seed, args.threads, label))


def cmd_exact(args) -> None:
    if args.word:
        w = load_word(args.word)
    else:
        from .shape import canonical_linear_extension, word_of

        s, _ = parse_shape(args.shape)
        w = word_of(canonical_linear_extension(s))
    record = {"n": w.n, "length": len(w), "p": args.p}
    methods = [args.method] if args.method != "auto" else [
        m for m, ok in (("dp", w.n <= est.DP_MAX_N), ("enumerate", len(w) <= est.ENUM_MAX_K)) if ok
    ]
    if not methods:
        raise UsageError(f"word too large for the exact oracles (n = {w.n}, length = {len(w)})")
    values = {}
    for m in methods:
        try:
            values[m] = est.exact_expected_inversions(w, args.p, m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    record["value"] = values[methods[0]]
    for m in ("dp", "enumerate"):
        record[m] = values.get(m)
    _emit_record(args, "exact", record)


def cmd_predict(args) -> None:
    s, label = parse_shape(args.shape)
    if not 0.0 < args.p < 1.0:
        raise UsageError("the prediction needs 0 < p < 1")
    _emit_record(args, "predict", {"shape": label, "n": s.n, "boxes": len(s), "p": args.p,
                                   "predicted": est.predicted_inversions(s, args.p)})


def cmd_kappa(args) -> None:
    seed = _resolve_seed(args)
    _emit_table(args, est.kappa_table(args.ns, args.p, args.trials, seed, args.threads))


def cmd_kiss(args) -> None:
    seed = _resolve_seed(args)
    if any(ell < 0 or ell % 2 for ell in args.ells):
        raise UsageError("every ell must be a non-negative even integer")
    _emit_table(args, est.first_kiss_experiment(args.ells, args.ks, args.p, args.trials, seed, args.init,
                                                args.threads))


def cmd_chain(args) -> None:
    if not 0.0 < args.p < 1.0:
        raise UsageError("the chain needs 0 < p < 1")
    chain = walk.transition_matrix(args.p)
    out = {
        "p": args.p,
        "states": list(walk.STATES),
        "P": chain.P.tolist(),
        "nu": chain.nu.tolist(),
        "stationary": walk.stationary(chain).tolist(),
        "sigma2_closed": walk.sigma2_closed(args.p),
        "sigma2_tl": walk.sigma2_tl(args.p),
    }
    if args.format == "json":
        _emit(args, dumps(out))
    else:
        _emit_record(args, "chain", {"p": args.p, "sigma2_closed": out["sigma2_closed"],
                                     "sigma2_tl": out["sigma2_tl"],
                                     **{f"stationary_{s}": v for s, v in zip(walk.STATES, out["stationary"])}})


def cmd_check(args) -> None:
    seed = _resolve_seed(args)
    p = args.p
    if not 0.0 < p < 1.0:
        raise UsageError("checks need 0 < p < 1")
    if args.suite == "half":
        t = est.half_check(args.ks or [2, 10, 50], [p], args.trials, seed, threads=args.threads)
    elif args.suite == "chernoff":
        ks = args.ks or [10, 100]
        xis = args.xis or None
        t = est.chernoff_experiment(ks, xis or [lambda k: k / 4, lambda k: k / 2], p, args.trials, seed,
                                    args.threads)
    elif args.suite == "concentration":
        rs = args.rs or [400]
        zs = args.zs or [4 * math.sqrt(r) for r in rs]
        t = est.concentration_experiment(zs, rs, p, args.trials, seed, args.threads)
    else:
        t = est.psi_clt_check(args.k, p, args.trials, seed, threads=args.threads)
    _emit_table(args, t)


def cmd_render(args) -> None:
    if args.tiles:
        pd = load_pipedream(args.tiles)
    else:
        if not args.shape:
            raise UsageError("render needs --shape or --tiles")
        s, _ = parse_shape(args.shape)
        seed = _resolve_seed(args)
        pd = sample(s, args.p, Stream(seed, "pipedream", args.trial))
    routing = trace(pd)
    _emit(args, render_svg(pd, routing, scale=args.scale, labels=not args.no_labels))


def cmd_hypotheses(args) -> None:
    s, label = parse_shape(args.shape)
    if not 0.0 < args.epsilon < 0.5:
        raise UsageError("epsilon must lie in (0, 0.5)")
    rep = hypothesis_report(s, args.epsilon)
    _emit_record(args, "hypotheses", {"shape": label, **rep.to_json()})


def cmd_permutation(args) -> None:
    w = load_word(args.word)
    v = permutation_of(w)
    from .word import inversions, is_alternating, is_reduced

    _emit(args, dumps({"n": w.n, "permutation": v.to_json(), "inversions": inversions(v),
                       "alternating": is_alternating(w), "reduced": is_reduced(w)}))


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pipedreams", description="Random pipe dreams and random subwords.")
    ap.add_argument("--version", action="version", version=build_id())
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=False, threads=False, trials=None):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write output here instead of standard output")
        if seed:
            p.add_argument("--seed", type=_seed, help="64-bit seed; generated and printed when omitted")
        if threads:
            p.add_argument("--threads", type=_positive, default=None,
                           help="worker threads (default: $PIPEDREAM_THREADS or 1)")
        if trials is not None:
            p.add_argument("--trials", type=_positive, default=trials)

    p = sub.add_parser("estimate", help="Monte Carlo expected inversions with the predicted value")
    p.add_argument("--shape", required=True)
    p.add_argument("--p", type=_probability, required=True)
    common(p, seed=True, threads=True, trials=1000)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("exact", help="exact expected inversions for a small word")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--word")
    g.add_argument("--shape")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--method", choices=("auto", "dp", "enumerate"), default="auto")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("predict", help="predicted expected inversions of a shape")
    p.add_argument("--shape", required=True)
    p.add_argument("--p", type=_probability, required=True)
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("kappa", help="staircase ratio table")
    p.add_argument("--ns", type=_int_list, default=[100, 200, 400, 800, 1000])
    p.add_argument("--p", type=_probability, default=0.5)
    common(p, seed=True, threads=True, trials=100)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("kiss", help="first-kiss distribution against the chain hitting time")
    p.add_argument("--ells", type=_int_list, default=[2, 4, 8])
    p.add_argument("--ks", type=_int_list, default=[2 ** i for i in range(13)])
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--init", choices=walk.STATES, default=None, help="fixed initial facings (default uniform)")
    common(p, seed=True, threads=True, trials=100000)
    p.set_defaults(func=cmd_kiss)

    p = sub.add_parser("chain", help="facing chain: transition matrix, stationary law, variance")
    p.add_argument("--p", type=_probability, required=True)
    common(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("check", help="statistical checks of the single-pipe and chain bounds")
    p.add_argument("suite", choices=("half", "chernoff", "concentration", "psi"))
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--ks", type=_int_list, default=None)
    p.add_argument("--xis", type=_float_list, default=None)
    p.add_argument("--zs", type=_float_list, default=None)
    p.add_argument("--rs", type=_int_list, default=None)
    p.add_argument("--k", type=_positive, default=10000, help="chain length for the psi suite")
    common(p, seed=True, threads=True, trials=100000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("render", help="SVG of a sampled or given pipe dream")
    p.add_argument("--shape")
    p.add_argument("--tiles", help="pipe dream JSON file")
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--scale", type=float, default=40.0)
    p.add_argument("--no-labels", action="store_true")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render, format="svg")

    p = sub.add_parser("hypotheses", help="diagnostics for the growth hypotheses on diagonal counts")
    p.add_argument("--shape", required=True)
    p.add_argument("--epsilon", type=float, default=0.05)
    common(p)
    p.set_defaults(func=cmd_hypotheses)

    p = sub.add_parser("permutation", help="permutation, inversions and predicates of a word file")
    p.add_argument("--word", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_permutation, format="json")
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
