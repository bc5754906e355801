"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad input, 3 out of
classification scope, 4 stage budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .build import ParameterOutOfRange, RingParseError, RingPresentation, homology_algebra, koszul_complex, table_algebra
from .classify import OutOfScope, Unrecognized, classify_ring
from .derived import BudgetExceeded, poincare, rhom_dims, tor
from .dgcore import DGAxiomError, algebra_to_json, dumps, make_algebra, make_module, regular_module, residue_module
from .exactla import DEFAULT_CHAR, euler_characteristic, is_prime
from .sdmod import _num, dualizing_module
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SCOPE, EXIT_BUDGET = range(5)


class InputError(ValueError):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def _char(args, raw=None) -> int:
    if args.char is not None:
        return args.char
    if isinstance(raw, dict) and "char" in raw:
        return int(raw["char"])
    return DEFAULT_CHAR


def _ring(args):
    raw = _load_json(args.ring)
    return RingPresentation.from_json(raw, char=_char(args, raw))


def _algebra(args):
    raw = _load_json(args.algebra)
    if args.char is not None:
        raw = dict(raw, char=args.char)
    return make_algebra(raw)


def _module(A, spec: str):
    if spec == "k":
        return residue_module(A)
    if spec == "A":
        return regular_module(A)
    if spec == "D":
        return dualizing_module(A)
    return make_module(A, _load_json(spec))


def _window(w):
    return [_num(w[0]), _num(w[1])]


# --------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> tuple[int, dict, str]:
    R = _ring(args)
    try:
        cls, report = classify_ring(R)
    except OutOfScope as exc:
        body = dict(exc.report or {}, error=str(exc))
        return EXIT_SCOPE, body, f"out of scope: {exc}"
    except Unrecognized as exc:
        return EXIT_SCOPE, {"error": str(exc), "invariants": exc.record.to_json()}, str(exc)
    text = (f"class {report['class']}  W={tuple(report['W'])}  koszul dims {tuple(report['koszul_dims'])}\n"
            f"golod {report['golod']}  gorenstein {report['gorenstein']}  sdc_bound {report['sdc_bound']}")
    return EXIT_OK, report, text


def cmd_verify(args) -> tuple[int, dict, str]:
    cfg = SuiteConfig(char=args.char or DEFAULT_CHAR, stages=args.stages, seed=args.seed, trials=args.trials)
    out = run_suite(args.suite, cfg, jobs=args.jobs)
    lines = [f"{c['case']}: {'pass' if c['passed'] else 'FAIL'}" for c in out["cases"]]
    lines.append(f"suite {args.suite}: {'pass' if out['passed'] else 'FAIL'}")
    return (EXIT_OK if out["passed"] else EXIT_FAIL), out, "\n".join(lines)


def cmd_table(args) -> tuple[int, dict, str]:
    A = table_algebra(args.label, args.params, args.W or (), args.char or DEFAULT_CHAR)
    body = algebra_to_json(A)
    meta = {"class": A.name, "dims": list(A.dims())}
    label = args.label.upper()
    if label == "H" and tuple(args.params) == (0, 0):
        meta["note"] = "H(0,0) coincides with k⋉Σk and is classified as C(1)"
    elif label == "H" and tuple(args.params) == (1, 0):
        meta["note"] = "H(1,0) coincides with C(2)"
    elif label == "H" and tuple(args.params) == (0, 1):
        meta["note"] = "H(0,1) coincides with G(1)"
    body["metadata"] = meta
    return EXIT_OK, body, f"{A.name}: dims {A.dims()}"


def cmd_compute(args) -> tuple[int, dict, str]:
    kind = args.kind
    if kind == "koszul":
        if not args.ring:
            raise InputError("compute koszul needs a ring file")
        R = _ring(args)
        H = homology_algebra(koszul_complex(R))
        dims = list(H.algebra.dims()) + [0] * (R.edim + 1 - len(H.algebra.dims()))
        chi = euler_characteristic(H.algebra.space)
        body = {"kind": "koszul", "ring": R.to_json(), "homology_dims": dims, "euler": chi}
        return EXIT_OK, body, f"H(K) dims {tuple(dims)}  χ = {chi}"
    if not args.algebra:
        raise InputError(f"compute {kind} needs --algebra")
    A = _algebra(args)
    N = args.stages
    try:
        if kind == "poincare":
            X = _module(A, args.module or "k")
            P = poincare(X, N)
            body = {"kind": kind, "window": _window(P.window), "coeffs": P.as_list(), "exact": P.exact}
            return EXIT_OK, body, ",".join(str(c) for c in P.as_list())
        X = _module(A, args.module_x or "k")
        Y = _module(A, args.module_y or "k")
        a, b = (args.range or (None, None))
        if kind == "tor":
            r = tor(X, Y, a, b, N=N)
        else:
            r = rhom_dims(X, Y, a, b, N=N)
    except BudgetExceeded as exc:
        body = {"kind": kind, "error": str(exc), "window": _window(exc.window) if exc.window else None}
        return EXIT_BUDGET, body, f"budget exceeded: {exc}"
    keys = sorted(r.dims)
    body = {"kind": kind, "window": _window(r.window), "degrees": keys, "dims": [r.dims[i] for i in keys],
            "complete": r.complete}
    return EXIT_OK, body, " ".join(f"{i}:{r.dims[i]}" for i in keys)


# --------------------------------------------------------------------------
# argument parsing


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not is_prime(p) or p >= 2**31:
        raise argparse.ArgumentTypeError(f"{p} is not a prime below 2**31")
    return p


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--char", type=_prime, default=None, help=f"field characteristic (default {DEFAULT_CHAR})")
    common.add_argument("--stages", type=_positive, default=12, help="stage budget N")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=500)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--jobs", type=_positive, default=None, help="worker processes (env KLAB_JOBS)")
    common.add_argument("--output", default=None, help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(prog="klab", description="DG algebra and Tor algebra toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a monomial ring")
    p.add_argument("ring")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="emit a table algebra")
    p.add_argument("label", choices=("C", "S", "T", "B", "G", "H", "c", "s", "t", "b", "g", "h"))
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("--W", nargs="+", type=int, default=None, help="dims of W in degrees 1, 2, ...")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("compute", parents=[common], help="tor, rhom, poincare or koszul data")
    p.add_argument("kind", choices=("tor", "rhom", "poincare", "koszul"))
    p.add_argument("ring", nargs="?", default=None, help="ring file (koszul)")
    p.add_argument("--algebra")
    p.add_argument("--module", help="k, A, D or a module file")
    p.add_argument("--module-x", dest="module_x")
    p.add_argument("--module-y", dest="module_y")
    p.add_argument("--range", nargs=2, type=int, metavar=("A", "B"))
    p.set_defaults(func=cmd_compute)
    return parser


def _emit(args, body, text):
    out = dumps(body) if args.format == "json" else text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs is None:
        env = os.environ.get("KLAB_JOBS")
        args.jobs = int(env) if env and env.isdigit() and int(env) > 0 else 1
    try:
        code, body, text = args.func(args)
    except RingParseError as exc:
        code = EXIT_INPUT
        body = {"error": str(exc), "column": exc.position}
        text = f"error: {exc}"
    except (InputError, ParameterOutOfRange, DGAxiomError, ValueError, KeyError) as exc:
        code = EXIT_INPUT
        body = {"error": str(exc)}
        text = f"error: {exc}"
    _emit(args, body, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
