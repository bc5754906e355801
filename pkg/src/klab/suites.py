"""Named verification corpora used by ``klab verify`` and the acceptance tests.

Every suite is a list of picklable case descriptors plus a runner; each case
returns a JSON-ready dict with at least ``case`` and ``passed``.  Cases build
everything they need from the descriptor and the run configuration, so they
can be farmed out to worker processes and gathered back in order.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .build import (
    RingPresentation,
    exterior_algebra,
    homology_algebra,
    k_algebra,
    koszul_complex,
    ring_algebra,
    square_zero,
    table_algebra,
    _body,
)
from .classify import classify_ring, grid_roundtrip, GRID_G, GRID_H
from .derived import (
    DEFAULT_CAP,
    BudgetExceeded,
    Resolution,
    poincare,
    prop31_sequence,
    rhom_dims,
    tor,
)
from .dgcore import DGAlgebra, regular_module, residue_module, submodule
from .exactla import DEFAULT_CHAR, euler_characteristic
from .sdmod import (
    NoneFound,
    ResolutionCache,
    Verified,
    along_projection,
    check_base_change,
    check_biduality,
    check_dagger_duality,
    check_lemma33,
    dualizing_module,
    extension_by_point,
    is_semidualizing,
    random_module,
    search_thm34_counterexample,
    self_duality_isomorphism,
    _num,
)


@dataclass(frozen=True)
class SuiteConfig:
    char: int = DEFAULT_CHAR
    stages: int = 12
    seed: int = 0
    trials: int = 500
    cap: int = DEFAULT_CAP


def _rng(cfg: SuiteConfig, *key) -> np.random.Generator:
    """Generator split from the master seed by a case key."""
    # zlib.crc32 is stable across processes, unlike hash()
    words = [zlib.crc32(str(k).encode()) for k in key]
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, *words]))


# --------------------------------------------------------------------------
# corpora


RINGS = {
    "x2": (["x"], ["x^2"]),
    "x3": (["x"], ["x^3"]),
    "ci2": (["x", "y"], ["x^2", "y^2"]),
    "golod2": (["x", "y"], ["x^2", "x*y", "y^2"]),
    "xy3": (["x", "y"], ["x^2", "x*y", "y^3"]),
    "ci3": (["x", "y", "z"], ["x^2", "y^2", "z^2"]),
    "m2_3": (["x", "y", "z"], ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2"]),
    "ci3_xy": (["x", "y", "z"], ["x^2", "y^2", "z^2", "x*y"]),
}


def ring(name: str, p: int) -> RingPresentation:
    variables, ideal = RINGS[name]
    return RingPresentation.from_json({"vars": variables, "ideal": ideal}, char=p)


def lemma33_base(name: str, p: int) -> DGAlgebra:
    return {
        "k": lambda: k_algebra(p),
        "E1": lambda: exterior_algebra(1, p),
        "E2": lambda: exterior_algebra(2, p),
        "k⋉Σk²": lambda: square_zero(p, (2,)),
    }[name]()


LEMMA33_BASES = ("k", "E1", "E2", "k⋉Σk²")

CORPUS_ALGEBRAS = (
    ("C", (1,), ()),
    ("C", (2,), ()),
    ("S", (), (2,)),
    ("T", (), ()),
    ("B", (), (1,)),
    ("G", (2,), ()),
    ("H", (1, 1), ()),
)


def corpus_algebra(desc, p: int) -> DGAlgebra:
    label, params, W = desc
    return table_algebra(label, params, W, p)


def syzygy_module(B: DGAlgebra):
    """``B_+``, the kernel of ``B -> k``; ``None`` when ``B = k``."""
    rows = {}
    for i in B.space.degrees():
        idx = B.max_ideal_indices(i)
        if idx:
            rows[i] = np.eye(B.dim(i), dtype=np.int64)[idx]
    if not rows:
        return None
    M, _ = submodule(regular_module(B), rows, name="B+")
    return M


def corpus_modules(A: DGAlgebra, rng: np.random.Generator, randoms: int = 2) -> list:
    mods = [residue_module(A), dualizing_module(A)]
    syz = syzygy_module(A)
    if syz is not None:
        mods.append(syz)
    mods += [random_module(A, rng, name=f"R{j}") for j in range(randoms)]
    return mods


def dualizing_grid():
    for c in range(1, 4):
        yield ("C", (c,), ())
    for W in ((), (1,)):
        if W:
            yield ("S", (), W)
        yield ("T", (), W)
        yield ("B", (), W)
        for r in GRID_G:
            yield ("G", r, W)
        for pq in GRID_H:
            yield ("H", pq, W)


def _window(w):
    return [_num(w[0]), _num(w[1])]


# --------------------------------------------------------------------------
# suites


def _lemma33_cases(cfg):
    return [(b, n) for b in LEMMA33_BASES for n in range(4)]


def _lemma33_run(desc, cfg):
    bname, n = desc
    p = cfg.char
    B = lemma33_base(bname, p)
    rng = _rng(cfg, "lemma33", bname)
    k = residue_module(B)
    mods = {"k": k}
    syz = syzygy_module(B)
    if syz is not None:
        mods["B+"] = syz
    for j in range(3):
        mods[f"R{j}"] = random_module(B, rng, name=f"R{j}")
    pairs = [("k", "k")]
    if syz is not None:
        pairs += [("k", "B+"), ("B+", "k")]
    pairs += [("R0", "R1"), ("R1", "R2"), ("R2", "R0"), ("k", "R0")]
    A = extension_by_point(B, n)
    over = {name: along_projection(A, B, M) for name, M in mods.items()}
    cache = ResolutionCache(cfg.cap)
    reports = []
    for x, y in pairs:
        r = check_lemma33(B, n, mods[x], mods[y], cfg.stages, cfg.cap, A=A,
                          over_A=(over[x], over[y]), cache=cache)
        reports.append(r.to_json())
    return {"case": f"B={bname} n={n}", "passed": all(r["verdict"] == "pass" for r in reports),
            "reports": reports}


def _prop31_cases(cfg):
    return list(range(len(CORPUS_ALGEBRAS)))


def _prop31_run(i, cfg):
    desc = CORPUS_ALGEBRAS[i]
    A = corpus_algebra(desc, cfg.char)
    rng = _rng(cfg, "prop31", i)
    out = []
    for X in corpus_modules(A, rng):
        try:
            seq = prop31_sequence(X, cfg.stages, cfg.cap)
        except BudgetExceeded as exc:
            out.append({"module": X.name, "passed": False, "error": str(exc)})
            continue
        checks = dict(seq.checks)
        ok = all(v for k, v in checks.items() if k != "finite_semibasis") and checks["finite_semibasis"] > 0
        out.append({"module": X.name, "s": seq.s, "L": list(seq.L.dims()), "X'": list(seq.Xp.dims()),
                    "checks": checks, "passed": ok})
    return {"case": A.name, "passed": all(o["passed"] for o in out), "modules": out}


def _dualizing_cases(cfg):
    return list(dualizing_grid())


def _dualizing_run(desc, cfg):
    A = corpus_algebra(desc, cfg.char)
    rng = _rng(cfg, "dualizing", *desc)
    vA = is_semidualizing(A, regular_module(A), cfg.stages, cap=cfg.cap)
    vD = is_semidualizing(A, dualizing_module(A), cfg.stages, cap=cfg.cap)
    bid = [check_biduality(A, random_module(A, rng, name=f"R{j}")).passed for j in range(10)]
    ok = isinstance(vA.verdict, Verified) and isinstance(vD.verdict, Verified) and all(bid)
    return {"case": A.name, "passed": ok, "A": vA.to_json(), "D": vD.to_json(), "biduality": bid}


def _biduality_cases(cfg):
    return list(range(len(CORPUS_ALGEBRAS) + 1))


def _biduality_run(i, cfg):
    if i == len(CORPUS_ALGEBRAS):
        A = exterior_algebra(1, cfg.char)
        mods = [residue_module(A), syzygy_module(A)]
    else:
        A = corpus_algebra(CORPUS_ALGEBRAS[i], cfg.char)
        rng = _rng(cfg, "biduality", i)
        mods = corpus_modules(A, rng, randoms=5)
    reps = [check_biduality(A, M).to_json() for M in mods]
    return {"case": A.name, "passed": all(r["verdict"] == "pass" for r in reps), "reports": reps}


def _dagger_cases(cfg):
    return [("S", (), (3, 2)), ("B", (), (1,)), ("C", (2,), ()), ("G", (2,), ()), ("T", (), ())]


def _dagger_run(desc, cfg):
    A = corpus_algebra(desc, cfg.char)
    reps = [check_dagger_duality(A, X, cfg.stages, cfg.cap).to_json()
            for X in (regular_module(A), dualizing_module(A))]
    return {"case": A.name, "passed": all(r["verdict"] in ("pass", "vacuous") for r in reps), "reports": reps}


def _roundtrip_cases(cfg):
    return ["grid", "rings"]


def _roundtrip_run(desc, cfg):
    p = cfg.char
    if desc == "grid":
        bad = []
        count = 0
        for point, cls, expect in grid_roundtrip(p):
            count += 1
            got = (cls.label, cls.params, cls.W)
            if got != expect:
                bad.append({"point": [point[0], list(point[1]), list(point[2])],
                            "got": [got[0], list(got[1]), list(got[2])]})
        return {"case": "grid", "passed": not bad, "points": count, "mismatches": bad}
    expected = {"ci3": "C(3)", "golod2": "S", "x2": "C(1)"}
    out = []
    for name, want in expected.items():
        cls, rep = classify_ring(ring(name, p))
        bound_ok = rep["sdc_bound"] == (1 if rep["gorenstein"] else 2)
        out.append({"ring": name, "class": rep["class"], "expected": want,
                    "sdc_bound": rep["sdc_bound"], "passed": rep["class"] == want and bound_ok})
    return {"case": "rings", "passed": all(o["passed"] for o in out), "rings": out}


THM34_PAIRS = tuple((b, n) for b in LEMMA33_BASES for n in (1, 2, 3))


def _thm34_cases(cfg):
    return list(THM34_PAIRS)


def _thm34_run(desc, cfg):
    bname, n = desc
    B = lemma33_base(bname, cfg.char)
    res = search_thm34_counterexample(B, n, cfg.trials, cfg.stages, cfg.seed, cfg.cap)
    case = f"B={bname} n={n}"
    if isinstance(res, NoneFound):
        return {"case": case, "passed": True, "result": "NoneFound", "trials": res.trials, "stats": res.stats}
    return {"case": case, "passed": False, "result": "Candidate", "trial": res.trial, "N": res.N,
            "X": list(res.X.dims()), "Y": list(res.Y.dims()), "escalated": res.escalated}


def _base_change_cases(cfg):
    return ["trivial", "x2-R", "x2-k", "golod2-D"]


def _base_change_run(desc, cfg):
    p = cfg.char
    if desc == "trivial":
        C = exterior_algebra(1, p)
        reps = [check_base_change(C, [], X, cfg.stages, cfg.cap) for X in (regular_module(C), residue_module(C))]
    elif desc in ("x2-R", "x2-k"):
        C = ring_algebra(ring("x2", p))
        X = regular_module(C) if desc == "x2-R" else residue_module(C)
        reps = [check_base_change(C, ["x"], X, cfg.stages, cfg.cap)]
    else:
        C = ring_algebra(ring("golod2", p))
        reps = [check_base_change(C, ["x", "y"], dualizing_module(C), cfg.stages, cfg.cap)]
    out = [r.to_json() for r in reps]
    return {"case": desc, "passed": all(r["verdict"] == "pass" for r in out), "reports": out}


def _euler_cases(cfg):
    return [("ring", name) for name in RINGS] + [("body", "T"), ("body", "B")]


def _euler_run(desc, cfg):
    kind, name = desc
    if kind == "ring":
        R = ring(name, cfg.char)
        H = homology_algebra(koszul_complex(R), check=False)
        chi = euler_characteristic(H.algebra.space)
        want = 1 if R.is_regular else 0
        return {"case": f"χ(H(K)) for {name}", "passed": chi == want, "chi": chi,
                "dims": list(H.algebra.dims())}
    chi = euler_characteristic(_body(name, (), cfg.char).space)
    return {"case": f"χ({name} body)", "passed": chi == 1, "chi": chi}


def _selfdual_cases(cfg):
    return list(range(1, 5))


def _selfdual_run(r, cfg):
    A = table_algebra("G", (r,), (), cfg.char)
    f = self_duality_isomorphism(A, seed=cfg.seed)
    return {"case": f"G({r})", "passed": f is not None and f.is_isomorphism(),
            "shift": A.top}


# window soundness: rerun with a larger budget and compare on the overlap

def _windows_cases(cfg):
    return list(range(len(CORPUS_ALGEBRAS)))


def _overlap_ok(r1, r2):
    lo = max(r1.window[0], r2.window[0])
    hi = min(r1.window[1], r2.window[1])
    shared = [i for i in r1.dims if i in r2.dims and lo <= i <= hi]
    return all(r1.dims[i] == r2.dims[i] for i in shared), len(shared)


def _windows_run(i, cfg):
    A = corpus_algebra(CORPUS_ALGEBRAS[i], cfg.char)
    rng = _rng(cfg, "windows", i)
    N = cfg.stages
    out = []
    for X in corpus_modules(A, rng, randoms=1):
        k = residue_module(A)
        t1 = tor(X, k, N=N, cap=cfg.cap)
        t2 = tor(X, k, N=N + 2, cap=cfg.cap)
        ok_t, nt = _overlap_ok(t1, t2)
        h1 = rhom_dims(X, k, N=N, cap=cfg.cap)
        h2 = rhom_dims(X, k, N=N + 2, cap=cfg.cap)
        ok_h, nh = _overlap_ok(h1, h2)
        r1 = Resolution(X, cfg.cap).extend(X.lo + N + 1)
        r2 = Resolution(X, cfg.cap).extend(X.lo + N + 3)
        top = min(r1.G, r2.G)
        ok_b = all(r1.num_gens(d) == r2.num_gens(d) for d in range(X.lo, int(min(top, X.lo + N + 3)) + 1))
        v1 = is_semidualizing(A, X, N, cap=cfg.cap)
        v2 = is_semidualizing(A, X, N + 2, cap=cfg.cap)
        ok_v = v1.label == v2.label or "Inconclusive" in (v1.label, v2.label)
        out.append({"module": X.name, "tor": [ok_t, nt, _window(t1.window)], "rhom": [ok_h, nh, _window(h1.window)],
                    "betti": ok_b, "semidualizing": [v1.label, v2.label],
                    "passed": ok_t and ok_h and ok_b and ok_v})
    return {"case": A.name, "passed": all(o["passed"] for o in out), "modules": out}


def _poincare_cases(cfg):
    return [1, 2, 3]


def _poincare_run(n, cfg):
    A = extension_by_point(k_algebra(cfg.char), n)
    N = cfg.stages
    P = poincare(residue_module(A), N)
    T = {}
    for i in range(N + 1):
        T[i] = (1 if i == 0 else 0) + (T[i - n - 1] if i - n - 1 >= 0 else 0)
    got = P.as_list()
    want = [T[i] for i in range(len(got))]
    return {"case": f"n={n}", "passed": got == want and len(got) == N + 1, "coeffs": got}


SUITES = {
    "lemma33": (_lemma33_cases, _lemma33_run),
    "prop31": (_prop31_cases, _prop31_run),
    "dualizing": (_dualizing_cases, _dualizing_run),
    "biduality": (_biduality_cases, _biduality_run),
    "dagger": (_dagger_cases, _dagger_run),
    "table-roundtrip": (_roundtrip_cases, _roundtrip_run),
    "thm34-search": (_thm34_cases, _thm34_run),
    "base-change": (_base_change_cases, _base_change_run),
    "euler": (_euler_cases, _euler_run),
    "self-duality": (_selfdual_cases, _selfdual_run),
    "poincare": (_poincare_cases, _poincare_run),
    "windows": (_windows_cases, _windows_run),
}


def _run_one(args):
    name, desc, cfg = args
    return SUITES[name][1](desc, cfg)


def run_suite(name: str, cfg: SuiteConfig = SuiteConfig(), jobs: int | None = None) -> dict:
    """Run every case of a suite; results come back in case order."""
    if name not in SUITES:
        raise KeyError(name)
    cases = SUITES[name][0](cfg)
    jobs = jobs or int(os.environ.get("KLAB_JOBS", "1") or 1)
    args = [(name, d, cfg) for d in cases]
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cases))) as ex:
            results = list(ex.map(_run_one, args))
    else:
        results = [_run_one(a) for a in args]
    return {"suite": name, "passed": all(r["passed"] for r in results), "cases": results,
            "config": {"char": cfg.char, "stages": cfg.stages, "seed": cfg.seed, "trials": cfg.trials}}

