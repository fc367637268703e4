"""Acceptance criteria, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are repeated in the
pytest terminal summary.  Run standalone with ``python tests/test_acceptance.py``.
"""
import json
import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest

from gschur import io as gio
from gschur.product import hadamard, saropp_from
from gschur.algebra import truncated_free_algebra
from gschur.ropp import NotRoppError, RoppError, check_ropp, find_identity, reconstruct, verify_mixed_law
from gschur.schoenberg import build_witness, sample_contraction_tuples, verify_witness
from gschur.series import (
    NcPowerSeries,
    all_words,
    difference_quotient,
    eval_series,
    homomorphism_equivariance_check,
)
from gschur.spectral import Verdict, jsr_bounds, min_eig, search_contraction_witness
from gschur.zoo import zoo_products, zoo_saropps

SEED = 20240611
RESULTS = []


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rank_one(rng, n, m):
    return np.outer(crandn(rng, n), crandn(rng, m).conj())


def psd(rng, n):
    G = crandn(rng, n, n)
    return G @ G.conj().T


def hermitian_eigs(Z):
    return np.linalg.eigvalsh((Z + Z.conj().T) / 2)


# ---------------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng([SEED, 1])
    h = hadamard(4, 5)
    worst = 0.0
    for _ in range(100):
        X, Y = crandn(rng, 4, 5), crandn(rng, 4, 5)
        direct = X * Y
        worst = max(worst, float(np.abs(h.multiply(X, Y) - direct).max() / np.abs(direct).max()))
    return worst <= 1e-12, f"max relative deviation {worst:.2e} over 100 pairs (tol 1e-12)"


def criterion_2():
    rng = np.random.default_rng([SEED, 2])
    worst, name_at = 0.0, ""
    products = zoo_products(SEED)
    for name, g in products.items():
        for _ in range(200):
            Z = g.multiply(rank_one(rng, *g.shape), rank_one(rng, *g.shape))
            s = np.linalg.svd(Z, compute_uv=False)
            ratio = (s[1] if len(s) > 1 else 0.0) / max(s[0], 1.0)
            if ratio > worst:
                worst, name_at = ratio, name
    ok = worst <= 1e-8
    return ok, f"max sigma2/max(sigma1,1) {worst:.2e} ({name_at or 'all zero'}) over {len(products)} products x 200 pairs"


def criterion_3():
    rng = np.random.default_rng([SEED, 3])
    worst, name_at = -np.inf, ""
    saropps = zoo_saropps(SEED)
    for name, g in saropps.items():
        for _ in range(200):
            ev = hermitian_eigs(g.multiply(psd(rng, g.n), psd(rng, g.n)))
            score = -ev[0] / ev[-1]
            if score > worst:
                worst, name_at = score, name
    return worst <= 1e-8, f"max -lambda_min/lambda_max {worst:.2e} ({name_at}) over {len(saropps)} saropps x 200 pairs"


def criterion_4():
    worst = 0.0
    products = zoo_products(SEED)
    for g in products.values():
        P = g.materialize()
        worst = max(worst, verify_mixed_law(P, find_identity(P), 1e-9).residual)
    return worst <= 1e-9, f"max mixed-law residual {worst:.2e} over {len(products)} products (tol 1e-9)"


def criterion_5():
    rng = np.random.default_rng([SEED, 5])
    worst, rejected, attempts, failures = 0.0, 0, 0, []
    products = zoo_products(SEED)
    for name, g in products.items():
        P = g.materialize()
        try:
            r = reconstruct(P, seed=SEED)
        except RoppError as exc:
            failures.append(f"{name}: {exc}")
            continue
        for _ in range(200):
            X, Y = crandn(rng, *g.shape), crandn(rng, *g.shape)
            ref = g.multiply(X, Y)
            worst = max(worst, float(np.abs(r.multiply(X, Y) - ref).max() / max(1.0, np.abs(ref).max())))
        for _ in range(3):
            attempts += 1
            idx = tuple(int(i) for i in rng.integers(0, P.size, 3))
            Q = P.perturbed(idx, 0.1)
            try:
                reconstruct(Q, seed=SEED)
            except NotRoppError as exc:
                v = exc.verdict
                ok = v.counterexample is not None
                if ok and v.reason == "rank":
                    s = np.linalg.svd(Q.apply(*v.counterexample[:2]), compute_uv=False)
                    ok = s[1] > 1e-8 * max(s[0], 1.0)
                elif ok:
                    X, Y, W = v.counterexample
                    lhs, rhs = Q.apply(Q.apply(X, Y), W), Q.apply(X, Q.apply(Y, W))
                    ok = np.abs(lhs - rhs).max() > 1e-9 * max(1.0, np.abs(lhs).max())
                if ok:
                    rejected += 1
                else:
                    failures.append(f"{name}{idx}: counterexample does not reproduce")
            except RoppError as exc:
                failures.append(f"{name}{idx}: rejected without counterexample ({exc})")
            else:
                failures.append(f"{name}{idx}: perturbed tensor accepted")
    ok = worst <= 1e-8 and not failures
    detail = (f"round-trip max relative deviation {worst:.2e} on {len(products)} products x 200 pairs; "
              f"{rejected}/{attempts} perturbations rejected with a reproducing counterexample")
    if failures:
        detail += "; " + "; ".join(failures[:3])
    return ok, detail


def criterion_6():
    rng = np.random.default_rng([SEED, 6])
    notes, ok = [], True
    h = hadamard(3, 3)
    worst_gap = 0.0
    for _ in range(20):
        Y = crandn(rng, 3, 3)
        est = jsr_bounds(h, [Y], 8)
        target = float(np.abs(Y).max())
        bracket = est.lower <= target * (1 + 1e-12) and target <= est.upper * (1 + 1e-12)
        gap = (est.upper - est.lower) / target
        worst_gap = max(worst_gap, gap)
        ok &= bracket and gap <= 0.05
    notes.append(f"hadamard 3x3 worst relative gap {worst_gap:.2e}")
    nil_ok = True
    for d, D in [(1, 2), (2, 2), (1, 3), (2, 3)]:
        alg, index = truncated_free_algebra(d, D)
        g = saropp_from(alg)
        Ys = []
        for _ in range(2):
            T = crandn(rng, alg.dim, alg.dim)
            T[0, :] = 0  # no constant part on the row side, so every word of length > D vanishes
            Ys.append(T)
        for L in range(1, 9):
            est = jsr_bounds(g, Ys, L)
            nil_ok &= (est.upper == 0.0) == (L > D)
            if L > D:
                nil_ok &= est.lower == 0.0
    ok &= nil_ok
    notes.append("nilpotent tuples reach upper 0 exactly for L > D" if nil_ok else "nilpotent check failed")
    unit_ok = True
    for g in zoo_products(SEED).values():
        est = jsr_bounds(g, [g.identity], 8)
        unit_ok &= abs(est.lower - 1) <= 1e-9 and abs(est.upper - 1) <= 1e-9
    ok &= unit_ok
    notes.append("jsr({E}) = [1, 1] on every zoo product" if unit_ok else "jsr({E}) check failed")
    return ok, "; ".join(notes)


def random_real_series(rng, d, D, nonnegative=True):
    coeffs = {}
    for w in all_words(d, D):
        if rng.random() < 0.6 or len(w) == D:
            coeffs[w] = abs(rng.standard_normal()) if nonnegative else rng.standard_normal()
    # make sure the top degree is present
    coeffs.setdefault((1,) * D, 0.5)
    return NcPowerSeries(d, coeffs)


def criterion_7():
    rng = np.random.default_rng([SEED, 7])
    ok_count, flagged, problems = 0, 0, []
    for k in range(50):
        d = 1 + k % 2
        D = int(rng.integers(1, 5))
        f = random_real_series(rng, d, D)
        words = [w for w in f.words if w]
        alpha = words[int(rng.integers(len(words)))]
        c = -float(rng.uniform(0.1, 2.0))
        f = f.with_coeff(alpha, c)
        w = build_witness(f, alpha, 1.0)
        bound = c * w.epsilon ** (2 * len(alpha))
        psd_ok = all(min_eig(X) >= -1e-10 for X in w.Xs)
        neg_ok = min_eig(eval_series(f, w.gsp, w.Xs)) <= bound / 2 < 0
        if w.at_floor:
            flagged += 1
            cert_ok = w.certificate.verdict is Verdict.INCONCLUSIVE
        else:
            cert_ok = w.certificate.valid and verify_witness(w, f)
        if psd_ok and neg_ok and cert_ok:
            ok_count += 1
        else:
            problems.append(f"d={d} D={D} alpha={alpha} psd={psd_ok} neg={neg_ok} cert={cert_ok}")
    detail = f"{ok_count}/50 witnesses verified; floor flag rate {flagged}/50"
    if problems:
        detail += "; " + "; ".join(problems[:3])
    return ok_count == 50, detail


def criterion_8():
    rng = np.random.default_rng([SEED, 8])
    products = list(zoo_saropps(SEED).values())
    tuples = {d: sample_contraction_tuples(products, 100, d, seed=SEED + d) for d in (1, 2)}
    uncertified = sum(not t.certified for ts in tuples.values() for t in ts)
    lowest, evaluations = np.inf, 0
    for k in range(50):
        d = 1 + k % 2
        f = random_real_series(rng, d, int(rng.integers(1, 5)))
        for t in tuples[d]:
            if not t.certified:
                continue
            lowest = min(lowest, min_eig(eval_series(f, products[t.product_index], t.Xs)))
            evaluations += 1
    ok = lowest >= -1e-8 and uncertified == 0
    return ok, (f"min lambda_min(f(X)) {lowest:.2e} over {evaluations} evaluations "
                f"(50 series x 100 certified tuples); uncertified samples {uncertified}")


def criterion_9():
    rng = np.random.default_rng([SEED, 9])
    h = hadamard(3, 3)
    lowest, out_of_domain = np.inf, 0
    for k in range(50):
        f = random_real_series(rng, 1, int(rng.integers(1, 5)))
        X, H = psd(rng, 3), psd(rng, 3)
        X = 0.2 * X / np.abs(X).max()
        H = float(rng.uniform(0.01, 0.06)) * H / np.abs(H).max()
        # every evaluation point X + jH, j <= 3, must be a certified contraction
        for j in range(4):
            if search_contraction_witness(h, [X + j * H]).verdict is not Verdict.CERTIFIED:
                out_of_domain += 1
        for order in (1, 3):
            lowest = min(lowest, min_eig(difference_quotient(f, h, [X], [H], order)))
    ok = lowest >= -1e-8 and out_of_domain == 0
    return ok, (f"min lambda_min of first/third differences {lowest:.2e} over 50 cases; "
                f"uncertified evaluation points {out_of_domain}")


def criterion_10():
    rng = np.random.default_rng([SEED, 10])
    worst = 0.0
    for d in (1, 2):
        for _ in range(10):
            f = random_real_series(rng, d, int(rng.integers(1, 5)), nonnegative=False)
            rep = homomorphism_equivariance_check(f, 3, 2, tol=1e-10, seed=int(rng.integers(2**31)))
            worst = max(worst, rep.deviation)
    return worst <= 1e-10, f"max deviation {worst:.2e} for d in (1, 2), D = 3 -> 2, 10 series each"


def _cli(args, **kw):
    env = {**os.environ, "GSCHUR_SEED": "7"}
    return subprocess.run([sys.executable, "-m", "gschur.cli", *args], capture_output=True, env=env, **kw)


def criterion_11(tmp):
    files = {}

    def put(name, doc):
        files[name] = os.path.join(tmp, name)
        gio.write_document(doc, files[name])

    h = hadamard(3, 3)
    put("h.json", gio.product_to_doc(h))
    put("ht.json", gio.tensor_to_doc(h.materialize()))
    put("t.json", gio.tuple_to_doc([0.2 * np.ones((3, 3)), 0.1 * np.eye(3)]))
    put("exp.json", gio.series_to_doc(NcPowerSeries(2, {(): 1, (1,): 1, (2, 1): 0.5})))
    put("f.json", gio.series_to_doc(NcPowerSeries(2, {(1,): 1.0, (1, 2): -0.5, (2, 2, 1, 1): 0.2})))
    s = ["--format", "structured", "--seed", "123"]
    runs = [
        ["ropp", "check", files["ht.json"], *s],
        ["ropp", "reconstruct", files["ht.json"], *s],
        ["jsr", files["h.json"], files["t.json"], *s],
        ["contraction", "search", files["h.json"], files["t.json"], *s],
        ["schoenberg", "test", files["exp.json"], files["h.json"], "--samples", "10", *s],
        ["schoenberg", "witness", files["f.json"], *s],
    ]
    mismatched = []
    for argv in runs:
        a, b = _cli(argv), _cli(argv)
        if a.stdout != b.stdout or a.stderr != b.stderr or a.returncode != b.returncode:
            mismatched.append(" ".join(argv[:2]))
    bundles = []
    for k in range(2):
        path = os.path.join(tmp, f"w{k}.json")
        _cli(["schoenberg", "witness", files["f.json"], "-o", path, *s])
        bundles.append(open(path, "rb").read())
    verify = _cli(["schoenberg", "verify", os.path.join(tmp, "w0.json")])
    ok = not mismatched and bundles[0] == bundles[1] and verify.returncode == 0
    detail = (f"{len(runs) - len(mismatched)}/{len(runs)} commands byte-identical across runs; "
              f"bundles identical: {bundles[0] == bundles[1]}; schoenberg verify exit {verify.returncode}")
    if mismatched:
        detail += "; differing: " + ", ".join(mismatched)
    return ok, detail


CRITERIA = [
    (1, "Hadamard equivalence", criterion_1),
    (2, "rank-one preservation", criterion_2),
    (3, "saropp PSD preservation", criterion_3),
    (4, "mixed law", criterion_4),
    (5, "reconstruction round trip", criterion_5),
    (6, "JSR sanity", criterion_6),
    (7, "Schoenberg refutation", criterion_7),
    (8, "Schoenberg forward consistency", criterion_8),
    (9, "difference-quotient positivity", criterion_9),
    (10, "equivariance", criterion_10),
    (11, "CLI determinism", criterion_11),
]


def evaluate(number, title, func, tmp=None):
    start = time.perf_counter()
    ok, detail = func(tmp) if number == 11 else func()
    out = Outcome(number, title, bool(ok), detail, time.perf_counter() - start)
    RESULTS.append(out)
    return out


@pytest.mark.parametrize("number,title,func", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, func, tmp_path, capsys):
    out = evaluate(number, title, func, str(tmp_path))
    with capsys.disabled():
        print("\n" + out.line())
    assert out.passed, out.line()
    assert out.seconds <= 60, f"criterion {number} took {out.seconds:.1f}s"


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        for number, title, func in CRITERIA:
            print(evaluate(number, title, func, tmp).line(), flush=True)
    sys.exit(0 if all(r.passed for r in RESULTS) else 1)
