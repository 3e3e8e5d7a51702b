"""Exit criteria for the build; one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.

Criterion 7 needs the Vistex images, which cannot be shipped. Point
``CNRNN_VISTEX_ROOT`` at a ``root/<class>/*.pgm`` tree of the 54 original
512x512 images to enable it.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from cnrnn.cli import RunConfig, cmd_benchmark, cmd_synth
from cnrnn.evaluation import loocv
from cnrnn.imagery import GrayImage, synth_texture
from cnrnn.netmodel import degree_profiles, oracle_profiles
from cnrnn.rnn import hidden_weights, lcg_sequence, output_weights, project, zscore_rows
from cnrnn.signature import PRESETS, extract_many, psi, theta, upsilon

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

pytestmark = pytest.mark.acceptance


def report(number, title, ok, detail, elapsed, budget):
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    timing = f"{elapsed:.2f}s" + (f" (budget {budget}s)" if budget else "")
    line = f"[{status}] criterion {number}: {title} -- {detail}; {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


def test_criterion_1_length_identities():
    t0 = time.perf_counter()
    img = synth_texture("blob-noise", 8, 20, 1, 32)
    got = {
        "upsilon(14)_4": len(upsilon(img, 14, 4)),
        "upsilon(19)_4": len(upsilon(img, 19, 4)),
        "theta(4)_{4,9,14}": len(theta(img, 4, (4, 9, 14))),
        "psi(4,6)_{4,9,14}": len(psi(img, (4, 6), (4, 9, 14))),
        "psi(4,10)_{4,14,19}": len(psi(img, (4, 10), (4, 14, 19))),
    }
    want = dict(zip(got, (45, 60, 90, 180, 240)))
    report(1, "signature lengths", got == want, ", ".join(f"{k}={v}" for k, v in got.items()),
           time.perf_counter() - t0, 1)


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst_k, worst_w = 0, 0.0
    for i in range(200):
        w, h = (int(v) for v in rng.integers(1, 33, 2))
        R = int(rng.integers(1, 6))
        L = int(rng.choice([1, 7, 255]))
        img = GrayImage(rng.integers(0, L + 1, (h, w)), L)
        fast, slow = degree_profiles(img, R), oracle_profiles(img, R)
        worst_k = max(worst_k, int(np.abs(fast.k - slow.k).max()))
        worst_w = max(worst_w, float(np.abs(fast.ks - slow.ks).max()), float(np.abs(fast.ke - slow.ke).max()))
    ok = worst_k == 0 and worst_w <= 1e-9
    report(2, "degree_profiles vs enumerate_edges on 200 images",
           ok, f"max |dk|={worst_k}, max |dks|,|dke|={worst_w:.2e}", time.perf_counter() - t0, 30)


def test_criterion_3_least_squares():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_res, worst_oracle = 0.0, 0.0
    for i in range(100):
        q1 = int(rng.integers(2, 21))
        n = int(rng.integers(1, 51))
        if i % 2:
            Q, p = q1 - 1, int(rng.integers(1, 6))
            if Q * (p + 1) == 4:
                p += 1
            Z = project(hidden_weights(Q, p), zscore_rows(rng.normal(size=(p, n))))
        else:
            Z = rng.normal(size=(q1, n))
        D = rng.integers(0, 256, n).astype(float)
        lam = 1e-3 if i % 3 else float(10 ** rng.uniform(-4, 0))
        f = output_weights(Z, D, lam)
        A = Z @ Z.T + lam * np.eye(Z.shape[0])
        rhs = D @ Z.T
        res = np.abs(f @ A - rhs).max() / max(1.0, np.abs(rhs).max())
        f_pinv = rhs @ np.linalg.pinv(A)
        agree = np.abs(f - f_pinv).max() / max(1.0, np.abs(f_pinv).max())
        worst_res, worst_oracle = max(worst_res, res), max(worst_oracle, agree)
    ok = worst_res <= 1e-8 and worst_oracle <= 1e-8
    report(3, "ridge solve residual and pseudo-inverse agreement",
           ok, f"worst scaled residual={worst_res:.2e}, worst oracle gap={worst_oracle:.2e}",
           time.perf_counter() - t0, 10)


def test_criterion_4_determinism():
    t0 = time.perf_counter()
    img = synth_texture("blob-noise", 9, 30, 4, 128)
    cfg = PRESETS["psi-4-6/4-9-14"]
    a = psi(img, (4, 6), (4, 9, 14)).values
    b = psi(GrayImage(img.pixels.copy()), (4, 6), (4, 9, 14)).values
    threaded = extract_many([img, img, img], cfg, threads=3)
    same = a.tobytes() == b.tobytes() and all(row.tobytes() == a.tobytes() for row in threaded)
    lcg_ok = lcg_sequence(2).tolist() == [3, 1] and lcg_sequence(20)[:2].tolist() == [21, 85]
    report(4, "repeatable psi(4,6) and LCG hand values", same and lcg_ok,
           f"bitwise equal across runs/threads={same}, LCG(2)={lcg_sequence(2).tolist()}, "
           f"LCG(20)[:2]={lcg_sequence(20)[:2].tolist()}", time.perf_counter() - t0, 5)


def test_criterion_5_normalization():
    t0 = time.perf_counter()
    worst = 0.0
    for Q, p in [(4, 4), (9, 4), (14, 4), (19, 10), (39, 12)]:
        W = hidden_weights(Q, p).weights
        worst = max(worst, abs(W.mean()), abs(W.std() - 1))
    rng = np.random.default_rng(5)
    X = rng.normal(3, 40, size=(6, 500))
    X[2] = 17.0
    Xn = zscore_rows(X)
    live = np.ones(6, dtype=bool)
    live[2] = False
    worst = max(worst, np.abs(Xn[live].mean(axis=1)).max(), np.abs(Xn[live].std(axis=1) - 1).max())
    zero_row = bool(np.all(Xn[2] == 0))
    report(5, "z-score of hidden weights and feature rows", worst <= 1e-9 and zero_row,
           f"worst mean/std deviation={worst:.2e}, constant row -> zeros={zero_row}", time.perf_counter() - t0, 1)


def test_criterion_6_synthetic_benchmark(tmp_path):
    t0 = time.perf_counter()
    cmd_synth(tmp_path, classes=4, per_class=12, seed=7, size=64)
    rep = cmd_benchmark(RunConfig(tmp_path, PRESETS["theta-4/4-9-14"]))
    report(6, "synthetic 4x12 corpus, theta-4/4-9-14, LOOCV+LDA",
           rep.accuracy >= 90.0 and rep.n_samples == 48,
           f"accuracy={rep.accuracy:.2f}% (threshold 90.00%)", time.perf_counter() - t0, 60)


VISTEX_TARGETS = {"psi-4-10/4-14-19": 99.19, "psi-4-6/4-9-14": 98.73}


@pytest.mark.skipif("CNRNN_VISTEX_ROOT" not in os.environ, reason="Vistex images not supplied (CNRNN_VISTEX_ROOT)")
@pytest.mark.parametrize("preset", sorted(VISTEX_TARGETS))
def test_criterion_7_vistex_reproduction(preset):
    t0 = time.perf_counter()
    cfg = RunConfig(Path(os.environ["CNRNN_VISTEX_ROOT"]), PRESETS[preset], tile=(128, 128),
                    threads=os.cpu_count() or 1)
    rep = cmd_benchmark(cfg)
    target = VISTEX_TARGETS[preset]
    report(7, f"Vistex reproduction {preset}", abs(rep.accuracy - target) <= 1.5,
           f"accuracy={rep.accuracy:.2f}% vs target {target:.2f}% +/- 1.5", time.perf_counter() - t0, None)


def test_criterion_8_loocv_harness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    X = np.vstack([rng.normal(0, 1, (15, 3)), rng.normal(12, 1, (15, 3))])
    y = np.repeat([0, 1], 15)
    sep = loocv(X, y).accuracy
    accs = []
    for seed in range(20):
        r = np.random.default_rng(1000 + seed)
        accs.append(loocv(r.normal(size=(40, 2)), r.permutation(np.repeat([0, 1], 20))).accuracy)
    mean = float(np.mean(accs))
    report(8, "LOOCV separable and shuffled-label sets", sep == 100.0 and 35.0 <= mean <= 65.0,
           f"separable={sep:.2f}%, shuffled mean over 20 seeds={mean:.2f}% (50 +/- 15)",
           time.perf_counter() - t0, 30)


if __name__ == "__main__":
    import sys
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_") or name.endswith("vistex_reproduction"):
            continue
        try:
            if name.endswith("benchmark"):
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    if "CNRNN_VISTEX_ROOT" in os.environ:
        for preset in sorted(VISTEX_TARGETS):
            try:
                test_criterion_7_vistex_reproduction(preset)
            except AssertionError:
                failed += 1
    else:
        print("[SKIP] criterion 7: Vistex reproduction -- set CNRNN_VISTEX_ROOT to run")
    sys.exit(1 if failed else 0)
