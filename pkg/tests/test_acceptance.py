"""Acceptance battery: one test per numbered release criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one
"criterion N: PASS/FAIL" line per item (several minutes total; the
saturation and finite-length items dominate).

Two items contain clauses that fail for structural reasons rather
than implementation ones, and stay red on purpose:

* criterion 6: the C2 chain at L = 3 has a genuine density-evolution
  fixed point at 0.428394, slightly below the tail-biting threshold
  it is asked to exceed (every L >= 4 point does exceed it).
* criterion 8: the C0/C1/S1 base matrices carry GF(2) row
  dependencies in their edge-multiplicity parities, and any circulant
  assignment preserves them, so full rank at M = 50 is impossible.
  The lifts achieve exactly the structural rank floor.

The README's acceptance section carries the same analysis.
"""

import filecmp
import functools

import numpy as np
import pytest
from fractions import Fraction

from scldpc import gf2
from scldpc.channel_sim import ChannelSpec, bec_bp_unresolved, simulate
from scldpc.cli import main as cli_main
from scldpc.density_evolution import bp_threshold, de_iterate, iavg
from scldpc.lifting import export_alist, import_alist, lift
from scldpc.protograph import (
    ConstructionError,
    EnsembleSpec,
    balanced_spreading,
    construct,
    design_rate,
)

FAMILIES = ("C0", "C1", "C2", "T", "S1", "S2", "M1")


def spec36(family, L, **kw):
    return EnsembleSpec(family=family, dv=3, dc=6, L=L, omega=2, **kw)


@functools.lru_cache(maxsize=None)
def threshold(family, L, max_iter=20000):
    p = construct(spec36(family, L))
    return bp_threshold(p, max_iter=max_iter).epsilon_star


def test_criterion_01_rate_exactness():
    spots = [
        ("C0", 10, Fraction(2, 5)),
        ("C0", 20, Fraction(9, 20)),
        ("C1", 10, Fraction(9, 20)),
        ("C2", 10, Fraction(1, 2)),
        ("T", 10, Fraction(1, 2)),
        ("M1", 10, Fraction(9, 20)),
    ]
    for fam, L, want in spots:
        assert design_rate(construct(spec36(fam, L))) == want, (fam, L)
    checked = 0
    for omega in (1, 2, 3):
        spreading = None if omega == 2 else balanced_spreading(np.array([[3, 3]]), omega)
        for L in range(2, 41):
            for fam in FAMILIES:
                try:
                    spec = EnsembleSpec(
                        family=fam, dv=3, dc=6, L=L, omega=omega, spreading=spreading
                    )
                    p = construct(spec)
                except ConstructionError:
                    continue
                if fam == "C0":
                    want = Fraction(L - omega, 2 * L)
                elif fam in ("C1", "S1", "M1"):
                    want = Fraction(L - omega + spec.resolved_T, 2 * L)
                else:
                    want = Fraction(1, 2)
                assert design_rate(p) == want, (fam, L, omega)
                checked += 1
    assert checked >= 600
    print(f"criterion 1: PASS (exact rationals at {checked} grid points and 6 spot values)")


def test_criterion_02_scalar_oracle():
    worst = 0.0
    for L in (4, 10):
        p = construct(spec36("T", L))
        for eps in (0.3, 0.42, 0.45):
            state = None
            x = eps
            for _ in range(80):
                state, _ = de_iterate(p, eps, state)
                x = eps * (1.0 - (1.0 - x) ** 5) ** 2
                worst = max(worst, float(np.abs(state.x - x).max()))
    assert worst <= 1e-12
    t_star = threshold("T", 10)
    assert abs(t_star - 0.4294) <= 5e-4
    print(
        f"criterion 2: PASS (max deviation from scalar recursion {worst:.2e}, "
        f"wrap threshold {t_star:.6f})"
    )


def test_criterion_03_saturation():
    sat = threshold("C0", 100, 60000)
    assert abs(sat - 0.4881) <= 5e-4, sat
    details = [f"C0(100)={sat:.6f}"]
    for fam in ("C1", "S1", "M1"):
        t = threshold(fam, 30)
        assert abs(t - 0.4881) <= 5e-4, (fam, t)
        details.append(f"{fam}(30)={t:.6f}")
    print(f"criterion 3: PASS ({', '.join(details)}, all within 5e-4 of 0.4881)")


def test_criterion_04_termination_orderings():
    for L in (5, 10, 20):
        lo = threshold("C0", 2 * L)
        mid = threshold("C1", L)
        hi = threshold("C0", L)
        assert lo <= mid + 1e-9, (L, lo, mid)
        assert mid <= hi + 1e-9, (L, mid, hi)
    for L in (5, 10, 20):
        p0 = construct(spec36("C0", L))
        p1 = construct(spec36("C1", L))
        s0 = s1 = None
        for it in range(1, 101):
            s0, pv0 = de_iterate(p0, 0.45, s0)
            s1, pv1 = de_iterate(p1, 0.45, s1)
            if it in (10, 100):
                assert np.all(pv0 <= pv1 + 1e-12), (L, it)
    print(
        "criterion 4: PASS (threshold sandwich C0(2L) <= C1(L) <= C0(L) and "
        "per-position dominance at L=5,10,20)"
    )


def test_criterion_05_connection_gains():
    for L in (5, 9, 10, 20):
        c1 = threshold("C1", L)
        assert threshold("S1", L) >= c1 - 1e-9, L
        assert threshold("M1", L) >= c1 - 1e-9, L
    s19, m19 = threshold("S1", 9), threshold("M1", 9)
    s1_note = "within" if abs(s19 - 0.4987) <= 3e-3 else "outside"
    m1_note = "within" if abs(m19 - 0.5132) <= 3e-3 else "outside"
    print(
        "criterion 5: PASS (S1, M1 never below C1 at L=5,9,10,20; report-only "
        f"targets: S1(9)={s19:.6f} {s1_note} 0.003 of 0.4987, "
        f"M1(9)={m19:.6f} {m1_note} 0.003 of 0.5132)"
    )


def test_criterion_06_wrap_termination_curves():
    t_star = threshold("T", 10)
    curves = {fam: {L: threshold(fam, L) for L in range(3, 21)} for fam in ("C2", "S2")}
    problems = []
    for fam, curve in curves.items():
        vals = [curve[L] for L in range(5, 21)]
        for L, (a, b) in enumerate(zip(vals, vals[1:]), start=5):
            if b > a + 2e-5:
                problems.append(f"{fam} increases from L={L} to L={L + 1}")
        for L, v in curve.items():
            if v <= t_star:
                problems.append(
                    f"{fam}({L})={v:.6f} does not exceed the wrap threshold {t_star:.6f}"
                )
    if problems:
        print(
            "criterion 6: FAIL (structural, expected): "
            + "; ".join(problems)
            + "; every other point exceeds the wrap threshold and both curves "
            "are non-increasing for L >= 5"
        )
    else:
        print("criterion 6: PASS (C2 and S2 exceed the wrap threshold on L=3..20, non-increasing from L=5)")
    assert not problems, problems


def test_criterion_07_iteration_complexity():
    p_ref = construct(spec36("C0", 20))
    assert iavg(p_ref, 0.0) == 1.0
    grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.45]
    vals = [iavg(p_ref, e) for e in grid]
    for a, b in zip(vals, vals[1:]):
        assert b >= a, vals
    i_m1 = iavg(construct(spec36("M1", 10)), 0.48)
    i_s1 = iavg(construct(spec36("S1", 10)), 0.48)
    i_c0 = iavg(p_ref, 0.48)
    assert i_m1 <= i_s1 <= i_c0, (i_m1, i_s1, i_c0)
    print(
        f"criterion 7: PASS (unit at eps=0, non-decreasing in eps, and at eps=0.48: "
        f"M1(10)={i_m1:.1f} <= S1(10)={i_s1:.1f} <= C0(20)={i_c0:.1f})"
    )


def test_criterion_08_lifting(tmp_path):
    deficits = {}
    for fam in ("C0", "C1", "S1", "M1"):
        p = construct(spec36(fam, 10))
        code = lift(p, M=50, seed=0, max_retries=3, allow_deficient=True)
        col_w = np.asarray(code.H.sum(axis=0)).ravel()
        row_w = np.asarray(code.H.sum(axis=1)).ravel()
        assert np.array_equal(col_w, np.repeat(p.mult.sum(axis=0), 50)), fam
        assert np.array_equal(row_w, np.repeat(p.mult.sum(axis=1), 50)), fam
        corank = p.n_cn - gf2.rank((p.mult % 2).astype(np.uint8))
        assert code.m_rows - code.rank == corank, (fam, code.rank, corank)
        if corank:
            deficits[fam] = (code.m_rows - code.rank, code.m_rows)

    c1 = lift(construct(spec36("C1", 10)), M=50, seed=0, max_retries=3, allow_deficient=True)
    path = tmp_path / "c1.alist"
    export_alist(c1, str(path))
    assert (import_alist(str(path)).H != c1.H).nnz == 0

    a = lift(construct(spec36("M1", 10)), M=50, seed=4)
    b = lift(construct(spec36("M1", 10)), M=50, seed=4)
    assert np.array_equal(a.shifts, b.shifts) and (a.H != b.H).nnz == 0
    assert a.rank == a.m_rows

    if deficits:
        detail = ", ".join(f"{f} short by {d} of {m}" for f, (d, m) in deficits.items())
        print(
            "criterion 8: FAIL (structural, expected): full rank at M=50 is "
            f"impossible for {detail}: the GF(2) dependencies among base-matrix "
            "rows (edge multiplicities mod 2) survive every circulant assignment, "
            "and each lift achieves exactly that rank floor; weights, alist "
            "round-trip, and seed determinism clauses all hold"
        )
    assert not deficits, deficits
    print("criterion 8: PASS")


def test_criterion_09_finite_length_ordering():
    lifts = {}
    for name, fam, L, M in [("S1", "S1", 10, 400), ("C0", "C0", 20, 200), ("M1", "M1", 10, 200)]:
        p = construct(EnsembleSpec(family=fam, dv=3, dc=6, L=L, omega=2))
        lifts[name] = lift(p, M=M, seed=0, certify=False)
        assert lifts[name].n == 8000

    bec = {}
    for name, code in lifts.items():
        bec[name] = simulate(
            code, ChannelSpec("BEC", 0.46),
            min_frame_errors=100, max_frames=20000, seed=11, chunk=500,
        )
        assert bec[name].frame_errors >= 100, (name, bec[name])
    for name in ("S1", "M1"):
        lo, hi = bec[name], bec["C0"]
        assert lo.ber < hi.ber, (name, lo.ber, hi.ber)
        assert lo.ber + lo.ci95_ber < hi.ber - hi.ci95_ber, (name, lo, hi)

    awgn = {}
    for name in ("C0", "M1"):
        for ebn0 in (1.2, 1.5):
            awgn[name, ebn0] = simulate(
                lifts[name], ChannelSpec("BIAWGN", ebn0, rate=0.45),
                min_frame_errors=50, max_frames=200, seed=21, max_iter=100, chunk=50,
            ).ber
    assert awgn["M1", 1.2] < 1e-3, awgn
    assert awgn["C0", 1.2] > 1e-3, awgn
    assert awgn["C0", 1.5] < 1e-3, awgn
    print(
        "criterion 9: PASS (BEC eps=0.46, n=8000: "
        f"BER S1={bec['S1'].ber:.2e}, M1={bec['M1'].ber:.2e} both below "
        f"C0={bec['C0'].ber:.2e} with non-overlapping 95% intervals; BIAWGN: "
        f"M1 is under BER 1e-3 at 1.2 dB ({awgn['M1', 1.2]:.1e}) while C0 is "
        f"not ({awgn['C0', 1.2]:.1e}) until 1.5 dB ({awgn['C0', 1.5]:.1e}))"
    )


def test_criterion_10_de_simulation_consistency():
    p = construct(spec36("T", 10))
    state = None
    for _ in range(20):
        state, p_vn = de_iterate(p, 0.40, state)
    de20 = float(p_vn.mean())

    code = lift(p, M=1000, seed=0, certify=False)
    # guard against a vacuous pass: the same pipeline must still see
    # erasures when stopped early
    probe = np.random.default_rng(777).random(code.n) < 0.40
    assert bec_bp_unresolved(code, probe, iters=5).sum() / code.n > 0.05

    fracs = []
    for f in range(40):
        rng = np.random.default_rng(777 + f)
        erased = rng.random(code.n) < 0.40
        fracs.append(bec_bp_unresolved(code, erased, iters=20).sum() / code.n)
    fracs = np.array(fracs)
    emp = float(fracs.mean())
    se = float(fracs.std(ddof=1) / np.sqrt(len(fracs)))
    assert abs(emp - de20) <= 3 * se or emp == de20, (emp, de20, se)
    print(
        f"criterion 10: PASS (iteration-20 erasure fraction: recursion {de20:.3e}, "
        f"empirical {emp:.3e} +- {se:.3e} over 40 frames at n=20000)"
    )


def test_criterion_11_cli_determinism(tmp_path):
    t4 = ["--family", "T", "--dv", "3", "--dc", "6", "-L", "4", "-w", "2"]
    runs = {
        "construct": ["construct", "--family", "C1", "--dv", "3", "--dc", "6", "-L", "10", "-w", "2"],
        "rate": ["rate", "--family", "C1", "--dv", "3", "--dc", "6", "-L", "10", "-w", "2", "--format", "csv"],
        "threshold": ["threshold", "--family", "T", "--dv", "3", "--dc", "6", "-L", "3", "-w", "2", "--tol", "1e-3"],
        "sweep": ["sweep", "--families", "T,C1", "--L-list", "3", "--dv", "3", "--dc", "6", "-w", "2", "--tol", "1e-3", "--format", "csv"],
        "iavg": ["iavg", *t4, "--epsilon", "0.3"],
        "optimize": ["optimize", "--family", "C1", "--dv", "3", "--dc", "6", "-L", "5", "-w", "2", "--granularity", "position", "--tol", "1e-3"],
        "lift": ["lift", *t4, "-M", "6"],
        "simulate": ["simulate", *t4, "-M", "6", "--no-certify", "--channel", "BEC",
                     "--params", "0.2,0.4", "--min-frame-errors", "5", "--max-frames", "40",
                     "--chunk", "8", "--format", "csv"],
    }
    for name, argv in runs.items():
        first = tmp_path / f"{name}.out"
        second = tmp_path / f"{name}.replay"
        assert cli_main([*argv, "--out", str(first)]) == 0, name
        assert cli_main([argv[0], "--config", str(first), "--out", str(second)]) == 0, name
        assert filecmp.cmp(first, second, shallow=False), name
    print(f"criterion 11: PASS ({len(runs)} subcommands replay byte-identically from their echoed configs)")
