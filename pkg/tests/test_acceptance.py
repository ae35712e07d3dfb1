"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import random
import time

import pytest

from embedcert import embed_bs as bs
from embedcert import embed_hvm as hvm
from embedcert.cli import main, random_values
from embedcert.fitting import loglog_fit
from embedcert.presentations import TraceBuilder, conjugate_product_word, same_relators, to_conjugate_product, verify_trace
from embedcert.smachine import build_machine_for_law, machine_to_presentation, main_property_check
from embedcert.verbal import superadditivity_check, verbal_dehn_estimate, witness_verify
from embedcert.words import free_reduce, invert, parse_law, reduced_words, substitute

pytestmark = pytest.mark.slow

CUBE = parse_law("x1^3")
COMM = parse_law("[x1,x2]")


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


def sound(trace):
    verify_trace(trace)
    if trace.end:
        return False
    return conjugate_product_word(trace.presentation, to_conjugate_product(trace)) == free_reduce(trace.start)


def test_c01_main_property(report):
    details, ok = [], True
    for law, m, bound in ((CUBE, 2, 6), (COMM, 1, 8)):
        t0 = time.perf_counter()
        rep = main_property_check(law, m, bound)
        dt = time.perf_counter() - t0
        ok &= rep.ok and dt <= 120
        details.append(f"{law} m={m} tape<={bound}: {rep.checked} words, {len(rep.mismatches)} mismatches, {dt:.1f}s")
    report(1, ok, "; ".join(details))


def test_c02_presentation_coincidence(report):
    results = []
    for law in (CUBE, COMM):
        for m in (1, 2):
            pres = machine_to_presentation(build_machine_for_law(law, m), 29)
            results.append(same_relators(pres, hvm.gen_G(hvm.HvmParams(law, m, 29))))
    report(2, all(results), f"{sum(results)}/4 (law, m) combinations coincide")


def test_c03_certificate_soundness(report):
    rng = random.Random(3)
    counts, failures = {}, []

    def run(name, trace):
        counts[name] = counts.get(name, 0) + 1
        if not sound_or_lambda(trace):
            failures.append(name)

    def sound_or_lambda(trace):
        if not trace.end:
            return sound(trace)
        # close start.end^-1 to the empty word so the reconstruction applies
        b = TraceBuilder(trace.presentation, trace.start + invert(trace.end))
        b.run(trace, 0)
        b.reduce()
        return sound(b.finish())

    for law in (CUBE, COMM):
        p = hvm.HvmParams(law, 2)
        for total in range(0, 17, 2):
            X = random_values(rng, p.k, p.m, total)
            for ell in range(1, p.k + 1):
                for j in (1, 2):
                    for d in "+-":
                        t = hvm.derive_conj_step(p, (j, ell), d, X)
                        # the end word is a Lambda word; close it off through the reverse read
                        run("conj_step", t)
            run("sigma_trivial", hvm.derive_sigma_trivial(p, X))
            run("d_conjugation", hvm.derive_d_conjugation(p, X))
        for total in range(0, 9, 2):
            X = random_values(rng, p.k, p.m, total)
            run("law_instance", hvm.derive_law_instance(p, tuple(p.a_to_b(x) for x in X)))
    q = bs.BsParams(2)
    for n in range(17):
        run("sigma_s", bs.derive_sigma_s(q, n))
        run("wn", bs.derive_wn(q, n))
    for s1 in range(0, 17, 4):
        for s2 in range(0, 17, 4):
            for e1 in (1, -1):
                for e2 in (1, -1):
                    run("commutator", bs.derive_commutator(q, s1, e1, s2, e2))
    for i in range(40):
        w = bs.random_trivial_word(q, 16, random.Random(i))
        run("bs_trivial", bs.derive_bs_trivial(q, w))
    detail = ", ".join(f"{k}={v}" for k, v in counts.items()) + f"; failures={len(failures)}"
    report(3, not failures and len(counts) == 8, detail)


def test_c04_sigma_quadratic(report):
    p = hvm.HvmParams(CUBE, 2)
    Ls = list(range(4, 41, 4))
    areas = []
    for L in Ls:
        X = random_values(random.Random(f"c04:{L}"), p.k, p.m, L)
        t = hvm.derive_sigma_trivial(p, X)
        verify_trace(t)
        areas.append(t.area)
    fit = loglog_fit(Ls, areas)
    ok = fit.slope <= 2.2 and fit.r2 >= 0.98
    report(4, ok, f"slope {fit.slope:.3f} (<= 2.2), R2 {fit.r2:.4f} (>= 0.98), areas {areas[0]}..{areas[-1]}")


def test_c05_wn_quadratic(report):
    p = bs.BsParams(2)
    t0 = time.perf_counter()
    ns = [16, 24, 32, 48, 64, 96, 128]
    areas = {}
    for n in ns:
        t = bs.derive_wn(p, n)
        verify_trace(t)
        areas[n] = t.area
    fit = loglog_fit(ns, [areas[n] for n in ns])
    ratios = [areas[2 * n] / areas[n] for n in (16, 32, 64)]
    dt = time.perf_counter() - t0
    ok = 1.8 <= fit.slope <= 2.2 and fit.r2 >= 0.98 and all(3.2 <= r <= 4.8 for r in ratios) and dt <= 300
    report(5, ok, f"slope {fit.slope:.3f}, R2 {fit.r2:.4f}, ratios {[round(r, 3) for r in ratios]}, {dt:.1f}s")


def test_c06_bs_quartic(report):
    p = bs.BsParams(2)
    t0 = time.perf_counter()
    rng = random.Random(2024)
    ns, areas, bad = [], [], 0
    for _ in range(200):
        w = bs.random_trivial_word(p, rng.randint(8, 64), rng)
        t = bs.derive_bs_trivial(p, w)
        try:
            verify_trace(t)
        except Exception:
            bad += 1
        ns.append(len(w))
        areas.append(t.area)
    fit = loglog_fit(ns, areas)
    dt = time.perf_counter() - t0
    ok = bad == 0 and max(ns) <= 64 and fit.slope <= 4.2 and dt <= 900
    report(6, ok, f"200 words, {bad} failures, lengths {min(ns)}..{max(ns)}, degree {fit.slope:.3f} (<= 4.2), "
                  f"{dt:.1f}s")


def test_c07_oracles(report):
    t0 = time.perf_counter()
    disagree, checked = 0, 0
    for k in (2, 3):
        p = bs.BsParams(k)
        m = {1: p.b1, 2: p.b2}
        for n in range(11):
            for w in reduced_words(2, n):
                w = tuple(m[abs(x)] * (1 if x > 0 else -1) for x in w)
                checked += 1
                disagree += bs.oracle_affine(p, w) != bs.oracle_britton(p, w).verdict
    rng = random.Random(7)
    for i in range(10_000):
        p = bs.BsParams(2 + i % 2)
        w = free_reduce(rng.choice((p.b1, -p.b1, p.b2, -p.b2)) for _ in range(rng.randint(0, 40)))
        checked += 1
        disagree += bs.oracle_affine(p, w) != bs.oracle_britton(p, w).verdict
    dt = time.perf_counter() - t0
    report(7, disagree == 0 and dt <= 600, f"{checked} words, {disagree} disagreements, {dt:.1f}s")


def test_c08_law_redundancy(report):
    p = hvm.HvmParams(CUBE, 1)
    H = hvm.gen_H(p)
    no_215 = not any(tag.startswith("2.15") for _, tag in H.relators)
    results = []
    for t in range(1, 6):
        Y = ((p.b(1),) * t,)
        tr = hvm.derive_law_instance(p, Y)
        ok = tr.presentation == H and tr.start == (p.b(1),) * (3 * t) == substitute(CUBE, Y) and sound(tr)
        results.append((t, tr.area, ok))
    report(8, no_215 and all(r[2] for r in results),
           f"no 2.15 relators: {no_215}; areas {[(t, a) for t, a, _ in results]}")


def disjoint_pairs():
    left = [(), (1, 2, -1, -2), (2, 1, -2, -1), (1, 1, 2, -1, -1, -2), (1, 2, 2, -1, -2, -2), (1, 2, 1, -2, -1, -1)]
    right = [(), (3, 4, -3, -4), (4, 3, -4, -3), (3, 3, 4, -3, -3, -4), (3, 4, -3, 4, 3, -4, -3, -4)]
    return [(a, b) for a in left for b in right if a or b]


def test_c09_verbal_table(report):
    t0 = time.perf_counter()
    table = verbal_dehn_estimate(COMM, 6)
    fh = [r.fhat for r in table.rows]
    exact = all(r.exact for r in table.rows)
    monotone = fh == sorted(fh)
    wit_ok = all(witness_verify(w, wit)[0] for w, wit in table.witnesses.items())
    pairs = disjoint_pairs()
    sup = [superadditivity_check(COMM, a, b) for a, b in pairs]
    sup_ok = sum(r.ok for r in sup)
    dt = time.perf_counter() - t0
    ok = exact and monotone and fh[4] == 2 and wit_ok and sup_ok == len(pairs) >= 20 and dt <= 600
    report(9, ok, f"fhat {fh}, exact {exact}, {len(table.witnesses)} witnesses verified {wit_ok}, "
                  f"superadditivity {sup_ok}/{len(pairs)}, {dt:.1f}s")


def test_c10_schema_counts(report):
    combos = []
    for law in ("x1^3", "[x1,x2]", "x1^2 x2^-1 x1 x2"):
        for m in (1, 2):
            p = hvm.HvmParams(parse_law(law), m, 29 if m == 1 or law != "[x1,x2]" else 31)
            c = hvm.count_schema(p)
            G, H = hvm.gen_G(p), hvm.gen_H(p)
            combos.append((f"{law}/m={m}/N={p.N}", (len(H.alphabet), len(H.relators)),
                           c["G"] == {"generators": len(G.alphabet), "relatorsByTag": G.tags()}
                           and c["H"] == {"generators": len(H.alphabet), "relatorsByTag": H.tags()}))
    p = hvm.HvmParams(CUBE, 3, 40)
    c = hvm.count_schema(p)
    combos.append(("x1^3/m=3/N=40", (len(hvm.gen_H(p).alphabet), len(hvm.gen_H(p).relators)),
                   c["H"] == {"generators": len(hvm.gen_H(p).alphabet), "relatorsByTag": hvm.gen_H(p).tags()}))
    for k, N in ((2, 29), (3, 29), (2, 35), (5, 30), (4, 29)):
        q = bs.BsParams(k, N)
        c = bs.count_schema(q)
        G, H = bs.gen_G_bs(q), bs.gen_H_bs(q)
        combos.append((f"bs k={k}/N={N}", (len(H.alphabet), len(H.relators)),
                       c["G"] == {"generators": len(G.alphabet), "relatorsByTag": G.tags()}
                       and c["H"] == {"generators": len(H.alphabet), "relatorsByTag": H.tags()}))
    named = {name: hv for name, hv, _ in combos}
    ok = (len(combos) == 12 and all(c[2] for c in combos) and named["x1^3/m=2/N=29"] == (41, 124)
          and named["bs k=2/N=29"] == (41, 88))
    report(10, ok, f"{sum(c[2] for c in combos)}/{len(combos)} combinations match; x1^3/m=2/N=29 -> "
                   f"{named['x1^3/m=2/N=29']}, bs k=2/N=29 -> {named['bs k=2/N=29']}")


def test_c11_determinism(report, tmp_path, capsys):
    same = []
    for fam, extra in (("bs-random-trivial", ["--count", "3"]), ("sigma_hvm", ["--m", "2"]),
                       ("law-instance", ["--law", "[x1,x2]", "--m", "2"])):
        outs = []
        for i in range(2):
            path = tmp_path / f"{fam}{i}.csv"
            code = main(["measure", fam, "--nmin", "8", "--nmax", "20", "--step", "4", "--seed", "99",
                         "--out", str(path)] + extra)
            assert code == 0
            outs.append(path.read_bytes())
        same.append(outs[0] == outs[1])
    capsys.readouterr()
    report(11, all(same), f"{sum(same)}/{len(same)} families byte-identical across two seeded runs")
