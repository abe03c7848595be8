"""Acceptance criteria 1-9, one test each, each printing a PASS/FAIL line."""

import random
import time
from fractions import Fraction as F

import numpy as np

from majlab.errors import NoApplicablePattern
from majlab.extremal import extreme_point_check, extreme_vertex_oracle, non_extreme_witness, witness_problems
from majlab.forcing import ForcedInfeasible, WeightedFamily, hiai_forcing
from majlab.hermitian import SpectralPresentation, au_suite, construct_hermitian_transfer, frobenius_distance
from majlab.infinite import block_transfer, partition_decompose, partition_problems
from majlab.majorization import convex_trace, cut_criterion, hinge_suite, hull_membership_oracle, majorize
from majlab.measure import MeasureSpace, PiecewiseLinearConvex, StepFunction, mu, neg_part, pos_part
from majlab.transfer import apply_transfer, birkhoff_decompose, build_transfer, verify_transfer

from _gen import averaged, integer_pair, random_ds_map, random_pair, random_space, random_values


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def unit_atoms(values, ambient="finite"):
    return StepFunction.on_atoms([F(v) for v in values], ambient=ambient)


def criterion_one_pairs():
    rng = random.Random(101)
    return [integer_pair(rng, rng.randint(1, 6)) for _ in range(500)]


def random_convex(rng, anchored):
    k = rng.randint(0, 3)
    bps = sorted({F(rng.randint(-8, 8), rng.choice([1, 2, 3])) for _ in range(k)})
    slopes = sorted(F(rng.randint(-4, 4), rng.choice([1, 2])) for _ in range(len(bps) + 1))
    f0 = F(0) if anchored else F(rng.randint(-3, 3))
    return PiecewiseLinearConvex(tuple(bps), tuple(slopes), f0)


def test_criterion_1_hull_equivalence(capsys):
    t0 = time.perf_counter()
    mismatches, holds = 0, 0
    for xs, ys in criterion_one_pairs():
        x, y = unit_atoms(xs), unit_atoms(ys)
        m = bool(majorize(x, y))
        h = hull_membership_oracle(x, y)
        mismatches += m != h
        holds += m
    elapsed = time.perf_counter() - t0
    report(capsys, 1, mismatches == 0 and elapsed < 60,
           f"500 integer pairs, {holds} majorized, {mismatches} disagreements, {elapsed:.1f}s")


def test_criterion_2_criterion_equivalences(capsys):
    rng = random.Random(102)
    mismatches = trace_failures = majorized = 0
    for _ in range(500):
        x, y = random_pair(rng)
        a, b, c = bool(majorize(x, y)), bool(cut_criterion(x, y)), bool(hinge_suite(x, y))
        mismatches += not (a == b == c)
        if a:
            majorized += 1
            for _ in range(100):
                trace_failures += not convex_trace(x, y, random_convex(rng, x.space.infinite))
    report(capsys, 2, mismatches == 0 and trace_failures == 0,
           f"500 pairs, {majorized} majorized, {mismatches} criterion disagreements, "
           f"{trace_failures} convex-trace failures over {100 * majorized} functions")


def test_criterion_3_transfer_soundness(capsys):
    pairs = [(unit_atoms(xs), unit_atoms(ys)) for xs, ys in criterion_one_pairs()]
    pairs = [(x, y) for x, y in pairs if majorize(x, y)]
    rng = random.Random(103)
    weighted = 0
    while weighted < 200:
        x, y = random_pair(rng, ambient="finite")
        if majorize(x, y):
            pairs.append((x, y))
            weighted += 1
    bad = 0
    for x, y in pairs:
        c = build_transfer(x, y)
        ok = verify_transfer(c.map) == [] and apply_transfer(c.map, y) == x and len(c.chain) <= c.slots - 1
        bad += not ok
    report(capsys, 3, bad == 0, f"{len(pairs)} majorized pairs ({weighted} weighted), {bad} failures")


def test_criterion_4_orbit_contraction(capsys):
    rng = random.Random(104)
    bad = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        sp = random_space(rng, n, "finite")
        a = random_ds_map(rng, sp, sp)
        y = StepFunction(sp, random_values(rng, n))
        bad += verify_transfer(a) != [] or not majorize(apply_transfer(a, y), y)
    report(capsys, 4, bad == 0, f"200 random maps, {bad} failures")


def test_criterion_5_birkhoff(capsys):
    maps = []
    for xs, ys in criterion_one_pairs():
        x, y = unit_atoms(xs), unit_atoms(ys)
        if majorize(x, y):
            maps.append(build_transfer(x, y).map)
    bad = 0
    for a in maps:
        n = len(a.domain)
        d = birkhoff_decompose(a)
        ok = sum(c for c, _ in d.terms) == 1 and len(d.terms) <= (n - 1) ** 2 + 1
        ok = ok and d.recompose(n) == [list(r) for r in a.entries]
        bad += not ok
    report(capsys, 5, bad == 0 and len(maps) > 100, f"{len(maps)} constructed maps, {bad} failures")


def _geometric(n):
    sp = MeasureSpace.atoms([1] * (n + 1), "infinite")
    y = StepFunction(sp, [F(0)] + [F(1, 2**k) for k in range(n)])
    x = StepFunction(sp, [F(1, 2**k) for k in range(n)] + [F(0)])
    return x, y


def _weighted(m):
    fam = WeightedFamily((F(0), F(1)))
    sp = MeasureSpace.atoms([fam.weight(n) for n in range(1, m + 1)], "infinite")
    y = StepFunction(sp, [fam.y(n) for n in range(1, m + 1)])
    x = StepFunction(sp, [fam.x(k) for k in range(1, m)] + [fam.y(m) * (m - 1) / m])
    return x, y


def test_criterion_6_forcing_certificates(capsys):
    problems = []
    x, y = _geometric(25)
    t0 = time.perf_counter()
    r = hiai_forcing(x, y, 25)
    t_geo = time.perf_counter() - t0
    if not isinstance(r, ForcedInfeasible):
        problems.append("geometric data not certified")
    else:
        for row in r.certificate.forced_rows:
            if [(e.column, e.value) for e in row.entries if e.value] != [(row.row + 1, 1)]:
                problems.append(f"geometric row {row.row} off the superdiagonal")
        if r.certificate.contradiction.index != 1:
            problems.append("starved column is not column 1")

    x, y = _weighted(6)
    t0 = time.perf_counter()
    r = hiai_forcing(x, y, 25)
    t_w = time.perf_counter() - t0
    w = lambda n: F(n)
    if not isinstance(r, ForcedInfeasible):
        problems.append("weighted data not certified")
    else:
        rows = r.certificate.forced_rows
        expected = [[F(0), F(1)]] + [[F(0)] * (k - 1) + [(w(k) - w(1)) / w(k), w(1) / w(k)] for k in range(2, 6)]
        for k in range(5):
            if rows[k].dense(len(expected[k])) != expected[k]:
                problems.append(f"weighted row {k + 1} differs from the closed form")

    for name, (tx, ty) in (("geometric", _geometric(10)), ("weighted", _weighted(6))):
        if not block_transfer(tx, ty).maps_to(tx, ty):
            problems.append(f"block transfer failed on the {name} truncation")
    if max(t_geo, t_w) >= 1:
        problems.append("forcing took 1 s or more")
    report(capsys, 6, not problems,
           f"geometric {t_geo:.2f}s, weighted {t_w:.2f}s; " + ("; ".join(problems) or "certificates and block transfers ok"))


def test_criterion_7_partition_blocks(capsys):
    rng = random.Random(107)
    done = bad = 0
    while done < 200:
        x, y = random_pair(rng, ambient="infinite")
        if not majorize(x, y):
            continue
        done += 1
        blocks = partition_decompose(x, y)
        bad += bool(partition_problems(x, y, blocks)) or not block_transfer(x, y).maps_to(x, y)
    report(capsys, 7, bad == 0, f"200 infinite-ambient pairs, {bad} failures")


def _equal_atom_case(rng):
    n = rng.randint(1, 5)
    sp = MeasureSpace.atoms([1] * n, "infinite")
    y = StepFunction(sp, [F(rng.randint(-3, 3)) for _ in range(n)])
    r = rng.random()
    if r < 0.3:
        vals = list(y.values)
        rng.shuffle(vals)
        x = StepFunction(sp, vals)
    elif r < 0.85:
        x = averaged(rng, y)
    else:
        # shrink every value toward zero, keeping the trace on one atom
        vals = [v / 2 for v in y.values]
        vals[0] += sum(y.values) - sum(vals)
        x = StepFunction(sp, vals)
    return x, y


def test_criterion_8_extreme_points(capsys):
    problems = []
    rng = random.Random(108)
    done = 0
    while done < 200:
        x, y = random_pair(rng, ambient="infinite", kinds=("diffuse",))
        if not majorize(x, y):
            continue
        done += 1
        same = mu(pos_part(x)) == mu(pos_part(y)) and mu(neg_part(x)) == mu(neg_part(y))
        if extreme_point_check(x, y).extreme != same:
            problems.append("(a) nonatomic mismatch")
    x, y = _weighted(6)
    if not extreme_point_check(x, y).extreme:
        problems.append("(b) truncated instance not judged extreme")
    done = extremes = 0
    while done < 300:
        x, y = _equal_atom_case(rng)
        if not majorize(x, y):
            continue
        done += 1
        e = extreme_point_check(x, y).extreme
        extremes += e
        if e != extreme_vertex_oracle(x, y):
            problems.append("(c) oracle disagreement")
    emitted = 0
    for _ in range(300):
        x, y = random_pair(rng, ambient="infinite")
        if not majorize(x, y) or extreme_point_check(x, y).extreme:
            continue
        try:
            w = non_extreme_witness(x, y)
        except NoApplicablePattern:
            continue
        emitted += 1
        if witness_problems(w, x, y):
            problems.append("(d) invalid witness")
    report(capsys, 8, not problems and emitted > 0,
           f"(c) 300 equal-atom cases with {extremes} extreme, (d) {emitted} witnesses; "
           + ("; ".join(sorted(set(problems))) or "all parts agree"))


def _random_exact(rng, n, eigs):
    basis = list(range(n))
    rng.shuffle(basis)
    return SpectralPresentation.from_eigs(eigs, basis=basis, signs=[rng.choice([1, -1]) for _ in range(n)])


def _random_unitary(g, n):
    z = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_criterion_9_hermitian_suite(capsys):
    rng = random.Random(109)
    disagreements = holds = 0
    for _ in range(200):
        ye = [F(rng.randint(-4, 4), rng.choice([1, 2])) for _ in range(4)]
        if rng.random() < 0.5:
            xe = list(averaged(rng, unit_atoms(ye)).values)
        else:
            xe = [F(rng.randint(-4, 4), rng.choice([1, 2])) for _ in range(4)]
        r = au_suite(_random_exact(rng, 4, xe), _random_exact(rng, 4, ye))
        disagreements += not r.agree
        holds += r.eigen_majorization

    g = np.random.default_rng(109)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(g.integers(2, 7))
        ys = g.normal(size=n)
        weights = g.dirichlet(np.ones(3))
        derived = sum(wk * np.eye(n)[g.permutation(n)] for wk in weights)
        xs = derived @ ys
        uy, ux = _random_unitary(g, n), _random_unitary(g, n)
        y = SpectralPresentation.from_matrix(uy @ np.diag(ys) @ uy.conj().T)
        x = SpectralPresentation.from_matrix(ux @ np.diag(xs) @ ux.conj().T)
        phi = construct_hermitian_transfer(x, y)
        worst = max(worst, frobenius_distance(phi.apply(y.matrix()), x.matrix()))
    elapsed = time.perf_counter() - t0
    report(capsys, 9, disagreements == 0 and worst <= 1e-8 and elapsed < 30,
           f"exact 200 cases ({holds} majorized), {disagreements} disagreements; "
           f"numeric 100 cases, worst Frobenius error {worst:.2e}, {elapsed:.2f}s")
