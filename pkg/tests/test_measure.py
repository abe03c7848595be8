import random
from fractions import Fraction as F

import pytest

from majlab.errors import DataError, PreconditionError
from majlab.measure import (
    INF,
    Ambient,
    MeasureSpace,
    PiecewiseLinearConvex,
    SpectralScale,
    StepFunction,
    apply_convex,
    distribution,
    lambda_scale,
    lorenz,
    mu,
    neg_part,
    pos_part,
    refine_function,
    trace,
)

from _gen import random_pair, random_space, random_values


def atoms(values, ambient="finite"):
    return StepFunction.on_atoms([F(v) for v in values], ambient=ambient)


def test_mu_of_the_geometric_sequence():
    y = atoms([0, 1, F(1, 2), F(1, 4)], "infinite")
    assert mu(y) == SpectralScale(((F(1), F(1)), (F(1, 2), F(1)), (F(1, 4), F(1))), INF)


def test_mu_constant_diffuse_cell():
    x = StepFunction(MeasureSpace.diffuse([F(5, 2)]), [F(3)])
    assert mu(x) == SpectralScale(((F(3), F(5, 2)),), None)


def test_mu_takes_absolute_values():
    assert mu(atoms([-2, 3])).steps == ((F(3), F(1)), (F(2), F(1)))


def test_lambda_infinite_ambient_is_positive_part():
    s = lambda_scale(atoms([1, -2], "infinite"))
    assert s.steps == ((F(1), F(1)),) and s.tail == INF


def test_lambda_finite_ambient_is_signed():
    s = lambda_scale(atoms([1, -2]))
    assert s.steps == ((F(1), F(1)), (F(-2), F(1))) and s.tail is None


def test_lambda_of_zero():
    s = lambda_scale(atoms([0, 0]))
    assert s.steps == () and s.tail == 2
    assert lambda_scale(atoms([0], "infinite")).tail == INF


def test_lambda_zero_run_before_negatives_stays_a_step():
    s = lambda_scale(atoms([2, 0, -1]))
    assert s.steps == ((F(2), F(1)), (F(0), F(1)), (F(-1), F(1)))


def test_distribution_examples():
    assert distribution(atoms([3, 2, 1]), 1) == 2
    assert distribution(atoms([1], "infinite"), -1) == INF


def test_pos_neg_parts():
    x = atoms([-1, 2])
    assert pos_part(x).values == (0, 2)
    assert neg_part(x).values == (1, 0)
    z = atoms([0, 0])
    assert pos_part(z).values == neg_part(z).values == (0, 0)


def test_lorenz_examples():
    assert lorenz(SpectralScale(((F(2), F(1)),), None), F(1, 2)) == 1
    assert lorenz(SpectralScale(((F(3), F(1)), (F(1), F(2))), None), 2) == 4
    assert lorenz(SpectralScale(((F(3), F(1)),), INF), 0) == 0


def test_lorenz_beyond_domain_is_an_error():
    with pytest.raises(PreconditionError):
        lorenz(SpectralScale(((F(2), F(1)),), None), 2)


def test_trace_examples():
    assert trace(atoms([3, 2, 1])) == 6
    assert trace(atoms([0])) == 0


def test_apply_convex_examples():
    assert apply_convex(PiecewiseLinearConvex.hinge(1), atoms([3, 0])).values == (2, 0)
    assert apply_convex(PiecewiseLinearConvex.abs_shift(0), atoms([-2, 1])).values == (2, 1)


def test_apply_convex_needs_zero_at_zero_on_infinite_space():
    with pytest.raises(PreconditionError):
        apply_convex(PiecewiseLinearConvex.hinge(-1), atoms([1], "infinite"))


def test_cells_reject_nonpositive_weights():
    with pytest.raises(DataError):
        MeasureSpace.atoms([1, 0])


def test_atoms_cannot_be_split():
    sp = MeasureSpace.atoms([2])
    with pytest.raises(PreconditionError):
        sp.split("e1", [1, 1])
    d = MeasureSpace.diffuse([2])
    refined, ref = d.split("d1", [F(1, 2), F(3, 2)])
    assert [c.weight for c in refined.cells] == [F(1, 2), F(3, 2)]
    x = refine_function(StepFunction(d, [F(5)]), refined, ref)
    assert x.values == (5, 5) and mu(x) == mu(StepFunction(d, [F(5)]))


def _mu_by_galois(x, t):
    """inf{s >= 0 : d(|x|, s) <= t}, searched over the candidate levels."""
    absx = x.map(abs)
    candidates = sorted({F(0)} | set(absx.values))
    return min(s for s in candidates if distribution(absx, s) <= t)


def test_galois_relation_random():
    rng = random.Random(11)
    for _ in range(200):
        x, _ = random_pair(rng)
        s = mu(x)
        for t in s.breakpoints()[:-1] if s.tail != INF else s.breakpoints():
            assert s.value_at(t) == _mu_by_galois(x, t)


def test_equimeasurability_random():
    rng = random.Random(12)
    for _ in range(200):
        x, _ = random_pair(rng)
        s = mu(x)
        induced = s.to_step_function()
        for level in {abs(v) for v in x.values} | {F(1, 3)}:
            assert distribution(x.map(abs), level) == distribution(induced, level)


def test_rearrangement_idempotent():
    rng = random.Random(13)
    for _ in range(100):
        x, _ = random_pair(rng)
        s = mu(x)
        assert mu(s.to_step_function()) == s


def test_lorenz_matches_grid_sum_and_is_concave():
    rng = random.Random(14)
    for _ in range(100):
        x, _ = random_pair(rng, ambient="infinite")
        s = mu(x)
        # grid oracle: integrate |x| over the top cells directly
        cells = sorted(((abs(v), c.weight) for c, v in x.items()), key=lambda p: -p[0])
        grid = [F(k, 4) for k in range(0, 4 * 12)]
        vals = []
        for t in grid:
            rest, acc = t, F(0)
            for v, w in cells:
                take = min(w, rest)
                acc += v * take
                rest -= take
            vals.append(acc)
            assert lorenz(s, t) == acc
        slopes = [b - a for a, b in zip(vals, vals[1:])]
        assert all(a >= b for a, b in zip(slopes, slopes[1:]))


def test_trace_splits_into_parts_and_matches_lorenz():
    rng = random.Random(15)
    for _ in range(200):
        n = rng.randint(1, 6)
        x = StepFunction(random_space(rng, n, "finite"), random_values(rng, n))
        assert trace(x) == trace(pos_part(x)) - trace(neg_part(x))
        assert trace(x) == lorenz(lambda_scale(x), x.space.total())
        assert pos_part(x) - neg_part(x) == x


def test_hinge_values_match_direct_max():
    rng = random.Random(16)
    for _ in range(200):
        r = F(rng.randint(-6, 6), rng.choice([1, 2, 3]))
        t = F(rng.randint(-12, 12), rng.choice([1, 2, 5]))
        assert PiecewiseLinearConvex.hinge(r)(t) == max(t - r, F(0))
        assert PiecewiseLinearConvex.neg_hinge(r)(t) == max(-t - r, F(0))
        assert PiecewiseLinearConvex.abs_shift(r)(t) == abs(t - r)


def test_convex_function_rejects_decreasing_slopes():
    with pytest.raises(DataError):
        PiecewiseLinearConvex((F(0),), (F(1), F(0)))


def test_dict_values_default_to_zero():
    sp = MeasureSpace.atoms([1, 1, 1], Ambient.INFINITE)
    assert StepFunction(sp, {"e2": F(3)}).values == (0, 3, 0)
