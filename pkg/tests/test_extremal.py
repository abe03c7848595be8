import random
from fractions import Fraction as F

import pytest

from majlab.errors import NoApplicablePattern, NotMajorized, PreconditionError
from majlab.extremal import (
    Pattern,
    Verdict,
    extreme_point_check,
    extreme_vertex_oracle,
    non_extreme_witness,
    witness_problems,
)
from majlab.forcing import WeightedFamily
from majlab.majorization import majorize
from majlab.measure import MeasureSpace, StepFunction, mu, neg_part, pos_part, trace

from _gen import averaged, random_pair


def inf_atoms(values):
    return StepFunction.on_atoms([F(v) for v in values], ambient="infinite")


def diffuse(values):
    return StepFunction(MeasureSpace.diffuse([1] * len(values), "infinite"), [F(v) for v in values])


def weighted_instance(m=6):
    fam = WeightedFamily((F(0), F(1)))
    sp = MeasureSpace.atoms([fam.weight(n) for n in range(1, m + 1)], "infinite")
    y = StepFunction(sp, [fam.y(n) for n in range(1, m + 1)])
    # the tail beyond the last atom is folded into it so the traces agree
    x = StepFunction(sp, [fam.x(k) for k in range(1, m)] + [fam.y(m) * (m - 1) / m])
    return x, y


def test_equal_functions_are_extreme():
    x = inf_atoms([3, 1, -2])
    r = extreme_point_check(x, x)
    assert r.extreme and r.failing_level is None
    with pytest.raises(PreconditionError):
        non_extreme_witness(x, x, r)


def test_diffuse_spreading_is_not_extreme():
    r = extreme_point_check(diffuse([1, 1]), diffuse([2]))
    assert not r.extreme
    f = r.failing_level
    assert f.level == 1 and f.verdict is Verdict.FAILS and "diffuse" in f.reason


def test_diffuse_split_witness_example():
    x, y = diffuse([1, 1]), diffuse([2])
    w = non_extreme_witness(x, y, pattern="DiffuseSplit")
    assert w.pattern is Pattern.DIFFUSE_SPLIT and w.delta == F(1, 4)
    assert w.x1.values == (F(5, 4), F(3, 4), F(1))
    assert w.x2.values == (F(3, 4), F(5, 4), F(1))
    assert witness_problems(w, x, y) == []


def test_four_level_witness_example():
    x, y = inf_atoms([4, 3, 2, 1]), inf_atoms([6, 4, 2, -2])
    assert majorize(x, y)
    w = non_extreme_witness(x, y, pattern=Pattern.FOUR_LEVEL)
    assert w.delta == F(1, 4)
    u = (w.x1 - x).scale(1 / w.delta)
    # mass moves between the two middle levels
    assert u.values == (0, 1, -1, 0)
    assert witness_problems(w, x, y) == []


def test_four_level_needs_the_slack_hypothesis():
    with pytest.raises(NoApplicablePattern):
        non_extreme_witness(inf_atoms([4, 3, 2, 1]), inf_atoms([10, 0, 0, 0]), pattern="FourLevel")


def test_outside_support_uses_ambient_room():
    x, y = inf_atoms([1, -1]), inf_atoms([2, -2])
    assert trace(pos_part(x)) < trace(pos_part(y))
    w = non_extreme_witness(x, y, pattern="OutsideSupport")
    assert any(cid.startswith("amb/") for cid in w.x1.space.ids)
    assert witness_problems(w, x, y) == []


def test_weighted_instance_is_extreme():
    x, y = weighted_instance()
    r = extreme_point_check(x, y)
    assert r.extreme
    kinds = {v.verdict for v in r.per_level}
    assert Verdict.ATOM_WITH_INTEGRAL_CONDITION in kinds


def test_preconditions():
    with pytest.raises(PreconditionError):
        extreme_point_check(StepFunction.on_atoms([1]), StepFunction.on_atoms([1]))
    with pytest.raises(NotMajorized):
        extreme_point_check(inf_atoms([3, 0]), inf_atoms([2, 1]))


def test_nonatomic_extreme_iff_scales_match():
    rng = random.Random(1)
    seen = {True: 0, False: 0}
    for _ in range(300):
        x, y = random_pair(rng, ambient="infinite", kinds=("diffuse",))
        if not majorize(x, y):
            continue
        r = extreme_point_check(x, y)
        same = mu(pos_part(x)) == mu(pos_part(y)) and mu(neg_part(x)) == mu(neg_part(y))
        assert r.extreme == same
        seen[same] += 1
    assert min(seen.values()) > 10


def test_extreme_points_carry_equal_masses():
    rng = random.Random(2)
    for _ in range(300):
        x, y = random_pair(rng, ambient="infinite")
        if not majorize(x, y):
            continue
        if extreme_point_check(x, y).extreme:
            assert trace(pos_part(x)) == trace(pos_part(y))
            assert trace(neg_part(x)) == trace(neg_part(y))
        elif trace(pos_part(x)) < trace(pos_part(y)):
            w = non_extreme_witness(x, y, pattern="OutsideSupport")
            assert witness_problems(w, x, y) == []


def _equal_atom_pair(rng, n):
    sp = MeasureSpace.atoms([1] * n, "infinite")
    y = StepFunction(sp, [F(rng.randint(-3, 3)) for _ in range(n)])
    x = StepFunction(sp, [F(rng.randint(-3, 3), rng.choice([1, 2])) for _ in range(n)])
    return x, y


def test_check_agrees_with_vertex_oracle_small():
    rng = random.Random(3)
    done = 0
    while done < 60:
        x, y = _equal_atom_pair(rng, rng.randint(1, 3))
        if not majorize(x, y):
            x = y if rng.random() < 0.3 else averaged(rng, y)
        assert extreme_point_check(x, y).extreme == extreme_vertex_oracle(x, y)
        done += 1


def test_vertex_oracle_known_cases():
    assert extreme_vertex_oracle(inf_atoms([2, 0]), inf_atoms([2, 0]))
    assert not extreme_vertex_oracle(inf_atoms([1, 1]), inf_atoms([2, 0]))


def test_random_witnesses_are_valid():
    rng = random.Random(4)
    emitted = 0
    for _ in range(300):
        x, y = random_pair(rng, ambient="infinite")
        if not majorize(x, y):
            continue
        r = extreme_point_check(x, y)
        if r.extreme:
            continue
        try:
            w = non_extreme_witness(x, y, r)
        except NoApplicablePattern:
            continue
        assert witness_problems(w, x, y) == []
        emitted += 1
    assert emitted > 50
