import random
from fractions import Fraction as F

import pytest

from majlab.errors import NotMajorized, PreconditionError
from majlab.infinite import PAD_PREFIX, block_functions, block_transfer, partition_decompose, partition_problems
from majlab.majorization import majorize
from majlab.measure import MeasureSpace, StepFunction, neg_part, pos_part, trace
from majlab.transfer import verify_transfer

from _gen import averaged, random_pair, spread_pair


def diffuse(values, weights=None):
    weights = weights or [1] * len(values)
    return StepFunction(MeasureSpace.diffuse(weights, "infinite"), [F(v) for v in values])


def test_identity_pair_gives_one_block_per_cell():
    x = StepFunction.on_atoms([3, 1, -2, 1], ambient="infinite")
    blocks = partition_decompose(x, x)
    assert len(blocks) == 4
    assert partition_problems(x, x, blocks) == []
    assert all(not s.cell_id.startswith(PAD_PREFIX) for b in blocks for s in b.a_cells + b.b_cells)


def test_diffuse_spreading_example():
    y = diffuse([2])
    x = diffuse([1, 1])
    blocks = partition_decompose(x, y)
    assert len(blocks) == 1
    (b,) = blocks
    assert b.block_measure == 2
    assert [(s.cell_id, s.weight) for s in b.a_cells] == [("d1", 1), ("pad/A1", 1)]
    assert [(s.cell_id, s.weight) for s in b.b_cells] == [("d1", 1), ("d2", 1)]
    xb, ya = block_functions(b, x, y)
    # Lorenz sums by hand: x|B = (1, 1), y|A = (2, 0)
    assert xb.values == (1, 1) and ya.values == (2, 0)
    assert majorize(xb, ya)
    assert block_transfer(x, y).maps_to(x, y)


def test_mixed_sign_surplus_goes_to_a_remainder_block():
    y = StepFunction.on_atoms([2, -2], ambient="infinite")
    x = StepFunction.on_atoms([1, -1], ambient="infinite")
    assert trace(pos_part(y)) - trace(pos_part(x)) == 1
    assert trace(neg_part(y)) - trace(neg_part(x)) == 1
    blocks = partition_decompose(x, y)
    assert len(blocks) == 1
    b = blocks[0]
    # the balance equation inside the remainder block: equal traces on both sides
    xb, ya = block_functions(b, x, y)
    assert trace(xb) == trace(ya) == 0
    assert partition_problems(x, y, blocks) == []
    bt = block_transfer(x, y)
    assert bt.maps_to(x, y)


def test_partition_needs_majorization_and_infinite_ambient():
    with pytest.raises(NotMajorized):
        partition_decompose(diffuse([1, 1]), diffuse([1, 0]))
    with pytest.raises(PreconditionError):
        partition_decompose(StepFunction.on_atoms([1]), StepFunction.on_atoms([1]))


def test_random_partitions_are_sound():
    rng = random.Random(1)
    done = 0
    for k in range(300):
        x, y = spread_pair(rng) if k % 3 == 0 else random_pair(rng, ambient="infinite")
        if not majorize(x, y):
            continue
        blocks = partition_decompose(x, y)
        assert partition_problems(x, y, blocks) == []
        bt = block_transfer(x, y)
        assert all(verify_transfer(a) == [] for _, a in bt.blocks)
        assert bt.maps_to(x, y)
        done += 1
    assert done > 100


def test_partition_problems_catches_a_broken_block():
    y = diffuse([2])
    x = diffuse([1, 1])
    (b,) = partition_decompose(x, y)
    broken = type(b)(b.a_cells, b.b_cells[:1], b.block_measure)
    assert partition_problems(x, y, [broken])


def test_geometric_truncation_has_a_block_transfer():
    n = 10
    sp = MeasureSpace.atoms([1] * (n + 1), "infinite")
    y = StepFunction(sp, [F(0)] + [F(1, 2**k) for k in range(n)])
    x = StepFunction(sp, [F(1, 2**k) for k in range(n)] + [F(0)])
    bt = block_transfer(x, y)
    assert bt.maps_to(x, y)


def test_averaged_pairs_with_atoms_keep_atoms_whole():
    rng = random.Random(2)
    for _ in range(100):
        _, y = random_pair(rng, ambient="infinite", kinds=("atom",))
        x = averaged(rng, y)
        blocks = partition_decompose(x, y)
        assert not any("split" in p for p in partition_problems(x, y, blocks))
