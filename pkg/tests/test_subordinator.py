import math

import numpy as np
import pytest

from jumpcir.exceptions import InvalidParameter, OutOfHorizon
from jumpcir.model import CompoundPoisson, Constant, Exponential, ZeroLevy, bajd, levy_first_moment
from jumpcir.subordinator import JumpTrain, jt_at, sample_jumps


def test_zero_levy_gives_empty_train(rng):
    train = sample_jumps(ZeroLevy(), 5.0, rng)
    assert len(train) == 0 and train.horizon == 5.0


def test_poisson_count_mean():
    rng = np.random.default_rng(11)
    levy = CompoundPoisson(2.0, Exponential(1.0))
    counts = np.array([len(sample_jumps(levy, 10.0, rng)) for _ in range(10_000)])
    se = math.sqrt(20.0 / counts.size)
    assert abs(counts.mean() - 20.0) < 4 * se


def test_constant_sizes_exact(rng):
    train = sample_jumps(CompoundPoisson(1.0, Constant(3.0)), 1.0, rng)
    assert np.all(train.sizes == 3.0)


def test_train_invariants(rng):
    train = sample_jumps(bajd(5.0, 1.0), 20.0, rng)
    assert np.all(np.diff(train.times) > 0)
    assert train.times[0] > 0 and train.times[-1] <= 20.0
    assert np.all(train.sizes > 0)


def test_jt_at_examples():
    train = JumpTrain(3.0, [1.0, 2.5], [2.0, 0.5])
    assert jt_at(JumpTrain.empty(5.0), 3.0) == 0.0
    assert jt_at(train, 2.0) == 2.0
    assert jt_at(train, 3.0) == 2.5
    assert jt_at(train, 0.0) == 0.0
    assert jt_at(train, 1.0) == 2.0          # right-continuous
    assert jt_at(train, 3.0) == train.total
    with pytest.raises(OutOfHorizon):
        jt_at(train, 3.5)


def test_jt_nondecreasing(rng):
    train = sample_jumps(bajd(2.0, 1.0), 10.0, rng)
    vals = [jt_at(train, t) for t in np.linspace(0, 10, 201)]
    assert np.all(np.diff(vals) >= 0)


def test_long_horizon_lln():
    levy = bajd(1.0, 2.0)
    rng = np.random.default_rng(5)
    ratios = np.array([sample_jumps(levy, 500.0, rng).total / 500.0 for _ in range(200)])
    se = ratios.std(ddof=1) / math.sqrt(ratios.size)
    assert abs(ratios.mean() - levy_first_moment(levy)) < 4 * se


def test_determinism():
    levy = bajd(3.0, 1.0)
    a = sample_jumps(levy, 10.0, np.random.default_rng(9))
    b = sample_jumps(levy, 10.0, np.random.default_rng(9))
    assert a == b


@pytest.mark.parametrize("times, sizes", [([1.0, 1.0], [1, 1]), ([0.0], [1.0]), ([4.0], [1.0]),
                                          ([1.0], [0.0]), ([1.0, 2.0], [1.0])])
def test_train_validation(times, sizes):
    with pytest.raises(InvalidParameter):
        JumpTrain(3.0, times, sizes)


def test_csv_round_trip(tmp_path, rng):
    train = sample_jumps(bajd(2.0, 1.5), 7.0, rng)
    text = train.to_csv()
    assert text.splitlines()[0] == "# horizon=7.0"
    assert text.splitlines()[1] == "time,size"
    assert JumpTrain.from_csv(text) == train
    f = tmp_path / "j.csv"
    train.to_csv(f)
    assert JumpTrain.from_csv(f) == train


def test_csv_requires_horizon():
    with pytest.raises(InvalidParameter):
        JumpTrain.from_csv("time,size\n1.0,2.0\n")
