"""End-to-end checks of the Python bindings against hand-computed values."""

import math

import pytest

import tinfer

N1 = (
    "BAYES\n"
    "2\n"
    "2 2\n"
    "2\n"
    "1 0\n"
    "2 0 1\n"
    "\n"
    "2\n"
    " 0.6 0.4\n"
    "\n"
    "4\n"
    " 0.7 0.3\n"
    " 0.25 0.75\n"
)


@pytest.fixture(scope="module")
def model():
    return tinfer.load_model(N1)


def test_model_shape(model):
    assert model.num_vars == 2
    assert model.cards == [2, 2]
    assert model.num_factors == 2
    assert "MARKOV" in model.serialize() or "BAYES" in model.serialize()


def test_pr(model):
    assert tinfer.pr(model) == pytest.approx(0.0, abs=1e-12)
    assert tinfer.pr(model, evidence={1: 1}) == pytest.approx(math.log10(0.48), abs=1e-9)


def test_marginals(model):
    marg = tinfer.marginals(model, evidence={1: 1})
    assert set(marg) == {0}
    assert marg[0] == pytest.approx([0.375, 0.625], abs=1e-12)

    prior = tinfer.marginals(model)
    assert prior[0] == pytest.approx([0.6, 0.4], abs=1e-12)
    assert prior[1] == pytest.approx([0.52, 0.48], abs=1e-12)


def test_mpe(model):
    assignment, log_prob = tinfer.mpe(model)
    assert assignment == {0: 0, 1: 0}
    assert log_prob == pytest.approx(math.log(0.42), abs=1e-12)

    assignment, log_prob = tinfer.mpe(model, evidence={1: 1})
    assert assignment == {0: 1}
    assert log_prob == pytest.approx(math.log(0.30), abs=1e-12)


def test_mmap(model):
    assignment, log_prob = tinfer.mmap(model, [1])
    assert assignment == {1: 0}
    assert log_prob == pytest.approx(math.log(0.52), abs=1e-12)


def test_sample(model):
    vars_, rows = tinfer.sample(model, n=500, seed=7)
    assert vars_ == [0, 1]
    assert len(rows) == 500
    assert all(len(r) == 2 and all(v in (0, 1) for v in r) for r in rows)
    again_vars, again_rows = tinfer.sample(model, n=500, seed=7)
    assert (again_vars, again_rows) == (vars_, rows)


def test_stats(model):
    report = tinfer.stats(model)
    assert report["space"] == pytest.approx(2.0)
    assert report["time"] == pytest.approx(2.0)


def test_errors():
    with pytest.raises(tinfer.InferenceError, match="parse"):
        tinfer.load_model("MARKOV 1 2 1 1 0 banana")
    model = tinfer.load_model(N1)
    with pytest.raises(tinfer.InferenceError, match="shape"):
        tinfer.mmap(model, [])
