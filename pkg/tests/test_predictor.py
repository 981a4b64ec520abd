import numpy as np
import pytest

from esec.builder import Esec
from esec.predictor import (
    PredictorConfig,
    ReferenceLibrary,
    bench_predict,
    predict,
    predictive_power,
    sample_references,
)
from esec.symbols import CODE


def chain(fill, n=3, label=None, name=None, times=None):
    codes = np.full((n, 3, 10), CODE[fill], dtype=np.int8)
    codes[:, 0, 0] = np.arange(n) % 2  # keep adjacent columns distinct
    times = times or tuple(float(k) for k in range(n))
    return Esec(codes, times, tuple(range(n)), label=label, t_start=0.0, t_end=float(n), name=name)


def two_class_library():
    return ReferenceLibrary({
        "a": [chain("N", label="a", name=f"a{k}") for k in range(3)],
        "b": [chain("T", label="b", name=f"b{k}") for k in range(3)],
    })


def test_predictive_power():
    assert predictive_power(5.0, 10.0) == 50.0
    assert predictive_power(10.0, 10.0) == 0.0
    assert predictive_power(3.3, 11.7) == pytest.approx(71.79, abs=0.01)
    with pytest.raises(ValueError):
        predictive_power(11.0, 10.0)
    with pytest.raises(ValueError):
        predictive_power(0.0, 0.0)


def test_immediate_separation():
    p = predict(chain("N", label="a", name="q"), two_class_library())
    assert (p.predicted, p.column, p.T) == ("a", 0, 0.0)
    assert p.P == 100.0


def test_identical_classes_never_fire():
    lib = ReferenceLibrary({
        "a": [chain("N", label="a", name="a0")],
        "b": [chain("N", label="b", name="b0")],
    })
    p = predict(chain("N", label="a", name="q"), lib)
    assert p.predicted is None and p.column is None and p.P == 0.0


def test_single_class_is_undefined():
    lib = ReferenceLibrary({"a": [chain("N", label="a", name="a0")]})
    with pytest.raises(ValueError, match="prediction undefined"):
        predict(chain("N", name="q"), lib)


def test_config_validation():
    with pytest.raises(ValueError):
        PredictorConfig(refs_per_class=0)
    with pytest.raises(ValueError):
        PredictorConfig(margin=0)


def test_leave_self_out():
    lib = two_class_library()
    member = lib.classes["a"][1]
    refs = sample_references(lib, PredictorConfig(), exclude=member)
    assert all(r.name != "a1" for r in refs["a"])
    assert len(refs["a"]) == 20  # drawn with replacement from the two left


def test_hide_fires_at_column_four(suite_chains):
    hide = [c for c in suite_chains if c.label == "hide"]
    lib = ReferenceLibrary.from_chains(suite_chains)
    for q in hide[:5]:
        p = predict(q, lib)
        assert (p.predicted, p.column) == ("hide", 4)
        assert 0 <= p.T <= p.Tot and p.P == pytest.approx(100 * (1 - p.T / p.Tot))


def test_causal_and_deterministic(suite_chains):
    lib = ReferenceLibrary.from_chains(suite_chains)
    for q in suite_chains[::37]:
        full = predict(q, lib)
        assert predict(q, lib) == full
        if full.column is None:
            continue
        # appending columns never changes a fired decision; the prefix alone fires the same way
        prefix = predict(q.truncate(full.column + 1), lib)
        assert (prefix.predicted, prefix.column, prefix.T) == (full.predicted, full.column, full.T)
        for k in range(full.column):
            cut = predict(q.truncate(k + 1), lib)
            assert cut.column is None


def test_margin_monotone(suite_chains):
    lib = ReferenceLibrary.from_chains(suite_chains)
    for q in suite_chains[5::41]:
        cols = []
        for margin in (5.0, 10.0, 20.0, 30.0, 45.0):
            c = predict(q, lib, PredictorConfig(margin=margin)).column
            cols.append(np.inf if c is None else c)
        assert cols == sorted(cols)


def test_seed_changes_only_the_sample(suite_chains):
    lib = ReferenceLibrary.from_chains(suite_chains)
    a = sample_references(lib, PredictorConfig(seed=1))
    b = sample_references(lib, PredictorConfig(seed=1))
    c = sample_references(lib, PredictorConfig(seed=2))
    names = lambda refs: {k: [r.name for r in v] for k, v in refs.items()}  # noqa: E731
    assert names(a) == names(b) and names(a) != names(c)


def test_bench_requires_unique_names():
    with pytest.raises(ValueError, match="unique names"):
        bench_predict([chain("N", label="a", name="x"), chain("T", label="b", name="x")])


def test_bench_jobs_invariant(suite_chains):
    subset = suite_chains[::10]
    one = bench_predict(subset, jobs=1, chunk=10)
    two = bench_predict(subset, jobs=2, chunk=10)
    assert one.predictions == two.predictions
    assert one.to_csv() == two.to_csv()
