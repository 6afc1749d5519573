import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtwlvq import (
    Codebook,
    ConfigError,
    InputError,
    LabeledDataset,
    ModelError,
    TrainConfig,
    apply_asymmetric_update,
    apply_symmetric_update,
    dtw,
    glvq_cost,
    glvq_force,
    kmeans_per_class,
    lvq1_force,
    nearest_prototype,
    squared_dtw,
    train,
)
from dtwlvq.lvq import distortions, relative_distance_difference, sigmoid, training_error
from dtwlvq.synthetic import cylinder_bell_funnel


def two_class(seed=0, n=10):
    D = cylinder_bell_funnel(n_per_class=n, seed=seed)
    keep = D.labels != 3
    return D[keep]


def test_nearest_prototype_examples(rng):
    protos = [rng.normal(size=5) for _ in range(3)]
    cb = Codebook.from_series(protos, [1, 2, 3])
    assert nearest_prototype(cb, protos[1]) == 1
    tied = Codebook.from_series([np.zeros(3), np.zeros(3)], [1, 2])
    assert nearest_prototype(tied, np.ones(3)) == 0
    for _ in range(10):
        x = rng.normal(size=rng.integers(2, 8))
        d = [squared_dtw(p, x) for p in protos]
        assert nearest_prototype(cb, x) == int(np.argmin(d))
    with pytest.raises(ModelError):
        nearest_prototype(Codebook([]), protos[0])


def test_lvq1_force_signs():
    cb = Codebook.from_series([[0.0, 0.0], [5.0, 5.0], [9.0, 9.0]], [1, 2, 1])
    x = [4.0, 5.0]
    assert lvq1_force(cb, x, 2).forces.tolist() == [0.0, 1.0, 0.0]
    assert lvq1_force(cb, x, 1).forces.tolist() == [0.0, -1.0, 0.0]


def test_glvq_force_at_zero_margin():
    # d+ = d- = delta gives kappa = 0 and phi+- = 1/(16 delta) for sigma = 1
    cb = Codebook.from_series([[0.0, 0.0], [2.0, 2.0]], [1, 2])
    x = [1.0, 1.0]
    delta = 2.0
    res = glvq_force(cb, x, 1, sigma=1.0)
    assert not res.skip
    assert res.forces[0] == pytest.approx(1 / (16 * delta), rel=1e-15)
    assert res.forces[1] == pytest.approx(-1 / (16 * delta), rel=1e-15)


def test_glvq_force_skip_cases():
    cb = Codebook.from_series([[1.0], [1.0]], [1, 2])
    res = glvq_force(cb, [1.0], 1, sigma=1.0)
    assert res.skip and not res.forces.any()
    cb = Codebook.from_series([[0.0], [2.0], [5.0]], [1, 1, 2])
    res = glvq_force(cb, [1.0], 1, sigma=1.0)
    assert res.skip and not res.forces.any()
    cb = Codebook.from_series([[0.0], [2.0], [5.0]], [2, 2, 1])
    assert glvq_force(cb, [1.0], 1, sigma=1.0).skip
    with pytest.raises(ModelError):
        glvq_force(Codebook.from_series([[0.0], [1.0]], [1, 1]), [1.0], 1, sigma=1.0)


def test_glvq_force_matches_cost_derivative(rng):
    # the forces are the partial derivatives of h(kappa) in d+ and d-, up to scale
    for _ in range(20):
        dp, dm = rng.uniform(0.1, 5, size=2)
        sigma = rng.uniform(0.1, 3)
        cb = Codebook.from_series([[0.0], [np.sqrt(dp) + np.sqrt(dm)]], [1, 2])
        x = [np.sqrt(dp)]
        res = glvq_force(cb, x, 1, sigma)
        h = lambda a, b: float(sigmoid(relative_distance_difference(a, b), sigma))  # noqa: E731
        e = 1e-6
        ddp = (h(dp + e, dm) - h(dp - e, dm)) / (2 * e)
        ddm = (h(dp, dm + e) - h(dp, dm - e)) / (2 * e)
        # the forces omit the slope sigma and the factor 2 of d kappa
        assert 2 * sigma * res.forces[0] == pytest.approx(ddp, rel=1e-5, abs=1e-9)
        assert 2 * sigma * res.forces[1] == pytest.approx(ddm, rel=1e-5, abs=1e-9)


def test_asymmetric_update_examples(rng):
    p = rng.normal(size=4)
    assert np.array_equal(apply_asymmetric_update(p, rng.normal(size=6), 0.1, 0.0).ravel(), p)
    # the optimal path for this pair is ((1,1),(2,2),(2,3)) with cost 1
    assert dtw([1.0, 2.0], [2.0, 2.0, 2.0]).path.tolist() == [[0, 0], [1, 1], [1, 2]]
    assert apply_asymmetric_update([1.0, 2.0], [2.0, 2.0, 2.0], 0.5, 1.0).ravel().tolist() == [1.5, 2.0]


def test_asymmetric_update_along_given_path_by_hand():
    # evaluating V p - W x along ((1,1),(1,2),(2,3)) gives (2, 2)
    from dtwlvq.lvq import _asymmetric_step

    p = np.array([[1.0], [2.0]])
    x = np.array([[2.0], [2.0], [2.0]])
    path = np.array([[0, 0], [0, 1], [1, 2]])
    assert _asymmetric_step(p, x, 0.5, path).ravel().tolist() == [2.0, 2.0]


def test_symmetric_update_examples(rng):
    p = rng.normal(size=5)
    assert np.array_equal(apply_symmetric_update(p, p + 0.01, 0.3, 0.0).ravel(), p)
    x = p + 0.01
    assert dtw(p, x).path.tolist() == [[i, i] for i in range(5)]
    assert np.array_equal(apply_symmetric_update(p, x, 1.0, 1.0).ravel(), x)
    # symmetric average (1.5, 1.5, 2) along the optimal path, projected to length 2
    assert apply_symmetric_update([1.0, 2.0], [2.0, 2.0, 2.0], 0.5, 1.0).ravel().tolist() == [1.5, 2.0]


def test_updates_reject_bad_steps():
    for update in (apply_asymmetric_update, apply_symmetric_update):
        with pytest.raises(InputError):
            update([1.0], [1.0], 0.0, 1.0)
        with pytest.raises(InputError):
            update([1.0], [1.0], 0.1, np.nan)


def test_euclidean_reduction(rng):
    p = rng.normal(size=(6, 2))
    x = p + rng.uniform(-0.05, 0.05, size=p.shape)
    assert dtw(p, x).path.tolist() == [[i, i] for i in range(6)]
    out = apply_asymmetric_update(p, x, 0.2, -0.7)
    assert np.allclose(out, p + 0.2 * 0.7 * (p - x), rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.floats(-1, 1), st.integers(0, 2**31))
def test_updates_preserve_length(m, n, step, seed):
    g = np.random.default_rng(seed)
    p, x = g.normal(size=(m, 2)), g.normal(size=(n, 2))
    if step == 0:
        step = 0.5
    assert apply_asymmetric_update(p, x, 1.0, step).shape == (m, 2)
    assert apply_symmetric_update(p, x, 1.0, step).shape == (m, 2)


def test_relative_distance_difference_range():
    assert np.isnan(relative_distance_difference(0.0, 0.0))
    assert relative_distance_difference(1.0, 0.0) == 1.0
    assert relative_distance_difference(0.0, 2.0) == -1.0


def test_kappa_sign_matches_classification():
    D = two_class()
    cb = kmeans_per_class(D, 1)
    labels = cb.labels
    for x, y in zip(D.series, D.labels):
        d = distortions(cb, x)
        kappa = relative_distance_difference(d[labels == y].min(), d[labels != y].min())
        assert -1.0 <= kappa <= 1.0
        assert (kappa < 0) == (labels[int(np.argmin(d))] == y)


def test_glvq_cost_examples():
    far = Codebook.from_series([[0.0, 0.0], [100.0, 100.0]], [1, 2])
    D = LabeledDataset([[0.1, 0.0], [100.0, 99.9]], [1, 2])
    assert glvq_cost(far, D, sigma=50.0) < 1e-20
    swapped = LabeledDataset([[0.1, 0.0], [100.0, 99.9]], [2, 1])
    assert glvq_cost(far, swapped, sigma=50.0) == pytest.approx(2.0, abs=1e-15)
    mid = LabeledDataset([[50.0, 50.0]], [1])
    assert glvq_cost(far, mid, sigma=1.0) == 0.5
    same = Codebook.from_series([[1.0], [1.0]], [1, 2])
    assert glvq_cost(same, LabeledDataset([[1.0]], [1]), 1.0, return_singular=True) == (0.0, 1)


def test_train_zero_epochs_returns_init():
    D = two_class()
    init = kmeans_per_class(D, 1)
    cb, report = train(D, init, TrainConfig(method="asymmetric-lvq1", max_epochs=0))
    assert all(np.array_equal(a, b) for a, b in zip(cb.series, init.series))
    assert report.epochs == 0


@pytest.mark.parametrize("method", ["asymmetric-lvq1", "symmetric-lvq1", "asymmetric-glvq"])
def test_train_is_deterministic_and_length_preserving(method):
    D = two_class()
    init = kmeans_per_class(D, 2)
    config = TrainConfig(method=method, eta0=0.05, max_epochs=3, seed=7)
    a, ra = train(D, init, config)
    b, rb = train(D, init, config)
    assert all(np.array_equal(u, v) for u, v in zip(a.series, b.series))
    assert ra.to_dict() == rb.to_dict()
    assert [len(p) for p in a.series] == [len(p) for p in init.series]
    assert a.labels.tolist() == init.labels.tolist()
    assert all(np.array_equal(u, v) for u, v in zip(init.series, kmeans_per_class(D, 2).series))


def test_train_lvq1_error_mostly_non_increasing():
    steps = ups = 0
    for seed in range(10):
        D = two_class(seed)
        _, report = train(D, kmeans_per_class(D, 1),
                          TrainConfig(method="asymmetric-lvq1", eta0=0.01, max_epochs=10, seed=seed))
        curve = [report.initial_error] + report.error_rate
        steps += len(curve) - 1
        ups += sum(b > a for a, b in zip(curve, curve[1:]))
    assert (steps - ups) / steps >= 0.8


def test_train_glvq_lowers_cost_on_separated_data(rng):
    series = [rng.normal(0, 0.3, 8) for _ in range(10)] + [rng.normal(3, 0.3, 8) for _ in range(10)]
    D = LabeledDataset(series, [1] * 10 + [2] * 10)
    init = Codebook.from_series([np.full(8, 1.2), np.full(8, 1.8)], [1, 2])
    _, report = train(D, init, TrainConfig(method="asymmetric-glvq", sigma0=1.0, max_epochs=20))
    assert report.cost[-1] < report.initial_cost


def test_train_skipped_examples_leave_prototypes_unchanged():
    # two identical closest same-label prototypes make every example a tie
    D = LabeledDataset([[0.0, 1.0], [1.0, 0.5], [9.0, 9.0]], [1, 1, 2])
    init = Codebook.from_series([[0.5, 0.5], [0.5, 0.5], [1.0, 1.0], [1.0, 1.0]], [1, 1, 2, 2])
    cb, report = train(D, init, TrainConfig(method="asymmetric-glvq", max_epochs=5))
    assert report.skipped == 3
    assert all(np.array_equal(a, b) for a, b in zip(cb.series, init.series))


def test_train_rejects_incompatible_codebooks():
    D = two_class()
    with pytest.raises(ModelError):
        train(D, Codebook.from_series([[0.0]], [1]), TrainConfig(method="asymmetric-lvq1"))
    with pytest.raises(ModelError):
        train(D, Codebook.from_series([np.zeros((4, 2)), np.ones((4, 2))], [1, 2]),
              TrainConfig(method="asymmetric-lvq1"))
    with pytest.raises(ConfigError):
        train(D, kmeans_per_class(D, 1), TrainConfig(method="lvq3"))
    with pytest.raises(ConfigError):
        TrainConfig(method="asymmetric-glvq", sigma0=0.0).validate()


def test_training_schedules():
    c = TrainConfig(method="asymmetric-lvq1", eta0=0.5, max_epochs=4)
    assert [c.learning_rate(t) for t in (1, 2, 3, 4)] == [0.5, 0.375, 0.25, 0.125]
    g = TrainConfig(method="asymmetric-glvq", sigma0=0.5)
    assert g.learning_rate(3) == 1.0
    assert [g.slope(t) for t in (1, 2, 3)] == [0.5, 1.0, 1.5]


def test_training_error_of_perfect_codebook():
    D = two_class()
    assert training_error(Codebook.from_series(D.series, D.labels), D) == 0.0


def test_codebook_json_round_trip(rng):
    cb = Codebook.from_series([rng.normal(size=(3, 2)), rng.normal(size=(5, 2))], [2, 1])
    back = Codebook.from_json(cb.to_json())
    assert back.labels.tolist() == [2, 1]
    assert all(np.array_equal(a, b) for a, b in zip(cb.series, back.series))
