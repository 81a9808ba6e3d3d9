import numpy as np
import pytest

from diffad.anomaly import GaussianMixtureAnomalyModel, ModelFormatError

LOG_2PI = np.log(2 * np.pi)


def naive_log_density(weights, means, variances, x):
    """Direct linear-space evaluation of the mixture density."""
    total = 0.0
    d = len(x)
    for w, mu, var in zip(weights, means, variances):
        norm = (2 * np.pi) ** (-d / 2) * np.prod(var) ** (-0.5)
        total += w * norm * np.exp(-0.5 * np.sum((x - mu) ** 2 / var))
    return np.log(total)


def three_blob_data(rng, n_per=2000, sep=10.0):
    centers = np.array([[0.0, 0.0], [sep, 0.0], [0.0, sep]])
    data = np.concatenate([rng.normal(c, 1.0, size=(n_per, 2)) for c in centers])
    return data, centers


class TestFit:
    def test_single_component_closed_form_exact(self):
        # n = 32 integer-valued points: means are exact multiples of 2^-5 and
        # squared deviations exact multiples of 2^-10, so every summation
        # order is exact and EM must coincide bitwise with the closed form
        rng = np.random.default_rng(3)
        X = rng.integers(-8, 9, size=(32, 3)).astype(np.float64)
        model = GaussianMixtureAnomalyModel(n_components=1, random_state=0).fit(X)
        assert model.weights_.tolist() == [1.0]
        assert np.array_equal(model.means_[0], X.mean(axis=0))
        assert np.array_equal(model.covariances_[0], np.maximum(X.var(axis=0), 1e-6))

    def test_single_component_closed_form_random_floats(self, rng):
        X = rng.normal(size=(57, 4))
        model = GaussianMixtureAnomalyModel(n_components=1, random_state=0).fit(X)
        assert np.allclose(model.means_[0], X.mean(axis=0), atol=1e-12)
        assert np.allclose(model.covariances_[0], X.var(axis=0), atol=1e-12)

    def test_recovers_separated_components(self, rng):
        data, centers = three_blob_data(rng)
        model = GaussianMixtureAnomalyModel(n_components=3, random_state=1).fit(data)
        # optimal matching: each true center must be within 0.1 of some mean
        for c in centers:
            dists = np.linalg.norm(model.means_ - c, axis=1)
            assert dists.min() < 0.1

    def test_deterministic_given_seed(self, rng):
        data, _ = three_blob_data(rng, n_per=60)
        a = GaussianMixtureAnomalyModel(n_components=3, random_state=7).fit(data)
        b = GaussianMixtureAnomalyModel(n_components=3, random_state=7).fit(data)
        assert np.array_equal(a.means_, b.means_)
        assert np.array_equal(a.covariances_, b.covariances_)
        assert np.array_equal(a.weights_, b.weights_)

    def test_log_likelihood_monotone(self, rng):
        for trial in range(10):
            X = rng.normal(size=(80, 4)) * rng.uniform(0.5, 2.0) + rng.normal(size=4)
            model = GaussianMixtureAnomalyModel(
                n_components=3, random_state=trial, max_iter=60
            ).fit(X)
            assert np.all(np.diff(model.log_likelihood_trace_) >= -1e-8)

    def test_responsibilities_normalized(self, rng):
        X = rng.normal(size=(100, 5))
        model = GaussianMixtureAnomalyModel(n_components=4, random_state=0).fit(X)
        assert model.max_responsibility_error_ < 1e-12
        resp = model.predict_proba(X)
        assert np.abs(resp.sum(axis=1) - 1.0).max() < 1e-12

    def test_weights_sum_to_one_and_variances_floored(self, rng):
        X = rng.normal(size=(50, 3))
        model = GaussianMixtureAnomalyModel(n_components=2, random_state=2).fit(X)
        assert abs(model.weights_.sum() - 1.0) < 1e-12
        assert np.all(model.weights_ >= 0)
        assert np.all(model.covariances_ >= 1e-6)

    def test_translation_equivariance(self, rng):
        X = rng.normal(size=(200, 5))
        shift = np.full(5, 3.75)
        a = GaussianMixtureAnomalyModel(n_components=3, random_state=5).fit(X)
        b = GaussianMixtureAnomalyModel(n_components=3, random_state=5).fit(X + shift)
        assert np.allclose(b.means_ - shift, a.means_, atol=1e-9)
        assert np.allclose(b.covariances_, a.covariances_, atol=1e-9)
        assert np.allclose(b.weights_, a.weights_, atol=1e-12)
        probes = rng.normal(size=(20, 5))
        assert np.allclose(
            b.score_samples(probes + shift), a.score_samples(probes), atol=1e-9
        )

    def test_identical_data_floors_variance_with_warning(self):
        X = np.tile([1.0, 2.0], (30, 1))
        with pytest.warns(RuntimeWarning, match="variance floor"):
            model = GaussianMixtureAnomalyModel(n_components=1, random_state=0).fit(X)
        assert np.all(model.covariances_ == 1e-6)

    def test_insufficient_distinct_points_rejected(self):
        X = np.tile([0.0, 1.0], (10, 1))
        with pytest.raises(ValueError, match="distinct"):
            GaussianMixtureAnomalyModel(n_components=2).fit(X)

    def test_dimension_inconsistency_rejected(self, rng):
        model = GaussianMixtureAnomalyModel(n_components=1).fit(rng.normal(size=(20, 4)))
        with pytest.raises(ValueError, match="length 4"):
            model.score_samples(rng.normal(size=(3, 5)))


class TestScoring:
    def test_standard_normal_at_mean_closed_form(self):
        model = GaussianMixtureAnomalyModel.from_parameters(
            [1.0], np.zeros((1, 2)), np.ones((1, 2))
        )
        got = model.score_samples(np.zeros((1, 2)))[0]
        assert got == pytest.approx(-LOG_2PI, abs=1e-12)

    def test_mixture_of_identical_components_collapses(self, rng):
        mu = rng.normal(size=(1, 3))
        var = rng.uniform(0.5, 2.0, size=(1, 3))
        single = GaussianMixtureAnomalyModel.from_parameters([1.0], mu, var)
        double = GaussianMixtureAnomalyModel.from_parameters(
            [0.5, 0.5], np.vstack([mu, mu]), np.vstack([var, var])
        )
        x = rng.normal(size=(10, 3))
        assert np.allclose(single.score_samples(x), double.score_samples(x), atol=1e-12)

    def test_matches_naive_direct_evaluation(self, rng):
        for _ in range(10):
            k, d = 3, 10
            weights = rng.dirichlet(np.ones(k))
            means = rng.normal(size=(k, d))
            variances = rng.uniform(0.3, 2.5, size=(k, d))
            model = GaussianMixtureAnomalyModel.from_parameters(weights, means, variances)
            x = rng.normal(size=d)
            want = naive_log_density(weights, means, variances, x)
            got = model.score_samples(x[None, :])[0]
            assert got == pytest.approx(want, abs=1e-9)

    def test_anomaly_score_is_negated_density(self, rng):
        model = GaussianMixtureAnomalyModel.from_parameters(
            [1.0], np.zeros((1, 4)), np.ones((1, 4))
        )
        x = rng.normal(size=(5, 4))
        assert np.array_equal(model.anomaly_scores(x), -model.score_samples(x))

    def test_far_point_scores_more_anomalous(self):
        model = GaussianMixtureAnomalyModel.from_parameters(
            [1.0], np.zeros((1, 6)), np.ones((1, 6))
        )
        near = model.anomaly_scores(np.zeros((1, 6)))[0]
        far_x = np.zeros((1, 6))
        far_x[0, 2] = 10.0
        assert model.anomaly_scores(far_x)[0] > near

    def test_invariant_under_component_permutation(self, rng):
        k, d = 4, 5
        weights = rng.dirichlet(np.ones(k))
        means = rng.normal(size=(k, d))
        variances = rng.uniform(0.5, 1.5, size=(k, d))
        perm = rng.permutation(k)
        a = GaussianMixtureAnomalyModel.from_parameters(weights, means, variances)
        b = GaussianMixtureAnomalyModel.from_parameters(
            weights[perm], means[perm], variances[perm]
        )
        x = rng.normal(size=(20, d))
        assert np.allclose(a.score_samples(x), b.score_samples(x), atol=1e-12)

    def test_nonfinite_input_rejected(self):
        model = GaussianMixtureAnomalyModel.from_parameters(
            [1.0], np.zeros((1, 2)), np.ones((1, 2))
        )
        with pytest.raises(ValueError, match="non-finite"):
            model.score_samples(np.array([[np.nan, 0.0]]))


class TestFullCovariance:
    def test_matches_naive_full_evaluation(self, rng):
        d = 3
        A = rng.normal(size=(d, d))
        cov = A @ A.T + np.eye(d)
        mu = rng.normal(size=d)
        model = GaussianMixtureAnomalyModel.from_parameters(
            [1.0], mu[None, :], cov[None, :, :], covariance_type="full"
        )
        x = rng.normal(size=d)
        diff = x - mu
        want = -0.5 * (
            d * LOG_2PI + np.log(np.linalg.det(cov)) + diff @ np.linalg.solve(cov, diff)
        )
        assert model.score_samples(x[None, :])[0] == pytest.approx(want, abs=1e-9)

    def test_fit_runs_and_is_monotone(self, rng):
        X = rng.normal(size=(120, 3)) @ np.array(
            [[1.0, 0.4, 0.0], [0.0, 1.0, 0.3], [0.0, 0.0, 1.0]]
        )
        model = GaussianMixtureAnomalyModel(
            n_components=2, covariance_type="full", random_state=0
        ).fit(X)
        assert np.all(np.diff(model.log_likelihood_trace_) >= -1e-8)
        assert model.covariances_.shape == (2, 3, 3)

    def test_save_rejected_for_full(self, rng, tmp_path):
        X = rng.normal(size=(50, 2))
        model = GaussianMixtureAnomalyModel(
            n_components=1, covariance_type="full", random_state=0
        ).fit(X)
        with pytest.raises(ModelFormatError, match="diagonal"):
            model.save(tmp_path / "m.bin")


class TestPersistence:
    def test_round_trip_density_on_random_probes(self, rng, tmp_path):
        X = rng.normal(size=(100, 6))
        model = GaussianMixtureAnomalyModel(n_components=3, random_state=4).fit(X)
        path = tmp_path / "model.bin"
        model.save(path)
        loaded = GaussianMixtureAnomalyModel.load(path)
        probes = rng.normal(size=(100, 6))
        assert np.array_equal(loaded.score_samples(probes), model.score_samples(probes))
        assert np.array_equal(loaded.weights_, model.weights_)
        assert np.array_equal(loaded.means_, model.means_)
        assert np.array_equal(loaded.covariances_, model.covariances_)

    def test_metadata_round_trip(self, rng, tmp_path):
        X = rng.normal(size=(80, 448))
        model = GaussianMixtureAnomalyModel(n_components=3, random_state=0).fit(X)
        path = tmp_path / "model.bin"
        model.save(path)
        loaded = GaussianMixtureAnomalyModel.load(path)
        assert loaded.means_.shape == (3, 448)
        assert loaded.n_features_in_ == 448

    def test_missing_path_raises_io_error(self, tmp_path):
        with pytest.raises(OSError):
            GaussianMixtureAnomalyModel.load(tmp_path / "missing.bin")

    def test_magic_mismatch_rejected(self, rng, tmp_path):
        X = rng.normal(size=(30, 2))
        model = GaussianMixtureAnomalyModel(n_components=1, random_state=0).fit(X)
        path = tmp_path / "model.bin"
        model.save(path)
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(ModelFormatError, match="magic"):
            GaussianMixtureAnomalyModel.load(path)

    def test_truncated_payload_rejected(self, rng, tmp_path):
        X = rng.normal(size=(30, 2))
        model = GaussianMixtureAnomalyModel(n_components=1, random_state=0).fit(X)
        path = tmp_path / "model.bin"
        model.save(path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ModelFormatError, match="size mismatch"):
            GaussianMixtureAnomalyModel.load(path)

    def test_unfitted_save_rejected(self, tmp_path):
        with pytest.raises(RuntimeError, match="not fitted"):
            GaussianMixtureAnomalyModel().save(tmp_path / "m.bin")
