"""Gaussian-mixture anomaly model fitted with expectation-maximization.

The model learns the distribution of combined pair features from real
videos only. A sample's log-density under the mixture,

    log p(x) = logsumexp_k [ log pi_k + log N(x | mu_k, Sigma_k) ],

is the realness score; the anomaly score is its negation, so fakes score
higher. Covariances are diagonal by default: at embedding-scale d with a
few thousand training pairs a full covariance is singular, while the
diagonal estimator with a variance floor stays well-posed. Full
covariances remain available for small-d use.

EM is deterministic given ``random_state``: means are seeded k-means++
style, variances start at the per-feature sample variance, weights
uniform. The per-iteration total log-likelihood is recorded in
``log_likelihood_trace_`` and is non-decreasing up to floating-point noise
and variance-floor clipping.
"""

from __future__ import annotations

import struct
import warnings

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_matrix

MODEL_MAGIC = b"GADM"
MODEL_VERSION = 1

LOG_2PI = float(np.log(2.0 * np.pi))


class ModelFormatError(ValueError):
    """Raised for malformed model files."""


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise logsumexp with max shift for numerical stability."""
    m = np.max(a, axis=1)
    return m + np.log(np.sum(np.exp(a - m[:, None]), axis=1))


def _kmeanspp_means(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seed k means on the data, each next center drawn with probability
    proportional to squared distance from the chosen set."""
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return X[chosen].copy()


class GaussianMixtureAnomalyModel(BaseEstimator):
    """Mixture-of-Gaussians density model scored by log-likelihood.

    Parameters
    ----------
    n_components : number of mixture components (default 3).
    covariance_type : "diag" (default) or "full".
    tol : relative total log-likelihood change declaring convergence.
    max_iter : EM iteration cap.
    variance_floor : lower bound applied to (diagonal) variances.
    random_state : seed controlling initialization; fits are bit-reproducible.
    """

    def __init__(
        self,
        n_components: int = 3,
        covariance_type: str = "diag",
        tol: float = 1e-6,
        max_iter: int = 200,
        variance_floor: float = 1e-6,
        random_state: int = 0,
    ):
        self.n_components = n_components
        self.covariance_type = covariance_type
        self.tol = tol
        self.max_iter = max_iter
        self.variance_floor = variance_floor
        self.random_state = random_state

    # ------------------------------------------------------------------ #
    # densities

    def _log_weighted_densities(self, X: np.ndarray) -> np.ndarray:
        """(n, K) matrix of log pi_k + log N(x_i | mu_k, Sigma_k)."""
        n, d = X.shape
        k = len(self.weights_)
        out = np.empty((n, k))
        if self.covariance_type == "diag":
            for j in range(k):
                diff = X - self.means_[j]
                maha = np.sum(diff * diff / self.covariances_[j], axis=1)
                logdet = np.sum(np.log(self.covariances_[j]))
                out[:, j] = -0.5 * (d * LOG_2PI + logdet + maha)
        else:
            for j in range(k):
                chol = np.linalg.cholesky(self.covariances_[j])
                diff = (X - self.means_[j]).T
                z = np.linalg.solve(chol, diff)
                maha = np.sum(z * z, axis=0)
                logdet = 2.0 * np.sum(np.log(np.diag(chol)))
                out[:, j] = -0.5 * (d * LOG_2PI + logdet + maha)
        return out + np.log(self.weights_)

    def score_samples(self, X) -> np.ndarray:
        """Log mixture density of each row of X (higher = more real-like)."""
        X = check_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        self._check_fitted()
        if X.shape[1] != self.means_.shape[1]:
            raise ValueError(
                f"expected vectors of length {self.means_.shape[1]}, got {X.shape[1]}"
            )
        return _logsumexp_rows(self._log_weighted_densities(X))

    def anomaly_scores(self, X) -> np.ndarray:
        """Negative log-density: higher = more anomalous (fake-leaning)."""
        return -self.score_samples(X)

    def predict_proba(self, X) -> np.ndarray:
        """Posterior responsibility of each component for each sample."""
        X = check_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        self._check_fitted()
        logw = self._log_weighted_densities(X)
        return np.exp(logw - _logsumexp_rows(logw)[:, None])

    # ------------------------------------------------------------------ #
    # fitting

    def fit(self, X, y=None):
        X = check_matrix(X)
        n, d = X.shape
        k = self.n_components
        if k < 1:
            raise ValueError("n_components must be >= 1")
        if self.covariance_type not in ("diag", "full"):
            raise ValueError(f"unknown covariance_type {self.covariance_type!r}")
        n_distinct = np.unique(X, axis=0).shape[0]
        if n_distinct < k:
            raise ValueError(
                f"need at least n_components={k} distinct data points, got {n_distinct}"
            )

        rng = np.random.default_rng(self.random_state)
        self.means_ = _kmeanspp_means(X, k, rng)
        var0 = np.maximum(X.var(axis=0), self.variance_floor)
        if self.covariance_type == "diag":
            self.covariances_ = np.tile(var0, (k, 1))
        else:
            self.covariances_ = np.tile(np.diag(var0), (k, 1, 1))
        self.weights_ = np.full(k, 1.0 / k)

        floored = 0
        trace: list[float] = []
        max_resp_err = 0.0
        self.converged_ = False
        for it in range(self.max_iter):
            logw = self._log_weighted_densities(X)
            log_norm = _logsumexp_rows(logw)
            ll = float(log_norm.sum())
            trace.append(ll)
            resp = np.exp(logw - log_norm[:, None])
            max_resp_err = max(max_resp_err, float(np.abs(resp.sum(axis=1) - 1.0).max()))

            if len(trace) > 1:
                prev = trace[-2]
                if abs(ll - prev) <= self.tol * abs(prev):
                    self.converged_ = True
                    break

            nk = resp.sum(axis=0)
            nk_safe = np.maximum(nk, 1e-12)
            self.weights_ = nk / n
            self.weights_ = self.weights_ / self.weights_.sum()
            self.means_ = (resp.T @ X) / nk_safe[:, None]
            if self.covariance_type == "diag":
                for j in range(k):
                    diff = X - self.means_[j]
                    var = (resp[:, j] @ (diff * diff)) / nk_safe[j]
                    below = var < self.variance_floor
                    floored += int(below.sum())
                    self.covariances_[j] = np.maximum(var, self.variance_floor)
            else:
                for j in range(k):
                    diff = X - self.means_[j]
                    cov = (resp[:, j][:, None] * diff).T @ diff / nk_safe[j]
                    cov[np.diag_indices(d)] += self.variance_floor
                    self.covariances_[j] = cov

        self.n_iter_ = len(trace)
        self.log_likelihood_trace_ = np.asarray(trace)
        self.lower_bound_ = trace[-1]
        self.max_responsibility_error_ = max_resp_err
        self.n_features_in_ = d
        if floored:
            warnings.warn(
                f"variance floor {self.variance_floor} engaged {floored} time(s) during EM",
                RuntimeWarning,
                stacklevel=2,
            )
        return self

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise RuntimeError("model is not fitted; call fit() or load()")

    # ------------------------------------------------------------------ #
    # construction and persistence

    @classmethod
    def from_parameters(cls, weights, means, covariances, covariance_type: str = "diag"):
        """Build a scoring-ready model from explicit mixture parameters."""
        weights = np.asarray(weights, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
        covariances = np.asarray(covariances, dtype=np.float64)
        k, d = means.shape
        if weights.shape != (k,):
            raise ValueError("weights/means shape mismatch")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        expected = (k, d) if covariance_type == "diag" else (k, d, d)
        if covariances.shape != expected:
            raise ValueError(f"covariances must have shape {expected}")
        model = cls(n_components=k, covariance_type=covariance_type)
        model.weights_ = weights / weights.sum()
        model.means_ = means.copy()
        model.covariances_ = covariances.copy()
        model.n_features_in_ = d
        return model

    def save(self, path) -> None:
        """Write the fitted model: header {magic, version, d, N} then
        weights, means and variances as little-endian float64."""
        self._check_fitted()
        if self.covariance_type != "diag":
            raise ModelFormatError("model files store diagonal covariances only")
        k, d = self.means_.shape
        with open(path, "wb") as fh:
            fh.write(struct.pack("<4sIII", MODEL_MAGIC, MODEL_VERSION, d, k))
            fh.write(self.weights_.astype("<f8").tobytes())
            fh.write(self.means_.astype("<f8").tobytes())
            fh.write(self.covariances_.astype("<f8").tobytes())

    @classmethod
    def load(cls, path) -> "GaussianMixtureAnomalyModel":
        with open(path, "rb") as fh:
            header = fh.read(16)
            if len(header) != 16:
                raise ModelFormatError("truncated model file header")
            magic, version, d, k = struct.unpack("<4sIII", header)
            if magic != MODEL_MAGIC:
                raise ModelFormatError(f"magic number mismatch: {magic!r}")
            if version != MODEL_VERSION:
                raise ModelFormatError(f"unsupported model file version {version}")
            body = fh.read()
        expected = 8 * (k + 2 * k * d)
        if len(body) != expected:
            raise ModelFormatError(
                f"model payload size mismatch: expected {expected} bytes, got {len(body)}"
            )
        weights = np.frombuffer(body[: 8 * k], dtype="<f8").astype(np.float64)
        means = np.frombuffer(body[8 * k : 8 * k + 8 * k * d], dtype="<f8").reshape(k, d)
        variances = np.frombuffer(body[8 * k + 8 * k * d :], dtype="<f8").reshape(k, d)
        if np.any(variances <= 0):
            raise ModelFormatError("model file contains non-positive variances")
        model = cls.from_parameters(weights, means.copy(), variances.copy(), "diag")
        return model
