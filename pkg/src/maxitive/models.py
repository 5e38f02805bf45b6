"""Built-in likelihood models used by the CLI, tests and demos."""

import math

import numpy as np

from .errors import ValidationError
from .profiler import Coordinate, LikelihoodModel, LinearCombination

__all__ = ["normal_model", "quadratic_model", "logistic_model", "normal_profile_oracle", "quadratic_profile_oracle"]


def normal_profile_oracle(data, mu):
    """Relative profile log-likelihood of the mean, ``sigma`` eliminated in closed form.

    ``(n/2) * log(s2(mu_hat) / s2(mu))`` with ``s2(mu) = mean((x - mu)**2)``.
    """
    x = np.asarray(data, dtype=float)
    mu = np.asarray(mu, dtype=float)
    s2 = np.mean((x[None, :] - mu.reshape(-1, 1)) ** 2, axis=1)
    s2_hat = np.mean((x - x.mean()) ** 2)
    return (x.size / 2) * np.log(s2_hat / s2)


def quadratic_profile_oracle(mean, precision, coefficients, t):
    """``-(t - c.m)**2 / (2 c' A^-1 c)`` for the Gaussian quadratic log-likelihood."""
    m = np.asarray(mean, dtype=float)
    c = np.asarray(coefficients, dtype=float)
    var = float(c @ np.linalg.solve(np.asarray(precision, dtype=float), c))
    return -0.5 * (np.asarray(t, dtype=float) - c @ m) ** 2 / var


def normal_model(data, bounds=None):
    """Normal(mu, sigma) log-likelihood of fixed ``data``; parameters ``(mu, sigma)``."""
    x = np.asarray(data, dtype=float)
    if x.size < 2:
        raise ValidationError("normal model needs at least two observations")
    n = x.size
    if bounds is None:
        spread = max(float(x.max() - x.min()), 1.0)
        bounds = [[float(x.min()) - spread, float(x.max()) + spread], [1e-3 * spread, 10 * spread]]
    const = -0.5 * n * math.log(2 * math.pi)

    def loglik(theta):
        mu, sigma = theta
        if sigma <= 0:
            return -math.inf
        return const - n * math.log(sigma) - float(np.sum((x - mu) ** 2)) / (2 * sigma * sigma)

    def batch(points):
        mu, sigma = points[:, 0], points[:, 1]
        ss = np.sum((x[None, :] - mu[:, None]) ** 2, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = const - n * np.log(sigma) - ss / (2 * sigma**2)
        return np.where(sigma > 0, out, -np.inf)

    def oracle(interest, t):
        if isinstance(interest, Coordinate) and interest.index == 0:
            return normal_profile_oracle(x, t)
        return None

    return LikelihoodModel(
        name="normal",
        bounds=bounds,
        loglik=loglik,
        loglik_batch=batch,
        oracle=oracle,
        param_names=("mu", "sigma"),
        metadata={"data": x.tolist()},
    )


def quadratic_model(mean, precision, bounds):
    """Log-likelihood ``-(theta - m)' A (theta - m) / 2`` with ``A`` positive definite."""
    m = np.asarray(mean, dtype=float).ravel()
    A = np.asarray(precision, dtype=float)
    if A.shape != (m.size, m.size) or not np.allclose(A, A.T):
        raise ValidationError("precision must be a symmetric matrix matching the mean")
    if np.any(np.linalg.eigvalsh(A) <= 0):
        raise ValidationError("precision must be positive definite")

    def loglik(theta):
        d = np.asarray(theta, dtype=float) - m
        return -0.5 * float(d @ A @ d)

    def batch(points):
        d = points - m
        return -0.5 * np.einsum("ij,jk,ik->i", d, A, d)

    def oracle(interest, t):
        if isinstance(interest, LinearCombination):
            return quadratic_profile_oracle(m, A, interest.coefficients, t)
        if isinstance(interest, Coordinate):
            c = np.zeros(m.size)
            c[interest.index] = 1.0
            return quadratic_profile_oracle(m, A, c, t)
        return None

    return LikelihoodModel(
        name="quadratic",
        bounds=bounds,
        loglik=loglik,
        loglik_batch=batch,
        oracle=oracle,
        metadata={"mean": m.tolist(), "precision": A.tolist()},
    )


def logistic_model(x, y, noise=0.05, bounds=((-3.0, 3.0), (-1.0, 5.0))):
    """Gaussian-noise fit of ``y ~ 1 / (1 + exp(-(a + b x)))``; parameters ``(a, b)``.

    No closed-form profile exists.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValidationError("x and y must be equal-length arrays with at least two points")
    if not noise > 0:
        raise ValidationError("noise must be positive")
    scale = 1.0 / (2 * noise * noise)

    def loglik(theta):
        a, b = theta
        f = 1.0 / (1.0 + np.exp(-(a + b * x)))
        return -scale * float(np.sum((y - f) ** 2))

    def batch(points):
        f = 1.0 / (1.0 + np.exp(-(points[:, :1] + points[:, 1:2] * x[None, :])))
        return -scale * np.sum((y[None, :] - f) ** 2, axis=1)

    return LikelihoodModel(
        name="logistic",
        bounds=bounds,
        loglik=loglik,
        loglik_batch=batch,
        param_names=("a", "b"),
        metadata={"x": x.tolist(), "y": y.tolist(), "noise": noise},
    )
