"""Least-squares fitting through a thin QR factorisation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, SingularDesignError

RANK_TOL = 1e-9


@dataclass(frozen=True)
class LinearFit:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    residuals: np.ndarray
    degrees_of_freedom: int

    @property
    def t_values(self) -> np.ndarray:
        return self.coefficients / self.standard_errors

    @property
    def sigma2(self) -> float:
        return float(self.residuals @ self.residuals) / self.degrees_of_freedom


def _back_substitute(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    p = r.shape[0]
    x = np.zeros_like(b, dtype=float)
    for i in range(p - 1, -1, -1):
        x[i] = (b[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x


def ols_fit(design, response) -> LinearFit:
    """Ordinary least squares with classical standard errors.

    Raises SingularDesignError naming the first column that is (numerically)
    a linear combination of the preceding ones.
    """
    x = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, p = x.shape
    if y.shape != (n,):
        raise DomainError(f"response has shape {y.shape}, expected ({n},)")
    if n <= p:
        raise DomainError(f"need more observations than regressors (n={n}, p={p})")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DomainError("design and response must be finite")

    q, r = np.linalg.qr(x, mode="reduced")
    col_norms = np.linalg.norm(x, axis=0)
    diag = np.abs(np.diag(r))
    for j in range(p):
        if col_norms[j] == 0.0 or diag[j] <= RANK_TOL * col_norms[j]:
            raise SingularDesignError(j)

    coef = _back_substitute(r, q.T @ y)
    resid = y - x @ coef
    dof = n - p
    s2 = float(resid @ resid) / dof
    r_inv = _back_substitute(r, np.eye(p))
    se = np.sqrt(s2 * np.sum(r_inv * r_inv, axis=1))
    return LinearFit(coef, se, resid, dof)
