"""Graph and spectral primitives on a population of candidate solutions.

A population is an ``(N, d)`` array whose rows are individuals. The rows are
treated as nodes of a weighted graph; the columns are graph signals that get
transformed, filtered and reconstructed in the Laplacian eigenbasis.

All functions here are pure and operate on dense numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CENTROID_EPS",
    "FilterSpec",
    "GraphSpectrum",
    "NumericalError",
    "apply_filter",
    "as_population",
    "cheb_eval",
    "cosine_adjacency",
    "eig_sym",
    "eigenvalue_quadratic_form",
    "frequency_component",
    "gft",
    "graph_spectrum",
    "igft",
    "normalized_laplacian",
]

#: Difference vectors shorter than this are treated as sitting on the centroid.
CENTROID_EPS = 1e-12
#: Slack allowed on the spectral interval [0, 2].
LAMBDA_TOL = 1e-9
SYMMETRY_TOL = 1e-12


class NumericalError(ArithmeticError):
    """Raised when a computation produces non-finite values or fails to converge."""


def as_population(X) -> np.ndarray:
    """Validate and return ``X`` as a float ``(N, d)`` population array.

    Raises
    ------
    ValueError
        If ``X`` is not two-dimensional, has fewer than two rows, or holds
        non-finite entries.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"population must be a 2-D array, got shape {X.shape}")
    if X.shape[0] < 2:
        raise ValueError(f"population needs at least 2 individuals, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise ValueError("population needs at least one decision variable")
    if not np.all(np.isfinite(X)):
        raise ValueError("population contains non-finite entries")
    return X


def cosine_adjacency(X) -> np.ndarray:
    """Cosine-similarity adjacency of centroid-difference vectors.

    Each individual ``x_i`` is represented by ``z_i = x_i - x_0`` where
    ``x_0`` is the column-mean centroid. Off-diagonal weights are
    ``max(0, cos(z_i, z_j))``; the diagonal is fixed to 1. An individual whose
    difference vector is shorter than :data:`CENTROID_EPS` has no edges other
    than its self-loop.

    Parameters
    ----------
    X : array_like, shape (N, d)
        Population, ``N >= 2``.

    Returns
    -------
    ndarray, shape (N, N)
        Symmetric weights in ``[0, 1]`` with unit diagonal.
    """
    X = as_population(X)
    Z = X - X.mean(axis=0)
    norms = np.linalg.norm(Z, axis=1)
    live = norms >= CENTROID_EPS
    U = np.zeros_like(Z)
    U[live] = Z[live] / norms[live, None]
    A = U @ U.T
    A = 0.5 * (A + A.T)
    np.clip(A, 0.0, 1.0, out=A)
    np.fill_diagonal(A, 1.0)
    return A


def normalized_laplacian(A) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric normalized Laplacian ``I - D^{-1/2} A D^{-1/2}``.

    Returns
    -------
    L : ndarray, shape (N, N)
        Exactly symmetric Laplacian.
    degrees : ndarray, shape (N,)
        Row sums of ``A``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    degrees = A.sum(axis=1)
    if not np.all(degrees > 0):
        raise NumericalError("adjacency has a non-positive degree")
    s = 1.0 / np.sqrt(degrees)
    L = np.eye(A.shape[0]) - s[:, None] * A * s[None, :]
    L = 0.5 * (L + L.T)
    return L, degrees


@dataclass(frozen=True)
class GraphSpectrum:
    """Eigendecomposition ``L = U diag(eigenvalues) U^T`` of a graph Laplacian.

    ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``; eigenvalues ascend.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray
    degrees: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.eigenvalues.shape[0]


def eig_sym(L, degrees=None) -> GraphSpectrum:
    """Eigendecomposition of a real symmetric matrix.

    Eigenvalues are returned in ascending order. Each eigenvector column is
    sign-normalized so that its first entry of magnitude above ``1e-12`` is
    positive, which makes the output deterministic.

    Parameters
    ----------
    L : array_like, shape (N, N)
        Symmetric within max-abs ``1e-12``.
    degrees : array_like, shape (N,), optional
        Degree vector to carry along in the result; defaults to ones.

    Raises
    ------
    ValueError
        If ``L`` is not square or not symmetric.
    NumericalError
        If the eigensolver does not converge.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"matrix must be square, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValueError("matrix contains non-finite entries")
    if np.max(np.abs(L - L.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    try:
        w, V = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    lead = np.argmax(np.abs(V) > 1e-12, axis=0)
    signs = np.sign(V[lead, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    V = V * signs
    if degrees is None:
        degrees = np.ones(L.shape[0])
    return GraphSpectrum(V, w, np.asarray(degrees, dtype=float))


def graph_spectrum(A) -> GraphSpectrum:
    """Laplacian spectrum of adjacency ``A`` including its degree vector."""
    L, degrees = normalized_laplacian(A)
    return eig_sym(L, degrees)


def _check_signal(spec: GraphSpectrum, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != spec.n_nodes:
        raise ValueError(
            f"signal has shape {X.shape}, expected ({spec.n_nodes}, d)"
        )
    return X


def gft(spec: GraphSpectrum, X) -> np.ndarray:
    """Graph Fourier transform ``U^T X``."""
    X = _check_signal(spec, X)
    return spec.eigenvectors.T @ X


def igft(spec: GraphSpectrum, X_hat) -> np.ndarray:
    """Inverse graph Fourier transform ``U X_hat``."""
    X_hat = _check_signal(spec, X_hat)
    return spec.eigenvectors @ X_hat


def frequency_component(spec: GraphSpectrum, X, k: int) -> np.ndarray:
    """Part of ``X`` carried by eigenvector ``k``: ``U_k U_k^T X``."""
    X = _check_signal(spec, X)
    if not 0 <= k < spec.n_nodes:
        raise IndexError(f"component index {k} out of range")
    u = spec.eigenvectors[:, k]
    return np.outer(u, u @ X)


@dataclass(frozen=True)
class FilterSpec:
    """Spectral filter expanded in Chebyshev polynomials over ``[0, 2]``.

    ``g(lam) = sum_k cheb_coeffs[k] * T_k(lam - 1)``.
    """

    cheb_coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in np.atleast_1d(self.cheb_coeffs))
        if len(coeffs) == 0:
            raise ValueError("filter needs at least one coefficient")
        if not all(np.isfinite(coeffs)):
            raise ValueError("filter coefficients must be finite")
        if not any(coeffs):
            raise ValueError("filter needs at least one nonzero coefficient")
        object.__setattr__(self, "cheb_coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.cheb_coeffs) - 1

    @classmethod
    def identity(cls) -> FilterSpec:
        return cls((1.0,))

    def __call__(self, lam):
        return cheb_eval(self, lam)


def cheb_eval(filt: FilterSpec, lam):
    """Evaluate ``filt`` at eigenvalue(s) ``lam`` in ``[0, 2]`` via Clenshaw's recurrence.

    Raises
    ------
    ValueError
        If any ``lam`` lies outside ``[-1e-9, 2 + 1e-9]``.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < -LAMBDA_TOL) or np.any(lam > 2.0 + LAMBDA_TOL) or not np.all(
        np.isfinite(lam)
    ):
        raise ValueError("eigenvalue outside the spectral interval [0, 2]")
    t = lam - 1.0
    c = filt.cheb_coeffs
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + ck, b1
    out = t * b1 - b2 + c[0]
    return float(out) if out.ndim == 0 else out


def apply_filter(spec: GraphSpectrum, filt: FilterSpec, X) -> np.ndarray:
    """Filtered signal ``U g(Lambda) U^T X``.

    Raises
    ------
    ValueError
        On a shape mismatch.
    NumericalError
        If the result is not finite.
    """
    X = _check_signal(spec, X)
    U = spec.eigenvectors
    lam = np.clip(spec.eigenvalues, 0.0, 2.0)
    out = U @ (cheb_eval(filt, lam)[:, None] * (U.T @ X))
    if not np.all(np.isfinite(out)):
        raise NumericalError("filtered population is not finite")
    return out


def eigenvalue_quadratic_form(spec: GraphSpectrum, A, k: int) -> float:
    """Degree-weighted smoothness of eigenvector ``k`` over the graph ``A``.

    Computes ``1/2 sum_ij A_ij (u_i/sqrt(d_i) - u_j/sqrt(d_j))^2`` with
    ``u = U[:, k]`` (0-based). For a spectrum computed from ``A`` this equals
    ``eigenvalues[k]``.
    """
    if not 0 <= k < spec.n_nodes:
        raise IndexError(f"eigenvalue index {k} out of range")
    A = np.asarray(A, dtype=float)
    v = spec.eigenvectors[:, k] / np.sqrt(spec.degrees)
    diff = v[:, None] - v[None, :]
    return float(0.5 * np.sum(A * diff * diff))
