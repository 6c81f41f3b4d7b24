"""One-sided Jacobi SVD for 8x8 blocks.

Every routine works on a stack of blocks shaped ``(n, 8, 8)``.  Rotations are
applied to the whole stack at once; a block whose column pair is already
orthogonal gets the identity rotation, so each block's result is the same
whether it is decomposed alone or inside a larger stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N = 8
ORTHO_TOL = 1e-12
# columns below this fraction of the block's Frobenius norm are rounding noise
NEGLIGIBLE = 1e-15
MAX_SWEEPS = 60


class ConvergenceError(RuntimeError):
    """Jacobi sweeps did not reach the orthogonality tolerance."""


@dataclass(frozen=True)
class SvdFactors:
    """``block == u @ diag(singular_values) @ v.T`` for one 8x8 block."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    @property
    def rank(self) -> int:
        s = self.singular_values
        if s.size == 0 or s.max() == 0.0:
            return 0
        tol = s.max() * N * np.finfo(np.float64).eps
        return int(np.count_nonzero(s > tol))

    def with_sigma(self, index: int, value: float) -> "SvdFactors":
        """Copy with the singular value at zero-based ``index`` replaced."""
        s = self.singular_values.copy()
        s[index] = value
        return SvdFactors(self.u, s, self.v)


def _dot(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # fixed summation order keeps results independent of stack size/layout
    acc = x[:, 0] * y[:, 0]
    for i in range(1, N):
        acc = acc + x[:, i] * y[:, i]
    return acc


def _complete_basis(u: np.ndarray, null: np.ndarray) -> None:
    """Fill the columns flagged in ``null`` with an orthonormal completion."""
    eye = np.eye(N)
    for b in np.flatnonzero(null.any(axis=1)):
        basis = [u[b, :, j] for j in range(N) if not null[b, j]]
        for j in np.flatnonzero(null[b]):
            best, best_norm = None, -1.0
            for k in range(N):
                r = eye[k].copy()
                for _ in range(2):
                    for q in basis:
                        r -= (q @ r) * q
                nr = float(np.sqrt(r @ r))
                if nr > best_norm + 1e-12:
                    best, best_norm = r, nr
            vec = best / best_norm
            u[b, :, j] = vec
            basis.append(vec)


def svd8_batch(blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decompose a stack of 8x8 blocks.

    Returns ``(u, s, v)`` with shapes ``(n, 8, 8)``, ``(n, 8)``, ``(n, 8, 8)``;
    singular values are sorted descending and the largest-magnitude entry of
    every column of ``u`` is non-negative.
    """
    blocks = np.asarray(blocks, dtype=np.float64)
    single = blocks.ndim == 2
    if single:
        blocks = blocks[None]
    if blocks.shape[1:] != (N, N):
        raise ValueError(f"expected 8x8 blocks, got shape {blocks.shape}")
    n = blocks.shape[0]

    # exact power-of-two prescale keeps inner products clear of under/overflow
    peak = np.abs(blocks).max(axis=(1, 2))
    _, expo = np.frexp(np.where(peak > 0, peak, 1.0))
    # work on transposes so each column is a contiguous row
    at = np.ascontiguousarray(np.ldexp(blocks, -expo[:, None, None]).transpose(0, 2, 1))
    vt = np.repeat(np.eye(N)[None], n, axis=0)
    fro2 = sum(_dot(at[:, j, :], at[:, j, :]) for j in range(N))
    floor2 = (NEGLIGIBLE * NEGLIGIBLE) * fro2

    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(N - 1):
            for q in range(p + 1, N):
                ap, aq = at[:, p, :], at[:, q, :]
                alpha = _dot(ap, ap)
                beta = _dot(aq, aq)
                gamma = _dot(ap, aq)
                active = (np.abs(gamma) > ORTHO_TOL * np.sqrt(alpha * beta)) & (
                    np.minimum(alpha, beta) > floor2
                )
                if not active.any():
                    continue
                rotated = True
                g = np.where(active, gamma, 1.0)
                zeta = (beta - alpha) / (2.0 * g)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
                s = np.where(active, c * t, 0.0)
                c, s = c[:, None], s[:, None]
                new_p = c * ap - s * aq
                new_q = s * ap + c * aq
                at[:, p, :], at[:, q, :] = new_p, new_q
                vp, vq = vt[:, p, :], vt[:, q, :]
                new_vp = c * vp - s * vq
                new_vq = s * vp + c * vq
                vt[:, p, :], vt[:, q, :] = new_vp, new_vq
        if not rotated:
            break
    else:
        raise ConvergenceError(f"no convergence after {MAX_SWEEPS} sweeps")

    sigma = np.sqrt(np.stack([_dot(at[:, j, :], at[:, j, :]) for j in range(N)], axis=1))
    order = np.argsort(-sigma, axis=1, kind="stable")
    sigma = np.take_along_axis(sigma, order, axis=1)
    at = np.take_along_axis(at, order[:, :, None], axis=1)
    vt = np.take_along_axis(vt, order[:, :, None], axis=1)

    null = (sigma * sigma <= floor2[:, None]) | (sigma == 0.0)
    safe = np.where(null, 1.0, sigma)
    u = (at / safe[:, :, None]).transpose(0, 2, 1).copy()
    v = vt.transpose(0, 2, 1).copy()
    u[np.broadcast_to(null[:, None, :], u.shape)] = 0.0
    if null.any():
        _complete_basis(u, null)
        sigma = np.where(null, 0.0, sigma)

    sigma = np.ldexp(sigma, expo[:, None])

    # sign convention: largest |entry| of each u column is non-negative
    lead = np.argmax(np.abs(u), axis=1)
    pivot = np.take_along_axis(u, lead[:, None, :], axis=1)[:, 0, :]
    flip = np.where(pivot < 0, -1.0, 1.0)
    u *= flip[:, None, :]
    v *= flip[:, None, :]

    if single:
        return u[0], sigma[0], v[0]
    return u, sigma, v


def svd8(block: np.ndarray) -> SvdFactors:
    """Singular value decomposition of a single 8x8 block."""
    u, s, v = svd8_batch(np.asarray(block, dtype=np.float64).reshape(N, N))
    return SvdFactors(u, s, v)


def singular_values_batch(blocks: np.ndarray) -> np.ndarray:
    return svd8_batch(blocks)[1]


def reconstruct(factors: SvdFactors) -> np.ndarray:
    """``u @ diag(s) @ v.T``; the singular values need not be sorted."""
    return (factors.u * factors.singular_values) @ factors.v.T


def reconstruct_batch(u: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (u * s[:, None, :]) @ v.transpose(0, 2, 1)
