"""Dense complex matrix primitives.

Matrices are plain ``numpy`` ``complex128`` arrays.  The eigensolver is a
cyclic Jacobi method for complex Hermitian matrices; everything else
(spectral calculus, Loewner-order tests, Schur complements) is built on
top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, SingularB

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
STRICT_TOL = 1e-10
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-12


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues (ascending) and unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        """Return ``U diag(values) U*``; ``values`` defaults to the eigenvalues."""
        lam = self.eigenvalues if values is None else values
        u = self.eigenvectors
        return (u * lam) @ u.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def scale_of(m: np.ndarray) -> float:
    """``max(1, ||m||_F)``, the normalization used by every relative tolerance."""
    return max(1.0, float(np.linalg.norm(m)))


def _require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")


def hermitize(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize ``m`` if it is Hermitian up to ``tol`` (relative), else raise."""
    a = as_matrix(m)
    _require_square(a)
    asym = float(np.linalg.norm(a - a.conj().T))
    if asym > tol * scale_of(a):
        raise NotHermitian(f"||M - M*||_F = {asym:.3e} exceeds tolerance")
    return (a + a.conj().T) / 2


def _jacobi(a: np.ndarray, max_sweeps: int, tol: float) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    target = tol * float(np.linalg.norm(a))
    for _ in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(a.diagonal())))
        if off <= target:
            return a.diagonal().real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                b = abs(apq)
                if b == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                zeta = (aqq - app) / (2.0 * b)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / b
                sc = s * ph.conjugate()
                cc = c * ph.conjugate()
                # columns: A <- A G with G = [[c, s], [-s conj(ph), c conj(ph)]]
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - sc * colq
                a[:, q] = s * colp + cc * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * ph * rowq
                a[q, :] = s * rowp + c * ph * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * b
                a[q, q] = aqq + t * b
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - sc * vq
                v[:, q] = s * vp + cc * vq
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def eig_hermitian(
    m, *, max_sweeps: int = MAX_SWEEPS, tol: float = OFFDIAG_TOL
) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Square matrix, Hermitian up to ``1e-10`` relative asymmetry; it is
        symmetrized before the sweep.
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`NoConvergence`.
    tol : float
        Stop once the off-diagonal Frobenius mass is at most ``tol * ||M||_F``.

    Returns
    -------
    HermitianSpectrum
        Ascending eigenvalues with matching unitary eigenvector columns.
    """
    a = hermitize(m)
    n = a.shape[0]
    if n == 1:
        return HermitianSpectrum(a.diagonal().real.copy(), np.eye(1, dtype=complex))
    lam, v = _jacobi(a.copy(), max_sweeps, tol)
    order = np.argsort(lam, kind="stable")
    return HermitianSpectrum(lam[order], v[:, order])


def apply_function(m, f: Callable[[np.ndarray], np.ndarray], spectrum: HermitianSpectrum | None = None) -> np.ndarray:
    """Spectral calculus: ``U diag(f(lambda)) U*``.

    ``f`` maps an array of eigenvalues to an array of real values; scalar
    function objects from :mod:`qitineq.functions` qualify and raise
    ``DomainViolation`` themselves.
    """
    spec = eig_hermitian(m) if spectrum is None else spectrum
    values = np.asarray(f(spec.eigenvalues), dtype=float)
    out = spec.reconstruct(values)
    return (out + out.conj().T) / 2


def min_eigenvalue(m) -> float:
    return float(eig_hermitian(m).eigenvalues[0])


def normalized_min_eigenvalue(m) -> tuple[float, float]:
    """Return ``(lambda_min / max(1, ||M||_F), ||M||_F)``."""
    a = hermitize(m)
    return min_eigenvalue(a) / scale_of(a), float(np.linalg.norm(a))


def is_psd(m, tol: float = PSD_TOL) -> bool:
    a = hermitize(m)
    return min_eigenvalue(a) >= -tol * scale_of(a)


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    _require_square(a)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return a @ b - b @ a


def real_part(a) -> np.ndarray:
    """Hermitian real part ``(A + A*)/2``."""
    a = as_matrix(a)
    _require_square(a)
    return (a + a.conj().T) / 2


def imag_part(a) -> np.ndarray:
    """Hermitian imaginary part ``(A - A*)/(2i)``."""
    a = as_matrix(a)
    _require_square(a)
    return (a - a.conj().T) / 2j


def inverse_strictly_positive(m, threshold: float = STRICT_TOL) -> np.ndarray:
    """Inverse of a strictly positive matrix through its spectrum.

    Raises :class:`SingularB` when ``lambda_min <= threshold * max(1, ||M||_F)``;
    near-singular inputs are rejected rather than regularized.
    """
    a = hermitize(m)
    spec = eig_hermitian(a)
    lam_min = spec.eigenvalues[0]
    if lam_min <= threshold * scale_of(a):
        raise SingularB(f"lambda_min = {lam_min:.3e} is not strictly positive")
    inv = spec.reconstruct(1.0 / spec.eigenvalues)
    return (inv + inv.conj().T) / 2


def block_matrix(blocks) -> np.ndarray:
    return np.block([[as_matrix(x) for x in row] for row in blocks])


def schur_psd_check(a, x, b, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Positivity of ``[[A, X], [X*, B]]`` via the Schur complement ``A - X B^-1 X*``.

    Returns ``(passed, margin)`` where ``margin`` is the normalized minimum
    eigenvalue of the Schur complement.
    """
    a = hermitize(a)
    b = hermitize(b)
    x = as_matrix(x)
    if x.shape != (a.shape[0], b.shape[0]):
        raise DimensionMismatch(f"X is {x.shape}, expected {(a.shape[0], b.shape[0])}")
    s = a - x @ inverse_strictly_positive(b) @ x.conj().T
    margin, _ = normalized_min_eigenvalue((s + s.conj().T) / 2)
    return margin >= -tol, margin


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim == 1:
        re = re.reshape(1, -1)
        im = im.reshape(1, -1)
    if re.shape != im.shape:
        raise DimensionMismatch("re/im shapes differ")
    rows, cols = int(obj.get("rows", re.shape[0])), int(obj.get("cols", re.shape[1]))
    if re.shape != (rows, cols):
        raise DimensionMismatch(f"declared {rows}x{cols}, data is {re.shape}")
    return as_matrix(re + 1j * im)
