"""Shared fixtures and independent reference computations for the tests.

The reference helpers here use ``numpy.linalg.eigh`` and explicit index
sums; they never call into the library's own eigensolver or measures.
"""

from __future__ import annotations

import sys

import numpy as np
import pytest

from qitineq.algebra import BlockDiagonalElement, DensityElement, make_map

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def el(*blocks) -> BlockDiagonalElement:
    return BlockDiagonalElement(tuple(np.asarray(b, dtype=complex) for b in blocks))


def qubit_density(p: float) -> DensityElement:
    return DensityElement(el(np.diag([p, 1 - p])), make_map("scalar_trace", (2,)))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def random_density_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    p = g.conj().T @ g + 1e-3 * np.eye(n)
    return p / np.trace(p).real


def ref_corr_trace(rho: np.ndarray, a: np.ndarray, b: np.ndarray, f, g) -> complex:
    """``Tr(f g A* B) - Tr(f A* g B)`` as the eigenbasis double sum
    ``sum_ij (f_i g_i - f_i g_j) conj(A_ji) B_ji``."""
    lam, u = np.linalg.eigh(rho)
    at = u.conj().T @ a @ u
    bt = u.conj().T @ b @ u
    fv, gv = f(lam), g(lam)
    coeff = (fv * gv)[None, :] - fv[None, :] * gv[:, None]  # indexed [j, i]
    return complex(np.sum(coeff * at.conj() * bt))


def ref_classical_cov(rho: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.trace(rho @ a.conj().T @ b) - np.trace(rho @ a.conj().T) * np.trace(rho @ b))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
