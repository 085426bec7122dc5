"""Generalized covariance, variance, correlation and skew information.

For a tracial positive map ``Phi``, a Hermitian ``rho`` and functions
``f``, ``g`` applied to ``rho`` by spectral calculus::

    Cov(A, B)  = Phi(f A*B) - Phi(f g A*) Phi(f g^2)^-1 Phi(f g B)
    Corr(A, B) = Phi(f g A*B) - Phi(f A* g B)
    Corr'(A, B) = (Corr(A, B) + Corr(B*, A*)) / 2

with ``Var(A) = Cov(A, A)`` and ``I(A) = Corr(A, A)``.  Only the
covariance side needs ``Phi(f g^2)`` strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

from . import linalg
from .algebra import BlockDiagonalElement, TracialMap
from .errors import DomainViolation, ShapeMismatch, SingularNormalizer
from .functions import FunctionPair, ScalarFunction, alpha_pair

CLUSTER_TOL = 1e-8
MAX_EXACT_DEGREE = 8

Element = BlockDiagonalElement


@dataclass(frozen=True, eq=False)
class MeasureContext:
    """``(Phi, rho, (f, g))`` with the spectrum of ``rho`` computed once."""

    map: TracialMap
    rho: Element
    pair: FunctionPair

    def __post_init__(self):
        if self.rho.shape != self.map.domain_shape:
            raise ShapeMismatch(f"rho shape {self.rho.shape} vs map domain {self.map.domain_shape}")
        # fail early on spectra outside either function's domain
        lam = self.eigenvalues
        self.pair.f(lam)
        self.pair.g(lam)

    @property
    def f(self) -> ScalarFunction:
        return self.pair.f

    @property
    def g(self) -> ScalarFunction:
        return self.pair.g

    @cached_property
    def spectra(self) -> tuple[linalg.HermitianSpectrum, ...]:
        return tuple(linalg.eig_hermitian(b) for b in self.rho.blocks)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([s.eigenvalues for s in self.spectra])

    def apply(self, fn) -> Element:
        """``fn(rho)`` blockwise; ``fn`` maps eigenvalue arrays to real arrays."""
        return Element(tuple(s.reconstruct(np.asarray(fn(s.eigenvalues), dtype=float)) for s in self.spectra))

    def _product(self, *fns: ScalarFunction) -> Element:
        """``prod fns(rho)``; exact Horner evaluation when every factor is a polynomial."""
        coeffs = [_poly_coeffs(fn) for fn in fns]
        if all(c is not None for c in coeffs):
            c = np.array([1.0])
            for ci in coeffs:
                c = P.polymul(c, ci)
            return Element(tuple(_horner(c, b) for b in self.rho.blocks))
        return self.apply(lambda x: np.prod([fn(x) for fn in fns], axis=0))

    @cached_property
    def f_rho(self) -> Element:
        return self._product(self.f)

    @cached_property
    def g_rho(self) -> Element:
        return self._product(self.g)

    @cached_property
    def fg_rho(self) -> Element:
        return self._product(self.f, self.g)

    @cached_property
    def fg2_rho(self) -> Element:
        return self._product(self.f, self.g, self.g)

    @cached_property
    def normalizer_inverse(self) -> Element:
        """``Phi(f g^2)^-1`` (inside the range corner)."""
        return self.map.inverse(self.map.apply(self.fg2_rho), error=SingularNormalizer)

    def phi(self, x: Element) -> Element:
        return self.map.apply(x)

    def same_monotone(self) -> bool:
        return self.pair.certify_same_monotone(self.eigenvalues)

    def with_pair(self, pair: FunctionPair) -> MeasureContext:
        return MeasureContext(self.map, self.rho, pair)


def _poly_coeffs(fn: ScalarFunction) -> np.ndarray | None:
    """Ascending coefficients when ``fn`` is a polynomial, else ``None``."""
    k, p = fn.kind, fn.params
    if k == "identity":
        return np.array([0.0, 1.0])
    if k == "constant":
        return np.array([p[0]])
    if k == "affine":
        return np.array([p[1], p[0]])
    if k == "polynomial":
        return np.array(p, dtype=float)
    if k == "power" and float(p[0]).is_integer() and 0 <= p[0] <= MAX_EXACT_DEGREE:
        return np.eye(int(p[0]) + 1)[-1]
    return None


def _horner(coeffs: np.ndarray, m: np.ndarray) -> np.ndarray:
    out = coeffs[-1] * np.eye(m.shape[0], dtype=complex)
    for c in coeffs[-2::-1]:
        out = out @ m + c * np.eye(m.shape[0])
    return out


def _check(ctx: MeasureContext, *elements: Element) -> None:
    for x in elements:
        if x.shape != ctx.map.domain_shape:
            raise ShapeMismatch(f"operand shape {x.shape} vs map domain {ctx.map.domain_shape}")


def gen_covariance(ctx: MeasureContext, a: Element, b: Element) -> Element:
    _check(ctx, a, b)
    f, fg = ctx.f_rho, ctx.fg_rho
    first = ctx.phi(f @ a.H @ b)
    left = ctx.phi(fg @ a.H)
    right = ctx.phi(fg @ b)
    return first - left @ ctx.normalizer_inverse @ right


def gen_variance(ctx: MeasureContext, a: Element) -> Element:
    return gen_covariance(ctx, a, a)


def gen_correlation(ctx: MeasureContext, a: Element, b: Element) -> Element:
    _check(ctx, a, b)
    return ctx.phi(ctx.fg_rho @ a.H @ b) - ctx.phi(ctx.f_rho @ a.H @ ctx.g_rho @ b)


def skew_information(ctx: MeasureContext, a: Element) -> Element:
    return gen_correlation(ctx, a, a)


def sym_correlation(ctx: MeasureContext, a: Element, b: Element) -> Element:
    return (gen_correlation(ctx, a, b) + gen_correlation(ctx, b.H, a.H)) / 2


def sym_skew(ctx: MeasureContext, a: Element) -> Element:
    return sym_correlation(ctx, a, a)


def eigenprojections(ctx: MeasureContext) -> list[tuple[float, Element]]:
    """Spectral projections of ``rho`` as ``(eigenvalue, E)`` pairs.

    Eigenvalues within ``1e-8 * spread`` of their sorted neighbour share a
    projection, so the projections always sum to the identity.
    """
    lam = ctx.eigenvalues
    spread = float(lam.max() - lam.min()) if lam.size else 0.0
    values = np.sort(lam)
    clusters: list[list[float]] = []
    for v in values:
        if clusters and v - clusters[-1][-1] <= CLUSTER_TOL * spread:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    out = []
    for cl in clusters:
        lo, hi = cl[0], cl[-1]
        blocks = []
        for s in ctx.spectra:
            mask = (s.eigenvalues >= lo) & (s.eigenvalues <= hi)
            u = s.eigenvectors[:, mask]
            blocks.append(u @ u.conj().T)
        out.append((float(np.mean(cl)), Element(tuple(blocks))))
    return out


def spectral_sum_correlation(ctx: MeasureContext, a: Element, b: Element) -> Element:
    """Independent evaluation of ``Corr(A, B)`` as a double sum over projections.

    ``sum_ij (f_i g_i - f_i g_j) Phi(E_i A* E_j B)``.
    """
    _check(ctx, a, b)
    proj = eigenprojections(ctx)
    lam = np.array([v for v, _ in proj])
    fv, gv = ctx.f(lam), ctx.g(lam)
    total = Element.zeros(ctx.map.codomain_shape)
    a_star = a.H
    for i, (_, ei) in enumerate(proj):
        left = ei @ a_star
        for j, (_, ej) in enumerate(proj):
            coeff = fv[i] * gv[i] - fv[i] * gv[j]
            if coeff != 0.0:
                total = total + coeff * ctx.phi(left @ ej @ b)
    return total


def alpha_context(phi: TracialMap, rho: Element, alpha: float) -> MeasureContext:
    """Context for the pair ``(x^(1-alpha), x^alpha)``."""
    ctx = MeasureContext(phi, rho, alpha_pair(alpha))
    if ctx.eigenvalues.min() < -1e-12 * max(1.0, float(np.abs(ctx.eigenvalues).max())):
        raise DomainViolation("alpha context needs a positive semidefinite rho")
    return ctx
