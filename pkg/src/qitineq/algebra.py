"""Finite-dimensional C*-algebras and tracial positive maps.

An algebra is a direct sum of full matrix blocks, described by its block
dimensions ``(n1, ..., nk)``.  Elements are stored block by block.  Four
tracial positive maps are provided:

``scalar_trace``
    ``X -> [sum_i Tr X_i]`` into the scalars.
``block_trace``
    ``X -> diag(Tr X_1, ..., Tr X_k)`` into a commutative algebra.
``center_expectation``
    ``X -> (+)_i (Tr X_i / n_i) I``, the unital tracial conditional
    expectation onto the center.
``doubling``
    ``[[A, B], [C, D]] -> [[(Phi(A) + Phi(D)) / 2, 0], [0, 0]]`` on
    ``M_2`` over an inner map ``Phi``.

The doubling map is never unital: its range lives in the upper-left corner
of each codomain block.  Inverses and strict-positivity tests on values of
a map are therefore taken inside that corner (:meth:`TracialMap.compress`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateBlock, ShapeMismatch, SingularB, WrongKind
from .report import DEFAULT_TOLERANCE, MarginReport

MAX_TOTAL_DIM = 32
DENSITY_FLOOR = 1e-8
DENSITY_TOL = 1e-9

SCALAR_TRACE = "scalar_trace"
BLOCK_TRACE = "block_trace"
CENTER_EXPECTATION = "center_expectation"
DOUBLING = "doubling"
MAP_KINDS = (SCALAR_TRACE, BLOCK_TRACE, CENTER_EXPECTATION, DOUBLING)


def validate_shape(shape) -> tuple[int, ...]:
    dims = tuple(int(n) for n in shape)
    if not dims:
        raise ShapeMismatch("an algebra needs at least one block")
    if any(n < 1 for n in dims):
        raise ShapeMismatch(f"block dimensions must be positive: {dims}")
    if sum(dims) > MAX_TOTAL_DIM:
        raise ShapeMismatch(f"total dimension {sum(dims)} exceeds {MAX_TOTAL_DIM}")
    return dims


def parse_shape(text: str) -> tuple[int, ...]:
    """``"2,2"`` -> ``(2, 2)``."""
    return validate_shape(int(t) for t in text.split(",") if t.strip())


@dataclass(frozen=True, eq=False)
class BlockDiagonalElement:
    """An element of ``M_{n1} (+) ... (+) M_{nk}``."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(linalg.as_matrix(b) for b in self.blocks)
        for b in blocks:
            if b.shape[0] != b.shape[1]:
                raise ShapeMismatch(f"block of shape {b.shape} is not square")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, *blocks) -> BlockDiagonalElement:
        return cls(tuple(blocks))

    @classmethod
    def identity(cls, shape) -> BlockDiagonalElement:
        return cls(tuple(np.eye(n, dtype=complex) for n in shape))

    @classmethod
    def zeros(cls, shape) -> BlockDiagonalElement:
        return cls(tuple(np.zeros((n, n), dtype=complex) for n in shape))

    @classmethod
    def scalars(cls, values, shape=None) -> BlockDiagonalElement:
        """Central element ``(+)_i c_i I_{n_i}``; ``shape`` defaults to all ones."""
        values = list(values)
        shape = (1,) * len(values) if shape is None else tuple(shape)
        return cls(tuple(c * np.eye(n, dtype=complex) for c, n in zip(values, shape)))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)

    @property
    def H(self) -> BlockDiagonalElement:
        return BlockDiagonalElement(tuple(b.conj().T for b in self.blocks))

    def _check(self, other: BlockDiagonalElement) -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other):
        self._check(other)
        return BlockDiagonalElement(tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check(other)
        return BlockDiagonalElement(tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return BlockDiagonalElement(tuple(-a for a in self.blocks))

    def __mul__(self, c):
        return BlockDiagonalElement(tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return BlockDiagonalElement(tuple(a / c for a in self.blocks))

    def __matmul__(self, other):
        self._check(other)
        return BlockDiagonalElement(tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(b) ** 2 for b in self.blocks)))

    def to_dense(self) -> np.ndarray:
        n = sum(self.shape)
        out = np.zeros((n, n), dtype=complex)
        k = 0
        for b in self.blocks:
            m = b.shape[0]
            out[k : k + m, k : k + m] = b
            k += m
        return out

    def hermitize(self) -> BlockDiagonalElement:
        return BlockDiagonalElement(tuple(linalg.hermitize(b) for b in self.blocks))

    def is_hermitian(self, tol: float = linalg.HERMITIAN_TOL) -> bool:
        return all(
            np.linalg.norm(b - b.conj().T) <= tol * linalg.scale_of(b) for b in self.blocks
        )

    def allclose(self, other: BlockDiagonalElement, atol: float = 1e-12) -> bool:
        return self.shape == other.shape and (self - other).norm() <= atol

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([linalg.eig_hermitian(b).eigenvalues for b in self.blocks]))

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "blocks": [linalg.matrix_to_json(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> BlockDiagonalElement:
        if "blocks" not in obj:
            # a bare matrix is a single-block element
            return cls((linalg.matrix_from_json(obj),))
        el = cls(tuple(linalg.matrix_from_json(b) for b in obj["blocks"]))
        if "shape" in obj and tuple(obj["shape"]) != el.shape:
            raise ShapeMismatch(f"declared shape {obj['shape']} but blocks have {el.shape}")
        return el

    def __repr__(self) -> str:
        return f"BlockDiagonalElement(shape={self.shape})"


def element_min_margin(x: BlockDiagonalElement) -> tuple[float, float]:
    """Normalized lambda_min of a Hermitian block element as one operator."""
    lam = min(linalg.min_eigenvalue(b) for b in x.blocks)
    norm = x.norm()
    return lam / max(1.0, norm), norm


@dataclass(frozen=True)
class TracialMap:
    """Descriptor of a tracial positive linear map.

    Use the module-level constructors :func:`scalar_trace`,
    :func:`block_trace`, :func:`center_expectation` and :func:`doubling`.
    ``shape`` is always the domain shape.
    """

    kind: str
    shape: tuple[int, ...]
    inner: TracialMap | None = None

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise WrongKind(f"unknown map kind {self.kind!r}")
        object.__setattr__(self, "shape", validate_shape(self.shape))
        if self.kind == DOUBLING:
            if self.inner is None:
                raise WrongKind("doubling needs an inner map")
            if self.shape != tuple(2 * n for n in self.inner.shape):
                raise ShapeMismatch("doubling domain must be M_2 over the inner domain")
        elif self.inner is not None:
            raise WrongKind(f"{self.kind} takes no inner map")

    @property
    def domain_shape(self) -> tuple[int, ...]:
        return self.shape

    @property
    def codomain_shape(self) -> tuple[int, ...]:
        if self.kind == SCALAR_TRACE:
            return (1,)
        if self.kind == BLOCK_TRACE:
            return (1,) * len(self.shape)
        if self.kind == CENTER_EXPECTATION:
            return self.shape
        return tuple(2 * m for m in self.inner.codomain_shape)

    @property
    def has_commutative_range(self) -> bool:
        if self.kind == DOUBLING:
            return self.inner.has_commutative_range
        return True

    @property
    def is_unital(self) -> bool:
        return self.kind == CENTER_EXPECTATION

    def label(self) -> str:
        if self.kind == DOUBLING:
            return f"doubling[{self.inner.label()}]"
        return f"{self.kind}{self.shape}"

    # evaluation
    def apply(self, x: BlockDiagonalElement) -> BlockDiagonalElement:
        if x.shape != self.shape:
            raise ShapeMismatch(f"{self.label()} expects shape {self.shape}, got {x.shape}")
        if self.kind == SCALAR_TRACE:
            return BlockDiagonalElement((np.array([[sum(np.trace(b) for b in x.blocks)]]),))
        if self.kind == BLOCK_TRACE:
            return BlockDiagonalElement(tuple(np.array([[np.trace(b)]]) for b in x.blocks))
        if self.kind == CENTER_EXPECTATION:
            return BlockDiagonalElement(
                tuple(np.trace(b) / b.shape[0] * np.eye(b.shape[0], dtype=complex) for b in x.blocks)
            )
        half = [n // 2 for n in self.shape]
        top = BlockDiagonalElement(tuple(b[:h, :h] for b, h in zip(x.blocks, half)))
        bottom = BlockDiagonalElement(tuple(b[h:, h:] for b, h in zip(x.blocks, half)))
        return self._embed((self.inner.apply(top) + self.inner.apply(bottom)) / 2)

    __call__ = apply

    def _embed(self, y: BlockDiagonalElement) -> BlockDiagonalElement:
        out = []
        for b in y.blocks:
            m = b.shape[0]
            z = np.zeros((2 * m, 2 * m), dtype=complex)
            z[:m, :m] = b
            out.append(z)
        return BlockDiagonalElement(tuple(out))

    # the corner algebra holding the range
    def compress(self, y: BlockDiagonalElement) -> BlockDiagonalElement:
        """Restrict a codomain element to the corner containing the range."""
        if self.kind != DOUBLING:
            return y
        return self.inner.compress(
            BlockDiagonalElement(tuple(b[: b.shape[0] // 2, : b.shape[0] // 2] for b in y.blocks))
        )

    def expand(self, z: BlockDiagonalElement) -> BlockDiagonalElement:
        """Inverse of :meth:`compress`, padding with zeros."""
        if self.kind != DOUBLING:
            return z
        return self._embed(self.inner.expand(z))

    @property
    def corner_shape(self) -> tuple[int, ...]:
        if self.kind == DOUBLING:
            return self.inner.corner_shape
        return self.codomain_shape

    def range_unit(self) -> BlockDiagonalElement:
        """Unit of the range corner; the identity for every map except doubling."""
        return self.expand(BlockDiagonalElement.identity(self.corner_shape))

    def inverse(self, y: BlockDiagonalElement, error=SingularB) -> BlockDiagonalElement:
        """Inverse of a strictly positive value of the map, within the range corner."""
        inv = []
        for b in self.compress(y).blocks:
            try:
                inv.append(linalg.inverse_strictly_positive(b))
            except SingularB as exc:
                raise error(str(exc)) from None
        return self.expand(BlockDiagonalElement(tuple(inv)))

    def _density_scales(self, traces: np.ndarray, dims: np.ndarray) -> np.ndarray:
        # every map here depends on X only through the block traces Tr X_i
        if self.kind == SCALAR_TRACE:
            return np.full(len(traces), 1.0 / traces.sum())
        if self.kind == BLOCK_TRACE:
            return 1.0 / traces
        if self.kind == CENTER_EXPECTATION:
            return dims / traces
        return 2.0 * self.inner._density_scales(traces, dims / 2)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "shape": list(self.shape)}
        if self.inner is not None:
            out["inner"] = self.inner.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> TracialMap:
        kind = obj["kind"]
        if kind == DOUBLING:
            inner = cls.from_json(obj["inner"])
            m = doubling(inner)
            if "shape" in obj and tuple(obj["shape"]) != m.shape:
                raise ShapeMismatch(f"doubling shape {obj['shape']} inconsistent with inner map")
            return m
        return cls(kind, tuple(obj["shape"]))


def scalar_trace(shape) -> TracialMap:
    return TracialMap(SCALAR_TRACE, tuple(shape))


def block_trace(shape) -> TracialMap:
    return TracialMap(BLOCK_TRACE, tuple(shape))


def center_expectation(shape) -> TracialMap:
    return TracialMap(CENTER_EXPECTATION, tuple(shape))


def doubling(inner: TracialMap) -> TracialMap:
    return TracialMap(DOUBLING, tuple(2 * n for n in inner.shape), inner)


def make_map(kind: str, shape) -> TracialMap:
    """Build a map from a CLI token; ``doubling`` wraps a scalar trace unless
    written ``doubling:<inner kind>``. ``shape`` is the inner domain shape."""
    base, _, inner_kind = kind.partition(":")
    if base == DOUBLING:
        return doubling(make_map(inner_kind or SCALAR_TRACE, shape))
    if inner_kind:
        raise WrongKind(f"{base} takes no inner map")
    if base not in MAP_KINDS:
        raise WrongKind(f"unknown map kind {kind!r}")
    return TracialMap(base, tuple(shape))


def apply_map(phi: TracialMap, x: BlockDiagonalElement) -> BlockDiagonalElement:
    return phi.apply(x)


@dataclass(frozen=True, eq=False)
class DensityElement:
    """A positive ``rho`` with ``Phi(rho)`` equal to the unit of the range."""

    rho: BlockDiagonalElement
    map: TracialMap

    def __post_init__(self):
        if self.rho.shape != self.map.domain_shape:
            raise ShapeMismatch(f"rho shape {self.rho.shape} vs map domain {self.map.domain_shape}")
        err = (self.map.apply(self.rho) - self.map.range_unit()).norm()
        if err > DENSITY_TOL:
            raise DegenerateBlock(f"Phi(rho) differs from the unit by {err:.3e}")


def normalize_density(
    phi: TracialMap, p: BlockDiagonalElement, floor: float = DENSITY_FLOOR
) -> DensityElement:
    """Rescale a positive ``P`` blockwise so that ``Phi(rho) = I``.

    Raises :class:`DegenerateBlock` when a block trace (or the total trace
    for a scalar trace) falls below ``floor``.
    """
    if p.shape != phi.domain_shape:
        raise ShapeMismatch(f"P shape {p.shape} vs map domain {phi.domain_shape}")
    p = p.hermitize()
    for b in p.blocks:
        if not linalg.is_psd(b):
            raise DegenerateBlock("P is not positive semidefinite")
    traces = np.array([np.trace(b).real for b in p.blocks])
    base = phi
    while base.kind == DOUBLING:
        base = base.inner
    if base.kind == SCALAR_TRACE:
        if traces.sum() < floor:
            raise DegenerateBlock(f"total trace {traces.sum():.3e} below floor {floor:g}")
    elif np.any(traces < floor):
        raise DegenerateBlock(f"block trace {traces.min():.3e} below floor {floor:g}")
    scales = phi._density_scales(traces, np.array(p.shape, dtype=float))
    rho = BlockDiagonalElement(tuple(s * b for s, b in zip(scales, p.blocks)))
    return DensityElement(rho, phi)


def kadison_check(
    phi: TracialMap,
    a: BlockDiagonalElement,
    b: BlockDiagonalElement,
    *,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """Margin of ``Phi(A* B^-1 A) - Phi(A)* Phi(B)^-1 Phi(A)`` for ``B > 0``."""
    b_inv = BlockDiagonalElement(tuple(linalg.inverse_strictly_positive(x) for x in b.blocks))
    phi_a = phi.apply(a)
    lhs = phi.apply(a.H @ b_inv @ a)
    rhs = phi_a.H @ phi.inverse(phi.apply(b)) @ phi_a
    diff = phi.compress(lhs - rhs)
    value, norm = element_min_margin(diff.hermitize())
    return MarginReport.build("kadison", [("kadison", value, norm)], seed=seed, tolerance=tolerance)


def factorize_block_trace(phi: TracialMap) -> tuple[TracialMap, TracialMap]:
    """Split a block trace through the commutative algebra ``C^k``.

    ``phi1`` is the block trace into ``(1, ..., 1)``; ``phi2`` is the
    identity on that commutative algebra, realized as the center
    expectation of an all-ones shape (which is exactly the identity).
    """
    if phi.kind != BLOCK_TRACE:
        raise WrongKind(f"expected a block trace, got {phi.kind}")
    phi1 = block_trace(phi.shape)
    phi2 = center_expectation(phi1.codomain_shape)
    return phi1, phi2


def compose(outer: TracialMap, inner: TracialMap, x: BlockDiagonalElement) -> BlockDiagonalElement:
    return outer.apply(inner.apply(x))

