"""Seeded generation of random instances.

Seeds are derived with the SplitMix64 finalizer::

    mix(seed, i) = splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64)

where ``splitmix64`` is the standard output function (shift/multiply by
``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``).  Each derived seed
feeds its own ``numpy.random.Generator(PCG64)``, so an instance depends
only on ``(master_seed, index)`` and never on generation order.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .algebra import BlockDiagonalElement, DensityElement, TracialMap, normalize_density, validate_shape
from .functions import FunctionPair, ScalarFunction

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
DENSITY_SHIFT = 1e-6

PAIR_FAMILIES = ("alpha_powers", "random_powers", "poly_exp_mix", "adversarial_non_monotone")
SAME_MONOTONE_FAMILIES = PAIR_FAMILIES[:3]


def splitmix64(x: int) -> int:
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, index: int) -> int:
    """Derive the ``index``-th child seed of ``seed``."""
    return splitmix64((seed + (index + 1) * GOLDEN) & MASK64)


def label_seed(seed: int, label: str) -> int:
    return mix(seed, zlib.crc32(label.encode()))


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def _uniform_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, (n, n)) + 1j * rng.uniform(-1.0, 1.0, (n, n))


def gen_hermitian(seed: int, dim: int) -> np.ndarray:
    """Hermitian matrix from uniform ``[-1, 1]`` real/imaginary parts, symmetrized."""
    if dim < 1:
        raise ValueError("dim must be positive")
    m = _uniform_complex(rng_for(seed), dim)
    return (m + m.conj().T) / 2


def gen_matrix(seed: int, dim: int) -> np.ndarray:
    """Unstructured complex matrix (generically non-normal)."""
    return _uniform_complex(rng_for(seed), dim)


def gen_normal(seed: int, dim: int) -> np.ndarray:
    """Normal matrix ``U diag(z) U*`` with complex eigenvalues."""
    rng = rng_for(seed)
    q, _ = np.linalg.qr(_uniform_complex(rng, dim))
    z = rng.uniform(-1, 1, dim) + 1j * rng.uniform(-1, 1, dim)
    return (q * z) @ q.conj().T


def gen_positive(seed: int, dim: int, shift: float = 0.1) -> np.ndarray:
    """Strictly positive ``G* G + shift I``."""
    g = _uniform_complex(rng_for(seed), dim)
    return g.conj().T @ g + shift * np.eye(dim)


def _element(gen, seed: int, shape) -> BlockDiagonalElement:
    return BlockDiagonalElement(tuple(gen(mix(seed, i), n) for i, n in enumerate(shape)))


def hermitian_element(seed: int, shape) -> BlockDiagonalElement:
    return _element(gen_hermitian, seed, shape)


def general_element(seed: int, shape) -> BlockDiagonalElement:
    return _element(gen_matrix, seed, shape)


def normal_element(seed: int, shape) -> BlockDiagonalElement:
    return _element(gen_normal, seed, shape)


def positive_element(seed: int, shape) -> BlockDiagonalElement:
    return _element(gen_positive, seed, shape)


def gen_density(seed: int, phi: TracialMap) -> DensityElement:
    """``P = G* G + 1e-6 I`` blockwise, normalized so that ``Phi(rho) = I``."""
    blocks = []
    for i, n in enumerate(phi.domain_shape):
        g = gen_matrix(mix(seed, i), n)
        blocks.append(g.conj().T @ g + DENSITY_SHIFT * np.eye(n))
    return normalize_density(phi, BlockDiagonalElement(tuple(blocks)))


def gen_function_pair(seed: int, family: str) -> FunctionPair:
    """Draw a function pair from a named family.

    ``alpha_powers``
        ``(x^(1-a), x^a)`` with ``a ~ U[0, 1]``.
    ``random_powers``
        ``(x^p, x^q)`` with ``p, q ~ U(0, 3]``; both increasing.
    ``poly_exp_mix``
        (polynomial with positive coefficients, ``exp``); both increasing.
    ``adversarial_non_monotone``
        ``(x, 1 - x)``, which is never same-monotone.
    """
    rng = rng_for(seed)
    if family == "alpha_powers":
        a = rng.uniform(0.0, 1.0)
        return FunctionPair(ScalarFunction.power(1.0 - a), ScalarFunction.power(a))
    if family == "random_powers":
        p, q = 3.0 - rng.uniform(0.0, 3.0, 2)
        return FunctionPair(ScalarFunction.power(p), ScalarFunction.power(q))
    if family == "poly_exp_mix":
        degree = int(rng.integers(1, 4))
        coeffs = rng.uniform(0.0, 1.0, degree + 1)
        coeffs[0] += 0.1
        return FunctionPair(ScalarFunction.polynomial(coeffs), ScalarFunction.exp())
    if family == "adversarial_non_monotone":
        return FunctionPair(ScalarFunction.power(1.0), ScalarFunction.affine(-1.0, 1.0))
    raise ValueError(f"unknown pair family {family!r}")


@dataclass(frozen=True)
class InstanceSpec:
    master_seed: int
    shape: tuple[int, ...]
    map_kind: str
    pair_family: str
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.pair_family not in PAIR_FAMILIES:
            raise ValueError(f"unknown pair family {self.pair_family!r}")
        object.__setattr__(self, "shape", validate_shape(self.shape))

    def seeds(self) -> list[int]:
        return [mix(self.master_seed, i) for i in range(self.count)]

    def to_json(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "shape": list(self.shape),
            "map_kind": self.map_kind,
            "pair_family": self.pair_family,
            "count": self.count,
        }

    @classmethod
    def from_json(cls, obj: dict) -> InstanceSpec:
        return cls(int(obj["master_seed"]), tuple(obj["shape"]), obj["map_kind"], obj["pair_family"], int(obj["count"]))
