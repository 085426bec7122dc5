"""Scalar functions for spectral calculus and same-monotone pairs.

A :class:`ScalarFunction` evaluates on arrays of eigenvalues, knows its
domain, and knows (when it can tell symbolically) whether it is monotone
on an interval.  The textual mini-language used by the CLI is::

    pow:0.5   id   const:2   exp   log   poly:1,0,3   affine:a,b

where ``poly:c0,c1,c2`` is ``c0 + c1 x + c2 x^2`` and ``affine:a,b`` is
``a x + b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation

SAME_MONOTONE_TOL = 1e-12
GRID_POINTS = 64
# eigenvalues this far below zero (relative) are rounding noise for x >= 0 domains
_EDGE_TOL = 1e-12

INCREASING = "increasing"
DECREASING = "decreasing"
CONSTANT = "constant"


@dataclass(frozen=True)
class ScalarFunction:
    """A real function of one real variable.

    ``kind`` is one of ``power``, ``constant``, ``identity``, ``exp``,
    ``log``, ``polynomial``, ``affine``; ``params`` holds the numeric
    parameters in the order the mini-language writes them.
    """

    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown function kind {self.kind!r}")
        arity = _ARITY[self.kind]
        if arity is None:
            if len(self.params) == 0:
                raise ValueError("polynomial needs at least one coefficient")
        elif len(self.params) != arity:
            raise ValueError(f"{self.kind} takes {arity} parameter(s)")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    # constructors
    @classmethod
    def power(cls, exponent: float) -> ScalarFunction:
        return cls("power", (exponent,))

    @classmethod
    def constant(cls, c: float) -> ScalarFunction:
        return cls("constant", (c,))

    @classmethod
    def identity(cls) -> ScalarFunction:
        return cls("identity")

    @classmethod
    def exp(cls) -> ScalarFunction:
        return cls("exp")

    @classmethod
    def log(cls) -> ScalarFunction:
        return cls("log")

    @classmethod
    def polynomial(cls, coeffs) -> ScalarFunction:
        return cls("polynomial", tuple(coeffs))

    @classmethod
    def affine(cls, a: float, b: float) -> ScalarFunction:
        return cls("affine", (a, b))

    # domain
    def _domain(self) -> tuple[float, bool]:
        """``(lower bound, lower bound is open)``; ``-inf`` when unbounded."""
        if self.kind == "log":
            return 0.0, True
        if self.kind == "power":
            p = self.params[0]
            if p == 0 or (float(p).is_integer() and p > 0):
                return -np.inf, False
            return 0.0, p < 0
        return -np.inf, False

    def prepare(self, x: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """Check ``x`` against the domain, clamping rounding noise at a closed edge."""
        x = np.asarray(x, dtype=float)
        lo, open_ = self._domain()
        if lo == -np.inf:
            return x
        tol = _EDGE_TOL * max(1.0, scale)
        if open_:
            if np.any(x <= lo):
                raise DomainViolation(f"{self.to_spec()} needs x > {lo:g}; got min {x.min():.3e}")
            return x
        if np.any(x < lo - tol):
            raise DomainViolation(f"{self.to_spec()} needs x >= {lo:g}; got min {x.min():.3e}")
        return np.maximum(x, lo)

    def in_domain(self, lo: float, hi: float) -> bool:
        try:
            self.prepare(np.array([lo, hi]))
        except DomainViolation:
            return False
        return True

    def __call__(self, x) -> np.ndarray:
        x = self.prepare(x, float(np.max(np.abs(x), initial=0.0)))
        k, p = self.kind, self.params
        if k == "power":
            if p[0] == 0:
                return np.ones_like(x)
            return np.power(x, p[0])
        if k == "constant":
            return np.full_like(x, p[0])
        if k == "identity":
            return x.copy()
        if k == "exp":
            return np.exp(x)
        if k == "log":
            return np.log(x)
        if k == "polynomial":
            return np.polynomial.polynomial.polyval(x, p)
        if k == "affine":
            return p[0] * x + p[1]
        raise AssertionError(k)

    def monotonicity(self, lo: float, hi: float) -> str | None:
        """Symbolic monotonicity on ``[lo, hi]``, or ``None`` when undecided."""
        k, p = self.kind, self.params
        if k == "constant" or (k == "power" and p[0] == 0) or lo == hi:
            return CONSTANT
        if k in ("identity", "exp", "log"):
            return INCREASING
        if k == "affine":
            return CONSTANT if p[0] == 0 else (INCREASING if p[0] > 0 else DECREASING)
        if k == "power":
            e = p[0]
            if lo >= 0:
                return INCREASING if e > 0 else DECREASING
            if float(e).is_integer() and e % 2 == 1:
                return INCREASING
            return None
        if k == "polynomial":
            if len(p) == 1 or all(c == 0 for c in p[1:]):
                return CONSTANT
            if lo >= 0 and all(c >= 0 for c in p[1:]):
                return INCREASING
            return None
        return None

    def to_spec(self) -> str:
        k, p = self.kind, self.params
        if k in ("identity", "exp", "log"):
            return {"identity": "id", "exp": "exp", "log": "log"}[k]
        name = {"power": "pow", "constant": "const", "polynomial": "poly", "affine": "affine"}[k]
        return name + ":" + ",".join(repr(v) for v in p)

    def __str__(self) -> str:
        return self.to_spec()


_ARITY = {
    "power": 1,
    "constant": 1,
    "identity": 0,
    "exp": 0,
    "log": 0,
    "polynomial": None,
    "affine": 2,
}

_TOKENS = {
    "pow": "power",
    "const": "constant",
    "id": "identity",
    "exp": "exp",
    "log": "log",
    "poly": "polynomial",
    "affine": "affine",
}


def parse_function(text: str) -> ScalarFunction:
    """Parse the function mini-language, e.g. ``"pow:0.5"`` or ``"poly:1,0,3"``."""
    name, _, rest = text.strip().partition(":")
    kind = _TOKENS.get(name.strip().lower())
    if kind is None:
        raise ValueError(f"unknown function {text!r}")
    params = tuple(float(v) for v in rest.split(",")) if rest.strip() else ()
    return ScalarFunction(kind, params)


@dataclass(frozen=True)
class FunctionPair:
    f: ScalarFunction
    g: ScalarFunction

    def symbolic_same_monotone(self, lo: float, hi: float) -> bool:
        mf = self.f.monotonicity(lo, hi)
        mg = self.g.monotonicity(lo, hi)
        if mf is None or mg is None:
            return False
        return CONSTANT in (mf, mg) or mf == mg

    def same_monotone_on(self, points) -> bool:
        """Pointwise check ``(f(x)-f(y))(g(x)-g(y)) >= -1e-12`` over all pairs."""
        x = np.unique(np.asarray(points, dtype=float))
        fx, gx = self.f(x), self.g(x)
        prod = (fx[:, None] - fx[None, :]) * (gx[:, None] - gx[None, :])
        return bool(np.all(prod >= -SAME_MONOTONE_TOL))

    def certify_same_monotone(self, spectrum) -> bool:
        """Same-monotonicity on the interval enclosing ``spectrum``.

        Symbolic when both functions have a known monotonicity there,
        otherwise a pairwise check on the spectrum plus a 64-point grid.
        """
        spectrum = np.asarray(spectrum, dtype=float)
        lo, hi = float(spectrum.min()), float(spectrum.max())
        if self.symbolic_same_monotone(lo, hi):
            return True
        points = np.concatenate([spectrum, np.linspace(lo, hi, GRID_POINTS)])
        return self.same_monotone_on(points)

    def to_json(self) -> dict:
        return {"f": self.f.to_spec(), "g": self.g.to_spec()}

    @classmethod
    def from_json(cls, obj: dict) -> FunctionPair:
        return cls(parse_function(obj["f"]), parse_function(obj["g"]))


def alpha_pair(alpha: float) -> FunctionPair:
    """``(x^(1-alpha), x^alpha)``, the Wigner-Yanase-Dyson family."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return FunctionPair(ScalarFunction.power(1.0 - alpha), ScalarFunction.power(alpha))


def classical_pair() -> FunctionPair:
    """``(x, 1)``: generalized covariance reduces to the classical one."""
    return FunctionPair(ScalarFunction.identity(), ScalarFunction.constant(1.0))

