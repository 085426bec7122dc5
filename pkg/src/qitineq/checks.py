"""One margin checker per inequality.

Every checker assembles the operator(s) an inequality claims to be
positive semidefinite and reports the normalized minimum eigenvalue of
each (see :func:`qitineq.report.margin`).  Block operator matrices over a
codomain are assembled densely; for the doubling map the operands are
first restricted to the corner that holds the map's range, where the
rest of the codomain is identically zero.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import linalg
from .algebra import (
    BLOCK_TRACE,
    CENTER_EXPECTATION,
    SCALAR_TRACE,
    BlockDiagonalElement,
    DensityElement,
    kadison_check,
)
from .errors import (
    DomainViolation,
    NonCommutativeRange,
    NotHermitian,
    NotSameMonotone,
    SingularNormalizer,
    WrongKind,
)
from .functions import classical_pair
from .measures import (
    MeasureContext,
    alpha_context,
    gen_correlation,
    gen_covariance,
    gen_variance,
)
from .report import DEFAULT_TOLERANCE, MarginReport, margin

Element = BlockDiagonalElement
Correlation = Callable[[MeasureContext, Element, Element], Element]

VAR_THRESHOLD = 1e-10


# helpers

def _entry(label: str, op) -> tuple[str, float, float]:
    if isinstance(op, Element):
        op = op.to_dense()
    value, norm = margin(op)
    return label, value, norm


def _corner(ctx: MeasureContext, x: Element) -> np.ndarray:
    return ctx.map.compress(x).to_dense()


def _block2(ctx: MeasureContext, p: Element, q: Element, r: Element, s: Element) -> np.ndarray:
    return linalg.block_matrix([[_corner(ctx, p), _corner(ctx, q)], [_corner(ctx, r), _corner(ctx, s)]])


def _scalar(x: Element) -> complex:
    return complex(x.blocks[0][0, 0])


def _require_hermitian(*elements: Element) -> None:
    for x in elements:
        if not x.is_hermitian():
            raise NotHermitian("observable must be self-adjoint")


def _require_positive(ctx: MeasureContext, *names: str) -> None:
    lam = ctx.eigenvalues
    for name in names:
        fn = getattr(ctx, name)
        if np.any(fn(lam) <= 0):
            raise DomainViolation(f"{name} = {fn} must be strictly positive on the spectrum of rho")


def _require_same_monotone(ctx: MeasureContext, enforce: bool) -> None:
    if enforce and not ctx.same_monotone():
        raise NotSameMonotone(f"({ctx.f}, {ctx.g}) is not same-monotone on the spectrum of rho")


def _require_scalar_trace(density: DensityElement) -> None:
    if density.map.kind != SCALAR_TRACE:
        raise WrongKind(f"classical inequalities use the scalar trace, got {density.map.kind}")


def _sym(corr: Correlation, ctx: MeasureContext, a: Element, b: Element) -> Element:
    return (corr(ctx, a, b) + corr(ctx, b.H, a.H)) / 2


def _herm(x: Element) -> Element:
    return Element(tuple((b + b.conj().T) / 2 for b in x.blocks))


def _report(check_id, entries, seed, tolerance) -> MarginReport:
    return MarginReport.build(check_id, entries, seed=seed, tolerance=tolerance)


def _classical_context(density: DensityElement) -> MeasureContext:
    _require_scalar_trace(density)
    return MeasureContext(density.map, density.rho, classical_pair())


def _classical_terms(density: DensityElement, a: Element, b: Element):
    _require_hermitian(a, b)
    ctx = _classical_context(density)
    var_a = _scalar(gen_variance(ctx, a)).real
    var_b = _scalar(gen_variance(ctx, b)).real
    cov = _scalar(gen_covariance(ctx, a, b))
    comm = _scalar(ctx.phi(density.rho @ (a @ b - b @ a)))
    return var_a, var_b, cov, comm


# uncertainty relations for the ordinary trace

def check_classical_heisenberg(
    density: DensityElement, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``Var(A) Var(B) - |Tr(rho [A, B])|^2 / 4``."""
    var_a, var_b, _, comm = _classical_terms(density, a, b)
    m = var_a * var_b - abs(comm) ** 2 / 4
    return _report("classical_heisenberg", [_entry("heisenberg", [[m]])], seed, tolerance)


def check_classical_schrodinger(
    density: DensityElement, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``Var(A) Var(B) - (Re Cov)^2 - |Tr(rho [A, B])|^2 / 4``, plus the gap to Heisenberg."""
    var_a, var_b, cov, comm = _classical_terms(density, a, b)
    heis = var_a * var_b - abs(comm) ** 2 / 4
    schr = heis - cov.real**2
    return _report(
        "classical_schrodinger",
        [_entry("schrodinger", [[schr]]), _entry("refinement", [[heis - schr]])],
        seed,
        tolerance,
    )


def check_classical_corr_cs(
    density: DensityElement,
    alpha: float,
    a: Element,
    b: Element,
    *,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``I^a(A) I^a(B) - |Re Corr^a(A, B)|^2`` for the ordinary trace."""
    _require_scalar_trace(density)
    _require_hermitian(a, b)
    ctx = alpha_context(density.map, density.rho, alpha)
    i_a = _scalar(corr(ctx, a, a)).real
    i_b = _scalar(corr(ctx, b, b)).real
    re = _scalar(corr(ctx, a, b)).real
    return _report("classical_corr_cs", [_entry("corr_cs", [[i_a * i_b - re**2]])], seed, tolerance)


def check_variance_covariance_classical(
    density: DensityElement, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``Var(A) - Cov(A, B) Var(B)^-1 Cov(B, A)``."""
    _require_hermitian(a, b)
    ctx = _classical_context(density)
    var_a = _scalar(gen_variance(ctx, a)).real
    var_b = _scalar(gen_variance(ctx, b)).real
    if var_b <= VAR_THRESHOLD * max(1.0, abs(var_a)):
        raise SingularNormalizer(f"Var(B) = {var_b:.3e} is not strictly positive")
    cov_ab = _scalar(gen_covariance(ctx, a, b))
    cov_ba = _scalar(gen_covariance(ctx, b, a))
    m = var_a - (cov_ab * cov_ba).real / var_b
    return _report("variance_covariance_classical", [_entry("var_cov", [[m]])], seed, tolerance)


# covariance and variance for tracial maps

def check_var_cov_matrix(
    ctx: MeasureContext, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``[[Var(A), Cov(A, B)], [Cov(B, A), Var(B)]] >= 0``."""
    _require_positive(ctx, "f")
    op = _block2(ctx, gen_variance(ctx, a), gen_covariance(ctx, a, b), gen_covariance(ctx, b, a), gen_variance(ctx, b))
    return _report("var_cov_matrix", [_entry("var_cov_matrix", op)], seed, tolerance)


def _commutator_term(ctx: MeasureContext, a: Element, b: Element) -> Element:
    return ctx.phi(ctx.f_rho @ (a @ b - b @ a)) / 2


def check_schrodinger_commutative(
    ctx: MeasureContext, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """Schrodinger-type block matrices for maps with commutative range."""
    if ctx.map.kind not in (SCALAR_TRACE, BLOCK_TRACE):
        raise NonCommutativeRange(f"{ctx.map.kind} is not a scalar or block trace")
    _require_hermitian(a, b)
    _require_positive(ctx, "f", "g")
    var_a, var_b = gen_variance(ctx, a), gen_variance(ctx, b)
    cov = gen_covariance(ctx, a, b)
    re_cov = _herm(cov)
    k = _commutator_term(ctx, a, b)
    first = _block2(ctx, var_a, re_cov + k, re_cov - k, var_b)
    second = _block2(ctx, var_a, k, -k, var_b)
    return _report(
        "schrodinger_commutative",
        [_entry("schrodinger", first), _entry("heisenberg", second)],
        seed,
        tolerance,
    )


def check_heisenberg_general(
    ctx: MeasureContext, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``[[Var(A), Phi(f[A,B])/2], [-Phi(f[A,B])/2, Var(B)]] >= 0`` for any tracial map.

    The lower-left entry uses ``f(rho)``, matching the upper-right one.
    """
    _require_hermitian(a, b)
    _require_positive(ctx, "f", "g")
    k = _commutator_term(ctx, a, b)
    op = _block2(ctx, gen_variance(ctx, a), k, -k, gen_variance(ctx, b))
    return _report("heisenberg_general", [_entry("heisenberg", op)], seed, tolerance)


def check_kadison(
    ctx: MeasureContext, a: Element, b: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """``Phi(A* B^-1 A) >= Phi(A)* Phi(B)^-1 Phi(A)``; ``rho`` and ``(f, g)`` are unused."""
    return kadison_check(ctx.map, a, b, seed=seed, tolerance=tolerance)


# skew information and correlation

def check_skew_positivity(
    ctx: MeasureContext,
    a: Element,
    *,
    enforce: bool = True,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``Phi(f g A^2) - Phi(f A g A) >= 0`` and ``I(A) >= 0`` for Hermitian ``A``.

    ``enforce=False`` skips the same-monotone certificate, which is how
    negative controls are run.
    """
    _require_hermitian(a)
    _require_same_monotone(ctx, enforce)
    direct = ctx.phi(ctx.fg_rho @ a @ a) - ctx.phi(ctx.f_rho @ a @ ctx.g_rho @ a)
    skew = corr(ctx, a, a)
    return _report(
        "skew_positivity",
        [_entry("fgA2_minus_fAgA", _corner(ctx, direct)), _entry("skew", _corner(ctx, skew))],
        seed,
        tolerance,
    )


def check_skew_sum_nonneg(
    ctx: MeasureContext,
    a: Element,
    *,
    enforce: bool = True,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``I(A) + I(A*) >= 0`` for arbitrary ``A``."""
    _require_same_monotone(ctx, enforce)
    total = corr(ctx, a, a) + corr(ctx, a.H, a.H)
    return _report("skew_sum_nonneg", [_entry("skew_sum", _corner(ctx, total))], seed, tolerance)


def check_corr_cs_matrix(
    ctx: MeasureContext,
    a: Element,
    b: Element,
    *,
    enforce: bool = True,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``[[I(A), Corr'(A, B)], [Corr'(B, A), I(B)]] >= 0`` for Hermitian ``A, B``."""
    _require_hermitian(a, b)
    _require_same_monotone(ctx, enforce)
    op = _block2(ctx, corr(ctx, a, a), _sym(corr, ctx, a, b), _sym(corr, ctx, b, a), corr(ctx, b, b))
    return _report("corr_cs_matrix", [_entry("corr_cs_matrix", op)], seed, tolerance)


def check_corr_cs_norm(
    ctx: MeasureContext,
    a: Element,
    b: Element,
    *,
    enforce: bool = True,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``||I(B)|| I(A) - (Re Corr)^2`` and, for commutative range, ``I(A) I(B) - (Re Corr)^2``.

    ``||.||`` is the operator norm, i.e. the largest eigenvalue of ``I(B)``.
    """
    _require_hermitian(a, b)
    _require_same_monotone(ctx, enforce)
    i_a = _corner(ctx, _herm(corr(ctx, a, a)))
    i_b = _corner(ctx, _herm(corr(ctx, b, b)))
    re = _corner(ctx, _herm(_sym(corr, ctx, a, b)))
    re_sq = re.conj().T @ re
    norm_b = float(linalg.eig_hermitian(i_b).eigenvalues[-1])
    entries = [_entry("norm_refined", norm_b * i_a - re_sq)]
    if ctx.map.has_commutative_range:
        entries.append(_entry("commutative", i_a @ i_b - re_sq))
    return _report("corr_cs_norm", entries, seed, tolerance)


def check_conditional_expectation_cs(
    ctx: MeasureContext,
    a: Element,
    b: Element,
    *,
    central: Element | None = None,
    enforce: bool = True,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``I(A) I(B) - |Corr'(A, B)|^2 >= 0`` for the center expectation.

    ``A, B`` must be self-adjoint, or merely normal when ``f == g``.  The
    report also carries the module law ``<A, BC> = <A, B> C`` for a
    central ``C`` as a margin ``-||residual|| / scale``.
    """
    if ctx.map.kind != CENTER_EXPECTATION:
        raise WrongKind(f"expected the center expectation, got {ctx.map.kind}")
    if ctx.f == ctx.g:
        for x in (a, b):
            for blk in x.blocks:
                if np.linalg.norm(blk @ blk.conj().T - blk.conj().T @ blk) > 1e-10 * linalg.scale_of(blk) ** 2:
                    raise NotHermitian("with f == g the observables must be normal")
    else:
        _require_hermitian(a, b)
    _require_same_monotone(ctx, enforce)
    i_a = corr(ctx, a, a)
    i_b = corr(ctx, b, b)
    cp = _sym(corr, ctx, a, b)
    op = _herm(i_a @ i_b - cp.H @ cp)
    if central is None:
        rng = np.random.default_rng(seed)
        central = Element.scalars(
            rng.uniform(-1, 1, len(a.shape)) + 1j * rng.uniform(-1, 1, len(a.shape)), a.shape
        )
    residual = _sym(corr, ctx, a, b @ central) - cp @ central
    scale = max(1.0, cp.norm() * central.norm())
    return _report(
        "conditional_expectation_cs",
        [_entry("cauchy_schwarz", op), ("module_law", -residual.norm() / scale, residual.norm())],
        seed,
        tolerance,
    )


# variance versus skew information

def check_chain(
    ctx: MeasureContext, a: Element, *, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> MarginReport:
    """Two operator inequalities between ``f A* g A`` terms and, for Hermitian
    ``A``, the chain ``I^{f,g} <= I^{sqrt(fg),sqrt(fg)} <= Var^{fg,1}``."""
    _require_positive(ctx, "f", "g")
    phi = ctx.phi
    f, g, h = ctx.f_rho, ctx.g_rho, ctx.fg_rho
    root_h = ctx.apply(lambda x: np.sqrt(ctx.f(x) * ctx.g(x)))
    a_star = a.H
    mean = (phi(f @ a_star @ g @ a) + phi(f @ a @ g @ a_star)) / 2
    middle = phi(root_h @ a_star @ root_h @ a)
    h_inv = ctx.map.inverse(phi(h), error=SingularNormalizer)
    lower = phi(f @ a_star @ g) @ h_inv @ phi(g @ a @ f)
    entries = [
        _entry("mean_minus_geometric", _corner(ctx, _herm(mean - middle))),
        _entry("geometric_minus_schur", _corner(ctx, _herm(middle - lower))),
    ]
    if a.is_hermitian():
        top = phi(h @ a @ a)
        skew_fg = gen_correlation(ctx, a, a)
        skew_root = top - middle
        var_h = top - phi(h @ a) @ h_inv @ phi(h @ a)
        entries += [
            _entry("skew_le_root_skew", _corner(ctx, _herm(skew_root - skew_fg))),
            _entry("root_skew_le_variance", _corner(ctx, _herm(var_h - skew_root))),
        ]
    return _report("chain", entries, seed, tolerance)


def check_alpha_chain(
    density: DensityElement,
    alpha: float,
    a: Element,
    *,
    corr: Correlation = gen_correlation,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MarginReport:
    """``I^alpha(A) <= I^{1/2}(A) <= Var(A)`` for self-adjoint ``A``."""
    _require_hermitian(a)
    ctx_alpha = alpha_context(density.map, density.rho, alpha)
    ctx_half = alpha_context(density.map, density.rho, 0.5)
    ctx_var = MeasureContext(density.map, density.rho, classical_pair())
    i_alpha = corr(ctx_alpha, a, a)
    i_half = corr(ctx_half, a, a)
    var = gen_variance(ctx_var, a)
    return _report(
        "alpha_chain",
        [
            _entry("half_minus_alpha", _corner(ctx_half, _herm(i_half - i_alpha))),
            _entry("variance_minus_half", _corner(ctx_half, _herm(var - i_half))),
        ],
        seed,
        tolerance,
    )

