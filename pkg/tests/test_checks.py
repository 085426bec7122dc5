import numpy as np
import pytest

from qitineq import checks
from qitineq.algebra import BlockDiagonalElement, DensityElement, block_trace, center_expectation, make_map, scalar_trace
from qitineq.errors import NonCommutativeRange, NotHermitian, NotSameMonotone, WrongKind
from qitineq.functions import FunctionPair, ScalarFunction, alpha_pair, classical_pair
from qitineq.instances import gen_density, gen_function_pair, general_element, hermitian_element, normal_element
from qitineq.measures import MeasureContext, spectral_sum_correlation
from qitineq.report import MarginReport

from conftest import I2, SX, SY, SZ, el, qubit_density

from test_measures import SKEW_HALF_P34, SKEW_QUARTER_P34

DIAG_A = el(np.diag([1.0, -2.0]))
DIAG_B = el(np.diag([0.5, 3.0]))


def norm_margin(v: float) -> float:
    return v / max(1.0, abs(v))


def random_ctx(kind, shape, seed, family="random_powers"):
    phi = make_map(kind, shape)
    return MeasureContext(phi, gen_density(seed, phi).rho, gen_function_pair(seed + 1, family))


# classical relations

@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_heisenberg_qubit(p):
    rep = checks.check_classical_heisenberg(qubit_density(p), el(SX), el(SY))
    assert rep.value("heisenberg") == pytest.approx(norm_margin(1 - (2 * p - 1) ** 2), abs=1e-14)


def test_heisenberg_degenerate_pairs():
    d = qubit_density(0.3)
    var = 1 - (0.3 - 0.7) ** 2  # Var(sigma_z) at diag(0.3, 0.7)
    assert checks.check_classical_heisenberg(d, el(SZ), el(SZ)).min_margin == pytest.approx(var**2, abs=1e-14)
    # commuting diagonals: Var(A) Var(B)
    var_a = 0.3 * 1 + 0.7 * 4 - (0.3 - 1.4) ** 2
    var_b = 0.3 * 0.25 + 0.7 * 9 - (0.15 + 2.1) ** 2
    rep = checks.check_classical_heisenberg(d, DIAG_A, DIAG_B)
    assert rep.min_margin == pytest.approx(norm_margin(var_a * var_b), abs=1e-13)


def test_schrodinger_qubit():
    d = qubit_density(0.75)
    s = checks.check_classical_schrodinger(d, el(SX), el(SY))
    h = checks.check_classical_heisenberg(d, el(SX), el(SY))
    assert 0 <= s.value("schrodinger") <= h.value("heisenberg")
    assert checks.check_classical_schrodinger(d, el(SZ), el(SZ)).value("schrodinger") == pytest.approx(0, abs=1e-14)
    s = checks.check_classical_schrodinger(qubit_density(0.5), el(SX), el(SY))
    assert s.value("schrodinger") == pytest.approx(1.0, abs=1e-14)


def test_corr_cs_classical():
    d = qubit_density(0.75)
    assert checks.check_classical_corr_cs(d, 0.3, el(SX), el(SX)).min_margin == pytest.approx(0, abs=1e-14)
    rep = checks.check_classical_corr_cs(d, 0.3, DIAG_A, DIAG_B)
    assert rep.min_margin == pytest.approx(0, abs=1e-14)
    for seed in range(50):
        rho = gen_density(seed, scalar_trace((2,)))
        a, b = hermitian_element(seed + 1, (2,)), hermitian_element(seed + 2, (2,))
        for alpha in np.arange(1, 10) / 10:
            assert checks.check_classical_corr_cs(rho, alpha, a, b).min_margin >= -1e-10


def test_variance_covariance_classical():
    d = qubit_density(0.3)
    assert checks.check_variance_covariance_classical(d, el(SX), el(SX)).min_margin == pytest.approx(0, abs=1e-14)
    # rho = diag(0.2, 0.3, 0.5); A, B live on disjoint coordinates
    rho = DensityElement(el(np.diag([0.2, 0.3, 0.5])), scalar_trace((3,)))
    a, b = el(np.diag([1.0, 0, 0])), el(np.diag([0, 1.0, 0]))
    # Var(A) = 0.16, Var(B) = 0.21, Cov = -0.06, margin = 0.16 - 0.0036 / 0.21
    rep = checks.check_variance_covariance_classical(rho, a, b)
    assert rep.min_margin == pytest.approx(0.16 - 0.0036 / 0.21, abs=1e-14)
    for seed in range(100):
        density = gen_density(seed, scalar_trace((3,)))
        a, b = hermitian_element(seed + 1, (3,)), hermitian_element(seed + 2, (3,))
        assert checks.check_variance_covariance_classical(density, a, b).min_margin >= -1e-10


def test_classical_checks_need_trace_and_hermitian():
    phi = block_trace((2,))
    with pytest.raises(WrongKind):
        checks.check_classical_heisenberg(gen_density(1, phi), el(SX), el(SY))
    with pytest.raises(NotHermitian):
        checks.check_classical_heisenberg(qubit_density(0.5), el([[0, 1], [0, 0]]), el(SY))


# covariance side for tracial maps

def test_var_cov_matrix_fixtures():
    ctx = random_ctx("block_trace", (2, 2), 3)
    a = hermitian_element(4, (2, 2))
    assert abs(checks.check_var_cov_matrix(ctx, a, a).min_margin) <= 1e-12
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), classical_pair())
    assert abs(checks.check_var_cov_matrix(ctx, el(I2), el(SX)).min_margin) <= 1e-14
    for i in range(200):
        kind = ("scalar_trace", "block_trace")[i % 2]
        ctx = random_ctx(kind, [(2,), (3,), (2, 2)][i % 3], 10 * i)
        x, y = general_element(10 * i + 5, ctx.map.domain_shape), general_element(10 * i + 6, ctx.map.domain_shape)
        assert checks.check_var_cov_matrix(ctx, x, y).min_margin >= -1e-9


def test_schrodinger_commutative():
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), classical_pair())
    rep = checks.check_schrodinger_commutative(ctx, el(SX), el(SY))
    assert rep.min_margin >= -1e-10
    # commuting observables: the second matrix is diag(Var(A), Var(B))
    rep = checks.check_schrodinger_commutative(ctx, DIAG_A, DIAG_B)
    assert rep.value("heisenberg") >= 0
    for seed in range(100):
        ctx = random_ctx("block_trace", (2, 2), seed)
        a, b = hermitian_element(seed + 7, (2, 2)), hermitian_element(seed + 8, (2, 2))
        assert checks.check_schrodinger_commutative(ctx, a, b).min_margin >= -1e-9
    with pytest.raises(NonCommutativeRange):
        checks.check_schrodinger_commutative(random_ctx("center_expectation", (2,), 1), el(SX), el(SY))


@pytest.mark.parametrize("kind, shape", [("doubling", (2,)), ("center_expectation", (2, 2)), ("doubling", (2, 1))])
def test_heisenberg_general_random(kind, shape):
    for seed in range(100):
        ctx = random_ctx(kind, shape, 7 * seed)
        a, b = hermitian_element(seed + 1, ctx.map.domain_shape), hermitian_element(seed + 2, ctx.map.domain_shape)
        assert checks.check_heisenberg_general(ctx, a, b).min_margin >= -1e-9


def test_heisenberg_general_commuting():
    ctx = MeasureContext(center_expectation((2,)), el(np.diag([1.2, 0.8])), alpha_pair(0.5))
    assert checks.check_heisenberg_general(ctx, DIAG_A, DIAG_B).min_margin >= 0


# skew information side

def test_skew_positivity_commuting_is_zero():
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), alpha_pair(0.3))
    rep = checks.check_skew_positivity(ctx, DIAG_A)
    assert abs(rep.min_margin) <= 1e-14


def test_skew_positivity_two_term_formula():
    lam = np.array([0.6, 0.4])
    pair = FunctionPair(ScalarFunction.power(2.0), ScalarFunction.power(0.5))
    a = np.array([[0, 0.3j], [-0.3j, 0]])
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag(lam)), pair)
    expected = (lam[0] ** 2 - lam[1] ** 2) * (np.sqrt(lam[0]) - np.sqrt(lam[1])) * 0.09
    rep = checks.check_skew_positivity(ctx, el(a))
    assert rep.value("skew") == pytest.approx(expected, abs=1e-15)
    assert rep.value("fgA2_minus_fAgA") == pytest.approx(expected, abs=1e-15)


def test_skew_positivity_negative_control():
    pair = FunctionPair(ScalarFunction.power(1.0), ScalarFunction.affine(-1.0, 1.0))
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), pair)
    with pytest.raises(NotSameMonotone):
        checks.check_skew_positivity(ctx, el(SX))
    rep = checks.check_skew_positivity(ctx, el(SX), enforce=False)
    assert not rep.passed and rep.min_margin < -1e-6


def test_skew_sum():
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), alpha_pair(0.5))
    a = el([[0, 1], [0, 0]])
    rep = checks.check_skew_sum_nonneg(ctx, a)
    oracle = (spectral_sum_correlation(ctx, a, a) + spectral_sum_correlation(ctx, a.H, a.H)).blocks[0][0, 0].real
    assert rep.min_margin == pytest.approx(norm_margin(oracle), abs=1e-14)
    # A*A + AA* = I and sqrt(rho) A* sqrt(rho) A has trace sqrt(p (1 - p)), as for sigma_x
    assert oracle == pytest.approx(SKEW_HALF_P34, abs=1e-14)
    # Hermitian A gives twice the skew information
    rep = checks.check_skew_sum_nonneg(ctx, el(SX))
    assert rep.min_margin == pytest.approx(2 * SKEW_HALF_P34, abs=1e-14)
    for seed in range(100):
        ctx = random_ctx("block_trace", (2, 3), seed, "poly_exp_mix")
        assert checks.check_skew_sum_nonneg(ctx, general_element(seed, (2, 3))).min_margin >= -1e-9


def test_corr_cs_matrix():
    ctx = random_ctx("center_expectation", (2, 2), 5)
    a = hermitian_element(1, (2, 2))
    assert abs(checks.check_corr_cs_matrix(ctx, a, a).min_margin) <= 1e-12
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), alpha_pair(0.3))
    assert abs(checks.check_corr_cs_matrix(ctx, DIAG_A, DIAG_B).min_margin) <= 1e-14


def test_corr_cs_norm_scalar_and_block():
    d = qubit_density(0.75)
    ctx = MeasureContext(d.map, d.rho, alpha_pair(0.3))
    a, b = hermitian_element(1, (2,)), hermitian_element(2, (2,))
    rep = checks.check_corr_cs_norm(ctx, a, b)
    classical = checks.check_classical_corr_cs(d, 0.3, a, b)
    assert rep.value("commutative") == pytest.approx(classical.min_margin, abs=1e-13)
    rep = checks.check_corr_cs_norm(ctx, a, a)
    assert abs(rep.value("commutative")) <= 1e-14
    # block trace: entrywise scalar reduction per block
    ctx = random_ctx("block_trace", (2, 3), 11, "alpha_powers")
    a, b = hermitian_element(3, (2, 3)), hermitian_element(4, (2, 3))
    rep = checks.check_corr_cs_norm(ctx, a, b)
    from qitineq.measures import gen_correlation, sym_correlation

    ia = np.diag(gen_correlation(ctx, a, a).to_dense()).real
    ib = np.diag(gen_correlation(ctx, b, b).to_dense()).real
    re = np.diag(sym_correlation(ctx, a, b).to_dense()).real
    expected = np.min(ia * ib - re**2)
    scale = np.linalg.norm(ia * ib - re**2)
    assert rep.value("commutative") == pytest.approx(expected / max(1.0, scale), abs=1e-12)
    assert rep.value("commutative") >= 0
    # the center is commutative, so both forms apply to the center expectation
    rep = checks.check_corr_cs_norm(random_ctx("center_expectation", (2,), 1), el(SX), el(SY))
    assert [label for label, _ in rep.margins] == ["norm_refined", "commutative"]
    assert rep.passed


def test_conditional_expectation_cs():
    ctx = random_ctx("center_expectation", (2, 2), 9, "alpha_powers")
    a, b = hermitian_element(1, (2, 2)), hermitian_element(2, (2, 2))
    assert abs(checks.check_conditional_expectation_cs(ctx, a, a).value("cauchy_schwarz")) <= 1e-12
    for seed in range(100):
        phi = center_expectation((2, 2))
        ctx = MeasureContext(phi, gen_density(seed, phi).rho, alpha_pair(0.5))
        a, b = hermitian_element(seed + 1, (2, 2)), hermitian_element(seed + 2, (2, 2))
        rep = checks.check_conditional_expectation_cs(ctx, a, b, seed=seed)
        assert rep.min_margin >= -1e-9


def test_conditional_expectation_normal_extension():
    phi = center_expectation((2, 2))
    j = np.array([[0, 1], [-1, 0]])
    # i J is self-adjoint; J and diag(i, 2) are normal but not self-adjoint
    fixtures = [el(1j * j, 0.5j * j), el(j, np.diag([1j, 2.0]))]
    for seed in range(100):
        ctx = MeasureContext(phi, gen_density(seed, phi).rho, alpha_pair(0.5))
        b = normal_element(seed, (2, 2))
        for a in fixtures:
            assert checks.check_conditional_expectation_cs(ctx, a, b).min_margin >= -1e-9
    ctx = MeasureContext(phi, gen_density(0, phi).rho, alpha_pair(0.3))
    with pytest.raises(NotHermitian):
        checks.check_conditional_expectation_cs(ctx, fixtures[1], fixtures[1])
    ctx = MeasureContext(phi, gen_density(0, phi).rho, alpha_pair(0.5))
    with pytest.raises(NotHermitian):
        checks.check_conditional_expectation_cs(ctx, el([[0, 1], [0, 0]], I2), fixtures[1])
    with pytest.raises(WrongKind):
        checks.check_conditional_expectation_cs(random_ctx("block_trace", (2,), 1), el(SX), el(SY))


# chains

def test_chain_commuting_terms():
    ctx = MeasureContext(block_trace((2,)), el(np.diag([0.75, 0.25])), alpha_pair(0.3))
    rep = checks.check_chain(ctx, el(np.diag([0.5, -0.5])))
    assert len(rep.margins) == 4
    # the skew-type gaps vanish; the Schur and variance gaps reduce to
    # Var^{x,1}(A) = Tr(rho A^2) - Tr(rho A)^2 = 0.25 - 0.0625
    assert abs(rep.value("mean_minus_geometric")) <= 1e-14
    assert abs(rep.value("skew_le_root_skew")) <= 1e-14
    assert rep.value("geometric_minus_schur") == pytest.approx(0.1875, abs=1e-14)
    assert rep.value("root_skew_le_variance") == pytest.approx(0.1875, abs=1e-14)


def test_chain_qubit():
    ctx = MeasureContext(scalar_trace((2,)), el(np.diag([0.75, 0.25])), FunctionPair(ScalarFunction.power(0.75), ScalarFunction.power(0.25)))
    rep = checks.check_chain(ctx, el(SX))
    assert rep.min_margin >= -1e-10
    # with f g = x, the root-skew term is the Wigner-Yanase skew information
    assert rep.value("skew_le_root_skew") == pytest.approx(SKEW_HALF_P34 - SKEW_QUARTER_P34, abs=1e-13)
    assert rep.value("root_skew_le_variance") == pytest.approx(1 - SKEW_HALF_P34, abs=1e-13)


def test_chain_random():
    for i in range(300):
        kind = ["scalar_trace", "block_trace", "center_expectation", "doubling"][i % 4]
        shape = [(2,), (3,), (4,), (2, 2)][(i // 4) % 4]
        ctx = random_ctx(kind, shape, 13 * i, ["alpha_powers", "random_powers", "poly_exp_mix"][i % 3])
        a = general_element(i, ctx.map.domain_shape) if i % 2 else hermitian_element(i, ctx.map.domain_shape)
        assert checks.check_chain(ctx, a).min_margin >= -1e-9


def test_alpha_chain_fixtures():
    d = qubit_density(0.75)
    rep = checks.check_alpha_chain(d, 0.25, el(SX))
    assert rep.value("half_minus_alpha") == pytest.approx(SKEW_HALF_P34 - SKEW_QUARTER_P34, abs=1e-13)
    assert rep.value("variance_minus_half") == pytest.approx(1 - SKEW_HALF_P34, abs=1e-13)
    assert abs(checks.check_alpha_chain(d, 0.5, el(SX)).value("half_minus_alpha")) <= 1e-15
    rep = checks.check_alpha_chain(d, 0.25, DIAG_A)
    assert abs(rep.value("half_minus_alpha")) <= 1e-14
    assert rep.value("variance_minus_half") > 0


def test_oracle_substitution_gives_same_margins():
    ctx = random_ctx("center_expectation", (3,), 17, "alpha_powers")
    a, b = hermitian_element(1, (3,)), hermitian_element(2, (3,))
    r1 = checks.check_corr_cs_matrix(ctx, a, b)
    r2 = checks.check_corr_cs_matrix(ctx, a, b, corr=spectral_sum_correlation)
    assert r1.min_margin == pytest.approx(r2.min_margin, abs=1e-10)


# reports

def test_report_json_roundtrip():
    rep = checks.check_classical_schrodinger(qubit_density(0.3), el(SX), el(SY), seed=12345)
    back = MarginReport.from_json(rep.to_json())
    assert back == rep
    # Re Cov(sigma_x, sigma_y) = 0 here, so the refinement gap sits on the boundary
    assert rep.status == "pass (boundary)"
    assert checks.check_classical_heisenberg(qubit_density(0.3), el(SX), el(SY)).status == "pass"
    fail = MarginReport.build("x", [("m", -1e-3, 1.0)])
    assert not fail.passed and fail.status == "FAIL"
    edge = MarginReport.build("x", [("m", -1e-12, 1.0)])
    assert edge.passed and edge.status == "pass (boundary)"
