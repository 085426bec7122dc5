"""Verification campaigns: run every checker over seeded random instances."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from . import checks
from .algebra import (
    BLOCK_TRACE,
    CENTER_EXPECTATION,
    MAP_KINDS,
    SCALAR_TRACE,
    BlockDiagonalElement,
    DensityElement,
    TracialMap,
    kadison_check,
    make_map,
)
from .errors import PreconditionError
from .functions import FunctionPair
from .instances import (
    PAIR_FAMILIES,
    SAME_MONOTONE_FAMILIES,
    gen_density,
    gen_function_pair,
    general_element,
    hermitian_element,
    label_seed,
    mix,
    normal_element,
    positive_element,
    rng_for,
)
from .measures import MeasureContext
from .report import DEFAULT_TOLERANCE, MarginReport

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 25
ADVERSARIAL = "adversarial_non_monotone"
DEFAULT_SHAPES = ((2,), (3,), (4,), (2, 2))
DEFAULT_MAP_KINDS = MAP_KINDS
DEFAULT_FAMILIES = SAME_MONOTONE_FAMILIES


@dataclass(frozen=True, eq=False)
class Instance:
    """Lazily generated inputs for one checker run; every field derives from ``seed``."""

    seed: int
    index: int
    shape: tuple[int, ...]
    map_kind: str
    family: str

    @cached_property
    def phi(self) -> TracialMap:
        return make_map(self.map_kind, self.shape)

    @cached_property
    def density(self) -> DensityElement:
        return gen_density(mix(self.seed, 1), self.phi)

    @cached_property
    def pair(self) -> FunctionPair:
        return gen_function_pair(mix(self.seed, 2), self.family)

    @cached_property
    def ctx(self) -> MeasureContext:
        return MeasureContext(self.phi, self.density.rho, self.pair)

    def _el(self, gen, k: int) -> BlockDiagonalElement:
        return gen(mix(self.seed, k), self.phi.domain_shape)

    @cached_property
    def a(self) -> BlockDiagonalElement:
        return self._el(hermitian_element, 3)

    @cached_property
    def b(self) -> BlockDiagonalElement:
        return self._el(hermitian_element, 4)

    @cached_property
    def x(self) -> BlockDiagonalElement:
        return self._el(general_element, 5)

    @cached_property
    def y(self) -> BlockDiagonalElement:
        return self._el(general_element, 6)

    @cached_property
    def positive(self) -> BlockDiagonalElement:
        return self._el(positive_element, 7)

    @cached_property
    def alpha(self) -> float:
        return float(rng_for(mix(self.seed, 8)).uniform(0.0, 1.0))

    @property
    def enforce(self) -> bool:
        return self.family != ADVERSARIAL


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    description: str
    run: Callable[[Instance], MarginReport]
    map_kinds: tuple[str, ...] | None = None
    # "ignored": the function pair is fixed by the check itself
    # "positive": needs f, g > 0, so the non-monotone family is excluded
    # "monotone": needs a same-monotone pair; the non-monotone family is a negative control
    families: str = "positive"


def _chain(inst: Instance) -> MarginReport:
    a = inst.a if inst.index % 2 == 0 else inst.x
    return checks.check_chain(inst.ctx, a, seed=inst.seed)


CHECKS: dict[str, CheckDef] = {
    c.check_id: c
    for c in [
        CheckDef(
            "classical_heisenberg",
            "Var(A) Var(B) >= |Tr(rho[A,B])|^2 / 4",
            lambda i: checks.check_classical_heisenberg(i.density, i.a, i.b, seed=i.seed),
            (SCALAR_TRACE,),
            "ignored",
        ),
        CheckDef(
            "classical_schrodinger",
            "Schrodinger refinement of the Heisenberg relation",
            lambda i: checks.check_classical_schrodinger(i.density, i.a, i.b, seed=i.seed),
            (SCALAR_TRACE,),
            "ignored",
        ),
        CheckDef(
            "classical_corr_cs",
            "|Re Corr^a(A,B)|^2 <= I^a(A) I^a(B) for the trace",
            lambda i: checks.check_classical_corr_cs(i.density, i.alpha, i.a, i.b, seed=i.seed),
            (SCALAR_TRACE,),
            "ignored",
        ),
        CheckDef(
            "variance_covariance_classical",
            "Var(A) >= Cov(A,B) Var(B)^-1 Cov(B,A) for the trace",
            lambda i: checks.check_variance_covariance_classical(i.density, i.a, i.b, seed=i.seed),
            (SCALAR_TRACE,),
            "ignored",
        ),
        CheckDef(
            "var_cov_matrix",
            "[[Var(A), Cov(A,B)], [Cov(B,A), Var(B)]] >= 0",
            lambda i: checks.check_var_cov_matrix(i.ctx, i.x, i.y, seed=i.seed),
        ),
        CheckDef(
            "schrodinger_commutative",
            "Schrodinger block matrices, commutative range",
            lambda i: checks.check_schrodinger_commutative(i.ctx, i.a, i.b, seed=i.seed),
            (SCALAR_TRACE, BLOCK_TRACE),
        ),
        CheckDef(
            "heisenberg_general",
            "Heisenberg block matrix for any tracial map",
            lambda i: checks.check_heisenberg_general(i.ctx, i.a, i.b, seed=i.seed),
        ),
        CheckDef(
            "kadison",
            "Phi(A* B^-1 A) >= Phi(A)* Phi(B)^-1 Phi(A)",
            lambda i: kadison_check(i.phi, i.x, i.positive, seed=i.seed),
            None,
            "ignored",
        ),
        CheckDef(
            "skew_positivity",
            "Phi(f g A^2) >= Phi(f A g A)",
            lambda i: checks.check_skew_positivity(i.ctx, i.a, enforce=i.enforce, seed=i.seed),
            None,
            "monotone",
        ),
        CheckDef(
            "skew_sum_nonneg",
            "I(A) + I(A*) >= 0",
            lambda i: checks.check_skew_sum_nonneg(i.ctx, i.x, enforce=i.enforce, seed=i.seed),
            None,
            "monotone",
        ),
        CheckDef(
            "corr_cs_matrix",
            "[[I(A), Re Corr], [Re Corr, I(B)]] >= 0",
            lambda i: checks.check_corr_cs_matrix(i.ctx, i.a, i.b, enforce=i.enforce, seed=i.seed),
            None,
            "monotone",
        ),
        CheckDef(
            "corr_cs_norm",
            "|Re Corr|^2 <= ||I(B)|| I(A), and <= I(A) I(B) for commutative range",
            lambda i: checks.check_corr_cs_norm(i.ctx, i.a, i.b, enforce=i.enforce, seed=i.seed),
            None,
            "monotone",
        ),
        CheckDef(
            "conditional_expectation_cs",
            "|Corr'(A,B)|^2 <= I(A) I(B) for the center expectation",
            lambda i: checks.check_conditional_expectation_cs(i.ctx, i.a, i.b, enforce=i.enforce, seed=i.seed),
            (CENTER_EXPECTATION,),
            "monotone",
        ),
        CheckDef(
            "chain",
            "mean >= geometric >= Schur terms; I^{f,g} <= I^{sqrt fg} <= Var^{fg,1}",
            _chain,
        ),
        CheckDef(
            "alpha_chain",
            "I^alpha(A) <= I^{1/2}(A) <= Var(A)",
            lambda i: checks.check_alpha_chain(i.density, i.alpha, i.a, seed=i.seed),
            None,
            "ignored",
        ),
    ]
}

CHECK_IDS = tuple(CHECKS)


@dataclass(frozen=True)
class CampaignConfig:
    checks: tuple[str, ...] = CHECK_IDS
    instances_per_check: int = 100
    seed: int = 42
    shapes: tuple[tuple[int, ...], ...] = DEFAULT_SHAPES
    map_kinds: tuple[str, ...] = DEFAULT_MAP_KINDS
    pair_families: tuple[str, ...] = DEFAULT_FAMILIES
    tolerance: float = DEFAULT_TOLERANCE
    output_path: str | None = None

    def __post_init__(self):
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ValueError(f"unknown check id(s): {', '.join(unknown)}")
        if self.instances_per_check < 1:
            raise ValueError("instances_per_check must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        bad = [f for f in self.pair_families if f not in PAIR_FAMILIES]
        if bad:
            raise ValueError(f"unknown pair family: {', '.join(bad)}")
        for kind in self.map_kinds:
            make_map(kind, (1,))

    def to_json(self) -> dict:
        return {
            "checks": list(self.checks),
            "instances_per_check": self.instances_per_check,
            "seed": self.seed,
            "shapes": [list(s) for s in self.shapes],
            "map_kinds": list(self.map_kinds),
            "pair_families": list(self.pair_families),
            "tolerance": self.tolerance,
        }


def _base_kind(kind: str) -> str:
    return kind.partition(":")[0]


def combos_for(check: CheckDef, config: CampaignConfig) -> list[tuple[tuple[int, ...], str, str]]:
    kinds = [k for k in config.map_kinds if check.map_kinds is None or _base_kind(k) in check.map_kinds]
    if check.families == "ignored":
        families = ["-"]
    elif check.families == "positive":
        families = [f for f in config.pair_families if f != ADVERSARIAL]
    else:
        families = list(config.pair_families)
    return list(itertools.product(config.shapes, kinds, families))


@dataclass
class CheckSummary:
    check_id: str
    instances: int = 0
    violations: int = 0
    boundary: int = 0
    regenerated: int = 0
    invalid: int = 0
    min_margin: float = float("inf")
    worst_seed: int | None = None
    skipped: str | None = None

    def add(self, report: MarginReport) -> None:
        self.instances += 1
        if not report.passed:
            self.violations += 1
        elif report.boundary:
            self.boundary += 1
        if report.min_margin < self.min_margin:
            self.min_margin = report.min_margin
            self.worst_seed = report.instance_seed

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "instances": self.instances,
            "violations": self.violations,
            "boundary": self.boundary,
            "regenerated": self.regenerated,
            "invalid": self.invalid,
            "min_margin": self.min_margin if self.instances else None,
            "worst_seed": self.worst_seed,
            "skipped": self.skipped,
        }


@dataclass
class CampaignResult:
    config: CampaignConfig
    reports: list[MarginReport] = field(default_factory=list)
    summaries: dict[str, CheckSummary] = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.summaries.values())

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "reports": [r.to_json() for r in self.reports],
            "summary": [s.to_json() for s in self.summaries.values()],
            "total_violations": self.violations,
        }


def run_instance(check: CheckDef, config: CampaignConfig, index: int, combos, summary: CheckSummary):
    """Run one instance, regenerating from derived seeds on precondition failures."""
    shape, kind, family = combos[index % len(combos)]
    base_seed = mix(label_seed(config.seed, check.check_id), index)
    for attempt in range(MAX_ATTEMPTS):
        seed = base_seed if attempt == 0 else mix(base_seed, 1000 + attempt)
        inst = Instance(seed, index, shape, kind, family)
        try:
            report = check.run(inst)
        except PreconditionError as exc:
            summary.regenerated += 1
            log.debug("%s #%d attempt %d rejected: %s", check.check_id, index, attempt, exc)
            continue
        passed = all(v >= -config.tolerance for _, v in report.margins)
        return MarginReport(
            report.check_id, seed, report.margins, passed, config.tolerance, report.scale, index
        )
    summary.invalid += 1
    log.warning("%s #%d: no valid instance after %d attempts", check.check_id, index, MAX_ATTEMPTS)
    return None


def run_campaign(config: CampaignConfig, progress: Callable[[str], None] | None = None) -> CampaignResult:
    result = CampaignResult(config)
    for check_id in config.checks:
        check = CHECKS[check_id]
        summary = CheckSummary(check_id)
        result.summaries[check_id] = summary
        combos = combos_for(check, config)
        if not combos:
            summary.skipped = "no applicable (shape, map kind, pair family) combination"
            continue
        for index in range(config.instances_per_check):
            report = run_instance(check, config, index, combos, summary)
            if report is not None:
                summary.add(report)
                result.reports.append(report)
        if summary.regenerated:
            log.info("%s: %d instance(s) regenerated", check_id, summary.regenerated)
        if progress is not None:
            progress(check_id)
    result.reports.sort(key=lambda r: (r.check_id, r.instance_index))
    return result
