"""
Scenario files: a measure (inline or from a named generator), an optional
parameter sweep and a list of tasks. Each task produces report tables; rows
that put a bound next to an exact value carry a pass/fail sandwich flag.

Exit codes: 0 success, 1 sandwich violation, 2 parse or write error,
3 failed cross-check.
"""
import asyncio
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from analysis.comparison import classical_lt_integral, nw_functionals
from automation.report_writer import SKIPPED, ReportTable, TaskResult, emit_report
from core.decomposition import build_decomposition, decomposition_rows, verify_decomposition
from core.measure import Measure, MeasureModel, build_measure, translate
from core.otelbaev import cross_check_point, power_integral, profile_rows
from estimators.bounds import (
    BETA, DecompositionLTBound, comb_lt_bounds, comb_spacing_violations, counting_bounds, counting_rows,
    eigenvalue_bounds, lt_bounds, n_minus_lower, spectral_edges,
)
from generators.example_generator import (
    double_delta_lt_upper, generate_example, single_delta_lt_upper,
)
from spectral.refsolver import Spectrum, counting_exact, lt_sum_exact, negative_spectrum, spectrum_rows
from utils.config import config
from utils.errors import (
    BoundaryAmbiguousError, MeasureError, OtelbaevError, ParameterError, ReportError, ScenarioError,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_CROSS_CHECK = 0, 1, 2, 3

DECOMPOSITION_FORM_REL = 1e-9
# successive q* increments of a convergent truncation shrink at least this fast
QSTAR_DECAY_RATIO = 0.9

COUNTING_COLUMNS = ["lambda", "lower1", "lower2", "lower3_literal", "lower3_variant", "N_exact",
                    "upper1", "upper2", "upper3", "upper_bracketing", "sandwich"]
EIGENVALUE_COLUMNS = ["n", "lower", "lambda_exact", "upper", "sandwich"]
SPECTRUM_COLUMNS = ["nu", "lambda", "kappa", "err"]
LT_COLUMNS = ["gamma", "bound", "side", "value", "exact", "flag"]
EDGE_COLUMNS = ["quantity", "lower", "exact", "upper", "sandwich"]
PROFILE_COLUMNS = ["x", "d", "q"]
DECOMPOSITION_COLUMNS = ["k", "a_k", "a_k1", "gamma_k", "gamma_k1", "mass"]
CHECK_COLUMNS = ["check", "residual", "tolerance", "flag"]
COMPARE_COLUMNS = ["K", "classical", "A_gamma", "B_gamma", "qstar_integral", "trend"]

Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class _Task(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class EvalProfileTask(_Task):
    task: Literal["eval_profile"]
    alpha: Positive = 2.0
    x_from: float = Field(alias="from", allow_inf_nan=False)
    x_to: float = Field(alias="to", allow_inf_nan=False)
    step: Positive
    cross_check: bool = False

    @model_validator(mode="after")
    def _grid(self):
        if self.x_to < self.x_from:
            raise ValueError(f"'to' ({self.x_to}) is below 'from' ({self.x_from})")
        if (self.x_to - self.x_from) / self.step > 1_000_000:
            raise ValueError("profile grid exceeds 1000000 points")
        return self


class DecomposeTask(_Task):
    task: Literal["decompose"]
    alpha: Positive = 2.0


class CountingTableTask(_Task):
    task: Literal["counting_table"]
    lambdas: List[Positive] = Field(min_length=1)
    with_lower3: bool = True


class EigenvalueTableTask(_Task):
    task: Literal["eigenvalue_table"]
    n: List[Annotated[int, Field(ge=1)]] = Field(min_length=1)


class LTTableTask(_Task):
    task: Literal["lt_table"]
    gammas: List[Positive] = Field(min_length=1)


class EdgesTask(_Task):
    task: Literal["edges"]


class CompareTask(_Task):
    task: Literal["compare"]
    family: Literal["lt_counterexample", "nw_counterexample"]
    exponent: Positive
    depths: List[Annotated[int, Field(ge=0)]] = Field(min_length=1)

    @field_validator("depths")
    @classmethod
    def _increasing(cls, v):
        if any(b <= a for a, b in zip(v[:-1], v[1:])):
            raise ValueError("depths must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _exponent(self):
        if self.family == "lt_counterexample" and self.exponent <= 1:
            raise ValueError("lt_counterexample needs exponent p > 1")
        if self.family == "nw_counterexample" and self.exponent >= 0.5:
            raise ValueError("nw_counterexample needs exponent gamma in (0, 1/2)")
        return self


Task = Annotated[Union[EvalProfileTask, DecomposeTask, CountingTableTask, EigenvalueTableTask,
                       LTTableTask, EdgesTask, CompareTask], Field(discriminator="task")]


class GeneratorRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    params: Dict[str, Any] = Field(default_factory=dict)


class Sweep(BaseModel):
    model_config = ConfigDict(extra="forbid")

    param: str
    values: List[Any] = Field(min_length=1)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spectrum: Optional[Positive] = None
    sandwich_slack: float = Field(1e-9, ge=0)
    closed_form_rel: Positive = 1e-9


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    measure: Optional[MeasureModel] = None
    generator: Optional[GeneratorRef] = None
    translate: float = Field(0.0, allow_inf_nan=False)
    sweep: Optional[Sweep] = None
    tasks: List[Task] = Field(min_length=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _source(self):
        needs_measure = any(t.task != "compare" for t in self.tasks)
        if self.measure is not None and self.generator is not None:
            raise ValueError("give either 'measure' or 'generator', not both")
        if needs_measure and self.measure is None and self.generator is None:
            raise ValueError("tasks need a 'measure' or a 'generator'")
        if self.sweep is not None and self.generator is None:
            raise ValueError("'sweep' needs a 'generator'")
        return self


@dataclass
class MeasureCase:
    suffix: str
    sweep_value: Any
    measure: Measure
    generator: Optional[str]
    params: Dict[str, Any]


@dataclass
class ScenarioResult:
    name: str
    exit_code: int
    results: List[TaskResult] = field(default_factory=list)
    files: List[Path] = field(default_factory=list)
    out_dir: Optional[Path] = None
    error: Optional[str] = None


def _location(loc: Tuple) -> str:
    return ".".join(str(p) for p in loc)


def parse_scenario(data: Any, source: str = "<scenario>") -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ScenarioError(first["msg"], f"{source}:{_location(first['loc'])}")


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", str(path))
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, f"{path}:{e.lineno}:{e.colno}")
    return parse_scenario(data, str(path))


@lru_cache(maxsize=32)
def _spectrum(m: Measure, tol: Optional[float]) -> Spectrum:
    return negative_spectrum(m, tol)


def _within(lower: float, value: float, upper: float, slack: float) -> bool:
    return lower - slack * max(1.0, abs(lower)) <= value <= upper + slack * max(1.0, abs(upper))


class ScenarioRunner:
    def __init__(self, scenario: Scenario, out_dir: Optional[Path] = None,
                 threads: Optional[int] = None, tol: Optional[float] = None):
        self.scenario = scenario
        self.threads = max(1, threads or config.runner.threads)
        self.tol = tol or scenario.tolerances.spectrum or config.spectrum.tolerance
        self.slack = scenario.tolerances.sandwich_slack
        if out_dir is not None:
            self.out_dir = Path(out_dir)
        elif scenario.output:
            self.out_dir = Path(scenario.output)
        else:
            self.out_dir = config.reports_dir / scenario.name

    def tolerances(self) -> Dict[str, float]:
        out = config.tolerances()
        out["spectrum_kappa"] = self.tol
        out["sandwich_slack"] = self.slack
        out["closed_form_rel"] = self.scenario.tolerances.closed_form_rel
        return out

    def cases(self) -> List[MeasureCase]:
        """One measure per sweep value, or the single scenario measure"""
        sc = self.scenario
        if sc.generator is None:
            m = sc.measure.to_measure() if sc.measure is not None else build_measure()
            return [MeasureCase("", None, translate(m, sc.translate), None, {})]
        values = sc.sweep.values if sc.sweep else [None]
        out = []
        for value in values:
            params = dict(sc.generator.params)
            suffix = ""
            if sc.sweep is not None:
                params[sc.sweep.param] = value
                suffix = f"_{sc.sweep.param}-{value!r}"
            m = generate_example(sc.generator.name, params)
            out.append(MeasureCase(suffix, value, translate(m, sc.translate), sc.generator.name, params))
        return out

    async def run(self) -> ScenarioResult:
        sc = self.scenario
        try:
            cases = self.cases()
        except (ParameterError, MeasureError) as e:
            logger.error(f"scenario {sc.name}: {e}")
            return ScenarioResult(sc.name, EXIT_PARSE, error=str(e))

        jobs = []
        for i, job in enumerate(sc.tasks):
            label = f"{i + 1:02d}_{job.task}"
            if job.task == "compare":
                jobs.append((job, None, label))
                continue
            for case in cases:
                jobs.append((job, case, f"{label}{case.suffix}"))
        logger.info(f"scenario {sc.name}: {len(jobs)} job(s) on {self.threads} thread(s)")

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [loop.run_in_executor(pool, self._run_task, job, case, label)
                       for job, case, label in jobs]
            results = list(await asyncio.gather(*futures))

        exit_code = self.exit_code(results)
        try:
            files = emit_report(sc.name, results, self.out_dir, self.tolerances(), exit_code)
        except ReportError as e:
            logger.error(str(e))
            return ScenarioResult(sc.name, EXIT_PARSE, results, [], self.out_dir, str(e))
        return ScenarioResult(sc.name, exit_code, results, files, self.out_dir)

    @staticmethod
    def exit_code(results: List[TaskResult]) -> int:
        if any(r.error_kind == "parameter" for r in results):
            return EXIT_PARSE
        if any(r.error_kind == "cross_check" or r.check_failures for r in results):
            return EXIT_CROSS_CHECK
        if any(r.failed for r in results):
            return EXIT_VIOLATION
        return EXIT_OK

    def _run_task(self, job, case: Optional[MeasureCase], label: str) -> TaskResult:
        result = TaskResult(job.task, label)
        logger.info(f"task {label} started")
        try:
            handler = getattr(self, f"_task_{job.task}")
            if case is None:
                handler(job, result)
            else:
                handler(job, case, result)
        except (ParameterError, MeasureError) as e:
            result.status, result.error, result.error_kind = "error", str(e), "parameter"
        except OtelbaevError as e:
            result.status, result.error, result.error_kind = "error", str(e), "cross_check"
        except Exception as e:
            logger.exception(f"task {label} crashed")
            result.status, result.error, result.error_kind = "error", f"{type(e).__name__}: {e}", "cross_check"
        if result.error:
            logger.error(f"task {label} failed: {result.error}")
        else:
            logger.info(f"task {label} finished: {result.passed} pass, {result.failed} fail")
        return result

    # tasks

    def _task_eval_profile(self, job: EvalProfileTask, case: MeasureCase, result: TaskResult):
        m = case.measure
        rows = profile_rows(m, job.alpha, job.x_from, job.x_to, job.step)
        if job.cross_check:
            for x, _, _ in rows:
                cross_check_point(m, job.alpha, x)
        result.tables.append(ReportTable(result.label, PROFILE_COLUMNS, rows))

    def _task_decompose(self, job: DecomposeTask, case: MeasureCase, result: TaskResult):
        dec = build_decomposition(case.measure, job.alpha)
        report = verify_decomposition(dec)
        checks = [(c.name, c.residual, c.tolerance, result.check(c.passed)) for c in report.checks.values()]
        result.tables.append(ReportTable(result.label, DECOMPOSITION_COLUMNS, decomposition_rows(dec)))
        result.tables.append(ReportTable(f"{result.label}_checks", CHECK_COLUMNS, checks))

    def _task_counting_table(self, job: CountingTableTask, case: MeasureCase, result: TaskResult):
        m = case.measure
        spectrum = _spectrum(m, self.tol)
        bounds, exact, flags = [], [], []
        for lam in job.lambdas:
            b = counting_bounds(m, lam, with_lower3=job.with_lower3)
            try:
                n = counting_exact(m, lam, spectrum)
            except BoundaryAmbiguousError as e:
                logger.warning(f"{result.label}: {e}; row skipped")
                n = None
            bounds.append(b)
            exact.append(n)
            if n is None:
                flags.append(SKIPPED)
                continue
            err_lo = max(b.errors.get("lower1", 0.0), b.errors.get("lower2", 0.0))
            err_hi = max((v for k, v in b.errors.items() if k.startswith("upper")), default=0.0)
            flags.append(result.flag(_within(b.best_lower - err_lo, n, b.best_upper + err_hi, self.slack)))
        rows = [row + (flag,) for row, flag in zip(counting_rows(bounds, exact), flags)]
        result.tables.append(ReportTable(result.label, COUNTING_COLUMNS, rows))

    def _task_eigenvalue_table(self, job: EigenvalueTableTask, case: MeasureCase, result: TaskResult):
        m = case.measure
        spectrum = _spectrum(m, self.tol)
        rows = []
        for n in job.n:
            lo, hi = eigenvalue_bounds(m, n)
            if n <= spectrum.count:
                exact = spectrum.eigenvalues[n - 1]
                ok = _within(lo, exact, hi, self.slack)
            else:
                # no n-th eigenvalue: the upper bound must not certify one
                exact, ok = None, hi == 0.0
            rows.append((n, lo, exact, hi, result.flag(ok)))
        result.tables.append(ReportTable(result.label, EIGENVALUE_COLUMNS, rows))
        result.tables.append(ReportTable(f"{result.label}_spectrum", SPECTRUM_COLUMNS, spectrum_rows(spectrum)))

    def _closed_form(self, case: MeasureCase, gamma: float) -> Optional[float]:
        if case.generator == "single_delta":
            return single_delta_lt_upper(gamma, case.params.get("c", 1.0))
        if case.generator == "double_delta" and case.params.get("c", 1.0) == 1.0:
            return double_delta_lt_upper(case.params["y"], gamma)
        return None

    def _task_lt_table(self, job: LTTableTask, case: MeasureCase, result: TaskResult):
        m = case.measure
        spectrum = _spectrum(m, self.tol)
        comb = bool(m.atoms) and not m.density and not comb_spacing_violations(m, BETA)
        rows = []
        for gamma in job.gammas:
            exact = lt_sum_exact(m, gamma, spectrum)
            b = lt_bounds(m, gamma)
            for name, value in b.lowers().items():
                ok = _within(value - b.errors.get(name, 0.0), exact, math.inf, self.slack)
                rows.append((gamma, name, "lower", value, exact, result.flag(ok)))
            for name, value in b.uppers().items():
                ok = _within(-math.inf, exact, value + b.errors.get(name, 0.0), self.slack)
                rows.append((gamma, name, "upper", value, exact, result.flag(ok)))
            decomp = DecompositionLTBound(gamma, b.upper_decomp, b.decomp_by_length)
            rows.append((gamma, "decomp_by_length", "check", b.decomp_by_length, b.upper_decomp,
                         result.check(decomp.discrepancy <= DECOMPOSITION_FORM_REL)))
            if comb:
                cb = comb_lt_bounds(m, gamma)
                rows.append((gamma, "comb_lower", "lower", cb.lower, exact,
                             result.flag(_within(cb.lower, exact, math.inf, self.slack))))
                rows.append((gamma, "comb_upper", "upper", cb.upper, exact,
                             result.flag(_within(-math.inf, exact, cb.upper, self.slack))))
            closed = self._closed_form(case, gamma)
            if closed is not None:
                tol = self.scenario.tolerances.closed_form_rel
                ok = abs(b.upper_qstar - closed) <= tol * abs(closed)
                rows.append((gamma, "closed_form", "check", closed, b.upper_qstar, result.check(ok)))
        result.tables.append(ReportTable(result.label, LT_COLUMNS, rows))

    def _task_edges(self, job: EdgesTask, case: MeasureCase, result: TaskResult):
        m = case.measure
        spectrum = _spectrum(m, self.tol)
        edges = spectral_edges(m)
        ground = spectrum.eigenvalues[0] if spectrum.count else 0.0
        count_lower = n_minus_lower(m)
        rows = [
            ("lambda_1", edges.lambda1_lo, ground, edges.lambda1_hi,
             result.flag(_within(edges.lambda1_lo, ground, edges.lambda1_hi, self.slack))),
            ("Lambda", edges.Lambda_lo, 0.0, edges.Lambda_hi,
             result.flag(_within(edges.Lambda_lo, 0.0, edges.Lambda_hi, self.slack))),
            ("N_minus", count_lower, spectrum.count, None,
             result.flag(_within(count_lower, spectrum.count, math.inf, self.slack))),
        ]
        result.tables.append(ReportTable(result.label, EDGE_COLUMNS, rows))

    def _task_compare(self, job: CompareTask, result: TaskResult):
        lt = job.family == "lt_counterexample"
        gamma = job.exponent - 0.5 if lt else job.exponent
        rows, previous, last_step = [], None, None
        for K in job.depths:
            if lt:
                m = generate_example(job.family, {"p": job.exponent, "K": K})
                a_value = b_value = None
            else:
                m = generate_example(job.family, {"gamma": job.exponent, "K": K})
                nw = nw_functionals(m, gamma, K)
                a_value, b_value = nw.A, nw.B
            classical = classical_lt_integral(m, gamma)
            qstar = power_integral(m, 1.0, gamma).value if not m.is_zero else 0.0
            trend = None
            if previous is not None:
                blocks = len(range(2, K + 1, 2)) - len(range(2, previous[0] + 1, 2))
                step = qstar - previous[4]
                if lt:
                    ok = (classical - previous[1] >= 0.9 * blocks
                          and abs(step) < 0.05 * max(previous[4], 1e-300))
                else:
                    ok = (a_value - previous[2] >= 0.5 * blocks and b_value - previous[3] >= 0.5 * blocks
                          and (last_step is None or 0.0 < step <= QSTAR_DECAY_RATIO * last_step))
                trend = result.flag(ok)
                last_step = step
            row = (K, classical, a_value, b_value, qstar, trend)
            rows.append(row)
            previous = row
        result.tables.append(ReportTable(result.label, COMPARE_COLUMNS, rows))


async def run_scenario(path: Union[str, Path], out_dir: Optional[Path] = None,
                       threads: Optional[int] = None, tol: Optional[float] = None) -> ScenarioResult:
    """Parse, execute and report one scenario file"""
    try:
        scenario = load_scenario(path)
    except ScenarioError as e:
        logger.error(str(e))
        return ScenarioResult(Path(path).stem, EXIT_PARSE, error=str(e))
    return await ScenarioRunner(scenario, out_dir, threads, tol).run()
