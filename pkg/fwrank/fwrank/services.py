import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from django.conf import settings

from . import bounds, covering, hadamard, widthdec
from .exceptions import BadArgs, FactorWidthError, NotFactorWidthK
from .formats import read_graph_file, read_matrix_file
from .matcore import ToleranceConfig

logger = logging.getLogger(__name__)

VERBS = ('check', 'decompose', 'bounds', 'cover', 'cliquecover', 'hadamard', 'conjecture')
FORMATS = ('text', 'json')
EXIT_UNDETERMINED = 4


@dataclass
class Command:
    verb: str
    inputs: list = field(default_factory=list)
    k: Optional[int] = None
    s: Optional[float] = None
    n: Optional[int] = None
    format: str = 'text'
    tol_psd: Optional[float] = None
    tol_recon: Optional[float] = None
    tol_zero: Optional[float] = None
    max_iter: Optional[int] = None
    budget: Optional[int] = None
    m_cap: Optional[int] = None
    min_power: bool = False
    trials: Optional[int] = None
    seed: Optional[int] = None
    records: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.verb not in VERBS:
            raise BadArgs(f"unknown verb {self.verb!r}")
        if self.format not in FORMATS:
            raise BadArgs(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise BadArgs("--jobs must be at least 1")
        missing = [name for name in self.required() if getattr(self, name) in (None, [])]
        if missing:
            raise BadArgs(f"{self.verb} requires {', '.join(missing)}")
        if self.verb == 'hadamard' and len(self.inputs) > 2:
            raise BadArgs("hadamard takes one or two matrix files")

    def required(self):
        return {
            'check': ('inputs',),
            'decompose': ('inputs',),
            'bounds': ('inputs',),
            'cover': ('n', 'k'),
            'cliquecover': ('inputs', 'k'),
            'hadamard': ('inputs',),
            'conjecture': ('n', 'k', 's', 'trials'),
        }[self.verb]

    def tolerance_overrides(self):
        return {
            'tol_psd': self.tol_psd,
            'tol_recon': self.tol_recon,
            'tol_zero': self.tol_zero,
            'max_iter': self.max_iter,
        }


@dataclass
class Outcome:
    input: Optional[str]
    report: Optional[dict] = None
    error: Optional[FactorWidthError] = None
    undetermined: bool = False

    @property
    def exit_code(self):
        if self.error is not None:
            return self.error.exit_code
        return EXIT_UNDETERMINED if self.undetermined else 0


@dataclass
class ServiceResult:
    outcomes: list

    @property
    def exit_code(self):
        errors = [o.exit_code for o in self.outcomes if o.error is not None]
        if errors:
            return max(errors)
        if self.outcomes and all(o.undetermined for o in self.outcomes):
            return EXIT_UNDETERMINED
        return 0

    @property
    def reports(self):
        return [o.report for o in self.outcomes if o.report is not None]

    @property
    def errors(self):
        return [o for o in self.outcomes if o.error is not None]


class FactorWidthService:
    def __init__(self, config=None):
        self.config = dict(config if config is not None else getattr(settings, 'FACTOR_WIDTH', {}))

    def setting(self, key, default):
        return self.config.get(key, default)

    def tolerance(self, **overrides):
        """Tolerances from settings, with per-call overrides"""
        return ToleranceConfig.from_settings(self.config, **overrides)

    def width_or(self, A, k, cfg):
        return k if k is not None else widthdec.factor_width(A, cfg).k

    # ==================== MATRIX VERBS ====================

    def check(self, A, k=None, cfg=None):
        """Factor width of A, plus a membership verdict when k is given"""
        cfg = cfg or self.tolerance()
        A = A.with_tol(cfg)
        width = widthdec.factor_width(A, cfg)
        report = {'verb': 'check', 'n': A.n, 'factor_width': width.to_dict()}
        undetermined = width.bracket[0] != width.bracket[1]
        if k is not None:
            verdict = widthdec.exact_membership(A, k, cfg)
            report['k'] = k
            report['membership'] = verdict.to_dict()
            undetermined = undetermined or verdict.status == widthdec.UNDETERMINED
            logger.info("check n=%d k=%d: %s", A.n, k, verdict.status)
        report['undetermined'] = undetermined
        return report

    def decompose(self, A, k=None, cfg=None):
        """First constructive decomposition that applies, else the solver certificate"""
        cfg = cfg or self.tolerance()
        A = A.with_tol(cfg)
        auto = k is None
        k = self.width_or(A, k, cfg)
        n_limit = self.setting('N_LIMIT', bounds.N_LIMIT)
        report = {'verb': 'decompose', 'n': A.n, 'k': k, 'auto_k': auto, 'undetermined': False}

        for source, decomposition in bounds.constructive_decompositions(A, k, cfg, n_limit):
            logger.info("decompose n=%d k=%d: %s with %d terms", A.n, k, source, decomposition.term_count())
            report.update(source=source, decomposition=decomposition.to_dict())
            return report

        verdict = widthdec.exact_membership(A, k, cfg)
        if verdict.status == widthdec.NOT_MEMBER:
            raise NotFactorWidthK(f"factor width exceeds {k}")
        if verdict.status == widthdec.UNDETERMINED:
            logger.warning("decompose n=%d k=%d: solver undetermined", A.n, k)
            report.update(source='membership', decomposition=None, undetermined=True)
            return report
        report.update(source='membership', decomposition=verdict.certificate.to_dict())
        return report

    def bounds(self, A, k=None, cfg=None, budget=None):
        cfg = cfg or self.tolerance()
        A = A.with_tol(cfg)
        k = self.width_or(A, k, cfg)
        budget = budget or self.setting('BUDGET', covering.DEFAULT_BUDGET)
        report = bounds.bounds_report(
            A, k, cfg, budget,
            n_limit=self.setting('N_LIMIT', bounds.N_LIMIT),
            membership_limit=self.setting('MEMBERSHIP_LIMIT', bounds.MEMBERSHIP_LIMIT),
        )
        data = {'verb': 'bounds', 'n': A.n, 'bounds': report.to_dict()}
        if A.n <= 4:
            data['small'] = bounds.fran_exact_small(A, cfg, budget).to_dict()
        logger.info("bounds n=%d k=%d: [%d, %d]", A.n, k, report.lower_value(), report.upper_value())
        return data

    # ==================== COMBINATORIAL VERBS ====================

    def cover(self, n, k, budget=None):
        budget = budget or self.setting('BUDGET', covering.DEFAULT_BUDGET)
        solution = covering.covering_number(n, k, budget)
        if not solution.certified:
            logger.warning("cover n=%d k=%d: budget exhausted, reporting greedy %d", n, k, solution.value)
        return {
            'verb': 'cover',
            'schonheim': covering.schonheim_bound(n, k),
            'audited': covering.verify_design(solution.design),
            **solution.to_dict(),
        }

    def cliquecover(self, G, k, budget=None):
        budget = budget or self.setting('BUDGET', covering.DEFAULT_BUDGET)
        solution = covering.clique_cover_number(G, k, budget)
        return {'verb': 'cliquecover', 'audited': covering.verify_clique_cover(solution.cover), **solution.to_dict()}

    def hadamard(self, A, B=None, s=None, k=None, cfg=None, min_power=False, m_cap=None):
        cfg = cfg or self.tolerance()
        m_cap = m_cap or self.setting('M_CAP', hadamard.M_CAP)
        report = hadamard.hadamard_report(
            A.with_tol(cfg), B.with_tol(cfg) if B is not None else None, s, k, cfg, min_power, m_cap)
        return {'verb': 'hadamard', 'n': A.n, **report.to_dict()}

    def conjecture(self, n, k, s, trials, seed=None, cfg=None, jobs=1):
        cfg = cfg or self.tolerance()
        seed = seed if seed is not None else self.setting('SEED', 0)
        result = hadamard.conjecture_search(n, k, s, trials, seed, cfg, jobs)
        report = {'verb': 'conjecture', 'n': n, 'k': k, 's': s, 'seed': seed, **result.to_dict()}
        return report, result

    # ==================== DISPATCH ====================

    def run(self, command):
        """Run a command; every input file gets its own outcome"""
        cfg = self.tolerance(**command.tolerance_overrides())
        logger.info("run %s on %d input(s)", command.verb, len(command.inputs))

        if command.verb in ('check', 'decompose', 'bounds', 'cliquecover'):
            payloads = [(self.config, command, path, cfg) for path in command.inputs]
            if command.jobs > 1 and len(payloads) > 1:
                with ProcessPoolExecutor(max_workers=min(command.jobs, len(payloads))) as ex:
                    outcomes = list(ex.map(_process_input, payloads))
            else:
                outcomes = [_process_input(payload) for payload in payloads]
            return ServiceResult(outcomes)

        try:
            report = self._run_single(command, cfg)
        except FactorWidthError as e:
            logger.info("%s failed: %s", command.verb, e.code)
            return ServiceResult([Outcome(input=None, error=e)])
        return ServiceResult([Outcome(input=None, report=report)])

    def _run_single(self, command, cfg):
        if command.verb == 'cover':
            return self.cover(command.n, command.k, command.budget)
        if command.verb == 'conjecture':
            report, result = self.conjecture(
                command.n, command.k, command.s, command.trials, command.seed, cfg, command.jobs)
            if command.records:
                Path(command.records).write_text(result.to_jsonl())
            return report
        A = read_matrix_file(command.inputs[0], tol=cfg)
        B = read_matrix_file(command.inputs[1], tol=cfg) if len(command.inputs) > 1 else None
        return self.hadamard(A, B, command.s, command.k, cfg, command.min_power, command.m_cap)

    def run_input(self, command, path, cfg):
        if command.verb == 'cliquecover':
            return self.cliquecover(read_graph_file(path), command.k, command.budget)
        A = read_matrix_file(path, tol=cfg)
        if command.verb == 'check':
            return self.check(A, command.k, cfg)
        if command.verb == 'decompose':
            return self.decompose(A, command.k, cfg)
        return self.bounds(A, command.k, cfg, command.budget)


def _process_input(payload):
    """One input file, isolated from the others"""
    config, command, path, cfg = payload
    service = FactorWidthService(config)
    try:
        report = service.run_input(command, path, cfg)
    except FactorWidthError as e:
        logger.info("%s on %s failed: %s", command.verb, path, e.code)
        return Outcome(input=path, error=e)
    report['input'] = str(path)
    return Outcome(input=path, report=report, undetermined=bool(report.get('undetermined')))


fw_service = FactorWidthService()
