"""
Entrywise (Hadamard) products and powers: rank bounds, factor-width
preservation, the least power that reaches factor width two, and a seeded
counterexample search for real powers in the conjectural regime.
"""
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .bounds import fran_upper_bounds
from .exceptions import (
    BadArgs,
    BadK,
    BadRegime,
    CapExceeded,
    DegenerateSubmatrix,
    NegativeEntryNonIntegerPower,
    NotFactorWidthK,
    NotPSD,
    Overflow,
)
from .matcore import (
    DEFAULT_TOLERANCE,
    SymMatrix,
    diagonal_normalize,
    hadamard_power,
    hadamard_product,
    is_integer,
    is_psd,
    is_scaled_diagonally_dominant,
    require_psd,
)
from .widthdec import (
    NOT_MEMBER,
    UNDETERMINED,
    factor_width,
    factor_width_1,
    factor_width_le_2,
    membership,
    nonpsd_witness,
    verify_dual_witness,
)

logger = logging.getLogger(__name__)

GUARANTEED = 'Guaranteed'
NOT_GUARANTEED = 'NotGuaranteed'
COUNTEREXAMPLE_CLASS = 'CounterexampleClass'

INT64_MAX = 2 ** 63 - 1
M_CAP = 10_000


class PowerVerdict(NamedTuple):
    verdict: str
    rule: str

    def to_dict(self):
        return {'verdict': self.verdict, 'rule': self.rule}


class MinimalPower(NamedTuple):
    M: int
    verified_through: int

    def to_dict(self):
        return {'M': self.M, 'verified_through': self.verified_through}


@dataclass(frozen=True)
class HadamardReport:
    operation: str
    input_widths: tuple
    fran_bound: Optional[int]
    width_claim: Optional[int]
    justification: str
    psd_verdict: bool
    power: Optional[PowerVerdict] = None
    minimal_power: Optional[MinimalPower] = None

    def to_dict(self):
        return {
            'operation': self.operation,
            'input_widths': list(self.input_widths),
            'fran_bound': self.fran_bound,
            'width_claim': {'value': self.width_claim, 'justification': self.justification},
            'psd_verdict': self.psd_verdict,
            'power': self.power.to_dict() if self.power else None,
            'minimal_power': self.minimal_power.to_dict() if self.minimal_power else None,
        }


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    verdict: str
    residual: Optional[float]
    matrix: tuple = ()
    witness: tuple = ()

    def to_dict(self):
        data = {'trial': self.trial, 'seed': self.seed, 'verdict': self.verdict, 'residual': self.residual}
        if self.verdict == NOT_MEMBER:
            data['matrix'] = [list(row) for row in self.matrix]
            data['witness'] = [list(row) for row in self.witness]
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


class ConjectureResult(NamedTuple):
    counterexamples: list
    tested: int
    records: list

    def to_dict(self):
        return {
            'tested': self.tested,
            'counterexamples': [r.to_dict() for r in self.counterexamples],
            'undetermined': sum(1 for r in self.records if r.verdict == UNDETERMINED),
        }

    def to_jsonl(self):
        return ''.join(r.to_json() + '\n' for r in self.records)


# ==================== RANK BOUNDS ====================

def fran_product_bound(rA, rB):
    if rA < 1 or rB < 1:
        raise BadArgs(f"ranks must be at least 1, got {rA} and {rB}")
    return rA * rB


def fran_power_bound(r, s):
    """C(r + s - 1, s): one term per multiset of s factors."""
    if r < 1 or not is_integer(s) or s < 1:
        raise BadArgs(f"need r >= 1 and an integer s >= 1, got r={r}, s={s}")
    value = math.comb(r + int(s) - 1, int(s))
    if value > INT64_MAX:
        raise Overflow(f"C({r + int(s) - 1}, {int(s)}) exceeds 2^63 - 1")
    return value


# ==================== WIDTH PRESERVATION ====================

def power_preserves_width(A, k, s):
    """Whether A^s is known to keep factor width <= k, and which result says so."""
    n = A.n
    if not 1 <= k <= n:
        raise BadK(f"k must lie in 1..{n}, got {k}")
    if not s > 0:
        raise BadArgs(f"power must be positive, got {s}")
    integral = is_integer(s)
    if not integral and (A.array < -A.tol.tol_zero).any():
        raise NegativeEntryNonIntegerPower(f"non-integer power {s} of a matrix with negative entries")
    require_psd(A)
    if (k == 1 and not factor_width_1(A)) or (k == 2 and not factor_width_le_2(A)):
        raise NotFactorWidthK(f"factor width exceeds {k}")

    if k == 1:
        return PowerVerdict(GUARANTEED, 'trivial-diagonal')
    if integral:
        return PowerVerdict(GUARANTEED, 'integer-power')
    if k == 2 and s >= 1:
        return PowerVerdict(GUARANTEED, 'width-two-real-power')
    if k == n and s >= n - 2:
        return PowerVerdict(GUARANTEED, 'fitzgerald-horn')
    if s < min(k - 1, n - 2):
        return PowerVerdict(COUNTEREXAMPLE_CLASS, 'below-threshold')
    return PowerVerdict(NOT_GUARANTEED, 'conjectural')


def _strictly_dominant(B, tol):
    a = np.abs(B)
    off = a.sum(axis=1) - a.diagonal()
    return bool(np.all(a.diagonal() - off > tol))


def minimal_power_to_fw2(A, m_cap=M_CAP, cfg=None):
    """Least m with factor width of A^m at most two, and how far the run of passes extends.

    Works on the unit-diagonal normalization B: (DAD)^m = D^m B^m D^m, so the
    width of A^m and B^m agree. Once B^m is strictly diagonally dominant every
    larger power is too, and the run extends to ``m_cap``.
    """
    cfg = cfg or A.tol
    if m_cap < 1:
        raise BadArgs(f"m_cap must be at least 1, got {m_cap}")
    require_psd(A, cfg)
    if (A.array < -cfg.tol_zero).any():
        raise BadArgs("minimal power search needs an entrywise nonnegative matrix")

    a = A.array
    d = a.diagonal()
    for i in range(A.n):
        for j in range(i + 1, A.n):
            if d[i] * d[j] - a[i, j] ** 2 <= cfg.tol_psd * max(d[i] * d[j], cfg.tol_zero):
                raise DegenerateSubmatrix(f"2x2 principal submatrix on ({i + 1}, {j + 1}) is singular")

    B = diagonal_normalize(A).B.array
    first = None
    verified = None
    for m in range(1, m_cap + 1):
        P = B ** m
        passed = is_scaled_diagonally_dominant(SymMatrix(P, tol=cfg, check_symmetry=False), cfg)
        if first is None and not passed:
            continue
        if not passed:
            break
        if first is None:
            first = m
            logger.debug("minimal_power_to_fw2: first pass at m=%d", m)
        verified = m
        if _strictly_dominant(P, cfg.tol_zero):
            verified = m_cap
            break
    if first is None:
        raise CapExceeded(f"no power m <= {m_cap} has factor width at most two")
    return MinimalPower(M=first, verified_through=verified)


# ==================== CONJECTURE SEARCH ====================

def random_width_k_matrix(n, k, rng):
    """Sum of n + k outer products of uniform(0, 1) vectors on random k-subsets."""
    A = np.zeros((n, n))
    for _ in range(n + k):
        support = rng.choice(n, size=k, replace=False)
        x = np.zeros(n)
        x[support] = rng.uniform(0.0, 1.0, size=k)
        A += np.outer(x, x)
    return A


def _run_trial(args):
    n, k, s, seed, trial, cfg = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    A = random_width_k_matrix(n, k, rng)
    P = hadamard_power(SymMatrix(A, tol=cfg, check_symmetry=False), s)
    try:
        verdict = membership(P, k, cfg)
        status, residual = verdict.status, verdict.distance_estimate
        witness = verdict.certificate.W.to_list() if status == NOT_MEMBER else ()
    except NotPSD:
        candidate = nonpsd_witness(P)
        status = NOT_MEMBER if verify_dual_witness(P, candidate, k, cfg) else UNDETERMINED
        residual = None
        witness = candidate.W.to_list()
    if status == NOT_MEMBER:
        logger.warning("conjecture_search: counterexample at trial %d (seed %d)", trial, seed)
    return TrialRecord(
        trial=trial,
        seed=seed,
        verdict=status,
        residual=residual,
        matrix=tuple(tuple(row) for row in A.tolist()),
        witness=tuple(tuple(row) for row in witness),
    )


def conjecture_search(n, k, s, trials, seed=0, cfg=None, jobs=1):
    """Look for factor-width-k nonnegative A with A^s of width above k.

    Each trial draws from its own generator seeded by ``(seed, trial)``, so the
    records do not depend on ``jobs`` or on scheduling.
    """
    cfg = cfg or DEFAULT_TOLERANCE
    if not 2 <= k <= n:
        raise BadK(f"need 2 <= k <= n, got n={n}, k={k}")
    if trials < 1:
        raise BadArgs(f"trials must be at least 1, got {trials}")
    if is_integer(s):
        raise BadRegime(f"integer power {s} always preserves factor width")
    if s < min(k - 1, n - 2):
        raise BadRegime(f"s = {s} lies below min(k - 1, n - 2) = {min(k - 1, n - 2)}")

    tasks = [(n, k, float(s), seed, t, cfg) for t in range(trials)]
    if jobs > 1:
        workers = max(1, min(jobs, os.cpu_count() or 1, len(tasks)))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_trial, tasks))
    else:
        records = [_run_trial(task) for task in tasks]

    counterexamples = [r for r in records if r.verdict == NOT_MEMBER]
    logger.info("conjecture_search n=%d k=%d s=%s: %d trials, %d counterexamples",
                n, k, s, trials, len(counterexamples))
    return ConjectureResult(counterexamples=counterexamples, tested=len(records), records=records)


# ==================== REPORT ====================

def _best_upper(A, k, cfg):
    return min(b.value for b in fran_upper_bounds(A, k, cfg))


def _effective_k(widths, k):
    k_eff = k if k is not None else max(widths)
    if max(widths) > k_eff:
        raise NotFactorWidthK(f"input widths {list(widths)} exceed k = {k_eff}")
    return k_eff


def hadamard_report(A, B=None, s=None, k=None, cfg=None, min_power=False, m_cap=M_CAP):
    """Report for a product (``B`` given), a power (``s`` given) or a minimal power search."""
    cfg = cfg or A.tol
    if B is not None and s is not None:
        raise BadArgs("give either a second matrix or a power, not both")
    require_psd(A, cfg)
    minimal = minimal_power_to_fw2(A, m_cap, cfg) if min_power else None

    if B is not None:
        require_psd(B, cfg)
        widths = (factor_width(A, cfg).k, factor_width(B, cfg).k)
        k_eff = _effective_k(widths, k)
        result = hadamard_product(A, B)
        bound = fran_product_bound(_best_upper(A, k_eff, cfg), _best_upper(B, k_eff, cfg))
        return HadamardReport('product', widths, bound, min(widths), 'schur-product',
                              is_psd(result, cfg).success, minimal_power=minimal)

    widths = (factor_width(A, cfg).k,)
    if s is None:
        if minimal is None:
            raise BadArgs("nothing to report: give a second matrix, a power, or ask for the minimal power")
        return HadamardReport('minimal_power', widths, None, 2, 'large-power', True, minimal_power=minimal)

    k_eff = _effective_k(widths, k)
    result = hadamard_power(A, s)
    psd = is_psd(result, cfg).success
    if is_integer(s):
        bound = fran_power_bound(_best_upper(A, k_eff, cfg), int(s))
        return HadamardReport('integer_power', widths, bound, widths[0], 'integer-power', psd,
                              minimal_power=minimal)

    verdict = power_preserves_width(A, k_eff, s)
    claim = k_eff if verdict.verdict == GUARANTEED else None
    return HadamardReport('real_power', widths, None, claim, verdict.rule, psd, power=verdict, minimal_power=minimal)
