"""Counting-level planning of robust syndrome extraction.

A syndrome measurement ``Pi'`` with ``|Pi'|`` outcomes is treated as a
projective POVM and the planner asks how many q-observables are needed to
read its outcome robustly against ``t`` outcome errors.
"""

import logging
import math
from typing import Literal, Sequence

from pydantic import BaseModel, Field, model_validator

from .combinatorics import (
    Convention,
    SearchCertificate,
    TableRow,
    ball_volume,
    log_ceil,
    min_observables,
    parse_conventions,
    q_ary_entropy,
    table_row,
)
from .exceptions import DomainError, NotApplicableError

logger = logging.getLogger(__name__)

Family = Literal["qudit-distance-code", "binomial", "explicit"]

WITH_UNCORRECTABLE_NOTE = "|Pi'| <= |K| + 1: one extra projector for the uncorrectable space"
KNILL_LAFLAMME_NOTE = "|Pi'| <= |K|: Knill-Laflamme recovery needs no extra outcome"

PRINTED_ASYMPTOTIC_FORM = (
    "n >= m (H_{p^2}(k/m) log_2 p + o(1)) / (log_2 H_q(tau) + o(1)); "
    "n <= m (H_{p^2}(2k/m) log_2 p + o(1)) / (log_2 H_q(2 tau) + o(1))"
)


class QECParams(BaseModel):
    family: Family
    p: int | None = Field(default=None, ge=2)
    m: int | None = Field(default=None, ge=1)
    k: int | None = Field(default=None, ge=0)
    g0: int | None = Field(default=None, ge=0)
    g1: int | None = Field(default=None, ge=0)
    povm_size: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_family(self):
        required = {
            "qudit-distance-code": ("p", "m", "k"),
            "binomial": ("g0", "g1", "k"),
            "explicit": ("povm_size",),
        }[self.family]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.family} parameters need {', '.join(missing)}")
        if self.family == "qudit-distance-code" and self.k > self.m:
            raise ValueError(f"cannot correct k={self.k} errors on m={self.m} qudits")
        return self

    @property
    def gap(self) -> int:
        if self.family != "binomial":
            raise NotApplicableError("the gap is defined for binomial codes only")
        return self.g0 + self.g1 + 1

    @property
    def N(self) -> int:
        if self.family != "binomial":
            raise NotApplicableError("N is defined for binomial codes only")
        return max(self.g0, self.g1, 2 * self.k)

    def describe(self) -> str:
        if self.family == "qudit-distance-code":
            return f"{self.m}-qudit p={self.p} code correcting {self.k}"
        if self.family == "binomial":
            return f"binomial(g0={self.g0}, g1={self.g1}, k={self.k})"
        return f"explicit(|Pi'|={self.povm_size})"


def nine_qubit_params() -> QECParams:
    """Distance-3 code on nine qubits: ``|K| = 1 + 9 * 3``."""
    return QECParams(family="qudit-distance-code", p=2, m=9, k=1)


def binomial_params(k: int) -> QECParams:
    """Binomial code correcting ``k`` losses, gains and dephasings."""
    return QECParams(family="binomial", g0=k, g1=k, k=k)


def correctible_set_size(params: QECParams) -> int:
    if params.family == "qudit-distance-code":
        return ball_volume(params.p**2, params.m, params.k)
    if params.family == "binomial":
        return params.g0 + params.g1 + params.k + 1
    raise NotApplicableError("an explicit |Pi'| has no correctible set")


class PovmSizeBound(BaseModel):
    correctible_set_size: int | None
    with_uncorrectable: int
    knill_laflamme: int | None
    notes: tuple[str, str] = (WITH_UNCORRECTABLE_NOTE, KNILL_LAFLAMME_NOTE)

    @property
    def value(self) -> int:
        return self.with_uncorrectable

    def outcomes(self, use_knill_laflamme: bool = False) -> int:
        if use_knill_laflamme and self.knill_laflamme is not None:
            return self.knill_laflamme
        return self.with_uncorrectable


def povm_size_bound(params: QECParams) -> PovmSizeBound:
    if params.family == "explicit":
        return PovmSizeBound(
            correctible_set_size=None, with_uncorrectable=params.povm_size, knill_laflamme=None
        )
    size = correctible_set_size(params)
    return PovmSizeBound(correctible_set_size=size, with_uncorrectable=size + 1, knill_laflamme=size)


class PlanEntry(BaseModel):
    convention: Convention
    distance: int
    n: str
    n_lower: int
    n_upper: int
    provenance: Literal["exact", "bracket"]
    witness_available: bool
    nodes: int

    @classmethod
    def from_certificate(cls, convention: Convention, cert: SearchCertificate) -> "PlanEntry":
        return cls(
            convention=convention, distance=cert.d, n=cert.display, n_lower=cert.lower,
            n_upper=cert.upper, provenance=cert.kind, witness_available=cert.witness is not None,
            nodes=cert.nodes,
        )


class SyndromePlan(BaseModel):
    params: QECParams
    correctible_set_size: int | None
    povm_size_bound: PovmSizeBound
    outcomes: int
    t: int
    q: int
    entries: list[PlanEntry]
    baseline_single: int
    baseline: int

    def entry(self, convention: Convention | str) -> PlanEntry:
        convention = Convention(convention)
        for e in self.entries:
            if e.convention == convention:
                return e
        raise KeyError(convention.value)


def plan_syndrome_extraction(
    params: QECParams,
    t: int,
    q: int = 2,
    convention: Convention | str = "both",
    budget: int | None = None,
    use_knill_laflamme: bool = False,
) -> SyndromePlan:
    """Observables needed to read ``Pi'`` robustly, with the repeat-each-bit baseline."""
    if t < 0:
        raise DomainError(f"outcome-error radius must be non-negative, got {t}")
    if q < 2:
        raise DomainError(f"alphabet size must be at least 2, got {q}")
    conventions = parse_conventions(convention.value if isinstance(convention, Convention) else convention)
    bound = povm_size_bound(params)
    M = bound.outcomes(use_knill_laflamme)
    entries = [
        PlanEntry.from_certificate(c, min_observables(q, t, M, c, budget)) for c in conventions
    ]
    single = log_ceil(q, M)
    plan = SyndromePlan(
        params=params,
        correctible_set_size=bound.correctible_set_size,
        povm_size_bound=bound,
        outcomes=M,
        t=t,
        q=q,
        entries=entries,
        baseline_single=single,
        baseline=single * (2 * t + 1),
    )
    logger.info(
        "%s: %d outcomes, %s", params.describe(), M,
        ", ".join(f"{e.convention.value} n={e.n}" for e in entries),
    )
    return plan


class SyndromeAsymptotics(BaseModel):
    lower: float
    upper: float
    reconstructed: bool = True
    printed_form: str = PRINTED_ASYMPTOTIC_FORM


def syndrome_asymptotic_bounds(p: int, m: int, k: int, epsilon_frac: float, q: int = 2) -> SyndromeAsymptotics:
    """Leading-order observable counts for ``p``-ary codes on ``m`` qudits correcting ``k``.

    Uses ``log_q |K| ~ m H_{p^2}(k/m) log_q(p^2)`` in the general length
    estimate ``log_q M / (1 - H_q(eps))``. The printed form in
    :data:`PRINTED_ASYMPTOTIC_FORM` does not reduce to this and is only carried
    along as text.
    """
    if p < 2 or q < 2 or m < 1 or k < 0:
        raise DomainError("need p >= 2, q >= 2, m >= 1 and k >= 0")
    if 2 * k > m:
        raise DomainError(f"2k/m = {2 * k / m:.3g} exceeds 1")
    if epsilon_frac < 0 or 2 * epsilon_frac >= (q - 1) / q:
        raise DomainError(f"need 0 <= epsilon_frac and 2*epsilon_frac < {(q - 1) / q:.4f}")
    scale = m * math.log(p * p, q)
    lower = scale * q_ary_entropy(p * p, k / m) / (1 - q_ary_entropy(q, epsilon_frac))
    upper = scale * q_ary_entropy(p * p, 2 * k / m) / (1 - q_ary_entropy(q, 2 * epsilon_frac))
    return SyndromeAsymptotics(lower=lower, upper=upper)


# |Pi'| and n from the binomial-code table, k = 1..8, single outcome error
TABLE_TWO_PRINTED = {
    1: (5, 7), 2: (8, 7), 3: (11, 8), 4: (14, 8),
    5: (17, 9), 6: (20, 9), 7: (23, 10), 8: (26, 10),
}


def table_two(
    conventions: Sequence[Convention] = (Convention.STRICT, Convention.EVEN),
    ks: Sequence[int] = tuple(TABLE_TWO_PRINTED),
    budget: int | None = None,
) -> list[TableRow]:
    """Binary observables for binomial codes with ``g0 = g1 = k`` and one outcome error."""
    rows = []
    for k in ks:
        M = povm_size_bound(binomial_params(k)).value
        printed = TABLE_TWO_PRINTED.get(k)
        if printed is not None and printed[0] != M:
            logger.warning("binomial k=%d: |Pi'| = %d, printed %d", k, M, printed[0])
        for convention in conventions:
            rows.append(
                table_row(
                    "II", 2, 1, M, convention, budget, printed[1] if printed else None,
                    k=k, povm_size=M,
                )
            )
    return rows
