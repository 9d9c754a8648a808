"""Born-rule sampling, sequential observable measurement and decode campaigns.

Errors only ever touch the classical outcome word, after the full clean word
has been produced; the post-measurement state is never corrupted here.

Every trial draws from its own generators seeded by ``(seed, trial, stream)``
so campaigns are reproducible and can run trials in any order.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .codes import (
    ClassicalCode,
    Word,
    apply_error_pattern,
    decode_nearest,
    enumerate_error_patterns,
    resolve_code,
)
from .config import get_settings
from .exceptions import DimensionError, DomainError, IndexRangeError
from .observables import (
    ObservableSet,
    ProjectivePOVM,
    QuantumState,
    build_observables,
    load_povm,
)

logger = logging.getLogger(__name__)

MEASURE_STREAM = 0
NOISE_STREAM = 1


def trial_rng(seed: int, trial: int = 0, stream: int = MEASURE_STREAM) -> np.random.Generator:
    return np.random.default_rng([seed, trial, stream])


def _as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class NoiseModel(BaseModel):
    """Classical-outcome noise.

    ``adversarial`` corrupts the given 1-based ``positions`` (or a seeded random
    choice of ``t`` positions); ``independent`` flips each symbol with
    ``flip_probability`` to a uniformly chosen different symbol.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["adversarial", "independent"] = "adversarial"
    t: int = Field(default=0, ge=0)
    positions: tuple[int, ...] | None = None
    flip_probability: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_positions(self):
        if self.positions is not None:
            if len(set(self.positions)) != len(self.positions):
                raise ValueError("corrupted positions must be distinct")
            if len(self.positions) > self.t:
                raise ValueError(f"{len(self.positions)} positions requested but t={self.t}")
        return self

    @classmethod
    def adversarial(cls, t: int, positions: Sequence[int] | None = None, seed: int = 0) -> "NoiseModel":
        if positions is not None:
            positions = tuple(positions)
            t = max(t, len(positions))
        return cls(kind="adversarial", t=t, positions=positions, seed=seed)

    @classmethod
    def independent(cls, p: float, seed: int = 0) -> "NoiseModel":
        return cls(kind="independent", flip_probability=p, seed=seed)

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls()

    def describe(self) -> str:
        if self.kind == "independent":
            return f"independent(p={self.flip_probability:g})"
        if self.positions is not None:
            return f"adversarial(positions={list(self.positions)})"
        return f"adversarial(t={self.t})"


def born_probabilities(rho: QuantumState, projectors: np.ndarray) -> np.ndarray:
    """``tr[rho P]`` for a stack of projectors, clipped and renormalised."""
    if projectors.shape[-1] != rho.dim:
        raise DimensionError(f"state has dimension {rho.dim}, projectors have {projectors.shape[-1]}")
    probs = np.einsum("kij,ji->k", projectors, rho.rho).real
    if probs.min() < -rho.tolerance:
        raise DomainError(f"negative outcome probability {probs.min():.3g} beyond tolerance {rho.tolerance:g}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    cumulative = np.cumsum(probs)
    idx = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return min(idx, len(probs) - 1)


def _collapse(rho: np.ndarray, projector: np.ndarray) -> tuple[np.ndarray, float]:
    post = projector @ rho @ projector
    weight = float(np.trace(post).real)
    if weight <= 0.0:
        return post, 0.0
    return post / weight, weight


def measure_projective(
    rho: QuantumState, povm: ProjectivePOVM, seed: int | np.random.Generator
) -> tuple[int, QuantumState, float]:
    """Sample ``k`` with probability ``tr[rho P_k]``; returns ``(k, rho_k, p_k)``."""
    probs = born_probabilities(rho, povm.stack())
    k = _sample(probs, _as_rng(seed))
    post, _ = _collapse(rho.rho, povm.projectors[k])
    return k + 1, QuantumState.trusted(post, rho.tolerance), float(probs[k])


def post_measurement_state(rho: QuantumState, projector: np.ndarray) -> QuantumState:
    """``P rho P / tr[rho P]``; raises if the outcome has zero probability."""
    post, weight = _collapse(rho.rho, np.asarray(projector))
    if weight <= rho.tolerance:
        raise DomainError("outcome has zero probability for this state")
    return QuantumState.trusted(post, rho.tolerance)


@dataclass(frozen=True)
class SequenceOutcome:
    state: QuantumState
    word: Word
    step_probabilities: tuple[float, ...]


def _check_order(S: ObservableSet, order: Sequence[int] | None) -> list[int]:
    if order is None:
        return list(range(1, S.n + 1))
    order = [int(j) for j in order]
    if sorted(order) != list(range(1, S.n + 1)):
        raise IndexRangeError(f"measurement order {order} is not a permutation of 1..{S.n}")
    return order


def measure_observable_sequence(
    rho: QuantumState,
    S: ObservableSet,
    seed: int | np.random.Generator,
    order: Sequence[int] | None = None,
) -> SequenceOutcome:
    """Measure ``Q_j`` one after another, collapsing the state on each symbol.

    ``order`` is a 1-based permutation of the observables; the returned word is
    always in position order.
    """
    if rho.dim != S.dim:
        raise DimensionError(f"state has dimension {rho.dim}, observables act on {S.dim}")
    rng = _as_rng(seed)
    current = rho
    word = [0] * S.n
    step_probs = []
    for j in _check_order(S, order):
        projectors = S.outcome_projectors[j - 1]
        probs = born_probabilities(current, projectors)
        z = _sample(probs, rng)
        post, _ = _collapse(current.rho, projectors[z])
        current = QuantumState.trusted(post, rho.tolerance)
        word[j - 1] = z
        step_probs.append(float(probs[z]))
    return SequenceOutcome(state=current, word=tuple(word), step_probabilities=tuple(step_probs))


def collapse_on_word(rho: QuantumState, S: ObservableSet, word: Sequence[int]) -> tuple[QuantumState, float]:
    """State and probability after observing the full outcome word ``word``."""
    if rho.dim != S.dim:
        raise DimensionError(f"state has dimension {rho.dim}, observables act on {S.dim}")
    if len(word) != S.n:
        raise DimensionError(f"outcome word has length {len(word)}, expected {S.n}")
    current = rho.rho
    probability = 1.0
    for j, z in enumerate(word):
        current, weight = _collapse(current, S.outcome_projectors[j, int(z)])
        probability *= weight
        if weight <= rho.tolerance:
            return QuantumState.trusted(current, rho.tolerance), 0.0
    return QuantumState.trusted(current, rho.tolerance), probability


def inject_symbol_errors(
    z: Sequence[int],
    model: NoiseModel,
    q: int,
    rng: np.random.Generator | None = None,
) -> tuple[Word, tuple[int, ...]]:
    """Corrupt ``z`` under ``model``; returns ``(y, sorted 1-based positions)``."""
    rng = rng if rng is not None else np.random.default_rng(model.seed)
    n = len(z)
    if any(s < 0 or s >= q for s in z):
        raise DomainError(f"word has a symbol outside [0, {q - 1}]")
    if model.kind == "adversarial":
        if model.positions is not None:
            positions = tuple(sorted(model.positions))
            for pos in positions:
                if not 1 <= pos <= n:
                    raise IndexRangeError(f"error position {pos} outside [1, {n}]")
        else:
            count = min(model.t, n)
            positions = tuple(sorted(int(p) + 1 for p in rng.choice(n, size=count, replace=False)))
    else:
        mask = rng.random(n) < model.flip_probability
        positions = tuple(int(p) + 1 for p in np.flatnonzero(mask))
    shifts = rng.integers(1, q, size=len(positions)) if positions else ()
    return apply_error_pattern(z, positions, shifts, q), positions


@dataclass(frozen=True)
class MeasurementTranscript:
    """Everything needed to audit one robust measurement."""

    trial: int
    true_index: int
    clean_word: Word
    corrupted_word: Word
    error_positions: tuple[int, ...]
    decoded_index: int
    decoder_distance: int
    beyond_radius: bool
    guaranteed: bool
    state_error: float
    step_probabilities: tuple[float, ...]
    state: QuantumState = field(repr=False, compare=False)

    @property
    def success(self) -> bool:
        return self.decoded_index == self.true_index

    def to_record(self) -> dict:
        return {
            "trial": self.trial,
            "true_index": self.true_index,
            "clean_word": "".join(map(str, self.clean_word)),
            "corrupted_word": "".join(map(str, self.corrupted_word)),
            "error_positions": ";".join(map(str, self.error_positions)),
            "decoded_index": self.decoded_index,
            "success": self.success,
            "guaranteed": self.guaranteed,
            "beyond_radius": self.beyond_radius,
            "state_error": self.state_error,
        }


def robust_measurement_trial(
    rho: QuantumState,
    S: ObservableSet,
    model: NoiseModel,
    seed: int,
    trial: int = 0,
) -> MeasurementTranscript:
    outcome = measure_observable_sequence(rho, S, trial_rng(seed, trial, MEASURE_STREAM))
    noise_rng = np.random.default_rng([seed, trial, NOISE_STREAM, model.seed])
    y, positions = inject_symbol_errors(outcome.word, model, S.q, noise_rng)
    decoded = decode_nearest(S.code, y)

    true_index = S.code.index_of(outcome.word)
    if true_index is None:
        # the commuting projectors only ever produce codewords
        logger.error("trial %d produced non-codeword %s", trial, outcome.word)
        true_index, state_error = 0, float("inf")
    else:
        expected = post_measurement_state(rho, S.povm[true_index])
        state_error = outcome.state.distance(expected)

    return MeasurementTranscript(
        trial=trial,
        true_index=true_index,
        clean_word=outcome.word,
        corrupted_word=y,
        error_positions=positions,
        decoded_index=decoded.index,
        decoder_distance=decoded.distance,
        beyond_radius=decoded.beyond_radius,
        guaranteed=len(positions) <= S.code.guaranteed_radius,
        state_error=state_error,
        step_probabilities=outcome.step_probabilities,
        state=outcome.state,
    )


class GuaranteeReport(BaseModel):
    cases: int
    failures: list[dict]
    max_state_error: float
    tolerance: float
    passed: bool


def verify_guarantee(
    rho: QuantumState, S: ObservableSet, radius: int | None = None, tolerance: float = 1e-8
) -> GuaranteeReport:
    """Exhaustive decode check over every codeword and every error pattern within ``radius``.

    For each codeword with nonzero probability the state is collapsed along the
    clean word, every correctable corruption is decoded, and both the decoded
    index and the post-measurement state are compared against ``P_k``.
    """
    radius = S.code.guaranteed_radius if radius is None else radius
    cases = 0
    failures = []
    worst = 0.0
    for k, word in enumerate(S.code.codewords, start=1):
        tau, probability = collapse_on_word(rho, S, word)
        if probability <= rho.tolerance:
            continue
        state_error = tau.distance(post_measurement_state(rho, S.povm[k]))
        worst = max(worst, state_error)
        for positions, shifts in enumerate_error_patterns(S.n, S.q, radius):
            cases += 1
            y = apply_error_pattern(word, positions, shifts, S.q)
            decoded = decode_nearest(S.code, y).index
            if decoded != k or state_error > tolerance:
                failures.append(
                    {"index": k, "positions": list(positions), "decoded": decoded, "state_error": state_error}
                )
    return GuaranteeReport(
        cases=cases, failures=failures, max_state_error=worst, tolerance=tolerance, passed=not failures
    )


class CampaignStats(BaseModel):
    trials: int
    seed: int
    noise: str
    successes: int
    success_rate: float
    standard_error: float
    outcome_frequencies: list[float]
    decoded_frequencies: list[float]
    flagged_uncorrectable: int
    guaranteed_trials: int
    guaranteed_failures: int
    max_state_error: float


def _frequencies(indices: Sequence[int], M: int) -> list[float]:
    counts = np.bincount(np.asarray(indices, dtype=np.int64), minlength=M + 1)[1 : M + 1]
    return (counts / max(len(indices), 1)).tolist()


def run_campaign(
    rho: QuantumState,
    S: ObservableSet,
    model: NoiseModel,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> tuple[CampaignStats, list[MeasurementTranscript]]:
    """Run ``trials`` independent robust measurements; transcripts come back in trial order."""
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")

    def one(i: int) -> MeasurementTranscript:
        return robust_measurement_trial(rho, S, model, seed, i)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            transcripts = list(pool.map(one, range(trials)))
    else:
        transcripts = [one(i) for i in range(trials)]

    successes = sum(t.success for t in transcripts)
    rate = successes / trials
    guaranteed = [t for t in transcripts if t.guaranteed]
    guaranteed_failures = sum(not t.success for t in guaranteed)
    if guaranteed_failures:
        logger.warning("%d trials failed inside the correction radius", guaranteed_failures)
    stats = CampaignStats(
        trials=trials,
        seed=seed,
        noise=model.describe(),
        successes=successes,
        success_rate=rate,
        standard_error=float(np.sqrt(rate * (1 - rate) / trials)),
        outcome_frequencies=_frequencies([t.true_index for t in transcripts], S.code.size),
        decoded_frequencies=_frequencies([t.decoded_index for t in transcripts], S.code.size),
        flagged_uncorrectable=sum(t.beyond_radius for t in transcripts),
        guaranteed_trials=len(guaranteed),
        guaranteed_failures=guaranteed_failures,
        max_state_error=max((t.state_error for t in guaranteed if t.success), default=0.0),
    )
    logger.info("campaign: %d/%d decoded correctly under %s", successes, trials, stats.noise)
    return stats, transcripts


def decoder_success_probability(
    code: ClassicalCode, p: float, prior: Sequence[float] | None = None
) -> float:
    """Exact success probability of nearest-codeword decoding under independent flips.

    Each symbol is replaced with probability ``p`` by one of the ``q - 1`` other
    symbols uniformly; computed by enumerating the whole word space.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"flip probability must lie in [0, 1], got {p}")
    space = code.q**code.n
    if space > get_settings().witness_vertex_limit:
        raise DomainError(f"word space of size {space} is too large to enumerate")
    prior = np.full(code.size, 1.0 / code.size) if prior is None else np.asarray(prior, dtype=float)
    if prior.shape != (code.size,) or abs(prior.sum() - 1.0) > 1e-9:
        raise DomainError("prior must be a probability vector over the codewords")

    words = np.array(list(itertools.product(range(code.q), repeat=code.n)), dtype=np.int64)
    distances = (words[:, None, :] != code.array[None, :, :]).sum(axis=2)  # (q^n, M)
    decoded = distances.argmin(axis=1)
    with np.errstate(divide="ignore"):
        likelihood = (p / (code.q - 1)) ** distances * (1 - p) ** (code.n - distances)
    hit = decoded[:, None] == np.arange(code.size)[None, :]
    return float((likelihood * hit).sum(axis=0) @ prior)


class CampaignConfig(BaseModel):
    """File-driven campaign description (JSON)."""

    code: str = "c6"
    povm: str | None = None
    povm_seed: int = 0
    dim: int | None = None
    state: Literal["maximally-mixed", "random"] = "maximally-mixed"
    state_seed: int = 0
    noise: NoiseModel = NoiseModel()
    trials: int = Field(default=1000, ge=1)
    seed: int = 0
    workers: int | None = None

    def build(self) -> tuple[QuantumState, ObservableSet]:
        code = resolve_code(self.code)
        if self.povm is not None:
            povm = load_povm(self.povm)
        else:
            povm = ProjectivePOVM.random(self.dim or code.size, code.size, self.povm_seed)
        S = build_observables(code, povm)
        if self.state == "random":
            rho = QuantumState.random(povm.dim, self.state_seed)
        else:
            rho = QuantumState.maximally_mixed(povm.dim)
        return rho, S

    def run(self) -> tuple[CampaignStats, list[MeasurementTranscript]]:
        rho, S = self.build()
        return run_campaign(rho, S, self.noise, self.trials, self.seed, self.workers)
