"""Coherent-state readout of a q-observable by dispersive coupling and homodyne detection.

Coupling ``Q_j`` to a mode in the coherent state ``|alpha>`` for time
``theta = 2 pi / (q gamma)`` rotates the amplitude to
``exp(-2 pi i z / q) alpha`` when ``Q_j`` has eigenvalue ``z``. Only that
action on eigenstates is modelled; no Fock space is simulated.

Quadratures follow ``x = (a + a^dagger) / sqrt(2)``, so a coherent state
``|beta>`` gives ``x`` and ``p`` with means ``sqrt(2) Re beta`` and
``sqrt(2) Im beta`` and standard deviation ``1 / sqrt(2)``. Both quadratures
are sampled independently.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel
from scipy.stats import norm

from .codes import ClassicalCode
from .exceptions import DomainError, IndeterminateClassificationError, IndexRangeError
from .simulation import NoiseModel, decoder_success_probability

logger = logging.getLogger(__name__)

QUADRATURE_STD = 1 / np.sqrt(2)
ADVISORY_FACTOR = 10


@dataclass(frozen=True)
class ReadoutConfig:
    q: int
    alpha: complex
    gamma: float = 1.0

    def __post_init__(self):
        if self.q < 2:
            raise DomainError(f"outcome count must be at least 2, got {self.q}")
        if self.gamma <= 0:
            raise DomainError(f"coupling rate must be positive, got {self.gamma}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.low_photon_advisory:
            logger.info(
                "2*pi*|alpha|^2 = %.3g is not well above q = %d; outcomes may be hard to distinguish",
                2 * np.pi * abs(self.alpha) ** 2,
                self.q,
            )

    @property
    def theta(self) -> float:
        return 2 * np.pi / (self.q * self.gamma)

    @property
    def photon_number(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def low_photon_advisory(self) -> bool:
        return 2 * np.pi * self.photon_number <= ADVISORY_FACTOR * self.q


def _check_symbol(cfg: ReadoutConfig, z: int) -> int:
    if not 0 <= z < cfg.q:
        raise IndexRangeError(f"symbol {z} outside [0, {cfg.q - 1}]")
    return int(z)


def rotated_amplitude(cfg: ReadoutConfig, z: int) -> complex:
    z = _check_symbol(cfg, z)
    return complex(np.exp(-1j * cfg.theta * cfg.gamma * z) * cfg.alpha)


def rotated_means(cfg: ReadoutConfig) -> np.ndarray:
    """Quadrature means for every symbol, shape ``(q, 2)``."""
    amps = np.exp(-1j * cfg.theta * cfg.gamma * np.arange(cfg.q)) * cfg.alpha
    return np.sqrt(2) * np.column_stack([amps.real, amps.imag])


def sample_quadratures(
    cfg: ReadoutConfig, z: int, seed: int | np.random.Generator, size: int | None = None
) -> np.ndarray:
    """One ``(x, p)`` sample, or ``size`` of them stacked as rows."""
    beta = rotated_amplitude(cfg, z)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mean = np.sqrt(2) * np.array([beta.real, beta.imag])
    shape = (2,) if size is None else (size, 2)
    return mean + rng.normal(scale=QUADRATURE_STD, size=shape)


def classify(cfg: ReadoutConfig, samples: np.ndarray) -> np.ndarray:
    """Nearest rotated mean for each row of ``samples``; ties go to the smaller symbol."""
    if cfg.alpha == 0:
        raise IndeterminateClassificationError("vacuum readout carries no phase information")
    samples = np.atleast_2d(samples)
    d2 = ((samples[:, None, :] - rotated_means(cfg)[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def classify_outcome(cfg: ReadoutConfig, sample: Sequence[float]) -> int:
    return int(classify(cfg, np.asarray(sample, dtype=float))[0])


def symbol_separation(cfg: ReadoutConfig) -> float:
    """Half the distance between neighbouring means, in units of the quadrature std."""
    return 2 * abs(cfg.alpha) * np.sin(np.pi / cfg.q)


class MisclassificationEstimate(BaseModel):
    q: int
    alpha_abs: float
    photon_number: float
    trials: int
    seed: int
    per_symbol: list[float]
    average: float
    standard_error: float
    analytic: float | None
    lower_bound: float
    upper_bound: float
    low_photon_advisory: bool


def misclassification_bounds(cfg: ReadoutConfig) -> tuple[float, float]:
    """Exact for q = 2, otherwise the single-neighbour and pairwise union bounds."""
    tail = float(norm.cdf(-symbol_separation(cfg)))
    if cfg.q == 2:
        return tail, tail
    return tail, min(1.0, 2 * tail)


def estimate_misclassification(cfg: ReadoutConfig, trials: int, seed: int) -> MisclassificationEstimate:
    """Monte-Carlo ``Pr[classified != z]`` for every symbol ``z``."""
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    per_symbol = []
    for z in range(cfg.q):
        samples = sample_quadratures(cfg, z, np.random.default_rng([seed, z]), size=trials)
        per_symbol.append(float(np.mean(classify(cfg, samples) != z)))
    average = float(np.mean(per_symbol))
    lower, upper = misclassification_bounds(cfg)
    return MisclassificationEstimate(
        q=cfg.q,
        alpha_abs=abs(cfg.alpha),
        photon_number=cfg.photon_number,
        trials=trials,
        seed=seed,
        per_symbol=per_symbol,
        average=average,
        standard_error=float(np.sqrt(average * (1 - average) / (trials * cfg.q))),
        analytic=lower if cfg.q == 2 else None,
        lower_bound=lower,
        upper_bound=upper,
        low_photon_advisory=cfg.low_photon_advisory,
    )


def misclassification_curve(
    q: int, photon_numbers: Sequence[float], trials: int, seed: int, gamma: float = 1.0
) -> list[MisclassificationEstimate]:
    """Error rate against ``|alpha|^2`` for a real amplitude."""
    return [
        estimate_misclassification(ReadoutConfig(q=q, alpha=np.sqrt(n), gamma=gamma), trials, seed)
        for n in photon_numbers
    ]


def readout_noise_model(estimate: MisclassificationEstimate, seed: int = 0) -> NoiseModel:
    """Independent symbol-flip model with the estimated average error rate."""
    return NoiseModel.independent(min(estimate.average, 1.0), seed=seed)


def decoded_success_for_readout(
    code: ClassicalCode, cfg: ReadoutConfig, trials: int, seed: int
) -> tuple[float, float]:
    """Per-symbol readout error and the resulting exact decode success for ``code``."""
    if cfg.q != code.q:
        raise DomainError(f"readout discriminates {cfg.q} symbols but the code is {code.q}-ary")
    estimate = estimate_misclassification(cfg, trials, seed)
    return estimate.average, decoder_success_probability(code, estimate.average)
