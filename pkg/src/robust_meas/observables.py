"""Projective POVMs, density matrices and the commuting q-observables

    Q_j(C, P) = sum_k x^{(k)}_j P_k,   j = 1, ..., n.

Code symbols double as observable eigenvalues, so the outcome of measuring
``Q_j`` is directly the j-th symbol of a codeword.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from pydantic import BaseModel

from .codes import ClassicalCode, DecoderSpec
from .config import get_settings
from .exceptions import (
    CardinalityError,
    DimensionError,
    DomainError,
    IndexRangeError,
    ParseError,
    POVMValidationError,
)

logger = logging.getLogger(__name__)


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, ord=2)) if a.size else 0.0


@dataclass(frozen=True)
class QuantumState:
    """Density matrix on a ``dim``-dimensional space."""

    rho: np.ndarray
    tolerance: float = field(default_factory=lambda: get_settings().tolerance)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
        if _norm(rho - rho.conj().T) > 1e3 * self.tolerance:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e3 * self.tolerance:
            raise DomainError(f"density matrix has trace {np.trace(rho).real:.6g}, expected 1")
        if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -1e3 * self.tolerance:
            raise DomainError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def trusted(cls, rho: np.ndarray, tolerance: float) -> "QuantumState":
        """Wrap a matrix already known to be a state, skipping validation."""
        state = object.__new__(cls)
        object.__setattr__(state, "rho", rho)
        object.__setattr__(state, "tolerance", tolerance)
        return state

    def distance(self, other: "QuantumState | np.ndarray") -> float:
        """Spectral-norm distance to another state."""
        rho = other.rho if isinstance(other, QuantumState) else np.asarray(other)
        return _norm(self.rho - rho)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "QuantumState":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def from_vector(cls, psi: Sequence[complex]) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_projector(cls, projector: np.ndarray) -> "QuantumState":
        """Normalised projector ``P / rank(P)``, a state inside one subspace."""
        projector = np.asarray(projector, dtype=complex)
        return cls(projector / np.trace(projector).real)

    @classmethod
    def random(cls, dim: int, seed: int, rank: int | None = None) -> "QuantumState":
        rng = np.random.default_rng(seed)
        rank = rank or dim
        g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
        rho = g @ g.conj().T
        return cls(rho / np.trace(rho).real)


@dataclass(frozen=True)
class ProjectivePOVM:
    """Ordered projectors ``P_1, ..., P_M`` on a shared space.

    Construction only checks shapes; :func:`validate_povm` checks the
    projector algebra.
    """

    projectors: tuple[np.ndarray, ...]
    tolerance: float = field(default_factory=lambda: get_settings().tolerance)

    def __post_init__(self):
        mats = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if not mats:
            raise DimensionError("a POVM needs at least one projector")
        dim = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for k, p in enumerate(mats, start=1):
            if p.ndim != 2 or p.shape != (dim, dim):
                raise DimensionError(f"projector {k} has shape {p.shape}, expected ({dim}, {dim})")
            p.setflags(write=False)
        object.__setattr__(self, "projectors", mats)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.projectors)

    def stack(self) -> np.ndarray:
        return np.stack(self.projectors)

    def ranks(self) -> list[int]:
        return [int(round(np.trace(p).real)) for p in self.projectors]

    def __getitem__(self, k: int) -> np.ndarray:
        """1-based access to ``P_k``."""
        if not 1 <= k <= self.size:
            raise IndexRangeError(f"projector index {k} outside [1, {self.size}]")
        return self.projectors[k - 1]

    @classmethod
    def standard_basis(cls, dim: int) -> "ProjectivePOVM":
        eye = np.eye(dim, dtype=complex)
        return cls(tuple(np.outer(eye[i], eye[i]) for i in range(dim)))

    @classmethod
    def from_partition(cls, unitary: np.ndarray, ranks: Sequence[int]) -> "ProjectivePOVM":
        """Projectors onto consecutive column blocks of ``unitary``."""
        unitary = np.asarray(unitary, dtype=complex)
        if sum(ranks) != unitary.shape[1] or any(r < 1 for r in ranks):
            raise DimensionError(f"ranks {list(ranks)} do not partition {unitary.shape[1]} columns")
        projectors = []
        start = 0
        for r in ranks:
            block = unitary[:, start : start + r]
            projectors.append(block @ block.conj().T)
            start += r
        return cls(tuple(projectors))

    @classmethod
    def random(
        cls, dim: int, M: int, seed: int, ranks: Sequence[int] | None = None
    ) -> "ProjectivePOVM":
        """Seeded random POVM: a random rank partition conjugated by a Haar unitary."""
        if M > dim:
            raise DimensionError(f"cannot split dimension {dim} into {M} nonzero projectors")
        rng = np.random.default_rng(seed)
        if ranks is None:
            extra = rng.multinomial(dim - M, np.full(M, 1.0 / M))
            ranks = [1 + int(e) for e in extra]
        return cls.from_partition(random_unitary(dim, rng), ranks)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


class POVMReport(BaseModel):
    dim: int
    size: int
    hermiticity: float
    idempotence: float
    orthogonality: float
    completeness: float
    tolerance: float
    passed: bool


def validate_povm(povm: ProjectivePOVM, tolerance: float | None = None) -> POVMReport:
    tol = povm.tolerance if tolerance is None else tolerance
    mats = povm.projectors
    herm = max(_norm(p - p.conj().T) for p in mats)
    idem = max(_norm(p @ p - p) for p in mats)
    ortho = max(
        (_norm(mats[a] @ mats[b]) for a in range(len(mats)) for b in range(a + 1, len(mats))),
        default=0.0,
    )
    complete = _norm(sum(mats) - np.eye(povm.dim))
    passed = max(herm, idem, ortho, complete) <= tol
    if not passed:
        logger.info(
            "POVM failed validation: herm=%.3g idem=%.3g ortho=%.3g complete=%.3g", herm, idem, ortho, complete
        )
    return POVMReport(
        dim=povm.dim, size=povm.size, hermiticity=herm, idempotence=idem,
        orthogonality=ortho, completeness=complete, tolerance=tol, passed=passed,
    )


class ObservableReport(BaseModel):
    max_commutator: float
    max_spectrum_deviation: float
    uninformative: list[int]
    passed: bool


@dataclass(frozen=True)
class ObservableSet:
    """The ``n`` commuting q-observables built from ``code`` and ``povm``."""

    code: ClassicalCode
    povm: ProjectivePOVM
    observables: tuple[np.ndarray, ...]
    decoder: DecoderSpec
    report: ObservableReport
    outcome_projectors: np.ndarray = field(repr=False)  # shape (n, q, dim, dim)

    @property
    def n(self) -> int:
        return len(self.observables)

    @property
    def q(self) -> int:
        return self.code.q

    @property
    def dim(self) -> int:
        return self.povm.dim

    def f(self, y: Sequence[int]) -> int:
        """Classical post-processing map: outcome word to POVM index."""
        return self.decoder(y)

    def __getitem__(self, j: int) -> np.ndarray:
        """1-based access to ``Q_j``."""
        if not 1 <= j <= self.n:
            raise IndexRangeError(f"observable index {j} outside [1, {self.n}]")
        return self.observables[j - 1]


def build_observables(
    code: ClassicalCode, povm: ProjectivePOVM, tolerance: float | None = None
) -> ObservableSet:
    if code.size != povm.size:
        raise CardinalityError(f"{code} has {code.size} codewords but the POVM has {povm.size} projectors")
    tol = povm.tolerance if tolerance is None else tolerance
    check = validate_povm(povm, tol)
    if not check.passed:
        raise POVMValidationError(
            f"not a projective POVM within {tol:g}: idempotence {check.idempotence:.3g}, "
            f"orthogonality {check.orthogonality:.3g}, completeness {check.completeness:.3g}"
        )

    stack = povm.stack()
    coeffs = code.array.T.astype(float)  # (n, M)
    observables = np.tensordot(coeffs, stack, axes=(1, 0))  # (n, dim, dim)

    # P_{j,z} = sum over k with x^{(k)}_j = z of P_k
    indicators = (code.array.T[:, None, :] == np.arange(code.q)[None, :, None]).astype(float)
    outcome_projectors = np.tensordot(indicators, stack, axes=(2, 0))  # (n, q, dim, dim)
    outcome_projectors.setflags(write=False)

    commutator = max(
        (
            _norm(observables[a] @ observables[b] - observables[b] @ observables[a])
            for a in range(code.n)
            for b in range(a + 1, code.n)
        ),
        default=0.0,
    )
    spectrum = 0.0
    symbols = np.arange(code.q)
    for obs in observables:
        eig = np.linalg.eigvalsh(obs)
        spectrum = max(spectrum, float(np.abs(eig[:, None] - symbols[None, :]).min(axis=1).max()))
    uninformative = [j + 1 for j in range(code.n) if np.all(code.array[:, j] == code.array[0, j])]
    if uninformative:
        logger.info("observables %s are multiples of the identity", uninformative)
    bound = tol * max(1, povm.dim)
    report = ObservableReport(
        max_commutator=commutator,
        max_spectrum_deviation=spectrum,
        uninformative=uninformative,
        passed=commutator <= bound and spectrum <= bound,
    )
    for obs in observables:
        obs.setflags(write=False)
    return ObservableSet(
        code=code,
        povm=povm,
        observables=tuple(observables),
        decoder=DecoderSpec.guaranteed(code),
        report=report,
        outcome_projectors=outcome_projectors,
    )


def observable_support(S: ObservableSet, j: int) -> list[int]:
    """1-based POVM indices ``k`` with a nonzero coefficient in ``Q_j``."""
    return [k + 1 for k in np.flatnonzero(S.code.column(j))]


def outcome_projector(S: ObservableSet, j: int, z: int) -> np.ndarray:
    if not 1 <= j <= S.n:
        raise IndexRangeError(f"observable index {j} outside [1, {S.n}]")
    if not 0 <= z < S.q:
        raise IndexRangeError(f"outcome symbol {z} outside [0, {S.q - 1}]")
    return S.outcome_projectors[j - 1, z]


def support_indices(S: ObservableSet, outcomes: Mapping[int, int]) -> list[int]:
    """Codeword indices compatible with partial outcomes ``{j: z_j}``."""
    for j, z in outcomes.items():
        outcome_projector(S, j, z)
    return [
        k
        for k, word in enumerate(S.code.codewords, start=1)
        if all(word[j - 1] == z for j, z in outcomes.items())
    ]


def project_outcomes(S: ObservableSet, outcomes: Mapping[int, int]) -> np.ndarray:
    """Ordered product of outcome projectors for ``{j: z_j}``."""
    product = np.eye(S.dim, dtype=complex)
    for j, z in outcomes.items():
        product = product @ outcome_projector(S, j, z)
    return product


class ConsistencyReport(BaseModel):
    deviations: list[float]
    max_deviation: float
    tolerance: float
    passed: bool


def check_consistency(S: ObservableSet, tolerance: float | None = None) -> ConsistencyReport:
    """Check ``prod_j P_{j, x^{(k)}_j} = P_k`` for every codeword ``k``."""
    tol = S.povm.tolerance if tolerance is None else tolerance
    deviations = []
    for k, word in enumerate(S.code.codewords, start=1):
        product = project_outcomes(S, {j: z for j, z in enumerate(word, start=1)})
        deviations.append(_norm(product - S.povm[k]))
    worst = max(deviations)
    return ConsistencyReport(deviations=deviations, max_deviation=worst, tolerance=tol, passed=worst <= tol)


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _matrix_from_json(rows: list, dim: int, label: str) -> np.ndarray:
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError):
        raise ParseError(f"{label}: entries must be [re, im] pairs") from None
    if m.shape != (dim, dim):
        raise ParseError(f"{label}: shape {m.shape}, expected ({dim}, {dim})")
    return m


def povm_to_json(povm: ProjectivePOVM) -> dict:
    return {"dim": povm.dim, "projectors": [_matrix_to_json(p) for p in povm.projectors]}


def observables_to_json(S: ObservableSet) -> dict:
    return {"dim": S.dim, "observables": [_matrix_to_json(o) for o in S.observables]}


def observables_from_json(data: dict) -> tuple[np.ndarray, ...]:
    """Observable matrices written by :func:`observables_to_json`."""
    try:
        dim = int(data["dim"])
        raw = data["observables"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("observable JSON needs integer 'dim' and list 'observables'") from None
    return tuple(_matrix_from_json(o, dim, f"observable {j}") for j, o in enumerate(raw, start=1))


def povm_from_json(data: dict) -> ProjectivePOVM:
    try:
        dim = int(data["dim"])
        raw = data["projectors"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("POVM JSON needs integer 'dim' and list 'projectors'") from None
    povm = ProjectivePOVM(tuple(_matrix_from_json(p, dim, f"projector {k}") for k, p in enumerate(raw, start=1)))
    check = validate_povm(povm)
    if not check.passed:
        raise POVMValidationError(f"loaded projectors are not a projective POVM: {check.model_dump()}")
    return povm


def load_povm(path: str | Path) -> ProjectivePOVM:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ParseError(f"cannot read POVM file {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from e
    return povm_from_json(data)
