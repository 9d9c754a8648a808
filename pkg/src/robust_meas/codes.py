"""q-ary block codes, encoders and nearest-codeword decoding.

Codeword indices are 1-based at every public boundary (``k = 1, ..., M``);
internally codeword ``k`` is row ``k - 1`` of :attr:`ClassicalCode.array`.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import galois
import numpy as np

from .exceptions import (
    CodeInvariantError,
    DimensionError,
    DomainError,
    IndexRangeError,
    ParseError,
    RankError,
    UndefinedDistanceError,
    UnsupportedFieldError,
)

logger = logging.getLogger(__name__)

Word = tuple[int, ...]

TIE_BREAK_SMALLEST_INDEX = "smallest-index"

C6_GENERATORS = ("100011", "010101", "001110")


@dataclass(frozen=True)
class ClassicalCode:
    """An ordered list of ``M`` distinct words of length ``n`` over ``{0, ..., q-1}``."""

    q: int
    n: int
    codewords: tuple[Word, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.q < 2:
            raise CodeInvariantError(f"alphabet size must be at least 2, got {self.q}")
        if self.n < 1:
            raise CodeInvariantError(f"block length must be at least 1, got {self.n}")
        words = tuple(tuple(int(s) for s in w) for w in self.codewords)
        if not words:
            raise CodeInvariantError("a code needs at least one codeword")
        seen: dict[Word, int] = {}
        for k, w in enumerate(words, start=1):
            if len(w) != self.n:
                raise CodeInvariantError(f"codeword {k} has length {len(w)}, expected {self.n}")
            if any(s < 0 or s >= self.q for s in w):
                raise CodeInvariantError(f"codeword {k} has a symbol outside [0, {self.q - 1}]")
            if w in seen:
                raise CodeInvariantError(f"codeword {k} duplicates codeword {seen[w]}")
            seen[w] = k
        object.__setattr__(self, "codewords", words)

    @property
    def size(self) -> int:
        return len(self.codewords)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.codewords, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def distance(self) -> int:
        if self.size < 2:
            raise UndefinedDistanceError("minimum distance is undefined for a single-codeword code")
        arr = self.array
        pairwise = (arr[:, None, :] != arr[None, :, :]).sum(axis=2)
        np.fill_diagonal(pairwise, self.n + 1)
        return int(pairwise.min())

    @property
    def radius(self) -> int:
        return (self.distance - 1) // 2

    @property
    def guaranteed_radius(self) -> int:
        """t(C), or ``n`` for a single-codeword code (every word decodes to it)."""
        return self.n if self.size == 1 else self.radius

    def index_of(self, word: Sequence[int]) -> int | None:
        """1-based index of ``word`` if it is a codeword."""
        try:
            return self.codewords.index(tuple(int(s) for s in word)) + 1
        except ValueError:
            return None

    def column(self, j: int) -> np.ndarray:
        """Symbols ``x^{(k)}_j`` for all ``k``; ``j`` is 1-based."""
        if not 1 <= j <= self.n:
            raise IndexRangeError(f"column {j} outside [1, {self.n}]")
        return self.array[:, j - 1]

    def __str__(self) -> str:
        label = self.name or "code"
        return f"{label}(q={self.q}, n={self.n}, M={self.size})"


@dataclass(frozen=True)
class DecodeResult:
    index: int
    distance: int
    beyond_radius: bool
    tie_break: str = TIE_BREAK_SMALLEST_INDEX


@dataclass(frozen=True)
class DecoderSpec:
    """A nearest-codeword decoder promised to be an ``a``-decoder of ``code``."""

    code: ClassicalCode
    radius: int
    tie_break: str = TIE_BREAK_SMALLEST_INDEX

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("decoder radius must be non-negative")
        if self.radius > self.code.guaranteed_radius:
            raise DomainError(
                f"radius {self.radius} exceeds the guaranteed correction radius "
                f"{self.code.guaranteed_radius} of {self.code}"
            )

    @classmethod
    def guaranteed(cls, code: ClassicalCode) -> "DecoderSpec":
        return cls(code=code, radius=code.guaranteed_radius)

    def __call__(self, y: Sequence[int]) -> int:
        return decode_nearest(self.code, y).index


def _as_word(y: Sequence[int] | str) -> Word:
    if isinstance(y, str):
        return tuple(int(c) for c in y)
    return tuple(int(s) for s in y)


def hamming_distance(y: Sequence[int] | str, z: Sequence[int] | str) -> int:
    y, z = _as_word(y), _as_word(z)
    if len(y) != len(z):
        raise DimensionError(f"words of length {len(y)} and {len(z)} cannot be compared")
    return sum(a != b for a, b in zip(y, z))


def min_distance(code: ClassicalCode) -> int:
    return code.distance


def error_radius(code: ClassicalCode) -> int:
    return code.radius


def encode(code: ClassicalCode, k: int) -> Word:
    if not 1 <= k <= code.size:
        raise IndexRangeError(f"codeword index {k} outside [1, {code.size}]")
    return code.codewords[k - 1]


def decode_nearest(code: ClassicalCode, y: Sequence[int] | str) -> DecodeResult:
    """Nearest codeword, ties to the smallest index; flags words beyond t(C)."""
    word = _as_word(y)
    if len(word) != code.n:
        raise DomainError(f"received word has length {len(word)}, expected {code.n}")
    if any(s < 0 or s >= code.q for s in word):
        raise DomainError(f"received word has a symbol outside [0, {code.q - 1}]")
    distances = (code.array != np.asarray(word, dtype=np.int64)).sum(axis=1)
    best = int(np.argmin(distances))
    dist = int(distances[best])
    return DecodeResult(
        index=best + 1,
        distance=dist,
        beyond_radius=dist > code.guaranteed_radius,
    )


def apply_error_pattern(z: Sequence[int], positions: Sequence[int], shifts: Sequence[int], q: int) -> Word:
    """Add nonzero ``shifts`` (mod ``q``) at 1-based ``positions``."""
    y = list(z)
    for pos, shift in zip(positions, shifts):
        if not 1 <= pos <= len(y):
            raise IndexRangeError(f"error position {pos} outside [1, {len(y)}]")
        if shift % q == 0:
            raise DomainError("an error shift must change the symbol")
        y[pos - 1] = (y[pos - 1] + int(shift)) % q
    return tuple(y)


def enumerate_error_patterns(n: int, q: int, radius: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All ``(positions, shifts)`` with at most ``radius`` corrupted symbols, including none."""
    for weight in range(min(radius, n) + 1):
        for positions in itertools.combinations(range(1, n + 1), weight):
            for shifts in itertools.product(range(1, q), repeat=weight):
                yield positions, shifts


def code_report(code: ClassicalCode) -> dict:
    """Parameters of ``code`` and an exhaustive check of its decoder within t(C)."""
    radius = code.guaranteed_radius
    cases = failures = 0
    for k, word in enumerate(code.codewords, start=1):
        for positions, shifts in enumerate_error_patterns(code.n, code.q, radius):
            cases += 1
            if decode_nearest(code, apply_error_pattern(word, positions, shifts, code.q)).index != k:
                failures += 1
    return {
        "name": code.name or None,
        "q": code.q,
        "n": code.n,
        "M": code.size,
        "d": code.distance if code.size > 1 else None,
        "t": radius,
        "decoder_cases": cases,
        "decoder_failures": failures,
    }


def build_repetition(q: int, t: int) -> ClassicalCode:
    if q < 2:
        raise DomainError(f"alphabet size must be at least 2, got {q}")
    if t < 0:
        raise DomainError(f"radius must be non-negative, got {t}")
    n = 2 * t + 1
    return ClassicalCode(q=q, n=n, codewords=tuple((s,) * n for s in range(q)), name=f"rep{q}_{n}")


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    """Row rank over GF(p)."""
    field = galois.GF(p)
    return int(np.linalg.matrix_rank(field(np.asarray(rows, dtype=np.int64) % p)))


def build_linear(q: int, generators: Sequence[Sequence[int] | str], name: str = "") -> ClassicalCode:
    """All Z_q-combinations of ``generators``.

    Codewords are listed by number of generators used, then by which
    generators (lexicographically), then by coefficient values, so that the
    generators themselves are codewords 2, 3, ... in the order given.
    """
    if q < 2 or not galois.is_prime(q):
        raise UnsupportedFieldError(f"linear codes are supported over prime alphabets only, got q={q}")
    gens = [_as_word(g) for g in generators]
    if not gens:
        raise RankError("at least one generator is required")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise DimensionError("generators must share one length")
    if any(s < 0 or s >= q for g in gens for s in g):
        raise DomainError(f"generator symbols must lie in [0, {q - 1}]")
    rows = np.array(gens, dtype=np.int64)
    if rank_mod_p(rows, q) < len(gens):
        raise RankError(f"{len(gens)} generators are linearly dependent over Z_{q}")

    field = galois.GF(q)
    basis = field(rows)
    words = []
    for r in range(len(gens) + 1):
        for support in itertools.combinations(range(len(gens)), r):
            for values in itertools.product(range(1, q), repeat=r):
                coeffs = field.Zeros(len(gens))
                if support:
                    coeffs[list(support)] = values
                words.append(tuple(int(s) for s in coeffs @ basis))
    return ClassicalCode(q=q, n=n, codewords=tuple(words), name=name)


def build_c6() -> ClassicalCode:
    """The [6, 3, 3] shortened Hamming code with eight codewords."""
    return build_linear(2, C6_GENERATORS, name="c6")


BUILTIN_CODES = {"c6": build_c6}


def parse_code_text(text: str) -> ClassicalCode:
    """Parse ``q n M`` followed by ``M`` lines of ``n`` space-separated symbols."""
    lines = [(i, line.strip()) for i, line in enumerate(text.splitlines(), start=1)]
    lines = [(i, line) for i, line in lines if line and not line.startswith("#")]
    if not lines:
        raise ParseError("empty code file", line=1)
    header_line, header = lines[0]
    try:
        q, n, m = (int(tok) for tok in header.split())
    except ValueError:
        raise ParseError("header must be three integers 'q n M'", line=header_line) from None
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"expected {m} codeword lines, found {len(body)}", line=header_line)
    words: list[Word] = []
    seen: dict[Word, int] = {}
    for line_no, line in body:
        try:
            word = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise ParseError("codeword symbols must be integers", line=line_no) from None
        if len(word) != n:
            raise ParseError(f"codeword has {len(word)} symbols, expected {n}", line=line_no)
        if any(s < 0 or s >= q for s in word):
            raise ParseError(f"symbol outside [0, {q - 1}]", line=line_no)
        if word in seen:
            raise ParseError(f"duplicate codeword (first seen on line {seen[word]})", line=line_no)
        seen[word] = line_no
        words.append(word)
    try:
        return ClassicalCode(q=q, n=n, codewords=tuple(words))
    except CodeInvariantError as e:
        raise ParseError(str(e), line=header_line) from e


def load_code(path: str | Path) -> ClassicalCode:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read code file {path}: {e.strerror}") from e
    code = parse_code_text(text)
    logger.debug("loaded %s from %s", code, path)
    return code


def resolve_code(source: str) -> ClassicalCode:
    """Code from a builtin name, ``repetition:q:t`` or a code file path."""
    if source in BUILTIN_CODES:
        return BUILTIN_CODES[source]()
    if source.startswith("repetition:"):
        try:
            _, q, t = source.split(":")
            q, t = int(q), int(t)
        except ValueError:
            raise ParseError(f"repetition source must look like 'repetition:q:t', got {source!r}") from None
        return build_repetition(q, t)
    return load_code(source)


def format_code_text(code: ClassicalCode) -> str:
    lines = [f"{code.q} {code.n} {code.size}"]
    lines.extend(" ".join(str(s) for s in w) for w in code.codewords)
    return "\n".join(lines) + "\n"
