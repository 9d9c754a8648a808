"""Code-size combinatorics: ball volumes, sphere-packing bounds, entropy,
exact A_q(n, d) by branch-and-bound and the minimum length n_q(M, d).

The minimum number of q-observables correcting t outcome errors on an
M-outcome projective measurement is ``n_q(M, 2t + 1)``; the published tables
appear to follow ``n_q(M, 2t + 2)`` at several entries, so both distance
conventions are exposed via :class:`Convention`.
"""

import logging
import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Literal, NamedTuple, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .codes import ClassicalCode
from .config import get_settings
from .exceptions import DomainError

logger = logging.getLogger(__name__)

Word = tuple[int, ...]


class Convention(str, Enum):
    STRICT = "strict"  # d = 2t + 1
    EVEN = "even"  # d = 2t + 2

    def distance(self, t: int) -> int:
        if t < 0:
            raise DomainError(f"correction radius must be non-negative, got {t}")
        return 2 * t + 1 if self is Convention.STRICT else 2 * t + 2


def parse_conventions(value: str) -> tuple[Convention, ...]:
    if value == "both":
        return (Convention.STRICT, Convention.EVEN)
    try:
        return (Convention(value),)
    except ValueError:
        raise DomainError(f"unknown convention {value!r}; use strict, even or both") from None


def _check_alphabet(q: int, n: int | None = None) -> None:
    if q < 2:
        raise DomainError(f"alphabet size must be at least 2, got {q}")
    if n is not None and n < 1:
        raise DomainError(f"length must be at least 1, got {n}")


def ball_volume(q: int, n: int, t: int) -> int:
    """Number of words within Hamming distance ``t`` of a fixed word."""
    _check_alphabet(q, n)
    if t < 0 or t > n:
        raise DomainError(f"radius {t} outside [0, {n}]")
    return sum(math.comb(n, j) * (q - 1) ** j for j in range(t + 1))


def _ball(q: int, n: int, r: int) -> int:
    return ball_volume(q, n, max(0, min(r, n)))


class SpherePackingBounds(NamedTuple):
    lower: float  # Gilbert-Varshamov
    upper: float  # Hamming


def sphere_packing_bounds(q: int, n: int, t: int) -> SpherePackingBounds:
    """``(q^n / V(2t), q^n / V(t))``, bracketing ``A_q(n, 2t + 1)``."""
    _check_alphabet(q, n)
    if t < 0 or 2 * t > n:
        raise DomainError(f"need 0 <= 2t <= n, got t={t}, n={n}")
    space = q**n
    return SpherePackingBounds(
        lower=float(Fraction(space, ball_volume(q, n, 2 * t))),
        upper=float(Fraction(space, ball_volume(q, n, t))),
    )


def hamming_upper_bound(q: int, n: int, d: int) -> int:
    return q**n // _ball(q, n, (d - 1) // 2)


def singleton_upper_bound(q: int, n: int, d: int) -> int:
    return q ** (n - d + 1) if d <= n else 1


def gv_lower_bound(q: int, n: int, d: int) -> int:
    return -(-(q**n) // _ball(q, n, d - 1))


def upper_bound(q: int, n: int, d: int) -> int:
    """Best available proven upper bound on ``A_q(n, d)``."""
    if d <= 1:
        return q**n
    if d > n:
        return 1
    bound = min(hamming_upper_bound(q, n, d), singleton_upper_bound(q, n, d))
    if q == 2 and d % 2 == 0:
        # A_2(n, 2s) = A_2(n - 1, 2s - 1): puncture one coordinate / add parity.
        bound = min(bound, upper_bound(2, n - 1, d - 1))
    return bound


def q_ary_entropy(q: int, x: float) -> float:
    _check_alphabet(q)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"entropy argument {x} outside [0, 1]")
    value = x * math.log(q - 1, q) if q > 2 else 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            value -= p * math.log(p, q)
    return value


def entropy_volume_gap(q: int, x: float, n: int) -> float:
    """``|(1/n) log_q V_{q,n}(floor(x n)) - H_q(x)|``."""
    volume = ball_volume(q, n, math.floor(x * n))
    return abs(math.log(volume, q) / n - q_ary_entropy(q, x))


def asymptotic_length_bounds(q: int, M: int, epsilon_frac: float) -> tuple[float, float]:
    """Asymptotic estimate of ``n_{q, eps n, M}`` with the o(1) terms dropped.

    Not a certified bound at finite length.
    """
    _check_alphabet(q)
    if M < 2:
        raise DomainError(f"need at least two outcomes, got M={M}")
    if epsilon_frac < 0 or 2 * epsilon_frac >= (q - 1) / q:
        raise DomainError(f"need 0 <= epsilon_frac and 2*epsilon_frac < {(q - 1) / q:.4f}")
    log_m = math.log(M, q)
    return (
        log_m / (1.0 - q_ary_entropy(q, epsilon_frac)),
        log_m / (1.0 - q_ary_entropy(q, 2 * epsilon_frac)),
    )


class SearchCertificate(BaseModel):
    """Result of a code search: an exact value or a proven bracket.

    ``quantity`` is ``"A"`` for ``A_q(n, d)`` and ``"n"`` for ``n_q(M, d)``.
    ``witness`` is a code of distance at least ``d``: for ``"A"`` it has
    ``lower`` words, for ``"n"`` it has ``M`` words and length ``upper``.
    """

    model_config = ConfigDict(frozen=True)

    quantity: Literal["A", "n"]
    q: int
    d: int
    n: int | None = None
    M: int | None = None
    kind: Literal["exact", "bracket"]
    lower: int
    upper: int
    witness: tuple[tuple[int, ...], ...] | None = None
    gv_bound: int | None = None
    nodes: int = 0
    budget: int = 0

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    @property
    def value(self) -> int | None:
        return self.lower if self.exact else None

    @property
    def display(self) -> str:
        return str(self.lower) if self.exact else f"[{self.lower},{self.upper}]"

    def witness_code(self) -> ClassicalCode | None:
        if not self.witness:
            return None
        return ClassicalCode(q=self.q, n=len(self.witness[0]), codewords=self.witness)


def _word_digits(q: int, n: int) -> np.ndarray:
    """All ``q**n`` words, row ``i`` being ``i`` written in base ``q`` (lexicographic)."""
    idx = np.arange(q**n, dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers) % q).astype(np.int8)


@lru_cache(maxsize=512)
def _lexicode(q: int, n: int, d: int, target: int | None) -> tuple[Word, ...]:
    digits = _word_digits(q, n)
    alive = np.ones(len(digits), dtype=bool)
    chosen: list[int] = []
    idx: int | None = 0
    while idx is not None:
        chosen.append(idx)
        if target is not None and len(chosen) >= target:
            break
        alive &= (digits != digits[idx]).sum(axis=1) >= d
        rest = np.flatnonzero(alive[idx + 1 :])
        idx = idx + 1 + int(rest[0]) if rest.size else None
    return tuple(tuple(int(s) for s in digits[i]) for i in chosen)


def _repetition_witness(q: int, M: int, d: int) -> tuple[Word, ...]:
    """First ``M`` words of length ``k`` with every symbol repeated ``d`` times."""
    k = log_ceil(q, M)
    words = []
    for i in range(M):
        info = [(i // q**e) % q for e in range(k - 1, -1, -1)]
        words.append(tuple(s for s in info for _ in range(d)))
    return tuple(words)


def log_ceil(q: int, M: int) -> int:
    """Smallest ``k`` with ``q**k >= M``."""
    k = 0
    while q**k < M:
        k += 1
    return k


def witness_code(q: int, n: int, d: int, target: int | None = None) -> tuple[Word, ...] | None:
    """Greedy lexicographic code of distance ``d``, stopped after ``target`` words.

    Binary even-distance codes are built one symbol shorter and extended by a
    parity symbol. ``None`` when the word space exceeds the witness limit.
    """
    if d > n:
        return ((0,) * n,)
    if q == 2 and d % 2 == 0 and n >= 2:
        inner = witness_code(2, n - 1, d - 1, target)
        if inner is None:
            return None
        return tuple(w + (sum(w) % 2,) for w in inner)
    if q**n > get_settings().witness_vertex_limit:
        return None
    return _lexicode(q, n, d, target)


class _BudgetExhausted(Exception):
    pass


class _TargetReached(Exception):
    pass


def _conflict_cliques(digits: np.ndarray, cand: np.ndarray, w: int) -> np.ndarray:
    """Sets of candidates pairwise closer than ``w``, one boolean row per set.

    Balls of radius ``(w - 1) // 2`` around every word of the space, or lines
    (words differing in one coordinate only) when that radius is zero.
    """
    sub = digits[cand]
    radius = (w - 1) // 2
    if radius > 0:
        return (digits[:, None, :] != sub[None, :, :]).sum(axis=2) <= radius
    rows = []
    for j in range(sub.shape[1]):
        _, inverse = np.unique(np.delete(sub, j, axis=1), axis=0, return_inverse=True)
        inverse = inverse.ravel()
        rows.extend(inverse == g for g in range(int(inverse.max()) + 1))
    return np.array(rows)


def _cover_classes(pool: np.ndarray, cliques: np.ndarray, sizes: np.ndarray) -> list[np.ndarray]:
    """Greedy cover of ``pool`` by conflict cliques, largest first.

    A code meets every class at most once, so the class count bounds it.
    """
    uncovered = pool.copy()
    classes = []
    while uncovered.any():
        best = int(np.argmax(sizes @ uncovered.astype(np.int32)))
        members = np.flatnonzero(cliques[best] & uncovered)
        classes.append(members)
        uncovered[members] = False
    return classes


def _orbit_labels(words: np.ndarray, cells: list[tuple[int, ...]], q: int) -> np.ndarray:
    """Orbit index of each word under permutations of coordinates within cells."""
    counts = np.stack(
        [(words[:, list(cell)] == s).sum(axis=1) for cell in cells for s in range(1, q)], axis=1
    )
    _, labels = np.unique(counts, axis=0, return_inverse=True)
    return labels.ravel()


def _refine(cells: list[tuple[int, ...]], word: np.ndarray) -> list[tuple[int, ...]]:
    refined = []
    for cell in cells:
        for s in sorted({int(word[c]) for c in cell}, reverse=True):
            refined.append(tuple(c for c in cell if word[c] == s))
    return refined


class _CliqueSearch:
    """Branch-and-bound maximum clique over words pairwise at distance >= d.

    A code of minimum distance ``w`` can be moved so that it holds the zero
    word and ``1^w 0^(n-w)``; the search runs once per ``w`` that the upper
    bounds leave open, with every pairwise distance raised to ``w``. While the
    chosen words leave coordinates interchangeable the node branches over
    orbits of that permutation group. Bounds come from covering the pool with
    conflict cliques.

    With a ``target`` the search stops at the first code of that size and
    only has to rule out codes of that size otherwise.
    """

    def __init__(self, q: int, n: int, d: int, incumbent: int, budget: int, target: int | None = None):
        self.q, self.n, self.d = q, n, d
        self.digits = _word_digits(q, n)
        self.powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self.best = incumbent if target is None else max(incumbent, target - 1)
        self.best_words: list[int] | None = None
        self.target = target
        self.budget = budget
        self.nodes = 0

    def run(self) -> bool:
        """Search every open minimum distance; False when the budget ran out."""
        weights = (self.digits != 0).sum(axis=1)
        try:
            for w in range(self.d, self.n + 1):
                if upper_bound(self.q, self.n, w) <= self.best:
                    continue
                self._search_distance(w, weights)
        except _BudgetExhausted:
            logger.info(
                "search A_%d(%d,%d) stopped after %d nodes; best %d", self.q, self.n, self.d, self.nodes, self.best
            )
            return False
        except _TargetReached:
            pass
        return True

    def words(self) -> tuple[Word, ...] | None:
        if self.best_words is None:
            return None
        return tuple(tuple(int(s) for s in self.digits[i]) for i in self.best_words)

    def _search_distance(self, w: int, weights: np.ndarray) -> None:
        anchor = np.zeros(self.n, dtype=np.int64)
        anchor[:w] = 1
        self.fixed = [0, int(anchor @ self.powers)]
        self.cand = np.flatnonzero((weights >= w) & ((self.digits != anchor).sum(axis=1) >= w))
        if len(self.cand) == 0:
            self._record([])
            return
        self.sub = self.digits[self.cand]
        self.adj = (self.sub[:, None, :] != self.sub[None, :, :]).sum(axis=2) >= w
        self.cliques = _conflict_cliques(self.digits, self.cand, w)
        self.sizes = self.cliques.astype(np.int32)
        cells = [cell for cell in (tuple(range(w)), tuple(range(w, self.n))) if cell]
        self._expand([], np.ones(len(self.cand), dtype=bool), cells)

    def _record(self, clique: list[int]) -> None:
        if 2 + len(clique) <= self.best:
            return
        self.best = 2 + len(clique)
        self.best_words = self.fixed + [int(self.cand[u]) for u in clique]
        if self.target is not None and self.best >= self.target:
            raise _TargetReached

    def _expand(self, clique: list[int], pool: np.ndarray, cells: list[tuple[int, ...]]) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted
        if not pool.any():
            self._record(clique)
            return
        classes = _cover_classes(pool, self.cliques, self.sizes)
        if 2 + len(clique) + len(classes) <= self.best:
            return
        if any(len(cell) > 1 for cell in cells):
            self._branch_orbits(clique, pool, cells, classes)
        else:
            self._branch_vertices(clique, pool, cells, classes)

    def _branch_vertices(self, clique, pool, cells, classes) -> None:
        base = 2 + len(clique)
        pool = pool.copy()
        for colour in range(len(classes), 0, -1):
            for v in classes[colour - 1]:
                if base + colour <= self.best:
                    return
                clique.append(int(v))
                self._expand(clique, pool & self.adj[v], cells)
                clique.pop()
                pool[v] = False

    def _branch_orbits(self, clique, pool, cells, classes) -> None:
        # A larger code must use a vertex from a class above best - base; one
        # representative per orbit meeting those classes is enough.
        base = 2 + len(clique)
        colour = np.zeros(len(pool), dtype=np.int64)
        for i, members in enumerate(classes, start=1):
            colour[members] = i
        members = np.flatnonzero(pool)
        labels = _orbit_labels(self.sub[members], cells, self.q)
        top = np.zeros(int(labels.max()) + 1, dtype=np.int64)
        np.maximum.at(top, labels, colour[members])
        pool = pool.copy()
        for label in np.argsort(-top, kind="stable"):
            if base + top[label] <= self.best:
                return
            if base + sum(1 for m in classes if pool[m].any()) <= self.best:
                return
            orbit = members[labels == label]
            rep = int(orbit[np.argmax(colour[orbit])])
            clique.append(rep)
            self._expand(clique, pool & self.adj[rep], _refine(cells, self.sub[rep]))
            clique.pop()
            pool[orbit] = False


def _clique_search(q: int, n: int, d: int, incumbent: int, budget: int, target: int | None = None):
    """Returns ``(size, words or None, nodes, complete)``."""
    search = _CliqueSearch(q, n, d, incumbent, budget, target)
    complete = search.run()
    return search.best, search.words(), search.nodes, complete


def max_code_size_exact(q: int, n: int, d: int, budget: int | None = None) -> SearchCertificate:
    """``A_q(n, d)`` by exhaustive search, or a bracket when out of reach."""
    _check_alphabet(q, n)
    if d < 1:
        raise DomainError(f"distance must be at least 1, got {d}")
    settings = get_settings()
    return _max_code_size(q, n, d, budget or settings.search_budget, settings.exact_vertex_limit)


@lru_cache(maxsize=256)
def _max_code_size(q: int, n: int, d: int, budget: int, exact_limit: int) -> SearchCertificate:
    common = dict(quantity="A", q=q, n=n, d=d, budget=budget)
    if d > n:
        return SearchCertificate(kind="exact", lower=1, upper=1, witness=((0,) * n,), gv_bound=1, **common)
    if d == 1:
        words = witness_code(q, n, 1)
        kind = "exact" if words is not None else "bracket"
        return SearchCertificate(kind=kind, lower=q**n, upper=q**n, witness=words, gv_bound=q**n, **common)
    if q == 2 and d % 2 == 0:
        inner = _max_code_size(2, n - 1, d - 1, budget, exact_limit)
        witness = None
        if inner.witness is not None:
            witness = tuple(w + (sum(w) % 2,) for w in inner.witness)
        return inner.model_copy(update={"n": n, "d": d, "witness": witness, "gv_bound": gv_lower_bound(q, n, d)})

    upper = upper_bound(q, n, d)
    gv = gv_lower_bound(q, n, d)
    witness = witness_code(q, n, d)
    lower = len(witness) if witness is not None else 1
    if witness is None:
        witness = ((0,) * n,)
    if lower >= upper:
        return SearchCertificate(kind="exact", lower=lower, upper=lower, witness=witness, gv_bound=gv, **common)
    if q**n > exact_limit:
        logger.info("A_%d(%d,%d): word space %d beyond exact limit %d", q, n, d, q**n, exact_limit)
        return SearchCertificate(kind="bracket", lower=lower, upper=upper, witness=witness, gv_bound=gv, **common)

    best, words, nodes, complete = _clique_search(q, n, d, lower, budget)
    if words is not None and best > lower:
        lower, witness = best, words
    if complete:
        return SearchCertificate(
            kind="exact", lower=lower, upper=lower, witness=witness, gv_bound=gv, nodes=nodes, **common
        )
    return SearchCertificate(
        kind="bracket", lower=lower, upper=upper, witness=witness, gv_bound=gv, nodes=nodes, **common
    )


@lru_cache(maxsize=256)
def _code_of_size(q: int, n: int, d: int, M: int, budget: int, exact_limit: int):
    """Decide ``A_q(n, d) >= M``: ``(words or None, decided, nodes)``."""
    if d > n:
        return None, True, 0
    if q == 2 and d % 2 == 0:
        inner, decided, nodes = _code_of_size(2, n - 1, d - 1, M, budget, exact_limit)
        if inner is not None:
            inner = tuple(w + (sum(w) % 2,) for w in inner)
        return inner, decided, nodes
    if upper_bound(q, n, d) < M:
        return None, True, 0
    found = witness_code(q, n, d, target=M)
    if found is not None and len(found) >= M:
        return found[:M], True, 0
    if q**n > exact_limit:
        return None, False, 0
    _, words, nodes, complete = _clique_search(q, n, d, len(found) if found else 1, budget, target=M)
    if words is not None and len(words) >= M:
        return words[:M], True, nodes
    return None, complete, nodes


def min_length(q: int, M: int, d: int, budget: int | None = None) -> SearchCertificate:
    """``n_q(M, d)``: the shortest length admitting ``M`` words at distance ``d``.

    Lengths whose upper bound on ``A_q(n, d)`` is below ``M`` are skipped; each
    remaining length is tried with a greedy witness first and exhaustive
    search for an ``M``-word code second. A length left undecided keeps the
    result a bracket.
    """
    _check_alphabet(q)
    if M < 2:
        raise DomainError(f"need at least two codewords, got M={M}")
    if d < 1:
        raise DomainError(f"distance must be at least 1, got {d}")
    settings = get_settings()
    budget = budget or settings.search_budget
    fallback_length = log_ceil(q, M) * d

    n = 1
    while upper_bound(q, n, d) < M:
        n += 1
    lower = n
    nodes = 0
    witness: tuple[Word, ...] | None = None
    while n < fallback_length:
        found, decided, spent = _code_of_size(q, n, d, M, budget, settings.exact_vertex_limit)
        nodes += spent
        if found is not None:
            witness = found
            break
        if decided and lower == n:
            lower = n + 1
        n += 1
    if witness is None:
        n = fallback_length
        witness = _repetition_witness(q, M, d)

    kind = "exact" if lower >= n else "bracket"
    if kind == "bracket":
        logger.info("n_%d(%d,%d) bracketed in [%d,%d]", q, M, d, lower, n)
    return SearchCertificate(
        quantity="n", q=q, d=d, M=M, n=n, kind=kind, lower=min(lower, n), upper=n,
        witness=witness, nodes=nodes, budget=budget,
    )


def min_observables(
    q: int, t: int, M: int, convention: Convention | str = Convention.STRICT, budget: int | None = None
) -> SearchCertificate:
    """Observables needed to correct ``t`` outcome errors on ``M`` outcomes."""
    return min_length(q, M, Convention(convention).distance(t), budget)


# n_{2,t,M} as printed; the 38-40 column is listed under both 38 and 40.
TABLE_ONE_PRINTED = {
    1: {2: 3, 4: 6, 6: 7, 8: 7, 12: 8, 16: 8, 20: 9, 38: 10, 40: 10},
    2: {2: 5, 4: 9, 6: 10, 8: 11, 12: 11, 16: 12, 20: 12, 38: 14, 40: 14},
    3: {2: 7, 4: 12, 6: 14, 8: 14, 12: 15, 16: 15, 20: 16, 38: 18, 40: 18},
}

TABLE_COLUMNS = (
    "table", "q", "t", "M", "k", "povm_size", "convention", "distance",
    "n_exact_or_bracket", "n_lower", "n_upper", "provenance",
    "witness_available", "printed_value", "annotation", "nodes",
)


class TableRow(BaseModel):
    table: str
    q: int
    t: int
    M: int
    k: int | None = None
    povm_size: int | None = None
    convention: Convention
    distance: int
    n_exact_or_bracket: str
    n_lower: int
    n_upper: int
    provenance: Literal["exact", "bracket"]
    witness_available: bool
    printed_value: int | None = None
    annotation: str
    nodes: int = 0

    def as_record(self) -> dict:
        record = self.model_dump(mode="json")
        return {col: record.get(col) for col in TABLE_COLUMNS}


def annotate(cert: SearchCertificate, printed: int | None) -> str:
    if printed is None:
        return "no-printed-value"
    if cert.exact:
        return "matches-printed" if cert.lower == printed else "differs-from-printed"
    return "bracket-contains-printed" if cert.lower <= printed <= cert.upper else "bracket-excludes-printed"


def table_row(
    table: str, q: int, t: int, M: int, convention: Convention, budget: int | None,
    printed: int | None = None, **extra,
) -> TableRow:
    cert = min_observables(q, t, M, convention, budget)
    note = annotate(cert, printed)
    if note in ("differs-from-printed", "bracket-excludes-printed"):
        logger.warning("table %s t=%d M=%d %s: n=%s, printed %s", table, t, M, convention.value, cert.display, printed)
    return TableRow(
        table=table, q=q, t=t, M=M, convention=convention, distance=cert.d,
        n_exact_or_bracket=cert.display, n_lower=cert.lower, n_upper=cert.upper,
        provenance=cert.kind, witness_available=cert.witness is not None,
        printed_value=printed, annotation=note, nodes=cert.nodes, **extra,
    )


def table_one(
    conventions: Sequence[Convention] = (Convention.STRICT, Convention.EVEN),
    radii: Sequence[int] = (1, 2, 3),
    sizes: Sequence[int] = (2, 4, 6, 8, 12, 16, 20, 38, 40),
    budget: int | None = None,
) -> list[TableRow]:
    """Minimum binary observable counts ``n_{2,t,M}`` next to the printed values."""
    rows = []
    for t in radii:
        for M in sizes:
            for convention in conventions:
                rows.append(table_row("I", 2, t, M, convention, budget, TABLE_ONE_PRINTED.get(t, {}).get(M)))
    return rows
