import os
import sys

import pytest
from pydantic import ValidationError

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from robust_meas.combinatorics import Convention
from robust_meas.exceptions import DomainError, NotApplicableError
from robust_meas.qec import (
    TABLE_TWO_PRINTED,
    QECParams,
    binomial_params,
    correctible_set_size,
    nine_qubit_params,
    plan_syndrome_extraction,
    povm_size_bound,
    syndrome_asymptotic_bounds,
    table_two,
)

SMALL_BUDGET = 20_000


class TestQECParams:
    """Test cases for QEC code parameters."""

    def test_missing_fields(self):
        """Test a qudit code without m is rejected."""
        with pytest.raises(ValidationError):
            QECParams(family="qudit-distance-code", p=2, k=1)

    def test_too_many_errors(self):
        """Test k > m is rejected."""
        with pytest.raises(ValidationError):
            QECParams(family="qudit-distance-code", p=2, m=3, k=4)

    def test_binomial_gap_and_spacing(self):
        """Test gap g0 + g1 + 1 and N = max(g0, g1, 2k)."""
        params = QECParams(family="binomial", g0=2, g1=1, k=3)
        assert params.gap == 4
        assert params.N == 6

    def test_gap_not_defined_for_qudit_codes(self):
        """Test binomial-only quantities on a qudit code."""
        with pytest.raises(NotApplicableError):
            _ = nine_qubit_params().gap


class TestCorrectibleSet:
    """Test cases for |K| and the syndrome POVM size."""

    def test_nine_qubit(self):
        """Test |K| = 1 + 9 * 3 = 28 and |Pi'| <= 29."""
        params = nine_qubit_params()
        assert correctible_set_size(params) == 28
        bound = povm_size_bound(params)
        assert bound.value == 29
        assert bound.outcomes(use_knill_laflamme=True) == 28

    def test_binomial_k1(self):
        """Test |K| = 4 for the k = 1 binomial code."""
        assert correctible_set_size(binomial_params(1)) == 4
        assert povm_size_bound(binomial_params(1)).value == 5

    @pytest.mark.parametrize("m", [3, 5, 9])
    def test_single_qubit_errors(self, m):
        """Test one Pauli error on m qubits gives 1 + 3m."""
        params = QECParams(family="qudit-distance-code", p=2, m=m, k=1)
        assert correctible_set_size(params) == 1 + 3 * m

    @pytest.mark.parametrize("k", range(1, 9))
    def test_binomial_povm_sizes(self, k):
        """Test |Pi'| = 3k + 2 agrees with the printed column."""
        assert povm_size_bound(binomial_params(k)).value == 3 * k + 2
        assert povm_size_bound(binomial_params(k)).value == TABLE_TWO_PRINTED[k][0]

    def test_binomial_k3_and_k8(self):
        """Test |Pi'| = 11 for k = 3 and 26 for k = 8."""
        assert povm_size_bound(binomial_params(3)).value == 11
        assert povm_size_bound(binomial_params(8)).value == 26

    def test_explicit_has_no_correctible_set(self):
        """Test an explicit outcome count has no |K|."""
        params = QECParams(family="explicit", povm_size=8)
        with pytest.raises(NotApplicableError):
            correctible_set_size(params)
        assert povm_size_bound(params).value == 8


class TestSyndromePlan:
    """Test cases for planning robust syndrome extraction."""

    def test_nine_qubit_plan(self):
        """Test 29 outcomes need 9 (strict) or 10 (even) observables against 15 by repetition."""
        plan = plan_syndrome_extraction(nine_qubit_params(), t=1, budget=SMALL_BUDGET)
        assert plan.outcomes == 29
        assert plan.entry("strict").n == "9"
        assert plan.entry(Convention.EVEN).n == "10"
        assert plan.baseline_single == 5
        assert plan.baseline == 15

    def test_binomial_k1_even(self):
        """Test five outcomes need seven observables with d = 4."""
        plan = plan_syndrome_extraction(binomial_params(1), t=1, convention="even", budget=SMALL_BUDGET)
        assert [e.convention for e in plan.entries] == [Convention.EVEN]
        entry = plan.entry("even")
        assert entry.provenance == "exact"
        assert entry.n_upper == 7
        assert entry.witness_available

    def test_explicit_outcomes(self):
        """Test an explicit |Pi'| = 8 needs six observables for one error."""
        plan = plan_syndrome_extraction(QECParams(family="explicit", povm_size=8), t=1, convention="strict")
        assert plan.correctible_set_size is None
        assert plan.entry("strict").n == "6"

    def test_missing_convention(self):
        """Test asking for a convention that was not planned."""
        plan = plan_syndrome_extraction(binomial_params(1), t=1, convention="strict")
        with pytest.raises(KeyError):
            plan.entry("even")

    def test_negative_radius(self):
        """Test t < 0 is rejected."""
        with pytest.raises(DomainError):
            plan_syndrome_extraction(binomial_params(1), t=-1)

    def test_observables_grow_with_radius(self):
        """Test the planned number of observables never drops as t grows."""
        entries = [
            plan_syndrome_extraction(binomial_params(1), t=t, convention="strict", budget=SMALL_BUDGET).entry("strict")
            for t in range(3)
        ]
        assert entries[0].n == "3"
        assert entries[1].n == "6"
        for smaller, larger in zip(entries, entries[1:]):
            assert smaller.n_lower <= larger.n_lower
            assert smaller.n_upper <= larger.n_upper


@pytest.mark.slow
class TestTableTwo:
    """Test cases for the binomial-code table at the default search budget."""

    @pytest.fixture(scope="class")
    def rows(self):
        return table_two()

    def test_povm_column(self, rows):
        """Test |Pi'| is 3k + 2 on every row."""
        for row in rows:
            assert row.povm_size == 3 * row.k + 2

    def test_even_rows_exact(self, rows):
        """Test the d = 4 column is exactly 7, 7, 8, 8, 9, 9, 10, 10."""
        cells = {r.k: r for r in rows if r.convention == Convention.EVEN}
        assert [cells[k].n_exact_or_bracket for k in range(1, 9)] == ["7", "7", "8", "8", "9", "9", "10", "10"]
        assert all(cells[k].annotation == "matches-printed" for k in range(1, 9))

    def test_strict_rows_exact(self, rows):
        """Test the d = 3 column is exactly 6, 6, 7, 7, 8, 8, 9, 9."""
        cells = {r.k: r for r in rows if r.convention == Convention.STRICT}
        assert [cells[k].n_exact_or_bracket for k in range(1, 9)] == ["6", "6", "7", "7", "8", "8", "9", "9"]

    def test_strict_never_exceeds_printed(self, rows):
        """Test the d = 3 column needs no more observables than printed."""
        for row in rows:
            if row.convention == Convention.STRICT:
                assert row.n_upper <= TABLE_TWO_PRINTED[row.k][1]


class TestSyndromeAsymptotics:
    """Test cases for leading-order observable counts."""

    def test_ordered_and_finite(self):
        """Test p=2, m=100, k=5, eps=0.01 gives finite ordered bounds."""
        result = syndrome_asymptotic_bounds(2, 100, 5, 0.01)
        assert 0 < result.lower < result.upper < float("inf")
        assert result.reconstructed
        assert "H_{p^2}" in result.printed_form

    def test_no_errors(self):
        """Test k = 0 needs no observables at leading order."""
        result = syndrome_asymptotic_bounds(2, 50, 0, 0.01)
        assert result.lower == 0.0
        assert result.upper == 0.0

    def test_too_many_errors(self):
        """Test 2k > m is outside the domain."""
        with pytest.raises(DomainError):
            syndrome_asymptotic_bounds(2, 10, 6, 0.01)

    def test_error_fraction_too_large(self):
        """Test 2 eps must stay below (q - 1) / q."""
        with pytest.raises(DomainError):
            syndrome_asymptotic_bounds(2, 100, 5, 0.3)
