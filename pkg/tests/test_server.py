import pytest
import sys
import os
from unittest.mock import patch
import json

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from robust_meas.server import (
    get_asymptotic_bounds,
    get_code_report,
    get_readout_curve,
    get_table,
    plan_syndrome,
    simulate_campaign,
)


class TestCodeReportTool:
    """Test cases for the code report tool."""

    @pytest.mark.asyncio
    async def test_get_code_report_default(self):
        """Test code report with default parameters."""
        with patch('robust_meas.tools.get_code_report_definition') as mock_def:
            mock_def.return_value = "Mock code report"
            result = await get_code_report()
            assert result == "Mock code report"
            mock_def.assert_called_once_with("c6")

    @pytest.mark.asyncio
    async def test_get_code_report_c6(self):
        """Test the real report for the builtin code."""
        result = await get_code_report("c6")
        doc = json.loads(result)
        assert doc["kind"] == "code-report"
        assert (doc["n"], doc["M"], doc["d"], doc["t"]) == (6, 8, 3, 1)

    @pytest.mark.asyncio
    async def test_get_code_report_bad_source(self):
        """Test a malformed repetition source returns an error string."""
        result = await get_code_report("repetition:3")
        assert result.startswith("Error:")


class TestPlanSyndromeTool:
    """Test cases for the syndrome planning tool."""

    @pytest.mark.asyncio
    async def test_plan_syndrome_default(self):
        """Test plan with default parameters."""
        with patch('robust_meas.tools.plan_syndrome_definition') as mock_def:
            mock_def.return_value = "Mock plan"
            result = await plan_syndrome()
            assert result == "Mock plan"
            mock_def.assert_called_once_with(
                "binomial", None, None, None, None, None, None, 1, 2, "both", None
            )

    @pytest.mark.asyncio
    async def test_plan_syndrome_nine_qubit(self):
        """Test plan arguments for the nine-qubit code are passed through."""
        with patch('robust_meas.tools.plan_syndrome_definition') as mock_def:
            mock_def.return_value = "Mock nine-qubit plan"
            result = await plan_syndrome(family="qudit-distance-code", p=2, m=9, k=1, budget=20000)
            assert result == "Mock nine-qubit plan"
            mock_def.assert_called_once_with(
                "qudit-distance-code", 1, 2, 9, None, None, None, 1, 2, "both", 20000
            )

    @pytest.mark.asyncio
    async def test_plan_syndrome_explicit(self):
        """Test a real plan for eight explicit outcomes."""
        result = await plan_syndrome(family="explicit", povm_size=8, convention="strict")
        doc = json.loads(result)
        assert doc["outcomes"] == 8
        assert doc["entries"][0]["n"] == "6"

    @pytest.mark.asyncio
    async def test_plan_syndrome_invalid_family(self):
        """Test an unknown code family."""
        result = await plan_syndrome(family="surface")
        assert result.startswith("Error: Invalid family 'surface'")

    @pytest.mark.asyncio
    async def test_plan_syndrome_missing_fields(self):
        """Test a qudit code without m reports a validation error."""
        result = await plan_syndrome(family="qudit-distance-code", p=2, k=1)
        assert result.startswith("Error:")

    @pytest.mark.asyncio
    async def test_plan_syndrome_non_numeric_t(self):
        """Test a non-numeric t comes back as an error string."""
        result = await plan_syndrome(t="one")
        assert result == "Error: t must be an integer, got 'one'"


class TestSimulateCampaignTool:
    """Test cases for the campaign simulation tool."""

    @pytest.mark.asyncio
    async def test_simulate_campaign_default(self):
        """Test simulation with default parameters."""
        with patch('robust_meas.tools.simulate_campaign_definition') as mock_def:
            mock_def.return_value = "Mock campaign"
            result = await simulate_campaign()
            assert result == "Mock campaign"
            mock_def.assert_called_once_with(
                "c6", "adversarial", 1, None, 0.0, 1000, 0, 0, None, "maximally-mixed"
            )

    @pytest.mark.asyncio
    async def test_simulate_campaign_single_error(self):
        """Test a real campaign with one corrupted outcome per trial."""
        result = await simulate_campaign(positions="5", trials=50, seed=3)
        doc = json.loads(result)
        assert doc["kind"] == "campaign"
        assert doc["success_rate"] == 1.0
        assert doc["noise"] == "adversarial(positions=[5])"

    @pytest.mark.asyncio
    async def test_simulate_campaign_too_many_trials(self):
        """Test the per-call trial limit."""
        result = await simulate_campaign(trials=10**7)
        assert result.startswith("Error: trials must be at most")

    @pytest.mark.asyncio
    async def test_simulate_campaign_invalid_noise(self):
        """Test an unknown noise model."""
        result = await simulate_campaign(noise="burst")
        assert result.startswith("Error: Invalid noise 'burst'")

    @pytest.mark.asyncio
    async def test_simulate_campaign_non_numeric_trials(self):
        """Test a non-numeric trial count comes back as an error string."""
        result = await simulate_campaign(trials="many")
        assert result == "Error: trials must be an integer, got 'many'"


class TestTableTool:
    """Test cases for the table tool."""

    @pytest.mark.asyncio
    async def test_get_table_default(self):
        """Test table with default parameters."""
        with patch('robust_meas.tools.get_table_definition') as mock_def:
            mock_def.return_value = "Mock table"
            result = await get_table()
            assert result == "Mock table"
            mock_def.assert_called_once_with("II", "both", None)

    @pytest.mark.asyncio
    async def test_get_table_two_even(self):
        """Test the real binomial table CSV."""
        result = await get_table("II", "even", 20000)
        lines = result.strip().split("\n")
        assert lines[0].startswith("table,q,t,M,k,povm_size")
        assert len(lines) == 1 + 8

    @pytest.mark.asyncio
    async def test_get_table_invalid(self):
        """Test an unknown table name."""
        result = await get_table("III")
        assert result.startswith("Error: Invalid table 'III'")


class TestReadoutCurveTool:
    """Test cases for the readout curve tool."""

    @pytest.mark.asyncio
    async def test_get_readout_curve_default(self):
        """Test readout curve with default parameters."""
        with patch('robust_meas.tools.get_readout_curve_definition') as mock_def:
            mock_def.return_value = "Mock curve"
            result = await get_readout_curve()
            assert result == "Mock curve"
            mock_def.assert_called_once_with(2, "0.25,1,4", 10000, 0)

    @pytest.mark.asyncio
    async def test_get_readout_curve_real(self):
        """Test one CSV row per photon number."""
        result = await get_readout_curve(q=4, photon_numbers="1,9", trials=1000)
        lines = result.strip().split("\n")
        assert len(lines) == 3
        assert "per_symbol" not in lines[0]

    @pytest.mark.asyncio
    async def test_get_readout_curve_invalid_q(self):
        """Test q below two."""
        result = await get_readout_curve(q=1)
        assert result == "Error: q must be at least 2"

    @pytest.mark.asyncio
    async def test_get_readout_curve_non_numeric_q(self):
        """Test a non-numeric q comes back as an error string."""
        result = await get_readout_curve(q="two")
        assert result.startswith("Error: q must be an integer")


class TestAsymptoticBoundsTool:
    """Test cases for the asymptotic bounds tool."""

    @pytest.mark.asyncio
    async def test_get_asymptotic_bounds_outcomes(self):
        """Test bounds for a given number of outcomes."""
        result = await get_asymptotic_bounds(epsilon_frac=0.05, M=1024)
        doc = json.loads(result)
        assert doc["kind"] == "asymptotic-bounds"
        assert 10 < doc["lower"] < doc["upper"]

    @pytest.mark.asyncio
    async def test_get_asymptotic_bounds_code(self):
        """Test bounds for a qubit code on 100 qubits correcting 5."""
        result = await get_asymptotic_bounds(epsilon_frac=0.01, p=2, m=100, k=5)
        doc = json.loads(result)
        assert doc["lower"] < doc["upper"]
        assert doc["reconstructed"] is True

    @pytest.mark.asyncio
    async def test_get_asymptotic_bounds_missing(self):
        """Test neither M nor a code is given."""
        result = await get_asymptotic_bounds()
        assert result == "Error: give either M or all of p, m and k"

    @pytest.mark.asyncio
    async def test_get_asymptotic_bounds_domain(self):
        """Test an error fraction beyond the domain."""
        result = await get_asymptotic_bounds(epsilon_frac=0.4, M=16)
        assert result.startswith("Error:")


class TestIntegrationScenarios:
    """Integration test scenarios for common use cases."""

    @pytest.mark.asyncio
    async def test_report_then_simulate_workflow(self):
        """Test workflow: inspect a code then simulate up to its radius."""
        report = json.loads(await get_code_report("repetition:2:2"))
        result = await simulate_campaign(code="repetition:2:2", t=report["t"], trials=40)
        doc = json.loads(result)
        assert report["t"] == 2
        assert doc["guaranteed_trials"] == 40
        assert doc["guaranteed_failures"] == 0


if __name__ == "__main__":
    pytest.main([__file__])
