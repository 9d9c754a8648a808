# src/robust_meas/server.py
from typing import Any

from mcp.server.fastmcp import FastMCP

from . import tools
from .config import configure_logging

# Create FastMCP server instance
mcp = FastMCP("robust-meas-mcp")


@mcp.tool()
async def get_code_report(code: str = "c6") -> str:
    """Reports q, n, M, minimum distance d(C), correction radius t(C) and an exhaustive decoder check.

    Parameters:
    code: (string). Default "c6". A builtin code name ("c6"), "repetition:q:t", or a path to a code file
        ("q n M" header followed by M lines of n symbols).
    """
    return await tools.get_code_report_definition(code)


@mcp.tool()
async def plan_syndrome(
    family: str = "binomial",
    k: Any = None,
    p: Any = None,
    m: Any = None,
    g0: Any = None,
    g1: Any = None,
    povm_size: Any = None,
    t: int = 1,
    q: int = 2,
    convention: str = "both",
    budget: Any = None,
) -> str:
    """Plans robust syndrome extraction: correctible-set size, POVM-size bound and number of observables.

    Parameters:
        - family: (string) "qudit-distance-code", "binomial" or "explicit".
        - k: (int) Errors corrected (qudit codes) or dephasing order (binomial codes).
        - p, m: (int) Qudit dimension and number of qudits, for "qudit-distance-code".
        - g0, g1: (int) Loss and gain orders for "binomial". Default to k.
        - povm_size: (int) Number of syndrome outcomes, for "explicit".
        - t: (int) Default 1. Outcome errors to correct.
        - q: (int) Default 2. Number of outcomes per observable.
        - convention: (string) "strict" (d = 2t+1), "even" (d = 2t+2) or "both". Default "both".
        - budget: (int) Optional node budget for the exact search.
    """
    return await tools.plan_syndrome_definition(family, k, p, m, g0, g1, povm_size, t, q, convention, budget)


@mcp.tool()
async def simulate_campaign(
    code: str = "c6",
    noise: str = "adversarial",
    t: int = 1,
    positions: Any = None,
    flip_probability: float = 0.0,
    trials: int = 1000,
    seed: int = 0,
    povm_seed: int = 0,
    dim: Any = None,
    state: str = "maximally-mixed",
) -> str:
    """Simulates sequential measurement of the code observables, outcome errors and decoding.

    Parameters:
        - code: (string) Code source, as for get_code_report. Default "c6".
        - noise: (string) "adversarial" (at most t corrupted symbols) or "independent" (per-symbol flips).
        - t: (int) Default 1. Corrupted symbols per trial for adversarial noise.
        - positions: (string) Optional comma-separated 1-based positions to corrupt, e.g. "5".
        - flip_probability: (float) Per-symbol flip probability for independent noise.
        - trials: (int) Default 1000. Number of trials.
        - seed: (int) Default 0. Master seed.
        - povm_seed: (int) Default 0. Seed of the random projective POVM.
        - dim: (int) Optional Hilbert space dimension; defaults to the number of codewords.
        - state: (string) "maximally-mixed" (default) or "random".
    """
    return await tools.simulate_campaign_definition(
        code, noise, t, positions, flip_probability, trials, seed, povm_seed, dim, state
    )


@mcp.tool()
async def get_table(which: str = "II", convention: str = "both", budget: Any = None) -> str:
    """Reproduces the minimum-observable tables as CSV with exact values or proven brackets.

    Parameters:
    which: (string) "I" for n_{2,t,M}, "II" for binomial codes. Default "II".
    convention: (string) "strict", "even" or "both". Default "both".
    budget: (int) Optional node budget for the exact search.
    """
    return await tools.get_table_definition(which, convention, budget)


@mcp.tool()
async def get_readout_curve(q: int = 2, photon_numbers: Any = "0.25,1,4", trials: int = 10000, seed: int = 0) -> str:
    """Estimates coherent-state readout misclassification against the mean photon number |alpha|^2, as CSV.

    Parameters:
    q: (int) Default 2. Number of outcomes to discriminate.
    photon_numbers: (string) Comma-separated |alpha|^2 values. Default "0.25,1,4".
    trials: (int) Default 10000. Samples per symbol.
    seed: (int) Default 0.
    """
    return await tools.get_readout_curve_definition(q, photon_numbers, trials, seed)


@mcp.tool()
async def get_asymptotic_bounds(
    epsilon_frac: float = 0.01, q: int = 2, M: Any = None, p: Any = None, m: Any = None, k: Any = None
) -> str:
    """Leading-order bounds on the number of observables when a fraction epsilon_frac of outcomes may be wrong.

    Parameters:
        - epsilon_frac: (float) Default 0.01. Fraction of corrupted outcomes.
        - q: (int) Default 2. Outcomes per observable.
        - M: (int) Number of POVM outcomes. Or give p, m and k for a p-ary code on m qudits correcting k errors.
    """
    return await tools.get_asymptotic_bounds_definition(epsilon_frac, q, M, p, m, k)


def main():
    """Main entry point for the server"""
    configure_logging()
    # Use stdio transport for standard MCP clients
    mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
