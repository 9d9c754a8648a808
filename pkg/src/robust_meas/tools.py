# src/robust_meas/tools.py
import asyncio
import logging
from typing import Any

from pydantic import ValidationError

from .codes import code_report, resolve_code
from .combinatorics import asymptotic_length_bounds, parse_conventions, table_one
from .exceptions import RobustMeasError
from .io import document, dumps_json, records_to_csv
from .qec import QECParams, plan_syndrome_extraction, syndrome_asymptotic_bounds, table_two
from .readout import misclassification_curve
from .simulation import CampaignConfig, NoiseModel

logger = logging.getLogger(__name__)

VALID_FAMILIES = ["qudit-distance-code", "binomial", "explicit"]
VALID_TABLES = ["I", "II"]

# Simulations run in a worker thread; keep interactive calls bounded.
MAX_TOOL_TRIALS = 200_000


def _parse_int_list(value: Any) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if v.strip()]


def _int_arg(value: Any, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


def _parse_float_list(value: Any) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


async def _run(fn, *args, **kwargs) -> str:
    try:
        return await asyncio.to_thread(fn, *args, **kwargs)
    except (RobustMeasError, ValidationError) as e:
        return f"Error: {e}"
    except Exception as e:
        logger.exception("tool call failed")
        return f"Error: {str(e)}"


async def get_code_report_definition(code: str = "c6") -> str:
    """Parameters and decoder check for a builtin code, ``repetition:q:t`` or a code file."""
    if not code:
        return "Error: code must name a builtin code, 'repetition:q:t' or a file"

    def work():
        return dumps_json(document("code-report", code_report(resolve_code(code))))

    return await _run(work)


async def plan_syndrome_definition(
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
    """Plan the number of observables for robust syndrome extraction."""
    if family not in VALID_FAMILIES:
        return f"Error: Invalid family '{family}'. Valid options: {', '.join(VALID_FAMILIES)}"
    try:
        t, q = _int_arg(t, "t"), _int_arg(q, "q")
    except ValueError as e:
        return f"Error: {e}"
    if t < 0:
        return "Error: t must be a non-negative integer"

    # Binomial codes default to g0 = g1 = k
    if family == "binomial" and k is not None:
        g0 = k if g0 is None else g0
        g1 = k if g1 is None else g1

    def work():
        params = QECParams(family=family, p=p, m=m, k=k, g0=g0, g1=g1, povm_size=povm_size)
        plan = plan_syndrome_extraction(
            params, t, q, convention, int(budget) if budget is not None else None
        )
        return dumps_json(document("syndrome-plan", plan))

    return await _run(work)


async def simulate_campaign_definition(
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
    """Run a robust measurement campaign on a random projective POVM."""
    try:
        trials = _int_arg(trials, "trials")
    except ValueError as e:
        return f"Error: {e}"
    if trials < 1:
        return "Error: trials must be a positive integer"
    if trials > MAX_TOOL_TRIALS:
        return f"Error: trials must be at most {MAX_TOOL_TRIALS}"
    if noise not in ("adversarial", "independent"):
        return f"Error: Invalid noise '{noise}'. Valid options: adversarial, independent"

    def work():
        if noise == "independent":
            model = NoiseModel.independent(float(flip_probability), seed=int(seed))
        else:
            pos = _parse_int_list(positions) if positions else None
            model = NoiseModel.adversarial(int(t), pos, seed=int(seed))
        config = CampaignConfig(
            code=code, povm_seed=povm_seed, dim=dim, state=state, noise=model, trials=trials, seed=seed
        )
        stats, _ = config.run()
        return dumps_json(document("campaign", stats))

    return await _run(work)


async def get_table_definition(which: str = "II", convention: str = "both", budget: Any = None) -> str:
    """Reproduce the minimum-observable tables as CSV."""
    which = str(which).upper()
    if which not in VALID_TABLES:
        return f"Error: Invalid table '{which}'. Valid options: {', '.join(VALID_TABLES)}"

    def work():
        conventions = parse_conventions(convention)
        budget_value = int(budget) if budget is not None else None
        rows = table_one(conventions, budget=budget_value) if which == "I" else table_two(conventions, budget=budget_value)
        return records_to_csv(row.as_record() for row in rows)

    return await _run(work)


async def get_readout_curve_definition(
    q: int = 2, photon_numbers: Any = "0.25,1,4", trials: int = 10000, seed: int = 0
) -> str:
    """Misclassification rate of coherent-state readout against |alpha|^2, as CSV."""
    try:
        q, trials = _int_arg(q, "q"), _int_arg(trials, "trials")
    except ValueError as e:
        return f"Error: {e}"
    if q < 2:
        return "Error: q must be at least 2"
    if trials < 1 or trials > MAX_TOOL_TRIALS:
        return f"Error: trials must be between 1 and {MAX_TOOL_TRIALS}"

    def work():
        curve = misclassification_curve(q, _parse_float_list(photon_numbers), trials, int(seed))
        return records_to_csv(
            {k: v for k, v in est.model_dump().items() if k != "per_symbol"} for est in curve
        )

    return await _run(work)


async def get_asymptotic_bounds_definition(
    epsilon_frac: float = 0.01,
    q: int = 2,
    M: Any = None,
    p: Any = None,
    m: Any = None,
    k: Any = None,
) -> str:
    """Leading-order observable counts for ``M`` outcomes, or for a p-ary code on m qudits."""
    if M is None and None in (p, m, k):
        return "Error: give either M or all of p, m and k"

    def work():
        if M is not None:
            lower, upper = asymptotic_length_bounds(int(q), int(M), float(epsilon_frac))
            payload = {"q": int(q), "M": int(M), "epsilon_frac": float(epsilon_frac), "lower": lower, "upper": upper}
        else:
            payload = syndrome_asymptotic_bounds(int(p), int(m), int(k), float(epsilon_frac), int(q))
        return dumps_json(document("asymptotic-bounds", payload))

    return await _run(work)
