"""
Command-line interface for robust_meas.

Usage:
    robust-meas codes --builtin c6                      # parameters of the [6,3,3] code
    robust-meas codes --repetition q=3 t=1              # a ternary repetition code
    robust-meas plan --family binomial --k 3 --t 1      # observables for syndrome extraction
    robust-meas simulate --noise adversarial --t 1      # robust measurement campaign
    robust-meas tables --which II                       # reproduce a table as CSV
    robust-meas readout --q 2 --photon-numbers 0.25,1,4 # readout error curve as CSV
"""

import functools
import json
import sys

import click
from pydantic import ValidationError

from .codes import BUILTIN_CODES, build_repetition, code_report, load_code
from .combinatorics import parse_conventions, table_one
from .config import configure_logging
from .exceptions import ParseError, RobustMeasError
from .io import document, dumps_json, records_to_csv, write_text
from .observables import observables_to_json
from .qec import QECParams, plan_syndrome_extraction, table_two
from .readout import misclassification_curve
from .simulation import CampaignConfig, NoiseModel, run_campaign

__all__ = [
    "cli",
]

GUARANTEE_FAILURE_EXIT = 3


def reports_errors(fn):
    """Turn library errors into ``Error: ...`` with exit status 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (RobustMeasError, ValidationError) as e:
            raise click.ClickException(str(e)) from e

    return wrapper


def emit(text: str, output: str | None) -> None:
    if output:
        write_text(output, text)
    else:
        click.echo(text, nl=False)


def parse_key_values(pairs: tuple[str, ...]) -> dict[str, int]:
    """``("q=3", "t=1")`` to ``{"q": 3, "t": 1}``."""
    values = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {pair!r}")
        try:
            values[key.strip()] = int(value)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got {value!r}") from None
    return values


def split_numbers(value: str, cast=float) -> list:
    try:
        return [cast(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list, got {value!r}") from None


@click.group()
@click.version_option(version="0.1.0", prog_name="robust-meas")
@click.option("--log-level", default=None, help="Logging level (default from ROBUST_MEAS_LOG_LEVEL).")
def cli(log_level: str | None):
    """
    Robust projective measurement with code-inspired commuting observables.

    Examples:

        robust-meas codes --builtin c6

        robust-meas plan --family qudit-distance-code --p 2 --m 9 --k 1

        robust-meas tables --which I --convention both
    """
    configure_logging(log_level)


@cli.command()
@click.option("--builtin", type=click.Choice(sorted(BUILTIN_CODES)), default=None, help="Builtin code name.")
@click.option("--repetition", nargs=2, default=None, help="Repetition code, e.g. --repetition q=3 t=1.")
@click.option("--file", "path", type=click.Path(), default=None, help="Code file: 'q n M' then M codewords.")
@click.option("--json", "output_json", is_flag=True, help="Output as JSON")
@reports_errors
def codes(builtin: str | None, repetition: tuple[str, str] | None, path: str | None, output_json: bool):
    """
    Report q, n, M, d(C), t(C) and an exhaustive decoder check.

    Examples:

        robust-meas codes --builtin c6

        robust-meas codes --repetition q=3 t=1

        robust-meas codes --file mycode.txt --json
    """
    chosen = [x for x in (builtin, repetition, path) if x]
    if len(chosen) != 1:
        raise click.UsageError("give exactly one of --builtin, --repetition or --file")
    if builtin:
        code = BUILTIN_CODES[builtin]()
    elif repetition:
        values = parse_key_values(repetition)
        code = build_repetition(values.get("q", 2), values.get("t", 1))
    else:
        code = load_code(path)

    report = code_report(code)
    if output_json:
        click.echo(dumps_json(document("code-report", report)), nl=False)
        return
    click.echo(f"{code}")
    click.echo(f"  q = {report['q']}, n = {report['n']}, M = {report['M']}")
    if report["d"] is not None:
        click.echo(f"  d(C) = {report['d']}, t(C) = {report['t']}")
    else:
        click.echo("  single codeword: every word decodes to it")
    status = "ok" if report["decoder_failures"] == 0 else "FAILED"
    click.echo(
        f"  decoder: {report['decoder_cases'] - report['decoder_failures']}/{report['decoder_cases']} "
        f"corruptions within t(C) decode correctly [{status}]"
    )


@cli.command()
@click.option("--family", type=click.Choice(["qudit-distance-code", "binomial", "explicit"]), default="binomial")
@click.option("--k", type=int, default=None, help="Errors corrected / dephasing order.")
@click.option("--p", type=int, default=None, help="Qudit dimension (qudit-distance-code).")
@click.option("--m", type=int, default=None, help="Number of qudits (qudit-distance-code).")
@click.option("--g0", type=int, default=None, help="Loss order (binomial, default k).")
@click.option("--g1", type=int, default=None, help="Gain order (binomial, default k).")
@click.option("--povm-size", type=int, default=None, help="Outcome count (explicit).")
@click.option("--t", "t", type=int, default=1, show_default=True, help="Outcome errors to correct.")
@click.option("--q", "q", type=int, default=2, show_default=True, help="Outcomes per observable.")
@click.option("--convention", type=click.Choice(["strict", "even", "both"]), default="both", show_default=True)
@click.option("--knill-laflamme", is_flag=True, help="Use |Pi'| <= |K| instead of |K| + 1.")
@click.option("--budget", type=int, default=None, help="Search node budget (default ROBUST_MEAS_SEARCH_BUDGET).")
@click.option("--output", "-o", type=click.Path(), default=None, help="Write JSON here instead of stdout.")
@reports_errors
def plan(family, k, p, m, g0, g1, povm_size, t, q, convention, knill_laflamme, budget, output):
    """
    Plan robust syndrome extraction for a QEC code.

    Examples:

        robust-meas plan --family binomial --k 3 --t 1 --q 2 --convention both

        robust-meas plan --family qudit-distance-code --p 2 --m 9 --k 1
    """
    if family == "binomial" and k is not None:
        g0 = k if g0 is None else g0
        g1 = k if g1 is None else g1
    params = QECParams(family=family, p=p, m=m, k=k, g0=g0, g1=g1, povm_size=povm_size)
    result = plan_syndrome_extraction(params, t, q, convention, budget, use_knill_laflamme=knill_laflamme)
    emit(dumps_json(document("syndrome-plan", result)), output)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Campaign config JSON.")
@click.option("--code", default="c6", show_default=True, help="Builtin name, repetition:q:t, or code file.")
@click.option("--povm", type=click.Path(), default=None, help="POVM JSON file (default: random POVM).")
@click.option("--povm-seed", type=int, default=0, show_default=True)
@click.option("--dim", type=int, default=None, help="Dimension of the random POVM (default M).")
@click.option("--state", type=click.Choice(["maximally-mixed", "random"]), default="maximally-mixed")
@click.option("--noise", type=click.Choice(["adversarial", "independent"]), default="adversarial")
@click.option("--t", "t", type=int, default=1, show_default=True, help="Corrupted symbols (adversarial).")
@click.option("--positions", default=None, help="Comma-separated 1-based positions to corrupt.")
@click.option("--p", "flip_probability", type=float, default=0.0, help="Flip probability (independent).")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--workers", type=int, default=None, help="Worker threads for trials.")
@click.option("--output", "-o", type=click.Path(), default=None, help="Write statistics JSON here.")
@click.option("--records", type=click.Path(), default=None, help="Write per-trial CSV here.")
@click.option("--export-observables", type=click.Path(), default=None, help="Write the observables Q_j as JSON here.")
@reports_errors
def simulate(config_path, code, povm, povm_seed, dim, state, noise, t, positions, flip_probability,
             trials, seed, workers, output, records, export_observables):
    """
    Run a robust measurement campaign.

    Exit status is nonzero when a trial inside the correction radius
    decodes wrongly.

    Examples:

        robust-meas simulate --noise adversarial --t 1 --trials 500

        robust-meas simulate --noise independent --p 0.05 --records trials.csv

        robust-meas simulate --dim 12 --export-observables observables.json
    """
    if config_path:
        try:
            with open(config_path) as fh:
                config = CampaignConfig.model_validate(json.load(fh))
        except OSError as e:
            raise ParseError(f"cannot read config {config_path}: {e.strerror}") from e
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from e
    else:
        if noise == "independent":
            model = NoiseModel.independent(flip_probability, seed=seed)
        else:
            pos = split_numbers(positions, int) if positions else None
            model = NoiseModel.adversarial(t, pos, seed=seed)
        config = CampaignConfig(
            code=code, povm=povm, povm_seed=povm_seed, dim=dim, state=state,
            noise=model, trials=trials, seed=seed, workers=workers,
        )

    rho, S = config.build()
    if export_observables:
        write_text(export_observables, dumps_json(document("observables", observables_to_json(S))))
    stats, transcripts = run_campaign(rho, S, config.noise, config.trials, config.seed, config.workers)
    emit(dumps_json(document("campaign", {"config": config, "stats": stats})), output)
    if records:
        write_text(records, records_to_csv(tr.to_record() for tr in transcripts))
    if stats.guaranteed_failures:
        click.echo(f"Error: {stats.guaranteed_failures} trials failed inside the correction radius", err=True)
        sys.exit(GUARANTEE_FAILURE_EXIT)


@cli.command()
@click.option("--which", type=click.Choice(["I", "II"]), required=True, help="Which table to reproduce.")
@click.option("--convention", type=click.Choice(["strict", "even", "both"]), default="both", show_default=True)
@click.option("--radii", default="1,2,3", show_default=True, help="Table I radii t.")
@click.option("--sizes", default="2,4,6,8,12,16,20,38,40", show_default=True, help="Table I outcome counts M.")
@click.option("--budget", type=int, default=None, help="Search node budget (default ROBUST_MEAS_SEARCH_BUDGET).")
@click.option("--output", "-o", type=click.Path(), default=None, help="Write CSV here instead of stdout.")
@reports_errors
def tables(which, convention, radii, sizes, budget, output):
    """
    Reproduce a minimum-observable table as CSV.

    Cells the search cannot certify within budget are brackets [lower,upper].

    Examples:

        robust-meas tables --which II

        robust-meas tables --which I --radii 1 --convention strict
    """
    conventions = parse_conventions(convention)
    if which == "I":
        rows = table_one(conventions, split_numbers(radii, int), split_numbers(sizes, int), budget)
    else:
        rows = table_two(conventions, budget=budget)
    emit(records_to_csv(row.as_record() for row in rows), output)


@cli.command()
@click.option("--q", "q", type=int, default=2, show_default=True, help="Outcomes to discriminate.")
@click.option("--photon-numbers", default="0.25,1,4,16", show_default=True, help="Comma-separated |alpha|^2.")
@click.option("--trials", type=int, default=100_000, show_default=True, help="Samples per symbol.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--gamma", type=float, default=1.0, show_default=True, help="Coupling rate.")
@click.option("--output", "-o", type=click.Path(), default=None, help="Write CSV here instead of stdout.")
@reports_errors
def readout(q, photon_numbers, trials, seed, gamma, output):
    """
    Misclassification of coherent-state readout against |alpha|^2, as CSV.

    Examples:

        robust-meas readout --q 2 --photon-numbers 0.25,1,4

        robust-meas readout --q 4 -o curve.csv
    """
    curve = misclassification_curve(q, split_numbers(photon_numbers), trials, seed, gamma)
    records = []
    for est in curve:
        record = est.model_dump(exclude={"per_symbol"})
        record["gamma"] = gamma
        records.append(record)
    emit(records_to_csv(records), output)


if __name__ == "__main__":
    cli()
