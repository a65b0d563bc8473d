"""
Command line interface, installed as :code:`ts-pricing`.

Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
errors while running.
"""
from collections.abc import Sequence
from typing import Optional
import json
import logging
import sys
import time

import click

from ts_pricing.common import ConfigError
from ts_pricing.dp import solve_dp
from ts_pricing.lp import solve_lp
from ts_pricing.policies import POLICY_KINDS
from .config import (
    build_environment, canonical_json, config_from_dict, expand_preset, load_config,
    preset_names,
)
from .output import dumps_json, write_value_table_csv
from .runner import run_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


@click.group()
@click.option('--verbose', '-v', is_flag=True, default=False, help="Log progress at INFO level.")
def cli(verbose):
    """
    Thompson-sampling pricing experiments for episodic revenue management.
    """
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)


@cli.command()
@click.option('--config', 'config_path', required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON experiment configuration.")
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help="Worker processes (default: physical cores, capped by TS_PRICING_MAX_WORKERS).")
@click.option('--progress/--no-progress', default=False, help="Show a progress bar.")
def simulate(config_path, workers, progress):
    """
    Run the experiment described by a configuration file.
    """
    config = load_config(config_path)
    if workers is not None:
        config = config._replace(workers=workers)
    result = run_experiment(config, progress=progress)
    click.echo(dumps_json(result.summary), nl=False)


@cli.command()
@click.option('--preset', required=True, help="Preset name, see `ts-pricing presets`.")
@click.option('--trials', type=click.IntRange(min=1), default=None,
              help="Number of independent trials (default: the preset's).")
@click.option('--seed', type=click.IntRange(min=0), default=0, help="Base seed of all trials.")
@click.option('--episodes', type=click.IntRange(min=1), default=None,
              help="Episodes per trial (default: the preset's).")
@click.option('--policies', default=None,
              help=f"Comma-separated subset of: {', '.join(POLICY_KINDS)}.")
@click.option('--full', is_flag=True, default=False,
              help="Use the full trial count for the GP presets.")
@click.option('--output', type=click.Path(file_okay=False), default=None,
              help="Directory for regret.csv and summary.json.")
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help="Worker processes (default: physical cores, capped by TS_PRICING_MAX_WORKERS).")
@click.option('--bayesian', is_flag=True, default=False,
              help="Also estimate the Bayesian regret with environments drawn from the prior.")
@click.option('--progress/--no-progress', default=False, help="Show a progress bar.")
def replicate(preset, trials, seed, episodes, policies, full, output, workers, bayesian, progress):
    """
    Run a preset experiment and print its summary as JSON.
    """
    overrides: dict = {"preset": preset, "full": full, "base_seed": seed}
    if trials is not None:
        overrides["trials"] = trials
    if episodes is not None:
        overrides["episodes"] = episodes
    if policies is not None:
        overrides["policies"] = [p.strip() for p in policies.split(",") if p.strip()]
    if output is not None:
        overrides["output"] = output
    if workers is not None:
        overrides["workers"] = workers
    config = config_from_dict(overrides)
    result = run_experiment(config, progress=progress, bayesian=bayesian)
    click.echo(dumps_json(result.summary), nl=False)


@cli.command('dp-oracle')
@click.option('--preset', required=True, help="Preset providing the environment and n0.")
@click.option('--n0', type=click.IntRange(min=0), default=None,
              help="Initial inventory (default: the preset's).")
@click.option('--dump-csv', type=click.Path(dir_okay=False), default=None,
              help="Write the value table as CSV.")
def dp_oracle(preset, n0, dump_csv):
    """
    Solve the known-demand dynamic program of a preset and print the
    optimal expected revenue per episode.
    """
    config = expand_preset(preset)
    if n0 is None:
        n0 = config.n0
    env = build_environment(config)
    t0 = time.perf_counter()
    table = solve_dp(env, n0)
    runtime_ms = (time.perf_counter() - t0) * 1000
    if dump_csv is not None:
        write_value_table_csv(dump_csv, table)
    click.echo(dumps_json({
        "rev_star": table.rev_star,
        "n0": n0,
        "runtime_ms": runtime_ms,
    }), nl=False)


def _load_instance(path) -> dict:
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(path, f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    for key in ("lambda", "prices", "inventory"):
        if key not in doc:
            raise ConfigError(key, "missing required field")
    return doc


@cli.command()
@click.option('--instance', required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON instance with lambda, prices, start and inventory.")
def lp(instance):
    """
    Solve one fluid-relaxation LP and print the plan as JSON.
    """
    doc = _load_instance(instance)
    try:
        plan = solve_lp(
            doc["lambda"],
            start=int(doc.get("start", 1)),
            inventory=float(doc["inventory"]),
            prices=doc["prices"],
        )
    except ValueError as e:
        raise ConfigError("instance", str(e)) from None
    click.echo(dumps_json({
        "objective": plan.objective,
        "dual_mu": plan.dual_mu,
        "x": plan.x.tolist(),
    }), nl=False)


@cli.command()
@click.argument('name', required=False)
@click.option('--full', is_flag=True, default=False,
              help="Show the full trial count for the GP presets.")
def presets(name, full):
    """
    List the preset names, or print the canonical JSON of preset NAME.
    """
    if name is None:
        for preset in preset_names():
            click.echo(preset)
        return
    click.echo(canonical_json(expand_preset(name, full=full)), nl=False)


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface on `argv` and return the exit code
    instead of exiting.
    """
    if argv is None:
        argv = sys.argv[1:]
    try:
        rv = cli.main(args=list(argv), prog_name="ts-pricing", standalone_mode=False)
    except ConfigError as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_USAGE
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_RUNTIME
    except Exception as e:
        logger.debug("command failed", exc_info=True)
        click.echo(f"Error: {e.__class__.__name__}: {e}", err=True)
        return EXIT_RUNTIME
    if isinstance(rv, int):
        return rv
    return EXIT_OK


def main():
    sys.exit(cli_dispatch())
