"""
Result files: regret-curve CSV, per-period trace CSV, value-table CSV and
the summary JSON. All writers produce LF line endings and a fixed float
format so that equal results give byte-identical files.
"""
from collections.abc import Mapping, Sequence
import csv
import json
import logging
import os

import numpy as np

from ts_pricing.demand import PriceGrid
from ts_pricing.dp import ValueTable
from ts_pricing.regret import relative_regret
from ts_pricing.sim import TrialResult

logger = logging.getLogger(__name__)

REGRET_HEADER = ("trial", "episode", "policy", "revenue", "cum_revenue", "relative_regret")
TRACE_HEADER = (
    "trial", "episode", "policy", "t", "action", "price",
    "demand", "satisfied", "revenue", "inventory",
)


def fmt(value: float) -> str:
    """
    Examples
    --------

    >>> fmt(1/3)
    '0.3333333333'
    >>> fmt(12.0)
    '12'
    """
    return format(float(value), '.10g')


def _writer(f):
    return csv.writer(f, lineterminator="\n")


def write_regret_csv(
    path, results: Mapping[str, Sequence[TrialResult]], rev_star: float,
):
    """
    One row per (policy, trial, episode), in the order of `results` and
    then by trial index and episode.
    """
    with open(path, "w", newline="") as f:
        writer = _writer(f)
        writer.writerow(REGRET_HEADER)
        for policy, trials in results.items():
            for trial in sorted(trials, key=lambda r: r.trial_index):
                cum = np.cumsum(trial.revenues)
                rho = relative_regret(trial.revenues, rev_star)
                for s in range(trial.revenues.shape[0]):
                    writer.writerow((
                        trial.trial_index, s + 1, policy,
                        fmt(trial.revenues[s]), fmt(cum[s]), fmt(rho[s]),
                    ))
    logger.info("wrote regret curves to %s", path)


def write_trace_csv(path, results: Mapping[str, Sequence[TrialResult]], grid: PriceGrid):
    with open(path, "w", newline="") as f:
        writer = _writer(f)
        writer.writerow(TRACE_HEADER)
        for policy, trials in results.items():
            for trial in sorted(trials, key=lambda r: r.trial_index):
                if trial.traces is None:
                    raise ValueError(
                        f"trial {trial.trial_index} of {policy} was run without trace recording"
                    )
                for s, episode in enumerate(trial.traces):
                    for i in range(episode.actions.shape[0]):
                        writer.writerow((
                            trial.trial_index, s + 1, policy, i + 1,
                            int(episode.actions[i]), fmt(episode.prices[i]),
                            int(episode.demands[i]), int(episode.satisfied[i]),
                            fmt(episode.revenues[i]), int(episode.inventory[i]),
                        ))
    logger.info("wrote traces to %s", path)


def write_value_table_csv(path, table: ValueTable):
    """
    Rows are the remaining periods `0 .. T`, columns the inventory levels
    `0 .. n0`.
    """
    with open(path, "w", newline="") as f:
        writer = _writer(f)
        writer.writerow(["t"] + [f"n{n}" for n in range(table.n0 + 1)])
        for t in range(table.V.shape[0]):
            writer.writerow([t] + [fmt(v) for v in table.V[t]])
    logger.info("wrote value table to %s", path)


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_summary_json(path, summary: dict):
    with open(path, "w", newline="\n") as f:
        f.write(dumps_json(summary))
    logger.info("wrote summary to %s", path)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
