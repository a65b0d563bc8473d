"""
Experiment configuration: the JSON schema, validation and the built-in
presets.
"""
from typing import NamedTuple, Optional
import json
import logging
import os

from ts_pricing.common import ConfigError
from ts_pricing.demand import DemandEnvironment
from ts_pricing.policies import POLICY_KINDS
from ts_pricing.posterior import PosteriorState, posterior_from_dict

logger = logging.getLogger(__name__)

PRICES = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]
HORIZON = 10

GAMMA_PRIOR = {"family": "gamma", "alpha": 10.0, "beta": 1.0}
GP_PRIOR = {"family": "gp", "sigma_t": 3.0, "sigma_p": 2.5, "jitter": 1e-6, "mean": 0.0}
NEGBIN_R = 10.0
BETA_PRIOR = {"family": "beta-negbin", "a": 1.0, "b": 1.0, "r": NEGBIN_R}

# trial counts of the GP presets: quick by default, the full count with `full`
GP_FAST_TRIALS = 20
GP_FULL_TRIALS = 100

FIELDS = (
    "name", "environment", "prior", "policies", "n0", "episodes", "trials",
    "base_seed", "output", "workers", "traces", "full",
)
# fields that do not influence results, left out of the canonical form
RUNTIME_FIELDS = ("output", "workers")


class ExperimentConfig(NamedTuple):
    name: str
    environment: dict
    prior: dict
    policies: tuple[str, ...]
    n0: int
    episodes: int
    trials: int
    base_seed: int = 0
    output: Optional[str] = None
    workers: Optional[int] = None
    traces: bool = False
    full: bool = False


def _env(kind: str, **extra) -> dict:
    family = "negbin" if kind.startswith("negbin") else "poisson"
    doc = {"family": family, "T": HORIZON, "prices": list(PRICES), "params": {"kind": kind}}
    doc.update(extra)
    return doc


def _preset(name, environment, prior, n0, episodes, trials) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        environment=environment,
        prior=dict(prior),
        policies=POLICY_KINDS,
        n0=n0,
        episodes=episodes,
        trials=trials,
    )


def _build_presets() -> dict[str, ExperimentConfig]:
    presets = {}
    for suffix, n0 in (("1", 50), ("2", 1000)):
        presets[f"A{suffix}"] = _preset(
            f"A{suffix}", _env("formula-A1"), GAMMA_PRIOR, n0, 5000, 100,
        )
        presets[f"A{suffix}-gp"] = _preset(
            f"A{suffix}-gp", _env("formula-A1"), GP_PRIOR, n0, 200, GP_FAST_TRIALS,
        )
        presets[f"B{suffix}"] = _preset(
            f"B{suffix}", _env("formula-B"), GAMMA_PRIOR, n0, 2000, 100,
        )
        presets[f"B{suffix}-gp"] = _preset(
            f"B{suffix}-gp", _env("formula-B"), GP_PRIOR, n0, 200, GP_FAST_TRIALS,
        )
    for suffix, n0 in (("1", 30), ("2", 1000)):
        for law, kind in (("A", "negbin-PA"), ("B", "negbin-PB")):
            name = f"NB-{law}{suffix}"
            presets[name] = _preset(
                name, _env(kind, r=NEGBIN_R), BETA_PRIOR, n0, 5000, 100,
            )
    return presets


PRESETS = _build_presets()

ALIASES = {
    "A1-n50": "A1",
    "A2-n1000": "A2",
    "B1-n50": "B1",
    "B2-n1000": "B2",
    "NB-A1-n30": "NB-A1",
    "NB-A2-n1000": "NB-A2",
    "NB-B1-n30": "NB-B1",
    "NB-B2-n1000": "NB-B2",
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def is_gp_prior(prior: dict) -> bool:
    return prior.get("family") == "gp"


def expand_preset(name: str, full: bool = False) -> ExperimentConfig:
    '''
    Look up a preset by name or alias. With `full`, the GP presets use the
    full trial count instead of the quick default.

    Examples
    --------

    >>> cfg = expand_preset("A1-n50")
    >>> cfg.name, cfg.n0, cfg.episodes, cfg.prior["family"]
    ('A1', 50, 5000, 'gamma')
    >>> expand_preset("A1-gp", full=True).trials
    100
    '''
    key = ALIASES.get(name, name)
    try:
        config = PRESETS[key]
    except KeyError:
        raise ConfigError(
            "preset", f"unknown preset {name!r}, expected one of {', '.join(preset_names())}"
        ) from None
    if full:
        config = config._replace(full=True)
        if is_gp_prior(config.prior):
            config = config._replace(trials=GP_FULL_TRIALS)
    logger.info("expanded preset %s", key)
    return config


def config_to_dict(config: ExperimentConfig, runtime: bool = False) -> dict:
    """
    JSON form of `config`; the runtime-only fields (output directory, worker
    count) are included only with `runtime=True`.
    """
    doc = config._asdict()
    doc["policies"] = list(config.policies)
    if not runtime:
        for key in RUNTIME_FIELDS:
            doc.pop(key)
    return doc


def canonical_json(config: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n"


def _int_field(doc: dict, key: str, minimum: int, default=None):
    value = doc.get(key, default)
    if value is None:
        raise ConfigError(key, "missing required field")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def config_from_dict(doc: dict) -> ExperimentConfig:
    '''
    Parse a configuration document. With a :code:`"preset"` key, the preset
    is expanded first and all other keys override its fields.
    '''
    if not isinstance(doc, dict):
        raise ConfigError("<root>", f"expected a JSON object, got {type(doc).__name__}")
    doc = dict(doc)
    unknown = set(doc) - set(FIELDS) - {"preset"}
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(key, "unknown field")
    preset = doc.pop("preset", None)
    if preset is not None:
        base = config_to_dict(
            expand_preset(preset, full=bool(doc.get("full", False))), runtime=True,
        )
        base.update(doc)
        doc = base

    for key in ("environment", "prior"):
        if not isinstance(doc.get(key), dict):
            raise ConfigError(key, "missing or not an object")
    policies = doc.get("policies", list(POLICY_KINDS))
    if isinstance(policies, str) or not isinstance(policies, (list, tuple)) or not policies:
        raise ConfigError("policies", "must be a non-empty list of policy names")
    for i, kind in enumerate(policies):
        if kind not in POLICY_KINDS:
            raise ConfigError(
                f"policies[{i}]",
                f"unknown policy {kind!r}, expected one of {', '.join(POLICY_KINDS)}",
            )
    if len(set(policies)) != len(policies):
        raise ConfigError("policies", "policies must not repeat")
    workers = doc.get("workers")
    if workers is not None:
        workers = _int_field(doc, "workers", 1)
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", f"must be a path string, got {output!r}")
    config = ExperimentConfig(
        name=str(doc.get("name", "custom")),
        environment=doc["environment"],
        prior=doc["prior"],
        policies=tuple(policies),
        n0=_int_field(doc, "n0", 0),
        episodes=_int_field(doc, "episodes", 1),
        trials=_int_field(doc, "trials", 1),
        base_seed=_int_field(doc, "base_seed", 0, default=0),
        output=output,
        workers=workers,
        traces=bool(doc.get("traces", False)),
        full=bool(doc.get("full", False)),
    )
    build_environment(config)
    build_prior(config)
    return config


def build_environment(config: ExperimentConfig) -> DemandEnvironment:
    try:
        return DemandEnvironment.from_dict(config.environment)
    except (ValueError, TypeError) as e:
        raise ConfigError("environment", str(e)) from None


def build_prior(config: ExperimentConfig) -> PosteriorState:
    env = build_environment(config)
    try:
        return posterior_from_dict(config.prior, env.grid, env.horizon, r=env.r)
    except (ValueError, TypeError) as e:
        raise ConfigError("prior", str(e)) from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(os.fspath(path), f"invalid JSON: {e}") from None
    logger.info("loaded experiment config from %s", path)
    return config_from_dict(doc)
