import logging
from typing import Optional

try:
    import prctl
except ImportError:
    prctl = None

logger = logging.getLogger(__name__)


class LaplaceFitError(RuntimeError):
    """
    The Laplace approximation of the GP posterior could not be computed.

    The attributes carry the Newton diagnostics at the point of failure.
    """
    def __init__(
        self,
        msg: str,
        iterations: int = 0,
        objective_history: Optional[list[float]] = None,
        gradient_norm: float = float('nan'),
        jitter: float = float('nan'),
    ):
        super().__init__(msg)
        self.iterations = iterations
        self.objective_history = list(objective_history or [])
        self.gradient_norm = gradient_norm
        self.jitter = jitter


class SimplexCyclingError(RuntimeError):
    pass


class PosteriorSamplingError(RuntimeError):
    pass


class ConfigError(ValueError):
    """
    Invalid experiment configuration; `path` is the dotted path of the
    offending field, for example `prior.alpha`.
    """
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


def set_worker_name(name: str):
    """
    Set the name of the current worker process; mostly useful for using
    system tools for profiling

    Parameters
    ----------
    name : str
        The process name
    """
    if prctl is None:
        return
    prctl.set_name(name)
