from typing import NamedTuple, TYPE_CHECKING


if TYPE_CHECKING:
    from ts_pricing.sim import EpisodeTrace, TrialResult


class EpisodeDoneEnv(NamedTuple):
    """
    Parameter object used in :meth:`~ts_pricing.hooks.Hooks.on_episode_done`
    """

    trial_index: int
    """
    Index of the trial the episode belongs to.
    """

    episode: int
    """
    1-based index of the episode within the trial.
    """

    policy: str
    """
    Name of the policy that was run.
    """

    trace: "EpisodeTrace"
    """
    Per-period records of the episode.
    """


class TrialDoneEnv(NamedTuple):
    """
    Parameter object used in :meth:`~ts_pricing.hooks.Hooks.on_trial_done`
    """

    result: "TrialResult"
    """
    The complete result of the trial.
    """


class Hooks:
    """
    Interface for defining actions to perform in reaction to simulation
    events, for example recording traces or reporting progress.

    Each hook method gets a specific environment object as a parameter, that
    includes all necessary context information from the current state of
    the simulation.

    Hooks run in the process that executes the trial; with a process pool
    executor they must be picklable.
    """

    def on_episode_done(self, env: EpisodeDoneEnv):
        """
        This hook is called after the last period of every episode, once the
        policy has observed all demands of that episode.
        """
        pass

    def on_trial_done(self, env: TrialDoneEnv):
        """
        This hook is called when all episodes of a trial have been run.
        """
        pass


class TraceRecorder(Hooks):
    """
    Collects the traces of all episodes it sees.
    """
    def __init__(self):
        self.traces: list[EpisodeDoneEnv] = []

    def on_episode_done(self, env: EpisodeDoneEnv):
        self.traces.append(env)
