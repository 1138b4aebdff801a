"""Region-gated learned force policy: a fixed return arm outside a ball
around the uncertain goal, a discrete-action force searcher inside it,
trained by double-estimation Q-learning with proportional prioritized
replay."""

from .agent import EpisodeLog, EpisodeResult, TrainResult, execute, greedy_action, td_update, train
from .config import LearnerConfig
from .network import Adam, QNetwork
from .policy import N_ACTIONS, action_to_wrench, region_gate, search_reward
from .replay import ReplayMemory, SumTree, Transition, UnderfullMemoryError
from .task import InsertionTask, TaskState, sample_planar_error

__all__ = [
    "Adam",
    "EpisodeLog",
    "EpisodeResult",
    "InsertionTask",
    "LearnerConfig",
    "N_ACTIONS",
    "QNetwork",
    "ReplayMemory",
    "SumTree",
    "TaskState",
    "TrainResult",
    "Transition",
    "UnderfullMemoryError",
    "action_to_wrench",
    "execute",
    "greedy_action",
    "region_gate",
    "sample_planar_error",
    "search_reward",
    "td_update",
    "train",
]
