"""Per-user Q-tables and the temporal-difference update applied on usage events."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Literal

from .content import NewsProfile
from .core import UsageEvent

START_STATE = "__START__"

DEFAULT_REWARDS: dict[str, float] = {
    "read": 1.0,
    "like": 2.0,
    "comment": 3.0,
    "impression": 0.0,
    "dismiss": -0.5,
}

# Kinds that advance the state chain and count as consumption.
_ADVANCING_KINDS = frozenset({"read", "like", "comment"})


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float = 0.1
    gamma: float = 0.9
    rewards: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_REWARDS))
    # "as_written" bootstraps on the greedy next action's value, matching the
    # update equation verbatim; "max" bootstraps on the max stored value.
    target: Literal["as_written", "max"] = "as_written"

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must be in (0, 1]")
        if not (0.0 <= self.gamma < 1.0):
            raise ValueError("gamma must be in [0, 1)")
        for kind, r in self.rewards.items():
            if not math.isfinite(r):
                raise ValueError(f"non-finite reward for {kind!r}")


class QTable:
    """Sparse (state, action) -> value store; absent keys read as 0."""

    def __init__(self):
        self._entries: dict[tuple[str, str], float] = {}

    def get(self, state: str, action: str) -> float:
        return self._entries.get((state, action), 0.0)

    def set(self, state: str, action: str, value: float) -> None:
        if not math.isfinite(value):
            raise ValueError("Q values must be finite")
        self._entries[(state, action)] = value

    def actions_at(self, state: str) -> dict[str, float]:
        return {a: v for (s, a), v in self._entries.items() if s == state}

    def entries(self) -> dict[tuple[str, str], float]:
        return dict(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


@dataclass
class UserProfile:
    user_id: str
    qtable: QTable = field(default_factory=QTable)
    short_term: dict[str, float] = field(default_factory=dict)
    long_term: dict[str, float] = field(default_factory=dict)
    read_set: set[str] = field(default_factory=set)
    last_state: str = START_STATE
    last_update_at: datetime | None = None

    def visited_states(self) -> set[str]:
        return {s for (s, _a) in self.qtable.entries()}


class UnknownUser(KeyError):
    pass


def reward_for(kind: str, cfg: LearnerConfig) -> float:
    return cfg.rewards.get(kind, 0.0)


def q_update(q: float, r: float, q_next: float, alpha: float, gamma: float) -> float:
    """Q(s,a) <- Q(s,a) + alpha * (r + gamma * Q(s',a') - Q(s,a))."""
    return q + alpha * (r + gamma * q_next - q)


def greedy_action(qtable: QTable, state: str) -> str | None:
    """Best stored action at `state`; ties to the lexicographically smallest."""
    actions = qtable.actions_at(state)
    if not actions:
        return None
    return min(actions, key=lambda a: (-actions[a], a))


def record_event(
    profile: UserProfile,
    event: UsageEvent,
    item_profile: NewsProfile,
    cfg: LearnerConfig,
) -> UserProfile:
    """Apply one usage event to the user's Q-table.

    Consumption kinds (read/like/comment) take action a = the item's dominant
    topic, update Q(last_state, a) bootstrapping on the next state's greedy
    value, and advance last_state to a. Impressions and dismissals update
    Q(last_state, a) with their configured reward but leave the chain alone.
    """
    if event.user_id != profile.user_id:
        raise UnknownUser(event.user_id)

    action = item_profile.dominant_topic
    state = profile.last_state
    r = reward_for(event.kind, cfg)

    if event.kind in _ADVANCING_KINDS:
        next_state = action
        next_actions = profile.qtable.actions_at(next_state)
        if not next_actions:
            q_next = 0.0
        elif cfg.target == "max":
            q_next = max(next_actions.values())
        else:
            q_next = next_actions[greedy_action(profile.qtable, next_state)]
        profile.qtable.set(state, action, q_update(profile.qtable.get(state, action), r, q_next, cfg.alpha, cfg.gamma))
        profile.last_state = next_state
        if event.kind == "read":
            profile.read_set.add(event.news_id)
    else:
        profile.qtable.set(state, action, q_update(profile.qtable.get(state, action), r, 0.0, cfg.alpha, cfg.gamma))
    return profile
