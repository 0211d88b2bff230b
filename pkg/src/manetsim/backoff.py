"""Contention-window update policies for 802.11 DCF backoff.

Six policies behind one interface.  Growth on collision / shrink on success:

    ============  =====================  ========================
    policy        collision              success
    ============  =====================  ========================
    beb           cw * 2                 reset to cw_min
    mbeb          cw * mbeb_base (1.5)   reset to cw_min
    mild          cw * 1.5               cw - mild_step (1 slot)
    eied          cw * eied_increase     cw / eied_decrease
    didd          cw * 2                 cw / 2
    log           cw + ceil(log2(cw))    reset to cw_min
    ============  =====================  ========================

Multiplicative and divisive updates round half up to the nearest integer
slot count, then clamp into [cw_min, cw_max].  All functions are pure: they
return a new state and never mutate the argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .kernel import RandomSource


class Policy(Enum):
    BEB = "beb"
    MODIFIED_BEB = "mbeb"
    MILD = "mild"
    EIED = "eied"
    DIDD = "didd"
    LOG = "log"


POLICY_KEYS = [p.value for p in Policy]


def policy_from_name(name: str) -> Policy:
    try:
        return Policy(name.strip().lower())
    except ValueError:
        raise ValueError(f"unknown backoff policy {name!r}; expected one of {POLICY_KEYS}")


@dataclass(frozen=True, slots=True)
class BackoffParams:
    """Tunable constants shared by the policies.

    eied_increase/eied_decrease are the exponential-increase-exponential-
    decrease factors, mbeb_base the sub-2 growth base of modified BEB, and
    mild_step the linear per-success decrement of MILD (in slots).
    """

    cw_min: int = 32
    cw_max: int = 1024
    eied_increase: float = 2.0
    eied_decrease: float = 2.0 ** 0.125
    mbeb_base: float = 1.5
    mild_step: int = 1

    def validate(self) -> None:
        if not (1 <= self.cw_min <= self.cw_max):
            raise ValueError(f"need 1 <= cw_min <= cw_max, got {self.cw_min}..{self.cw_max}")
        if self.eied_increase <= 1 or self.eied_decrease <= 1:
            raise ValueError("eied_increase and eied_decrease must exceed 1")
        if not (1 < self.mbeb_base < 2):
            raise ValueError(f"mbeb_base must lie in (1, 2), got {self.mbeb_base}")
        if self.mild_step < 1:
            raise ValueError("mild_step must be at least 1")


@dataclass(frozen=True, slots=True)
class ContentionState:
    policy: Policy
    cw: int
    params: BackoffParams


def fresh_state(policy: Policy, params: BackoffParams | None = None) -> ContentionState:
    params = params or BackoffParams()
    params.validate()
    return ContentionState(policy, params.cw_min, params)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _log2_ceil(cw: int) -> int:
    # ceil(log2(cw)) for cw >= 1, computed in exact integer arithmetic
    return (cw - 1).bit_length()


def _clamp(cw: int, params: BackoffParams) -> int:
    return max(params.cw_min, min(params.cw_max, cw))


def on_collision(state: ContentionState) -> ContentionState:
    """Grow the contention window after a failed transmission."""
    p = state.params
    if state.policy is Policy.BEB:
        cw = state.cw * 2
    elif state.policy is Policy.MODIFIED_BEB:
        cw = _round_half_up(state.cw * p.mbeb_base)
    elif state.policy is Policy.MILD:
        cw = _round_half_up(state.cw * 1.5)
    elif state.policy is Policy.EIED:
        cw = _round_half_up(state.cw * p.eied_increase)
    elif state.policy is Policy.DIDD:
        cw = state.cw * 2
    else:  # Policy.LOG
        cw = state.cw + _log2_ceil(state.cw)
    return replace(state, cw=_clamp(cw, p))


def on_success(state: ContentionState) -> ContentionState:
    """Shrink or reset the contention window after an acked transmission."""
    p = state.params
    if state.policy in (Policy.BEB, Policy.MODIFIED_BEB, Policy.LOG):
        cw = p.cw_min
    elif state.policy is Policy.MILD:
        cw = state.cw - p.mild_step
    elif state.policy is Policy.EIED:
        cw = _round_half_up(state.cw / p.eied_decrease)
    else:  # Policy.DIDD
        cw = _round_half_up(state.cw / 2)
    return replace(state, cw=_clamp(cw, p))


def draw_backoff(state: ContentionState, rng: RandomSource) -> int:
    """Draw a backoff duration in slots, uniform over [0, cw - 1]."""
    return rng.uniform_int(0, state.cw - 1)
