"""Cycle-level model of the control unit driving the operative unit.

The control unit is a four-state machine (idle, op, done_it, done_all) with
an 11-bit iteration counter and the X_n register.  The operative unit is
modeled as a block that, once ``ready`` is high, raises ``o_done`` for one
cycle after ``uoml_latency`` cycles with the next map value.

Modeling choices visible in traces:

* the half-clock ``done_all`` pulse is one full cycle wide;
* reset is sampled at cycle boundaries;
* the counter increments on the same cycle X_n loads the new value;
* the MUX routing of X_n is folded into :func:`fsm_step` (idle holds x0,
  completion of an iteration loads the operative unit output).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError
from .fixq16 import Fix32, Flagged
from .uoml import IterationRecord, MapParams, Orbit, iterate_once

COUNTER_BITS = 11
COUNTER_MAX = (1 << COUNTER_BITS) - 1

_ZERO = Fix32(0)


class FsmState(enum.Enum):
    IDLE = "idle"
    OP = "op"
    DONE_IT = "done_it"
    DONE_ALL = "done_all"


@dataclass(frozen=True)
class SimConfig:
    params: MapParams
    it_max: int
    uoml_latency: int = 4

    def __post_init__(self) -> None:
        if not 0 <= self.it_max <= COUNTER_MAX:
            raise ConfigError(
                f"it_max={self.it_max} does not fit the {COUNTER_BITS}-bit "
                f"iteration counter (0..{COUNTER_MAX})"
            )
        if self.uoml_latency < 1:
            raise ConfigError(f"uoml_latency must be >= 1, got {self.uoml_latency}")


@dataclass(slots=True)
class SimState:
    """Register contents at one clock cycle.

    Also used as the per-cycle trace row.  ``uoml_out``, ``o_over`` and
    ``o_under`` are the operative unit's registered outputs; ``elapsed`` and
    ``stages`` are internal bookkeeping and are not exported.
    """

    fsm: FsmState
    counter: int
    x_reg: Fix32
    ready: int
    done_pulse: int
    done_all: int
    cycle: int
    uoml_out: Fix32 = _ZERO
    o_over: int = 0
    o_under: int = 0
    elapsed: int = 0
    stages: Optional[tuple[Flagged, Flagged]] = None


TraceEvent = SimState


def reset_state(config: SimConfig, cycle: int = 0) -> SimState:
    return SimState(FsmState.IDLE, 0, config.params.x0, 0, 0, 0, cycle)


def _enter_op(state: SimState, config: SimConfig, counter: int, x_reg: Fix32) -> SimState:
    ready = 1 if counter < config.it_max else 0
    nxt = SimState(
        FsmState.OP, counter, x_reg, ready, 0, 0, state.cycle + 1,
        state.uoml_out, state.o_over, state.o_under, ready,
    )
    if ready and config.uoml_latency == 1:
        _complete(nxt, config)
    return nxt


def _complete(state: SimState, config: SimConfig) -> None:
    p = config.params
    step = iterate_once(state.x_reg, p.r, p.mode)
    state.uoml_out = step.value
    state.o_over = int(step.overflow)
    state.o_under = int(step.underflow)
    state.stages = step.stages
    state.done_pulse = 1


def fsm_step(state: SimState, start: int, config: SimConfig, rst: int = 0) -> SimState:
    """Advance one clock cycle and return the new state (``state`` is untouched)."""
    if rst:
        return reset_state(config, state.cycle + 1)

    fsm = state.fsm
    if fsm is FsmState.IDLE:
        if start:
            return _enter_op(state, config, 0, config.params.x0)
        return reset_state(config, state.cycle + 1)

    if fsm is FsmState.OP:
        if state.counter == config.it_max:
            return SimState(
                FsmState.DONE_ALL, state.counter, state.x_reg, 0, 0, 1, state.cycle + 1,
                state.uoml_out, state.o_over, state.o_under,
            )
        if state.done_pulse:
            return SimState(
                FsmState.DONE_IT, state.counter + 1, state.uoml_out, 0, 0, 0, state.cycle + 1,
                state.uoml_out, state.o_over, state.o_under,
            )
        nxt = SimState(
            FsmState.OP, state.counter, state.x_reg, state.ready, 0, 0, state.cycle + 1,
            state.uoml_out, state.o_over, state.o_under, state.elapsed + 1,
        )
        if nxt.ready and nxt.elapsed == config.uoml_latency:
            _complete(nxt, config)
        return nxt

    if fsm is FsmState.DONE_IT:
        return _enter_op(state, config, state.counter, state.x_reg)

    # DONE_ALL: the pulse lasted one cycle; fall back to idle
    return reset_state(config, state.cycle + 1)


def run_sim(config: SimConfig) -> tuple[Orbit, list[TraceEvent]]:
    """Run from reset with ``start`` held high until the ``done_all`` pulse.

    Returns the orbit read off the X_n load events and the full per-cycle
    trace, ending with the cycle the machine is back in idle.
    """
    params = config.params
    state = reset_state(config)
    trace = [state]
    records = [IterationRecord(0, params.x0)]
    seen_done_all = False
    while not (seen_done_all and state.fsm is FsmState.IDLE):
        prev = state
        state = fsm_step(prev, 0 if seen_done_all else 1, config)
        trace.append(state)
        if prev.fsm is FsmState.OP and state.fsm is FsmState.DONE_IT:
            records.append(
                IterationRecord(
                    state.counter, state.x_reg, bool(prev.o_over), bool(prev.o_under), prev.stages
                )
            )
        seen_done_all = seen_done_all or bool(state.done_all)
    orbit = Orbit(replace(params, n_iter=config.it_max), tuple(records))
    return orbit, trace
