import random
from dataclasses import replace
from itertools import groupby

import pytest

from fxlogistic.ctrlsim import (
    COUNTER_MAX,
    FsmState,
    SimConfig,
    fsm_step,
    reset_state,
    run_sim,
)
from fxlogistic.errors import ConfigError
from fxlogistic.fixq16 import Fix32, RoundMode
from fxlogistic.uoml import MapParams, run_orbit

T, C = RoundMode.TRUNC, RoundMode.CEIL
DEFAULT = MapParams.from_decimal()


def config(it_max=150, latency=4, mode=T, params=DEFAULT):
    return SimConfig(params.with_mode(mode), it_max, latency)


def states(trace):
    return [name for name, _ in groupby(ev.fsm for ev in trace)]


def test_idle_start_enters_op_with_ready():
    cfg = config(it_max=5)
    s0 = reset_state(cfg)
    assert (s0.fsm, s0.counter, s0.ready, s0.x_reg) == (FsmState.IDLE, 0, 0, cfg.params.x0)
    s1 = fsm_step(s0, 1, cfg)
    assert s1.fsm is FsmState.OP and s1.ready == 1 and s1.cycle == 1


def test_idle_waits_without_start():
    cfg = config()
    s = reset_state(cfg)
    for _ in range(3):
        s = fsm_step(s, 0, cfg)
    assert s.fsm is FsmState.IDLE and s.cycle == 3


def test_op_at_it_max_goes_to_done_all():
    cfg = config(it_max=3)
    s = replace(reset_state(cfg), fsm=FsmState.OP, counter=3, ready=0)
    nxt = fsm_step(s, 0, cfg)
    assert nxt.fsm is FsmState.DONE_ALL and nxt.done_all == 1


@pytest.mark.parametrize("start", [0, 1])
def test_done_all_returns_to_idle(start):
    cfg = config(it_max=3)
    s = replace(reset_state(cfg), fsm=FsmState.DONE_ALL, counter=3, done_all=1)
    nxt = fsm_step(s, start, cfg)
    assert nxt.fsm is FsmState.IDLE and nxt.done_all == 0 and nxt.counter == 0


def test_reset_mid_run():
    cfg = config(it_max=20)
    s = reset_state(cfg)
    for _ in range(37):
        s = fsm_step(s, 1, cfg)
    assert s.counter > 0 and s.fsm is not FsmState.IDLE
    s = fsm_step(s, 1, cfg, rst=1)
    assert (s.fsm, s.counter, s.ready, s.x_reg, s.cycle) == (FsmState.IDLE, 0, 0, cfg.params.x0, 38)


def test_it_max_zero():
    orbit, trace = run_sim(config(it_max=0))
    assert orbit.raws == [DEFAULT.x0.raw]
    assert states(trace) == [FsmState.IDLE, FsmState.OP, FsmState.DONE_ALL, FsmState.IDLE]
    assert not any(ev.done_pulse for ev in trace)


@pytest.mark.parametrize("it_max", [-1, COUNTER_MAX + 1])
def test_counter_width(it_max):
    with pytest.raises(ConfigError, match="11-bit"):
        config(it_max=it_max)


def test_latency_must_be_positive():
    with pytest.raises(ConfigError):
        config(latency=0)


@pytest.mark.parametrize("mode", [T, C])
@pytest.mark.parametrize("latency", [1, 2, 4, 7])
def test_refines_run_orbit(mode, latency):
    orbit, _ = run_sim(config(150, latency, mode))
    ref = run_orbit(DEFAULT.with_mode(mode))
    assert orbit.records == ref.records
    assert orbit.params == ref.params


def test_trace_discipline():
    cfg = config(it_max=40, latency=3)
    _, trace = run_sim(cfg)
    assert [ev.cycle for ev in trace] == list(range(len(trace)))
    assert max(ev.counter for ev in trace) == 40
    assert sum(ev.done_pulse for ev in trace) == 40
    assert sum(ev.done_all for ev in trace) == 1
    # o_done pulses are isolated single cycles
    for a, b in zip(trace, trace[1:]):
        assert not (a.done_pulse and b.done_pulse)
    seq = states(trace)
    assert seq[:2] == [FsmState.IDLE, FsmState.OP]
    assert seq[-2:] == [FsmState.DONE_ALL, FsmState.IDLE]
    middle = seq[1:-2]
    assert middle == [FsmState.OP, FsmState.DONE_IT] * 40 + [FsmState.OP]
    for ev in trace:
        if ev.fsm is FsmState.IDLE:
            assert ev.counter == 0 and ev.ready == 0 and ev.x_reg == cfg.params.x0


def test_cycle_count():
    # idle, then per iteration `latency` op cycles + 1 done_it, then op, done_all, idle
    _, trace = run_sim(config(it_max=10, latency=4))
    assert len(trace) == 1 + 10 * 5 + 3


def test_x_reg_loads_on_done_it():
    _, trace = run_sim(config(it_max=2, latency=2))
    loads = [ev for ev in trace if ev.fsm is FsmState.DONE_IT]
    assert [ev.x_reg.raw for ev in loads] == [23591, run_orbit(DEFAULT.with_mode(T)).raws[2]]
    assert [ev.counter for ev in loads] == [1, 2]


def test_random_configs_refine():
    rng = random.Random(11)
    for _ in range(30):
        params = MapParams(
            Fix32(rng.randint(1, 0x40000)), Fix32(rng.randint(0, 0x10000)), rng.choice([T, C]), 0
        )
        it_max = rng.randint(0, 300)
        orbit, trace = run_sim(SimConfig(params, it_max, rng.randint(1, 6)))
        assert orbit.records == run_orbit(replace(params, n_iter=it_max)).records
        assert all(ev.counter <= COUNTER_MAX for ev in trace)
