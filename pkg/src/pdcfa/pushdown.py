"""Stack actions, rooted pushdown systems, and the CESK-to-RPDS conversion.

The RPDS is intensional: ε and push successors come from ``successors`` and
pop successors from ``pop_successors(q, frame)``, which answers "which
states follow q if ``frame`` is on top of the stack".  The transition
relation itself is never enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstract import (AConf, AFrame, AllocPolicy, ainject, pop_return, push_call,
                       tail_call)
from .fmap import FMap
from .syntax import Call, Expr, LetCall, Return


@dataclass(frozen=True)
class Eps:
    def __str__(self):
        return "ε"


EPS = Eps()


@dataclass(frozen=True)
class Push:
    frame: AFrame

    def __str__(self):
        return f"+{self.frame.var.name}"


@dataclass(frozen=True)
class Pop:
    frame: AFrame

    def __str__(self):
        return f"-{self.frame.var.name}"


StackAction = Eps | Push | Pop


@dataclass(frozen=True)
class ControlState:
    """An abstract configuration with its continuation removed."""

    expr: Expr
    env: FMap
    store: FMap
    ctx: tuple = ()

    def with_kont(self, kont: tuple) -> AConf:
        return AConf(self.expr, self.env, self.store, kont, self.ctx)

    @classmethod
    def of(cls, c: AConf) -> "ControlState":
        return cls(c.expr, c.env, c.store, c.ctx)


@dataclass(frozen=True)
class PdsConfig:
    state: ControlState
    stack: tuple = ()


class RPDS:
    """Rooted pushdown system of the abstracted CESK machine for one program."""

    def __init__(self, policy: AllocPolicy, program: Expr):
        self.policy = policy
        self.program = program
        self.root = ControlState.of(ainject(program))
        self._succ: dict = {}
        self._pop: dict = {}

    def successors(self, q: ControlState) -> frozenset:
        """ε and push edges leaving ``q``, as (action, target) pairs."""
        hit = self._succ.get(q)
        if hit is not None:
            return hit
        e = q.expr
        if isinstance(e, Call):
            out = frozenset((EPS, ControlState(x, r, s, k))
                            for x, r, s, k in tail_call(self.policy, e, q.env, q.store, q.ctx))
        elif isinstance(e, LetCall):
            frame, nxt = push_call(e, q.env, q.store, q.ctx)
            out = frozenset({(Push(frame), ControlState(*nxt))})
        else:
            out = frozenset()
        self._succ[q] = out
        return out

    def pop_successors(self, q: ControlState, frame: AFrame) -> frozenset:
        """States reached by popping ``frame`` while in ``q``."""
        if not isinstance(q.expr, Return):
            return frozenset()
        key = (q, frame)
        hit = self._pop.get(key)
        if hit is not None:
            return hit
        nxt = pop_return(self.policy, q.expr, q.env, q.store, q.ctx, frame)
        out = frozenset() if nxt is None else frozenset({ControlState(*nxt)})
        self._pop[key] = out
        return out

    def edges_from(self, cfg: PdsConfig):
        """All (action, target-state) moves available in a full configuration."""
        out = set(self.successors(cfg.state))
        if cfg.stack:
            top = cfg.stack[0]
            out |= {(Pop(top), q2) for q2 in self.pop_successors(cfg.state, top)}
        return out


def to_rpds(policy: AllocPolicy, e: Expr) -> RPDS:
    return RPDS(policy, e)


def pop_successors(rpds: RPDS, q: ControlState, frame: AFrame) -> frozenset:
    return rpds.pop_successors(q, frame)


def apply_action(cfg: PdsConfig, act, target: ControlState) -> PdsConfig | None:
    if isinstance(act, Eps):
        return PdsConfig(target, cfg.stack)
    if isinstance(act, Push):
        return PdsConfig(target, (act.frame,) + cfg.stack)
    if cfg.stack and cfg.stack[0] == act.frame:
        return PdsConfig(target, cfg.stack[1:])
    return None
