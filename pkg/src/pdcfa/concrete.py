"""Concrete CESK machine for ANF; the ground truth the analyses are checked against."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import DanglingAddress, OpenProgram, PdcfaError, UnboundVariable
from .fmap import EMPTY, FMap
from .syntax import Atom, Call, Expr, Lam, LetCall, Return, Var, free_vars

Addr = int


@dataclass(frozen=True)
class Clo:
    lam: Lam
    env: FMap  # Var -> Addr


@dataclass(frozen=True)
class Frame:
    var: Var
    expr: Expr
    env: FMap


@dataclass(frozen=True)
class Conf:
    expr: Expr
    env: FMap
    store: FMap  # Addr -> Clo
    kont: tuple = ()  # of Frame, top first

    @property
    def is_final(self) -> bool:
        return isinstance(self.expr, Return) and not self.kont


class Status(str, Enum):
    FINAL = "Final"
    STEP_LIMIT = "StepLimit"


def inject(e: Expr) -> Conf:
    free = free_vars(e)
    if free:
        raise OpenProgram(free)
    return Conf(e, EMPTY, EMPTY, ())


def atomic_eval(a: Atom, env: FMap, store: FMap) -> Clo:
    if isinstance(a, Lam):
        return Clo(a, env)
    v = a.var
    if v not in env:
        raise UnboundVariable(f"unbound variable {v.name}")
    addr = env[v]
    if addr not in store:
        raise DanglingAddress(f"address {addr} (for {v.name}) is not in the store")
    return store[addr]


def alloc_concrete(v: Var, c: Conf) -> Addr:
    """Lowest unused address: one past the largest bound address, 0 if none."""
    return 1 + max(c.store) if len(c.store) else 0


def _bind(c: Conf, var: Var, value: Clo, env: FMap):
    addr = alloc_concrete(var, c)
    return env.set(var, addr), c.store.set(addr, value)


def step(c: Conf) -> Conf | None:
    """One transition; None for a final configuration."""
    e = c.expr
    if isinstance(e, Call):
        clo = atomic_eval(e.fun, c.env, c.store)
        arg = atomic_eval(e.arg, c.env, c.store)
        env2, store2 = _bind(c, clo.lam.param, arg, clo.env)
        return Conf(clo.lam.body, env2, store2, c.kont)
    if isinstance(e, LetCall):
        return Conf(e.call, c.env, c.store, (Frame(e.var, e.body, c.env),) + c.kont)
    if not c.kont:
        return None
    frame = c.kont[0]
    value = atomic_eval(e.atom, c.env, c.store)
    env2, store2 = _bind(c, frame.var, value, frame.env)
    return Conf(frame.expr, env2, store2, c.kont[1:])


@dataclass
class Trace:
    confs: list = field(default_factory=list)
    status: Status = Status.STEP_LIMIT

    @property
    def steps(self) -> int:
        return len(self.confs) - 1

    @property
    def result(self) -> Clo | None:
        """Final value when the run finished."""
        if self.status is not Status.FINAL:
            return None
        last = self.confs[-1]
        return atomic_eval(last.expr.atom, last.env, last.store)


def run(e: Expr, max_steps: int) -> Trace:
    """Step from ``inject(e)`` until final or ``max_steps`` transitions.

    Machine errors propagate with the partial trace attached as ``.trace``.
    """
    trace = Trace([inject(e)])
    c = trace.confs[0]
    for _ in range(max_steps):
        try:
            nxt = step(c)
        except PdcfaError as err:
            err.trace = trace
            raise
        if nxt is None:
            trace.status = Status.FINAL
            return trace
        trace.confs.append(nxt)
        c = nxt
    if c.is_final:
        trace.status = Status.FINAL
    return trace


def format_trace(trace: Trace) -> str:
    lines = [f"{i}  {c.expr.label}  {len(c.kont)}  {len(c.store)}"
             for i, c in enumerate(trace.confs)]
    return "\n".join(lines) + "\n"
