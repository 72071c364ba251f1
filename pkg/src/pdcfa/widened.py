"""Store-widened pushdown analysis over partial states.

One global store replaces the per-state stores, and the continuation is
encoded as paths in a frame-labeled graph over (expression, environment)
pairs.  Pop edges are only generated for a state that some push reaches
through the ε-closure relation.  Under 0CFA this runs in polynomial time and
the number of iterations is bounded by :func:`iteration_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstract import (AllocPolicy, ainject, pop_return, push_call, store_join,
                       tail_call)
from .errors import LimitExceeded
from .fmap import EMPTY, FMap
from .pushdown import EPS, Eps, Pop, Push
from .syntax import Call, Expr, LetCall, ProgramIndex, Return


@dataclass(frozen=True)
class PState:
    expr: Expr
    env: FMap
    ctx: tuple = ()


@dataclass(frozen=True)
class DSCFG:
    root: PState
    p_nodes: frozenset
    p_edges: frozenset  # (PState, action, PState)


@dataclass(frozen=True)
class WidenedSystem:
    root: PState
    p_nodes: frozenset
    p_edges: frozenset
    h: frozenset  # ε-closure pairs over PState
    store: FMap

    @property
    def dscfg(self) -> DSCFG:
        return DSCFG(self.root, self.p_nodes, self.p_edges)


def factored_step(policy: AllocPolicy, p: PState, store: FMap, act) -> set:
    """Successor partial states (with post-stores) under one stack action.

    For ``Push``/``Pop`` the action's frame must match the frame the
    transition pushes or pops.
    """
    e = p.expr
    if isinstance(act, Eps):
        if not isinstance(e, Call):
            return set()
        return {(PState(x, r, k), s) for x, r, s, k in tail_call(policy, e, p.env, store, p.ctx)}
    if isinstance(act, Push):
        if not isinstance(e, LetCall):
            return set()
        frame, (x, r, s, k) = push_call(e, p.env, store, p.ctx)
        return {(PState(x, r, k), s)} if frame == act.frame else set()
    if not isinstance(e, Return):
        return set()
    nxt = pop_return(policy, e, p.env, store, p.ctx, act.frame)
    if nxt is None:
        return set()
    x, r, s, k = nxt
    return {(PState(x, r, k), s)}


def initial_system(e: Expr) -> WidenedSystem:
    c = ainject(e)
    p0 = PState(c.expr, c.env, c.ctx)
    return WidenedSystem(p0, frozenset({p0}), frozenset(), frozenset({(p0, p0)}), EMPTY)


def widened_iterate(policy: AllocPolicy, s: WidenedSystem) -> WidenedSystem:
    store = s.store
    produced = []  # (edge, post-store)

    for p in s.p_nodes:
        e = p.expr
        if isinstance(e, Call):
            for x, r, s2, k in tail_call(policy, e, p.env, store, p.ctx):
                produced.append(((p, EPS, PState(x, r, k)), s2))
        elif isinstance(e, LetCall):
            frame, (x, r, s2, k) = push_call(e, p.env, store, p.ctx)
            produced.append(((p, Push(frame), PState(x, r, k)), s2))

    hsucc: dict = {}
    for a, b in s.h:
        hsucc.setdefault(a, set()).add(b)
    for p, act, p1 in s.p_edges:
        if not isinstance(act, Push):
            continue
        for p2 in hsucc.get(p1, ()):
            if not isinstance(p2.expr, Return):
                continue
            nxt = pop_return(policy, p2.expr, p2.env, store, p2.ctx, act.frame)
            if nxt is not None:
                x, r, s2, k = nxt
                produced.append(((p2, Pop(act.frame), PState(x, r, k)), s2))

    edges = set(s.p_edges)
    new_store = store
    for edge, s2 in produced:
        edges.add(edge)
        new_store = store_join(new_store, s2)
    nodes = set(s.p_nodes) | {e[2] for e in edges}

    h = set(s.h)
    h |= {(p, p) for p in nodes}
    h |= {(a, b) for a, act, b in edges if isinstance(act, Eps)}
    for a, b in s.h:
        for c in hsucc.get(b, ()):
            h.add((a, c))
    pops_from: dict = {}
    for a, act, b in edges:
        if isinstance(act, Pop):
            pops_from.setdefault(a, []).append((act.frame, b))
    for p, act, p1 in edges:
        if isinstance(act, Push):
            for p2 in hsucc.get(p1, {p1}) | {p1}:
                for frame, p3 in pops_from.get(p2, ()):
                    if frame == act.frame:
                        h.add((p, p3))

    return WidenedSystem(s.root, frozenset(nodes), frozenset(edges), frozenset(h), new_store)


def widened_analyze(policy: AllocPolicy, e: Expr, max_iterations: int = 1_000_000):
    """Iterate to the least fixpoint; returns (system, applications performed).

    The count includes the final application that confirmed the fixpoint.
    """
    s = initial_system(e)
    n = 0
    while n < max_iterations:
        n += 1
        s2 = widened_iterate(policy, s)
        if s2 == s:
            return s, n
        s = s2
    raise LimitExceeded(f"no fixpoint after {max_iterations} iterations", s)


def iteration_bound(e: Expr) -> int:
    """|Exp| * (2|Var| + 1) * |Exp| + |Var| * |Lam| for program ``e``."""
    idx = ProgramIndex.of(e)
    n_exp = len(idx.exprs)
    n_var = len({v.name for v in idx.vars})
    n_lam = len(idx.lams)
    return n_exp * (2 * n_var + 1) * n_exp + n_var * n_lam
