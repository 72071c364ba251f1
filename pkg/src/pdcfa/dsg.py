"""Dyck state graph construction.

Three independent routes compute the same graph:

* ``worklist_fixpoint`` -- incremental saturation driven by work-graphs and
  an ε-closure graph (ECG) whose edges record no-net-stack-change paths;
* ``naive_fixpoint`` -- monotone frontier iteration that recomputes the ECG
  from scratch every round to decide which frames may be on top;
* ``enumeration_oracle`` -- breadth-first search over full pushdown
  configurations, bounded by stack depth and configuration count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple

from .errors import LimitExceeded, UnknownState
from .pushdown import RPDS, ControlState, Eps, PdsConfig, Pop, Push, apply_action


@dataclass(frozen=True)
class DSG:
    root: ControlState
    nodes: frozenset
    edges: frozenset  # of (q, action, q')

    def out_edges(self):
        out: dict = {}
        for e in self.edges:
            out.setdefault(e[0], []).append(e)
        return out


@dataclass(frozen=True)
class ECG:
    nodes: frozenset
    h_edges: frozenset  # of (q, q')


@dataclass(frozen=True)
class Limits:
    max_nodes: int = 200_000
    max_edges: int = 2_000_000


@dataclass
class Stats:
    iterations: int = 0
    nodes: int = 0
    edges: int = 0
    h_edges: int = 0


class DsgResult(NamedTuple):
    dsg: DSG
    ecg: ECG
    stats: Stats


def eps_descendants(ecg: ECG, q) -> set:
    if q not in ecg.nodes:
        raise UnknownState("state is not in the ε-closure graph")
    return {b for a, b in ecg.h_edges if a == q} | {q}


def eps_ancestors(ecg: ECG, q) -> set:
    if q not in ecg.nodes:
        raise UnknownState("state is not in the ε-closure graph")
    return {a for a, b in ecg.h_edges if b == q} | {q}


class Graphs:
    """Mutable DSG + ECG pair with the indexes the consequence rules need.

    Ancestor/descendant queries are reflexive even before a state's self
    loop has been inserted.
    """

    def __init__(self, root: ControlState):
        self.root = root
        self.states: set = set()
        self.edges: set = set()
        self.h: set = set()
        self.hsucc: dict = {}
        self.hpred: dict = {}
        self.push_into: dict = {}  # q' -> {(q, frame)} for q --frame+--> q'

    @classmethod
    def from_parts(cls, dsg: DSG, ecg: ECG) -> "Graphs":
        g = cls(dsg.root)
        for q in dsg.nodes:
            g.add_state(q)
        for e in dsg.edges:
            g.add_edge(e)
        for h in ecg.h_edges:
            g.add_h(h)
        return g

    def add_state(self, q) -> None:
        self.states.add(q)

    def add_edge(self, e) -> None:
        self.edges.add(e)
        q, act, q2 = e
        if isinstance(act, Push):
            self.push_into.setdefault(q2, set()).add((q, act.frame))

    def add_h(self, h) -> None:
        self.h.add(h)
        a, b = h
        self.hsucc.setdefault(a, set()).add(b)
        self.hpred.setdefault(b, set()).add(a)

    def desc(self, q) -> set:
        return self.hsucc.get(q, set()) | {q}

    def anc(self, q) -> set:
        return self.hpred.get(q, set()) | {q}

    def snapshot(self) -> tuple[DSG, ECG]:
        return (DSG(self.root, frozenset(self.states), frozenset(self.edges)),
                ECG(frozenset(self.states), frozenset(self.h)))


# ---------------------------------------------------------------------------
# consequence rules


def sprout(rpds: RPDS, q) -> tuple[set, set]:
    """Stack-independent (ε and push) edges of a newly added state."""
    d_e, d_h = set(), set()
    for act, q2 in rpds.successors(q):
        d_e.add((q, act, q2))
        if isinstance(act, Eps):
            d_h.add((q, q2))
    return d_e, d_h


def add_push(rpds: RPDS, g: Graphs, edge) -> tuple[set, set]:
    """Pops of the pushed frame from states ε-reachable after the push."""
    q, act, q1 = edge
    frame = act.frame
    d_e, d_h = set(), set()
    for q2 in g.desc(q1):
        for q3 in rpds.pop_successors(q2, frame):
            d_e.add((q2, Pop(frame), q3))
            d_h.add((q, q3))
    return d_e, d_h


def add_pop(rpds: RPDS, g: Graphs, edge) -> tuple[set, set]:
    """Summary edges from every matching push upstream of a new pop."""
    q2, act, q3 = edge
    d_h = set()
    for q1 in g.anc(q2):
        for q, frame in g.push_into.get(q1, ()):
            if frame == act.frame:
                d_h.add((q, q3))
    return set(), d_h


def add_empty(rpds: RPDS, g: Graphs, h_edge) -> tuple[set, set]:
    """Pops enabled by a new ε-closure edge, plus its transitive stitches."""
    a, b = h_edge
    d_e, d_h = set(), set()
    ancestors = g.anc(a)
    descendants = g.desc(b)
    for q1 in ancestors:
        d_h.add((q1, b))
        for q4 in descendants:
            d_h.add((q1, q4))
        for q, frame in g.push_into.get(q1, ()):
            for q4 in descendants:
                for q5 in rpds.pop_successors(q4, frame):
                    d_e.add((q4, Pop(frame), q5))
                    d_h.add((q, q5))
    for q4 in descendants:
        d_h.add((a, q4))
    return d_e, d_h


# ---------------------------------------------------------------------------
# worklist driver


def _take(pending: dict, rng: random.Random | None) -> list:
    items = list(pending)
    if rng is None:
        chosen = items
    else:
        chosen = [x for x in items if rng.random() < 0.5]
        rng.shuffle(chosen)
    for x in chosen:
        del pending[x]
    return chosen


def worklist_fixpoint(rpds: RPDS, limits: Limits = Limits(),
                      rng: random.Random | None = None) -> DsgResult:
    """Saturate the DSG and ECG from the root state.

    Each iteration inserts a batch of pending states/edges/ε-closure edges
    and derives their consequences against the updated graphs; new work is
    de-duplicated against both the graphs and the pending sets.  By default
    a batch is everything pending, in FIFO order.  With ``rng`` a random
    subset is taken each round (in random order), which exercises other
    admissible processing orders.
    """
    g = Graphs(rpds.root)
    pend_s: dict = {rpds.root: None}
    pend_e: dict = {}
    pend_h: dict = {}
    stats = Stats()

    while pend_s or pend_e or pend_h:
        stats.iterations += 1
        if rng is not None:
            batch_s, batch_e, batch_h = _take(pend_s, rng), _take(pend_e, rng), _take(pend_h, rng)
            if not (batch_s or batch_e or batch_h):
                continue
        else:
            batch_s, batch_e, batch_h = _take(pend_s, None), _take(pend_e, None), _take(pend_h, None)

        for q in batch_s:
            g.add_state(q)
        for e in batch_e:
            g.add_edge(e)
        for h in batch_h:
            g.add_h(h)

        new_e: set = set()
        new_h: set = set()
        for q in batch_s:
            de, dh = sprout(rpds, q)
            new_e |= de
            new_h |= dh
            new_h.add((q, q))
        for e in batch_e:
            act = e[1]
            if isinstance(act, Push):
                de, dh = add_push(rpds, g, e)
            elif isinstance(act, Pop):
                de, dh = add_pop(rpds, g, e)
            else:
                de, dh = add_empty(rpds, g, (e[0], e[2]))
            new_e |= de
            new_h |= dh
        for h in batch_h:
            de, dh = add_empty(rpds, g, h)
            new_e |= de
            new_h |= dh

        for e in new_e:
            if e not in g.edges and e not in pend_e:
                pend_e[e] = None
            tgt = e[2]
            if tgt not in g.states and tgt not in pend_s:
                pend_s[tgt] = None
        for h in new_h:
            if h not in g.h and h not in pend_h:
                pend_h[h] = None

        if len(g.states) > limits.max_nodes or len(g.edges) > limits.max_edges:
            raise LimitExceeded(
                f"DSG exceeded limits ({len(g.states)} nodes, {len(g.edges)} edges)",
                partial=g.snapshot())

    dsg, ecg = g.snapshot()
    stats.nodes, stats.edges, stats.h_edges = len(dsg.nodes), len(dsg.edges), len(ecg.h_edges)
    return DsgResult(dsg, ecg, stats)


# ---------------------------------------------------------------------------
# naive fixpoint


def eps_closure(states, edges) -> set:
    """No-net-stack-change reachability over a fixed edge set."""
    pushes_into: dict = {}
    pops_from: dict = {}
    for q, act, q2 in edges:
        if isinstance(act, Push):
            pushes_into.setdefault(q2, []).append((q, act.frame))
        elif isinstance(act, Pop):
            pops_from.setdefault(q, []).append((act.frame, q2))

    h: set = set()
    succ: dict = {}
    pred: dict = {}
    work = [(q, q) for q in states]
    work += [(q, q2) for q, act, q2 in edges if isinstance(act, Eps)]
    while work:
        a, b = work.pop()
        if (a, b) in h:
            continue
        h.add((a, b))
        succ.setdefault(a, set()).add(b)
        pred.setdefault(b, set()).add(a)
        for c in list(succ.get(b, ())):
            work.append((a, c))
        for z in list(pred.get(a, ())):
            work.append((z, b))
        for p, frame in pushes_into.get(a, ()):
            for f2, r in pops_from.get(b, ()):
                if f2 == frame:
                    work.append((p, r))
    return h


def naive_fixpoint(rpds: RPDS, limits: Limits = Limits()) -> DsgResult:
    """Frontier iteration; each round re-derives which frames can be on top."""
    states = {rpds.root}
    edges: set = set()
    stats = Stats()
    while True:
        stats.iterations += 1
        h = eps_closure(states, edges)
        hsucc: dict = {}
        for a, b in h:
            hsucc.setdefault(a, []).append(b)
        tops: dict = {}
        for q, act, q1 in edges:
            if isinstance(act, Push):
                for b in hsucc.get(q1, ()):
                    tops.setdefault(b, set()).add(act.frame)
        new_edges = set(edges)
        for q in states:
            for act, q2 in rpds.successors(q):
                new_edges.add((q, act, q2))
            for frame in tops.get(q, ()):
                for q2 in rpds.pop_successors(q, frame):
                    new_edges.add((q, Pop(frame), q2))
        new_states = states | {e[2] for e in new_edges} | {rpds.root}
        if len(new_states) > limits.max_nodes or len(new_edges) > limits.max_edges:
            raise LimitExceeded("DSG exceeded limits", partial=(new_states, new_edges))
        if new_states == states and new_edges == edges:
            break
        states, edges = new_states, new_edges
    h = eps_closure(states, edges)
    dsg = DSG(rpds.root, frozenset(states), frozenset(edges))
    ecg = ECG(frozenset(states), frozenset(h))
    stats.nodes, stats.edges, stats.h_edges = len(states), len(edges), len(h)
    return DsgResult(dsg, ecg, stats)


# ---------------------------------------------------------------------------
# enumeration oracle


class Inconclusive:
    """Returned by the oracle when its limits cut the search short."""

    def __repr__(self):
        return "Inconclusive"


INCONCLUSIVE = Inconclusive()


@dataclass(frozen=True)
class OracleResult:
    nodes: frozenset
    edges: frozenset


def enumeration_oracle(rpds: RPDS, max_configs: int = 50_000, max_depth: int = 64):
    """Breadth-first enumeration of full (state, stack) configurations."""
    start = PdsConfig(rpds.root, ())
    seen = {start}
    frontier = [start]
    edges = set()
    while frontier:
        nxt = []
        for cfg in frontier:
            for act, q2 in rpds.edges_from(cfg):
                cfg2 = apply_action(cfg, act, q2)
                if cfg2 is None:
                    continue
                if len(cfg2.stack) > max_depth:
                    return INCONCLUSIVE
                edges.add((cfg.state, act, q2))
                if cfg2 not in seen:
                    seen.add(cfg2)
                    if len(seen) > max_configs:
                        return INCONCLUSIVE
                    nxt.append(cfg2)
        frontier = nxt
    return OracleResult(frozenset(c.state for c in seen), frozenset(edges))
