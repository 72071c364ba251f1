"""Queries over a converged analysis: flows, may-call, escape, live frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .abstract import AFrame, AllocPolicy, ZeroCFA, aatomic_eval
from .dsg import DSG, ECG, Limits, Stats, naive_fixpoint, worklist_fixpoint
from .errors import UnknownLabel, UnknownState, UnknownVariable
from .fmap import EMPTY
from .pushdown import RPDS, Pop, Push
from .syntax import Call, Expr, Lam, ProgramIndex, Return, Var
from .widened import WidenedSystem, iteration_bound, widened_analyze


class Escape(str, Enum):
    STACK_SAFE = "StackSafe"
    MAY_ESCAPE = "MayEscape"


@dataclass
class AnalysisResult:
    """Either an unwidened DSG/ECG pair (each node carries its own store)
    or a widened system with one global store."""

    policy: AllocPolicy
    program: Expr
    dsg: DSG | None = None
    ecg: ECG | None = None
    system: WidenedSystem | None = None
    stats: Stats = field(default_factory=Stats)
    index: ProgramIndex = field(init=False)

    def __post_init__(self):
        self.index = ProgramIndex.of(self.program)

    @property
    def widened(self) -> bool:
        return self.system is not None

    @property
    def nodes(self) -> frozenset:
        return self.system.p_nodes if self.widened else self.dsg.nodes

    @property
    def edges(self) -> frozenset:
        return self.system.p_edges if self.widened else self.dsg.edges

    @property
    def h_edges(self) -> frozenset:
        return self.system.h if self.widened else self.ecg.h_edges

    def store_at(self, q):
        return self.system.store if self.widened else q.store

    def stores(self):
        if self.widened:
            return [self.system.store]
        return [q.store for q in self.dsg.nodes]


def analyze_unwidened(policy: AllocPolicy, e: Expr, algorithm: str = "worklist",
                      limits: Limits = Limits()) -> AnalysisResult:
    rpds = RPDS(policy, e)
    if algorithm == "worklist":
        res = worklist_fixpoint(rpds, limits)
    elif algorithm == "naive":
        res = naive_fixpoint(rpds, limits)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return AnalysisResult(policy, e, dsg=res.dsg, ecg=res.ecg, stats=res.stats)


def analyze_widened(policy: AllocPolicy, e: Expr) -> AnalysisResult:
    system, n = widened_analyze(policy, e)
    stats = Stats(iterations=n, nodes=len(system.p_nodes), edges=len(system.p_edges),
                  h_edges=len(system.h))
    return AnalysisResult(policy, e, system=system, stats=stats)


def _lookup_var(r: AnalysisResult, v) -> Var:
    name = v.name if isinstance(v, Var) else v
    found = r.index.var(name)
    if found is None:
        raise UnknownVariable(f"no binder named {name!r} in the program")
    return found


def flow_set(r: AnalysisResult, v) -> frozenset:
    """Labels of the λ-terms that may be bound to variable ``v``."""
    var = _lookup_var(r, v)
    out = set()
    for store in r.stores():
        for addr, clos in store.items():
            if addr.var == var:
                out.update(c.lam.label for c in clos)
    return frozenset(out)


def all_flows(r: AnalysisResult) -> dict:
    return {v.name: sorted(flow_set(r, v)) for v in r.index.vars}


def _lam(r: AnalysisResult, label: int) -> Lam:
    node = r.index.by_label.get(label)
    if not isinstance(node, Lam):
        raise UnknownLabel(f"label {label} is not a lambda")
    return node


def _operator_lams(r: AnalysisResult, q) -> set:
    return {c.lam.label for c in aatomic_eval(q.expr.fun, q.env, r.store_at(q))}


def may_call(r: AnalysisResult, call_label: int, lam_label: int) -> bool:
    call = r.index.by_label.get(call_label)
    if not isinstance(call, Call):
        raise UnknownLabel(f"label {call_label} is not a call")
    _lam(r, lam_label)
    return any(q.expr is call and lam_label in _operator_lams(r, q) for q in r.nodes)


def _creates(q, lam: Lam) -> bool:
    e = q.expr
    if isinstance(e, Call):
        return e.fun is lam or e.arg is lam
    if isinstance(e, Return):
        return e.atom is lam
    return False


def escape_analysis(r: AnalysisResult, lam_label: int) -> Escape:
    """StackSafe when every invocation of a closure over the λ is reachable
    from a creation point over ε and push edges alone."""
    lam = _lam(r, lam_label)
    succ: dict = {}
    for q, act, q2 in r.edges:
        if not isinstance(act, Pop):
            succ.setdefault(q, []).append(q2)
    safe = {q for q in r.nodes if _creates(q, lam)}
    work = list(safe)
    while work:
        q = work.pop()
        for q2 in succ.get(q, ()):
            if q2 not in safe:
                safe.add(q2)
                work.append(q2)
    for q in r.nodes:
        if isinstance(q.expr, Call) and lam_label in _operator_lams(r, q) and q not in safe:
            return Escape.MAY_ESCAPE
    return Escape.STACK_SAFE


def all_escapes(r: AnalysisResult) -> dict:
    return {l.label: escape_analysis(r, l.label) for l in r.index.lams}


def dependence_frames(r: AnalysisResult, q) -> frozenset:
    """Frames that may be on the stack in ``q``: labels of pop edges reachable
    over ε and pop edges.  Under 0CFA frame environments are dropped."""
    if q not in r.nodes:
        raise UnknownState("state is not a node of the analysis graph")
    succ: dict = {}
    for a, act, b in r.edges:
        if not isinstance(act, Push):
            succ.setdefault(a, []).append((act, b))
    seen = {q}
    work = [q]
    frames = set()
    while work:
        a = work.pop()
        for act, b in succ.get(a, ()):
            if isinstance(act, Pop):
                f = act.frame
                if isinstance(r.policy, ZeroCFA):
                    f = AFrame(f.var, f.expr, EMPTY)
                frames.add(f)
            if b not in seen:
                seen.add(b)
                work.append(b)
    return frozenset(frames)


def report(r: AnalysisResult) -> dict:
    """The JSON flows/escape report."""
    return {
        "flows": all_flows(r),
        "escape": {str(k): v.value for k, v in sorted(all_escapes(r).items())},
    }


def stats_report(r: AnalysisResult) -> dict:
    return {
        "iterations": r.stats.iterations,
        "nodes": r.stats.nodes,
        "edges": r.stats.edges,
        "hEdges": r.stats.h_edges,
        "bound": iteration_bound(r.program),
    }
