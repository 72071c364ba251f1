"""Abstracted CESK machine: finite addresses, powerset store, exact stack.

The three transition rules are exposed individually (``tail_call``,
``push_call``, ``pop_return``) over a stack-less control
``(expr, env, store, ctx)`` so the pushdown and store-widened layers can
reuse them; ``astep`` assembles them into the full relation on ``AConf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import concrete
from .errors import OpenProgram, UncoveredAddress
from .fmap import EMPTY, FMap
from .syntax import Atom, Call, Expr, Lam, LetCall, Return, Var, free_vars

# ---------------------------------------------------------------------------
# addresses


@dataclass(frozen=True)
class Mono:
    var: Var

    def __str__(self):
        return self.var.name


@dataclass(frozen=True)
class Ctx1:
    var: Var
    label: int

    def __str__(self):
        return f"{self.var.name}@{self.label}"


@dataclass(frozen=True)
class CtxK:
    var: Var
    labels: tuple

    def __str__(self):
        return f"{self.var.name}@{'.'.join(map(str, self.labels))}"


@dataclass(frozen=True)
class Poly:
    var: Var

    def __str__(self):
        return self.var.name


@dataclass(frozen=True)
class PolyCtx:
    var: Var
    label: int

    def __str__(self):
        return f"{self.var.name}@{self.label}"


AAddr = Union[Mono, Ctx1, CtxK, Poly, PolyCtx]


def addr_key(a) -> tuple:
    """Total order on abstract addresses for canonical output."""
    tail = getattr(a, "labels", None)
    if tail is None:
        tail = (getattr(a, "label", -1),)
    return (a.var.name, type(a).__name__, tail)


# ---------------------------------------------------------------------------
# allocation policies


@dataclass(frozen=True)
class ZeroCFA:
    def __str__(self):
        return "0cfa"


@dataclass(frozen=True)
class OneCFA:
    def __str__(self):
        return "1cfa"


@dataclass(frozen=True)
class KCFA:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("KCFA needs k >= 1; use kcfa(0) for 0CFA")

    def __str__(self):
        return f"kcfa:{self.k}"


@dataclass(frozen=True)
class PolyCFA:
    let_bound: frozenset = frozenset()

    def __str__(self):
        return "polycfa"


AllocPolicy = Union[ZeroCFA, OneCFA, KCFA, PolyCFA]


def kcfa(k: int) -> AllocPolicy:
    return ZeroCFA() if k == 0 else KCFA(k)


def read_annotations(text: str) -> frozenset:
    """Parse ``letbound <label>`` lines into a set of λ labels."""
    labels = set()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] != "letbound" or not parts[1].isdigit():
            raise ValueError(f"annotation line {n}: expected 'letbound <label>', got {line!r}")
        labels.add(int(parts[1]))
    return frozenset(labels)


# ---------------------------------------------------------------------------
# configuration space


@dataclass(frozen=True)
class AClo:
    lam: Lam
    env: FMap  # Var -> AAddr


@dataclass(frozen=True)
class AFrame:
    var: Var
    expr: Expr
    env: FMap


@dataclass(frozen=True)
class AConf:
    expr: Expr
    env: FMap = EMPTY
    store: FMap = EMPTY  # AAddr -> frozenset[AClo], never empty sets
    kont: tuple = ()
    ctx: tuple = ()  # call-site labels, most recent first; k-CFA only


def ainject(e: Expr) -> AConf:
    free = free_vars(e)
    if free:
        raise OpenProgram(free)
    return AConf(e)


def aatomic_eval(a: Atom, env: FMap, store: FMap) -> frozenset:
    if isinstance(a, Lam):
        return frozenset({AClo(a, env)})
    addr = env.get(a.var)
    if addr is None:
        return frozenset()
    return store.get(addr, frozenset())


def aalloc(policy: AllocPolicy, v: Var, c: AConf, lam: Lam | None = None) -> AAddr:
    """Abstract address for binding ``v`` when leaving configuration ``c``.

    ``lam`` is the operator being applied (only PolyCFA looks at it).
    """
    if isinstance(policy, ZeroCFA):
        return Mono(v)
    if isinstance(policy, OneCFA):
        return Ctx1(v, c.expr.label)
    if isinstance(policy, KCFA):
        return CtxK(v, tuple(c.ctx[:policy.k]))
    if lam is not None and isinstance(c.expr, Call) and lam.label in policy.let_bound:
        return PolyCtx(v, c.expr.label)
    return Poly(v)


def store_join(s1: FMap, s2: FMap) -> FMap:
    if not len(s2):
        return s1
    if not len(s1):
        return s2
    d = dict(s1)
    changed = False
    for a, vals in s2.items():
        old = d.get(a)
        if old is None:
            d[a] = vals
            changed = True
        elif not vals <= old:
            d[a] = old | vals
            changed = True
    return FMap(d) if changed else s1


def store_extend(store: FMap, addr, values: frozenset) -> FMap:
    """``store ⊔ [addr ↦ values]``; empty value sets add nothing."""
    if not values:
        return store
    old = store.get(addr)
    if old is None:
        return store.set(addr, values)
    if values <= old:
        return store
    return store.set(addr, old | values)


# ---------------------------------------------------------------------------
# partial orders


def leq_env(r1: FMap, r2: FMap) -> bool:
    return all(v in r2 and r2[v] == a for v, a in r1.items())


def leq_clo(c1: AClo, c2: AClo) -> bool:
    return c1.lam is c2.lam and leq_env(c1.env, c2.env)


def leq_store(s1: FMap, s2: FMap) -> bool:
    for a, vals in s1.items():
        other = s2.get(a, frozenset())
        if not vals <= other:
            return False
    return True


def leq_frame(f1: AFrame, f2: AFrame) -> bool:
    return f1.var == f2.var and f1.expr is f2.expr and leq_env(f1.env, f2.env)


def leq_kont(k1: tuple, k2: tuple) -> bool:
    return len(k1) == len(k2) and all(leq_frame(a, b) for a, b in zip(k1, k2))


def leq_conf(c1: AConf, c2: AConf) -> bool:
    return (c1.expr is c2.expr and c1.ctx == c2.ctx and leq_env(c1.env, c2.env)
            and leq_store(c1.store, c2.store) and leq_kont(c1.kont, c2.kont))


# ---------------------------------------------------------------------------
# transition rules over stack-less controls


def extend_ctx(policy: AllocPolicy, ctx: tuple, label: int) -> tuple:
    if isinstance(policy, KCFA):
        return ((label,) + ctx)[:policy.k]
    return ctx


def tail_call(policy, expr: Call, env: FMap, store: FMap, ctx: tuple) -> list:
    """Tail-call rule: one successor per closure the operator may denote."""
    out = []
    arg = aatomic_eval(expr.arg, env, store)
    ctx2 = extend_ctx(policy, ctx, expr.label)
    here = AConf(expr, env, store, (), ctx2)
    for clo in sorted(aatomic_eval(expr.fun, env, store), key=_clo_sort_key):
        lam = clo.lam
        addr = aalloc(policy, lam.param, here, lam)
        out.append((lam.body, clo.env.set(lam.param, addr),
                    store_extend(store, addr, arg), ctx2))
    return out


def push_call(expr: LetCall, env: FMap, store: FMap, ctx: tuple):
    """Non-tail call: the frame to push and the control to continue with."""
    return AFrame(expr.var, expr.body, env), (expr.call, env, store, ctx)


def pop_return(policy, expr: Return, env: FMap, store: FMap, ctx: tuple, frame: AFrame):
    """Return rule against ``frame``; None when the atom has no value."""
    value = aatomic_eval(expr.atom, env, store)
    if not value:
        return None
    addr = aalloc(policy, frame.var, AConf(expr, env, store, (), ctx))
    return (frame.expr, frame.env.set(frame.var, addr),
            store_extend(store, addr, value), ctx)


def _clo_sort_key(c: AClo):
    return (c.lam.label, sorted((v.name, str(a)) for v, a in c.env.items()))


def astep(policy: AllocPolicy, c: AConf) -> set:
    e = c.expr
    if isinstance(e, Call):
        return {AConf(x, r, s, c.kont, k) for x, r, s, k in
                tail_call(policy, e, c.env, c.store, c.ctx)}
    if isinstance(e, LetCall):
        frame, (x, r, s, k) = push_call(e, c.env, c.store, c.ctx)
        return {AConf(x, r, s, (frame,) + c.kont, k)}
    if not c.kont:
        return set()
    nxt = pop_return(policy, e, c.env, c.store, c.ctx, c.kont[0])
    if nxt is None:
        return set()
    x, r, s, k = nxt
    return {AConf(x, r, s, c.kont[1:], k)}


# ---------------------------------------------------------------------------
# abstraction of concrete configurations


def _alpha_env(env: FMap, addr_map) -> FMap:
    try:
        return FMap((v, addr_map[a]) for v, a in env.items())
    except KeyError as err:
        raise UncoveredAddress(f"address {err.args[0]} has no abstract counterpart") from None


def _alpha_clo(c: concrete.Clo, addr_map) -> AClo:
    return AClo(c.lam, _alpha_env(c.env, addr_map))


def abstract_conf(policy: AllocPolicy, c: concrete.Conf, addr_map, ctx: tuple = ()) -> AConf:
    """Structural abstraction of a concrete configuration.

    ``addr_map`` sends concrete addresses to abstract ones; store entries
    sharing an abstract address are joined.
    """
    grouped: dict = {}
    for a, clo in c.store.items():
        if a not in addr_map:
            raise UncoveredAddress(f"address {a} has no abstract counterpart")
        grouped.setdefault(addr_map[a], set()).add(_alpha_clo(clo, addr_map))
    store = FMap((k, frozenset(v)) for k, v in grouped.items())
    kont = tuple(AFrame(f.var, f.expr, _alpha_env(f.env, addr_map)) for f in c.kont)
    return AConf(c.expr, _alpha_env(c.env, addr_map), store, kont, ctx)


def alpha_trace(policy: AllocPolicy, trace) -> list:
    """Abstract every configuration of a concrete trace.

    The address map is built by replaying allocation: whenever the concrete
    machine allocates at step i, the abstract allocator is consulted on the
    abstraction of configuration i.
    """
    addr_map: dict = {}
    ctx: tuple = ()
    out = []
    confs = trace.confs if hasattr(trace, "confs") else trace
    for i, c in enumerate(confs):
        ac = abstract_conf(policy, c, addr_map, ctx)
        out.append(ac)
        if i + 1 == len(confs):
            break
        nxt = confs[i + 1]
        new = set(nxt.store) - set(c.store)
        e = c.expr
        if isinstance(e, Call):
            lam = concrete.atomic_eval(e.fun, c.env, c.store).lam
            ctx = extend_ctx(policy, ctx, e.label)
            here = AConf(e, ac.env, ac.store, ac.kont, ctx)
            for a in new:
                addr_map[a] = aalloc(policy, lam.param, here, lam)
        elif isinstance(e, Return):
            for a in new:
                addr_map[a] = aalloc(policy, c.kont[0].var, ac)
    return out
