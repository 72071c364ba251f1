"""Test corpus: hand-written programs plus seeded random closed ANF programs."""

from __future__ import annotations

import random
from importlib import resources

from .syntax import Expr, parse, unique_binders

NAMED = {
    "P_TAIL": "p_tail.anf",
    "P_ID": "p_id.anf",
    "P_OMEGA": "p_omega.anf",
    "P_GROW": "p_grow.anf",
    "P_ESCAPE": "p_escape.anf",
    "P_NEST": "p_nest.anf",
}

# Program used for the stack-safe escape verdict: the closure is only ever
# the operator of the call that creates it.
P_SAFE = "((λ (x) x) (λ (y) y))"

RANDOM_SEED = 20110613
RANDOM_COUNT = 10


def source(name: str) -> str:
    return resources.files("pdcfa.programs").joinpath(NAMED[name]).read_text(encoding="utf-8")


def load(name: str) -> Expr:
    return unique_binders(parse(source(name)))


def random_program(rng: random.Random, depth: int = 4) -> str:
    """A closed ANF program ``((λ (v0) body) λ)``.

    Binder names are fresh (v0, v1, ...), so the result is already unique.
    """
    counter = iter(range(10_000))

    def fresh() -> str:
        return f"v{next(counter)}"

    def atom(scope: list, d: int) -> str:
        if scope and (d <= 0 or rng.random() < 0.6):
            return rng.choice(scope)
        v = fresh()
        return f"(λ ({v}) {expr(scope + [v], d - 1)})"

    def call(scope: list, d: int) -> str:
        return f"({atom(scope, d)} {atom(scope, d)})"

    def expr(scope: list, d: int) -> str:
        r = rng.random()
        if d <= 0 or r < 0.15:
            return atom(scope, d)
        if r < 0.45:
            return call(scope, d)
        v = fresh()
        bound = call(scope, d - 1)
        return f"(let (({v} {bound})) {expr(scope + [v], d - 1)})"

    f = fresh()
    body = expr([f], depth)
    return f"((λ ({f}) {body}) {atom([], depth - 1)})"


def _interesting(text: str, must_halt: bool) -> bool:
    from .concrete import Status, run

    trace = run(parse(text), 200)
    if must_halt and trace.status is not Status.FINAL:
        return False
    return trace.steps >= 4 and any(c.kont for c in trace.confs)


def random_sources(seed: int = RANDOM_SEED, count: int = RANDOM_COUNT) -> list[str]:
    rng = random.Random(seed)
    out: list[str] = []
    while len(out) < count:
        text = random_program(rng)
        # alternate terminating and unrestricted programs
        if _interesting(text, must_halt=len(out) % 2 == 0):
            out.append(text)
    return out


def all_programs(seed: int = RANDOM_SEED, count: int = RANDOM_COUNT) -> dict[str, Expr]:
    """Named programs followed by ``RAND_<i>`` random ones."""
    progs = {name: load(name) for name in NAMED}
    for i, text in enumerate(random_sources(seed, count)):
        progs[f"RAND_{i}"] = unique_binders(parse(text))
    return progs
