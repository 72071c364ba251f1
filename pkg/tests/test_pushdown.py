from conftest import lam_named, prog, unwidened
from pdcfa import corpus
from pdcfa.abstract import AClo, AConf, AFrame, Mono, ZeroCFA, astep
from pdcfa.fmap import EMPTY, FMap
from pdcfa.pushdown import (EPS, ControlState, PdsConfig, Pop, Push, apply_action,
                            pop_successors, to_rpds)
from pdcfa.syntax import LetCall, Return

P_TAIL = corpus.load("P_TAIL")


def test_root_successors_of_p_tail():
    rpds = to_rpds(ZeroCFA(), P_TAIL)
    x = P_TAIL.fun.param
    q1 = ControlState(P_TAIL.fun.body, FMap({x: Mono(x)}),
                      FMap({Mono(x): frozenset({AClo(lam_named(P_TAIL, "y"), EMPTY)})}))
    assert rpds.root == ControlState(P_TAIL, EMPTY, EMPTY)
    assert rpds.successors(rpds.root) == {(EPS, q1)}
    assert rpds.successors(q1) == frozenset()


def test_let_state_has_exactly_one_push():
    e = corpus.load("P_ID")
    rpds = to_rpds(ZeroCFA(), e)
    lets = [q for q in unwidened("P_ID").nodes if isinstance(q.expr, LetCall)]
    assert lets
    for q in lets:
        (act, q2), = rpds.successors(q)
        assert isinstance(act, Push)
        assert act.frame == AFrame(q.expr.var, q.expr.body, q.env)
        assert q2.expr is q.expr.call


def test_pop_successors_of_return():
    e = prog("((λ (f) (let ((a (f (λ (p) p)))) a)) (λ (x) x))")
    let = e.fun.body
    plam = lam_named(e, "p")
    rpds = to_rpds(ZeroCFA(), e)
    f = e.fun.param
    rho = FMap({f: Mono(f)})
    frame = AFrame(let.var, let.body, rho)
    ret = Return(let.call.arg, 999)  # returns the λp literal
    rho_q = FMap({f: Mono(f)})
    sigma = FMap({Mono(f): frozenset({AClo(lam_named(e, "x"), EMPTY)})})
    q = ControlState(ret, rho_q, sigma)
    a = let.var
    expected = ControlState(let.body, rho.set(a, Mono(a)),
                            sigma.set(Mono(a), frozenset({AClo(plam, rho_q)})))
    assert pop_successors(rpds, q, frame) == {expected}


def test_pop_successors_empty_cases():
    rpds = to_rpds(ZeroCFA(), P_TAIL)
    frame = AFrame(P_TAIL.fun.param, P_TAIL.fun.body, EMPTY)
    assert rpds.pop_successors(rpds.root, frame) == frozenset()
    dead = ControlState(P_TAIL.fun.body, EMPTY, EMPTY)  # x unbound: no value
    assert rpds.pop_successors(dead, frame) == frozenset()


def test_apply_action():
    q = ControlState(P_TAIL, EMPTY, EMPTY)
    q2 = ControlState(P_TAIL.fun.body, EMPTY, EMPTY)
    phi = AFrame(P_TAIL.fun.param, P_TAIL.fun.body, EMPTY)
    psi = AFrame(P_TAIL.arg.param, P_TAIL.arg.body, EMPTY)
    assert apply_action(PdsConfig(q, (phi,)), Pop(phi), q2) == PdsConfig(q2, ())
    assert apply_action(PdsConfig(q, ()), Pop(phi), q2) is None
    assert apply_action(PdsConfig(q, (psi,)), Pop(phi), q2) is None
    assert apply_action(PdsConfig(q, (psi,)), Push(phi), q2) == PdsConfig(q2, (phi, psi))
    assert apply_action(PdsConfig(q, (psi,)), EPS, q2) == PdsConfig(q2, (psi,))


def _frames(r):
    return {act.frame for _, act, _ in r.edges if isinstance(act, Push)}


def test_rpds_agrees_with_astep(corpus_programs):
    """Eps/push successors ignore the stack; pops match astep with the frame on top."""
    for name in ("P_ID", "P_GROW", "P_ESCAPE", "P_NEST", "RAND_2"):
        e = corpus_programs[name]
        r = unwidened(name)
        rpds = to_rpds(ZeroCFA(), e)
        frames = sorted(_frames(r), key=lambda f: f.expr.label)[:3]
        for q in r.nodes:
            for kont in [()] + [(f,) for f in frames]:
                conf = q.with_kont(kont)
                direct = astep(ZeroCFA(), conf)
                if isinstance(q.expr, Return):
                    via = {s.with_kont(kont[1:]) for s in
                           (rpds.pop_successors(q, kont[0]) if kont else ())}
                else:
                    via = set()
                    for act, s in rpds.successors(q):
                        k2 = (act.frame,) + kont if isinstance(act, Push) else kont
                        via.add(s.with_kont(k2))
                assert via == direct, name


def test_successors_are_deterministic():
    r = unwidened("P_ID")
    rpds1, rpds2 = to_rpds(ZeroCFA(), r.program), to_rpds(ZeroCFA(), r.program)
    for q in r.nodes:
        assert rpds1.successors(q) == rpds2.successors(q) == rpds1.successors(q)


def test_control_state_round_trips_through_aconf():
    c = AConf(P_TAIL, EMPTY, EMPTY, (), (3,))
    q = ControlState.of(c)
    assert q.with_kont(()) == c
    assert q.ctx == (3,)
