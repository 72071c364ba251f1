import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcfa.corpus import random_program
from pdcfa.errors import NotANF, SExprError
from pdcfa.syntax import (Call, Lam, LetCall, Return, Var, VarRef, binders, free_vars,
                          parse, same_tree, strip_renames, to_text, unique_binders, walk)


def test_parse_tail_call_of_two_lambdas():
    e = parse("((λ (x) x) (λ (y) y))")
    assert isinstance(e, Call)
    assert isinstance(e.fun, Lam) and isinstance(e.arg, Lam)
    assert e.fun.param.name == "x" and e.arg.param.name == "y"


def test_parse_bare_identifier_is_return_of_free_var():
    e = parse("x")
    assert isinstance(e, Return) and isinstance(e.atom, VarRef)
    assert free_vars(e) == {Var("x")}
    assert e.atom.var.binder is None


def test_parse_let_call():
    e = parse("(let ((a ((λ (x) x) (λ (y) y)))) a)")
    assert isinstance(e, LetCall)
    assert e.var.name == "a"
    assert isinstance(e.call, Call)
    assert isinstance(e.body, Return)


def test_let_binding_an_atom_is_not_anf():
    with pytest.raises(NotANF):
        parse("(let ((a (λ (x) x))) a)")


@pytest.mark.parametrize("text", [
    "(f (g h))",          # nested non-atomic operand
    "(f a b)",            # two arguments
    "(λ (x y) x)",        # two parameters
    "()",
    "(let ((a (f b)) (c (f b))) a)",  # multi-binding let
    "(λ (let) let)",
])
def test_rejects_non_anf(text):
    with pytest.raises(NotANF):
        parse(text)


@pytest.mark.parametrize("text,line,col", [
    ("((λ (x) x)", 1, 1),
    ("(f a))", 1, 6),
    ("", None, None),
    ("x\n  y", 2, 3),
])
def test_malformed_sexpr_reports_position(text, line, col):
    with pytest.raises(SExprError) as info:
        parse(text)
    assert not isinstance(info.value, NotANF)
    assert (info.value.line, info.value.col) == (line, col)


def test_lambda_keyword_synonym():
    a = parse("((lambda (x) x) (λ (y) y))")
    b = parse("((λ (x) x) (λ (y) y))")
    assert same_tree(a, b)


def test_comments_are_ignored():
    e = parse("; identity applied\n((λ (x) x) ; op\n (λ (y) y))")
    assert same_tree(e, parse("((λ (x) x) (λ (y) y))"))


def test_labels_are_preorder_from_zero_and_distinct():
    e = parse("((λ (id) (let ((a (id (λ (p) p)))) a)) (λ (x) x))")
    labels = [n.label for n in walk(e)]
    assert labels == list(range(len(labels)))
    # the let precedes its call
    let = next(n for n in walk(e) if isinstance(n, LetCall))
    assert let.call.label == let.label + 1


def test_labels_stable_across_traversals():
    e = parse("((λ (f) (f f)) (λ (g) (g g)))")
    assert [n.label for n in walk(e)] == [n.label for n in walk(e)]


def test_binder_labels_point_at_binding_node():
    e = parse("((λ (x) (let ((r (x x))) r)) (λ (y) y))")
    lam = e.fun
    assert lam.param.binder == lam.label
    let = lam.body
    assert let.var.binder == let.label
    assert let.body.atom.var.binder == let.label
    assert let.call.fun.var.binder == lam.label


def test_unique_binders_renames_duplicates_by_visit_index():
    e = unique_binders(parse("((λ (x) x) (λ (x) x))"))
    assert to_text(e) == "((λ (x#0) x#0) (λ (x#1) x#1))"


def test_unique_binders_leaves_unique_program_unchanged():
    e = parse("((λ (x) x) (λ (y) y))")
    assert same_tree(unique_binders(e), e)


def test_unique_binders_keeps_free_vars():
    e = unique_binders(parse("(let ((a (f g))) a)"))
    assert {v.name for v in free_vars(e)} == {"f", "g"}
    assert [v.name for v in binders(e)] == ["a"]


def test_unique_binders_scoping_is_respected():
    e = unique_binders(parse("((λ (f) (let ((f (f f))) f)) (λ (f) f))"))
    assert to_text(e) == "((λ (f#0) (let ((f#1 (f#0 f#0))) f#1)) (λ (f#2) f#2))"


@pytest.mark.parametrize("text,free", [
    ("x", {"x"}),
    ("(λ (x) x)", set()),
    ("((λ (x) y) z)", {"y", "z"}),
    ("(let ((a (f a))) a)", {"f", "a"}),
])
def test_free_vars(text, free):
    assert {v.name for v in free_vars(parse(text))} == free


def test_printer_round_trip_on_corpus(corpus_programs):
    for e in corpus_programs.values():
        assert same_tree(parse(to_text(e)), e)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=5))
def test_round_trip_and_uniquing_on_random_programs(seed, depth):
    text = random_program(random.Random(seed), depth)
    e = parse(text)
    assert same_tree(parse(to_text(e)), e)

    # fold names onto two stems so binders collide (scoping may change, which is fine)
    clash = parse(re.sub(r"v(\d+)", lambda m: f"v{int(m.group(1)) % 2}", text))
    u = unique_binders(clash)
    names = [v.name for v in binders(u)]
    assert len(names) == len(set(names))
    assert free_vars(u) == free_vars(clash)
    assert same_tree(strip_renames(u), strip_renames(clash))
    assert same_tree(parse(to_text(u)), u)
