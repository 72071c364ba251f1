"""Labeled A-Normal Form syntax: parsing, printing, binder uniquing.

Surface syntax::

    e ::= (let ((v (f a))) e) | (f a) | a
    a ::= v | (λ (v) e)          ; ``lambda`` is accepted for ``λ``

Every expression node and every lambda carries an integer label assigned in
leftmost depth-first (pre-)order starting at 0.  Labeled nodes compare by
identity and hash by label, so within one program a node *is* its label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import NotANF, SExprError

LAMBDA_KEYWORDS = frozenset({"λ", "lambda"})
KEYWORDS = LAMBDA_KEYWORDS | {"let"}


@dataclass(frozen=True)
class Var:
    name: str
    # label of the binding λ or let; None for free occurrences
    binder: int | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.name


class _Labeled:
    __slots__ = ()

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash(self.label)


@dataclass(frozen=True, eq=False)
class Lam(_Labeled):
    param: Var
    body: "Expr"
    label: int


@dataclass(frozen=True)
class VarRef:
    var: Var


Atom = Union[VarRef, Lam]


@dataclass(frozen=True, eq=False)
class Call(_Labeled):
    """An application.  In expression position this is a tail call."""

    fun: Atom
    arg: Atom
    label: int


TailCall = Call


@dataclass(frozen=True, eq=False)
class LetCall(_Labeled):
    var: Var
    call: Call
    body: "Expr"
    label: int


@dataclass(frozen=True, eq=False)
class Return(_Labeled):
    atom: Atom
    label: int


Expr = Union[LetCall, Call, Return]


# ---------------------------------------------------------------------------
# s-expression reader

@dataclass
class _Sym:
    text: str
    line: int
    col: int


@dataclass
class _List:
    items: list
    line: int
    col: int


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def read_sexpr(text: str):
    stack: list[_List] = []
    result = None
    for tok, line, col in _tokenize(text):
        if result is not None:
            raise SExprError(f"unexpected trailing token {tok!r}", line, col)
        if tok == "(":
            stack.append(_List([], line, col))
            continue
        if tok == ")":
            if not stack:
                raise SExprError("unbalanced ')'", line, col)
            node = stack.pop()
        else:
            node = _Sym(tok, line, col)
        if stack:
            stack[-1].items.append(node)
        else:
            result = node
    if stack:
        raise SExprError("unbalanced '(': missing ')'", stack[-1].line, stack[-1].col)
    if result is None:
        raise SExprError("empty program")
    return result


# ---------------------------------------------------------------------------
# s-expression -> labeled AST

class _Builder:
    def __init__(self):
        self.next_label = 0

    def fresh(self) -> int:
        label = self.next_label
        self.next_label += 1
        return label

    def variable(self, sym: _Sym, scope: dict) -> Var:
        if sym.text in KEYWORDS:
            raise NotANF(f"keyword {sym.text!r} used as a variable", sym.line, sym.col)
        return Var(sym.text, scope.get(sym.text))

    def expr(self, sx, scope: dict) -> Expr:
        if isinstance(sx, _Sym):
            label = self.fresh()
            return Return(VarRef(self.variable(sx, scope)), label)
        if not sx.items:
            raise NotANF("empty application", sx.line, sx.col)
        head = sx.items[0]
        if isinstance(head, _Sym) and head.text in LAMBDA_KEYWORDS:
            label = self.fresh()
            return Return(self.lam(sx, scope), label)
        if isinstance(head, _Sym) and head.text == "let":
            return self.let(sx, scope)
        return self.call(sx, scope)

    def lam(self, sx: _List, scope: dict) -> Lam:
        items = sx.items
        if len(items) != 3 or not isinstance(items[1], _List):
            raise NotANF("lambda must have the form (λ (x) e)", sx.line, sx.col)
        params = items[1].items
        if len(params) != 1 or not isinstance(params[0], _Sym):
            raise NotANF("lambda must take exactly one parameter", sx.line, sx.col)
        label = self.fresh()
        param = self.variable(params[0], {})
        param = Var(param.name, label)
        body = self.expr(items[2], {**scope, param.name: label})
        return Lam(param, body, label)

    def let(self, sx: _List, scope: dict) -> LetCall:
        items = sx.items
        if len(items) != 3 or not isinstance(items[1], _List) or len(items[1].items) != 1:
            raise NotANF("let must have the form (let ((v (f a))) e)", sx.line, sx.col)
        binding = items[1].items[0]
        if not isinstance(binding, _List) or len(binding.items) != 2 \
                or not isinstance(binding.items[0], _Sym):
            raise NotANF("malformed let binding", sx.line, sx.col)
        bound = binding.items[1]
        if not isinstance(bound, _List) or not bound.items or (
                isinstance(bound.items[0], _Sym) and bound.items[0].text in KEYWORDS):
            where = bound
            raise NotANF("let must bind a call", where.line, where.col)
        label = self.fresh()
        var = Var(self.variable(binding.items[0], {}).name, label)
        call = self.call(bound, scope)
        body = self.expr(items[2], {**scope, var.name: label})
        return LetCall(var, call, body, label)

    def call(self, sx: _List, scope: dict) -> Call:
        if len(sx.items) != 2:
            raise NotANF(
                f"call must have exactly one argument, got {len(sx.items) - 1}",
                sx.line, sx.col)
        label = self.fresh()
        fun = self.atom(sx.items[0], scope)
        arg = self.atom(sx.items[1], scope)
        return Call(fun, arg, label)

    def atom(self, sx, scope: dict) -> Atom:
        if isinstance(sx, _Sym):
            return VarRef(self.variable(sx, scope))
        if sx.items and isinstance(sx.items[0], _Sym) and sx.items[0].text in LAMBDA_KEYWORDS:
            return self.lam(sx, scope)
        raise NotANF("operands must be atomic (variable or lambda)", sx.line, sx.col)


def parse(text: str) -> Expr:
    """Parse and label one ANF program."""
    return _Builder().expr(read_sexpr(text), {})


# ---------------------------------------------------------------------------
# printing

def _atom_str(a: Atom) -> str:
    if isinstance(a, VarRef):
        return a.var.name
    return f"(λ ({a.param.name}) {to_text(a.body)})"


def to_text(e: Expr | Lam) -> str:
    """Canonical printer; ``parse(to_text(e))`` rebuilds ``e``."""
    if isinstance(e, Lam):
        return _atom_str(e)
    if isinstance(e, Return):
        return _atom_str(e.atom)
    if isinstance(e, Call):
        return f"({_atom_str(e.fun)} {_atom_str(e.arg)})"
    return f"(let (({e.var.name} {to_text(e.call)})) {to_text(e.body)})"


# ---------------------------------------------------------------------------
# traversal helpers

def walk(e: Expr | Lam) -> Iterator[Expr | Lam]:
    """Yield every labeled node in label (pre-)order."""
    if isinstance(e, Lam):
        yield e
        yield from walk(e.body)
    elif isinstance(e, Return):
        yield e
        if isinstance(e.atom, Lam):
            yield from walk(e.atom)
    elif isinstance(e, Call):
        yield e
        for a in (e.fun, e.arg):
            if isinstance(a, Lam):
                yield from walk(a)
    else:
        yield e
        yield from walk(e.call)
        yield from walk(e.body)


def binders(e: Expr) -> list[Var]:
    """Binding occurrences in leftmost depth-first order."""
    out = []
    for node in walk(e):
        if isinstance(node, Lam):
            out.append(node.param)
        elif isinstance(node, LetCall):
            out.append(node.var)
    return out


def _atom_free(a: Atom) -> set[Var]:
    if isinstance(a, VarRef):
        return {a.var}
    return free_vars(a.body) - {a.param}


def free_vars(e: Expr | Lam) -> set[Var]:
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.param}
    if isinstance(e, Return):
        return _atom_free(e.atom)
    if isinstance(e, Call):
        return _atom_free(e.fun) | _atom_free(e.arg)
    return free_vars(e.call) | (free_vars(e.body) - {e.var})


def unique_binders(e: Expr) -> Expr:
    """Alpha-rename so no binder name is used twice.

    Only names bound more than once are renamed; the k-th binder visited
    (counting all binders from 0) becomes ``name#k``.  Labels are kept.
    """
    seen: dict[str, int] = {}
    for v in binders(e):
        seen[v.name] = seen.get(v.name, 0) + 1
    dup = {name for name, n in seen.items() if n > 1}
    if not dup:
        return e
    taken = set(seen)
    counter = iter(range(len(binders(e))))

    def rename(v: Var) -> Var:
        k = next(counter)
        if v.name not in dup:
            return v
        new = f"{v.name}#{k}"
        while new in taken:
            new += "#"
        taken.add(new)
        return Var(new, v.binder)

    def atom(a: Atom, env: dict) -> Atom:
        if isinstance(a, VarRef):
            return VarRef(env.get(a.var.name, a.var))
        return lam(a, env)

    def lam(l: Lam, env: dict) -> Lam:
        p = rename(l.param)
        return Lam(p, expr(l.body, {**env, l.param.name: p}), l.label)

    def expr(x: Expr, env: dict) -> Expr:
        if isinstance(x, Return):
            return Return(atom(x.atom, env), x.label)
        if isinstance(x, Call):
            return Call(atom(x.fun, env), atom(x.arg, env), x.label)
        v = rename(x.var)
        call = Call(atom(x.call.fun, env), atom(x.call.arg, env), x.call.label)
        return LetCall(v, call, expr(x.body, {**env, x.var.name: v}), x.label)

    return expr(e, {})


def same_tree(a, b) -> bool:
    """Structural equality of two ASTs, labels and names included."""
    if type(a) is not type(b):
        return False
    if isinstance(a, VarRef):
        return a.var == b.var
    if isinstance(a, Lam):
        return a.label == b.label and a.param == b.param and same_tree(a.body, b.body)
    if isinstance(a, Return):
        return a.label == b.label and same_tree(a.atom, b.atom)
    if isinstance(a, Call):
        return a.label == b.label and same_tree(a.fun, b.fun) and same_tree(a.arg, b.arg)
    return (a.label == b.label and a.var == b.var and same_tree(a.call, b.call)
            and same_tree(a.body, b.body))


def strip_renames(e):
    """Undo ``unique_binders`` naming (drop ``#k`` suffixes); for tests."""
    def v(x: Var) -> Var:
        return Var(x.name.split("#", 1)[0], x.binder)

    if isinstance(e, VarRef):
        return VarRef(v(e.var))
    if isinstance(e, Lam):
        return Lam(v(e.param), strip_renames(e.body), e.label)
    if isinstance(e, Return):
        return Return(strip_renames(e.atom), e.label)
    if isinstance(e, Call):
        return Call(strip_renames(e.fun), strip_renames(e.arg), e.label)
    return LetCall(v(e.var), strip_renames(e.call), strip_renames(e.body), e.label)


@dataclass
class ProgramIndex:
    """Lookup tables over one program's labeled nodes."""

    root: Expr
    by_label: dict
    lams: list
    calls: list
    exprs: list
    vars: list

    @classmethod
    def of(cls, e: Expr) -> "ProgramIndex":
        nodes = list(walk(e))
        return cls(
            root=e,
            by_label={n.label: n for n in nodes},
            lams=[n for n in nodes if isinstance(n, Lam)],
            calls=[n for n in nodes if isinstance(n, Call)],
            exprs=[n for n in nodes if not isinstance(n, Lam)],
            vars=binders(e),
        )

    def var(self, name: str) -> Var | None:
        for v in self.vars:
            if v.name == name:
                return v
        return None
