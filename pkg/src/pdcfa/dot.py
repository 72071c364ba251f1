"""Canonical text rendering of analysis states and Graphviz DOT output."""

from __future__ import annotations

import hashlib

from .abstract import addr_key


def env_text(env) -> str:
    return "{" + ", ".join(f"{v.name}:{a}" for v, a in sorted(env.items(), key=lambda kv: kv[0].name)) + "}"


def clo_text(c) -> str:
    return f"λ{c.lam.label}{env_text(c.env)}"


def store_text(store) -> str:
    parts = []
    for a in sorted(store, key=addr_key):
        clos = sorted(clo_text(c) for c in store[a])
        parts.append(f"{a}↦[{' '.join(clos)}]")
    return "{" + ", ".join(parts) + "}"


def state_text(q) -> str:
    """Canonical rendering; equal states render equally."""
    text = f"{q.expr.label} {env_text(q.env)}"
    store = getattr(q, "store", None)
    if store is not None:
        text += " " + store_text(store)
    if q.ctx:
        text += " ctx=" + ".".join(map(str, q.ctx))
    return text


def digest(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:8]


def state_key(q):
    return (q.expr.label, state_text(q))


def _ids(nodes) -> dict:
    return {q: i for i, q in enumerate(sorted(nodes, key=state_key))}


def _node_lines(ids: dict, root, verbose: bool) -> list:
    lines = []
    for q, i in ids.items():
        label = str(q.expr.label)
        if verbose:
            env = digest(env_text(q.env))
            store = getattr(q, "store", None)
            label += f"\\nenv {env}"
            if store is not None:
                label += f"\\nstore {digest(store_text(store))}"
        shape = ', shape=doublecircle' if q == root else ""
        lines.append(f'  n{i} [label="{label}"{shape}];')
    return lines


def dsg_dot(nodes, edges, root, verbose: bool = False, name: str = "dsg") -> str:
    ids = _ids(nodes)
    lines = [f"digraph {name} {{"] + _node_lines(ids, root, verbose)
    rows = sorted((ids[a], str(act), ids[b]) for a, act, b in edges)
    lines += [f'  n{a} -> n{b} [label="{lab}"];' for a, lab, b in rows]
    lines.append("}")
    return "\n".join(lines) + "\n"


def ecg_dot(nodes, h_edges, root, verbose: bool = False, name: str = "ecg") -> str:
    ids = _ids(nodes)
    lines = [f"digraph {name} {{"] + _node_lines(ids, root, verbose)
    rows = sorted((ids[a], ids[b]) for a, b in h_edges if a in ids and b in ids)
    lines += [f"  n{a} -> n{b} [style=dashed];" for a, b in rows]
    lines.append("}")
    return "\n".join(lines) + "\n"
