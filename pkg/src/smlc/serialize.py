"""JSON wire formats for circuits and bouquets.

Circuit document:
    { "n": int,
      "nodes": [ {"id": 0, "op": "const", "value": "-1"}
               | {"id": 1, "op": "var", "row": 2, "col": 3}
               | {"id": 2, "op": "add"|"mul", "left": 0, "right": 1}, ... ],
      "root": int }

Bouquet document:
    { "n": int, "sign": 1|-1, "summands": [ {"sigma": [3,1,2], "circuit": <circuit>}, ... ] }

"sign" is the global factor of the sum; it defaults to 1 when absent, so
documents written without it parse fine.

Ids are 0-based and must equal the node's list position; child references must
point strictly backwards (forward references are rejected).  Constant values
are decimal strings so readers never face integer-width surprises.  Parsing a
bouquet also re-validates regularity of every summand against its sigma.
"""

from __future__ import annotations

import json
from typing import Any

from .circuit import (
    Add,
    Bouquet,
    Circuit,
    ConstLeaf,
    Mul,
    Node,
    RegularCircuit,
    VarLeaf,
    regular,
)

__all__ = [
    "ParseError",
    "circuit_to_obj",
    "circuit_from_obj",
    "bouquet_to_obj",
    "bouquet_from_obj",
    "dumps",
    "loads",
]


class ParseError(Exception):
    """Malformed document: bad JSON, bad schema, or broken id discipline."""


def circuit_to_obj(circuit: Circuit) -> dict[str, Any]:
    nodes = []
    for vid, node in enumerate(circuit.nodes):
        if isinstance(node, ConstLeaf):
            nodes.append({"id": vid, "op": "const", "value": str(node.value)})
        elif isinstance(node, VarLeaf):
            nodes.append({"id": vid, "op": "var", "row": node.row, "col": node.col})
        elif isinstance(node, Add):
            nodes.append({"id": vid, "op": "add", "left": node.left, "right": node.right})
        else:
            nodes.append({"id": vid, "op": "mul", "left": node.left, "right": node.right})
    return {"n": circuit.n, "nodes": nodes, "root": circuit.root}


def _require(obj: dict, key: str, kind: type) -> Any:
    if key not in obj:
        raise ParseError(f"missing field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"field {key!r}: expected {kind.__name__}, got bool")
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def circuit_from_obj(obj: Any) -> Circuit:
    if not isinstance(obj, dict):
        raise ParseError("circuit document must be a JSON object")
    n = _require(obj, "n", int)
    raw_nodes = _require(obj, "nodes", list)
    root = _require(obj, "root", int)

    nodes: list[Node] = []
    for idx, raw in enumerate(raw_nodes):
        if not isinstance(raw, dict):
            raise ParseError(f"node {idx} is not an object")
        if _require(raw, "id", int) != idx:
            raise ParseError(f"node {idx}: id {raw['id']} out of order (ids must be dense, 0-based)")
        op = _require(raw, "op", str)
        if op == "const":
            text = _require(raw, "value", str)
            try:
                value = int(text)
            except ValueError:
                raise ParseError(f"node {idx}: bad decimal constant {text!r}") from None
            nodes.append(ConstLeaf(value))
        elif op == "var":
            nodes.append(VarLeaf(_require(raw, "row", int), _require(raw, "col", int)))
        elif op in ("add", "mul"):
            left = _require(raw, "left", int)
            right = _require(raw, "right", int)
            for ref in (left, right):
                if not (0 <= ref < idx):
                    raise ParseError(f"node {idx}: forward or invalid child reference {ref}")
            nodes.append(Add(left, right) if op == "add" else Mul(left, right))
        else:
            raise ParseError(f"node {idx}: unknown op {op!r}")
    if not (0 <= root < len(nodes)):
        raise ParseError(f"root {root} out of range")
    return Circuit(n=n, nodes=tuple(nodes), root=root)


def bouquet_to_obj(bouquet: Bouquet) -> dict[str, Any]:
    return {
        "n": bouquet.n,
        "sign": bouquet.sign,
        "summands": [
            {"sigma": list(rc.sigma), "circuit": circuit_to_obj(rc.circuit)}
            for rc in bouquet.summands
        ],
    }


def bouquet_from_obj(obj: Any) -> Bouquet:
    if not isinstance(obj, dict):
        raise ParseError("bouquet document must be a JSON object")
    n = _require(obj, "n", int)
    raw_summands = _require(obj, "summands", list)
    if not raw_summands:
        raise ParseError("bouquet needs at least one summand")
    sign = obj.get("sign", 1)
    if sign not in (1, -1):
        raise ParseError("sign must be 1 or -1")
    summands: list[RegularCircuit] = []
    for idx, raw in enumerate(raw_summands):
        if not isinstance(raw, dict):
            raise ParseError(f"summand {idx} is not an object")
        sigma = _require(raw, "sigma", list)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in sigma):
            raise ParseError(f"summand {idx}: sigma must be a list of ints")
        circuit = circuit_from_obj(_require(raw, "circuit", dict))
        # regularity is a domain property, not a schema property: let
        # CircuitError propagate to the caller untouched
        summands.append(regular(circuit, tuple(sigma)))
    return Bouquet(n=n, summands=tuple(summands), sign=sign)


def dumps(obj: Any) -> str:
    """Canonical byte-stable JSON: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
