"""Reading restricted Lie algebras from JSON definition files.

Schema::

    {"p": 5,
     "basis": ["e", "h", "f"],
     "brackets": {"e,h": {"e": -2}, "e,f": {"h": 1}, "h,f": {"f": -2}},
     "pmap": {"h": {"h": 1}}}

Bracket keys name a pair in basis order; omitted pairs and omitted p-map
rows are zero. Coefficients are integers reduced mod p.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from plie.fp import InvalidModulus, check_prime
from plie.lie import RestrictedLieAlgebra

CORPUS = (
    "abelian_p2",
    "abelian_p2_xx_eq_x",
    "abelian_p3",
    "abelian_p5",
    "heisenberg_p2",
    "heisenberg_p3",
    "sl2_p5",
)


class ParseError(ValueError):
    pass


class UndeclaredName(ParseError):
    pass


ModulusError = InvalidModulus


def _coeff_map(raw: Any, names: list[str], p: int, where: str) -> np.ndarray:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object mapping basis names to integers")
    v = np.zeros(len(names), dtype=np.int64)
    for name, c in raw.items():
        if name not in names:
            raise UndeclaredName(f"{where}: undeclared basis name {name!r}")
        if not isinstance(c, int) or isinstance(c, bool):
            raise ParseError(f"{where}: coefficient of {name!r} must be an integer, got {c!r}")
        v[names.index(name)] = c % p
    return v


def algebra_from_dict(data: Any) -> RestrictedLieAlgebra:
    if not isinstance(data, dict):
        raise ParseError("algebra file must contain a JSON object")
    unknown = set(data) - {"p", "basis", "brackets", "pmap", "name", "description"}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    for key in ("p", "basis"):
        if key not in data:
            raise ParseError(f"missing required key {key!r}")
    p = data["p"]
    if not isinstance(p, int) or isinstance(p, bool):
        raise ParseError(f"p must be an integer, got {p!r}")
    check_prime(p)
    names = data["basis"]
    if not isinstance(names, list) or not all(isinstance(x, str) and x for x in names):
        raise ParseError("basis must be a list of non-empty strings")
    if len(set(names)) != len(names):
        raise ParseError(f"duplicate basis names in {names}")
    brackets = data.get("brackets", {})
    pmap = data.get("pmap", {})
    if not isinstance(brackets, dict) or not isinstance(pmap, dict):
        raise ParseError("brackets and pmap must be JSON objects")
    upper = {}
    for key, raw in brackets.items():
        parts = key.split(",")
        if len(parts) != 2:
            raise ParseError(f"bracket key {key!r} must have the form 'a,b'")
        a, b = (s.strip() for s in parts)
        for name in (a, b):
            if name not in names:
                raise UndeclaredName(f"bracket {key!r}: undeclared basis name {name!r}")
        i, j = names.index(a), names.index(b)
        if i >= j:
            raise ParseError(f"bracket key {key!r} must list its pair in basis order with distinct names")
        upper[(i, j)] = _coeff_map(raw, names, p, f"bracket {key!r}")
    table = np.zeros((len(names), len(names)), dtype=np.int64)
    for name, raw in pmap.items():
        if name not in names:
            raise UndeclaredName(f"pmap: undeclared basis name {name!r}")
        table[names.index(name)] = _coeff_map(raw, names, p, f"pmap row {name!r}")
    return RestrictedLieAlgebra(p, names, upper, table)


def parse_algebra(path: str | Path) -> RestrictedLieAlgebra:
    """Load an algebra file. Axioms are not checked here."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return algebra_from_dict(data)


def algebra_to_dict(L: RestrictedLieAlgebra) -> dict:
    names = L.names
    brackets = {}
    for (i, j), v in sorted(L.upper().items()):
        row = {names[k]: int(c) for k, c in enumerate(v) if c}
        if row:
            brackets[f"{names[i]},{names[j]}"] = row
    pmap = {}
    for i, v in enumerate(L.pmap_table):
        row = {names[k]: int(c) for k, c in enumerate(v) if c}
        if row:
            pmap[names[i]] = row
    return {"p": L.p, "basis": list(names), "brackets": brackets, "pmap": pmap}


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("plie") / "corpus" / f"{name}.json"))


def load_corpus(name: str) -> RestrictedLieAlgebra:
    return parse_algebra(corpus_path(name))
