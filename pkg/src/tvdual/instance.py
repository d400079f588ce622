"""Instance files: parsing with positioned diagnostics, canonical emission.

An instance is a JSON object::

    {
      "atoms": ["a", "b", "c"],
      "sigma": "powerset",                      # or a partition: [[0, 1], [2]]
      "relation": {"classes": [[0, 1], [2]]},   # or {"pairs": [[0, 1]], "close": true}
      "P": ["1/2", "1/4", "1/4"],               # one rational string per sigma block
      "Pprime": ["1/4", "1/4", "1/2"],
      "chain": [{"classes": ...}, ...],         # optional, increasing relations
      "family": [[0, 1], [2]]                   # optional set family for galois
    }

Masses are listed in the order the sigma blocks appear in the file. The
canonical form (what :func:`emit_instance` writes) lists blocks and classes
sorted, relations as classes, and one top-level key per line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .errors import InstanceError, PreconditionError
from .measure import PROBABILITY, GroundSpace, Measure
from .relations import EquivalenceRelation, SetFamily, relation_from_pairs

_RATIONAL = re.compile(r"^-?\d+(?:/\d+)?$")

KEY_ORDER = ("atoms", "sigma", "relation", "P", "Pprime", "chain", "family")


@dataclass(frozen=True)
class InstanceFile:
    space: GroundSpace
    relation: EquivalenceRelation
    P: Measure
    P_prime: Measure
    chain: Optional[tuple[EquivalenceRelation, ...]] = None
    family: Optional[SetFamily] = None


def parse_rational(text: Any, position: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InstanceError(position, f"expected a rational string like \"1/4\", got {text!r}")
    s = str(text).strip()
    if not _RATIONAL.match(s):
        raise InstanceError(position, f"malformed rational {text!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise InstanceError(position, "zero denominator")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _index_list(raw: Any, position: str, n: int) -> list[int]:
    if not isinstance(raw, list):
        raise InstanceError(position, "expected a list of atom indices")
    out = []
    for k, i in enumerate(raw):
        if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < n:
            raise InstanceError(f"{position}[{k}]", f"expected an atom index in 0..{n - 1}, got {i!r}")
        out.append(i)
    return out


def _partition(raw: Any, position: str, n: int) -> list[list[int]]:
    if not isinstance(raw, list) or not raw:
        raise InstanceError(position, "expected a nonempty list of blocks")
    blocks = [_index_list(b, f"{position}[{k}]", n) for k, b in enumerate(raw)]
    seen: dict[int, int] = {}
    for k, b in enumerate(blocks):
        if not b:
            raise InstanceError(f"{position}[{k}]", "empty block")
        for i in b:
            if i in seen:
                raise InstanceError(f"{position}[{k}]", f"atom {i} already in block {seen[i]}")
            seen[i] = k
    missing = sorted(set(range(n)) - set(seen))
    if missing:
        raise InstanceError(position, f"blocks do not cover atoms {missing}")
    return blocks


def _relation(raw: Any, position: str, space: GroundSpace) -> EquivalenceRelation:
    if not isinstance(raw, dict):
        raise InstanceError(position, "expected {\"classes\": ...} or {\"pairs\": ..., \"close\": ...}")
    n = space.n_atoms
    if "classes" in raw:
        classes = _partition(raw["classes"], f"{position}.classes", n)
        return EquivalenceRelation(space, tuple(tuple(c) for c in classes))
    if "pairs" in raw:
        pairs_raw = raw["pairs"]
        if not isinstance(pairs_raw, list):
            raise InstanceError(f"{position}.pairs", "expected a list of [i, j] pairs")
        pairs = []
        for k, p in enumerate(pairs_raw):
            idx = _index_list(p, f"{position}.pairs[{k}]", n)
            if len(idx) != 2:
                raise InstanceError(f"{position}.pairs[{k}]", "a pair has exactly two indices")
            pairs.append((idx[0], idx[1]))
        close = raw.get("close", False)
        if not isinstance(close, bool):
            raise InstanceError(f"{position}.close", "expected true or false")
        try:
            return relation_from_pairs(space, pairs, close=close)
        except PreconditionError as exc:
            raise InstanceError(f"{position}.pairs", str(exc)) from None
    raise InstanceError(position, "relation needs a \"classes\" or \"pairs\" key")


def _measure(raw: Any, position: str, space: GroundSpace, order: list[int]) -> Measure:
    if not isinstance(raw, list):
        raise InstanceError(position, "expected a list of rational strings")
    if len(raw) != space.n_blocks:
        raise InstanceError(position, f"expected {space.n_blocks} masses (one per sigma block), got {len(raw)}")
    masses = [Fraction(0)] * space.n_blocks
    for k, text in enumerate(raw):
        q = parse_rational(text, f"{position}[{k}]")
        if q < 0:
            raise InstanceError(f"{position}[{k}]", f"negative mass {q}")
        masses[order[k]] = q
    total = sum(masses, Fraction(0))
    if total != 1:
        raise InstanceError(position, f"masses sum to {total}, a probability vector must sum to 1")
    return Measure(space, tuple(masses), PROBABILITY)


def parse_instance(data: bytes | str) -> InstanceFile:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(obj, dict):
        raise InstanceError("$", "expected a JSON object")
    unknown = sorted(set(obj) - set(KEY_ORDER))
    if unknown:
        raise InstanceError(f"$.{unknown[0]}", "unknown key")
    for key in ("atoms", "sigma", "relation", "P", "Pprime"):
        if key not in obj:
            raise InstanceError("$", f"missing required key {key!r}")

    atoms = obj["atoms"]
    if not isinstance(atoms, list) or not atoms or not all(isinstance(a, str) for a in atoms):
        raise InstanceError("$.atoms", "expected a nonempty list of strings")
    if len(set(atoms)) != len(atoms):
        raise InstanceError("$.atoms", "atom labels must be distinct")
    n = len(atoms)

    sigma = obj["sigma"]
    if sigma == "powerset":
        file_blocks = [[i] for i in range(n)]
    elif isinstance(sigma, str):
        raise InstanceError("$.sigma", f"unknown sigma-algebra {sigma!r}; use \"powerset\" or a partition")
    else:
        file_blocks = _partition(sigma, "$.sigma", n)
    space = GroundSpace(tuple(atoms), tuple(tuple(b) for b in file_blocks))
    # file block k -> canonical block index
    order = [space.block_of(min(b)) for b in file_blocks]

    relation = _relation(obj["relation"], "$.relation", space)
    P = _measure(obj["P"], "$.P", space, order)
    P_prime = _measure(obj["Pprime"], "$.Pprime", space, order)

    chain = None
    if "chain" in obj:
        raw = obj["chain"]
        if not isinstance(raw, list) or not raw:
            raise InstanceError("$.chain", "expected a nonempty list of relations")
        chain = tuple(_relation(r, f"$.chain[{k}]", space) for k, r in enumerate(raw))

    family = None
    if "family" in obj:
        raw = obj["family"]
        if not isinstance(raw, list):
            raise InstanceError("$.family", "expected a list of atom-index lists")
        family = SetFamily(space, tuple(frozenset(_index_list(s, f"$.family[{k}]", n)) for k, s in enumerate(raw)))
    return InstanceFile(space, relation, P, P_prime, chain, family)


def instance_to_obj(inst: InstanceFile) -> dict:
    space = inst.space
    obj: dict[str, Any] = {"atoms": list(space.atoms)}
    if all(len(b) == 1 for b in space.blocks):
        obj["sigma"] = "powerset"
    else:
        obj["sigma"] = [list(b) for b in space.blocks]
    obj["relation"] = {"classes": [list(c) for c in inst.relation.classes]}
    obj["P"] = [format_rational(m) for m in inst.P.masses]
    obj["Pprime"] = [format_rational(m) for m in inst.P_prime.masses]
    if inst.chain is not None:
        obj["chain"] = [{"classes": [list(c) for c in E.classes]} for E in inst.chain]
    if inst.family is not None:
        obj["family"] = [sorted(s) for s in inst.family.sets]
    return obj


def emit_instance(inst: InstanceFile) -> str:
    """Canonical text: one top-level key per line, compact JSON values."""
    obj = instance_to_obj(inst)
    lines = [f"  {json.dumps(k)}: {json.dumps(obj[k])}" for k in KEY_ORDER if k in obj]
    return "{\n" + ",\n".join(lines) + "\n}\n"
