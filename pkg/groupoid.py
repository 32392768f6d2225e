"""
Finite Groupoids
Validated groupoid tables, generator constructors and the JSON file format.
Convention: pq is defined exactly when source(p) = target(q) ("p after q").
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from types import MappingProxyType

logger = logging.getLogger(__name__)


class GroupoidError(ValueError):
    """Invalid groupoid or group table; carries the violation list."""

    def __init__(self, message: str, violations: Sequence[Violation] = ()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[str, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}


@dataclass(frozen=True, eq=False)
class Groupoid:
    arrows: tuple[str, ...]
    units: tuple[str, ...]
    source: Mapping[str, str]
    target: Mapping[str, str]
    inverse: Mapping[str, str]
    table: Mapping[tuple[str, str], str]
    name: str = field(default="")
    # (p, q, earlier r, later r) for compose entries given more than once
    repeated: tuple[tuple[str, str, str, str], ...] = ()

    def __post_init__(self):
        for attr in ("source", "target", "inverse", "table"):
            object.__setattr__(self, attr, MappingProxyType(dict(getattr(self, attr))))

    def composable(self, p: str, q: str) -> bool:
        return self.source[p] == self.target[q]

    def compose(self, p: str, q: str) -> str | None:
        """pq, or None when undefined."""
        return self.table.get((p, q))

    def source_fiber(self, unit: str) -> tuple[str, ...]:
        return tuple(p for p in self.arrows if self.source[p] == unit)

    def target_fiber(self, unit: str) -> tuple[str, ...]:
        return tuple(p for p in self.arrows if self.target[p] == unit)

    def is_unit(self, p: str) -> bool:
        return p in self.units

    def __repr__(self) -> str:
        return f"Groupoid({self.name or '?'}: {len(self.arrows)} arrows, {len(self.units)} units)"


# --- Validation ---

def validate(G: Groupoid) -> ValidationReport:
    """Check every groupoid axiom; each violation names the axiom and the witnessing arrows."""
    violations: list[Violation] = []
    arrow_set = set(G.arrows)

    seen = set()
    for p in G.arrows:
        if p in seen:
            violations.append(Violation("duplicate arrow", (p,)))
        seen.add(p)

    for u in G.units:
        if u not in arrow_set:
            violations.append(Violation("dangling reference", (u,), "unit is not an arrow"))
    for label, mapping in (("source", G.source), ("target", G.target), ("inverse", G.inverse)):
        for p in G.arrows:
            if p not in mapping:
                violations.append(Violation("dangling reference", (p,), f"no {label}"))
            elif mapping[p] not in arrow_set:
                violations.append(Violation("dangling reference", (p, mapping[p]), f"{label} is not an arrow"))
    for p, q, first, again in G.repeated:
        violations.append(Violation("duplicate composite", (p, q), f"given as {first} and again as {again}"))
    for (p, q), r in G.table.items():
        missing = [x for x in (p, q, r) if x not in arrow_set]
        if missing:
            violations.append(Violation("dangling reference", (p, q, r), "compose table entry"))
    if violations:
        return ValidationReport(tuple(violations))

    units = set(G.units)
    for p in G.arrows:
        if G.source[p] not in units or G.target[p] not in units:
            violations.append(Violation("units", (p,), "source/target must be units"))
    for u in G.units:
        if G.source[u] != u or G.target[u] != u:
            violations.append(Violation("units", (u,), "source(unit) = target(unit) = unit"))

    for p, q in product(G.arrows, repeat=2):
        defined = (p, q) in G.table
        if defined != G.composable(p, q):
            detail = "defined but source(p) != target(q)" if defined else "missing composite"
            violations.append(Violation("composability", (p, q), detail))
        elif defined:
            r = G.table[(p, q)]
            if G.source[r] != G.source[q] or G.target[r] != G.target[p]:
                violations.append(Violation("endpoints", (p, q, r)))
    if violations:
        return ValidationReport(tuple(violations))

    for p, q, r in product(G.arrows, repeat=3):
        pq, qr = G.compose(p, q), G.compose(q, r)
        if pq is None or qr is None:
            continue
        left, right = G.compose(pq, r), G.compose(p, qr)
        if left != right:
            violations.append(Violation("associativity", (p, q, r), f"{left} != {right}"))

    for p in G.arrows:
        if G.compose(p, G.source[p]) != p or G.compose(G.target[p], p) != p:
            violations.append(Violation("identity", (p,)))
        inv = G.inverse[p]
        if G.inverse[inv] != p:
            violations.append(Violation("inverse", (p, inv), "inverse is not an involution"))
        if G.compose(p, inv) != G.target[p] or G.compose(inv, p) != G.source[p]:
            violations.append(Violation("inverse", (p, inv)))
    return ValidationReport(tuple(violations))


def require_valid(G: Groupoid) -> Groupoid:
    report = validate(G)
    if not report.ok:
        first = report.violations[0]
        raise GroupoidError(
            f"invalid groupoid {G.name!r}: {first.axiom} at {', '.join(first.witness)}",
            report.violations,
        )
    return G


# --- Constructors ---

def pair_groupoid(n: int) -> Groupoid:
    """Arrows (i,j) from j to i for 1 <= i,j <= n; (i,j)(j,k) = (i,k)."""
    if n < 1:
        raise GroupoidError("pair groupoid needs at least one point")
    arrow = {(i, j): f"({i},{j})" for i in range(1, n + 1) for j in range(1, n + 1)}
    table = {}
    for (i, j), p in arrow.items():
        for k in range(1, n + 1):
            table[(p, arrow[(j, k)])] = arrow[(i, k)]
    G = Groupoid(
        arrows=tuple(sorted(arrow.values())),
        units=tuple(sorted(arrow[(i, i)] for i in range(1, n + 1))),
        source={p: arrow[(j, j)] for (i, j), p in arrow.items()},
        target={p: arrow[(i, i)] for (i, j), p in arrow.items()},
        inverse={p: arrow[(j, i)] for (i, j), p in arrow.items()},
        table=table,
        name=f"pair({n})",
    )
    return require_valid(G)


def _check_group_table(elements: Sequence[str], table: Sequence[Sequence[str]]) -> tuple[dict, str, dict]:
    """Returns: (multiplication dict, identity, inverse dict)"""
    violations = []
    if len(set(elements)) != len(elements):
        raise GroupoidError("group table: duplicate element names")
    if len(table) != len(elements) or any(len(row) != len(elements) for row in table):
        raise GroupoidError("group table: table must be square over the element list")
    mul = {}
    for g, row in zip(elements, table):
        for h, gh in zip(elements, row):
            if gh not in elements:
                violations.append(Violation("closure", (g, h, gh)))
            mul[(g, h)] = gh
    if violations:
        raise GroupoidError("group table: product leaves the element set", violations)

    for g, h, k in product(elements, repeat=3):
        if mul[(mul[(g, h)], k)] != mul[(g, mul[(h, k)])]:
            violations.append(Violation("associativity", (g, h, k)))
    if violations:
        raise GroupoidError("group table: not associative", violations)

    identities = [e for e in elements if all(mul[(e, g)] == g == mul[(g, e)] for g in elements)]
    if not identities:
        raise GroupoidError("group table: no identity element")
    e = identities[0]
    inverse = {}
    for g in elements:
        candidates = [h for h in elements if mul[(g, h)] == e == mul[(h, g)]]
        if not candidates:
            violations.append(Violation("inverse", (g,), "missing inverse"))
        else:
            inverse[g] = candidates[0]
    if violations:
        raise GroupoidError("group table: missing inverses", violations)
    return mul, e, inverse


def one_object_group(elements: Sequence[str], table: Sequence[Sequence[str]], name: str = "group") -> Groupoid:
    """A group as a groupoid with a single unit; table[i][j] = elements[i]*elements[j]."""
    mul, e, inverse = _check_group_table(list(elements), table)
    G = Groupoid(
        arrows=tuple(sorted(elements)),
        units=(e,),
        source={g: e for g in elements},
        target={g: e for g in elements},
        inverse=inverse,
        table=mul,
        name=name,
    )
    return require_valid(G)


def cyclic_group(n: int) -> Groupoid:
    """Z_n with elements e, a, a^2, ..."""
    names = ["e", "a"] + [f"a^{k}" for k in range(2, n)]
    names = names[:n]
    table = [[names[(i + j) % n] for j in range(n)] for i in range(n)]
    return one_object_group(names, table, name=f"Z{n}")


def trivial_group() -> Groupoid:
    return cyclic_group(1)


def disjoint_union(*parts: Groupoid, tags: Sequence[str] | None = None) -> Groupoid:
    """Disjoint union; arrows are renamed '<tag>:<arrow>' (tags default to 1, 2, ...)."""
    if not parts:
        raise GroupoidError("disjoint union of nothing")
    tags = list(tags) if tags is not None else [str(i) for i in range(1, len(parts) + 1)]
    if len(tags) != len(parts) or len(set(tags)) != len(tags):
        raise GroupoidError("disjoint union needs one distinct tag per part")
    arrows, units, source, target, inverse, table = [], [], {}, {}, {}, {}
    for tag, G in zip(tags, parts):
        rename = {p: f"{tag}:{p}" for p in G.arrows}
        arrows += rename.values()
        units += [rename[u] for u in G.units]
        for p in G.arrows:
            source[rename[p]] = rename[G.source[p]]
            target[rename[p]] = rename[G.target[p]]
            inverse[rename[p]] = rename[G.inverse[p]]
        for (p, q), r in G.table.items():
            table[(rename[p], rename[q])] = rename[r]
    name = " + ".join(G.name or "?" for G in parts)
    G = Groupoid(tuple(sorted(arrows)), tuple(sorted(units)), source, target, inverse, table, name)
    return require_valid(G)


def group_bundle(groups: Sequence[Groupoid]) -> Groupoid:
    """Bundle of groups over as many units as there are groups."""
    for G in groups:
        if len(G.units) != 1:
            raise GroupoidError(f"bundle member {G.name!r} is not a group")
    return disjoint_union(*groups)


def action_groupoid(group: Groupoid, points: Sequence[str], action: Mapping[str, Mapping[str, str]]) -> Groupoid:
    """Transformation groupoid: arrow 'g|x' goes from x to g.x; (h|g.x)(g|x) = (hg|x)."""
    if len(group.units) != 1:
        raise GroupoidError("action groupoid needs a one-object group")
    (e,) = group.units
    violations = []
    for g in group.arrows:
        for x in points:
            if action.get(g, {}).get(x) not in points:
                violations.append(Violation("action", (g, x), "image missing or outside the point set"))
    if violations:
        raise GroupoidError("malformed action", violations)
    act = lambda g, x: action[g][x]
    for x in points:
        if act(e, x) != x:
            violations.append(Violation("action", (e, x), "identity must act trivially"))
    for g, h in product(group.arrows, repeat=2):
        for x in points:
            if act(group.compose(g, h), x) != act(g, act(h, x)):
                violations.append(Violation("action", (g, h, x), "not compatible with the product"))
    if violations:
        raise GroupoidError("malformed action", violations)

    arrow = lambda g, x: f"{g}|{x}"
    arrows = [arrow(g, x) for g in group.arrows for x in points]
    table = {}
    for g, h in product(group.arrows, repeat=2):
        for x in points:
            table[(arrow(h, act(g, x)), arrow(g, x))] = arrow(group.compose(h, g), x)
    G = Groupoid(
        arrows=tuple(sorted(arrows)),
        units=tuple(sorted(arrow(e, x) for x in points)),
        source={arrow(g, x): arrow(e, x) for g in group.arrows for x in points},
        target={arrow(g, x): arrow(e, act(g, x)) for g in group.arrows for x in points},
        inverse={arrow(g, x): arrow(group.inverse[g], act(g, x)) for g in group.arrows for x in points},
        table=table,
        name=f"{group.name} acting on {len(points)} points",
    )
    return require_valid(G)


# --- File format ---

def _group_from_fields(fields: Mapping) -> Groupoid:
    if "cyclic" in fields:
        return cyclic_group(int(fields["cyclic"]))
    try:
        return one_object_group(fields["elements"], fields["table"], name=fields.get("name", "group"))
    except KeyError as e:
        raise GroupoidError(f"group entry missing field {e}") from e


def from_generator(gen: Mapping) -> Groupoid:
    """Build from {"kind": "pair"|"group"|"bundle"|"union"|"action", ...params}."""
    kind = gen.get("kind")
    if kind == "pair":
        return pair_groupoid(int(gen["n"]))
    if kind == "group":
        return _group_from_fields(gen)
    if kind == "bundle":
        return group_bundle([_group_from_fields(g) for g in gen["groups"]])
    if kind == "union":
        return disjoint_union(*(from_generator(part) for part in gen["parts"]), tags=gen.get("tags"))
    if kind == "action":
        return action_groupoid(_group_from_fields(gen["group"]), gen["points"], gen["action"])
    raise GroupoidError(f"unknown generator kind: {kind!r}")


def from_dict(data: Mapping) -> Groupoid:
    """Explicit or generator form; explicit tables are returned unvalidated."""
    if "generator" in data:
        return from_generator(data["generator"])
    try:
        arrows = tuple(data["arrows"])
        table = {}
        repeated = []
        for entry in data["compose"]:
            p, q, r = entry
            if (p, q) in table:
                repeated.append((p, q, table[(p, q)], r))
            table[(p, q)] = r
        return Groupoid(
            arrows=arrows,
            units=tuple(data["units"]),
            source=dict(data["source"]),
            target=dict(data["target"]),
            inverse=dict(data["inverse"]),
            table=table,
            name=data.get("name", ""),
            repeated=tuple(repeated),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise GroupoidError(f"malformed groupoid file: {e}") from e


def to_dict(G: Groupoid) -> dict:
    return {
        "name": G.name,
        "arrows": list(G.arrows),
        "units": list(G.units),
        "source": dict(G.source),
        "target": dict(G.target),
        "inverse": dict(G.inverse),
        "compose": [[p, q, r] for (p, q), r in sorted(G.table.items())],
    }


def load_groupoid(path: str | Path) -> Groupoid:
    """Read and validate a groupoid file (UTF-8 JSON)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise GroupoidError(f"could not read {path}: {e}") from e
    G = from_dict(data)
    if not G.name:
        G = replace(G, name=path.stem)
    logger.info("loaded %r from %s", G, path)
    return require_valid(G)


def save_groupoid(G: Groupoid, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_dict(G), f, indent=2)
