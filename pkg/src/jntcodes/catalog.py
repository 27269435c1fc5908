"""Group catalog: JSON ingestion, serialisation and self-certifying validation.

File format::

    {"entries": [Entry, ...]}
    Entry = {"name": str, "degree": int, "order": "<decimal string>",
             "two_transitive": bool,
             "generators": [[1-based images], ...],
             "maximal_subgroups": [Entry, ...]}
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

from .perm import GeneratedGroup, Permutation, StabilizerChain, build_chain, point_orbit, point_stabilizer

ENV_VAR = "JNT_CATALOG"


class CatalogError(ValueError):
    """Malformed catalog document."""


@dataclass(eq=False)
class CatalogEntry:
    name: str
    degree: int
    declared_order: int
    two_transitive: bool
    generators: list[Permutation]
    maximal_subgroups: list["CatalogEntry"] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"{self.name}/{self.degree}"

    @cached_property
    def group(self) -> GeneratedGroup:
        return GeneratedGroup(self.degree, tuple(self.generators))

    @cached_property
    def chain(self) -> StabilizerChain:
        return build_chain(self.group, self.declared_order)

    def walk(self):
        yield self
        for m in self.maximal_subgroups:
            yield from m.walk()

    def same_structure(self, other: "CatalogEntry") -> bool:
        return (self.name == other.name and self.degree == other.degree
                and self.declared_order == other.declared_order
                and self.two_transitive == other.two_transitive
                and [g.images for g in self.generators] == [g.images for g in other.generators]
                and len(self.maximal_subgroups) == len(other.maximal_subgroups)
                and all(a.same_structure(b) for a, b in zip(self.maximal_subgroups, other.maximal_subgroups)))


def _entry_from_obj(obj, path: str, parent_degree: int | None = None) -> CatalogEntry:
    if not isinstance(obj, dict):
        raise CatalogError(f"{path}: entry must be an object")
    for key in ("name", "degree", "order", "two_transitive", "generators", "maximal_subgroups"):
        if key not in obj:
            raise CatalogError(f"{path}: missing field {key!r}")
    name, degree, order = obj["name"], obj["degree"], obj["order"]
    if not isinstance(name, str):
        raise CatalogError(f"{path}: name must be a string")
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        raise CatalogError(f"{path} ({name}): degree must be a positive integer")
    if parent_degree is not None and degree != parent_degree:
        raise CatalogError(f"{path} ({name}): degree {degree} differs from parent degree {parent_degree}")
    if not isinstance(order, str) or not order.isdigit():
        raise CatalogError(f"{path} ({name}): order must be a decimal string")
    if not isinstance(obj["two_transitive"], bool):
        raise CatalogError(f"{path} ({name}): two_transitive must be a boolean")
    gens_obj = obj["generators"]
    if not isinstance(gens_obj, list) or not gens_obj:
        raise CatalogError(f"{path} ({name}): generators must be a non-empty list")
    gens = []
    for i, img in enumerate(gens_obj):
        if not isinstance(img, list) or len(img) != degree:
            raise CatalogError(f"{path} ({name}): generator {i} must have {degree} images")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in img):
            raise CatalogError(f"{path} ({name}): generator {i} has non-integer images")
        try:
            gens.append(Permutation([x - 1 for x in img]))
        except ValueError as exc:
            raise CatalogError(f"{path} ({name}): generator {i}: {exc}") from None
    subs_obj = obj["maximal_subgroups"]
    if not isinstance(subs_obj, list):
        raise CatalogError(f"{path} ({name}): maximal_subgroups must be a list")
    subs = [_entry_from_obj(s, f"{path}.maximal_subgroups[{i}]", degree) for i, s in enumerate(subs_obj)]
    return CatalogEntry(name, degree, int(order), obj["two_transitive"], gens, subs)


def parse_catalog(text: str) -> list[CatalogEntry]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise CatalogError('top level must be {"entries": [...]}')
    return [_entry_from_obj(e, f"entries[{i}]") for i, e in enumerate(doc["entries"])]


def _entry_to_obj(e: CatalogEntry) -> dict:
    return {
        "name": e.name,
        "degree": e.degree,
        "order": str(e.declared_order),
        "two_transitive": e.two_transitive,
        "generators": [[x + 1 for x in g.images] for g in e.generators],
        "maximal_subgroups": [_entry_to_obj(m) for m in e.maximal_subgroups],
    }


def serialize_catalog(entries: list[CatalogEntry]) -> str:
    return json.dumps({"entries": [_entry_to_obj(e) for e in entries]}, separators=(",", ":")) + "\n"


def default_catalog_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("jntcodes") / "data" / "catalog.json"))


def load_catalog(path: str | os.PathLike | None = None) -> list[CatalogEntry]:
    p = Path(path) if path is not None else default_catalog_path()
    return parse_catalog(p.read_text(encoding="utf-8"))


def find_entries(entries: list[CatalogEntry], selector: str) -> list[CatalogEntry]:
    """Entries matching ``NAME`` or ``NAME/DEGREE``."""
    name, _, deg = selector.partition("/")
    return [e for e in entries if e.name == name and (not deg or str(e.degree) == deg)]


# ------------------------------------------------------------------ validation

@dataclass
class Check:
    entry: str
    check: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}\t{c.entry}\t{c.check}\t{c.detail}" for c in self.checks]


def validate_entry(e: CatalogEntry, report: ValidationReport | None = None,
                   parent: CatalogEntry | None = None, path: str | None = None,
                   parent_chain: StabilizerChain | None = None) -> ValidationReport:
    """Check every entry invariant recursively; failures are report items."""
    report = report if report is not None else ValidationReport()
    path = path or e.label
    chain = None
    try:
        # no declared order here: it would act as a stopping rule and an
        # understated value could then certify itself
        chain = build_chain(e.group)
        n = chain.order()
        report.checks.append(Check(path, "order", n == e.declared_order,
                                   f"chain {n}, declared {e.declared_order}"))
    except OverflowError as exc:
        report.checks.append(Check(path, "order", False, str(exc)))
    if parent is not None and parent_chain is not None:
        bad = [i for i, g in enumerate(e.generators) if not parent_chain.contains(g)]
        report.checks.append(Check(path, "generators in parent", not bad,
                                   f"non-members {bad}" if bad else ""))
        divides = (parent.declared_order % e.declared_order == 0
                   and e.declared_order < parent.declared_order)
        report.checks.append(Check(path, "order strictly divides parent", divides,
                                   f"{e.declared_order} | {parent.declared_order}"))
    if e.two_transitive:
        ok = False
        if chain is not None and len(point_orbit(e.group, 0)) == e.degree:
            stab = point_stabilizer(chain, 0)
            ok = len(point_orbit(stab, 1 if e.degree > 1 else 0)) == e.degree - 1
        report.checks.append(Check(path, "two-transitive", ok))
    for m in e.maximal_subgroups:
        validate_entry(m, report, e, f"{path} > {m.name}", chain)
    return report
