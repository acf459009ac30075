"""Aggregation of observations into the 256x256 byte-axis cell matrix.

A grid belongs to exactly one base (a MAC OUI or an IPv6 prefix).  Cells
accumulate observation counts plus, depending on the base kind, a label
multiset (MAC) or a responder-key set (IPv6).  Builders accept any iterable
of observations so large inputs can be streamed; counts land in a dense
numpy matrix while labels and responders stay sparse, so memory is bounded
by occupied cells and distinct keys, not by input size.

Completed grids are treated as immutable: nothing in this module mutates a
grid after its builder returns, and callers should not either.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .addr import ContainmentError, Ipv6Prefix, Oui, parse_oui, parse_prefix
from .ingest import MacObservation, V6Observation

GRID_SIDE = 256
GRID_CELLS = GRID_SIDE * GRID_SIDE

_CHUNK = 1 << 16  # observations buffered between count flushes

MAC_OUI = "mac_oui"
V6_PREFIX = "v6_prefix"


@dataclass(frozen=True, slots=True)
class GridBase:
    """The allocation block a grid spans: one OUI or one IPv6 prefix."""

    kind: str
    oui: Oui | None = None
    prefix: Ipv6Prefix | None = None

    def __post_init__(self):
        if self.kind == MAC_OUI:
            if self.oui is None or self.prefix is not None:
                raise ValueError("mac_oui base needs oui set and prefix unset")
        elif self.kind == V6_PREFIX:
            if self.prefix is None or self.oui is not None:
                raise ValueError("v6_prefix base needs prefix set and oui unset")
        else:
            raise ValueError(f"unknown base kind {self.kind!r}")

    @classmethod
    def for_oui(cls, oui: Oui) -> "GridBase":
        return cls(MAC_OUI, oui=oui)

    @classmethod
    def for_prefix(cls, prefix: Ipv6Prefix) -> "GridBase":
        return cls(V6_PREFIX, prefix=prefix)

    @property
    def text(self) -> str:
        """Canonical text of the underlying OUI or prefix."""
        return str(self.oui if self.kind == MAC_OUI else self.prefix)

    def to_obj(self) -> dict:
        if self.kind == MAC_OUI:
            return {"kind": MAC_OUI, "oui": str(self.oui)}
        return {"kind": V6_PREFIX, "prefix": str(self.prefix)}

    @classmethod
    def from_obj(cls, obj: dict) -> "GridBase":
        kind = obj.get("kind")
        if kind == MAC_OUI:
            return cls.for_oui(parse_oui(obj["oui"]))
        if kind == V6_PREFIX:
            return cls.for_prefix(parse_prefix(obj["prefix"]))
        raise ValueError(f"unknown base kind {kind!r}")


@dataclass(frozen=True, slots=True)
class Cell:
    """Snapshot of one grid cell."""

    count: int
    labels: dict[str, int]
    responders: frozenset[str]


class ByteAxisGrid:
    """256x256 cell matrix over one base.

    counts is indexed [y, x].  labels maps (y, x) to a label multiset and
    responders maps (y, x) to a set of canonical IPv6 text keys; both hold
    entries only for cells that actually have any.
    """

    __slots__ = ("base", "counts", "labels", "responders")

    def __init__(
        self,
        base: GridBase,
        counts: np.ndarray | None = None,
        labels: dict[tuple[int, int], Counter] | None = None,
        responders: dict[tuple[int, int], set[str]] | None = None,
    ):
        self.base = base
        if counts is None:
            counts = np.zeros((GRID_SIDE, GRID_SIDE), dtype=np.int64)
        if counts.shape != (GRID_SIDE, GRID_SIDE):
            raise ValueError(f"counts must be 256x256, got {counts.shape}")
        self.counts = counts
        self.labels = labels if labels is not None else {}
        self.responders = responders if responders is not None else {}

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cell(self, x: int, y: int) -> Cell:
        return Cell(
            count=int(self.counts[y, x]),
            labels=dict(self.labels.get((y, x), ())),
            responders=frozenset(self.responders.get((y, x), ())),
        )

    def occupied(self) -> list[tuple[int, int]]:
        """(y, x) pairs of nonzero cells in row-major order."""
        ys, xs = np.nonzero(self.counts)
        return list(zip(ys.tolist(), xs.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ByteAxisGrid):
            return NotImplemented
        return (
            self.base == other.base
            and np.array_equal(self.counts, other.counts)
            and {k: dict(v) for k, v in self.labels.items()}
            == {k: dict(v) for k, v in other.labels.items()}
            and {k: set(v) for k, v in self.responders.items()}
            == {k: set(v) for k, v in other.responders.items()}
        )

    def __repr__(self) -> str:
        return f"ByteAxisGrid({self.base.text}, total={self.total})"


def empty_grid(base: GridBase) -> ByteAxisGrid:
    return ByteAxisGrid(base)


def _flush(counts: np.ndarray, idx: list[int], weights: list[int]) -> None:
    flat = np.bincount(idx, weights=weights, minlength=GRID_CELLS)
    counts += flat.astype(np.int64).reshape(GRID_SIDE, GRID_SIDE)


def build_mac_grid(oui: Oui, obs: Iterable[MacObservation]) -> ByteAxisGrid:
    """Accumulate observations from one OUI; y is octet 3, x is octet 4.

    Raises ContainmentError on the first observation from a different OUI.
    """
    counts = np.zeros((GRID_SIDE, GRID_SIDE), dtype=np.int64)
    labels: dict[tuple[int, int], Counter] = {}
    prefix = oui.prefix
    idx: list[int] = []
    weights: list[int] = []
    for ob in obs:
        o = ob.mac.octets
        if o[:3] != prefix:
            raise ContainmentError(f"{ob.mac} is not in OUI {oui}")
        y, x = o[3], o[4]
        idx.append(y * GRID_SIDE + x)
        weights.append(ob.weight)
        if ob.label is not None:
            bucket = labels.get((y, x))
            if bucket is None:
                bucket = labels[(y, x)] = Counter()
            bucket[ob.label] += ob.weight
        if len(idx) >= _CHUNK:
            _flush(counts, idx, weights)
            idx.clear()
            weights.clear()
    if idx:
        _flush(counts, idx, weights)
    return ByteAxisGrid(GridBase.for_oui(oui), counts, labels, {})


def build_v6_grid(base: Ipv6Prefix, obs: Iterable[V6Observation]) -> ByteAxisGrid:
    """Accumulate probe results; each probed /64 maps to one cell of base.

    Raises ContainmentError when a probed /64 lies outside base.
    """
    if base.length % 8 != 0 or base.length > 112:
        raise ValueError(f"grid base must be byte-aligned and <= /112, got /{base.length}")
    counts = np.zeros((GRID_SIDE, GRID_SIDE), dtype=np.int64)
    responders: dict[tuple[int, int], set[str]] = {}
    b = base.length // 8
    idx: list[int] = []
    for ob in obs:
        if not base.contains_prefix(ob.probed):
            raise ContainmentError(f"probed {ob.probed} is outside {base}")
        o = ob.probed.base.octets
        y, x = o[b], o[b + 1]
        idx.append(y * GRID_SIDE + x)
        bucket = responders.get((y, x))
        if bucket is None:
            bucket = responders[(y, x)] = set()
        bucket.add(str(ob.responder))
        if len(idx) >= _CHUNK:
            _flush(counts, idx, [1] * len(idx))
            idx.clear()
    if idx:
        _flush(counts, idx, [1] * len(idx))
    return ByteAxisGrid(GridBase.for_prefix(base), counts, {}, responders)


def merge_grids(a: ByteAxisGrid, b: ByteAxisGrid) -> ByteAxisGrid:
    """Cellwise sum of counts, multiset union of labels, union of responders."""
    if a.base != b.base:
        raise ValueError(f"cannot merge grids over {a.base.text} and {b.base.text}")
    labels = {k: Counter(v) for k, v in a.labels.items()}
    for k, v in b.labels.items():
        if k in labels:
            labels[k] = labels[k] + Counter(v)
        else:
            labels[k] = Counter(v)
    responders = {k: set(v) for k, v in a.responders.items()}
    for k, v in b.responders.items():
        responders.setdefault(k, set()).update(v)
    return ByteAxisGrid(a.base, a.counts + b.counts, labels, responders)


def occupancy(grid: ByteAxisGrid) -> float:
    """Fraction of the 65,536 cells with at least one observation."""
    return int(np.count_nonzero(grid.counts)) / GRID_CELLS


def grid_to_csv(grid: ByteAxisGrid) -> str:
    """Occupied cells as CSV with the base in a leading comment line.

    Columns are y,x,count,responders,labels.  responders is a ';'-joined
    sorted list of canonical IPv6 text; labels is a JSON object mapping
    label to multiplicity.  Empty collections serialize as empty fields.
    """
    out = io.StringIO()
    out.write(f"# base={grid.base.kind} {grid.base.text}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["y", "x", "count", "responders", "labels"])
    for y, x in grid.occupied():
        resp = ";".join(sorted(grid.responders.get((y, x), ())))
        labs = grid.labels.get((y, x))
        labs_text = json.dumps(dict(sorted(labs.items())), sort_keys=True) if labs else ""
        writer.writerow([y, x, int(grid.counts[y, x]), resp, labs_text])
    return out.getvalue()


def grid_from_csv(text: str) -> ByteAxisGrid:
    """Rebuild a grid from grid_to_csv output."""
    base = None
    rows = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if body.startswith("base="):
                kind, _, value = body[len("base=") :].partition(" ")
                base = GridBase.from_obj(
                    {"kind": kind, "oui": value, "prefix": value}
                )
            continue
        rows.append(stripped)
    if base is None:
        raise ValueError("missing '# base=...' comment line")
    if not rows or [f.strip() for f in next(csv.reader([rows[0]]))] != [
        "y",
        "x",
        "count",
        "responders",
        "labels",
    ]:
        raise ValueError("missing 'y,x,count,responders,labels' header")
    counts = np.zeros((GRID_SIDE, GRID_SIDE), dtype=np.int64)
    labels: dict[tuple[int, int], Counter] = {}
    responders: dict[tuple[int, int], set[str]] = {}
    for fields in csv.reader(rows[1:]):
        y, x, count = int(fields[0]), int(fields[1]), int(fields[2])
        counts[y, x] = count
        if fields[3]:
            responders[(y, x)] = set(fields[3].split(";"))
        if fields[4]:
            labels[(y, x)] = Counter(json.loads(fields[4]))
    return ByteAxisGrid(base, counts, labels, responders)


def grid_to_json(grid: ByteAxisGrid) -> str:
    """Full grid structure as a JSON document (occupied cells only)."""
    cells = []
    for y, x in grid.occupied():
        cells.append(
            {
                "y": y,
                "x": x,
                "count": int(grid.counts[y, x]),
                "responders": sorted(grid.responders.get((y, x), ())),
                "labels": dict(sorted(grid.labels.get((y, x), Counter()).items())),
            }
        )
    obj = {"base": grid.base.to_obj(), "total": grid.total, "cells": cells}
    return json.dumps(obj, indent=2, sort_keys=True)


def grid_from_json(text: str) -> ByteAxisGrid:
    """Rebuild a grid from grid_to_json output."""
    obj = json.loads(text)
    base = GridBase.from_obj(obj["base"])
    counts = np.zeros((GRID_SIDE, GRID_SIDE), dtype=np.int64)
    labels: dict[tuple[int, int], Counter] = {}
    responders: dict[tuple[int, int], set[str]] = {}
    for cell in obj["cells"]:
        y, x = cell["y"], cell["x"]
        counts[y, x] = cell["count"]
        if cell["responders"]:
            responders[(y, x)] = set(cell["responders"])
        if cell["labels"]:
            labels[(y, x)] = Counter(cell["labels"])
    return ByteAxisGrid(base, counts, labels, responders)
