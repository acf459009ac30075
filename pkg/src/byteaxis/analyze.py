"""Allocation-structure recovery from byte-axis grids.

Two analyses, one per grid kind:

  MAC grids: contiguous ranges of densely occupied y rows are "bands", the
  footprint of a manufacturer assigning fourth-octet ranges sequentially.

  IPv6 grids: each responder's occupied cells are folded into 16-bit
  offsets (y*256 + x) and the smallest aligned power-of-two block covering
  them is the inferred customer allocation; a /60 shows up as an aligned
  16-cell run, a /56 as a full row, a /64 as a single cell.  The envelope
  is a lower bound on the real allocation, since scans only see responsive
  /64s; exact_fill marks envelopes that are fully occupied.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .grid import GRID_SIDE, MAC_OUI, V6_PREFIX, ByteAxisGrid, GridBase, occupancy


@dataclass(frozen=True, slots=True)
class Band:
    """A contiguous range of occupied y rows in a MAC grid."""

    y_start: int
    y_end: int
    density: float  # fraction of the band's cells that are occupied

    def __post_init__(self):
        if not 0 <= self.y_start <= self.y_end <= 255:
            raise ValueError(f"bad band rows [{self.y_start}, {self.y_end}]")


@dataclass(frozen=True, slots=True)
class InferredAllocation:
    """Smallest aligned block covering one responder's cells."""

    responder_key: str
    prefix_len: int
    cells: int  # occupied cells attributed to this responder
    exact_fill: bool  # envelope fully occupied
    offsets: tuple[int, ...] = field(default=(), repr=False)


@dataclass(slots=True)
class AllocationReport:
    """Machine-readable summary of one grid's structure."""

    base: GridBase
    bands: list[Band]
    unit_histogram: dict[int, int]  # prefix_len -> responder count
    occupancy: float
    distinct_keys: int
    allocations: list[InferredAllocation]


def detect_bands(
    grid: ByteAxisGrid,
    min_row_fill: float = 1 / 64,
    max_gap_rows: int = 1,
) -> list[Band]:
    """Find maximal runs of active rows in a MAC grid.

    A row is active when at least min_row_fill*256 of its cells are
    occupied; runs separated by at most max_gap_rows inactive rows merge
    into one band.  Bands come back ordered by y_start.
    """
    if grid.base.kind != MAC_OUI:
        raise ValueError(f"band detection needs a mac_oui grid, got {grid.base.kind}")
    if not 0 < min_row_fill <= 1:
        raise ValueError(f"min_row_fill must be in (0, 1], got {min_row_fill}")
    if max_gap_rows < 0:
        raise ValueError(f"max_gap_rows must be >= 0, got {max_gap_rows}")
    occupied = grid.counts > 0
    row_fill = occupied.sum(axis=1)
    threshold = min_row_fill * GRID_SIDE
    active = row_fill >= threshold
    runs: list[list[int]] = []
    y = 0
    while y < GRID_SIDE:
        if active[y]:
            start = y
            while y < GRID_SIDE and active[y]:
                y += 1
            runs.append([start, y - 1])
        else:
            y += 1
    merged: list[list[int]] = []
    for run in runs:
        if merged and run[0] - merged[-1][1] - 1 <= max_gap_rows:
            merged[-1][1] = run[1]
        else:
            merged.append(run)
    bands = []
    for a, b in merged:
        filled = int(occupied[a : b + 1].sum())
        bands.append(Band(a, b, filled / (GRID_SIDE * (b - a + 1))))
    return bands


def infer_allocation_units(grid: ByteAxisGrid) -> list[InferredAllocation]:
    """Infer each responder's allocation size from its cell envelope.

    Cells become 16-bit offsets o = y*256 + x.  The smallest k with all of
    a responder's offsets equal under o >> k gives the envelope; the
    inferred unit is (base length + 16) - k bits, so 64 - k under a /48.
    exact_fill is true when the responder occupies all 2^k envelope cells.
    Results are sorted by responder key.
    """
    if grid.base.kind != V6_PREFIX:
        raise ValueError(f"allocation inference needs a v6_prefix grid, got {grid.base.kind}")
    unit_bits = grid.base.prefix.length + 16
    by_key: dict[str, list[int]] = {}
    for (y, x), keys in grid.responders.items():
        offset = y * GRID_SIDE + x
        for key in keys:
            by_key.setdefault(key, []).append(offset)
    out = []
    for key in sorted(by_key):
        offsets = sorted(by_key[key])
        first = offsets[0]
        spread = 0
        for o in offsets:
            spread |= o ^ first
        k = spread.bit_length()
        out.append(
            InferredAllocation(
                responder_key=key,
                prefix_len=unit_bits - k,
                cells=len(offsets),
                exact_fill=len(offsets) == 1 << k,
                offsets=tuple(offsets),
            )
        )
    return out


def summarize(
    grid: ByteAxisGrid,
    *,
    min_row_fill: float = 1 / 64,
    max_gap_rows: int = 1,
) -> AllocationReport:
    """Run the analysis matching the grid kind and assemble a report."""
    occ = occupancy(grid)
    if grid.base.kind == MAC_OUI:
        distinct = len({label for bucket in grid.labels.values() for label in bucket})
        bands = detect_bands(grid, min_row_fill, max_gap_rows)
        return AllocationReport(grid.base, bands, {}, occ, distinct, [])
    allocations = infer_allocation_units(grid)
    histogram = Counter(a.prefix_len for a in allocations)
    return AllocationReport(
        grid.base,
        [],
        dict(sorted(histogram.items())),
        occ,
        len(allocations),
        allocations,
    )


def report_to_json(report: AllocationReport) -> str:
    """Serialize a report; allocations carry their per-responder cell list."""
    obj = {
        "base": report.base.to_obj(),
        "occupancy": report.occupancy,
        "distinct_keys": report.distinct_keys,
        "bands": [
            {"y_start": b.y_start, "y_end": b.y_end, "density": b.density}
            for b in report.bands
        ],
        "unit_histogram": {str(k): v for k, v in sorted(report.unit_histogram.items())},
        "allocations": [
            {
                "responder": a.responder_key,
                "prefix_len": a.prefix_len,
                "cells": a.cells,
                "exact_fill": a.exact_fill,
                "cell_list": [[o // GRID_SIDE, o % GRID_SIDE] for o in a.offsets],
            }
            for a in report.allocations
        ],
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def report_from_json(text: str) -> AllocationReport:
    """Rebuild a report from report_to_json output."""
    obj = json.loads(text)
    bands = [Band(b["y_start"], b["y_end"], b["density"]) for b in obj["bands"]]
    allocations = [
        InferredAllocation(
            responder_key=a["responder"],
            prefix_len=a["prefix_len"],
            cells=a["cells"],
            exact_fill=a["exact_fill"],
            offsets=tuple(y * GRID_SIDE + x for y, x in a["cell_list"]),
        )
        for a in obj["allocations"]
    ]
    return AllocationReport(
        base=GridBase.from_obj(obj["base"]),
        bands=bands,
        unit_histogram={int(k): v for k, v in obj["unit_histogram"].items()},
        occupancy=obj["occupancy"],
        distinct_keys=obj["distinct_keys"],
        allocations=allocations,
    )
