"""Observation-file loaders and grouping helpers.

Input formats (all UTF-8 text; blank lines and lines starting with '#' are
skipped in every format):

  plain MAC list   one address per line
  MAC CSV          header ``mac,label[,count]``; label may be empty; count
                   defaults to 1
  V6 CSV           header ``probed,responder``; probed is a /64 in CIDR form
                   or a bare address (truncated to its /64)
  IEEE registry    the published oui.txt layout; lines matching
                   ``XX-XX-XX   (hex)    Org Name`` are indexed, the rest
                   are ignored

Records with quoted embedded newlines are not supported; one record per
line keeps error line numbers exact.

Loaders come in two flavors: ``iter_*`` generators that stream records one
at a time, and ``load_*`` wrappers that return lists.  Pipelines that care
about memory (millions of rows into one grid) should feed the iterators
straight into the grid builders.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Union

from .addr import (
    Ipv6Address,
    Ipv6Prefix,
    MacAddress,
    Oui,
    AddressParseError,
    extract_mac_from_eui64,
    is_locally_assigned,
    oui_of,
    parse_ipv6,
    parse_mac,
    parse_prefix,
)

log = logging.getLogger(__name__)

Source = Union[str, Path, bytes, BinaryIO]


class IngestError(ValueError):
    """A line of an observation file could not be parsed (strict mode)."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class MacObservation:
    """One observed MAC with an optional categorical label and a count."""

    mac: MacAddress
    label: str | None = None
    weight: int = 1

    def __post_init__(self):
        if self.label is not None:
            stripped = self.label.strip()
            if not stripped:
                raise ValueError("label must be non-empty after trimming")
            object.__setattr__(self, "label", stripped)
        if self.weight < 1:
            raise ValueError(f"weight must be >= 1, got {self.weight}")


@dataclass(frozen=True, slots=True)
class V6Observation:
    """One probed /64 and the address that answered the probe."""

    probed: Ipv6Prefix
    responder: Ipv6Address

    def __post_init__(self):
        if isinstance(self.probed, Ipv6Address):
            object.__setattr__(self, "probed", Ipv6Prefix.containing(self.probed, 64))
        elif self.probed.length != 64:
            raise ValueError(f"probed prefix must be a /64, got /{self.probed.length}")


@dataclass(slots=True)
class OuiRegistry:
    """OUI -> organization name mapping from the IEEE registry file."""

    entries: dict[Oui, str] = field(default_factory=dict)

    def lookup(self, oui: Oui) -> str | None:
        return self.entries.get(oui)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(slots=True)
class IngestStats:
    """Bookkeeping filled by the loaders when passed via ``stats=``."""

    records: int = 0
    skipped_lines: int = 0
    dropped_locally_assigned: int = 0


def _lines(source: Source) -> Iterator[tuple[int, str]]:
    """Yield (line number, decoded line) pairs, 1-based."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            yield from enumerate((ln.decode("utf-8") for ln in fh), start=1)
        return
    if isinstance(source, bytes):
        yield from enumerate(source.decode("utf-8").splitlines(), start=1)
        return
    yield from enumerate((ln.decode("utf-8") for ln in source), start=1)


def _content_lines(source: Source) -> Iterator[tuple[int, str]]:
    for n, raw in _lines(source):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield n, line


def _csv_fields(line: str) -> list[str]:
    return next(csv.reader([line]))


def iter_mac_observations(
    source: Source,
    format: str = "plain",
    *,
    keep_locally_assigned: bool = False,
    strict: bool = True,
    stats: IngestStats | None = None,
) -> Iterator[MacObservation]:
    """Stream MAC observations from a plain list or a mac,label[,count] CSV.

    Locally-assigned addresses are dropped unless keep_locally_assigned is
    set.  In strict mode (default) a bad line raises IngestError with its
    line number; in lenient mode bad lines are counted and skipped.
    """
    if format not in ("plain", "csv"):
        raise ValueError(f"unknown format {format!r}")
    if stats is None:
        stats = IngestStats()
    saw_header = False
    for n, line in _content_lines(source):
        try:
            if format == "plain":
                obs = MacObservation(parse_mac(line))
            else:
                fields = _csv_fields(line)
                if not saw_header:
                    header = [f.strip().lower() for f in fields]
                    if header not in (["mac", "label"], ["mac", "label", "count"]):
                        raise AddressParseError(
                            f"expected header 'mac,label[,count]', got {line!r}"
                        )
                    saw_header = True
                    continue
                if len(fields) not in (2, 3):
                    raise AddressParseError(f"expected 2 or 3 fields, got {len(fields)}")
                mac = parse_mac(fields[0])
                label = fields[1].strip() or None
                weight = 1
                if len(fields) == 3 and fields[2].strip():
                    try:
                        weight = int(fields[2])
                    except ValueError:
                        raise AddressParseError(f"bad count {fields[2]!r}") from None
                    if weight < 1:
                        raise AddressParseError(f"count must be >= 1, got {weight}")
                obs = MacObservation(mac, label, weight)
        except AddressParseError as exc:
            if strict:
                raise IngestError(str(exc), n) from None
            stats.skipped_lines += 1
            continue
        if not keep_locally_assigned and is_locally_assigned(obs.mac):
            stats.dropped_locally_assigned += 1
            continue
        stats.records += 1
        yield obs
    if stats.skipped_lines:
        log.warning("skipped %d unparseable lines", stats.skipped_lines)


def load_mac_observations(
    source: Source,
    format: str = "plain",
    *,
    keep_locally_assigned: bool = False,
    strict: bool = True,
    stats: IngestStats | None = None,
) -> list[MacObservation]:
    """List form of iter_mac_observations, records in input order."""
    return list(
        iter_mac_observations(
            source,
            format,
            keep_locally_assigned=keep_locally_assigned,
            strict=strict,
            stats=stats,
        )
    )


def iter_v6_observations(
    source: Source,
    *,
    strict: bool = True,
    stats: IngestStats | None = None,
) -> Iterator[V6Observation]:
    """Stream probe results from a probed,responder CSV."""
    if stats is None:
        stats = IngestStats()
    saw_header = False
    for n, line in _content_lines(source):
        try:
            fields = _csv_fields(line)
            if not saw_header:
                header = [f.strip().lower() for f in fields]
                if header != ["probed", "responder"]:
                    raise AddressParseError(
                        f"expected header 'probed,responder', got {line!r}"
                    )
                saw_header = True
                continue
            if len(fields) != 2:
                raise AddressParseError(f"expected 2 fields, got {len(fields)}")
            probed_text = fields[0].strip()
            if "/" in probed_text:
                probed = parse_prefix(probed_text)
                if probed.length != 64:
                    raise AddressParseError(f"probed prefix must be a /64, got {probed}")
            else:
                probed = Ipv6Prefix.containing(parse_ipv6(probed_text), 64)
            obs = V6Observation(probed, parse_ipv6(fields[1]))
        except AddressParseError as exc:
            if strict:
                raise IngestError(str(exc), n) from None
            stats.skipped_lines += 1
            continue
        stats.records += 1
        yield obs
    if stats.skipped_lines:
        log.warning("skipped %d unparseable lines", stats.skipped_lines)


def load_v6_observations(
    source: Source,
    *,
    strict: bool = True,
    stats: IngestStats | None = None,
) -> list[V6Observation]:
    """List form of iter_v6_observations, records in input order."""
    return list(iter_v6_observations(source, strict=strict, stats=stats))


_REGISTRY_LINE = re.compile(
    r"^\s*([0-9A-Fa-f]{2})-([0-9A-Fa-f]{2})-([0-9A-Fa-f]{2})\s+\(hex\)\s+(.+?)\s*$"
)


def load_oui_registry(source: Source) -> OuiRegistry:
    """Index the hex lines of an IEEE oui.txt file; later duplicates win."""
    registry = OuiRegistry()
    for _, raw in _lines(source):
        m = _REGISTRY_LINE.match(raw)
        if not m:
            continue
        prefix = bytes(int(m.group(i), 16) for i in (1, 2, 3))
        registry.entries[Oui(prefix)] = m.group(4)
    return registry


def derive_macs_from_v6(addrs: Iterable[Ipv6Address]) -> list[MacObservation]:
    """Extract the MACs of EUI-64 addresses; non-EUI-64 inputs are dropped."""
    out = []
    for addr in addrs:
        mac = extract_mac_from_eui64(addr)
        if mac is not None:
            out.append(MacObservation(mac))
    return out


def group_mac_by_oui(obs: Iterable[MacObservation]) -> dict[Oui, list[MacObservation]]:
    """Partition observations by OUI, preserving order within each group."""
    groups: dict[Oui, list[MacObservation]] = {}
    for ob in obs:
        groups.setdefault(oui_of(ob.mac), []).append(ob)
    return groups


def group_v6_by_prefix(
    obs: Iterable[V6Observation], length: int = 48
) -> dict[Ipv6Prefix, list[V6Observation]]:
    """Partition probe results by the length-bit prefix of the probed /64."""
    if length > 64:
        raise ValueError(f"grouping prefix must be <= /64, got /{length}")
    groups: dict[Ipv6Prefix, list[V6Observation]] = {}
    for ob in obs:
        base = Ipv6Prefix.containing(ob.probed.base, length)
        groups.setdefault(base, []).append(ob)
    return groups
