"""Address value types and the byte-to-cell mappings behind byte-axis plots.

A byte-axis plot spreads two low-order address bytes over a 256x256 grid.
For MAC addresses the fourth octet goes on y and the fifth on x, so one cell
covers the 256 addresses sharing the first five octets.  For IPv6 the two
octets immediately after the base prefix play the same role: under a /48,
the 7th octet is y and the 8th is x, so one cell is one /64.

Everything here is an immutable value; all functions are pure.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from typing import NamedTuple

_HEX = frozenset("0123456789abcdefABCDEF")


class AddressParseError(ValueError):
    """Address or prefix text could not be parsed."""


class ContainmentError(ValueError):
    """An address lies outside the base (OUI or prefix) it is keyed against."""


class CellCoord(NamedTuple):
    """Grid cell position; both coordinates are byte values in [0, 255]."""

    x: int
    y: int


@dataclass(frozen=True, slots=True)
class MacAddress:
    """A 48-bit hardware address held as six raw octets.

    Canonical text form is lowercase hex pairs joined by ':'.
    """

    octets: bytes

    def __post_init__(self):
        object.__setattr__(self, "octets", bytes(self.octets))
        if len(self.octets) != 6:
            raise ValueError(f"MAC address needs 6 octets, got {len(self.octets)}")

    def __str__(self) -> str:
        return ":".join(f"{b:02x}" for b in self.octets)


@dataclass(frozen=True, slots=True)
class Oui:
    """A 24-bit allocation block: the first three octets of its MAC addresses.

    org_name is registry metadata and does not take part in equality/hashing.
    """

    prefix: bytes
    org_name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", bytes(self.prefix))
        if len(self.prefix) != 3:
            raise ValueError(f"OUI needs 3 octets, got {len(self.prefix)}")

    def __str__(self) -> str:
        return ":".join(f"{b:02x}" for b in self.prefix)

    def contains(self, mac: MacAddress) -> bool:
        return mac.octets[:3] == self.prefix


@dataclass(frozen=True, slots=True)
class Ipv6Address:
    """A 128-bit address held as sixteen raw octets.

    Canonical text form is the RFC 5952 shortest lowercase representation,
    which doubles as the stable responder key used for coloring.
    """

    octets: bytes

    def __post_init__(self):
        object.__setattr__(self, "octets", bytes(self.octets))
        if len(self.octets) != 16:
            raise ValueError(f"IPv6 address needs 16 octets, got {len(self.octets)}")

    def __str__(self) -> str:
        return str(ipaddress.IPv6Address(self.octets))


@dataclass(frozen=True, slots=True)
class Ipv6Prefix:
    """A CIDR block: base address plus prefix length, host bits all zero."""

    base: Ipv6Address
    length: int

    def __post_init__(self):
        if not 0 <= self.length <= 128:
            raise ValueError(f"prefix length {self.length} out of [0, 128]")
        value = int.from_bytes(self.base.octets, "big")
        if self.length < 128 and value & ((1 << (128 - self.length)) - 1):
            raise ValueError(f"nonzero bits beyond /{self.length} in {self.base}")

    def __str__(self) -> str:
        return f"{self.base}/{self.length}"

    def contains(self, addr: Ipv6Address) -> bool:
        if self.length == 0:
            return True
        a = int.from_bytes(addr.octets, "big")
        b = int.from_bytes(self.base.octets, "big")
        return (a ^ b) >> (128 - self.length) == 0

    def contains_prefix(self, other: "Ipv6Prefix") -> bool:
        return other.length >= self.length and self.contains(other.base)

    @classmethod
    def containing(cls, addr: Ipv6Address, length: int) -> "Ipv6Prefix":
        """The length-bit prefix that contains addr (host bits zeroed)."""
        if not 0 <= length <= 128:
            raise ValueError(f"prefix length {length} out of [0, 128]")
        value = int.from_bytes(addr.octets, "big")
        if length < 128:
            value &= ~((1 << (128 - length)) - 1)
        return cls(Ipv6Address(value.to_bytes(16, "big")), length)


def parse_mac(text: str) -> MacAddress:
    """Parse six hex pairs joined uniformly by ':' or '-', case-insensitive."""
    s = text.strip()
    if ":" in s and "-" in s:
        raise AddressParseError(f"mixed separators in {s!r}")
    sep = ":" if ":" in s else "-"
    groups = s.split(sep)
    if len(groups) != 6:
        raise AddressParseError(f"expected 6 octet groups in {s!r}, got {len(groups)}")
    out = bytearray(6)
    for i, g in enumerate(groups):
        if len(g) != 2 or g[0] not in _HEX or g[1] not in _HEX:
            raise AddressParseError(f"bad octet {g!r} in {s!r}")
        out[i] = int(g, 16)
    return MacAddress(bytes(out))


def parse_oui(text: str) -> Oui:
    """Parse three hex pairs joined by ':' or '-' (e.g. '08:3C:0C')."""
    s = text.strip()
    if ":" in s and "-" in s:
        raise AddressParseError(f"mixed separators in {s!r}")
    sep = ":" if ":" in s else "-"
    groups = s.split(sep)
    if len(groups) != 3:
        raise AddressParseError(f"expected 3 octet groups in {s!r}, got {len(groups)}")
    out = bytearray(3)
    for i, g in enumerate(groups):
        if len(g) != 2 or g[0] not in _HEX or g[1] not in _HEX:
            raise AddressParseError(f"bad octet {g!r} in {s!r}")
        out[i] = int(g, 16)
    return Oui(bytes(out))


def parse_ipv6(text: str) -> Ipv6Address:
    """Parse full or '::'-compressed IPv6 text into sixteen octets."""
    s = text.strip()
    if "%" in s:
        raise AddressParseError(f"scoped address not supported: {s!r}")
    try:
        return Ipv6Address(ipaddress.IPv6Address(s).packed)
    except ipaddress.AddressValueError as exc:
        raise AddressParseError(f"bad IPv6 address {s!r}: {exc}") from None


def parse_prefix(text: str) -> Ipv6Prefix:
    """Parse 'addr/len' CIDR text; host bits beyond len must be zero."""
    s = text.strip()
    if "/" not in s:
        raise AddressParseError(f"missing '/' in prefix {s!r}")
    addr_part, _, len_part = s.partition("/")
    try:
        length = int(len_part)
    except ValueError:
        raise AddressParseError(f"bad prefix length {len_part!r}") from None
    if not 0 <= length <= 128:
        raise AddressParseError(f"prefix length {length} out of [0, 128]")
    base = parse_ipv6(addr_part)
    try:
        return Ipv6Prefix(base, length)
    except ValueError as exc:
        raise AddressParseError(str(exc)) from None


def oui_of(mac: MacAddress) -> Oui:
    """The allocation block the address was assigned from (first 3 octets)."""
    return Oui(mac.octets[:3])


def is_locally_assigned(mac: MacAddress) -> bool:
    """True iff the U/L bit (0x02 of the first octet) is set."""
    return bool(mac.octets[0] & 0x02)


def is_multicast(mac: MacAddress) -> bool:
    """True iff the group bit (0x01 of the first octet) is set."""
    return bool(mac.octets[0] & 0x01)


def extract_mac_from_eui64(addr: Ipv6Address) -> MacAddress | None:
    """Recover the MAC embedded in an EUI-64 interface identifier.

    Returns None when octets 11-12 are not the ff:fe marker.  The recovered
    first octet has the U/L bit flipped back (RFC 4291 Appendix A inverse).
    """
    o = addr.octets
    if o[11] != 0xFF or o[12] != 0xFE:
        return None
    return MacAddress(bytes((o[8] ^ 0x02,)) + o[9:11] + o[13:16])


_LINK_LOCAL = None  # initialized below, after parse_prefix exists


def embed_mac_as_eui64(mac: MacAddress, prefix: Ipv6Prefix | None = None) -> Ipv6Address:
    """Build the SLAAC address for mac under a /64 (default fe80::/64)."""
    if prefix is None:
        prefix = _LINK_LOCAL
    if prefix.length != 64:
        raise ValueError(f"EUI-64 embedding needs a /64, got /{prefix.length}")
    o = mac.octets
    iid = bytes((o[0] ^ 0x02,)) + o[1:3] + b"\xff\xfe" + o[3:6]
    return Ipv6Address(prefix.base.octets[:8] + iid)


_LINK_LOCAL = parse_prefix("fe80::/64")


def mac_cell(mac: MacAddress) -> CellCoord:
    """Grid cell of a MAC address: y is the fourth octet, x the fifth."""
    o = mac.octets
    return CellCoord(x=o[4], y=o[3])


def v6_cell(addr: Ipv6Address, base: Ipv6Prefix) -> CellCoord:
    """Grid cell of an address within base: the two octets after the prefix.

    base.length must be byte-aligned and at most 112.  Under a /48 the cell
    is (x=8th octet, y=7th octet), i.e. one cell per /64.
    """
    if base.length % 8 != 0 or base.length > 112:
        raise ValueError(f"grid base must be byte-aligned and <= /112, got /{base.length}")
    if not base.contains(addr):
        raise ContainmentError(f"{addr} is outside {base}")
    b = base.length // 8
    return CellCoord(x=addr.octets[b + 1], y=addr.octets[b])
