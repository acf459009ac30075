"""Byte-axis plots: 256x256 visualizations of MAC and IPv6 allocations.

Observed addresses from one allocation block (a MAC OUI or an IPv6 prefix)
are spread over a grid by two of their low-order bytes; the geometry of the
occupied cells exposes how the block's owner hands addresses out.  The
package ingests observation files, builds grids, renders deterministic
PNG/SVG plots, and recovers allocation structure (MAC assignment bands,
IPv6 customer-subnet sizes) as machine-readable reports.
"""

from .addr import (
    AddressParseError,
    CellCoord,
    ContainmentError,
    Ipv6Address,
    Ipv6Prefix,
    MacAddress,
    Oui,
    embed_mac_as_eui64,
    extract_mac_from_eui64,
    is_locally_assigned,
    is_multicast,
    mac_cell,
    oui_of,
    parse_ipv6,
    parse_mac,
    parse_oui,
    parse_prefix,
    v6_cell,
)
from .analyze import (
    AllocationReport,
    Band,
    InferredAllocation,
    detect_bands,
    infer_allocation_units,
    report_from_json,
    report_to_json,
    summarize,
)
from .grid import (
    ByteAxisGrid,
    Cell,
    GridBase,
    build_mac_grid,
    build_v6_grid,
    empty_grid,
    grid_from_csv,
    grid_from_json,
    grid_to_csv,
    grid_to_json,
    merge_grids,
    occupancy,
)
from .ingest import (
    IngestError,
    IngestStats,
    MacObservation,
    OuiRegistry,
    V6Observation,
    derive_macs_from_v6,
    group_mac_by_oui,
    group_v6_by_prefix,
    iter_mac_observations,
    iter_v6_observations,
    load_mac_observations,
    load_oui_registry,
    load_v6_observations,
)
from .render import (
    DEFAULT_PALETTE,
    ColorAssignment,
    ColorMode,
    RenderConfig,
    assign_colors,
    render_png,
    render_svg,
    responder_color,
)

__version__ = "0.1.0"

__all__ = [
    "AddressParseError",
    "AllocationReport",
    "Band",
    "ByteAxisGrid",
    "Cell",
    "CellCoord",
    "ColorAssignment",
    "ColorMode",
    "ContainmentError",
    "DEFAULT_PALETTE",
    "GridBase",
    "InferredAllocation",
    "IngestError",
    "IngestStats",
    "Ipv6Address",
    "Ipv6Prefix",
    "MacAddress",
    "MacObservation",
    "Oui",
    "OuiRegistry",
    "RenderConfig",
    "V6Observation",
    "assign_colors",
    "build_mac_grid",
    "build_v6_grid",
    "derive_macs_from_v6",
    "detect_bands",
    "embed_mac_as_eui64",
    "empty_grid",
    "extract_mac_from_eui64",
    "grid_from_csv",
    "grid_from_json",
    "grid_to_csv",
    "grid_to_json",
    "group_mac_by_oui",
    "group_v6_by_prefix",
    "infer_allocation_units",
    "is_locally_assigned",
    "is_multicast",
    "iter_mac_observations",
    "iter_v6_observations",
    "load_mac_observations",
    "load_oui_registry",
    "load_v6_observations",
    "mac_cell",
    "merge_grids",
    "occupancy",
    "oui_of",
    "parse_ipv6",
    "parse_mac",
    "parse_oui",
    "parse_prefix",
    "render_png",
    "render_svg",
    "report_from_json",
    "report_to_json",
    "responder_color",
    "summarize",
    "v6_cell",
]
