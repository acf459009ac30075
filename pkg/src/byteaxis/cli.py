"""Command-line interface: observation files in, plots and reports out.

Subcommands:

  mac      byte-axis plots of MAC observations, one per OUI
  v6       byte-axis plots of IPv6 probe results, one per base prefix
  analyze  allocation reports (JSON) instead of images

Exit codes: 0 success, 1 input/validation failure, 2 I/O failure.
Diagnostics go to stderr; data and JSON go to files or stdout only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .addr import AddressParseError, ContainmentError, Oui, oui_of, parse_oui, parse_prefix
from .analyze import report_to_json, summarize
from .grid import ByteAxisGrid, build_mac_grid, build_v6_grid
from .ingest import (
    IngestError,
    OuiRegistry,
    group_mac_by_oui,
    group_v6_by_prefix,
    iter_mac_observations,
    iter_v6_observations,
    load_mac_observations,
    load_oui_registry,
    load_v6_observations,
)
from .render import (
    CATEGORICAL,
    MONOCHROME,
    RESPONDER,
    ColorMode,
    RenderConfig,
    assign_colors,
    render_png,
    render_svg,
)

HUE_SEED_ENV = "BYTEAXIS_HUE_SEED"

_MODE_NAMES = {"mono": MONOCHROME, "categorical": CATEGORICAL, "responder": RESPONDER}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract reserves 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _warn(message: str) -> None:
    print(f"byteaxis: {message}", file=sys.stderr)


def _parse_rgb(text: str) -> tuple[int, int, int]:
    s = text.strip().lstrip("#")
    if len(s) != 6 or any(c not in "0123456789abcdefABCDEF" for c in s):
        raise AddressParseError(f"bad RRGGBB color {text!r}")
    return (int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))


def _hue_seed(args) -> int:
    if args.hue_seed is not None:
        return args.hue_seed
    env = os.environ.get(HUE_SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"bad {HUE_SEED_ENV} value {env!r}") from None
    return 0


def _safe_base(text: str) -> str:
    return text.replace(":", "-").replace("/", "_")


def _expand(template: str, base_text: str, auto: bool) -> str:
    if auto and "{base}" not in template:
        raise ValueError("output template needs a {base} placeholder with auto base selection")
    return template.replace("{base}", _safe_base(base_text))


def _color_mode(args, default: str) -> ColorMode:
    name = args.color_mode or default
    if name not in _MODE_NAMES:
        raise ValueError(f"unknown color mode {name!r}")
    kind = _MODE_NAMES[name]
    foreground = _parse_rgb(args.foreground)
    if kind == MONOCHROME:
        return ColorMode(MONOCHROME, foreground=foreground)
    if kind == CATEGORICAL:
        return ColorMode(CATEGORICAL, foreground=foreground)
    return ColorMode(RESPONDER, foreground=foreground, hue_seed=_hue_seed(args))


def _render_config(args, title: str | None = None) -> RenderConfig:
    return RenderConfig(
        background=_parse_rgb(args.background),
        scale=args.scale,
        legend=args.legend,
        title=title,
    )


def _write_image(path: str, grid: ByteAxisGrid, mode: ColorMode, cfg: RenderConfig) -> None:
    colors = assign_colors(grid, mode)
    for warning in colors.warnings:
        _warn(warning)
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        Path(path).write_bytes(render_png(grid, colors, cfg))
    elif suffix == ".svg":
        Path(path).write_text(render_svg(grid, colors, cfg), encoding="utf-8")
    else:
        raise ValueError(f"output path must end in .png or .svg, got {path!r}")


def _write_report(path: str | None, reports: list, auto: bool) -> None:
    texts = [report_to_json(r) for r in reports]
    if path is None:
        if auto:
            print(json.dumps([json.loads(t) for t in texts], indent=2, sort_keys=True))
        elif texts:
            print(texts[0])
        return
    if auto:
        for report, text in zip(reports, texts):
            Path(_expand(path, report.base.text, auto)).write_text(text + "\n", encoding="utf-8")
    else:
        Path(path).write_text(texts[0] + "\n", encoding="utf-8")


def run_mac(args) -> int:
    registry = load_oui_registry(args.registry) if args.registry else None
    mode = _color_mode(args, default="mono")
    if mode.kind == RESPONDER:
        raise ValueError("responder coloring needs v6 probe data; use mono or categorical")
    auto = args.oui == "auto"
    grids: list[ByteAxisGrid] = []
    if auto:
        obs = load_mac_observations(
            args.input,
            args.format,
            keep_locally_assigned=args.keep_locally_assigned,
            strict=args.strict,
        )
        groups = group_mac_by_oui(obs)
        for oui in sorted(groups, key=str):
            grids.append(build_mac_grid(oui, groups[oui]))
        if not grids:
            _warn("no observations; nothing to plot")
    else:
        oui = parse_oui(args.oui)
        stream = iter_mac_observations(
            args.input,
            args.format,
            keep_locally_assigned=args.keep_locally_assigned,
            strict=args.strict,
        )
        grid = build_mac_grid(oui, (ob for ob in stream if oui_of(ob.mac) == oui))
        if grid.total == 0:
            _warn(f"no observations for OUI {oui}; no image written")
        else:
            grids.append(grid)
    for grid in grids:
        title = None
        if registry is not None:
            org = registry.lookup(grid.base.oui)
            title = f"{grid.base.oui} {org}" if org else str(grid.base.oui)
        _write_image(_expand(args.out, grid.base.text, auto), grid, mode, _render_config(args, title))
    if args.report and grids:
        _write_report(args.report, [summarize(g) for g in grids], auto)
    return 0


def run_v6(args) -> int:
    mode = _color_mode(args, default="responder")
    if mode.kind == CATEGORICAL:
        raise ValueError("categorical coloring needs labeled MAC data; use responder or mono")
    auto = args.prefix == "auto"
    grids: list[ByteAxisGrid] = []
    if auto:
        obs = load_v6_observations(args.input, strict=args.strict)
        groups = group_v6_by_prefix(obs, 48)
        for base in sorted(groups, key=str):
            grids.append(build_v6_grid(base, groups[base]))
        if not grids:
            _warn("no observations; nothing to plot")
    else:
        base = parse_prefix(args.prefix)
        grid = build_v6_grid(base, iter_v6_observations(args.input, strict=args.strict))
        if grid.total == 0:
            _warn(f"no observations for {base}; no image written")
        else:
            grids.append(grid)
    for grid in grids:
        _write_image(_expand(args.out, grid.base.text, auto), grid, mode, _render_config(args))
    if args.report and grids:
        _write_report(args.report, [summarize(g) for g in grids], auto)
    return 0


def _summarize_mac(grid: ByteAxisGrid, args):
    return summarize(grid, min_row_fill=args.min_row_fill, max_gap_rows=args.max_gap_rows)


def run_analyze(args) -> int:
    if (args.oui is None) == (args.prefix is None):
        raise ValueError("analyze needs exactly one of --oui or --prefix")
    reports = []
    if args.oui is not None:
        auto = args.oui == "auto"
        if auto:
            obs = load_mac_observations(
                args.input,
                args.format,
                keep_locally_assigned=args.keep_locally_assigned,
                strict=args.strict,
            )
            groups = group_mac_by_oui(obs)
            for oui in sorted(groups, key=str):
                reports.append(_summarize_mac(build_mac_grid(oui, groups[oui]), args))
        else:
            oui = parse_oui(args.oui)
            stream = iter_mac_observations(
                args.input,
                args.format,
                keep_locally_assigned=args.keep_locally_assigned,
                strict=args.strict,
            )
            grid = build_mac_grid(oui, (ob for ob in stream if oui_of(ob.mac) == oui))
            reports.append(_summarize_mac(grid, args))
    else:
        auto = args.prefix == "auto"
        if auto:
            obs = load_v6_observations(args.input, strict=args.strict)
            groups = group_v6_by_prefix(obs, 48)
            for base in sorted(groups, key=str):
                reports.append(summarize(build_v6_grid(base, groups[base])))
        else:
            base = parse_prefix(args.prefix)
            grid = build_v6_grid(base, iter_v6_observations(args.input, strict=args.strict))
            reports.append(summarize(grid))
    _write_report(args.out, reports, auto)
    return 0


def _add_common(sub: argparse.ArgumentParser, *, with_format: bool) -> None:
    sub.add_argument("input", help="observation file")
    if with_format:
        sub.add_argument("--format", choices=["plain", "csv"], default="plain",
                         help="MAC input layout (default plain)")
        sub.add_argument("--keep-locally-assigned", action="store_true",
                         help="keep locally-assigned MACs instead of dropping them")
    strictness = sub.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=True,
                            help="fail on unparseable lines (default)")
    strictness.add_argument("--lenient", dest="strict", action="store_false",
                            help="skip unparseable lines with a count")


def _add_render(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--color-mode", choices=sorted(_MODE_NAMES), default=None,
                     help="cell coloring (default: mono for mac, responder for v6)")
    sub.add_argument("--foreground", default="ff0000", metavar="RRGGBB",
                     help="monochrome/fallback cell color (default ff0000)")
    sub.add_argument("--background", default="000000", metavar="RRGGBB",
                     help="background color (default 000000)")
    sub.add_argument("--scale", type=int, default=3, help="pixels per cell (default 3)")
    sub.add_argument("--legend", action="store_true", help="draw the categorical legend")
    sub.add_argument("--hue-seed", type=int, default=None,
                     help=f"responder hue seed (default ${HUE_SEED_ENV} or 0)")
    sub.add_argument("--out", required=True,
                     help="image path (.png or .svg); use {base} with auto selection")
    sub.add_argument("--report", default=None,
                     help="also write an allocation report JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="byteaxis",
                     description="Byte-axis plots and allocation analysis for "
                                 "MAC and IPv6 observations.")
    commands = parser.add_subparsers(dest="command", required=True)

    mac = commands.add_parser("mac", parents=[], help="plot MAC observations by OUI")
    _add_common(mac, with_format=True)
    mac.add_argument("--oui", default="auto", metavar="XX:XX:XX|auto",
                     help="OUI to plot, or auto for one plot per observed OUI")
    mac.add_argument("--registry", default=None,
                     help="IEEE oui.txt path; adds org names to plot titles")
    _add_render(mac)
    mac.set_defaults(func=run_mac)

    v6 = commands.add_parser("v6", help="plot IPv6 probe responses by base prefix")
    _add_common(v6, with_format=False)
    v6.add_argument("--prefix", required=True, metavar="CIDR|auto",
                    help="base prefix to plot, or auto for one plot per observed /48")
    _add_render(v6)
    v6.set_defaults(func=run_v6)

    analyze = commands.add_parser("analyze", help="emit allocation report JSON, no images")
    _add_common(analyze, with_format=True)
    analyze.add_argument("--oui", default=None, metavar="XX:XX:XX|auto",
                         help="analyze MAC input for this OUI (or auto)")
    analyze.add_argument("--prefix", default=None, metavar="CIDR|auto",
                         help="analyze v6 input for this base prefix (or auto)")
    analyze.add_argument("--min-row-fill", type=float, default=1 / 64,
                         help="band detection: min fraction of occupied cells per row")
    analyze.add_argument("--max-gap-rows", type=int, default=1,
                         help="band detection: inactive rows bridged inside a band")
    analyze.add_argument("--out", default=None,
                         help="report path (default stdout); use {base} with auto")
    analyze.set_defaults(func=run_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AddressParseError, ContainmentError, IngestError, ValueError) as exc:
        _warn(str(exc))
        return 1
    except OSError as exc:
        _warn(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
