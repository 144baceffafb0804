"""Command line front end: ``linksubdiv validate|build-rule|subdivide|census|render``.

Exit status is 0 on success, 2 when the input diagram is rejected (the
validation report is printed) and 1 on an internal invariant breach or an
I/O failure.  Every failure prints one line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .engine import (SPHERE, EngineError, census_series, collapse_merged_edges,
                     emit_census_csv, initial_tiling, maps_isomorphic, replacement_evolve,
                     subdivide_n, total_series)
from .layout import LayoutError, crossing_free, tutte_layout
from .link_diagram import PDSyntaxError, build_planar_map, parse_pd_code, validate
from .planar_map import MapError
from .polyhedral import checkerboard, truncate
from .recurrence import SeriesTooShort, fit_recurrence
from .render import emit_svg, emit_tiling_json
from .rules import RuleError, derive_replacement_rule, emit_rule_json, to_subdivision_rule

EXIT_OK, EXIT_INTERNAL, EXIT_REJECTED = 0, 1, 2


class Rejected(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    depth: int = 0
    seed: str = SPHERE
    flip_orientation: bool = False
    oracle_check: bool = False
    fmt: str | None = None
    out: Path | None = None
    render: Path | None = None
    census: Path | None = None
    type_budget: int = 10_000
    max_order: int = 12


def _load(cfg: RunConfig):
    try:
        text = cfg.input.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {cfg.input}: {exc.strerror or exc}") from exc
    diagram = parse_pd_code(text)
    cmap = build_planar_map(diagram)
    report = validate(diagram, cmap)
    return diagram, cmap, report


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _rule(cfg: RunConfig):
    diagram, cmap, report = _load(cfg)
    if not report.admissible:
        for line in report.lines():
            print(line)
        raise Rejected("diagram is not a prime, reduced, non-split alternating diagram")
    orient = checkerboard(cmap, diagram, cfg.flip_orientation)
    cx = truncate(cmap, orient)
    rule = to_subdivision_rule(derive_replacement_rule(cx, cfg.type_budget), cfg.type_budget)
    return cx, rule


def _stages(cfg: RunConfig):
    cx, rule = _rule(cfg)
    stages = subdivide_n(rule, initial_tiling(rule, cfg.seed), cfg.depth)
    if cfg.oracle_check:
        if cfg.seed != SPHERE:
            raise ValueError("--oracle-check needs --seed sphere")
        for d, t in enumerate(stages):
            ok, _ = maps_isomorphic(collapse_merged_edges(t), replacement_evolve(cx, d))
            if not ok:
                raise EngineError(f"stage {d} differs from the replacement oracle")
            print(f"oracle stage {d}: isomorphic")
    return cx, rule, stages


def cmd_validate(cfg: RunConfig) -> int:
    _, _, report = _load(cfg)
    for line in report.lines():
        print(line)
    if not report.admissible:
        print("error: diagram rejected")
        return EXIT_REJECTED
    return EXIT_OK


def cmd_build_rule(cfg: RunConfig) -> int:
    _, rule = _rule(cfg)
    if cfg.fmt in (None, "json"):
        _write(cfg.out, emit_rule_json(rule))
    else:
        raise ValueError(f"build-rule writes json, not {cfg.fmt}")
    return EXIT_OK


def _render_svg(t) -> str:
    layout = tutte_layout(t)
    check = crossing_free(t, layout)
    if not check.ok:
        raise LayoutError(f"layout has overlapping faces {list(check.bad_faces)[:5]}")
    return emit_svg(t, layout)


def cmd_subdivide(cfg: RunConfig) -> int:
    _, rule, stages = _stages(cfg)
    final = stages[-1]
    csv_text = emit_census_csv(census_series(stages), rule.type_ids() + ["trunc"])
    if cfg.render is not None:
        _write(cfg.render, _render_svg(final))
    census_path = cfg.census
    if census_path is None and cfg.render is not None:
        census_path = cfg.render.with_suffix(".csv")
    if cfg.fmt == "csv":
        _write(cfg.out, csv_text)
    elif cfg.fmt == "svg":
        _write(cfg.out, _render_svg(final))
    elif cfg.out is not None:
        _write(cfg.out, emit_tiling_json(final))
    if census_path is not None:
        _write(census_path, csv_text)
    elif cfg.out is None and cfg.fmt is None:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_census(cfg: RunConfig) -> int:
    _, rule, stages = _stages(cfg)
    if cfg.fmt == "json":
        series = total_series(stages)
        try:
            rec = fit_recurrence(series, cfg.max_order)
        except SeriesTooShort as exc:
            raise ValueError(str(exc)) from exc
        if rec is None:
            print("error: no recurrence found at budget")
            return EXIT_INTERNAL
        _write(cfg.out, rec.to_json())
    else:
        _write(cfg.out, emit_census_csv(census_series(stages), rule.type_ids() + ["trunc"]))
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    _, _, stages = _stages(cfg)
    final = stages[-1]
    if cfg.fmt in (None, "svg"):
        _write(cfg.out, _render_svg(final))
    elif cfg.fmt == "json":
        _write(cfg.out, emit_tiling_json(final))
    else:
        raise ValueError(f"render writes svg or json, not {cfg.fmt}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "build-rule": cmd_build_rule,
            "subdivide": cmd_subdivide, "census": cmd_census, "render": cmd_render}


def run(cfg: RunConfig) -> int:
    if cfg.depth < 0:
        print("error: --depth must be non-negative")
        return EXIT_INTERNAL
    try:
        return COMMANDS[cfg.command](cfg)
    except Rejected as exc:
        print(f"error: {exc}")
        return EXIT_REJECTED
    except (PDSyntaxError, MapError) as exc:
        print(f"error: {exc}")
        return EXIT_REJECTED
    except (RuleError, EngineError, LayoutError) as exc:
        print(f"error: invariant breach: {exc}")
        return EXIT_INTERNAL
    except (OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}")
        return EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linksubdiv",
                                description="Subdivision rules for alternating link complements.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("input", type=Path, help="PD code file")
        s.add_argument("--flip-orientation", action="store_true",
                       help="swap the clockwise and counterclockwise classes")
        s.add_argument("--out", type=Path, help="output path (default: stdout)")
        s.add_argument("--format", dest="fmt", choices=("svg", "json", "csv"))
        s.add_argument("--type-budget", type=int, default=10_000)
        if name in ("subdivide", "census", "render"):
            s.add_argument("--seed", default=SPHERE, help="tile type id or 'sphere'")
            s.add_argument("--depth", type=int, default=0)
            s.add_argument("--oracle-check", action="store_true",
                           help="compare every stage with the replacement oracle")
        if name == "subdivide":
            s.add_argument("--render", type=Path, help="also write an SVG of the last stage")
            s.add_argument("--census", type=Path, help="census CSV path")
        if name == "census":
            s.add_argument("--max-order", type=int, default=12)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command, input=args.input,
                    depth=getattr(args, "depth", 0), seed=getattr(args, "seed", SPHERE),
                    flip_orientation=args.flip_orientation,
                    oracle_check=getattr(args, "oracle_check", False), fmt=args.fmt,
                    out=args.out, render=getattr(args, "render", None),
                    census=getattr(args, "census", None), type_budget=args.type_budget,
                    max_order=getattr(args, "max_order", 12))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
