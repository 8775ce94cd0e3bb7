"""Command-line entry point.

Subcommands cover the scheduler (``eldredge``), the divide-and-merge
optimizer (``hybrid``, ``reproduce``), crosstalk budgeting (``crosstalk``,
``colors``, ``pulses``), echo sequencing (``echo``, ``echo-verify``), the
state-vector check (``verify``), and figure rendering (``report``).

Every subcommand accepts ``--config FILE`` pointing at a JSON object whose
keys mirror that subcommand's flags; explicit flags override file values and
unknown keys are rejected.  Output is deterministic: floats are printed with
12 significant digits, so identical inputs give byte-identical artifacts.
Exit codes: 0 success, 1 domain error (message names the violated
precondition), 2 bad flags or config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import cascade, crosstalk, echo, hybrid, lattice, qsim


class ConfigError(Exception):
    """Bad --config contents; maps to exit code 2 like any other flag error."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round12(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(_round12(payload), indent=2) + "\n", out)


def _emit_csv(header: str, rows, out: str | None) -> None:
    _emit("\n".join([header, *rows]) + "\n", out)


# ---------------------------------------------------------------------------
# config merging

_TYPES = {
    "alpha": float,
    "d": int,
    "r": int,
    "rmax": int,
    "r0": int,
    "n": int,
    "eps": float,
    "t": float,
    "convention": str,
    "emit": str,
    "out": str,
}


def _merge(args: argparse.Namespace, names: list[str], required: list[str]) -> dict:
    """Final parameter values: flag if given, else config value, else default.

    ``names`` lists the parameters this subcommand knows; a config file may
    set exactly those (anything else is rejected).
    """
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(cfg) - set(names))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    vals = {}
    for name in names:
        flag = getattr(args, name)
        if flag is not None:
            vals[name] = flag
        elif name in cfg:
            try:
                vals[name] = _TYPES[name](cfg[name])
            except (TypeError, ValueError):
                raise ConfigError(f"config key {name!r} has the wrong type")
        else:
            vals[name] = None
    missing = [name for name in required if vals[name] is None]
    if missing:
        raise ConfigError(f"missing required parameters: {', '.join(missing)}")
    return vals


def _default(vals: dict, name: str, value):
    if vals[name] is None:
        vals[name] = value
    return vals[name]


# ---------------------------------------------------------------------------
# subcommands


def cmd_eldredge(args) -> int:
    vals = _merge(args, ["r", "alpha", "d", "emit", "out"], ["r", "alpha", "d"])
    emit = _default(vals, "emit", "json")
    lat = lattice.hypercube(vals["r"], vals["d"])
    model = lattice.CouplingModel(alpha=vals["alpha"])
    result = cascade.run_schedule(lat, model, source=0)
    if emit == "events":
        rows = [
            f"{k},{_fmt(t)},{site}"
            for k, (t, site) in enumerate(result.events, start=1)
        ]
        _emit_csv("event_index,time,site", rows, vals["out"])
    elif emit == "json":
        _emit_json(
            {
                "r": vals["r"],
                "alpha": vals["alpha"],
                "d": vals["d"],
                "num_sites": lat.num_sites,
                "total_time": result.total_time,
            },
            vals["out"],
        )
    else:
        raise ConfigError("emit must be 'json' or 'events'")
    return 0


def _build_plan(vals: dict) -> tuple[cascade.EldredgeFit, hybrid.HybridPlan]:
    convention = _default(vals, "convention", "axis")
    fit = cascade.build_fit(vals["alpha"], vals["d"])
    plan = hybrid.optimize(
        fit, vals["rmax"], vals["alpha"], vals["d"], merge_convention=convention
    )
    return fit, plan


def cmd_hybrid(args) -> int:
    vals = _merge(
        args,
        ["rmax", "alpha", "d", "convention", "emit", "out"],
        ["rmax", "alpha", "d"],
    )
    emit = _default(vals, "emit", "csv")
    _, plan = _build_plan(vals)
    if emit == "csv":
        rows = []
        for r, best, eld, split, depth in plan.rows():
            split_str = str(split) if split else "no-split"
            rows.append(f"{r},{_fmt(best)},{_fmt(eld)},{split_str},{depth}")
        _emit_csv("r,best_time,eldredge_time,best_split,depth", rows, vals["out"])
    elif emit == "json":
        cross = plan.crossover()
        onset = plan.depth_onset(2)
        _emit_json(
            {
                "alpha": vals["alpha"],
                "d": vals["d"],
                "r_max": vals["rmax"],
                "convention": vals["convention"],
                "crossover": cross,
                "m_at_crossover": plan.m_of(cross) if cross else None,
                "depth_2_onset": onset,
            },
            vals["out"],
        )
    else:
        raise ConfigError("emit must be 'csv' or 'json'")
    return 0


def cmd_crosstalk(args) -> int:
    vals = _merge(
        args,
        ["r", "r0", "n", "alpha", "d", "convention", "emit", "out"],
        ["r", "n", "alpha", "d"],
    )
    emit = _default(vals, "emit", "json")
    convention = _default(vals, "convention", "published")
    r0 = _default(vals, "r0", 2)
    budget = crosstalk.total_crosstalk(
        vals["r"], r0, vals["n"], vals["alpha"], vals["d"], convention
    )
    if emit == "csv":
        rows = [
            f"{i},{_fmt(L)},{_fmt(eps)}"
            for i, (L, eps) in enumerate(budget.per_level, start=1)
        ]
        _emit_csv("level,block_length,eps", rows, vals["out"])
    elif emit == "json":
        _emit_json(
            {
                "r": vals["r"],
                "r0": r0,
                "n": vals["n"],
                "alpha": vals["alpha"],
                "d": vals["d"],
                "convention": convention,
                "levels": [
                    {"level": i, "block_length": L, "eps": eps}
                    for i, (L, eps) in enumerate(budget.per_level, start=1)
                ],
                "i_max": budget.i_max,
                "total": budget.total,
                "closed_form": budget.closed_form,
            },
            vals["out"],
        )
    else:
        raise ConfigError("emit must be 'json' or 'csv'")
    return 0


def cmd_colors(args) -> int:
    vals = _merge(
        args,
        ["r", "r0", "eps", "alpha", "d", "convention", "out"],
        ["r", "eps", "alpha", "d"],
    )
    convention = _default(vals, "convention", "published")
    r0 = _default(vals, "r0", 2)
    need = crosstalk.colors_required(
        vals["r"], r0, vals["eps"], vals["alpha"], vals["d"], convention
    )
    _emit_json(
        {
            "r": vals["r"],
            "r0": r0,
            "eps": vals["eps"],
            "alpha": vals["alpha"],
            "d": vals["d"],
            "convention": convention,
            "n": need.n,
            "regime": need.regime,
            "r_exponent": need.r_exponent,
            "log_r_exponent": need.log_r_exponent,
        },
        vals["out"],
    )
    return 0


def cmd_pulses(args) -> int:
    vals = _merge(args, ["n", "out"], ["n"])
    per_color, total = crosstalk.pulse_count(vals["n"])
    _emit_json({"n": vals["n"], "per_color": per_color, "total": total}, vals["out"])
    return 0


def cmd_echo(args) -> int:
    vals = _merge(args, ["n", "t", "emit", "out"], ["n"])
    emit = _default(vals, "emit", "csv")
    T = _default(vals, "t", 1.0)
    seq = echo.walsh_sequence(vals["n"], T)
    if emit == "csv":
        rows = []
        dur = T / seq.n_segments
        for color in range(1, seq.n_colors + 1):
            signs = seq.signs[color - 1]
            for k in range(seq.n_segments):
                rows.append(f"{color},{k},{_fmt(dur)},{int(signs[k])}")
        _emit_csv("color,segment,duration,sign", rows, vals["out"])
    elif emit == "json":
        _emit_json(
            {
                "n": vals["n"],
                "t": T,
                "n_segments": seq.n_segments,
                "pulses_per_color": seq.pulses_of_color,
                "total_pulses": len(seq.distinct_pulse_times()),
            },
            vals["out"],
        )
    else:
        raise ConfigError("emit must be 'csv' or 'json'")
    return 0


def cmd_echo_verify(args) -> int:
    vals = _merge(
        args,
        ["r", "r0", "n", "alpha", "d", "t", "out"],
        ["r", "r0", "n", "alpha", "d"],
    )
    T = _default(vals, "t", 1.0)
    lat = lattice.hypercube(vals["r"], vals["d"])
    model = lattice.CouplingModel(alpha=vals["alpha"])
    tiling = lattice.tile_and_color(lat, vals["r0"], vals["n"])
    seq = echo.walsh_sequence(vals["n"], T)
    report = echo.verify_cancellation(seq, tiling, model)
    spacing = tiling.min_same_color_distance
    _emit_json(
        {
            "r": vals["r"],
            "block_length": vals["r0"],
            "n": vals["n"],
            "alpha": vals["alpha"],
            "d": vals["d"],
            "t": T,
            "n_colors_used": tiling.colors_used,
            # null when every block has a unique color (no same-color pair)
            "min_same_color_distance": spacing if math.isfinite(spacing) else None,
            "max_cross_residual": report.max_cross_residual,
            "threshold": report.threshold,
            "passed": report.passed,
        },
        vals["out"],
    )
    return 0


def _hypercube_blocks(lat: lattice.Lattice, L: int) -> list[list[int]]:
    """Partition into L-edge blocks, block-grid row-major, corner site first."""
    import itertools

    corners = itertools.product(*[range(0, e, L) for e in lat.extents])
    offsets = list(itertools.product(*[range(L)] * lat.d))
    return [
        [lat.site_index(tuple(c + o for c, o in zip(corner, off))) for off in offsets]
        for corner in corners
    ]


def cmd_verify(args) -> int:
    vals = _merge(args, ["r", "r0", "alpha", "d", "out"], ["r", "alpha", "d"])
    lat = lattice.hypercube(vals["r"], vals["d"])
    model = lattice.CouplingModel(alpha=vals["alpha"])
    a, b = 0.6, 0.8
    payload = {
        "protocol": args.protocol,
        "r": vals["r"],
        "alpha": vals["alpha"],
        "d": vals["d"],
        "num_qubits": lat.num_sites,
        "a": a,
        "b": b,
    }
    if args.protocol == "eldredge":
        state, fidelity = qsim.run_eldredge_protocol(lat, model, source=0, a=a, b=b)
        protocol_time = cascade.run_schedule(lat, model, source=0).total_time
    else:
        r0 = _default(vals, "r0", 2)
        if vals["r"] % r0 or vals["r"] // r0 < 2:
            raise ValueError("merge step needs r = m * r0 with m >= 2")
        m = vals["r"] // r0
        state, fidelity = qsim.run_tran_step(
            lat, model, _hypercube_blocks(lat, r0), a, b
        )
        t1 = cascade.run_schedule(
            lattice.hypercube(r0, vals["d"]), model, source=0
        ).total_time
        protocol_time = 3.0 * t1 + hybrid.merge_time_t2(r0, m, vals["alpha"], vals["d"])
        payload.update({"block_length": r0, "blocks": m ** vals["d"]})
    payload.update(
        {
            "fidelity": fidelity,
            "leakage": qsim.ghz_leakage(state, range(lat.num_sites)),
            "protocol_time": protocol_time,
        }
    )
    _emit_json(payload, vals["out"])
    return 0


def cmd_reproduce(args) -> int:
    vals = _merge(
        args, ["alpha", "d", "rmax", "convention", "out"], ["alpha", "d"]
    )
    _default(vals, "rmax", 5000)
    fit, plan = _build_plan(vals)
    cross = plan.crossover()
    onset = plan.depth_onset(2)

    lines = [
        f"fit-window: {fit.fit_window[0]} {fit.fit_window[1]}",
        f"fit-slope: {_fmt(fit.fit_slope)}",
        f"fit-intercept: {_fmt(fit.fit_intercept)}",
    ]
    if cross is None:
        lines.append("crossover: none")
    else:
        m_hi = (onset - 1) if onset else plan.r_max
        m_lo_val, m_hi_val = plan.m_range(cross, m_hi)
        lines += [
            f"crossover: {cross}",
            f"m-at-crossover: {_fmt(plan.m_of(cross))}",
            f"m-range: {_fmt(m_lo_val)} {_fmt(m_hi_val)}",
        ]
    lines.append(f"depth-2-onset: {onset if onset is not None else 'none'}")
    sys.stdout.write("\n".join(lines) + "\n")

    if vals["out"]:
        rows = []
        for r, best, eld, split, depth in plan.rows():
            split_str = str(split) if split else "no-split"
            rows.append(f"{r},{_fmt(best)},{_fmt(eld)},{split_str},{depth}")
        with open(vals["out"], "w") as fh:
            fh.write("\n".join(["r,best_time,eldredge_time,best_split,depth", *rows]) + "\n")
    return 0


def cmd_report(args) -> int:
    vals = _merge(args, ["alpha", "d", "rmax", "convention", "out"], ["alpha", "d", "out"])
    _default(vals, "rmax", 2000)
    from . import report as report_mod

    fit, plan = _build_plan(vals)
    paths = report_mod.write_report(fit, plan, vals["out"])
    sys.stdout.write("\n".join(paths) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerlawst",
        description="fast state-transfer protocols on power-law lattices",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_text, flags):
        p = sub.add_parser(name, help=help_text)
        for flag in flags:
            if flag in ("d", "r", "rmax", "r0", "n"):
                p.add_argument(f"--{flag}", type=int)
            elif flag in ("alpha", "eps", "t"):
                p.add_argument(f"--{flag}", type=float)
            else:
                p.add_argument(f"--{flag}")
        p.add_argument("--config", help="JSON file with parameter values")
        p.set_defaults(func=func)
        return p

    add("eldredge", cmd_eldredge, "exact cascade schedule on an r^d lattice",
        ["r", "alpha", "d", "emit", "out"])
    add("hybrid", cmd_hybrid, "divide-and-merge optimum vs the plain cascade",
        ["rmax", "alpha", "d", "convention", "emit", "out"])
    add("crosstalk", cmd_crosstalk, "per-level crosstalk budget for a nested run",
        ["r", "r0", "n", "alpha", "d", "convention", "emit", "out"])
    add("colors", cmd_colors, "echo colors needed to hit a crosstalk target",
        ["r", "r0", "eps", "alpha", "d", "convention", "out"])
    add("pulses", cmd_pulses, "pulse counts for an n-color echo sequence",
        ["n", "out"])
    add("echo", cmd_echo, "n-color sign schedule over equal segments",
        ["n", "t", "emit", "out"])
    add("echo-verify", cmd_echo_verify, "certify cross-color cancellation on a tiling",
        ["r", "r0", "n", "alpha", "d", "t", "out"])
    p_verify = add("verify", cmd_verify, "state-vector replay of a protocol",
                   ["r", "r0", "alpha", "d", "out"])
    p_verify.add_argument(
        "protocol", nargs="?", default="eldredge", choices=["eldredge", "tran"],
        help="cascade replay (default) or one divide-and-merge step",
    )
    add("reproduce", cmd_reproduce, "full pipeline: sweep, fit, optimize, report numbers",
        ["alpha", "d", "rmax", "convention", "out"])
    add("report", cmd_report, "render figures + CSVs for the pipeline",
        ["alpha", "d", "rmax", "convention", "out"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
