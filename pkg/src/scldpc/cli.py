"""Command-line front end.

Every run writes a single JSON document or a CSV table to --out
(default stdout).  The output embeds the resolved run configuration:
JSON documents carry it under the "config" key, CSV tables in a
leading "# config=..." comment line.  Re-running a subcommand with
--config pointed at a previous output file (JSON or CSV) replays that
run and reproduces the output byte for byte.

Exit codes: 0 success, 2 invalid input (unknown flags, bad parameter
combinations, module invariant violations), 1 runtime failure.
"""

from __future__ import annotations

import argparse
import collections
import concurrent.futures
import json
import os
import sys

from .channel_sim import ChannelSpec, simulate
from .density_evolution import StructuralError, bp_threshold, iavg, sweep_point
from .lifting import LiftingError, export_alist, lift, shift_manifest
from .optimizer import optimize
from .protograph import (
    ConstructionError,
    EnsembleSpec,
    construct,
    design_rate,
    to_json,
)

__all__ = ["main"]

FAMILIES = ("C0", "C1", "C2", "T", "S1", "S2", "M1")


def _default_threads() -> int:
    raw = os.environ.get("SCLDPC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SCLDPC_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"SCLDPC_THREADS must be >= 1, got {n}")
    return n


class _Parser(argparse.ArgumentParser):
    """argparse with a single-line diagnostic on bad flags."""

    def error(self, message):
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(2)


def _add_ensemble_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--family", choices=FAMILIES, help="ensemble family")
    sp.add_argument("--dv", type=int, help="variable-node degree")
    sp.add_argument("--dc", type=int, help="check-node degree")
    sp.add_argument("-L", "--chain-length", dest="L", type=int, help="chain length (positions)")
    sp.add_argument("-w", "--omega", dest="omega", type=int, help="coupling width")
    sp.add_argument(
        "-T",
        "--t-removed",
        dest="T_removed",
        type=int,
        default=None,
        help="boundary checks removed at the open end (C1/S1/M1; default omega-1)",
    )
    sp.add_argument(
        "--spreading",
        default=None,
        help="JSON list of omega+1 spreading matrices overriding the uniform split",
    )
    sp.add_argument(
        "--overrides",
        default=None,
        help="JSON list of [cn, vn, mult] connection edges overriding the built-in placement (S1/S2/M1)",
    )


def _add_common_flags(sp: argparse.ArgumentParser, formats: tuple[str, ...], default_format: str) -> None:
    sp.add_argument("--format", choices=formats, default=default_format, help="output format")
    sp.add_argument("--out", default="-", help="output path, - for stdout")
    sp.add_argument(
        "--config",
        default=None,
        help="replay a previous run: path to an output file or bare config JSON; "
        "other flags except --out are ignored",
    )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="scldpc",
        description="Protograph SC-LDPC chains: construction, BEC density evolution, "
        "connection optimization, quasi-cyclic lifting, Monte Carlo decoding.",
        epilog="SCLDPC_THREADS sets the default --threads where supported. "
        "All randomness is seeded; identical configs give identical bytes.",
    )
    sub = parser.add_subparsers(dest="cmd", metavar="subcommand")

    sp = sub.add_parser(
        "construct",
        help="build a protograph and print it as JSON",
        description="Build a protograph. Result fields: protograph (node/edge document), "
        "n_vn, n_cn, n_edges, rate_fraction, rate_decimal, cn_degrees, vn_degrees.",
    )
    _add_ensemble_flags(sp)
    _add_common_flags(sp, ("json",), "json")

    sp = sub.add_parser(
        "rate",
        help="exact design rate of an ensemble",
        description="Design rate as an exact fraction and a decimal. "
        "Columns: family, dv, dc, L, omega, T, n_vn, n_cn, rate_fraction, rate_decimal.",
    )
    _add_ensemble_flags(sp)
    _add_common_flags(sp, ("json", "csv"), "json")

    sp = sub.add_parser(
        "threshold",
        help="BEC belief-propagation threshold by bisection",
        description="Bisect the erasure probability until the density-evolution "
        "convergence boundary is bracketed within --tol. Columns: family, dv, dc, L, "
        "omega, T, rate_fraction, rate_decimal, threshold, bracket, evaluations.",
    )
    _add_ensemble_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-5, help="bisection bracket width")
    sp.add_argument("--max-iter", type=int, default=20000, help="density-evolution iteration cap")
    sp.add_argument("--target", type=float, default=1e-12, help="erasure probability declared converged")
    _add_common_flags(sp, ("json", "csv"), "json")

    sp = sub.add_parser(
        "sweep",
        help="rate/threshold table over a (family, L) grid",
        description="One row per (family, L), sorted by family then L and flushed as "
        "computed. Columns: family, dv, dc, L, omega, T, rate_fraction, rate_decimal, "
        "threshold, evaluations.",
    )
    sp.add_argument("--families", help="comma-separated families, e.g. C0,C1,T")
    sp.add_argument("--L-list", dest="L_list", help="comma-separated chain lengths, e.g. 5,10,20")
    sp.add_argument("--dv", type=int, help="variable-node degree")
    sp.add_argument("--dc", type=int, help="check-node degree")
    sp.add_argument("-w", "--omega", dest="omega", type=int, help="coupling width")
    sp.add_argument(
        "-T",
        "--t-removed",
        dest="T_removed",
        type=int,
        default=None,
        help="boundary checks removed (applies to C1/S1/M1 rows only)",
    )
    sp.add_argument("--tol", type=float, default=1e-5, help="bisection bracket width")
    sp.add_argument("--max-iter", type=int, default=20000, help="density-evolution iteration cap")
    sp.add_argument("--target", type=float, default=1e-12, help="erasure probability declared converged")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default SCLDPC_THREADS or 1)")
    _add_common_flags(sp, ("csv", "json"), "csv")

    sp = sub.add_parser(
        "iavg",
        help="average iterations to push every VN below a target erasure rate",
        description="Mean over variable nodes of the first density-evolution iteration "
        "with node erasure probability <= --target-ber. Requires epsilon below the "
        "threshold. Columns: epsilon, target_ber, iavg.",
    )
    _add_ensemble_flags(sp)
    sp.add_argument("--epsilon", type=float, help="channel erasure probability")
    sp.add_argument("--target-ber", type=float, default=1e-6, help="per-node erasure probability to reach")
    sp.add_argument("--max-iter", type=int, default=20000, help="density-evolution iteration cap")
    _add_common_flags(sp, ("json", "csv"), "json")

    sp = sub.add_parser(
        "optimize",
        help="search connection placements for the best threshold",
        description="Scan placements of spare check capacity (exhaustive within "
        "--budget threshold evaluations, greedy above it) and report the winner as a "
        "connection_overrides fragment consumable by construct --overrides. Result "
        "fields: connection_overrides, threshold, feasible, granularity, spec.",
    )
    _add_ensemble_flags(sp)
    sp.add_argument(
        "--granularity",
        choices=("position", "node"),
        default="position",
        help="treat one spatial position as a single target, or each VN separately",
    )
    sp.add_argument("--budget", type=int, default=2000, help="threshold evaluations before switching to greedy")
    sp.add_argument("--tol", type=float, default=1e-5, help="bisection bracket width")
    sp.add_argument("--max-iter", type=int, default=20000, help="density-evolution iteration cap")
    _add_common_flags(sp, ("json",), "json")

    sp = sub.add_parser(
        "lift",
        help="lift a protograph to a quasi-cyclic parity-check matrix",
        description="Circulant lifting with seeded shift selection and GF(2) rank "
        "certification. JSON result: n, m_rows, rank, k, girth4_free, attempts, "
        "manifest (per-edge [cn, vn, shift]). CSV columns: cn, vn, shift.",
    )
    _add_ensemble_flags(sp)
    sp.add_argument("-M", "--lift-factor", dest="M", type=int, help="circulant size")
    sp.add_argument("--seed", type=int, default=0, help="shift-selection seed")
    sp.add_argument("--no-certify", dest="certify", action="store_false", help="skip GF(2) rank certification")
    sp.add_argument("--max-retries", type=int, default=10, help="reseeded draws before giving up on full rank")
    sp.add_argument(
        "--allow-deficient",
        action="store_true",
        help="accept the best rank-deficient draw instead of failing",
    )
    sp.add_argument("--alist", default=None, help="also write the matrix in alist format to this path")
    _add_common_flags(sp, ("json", "csv"), "json")

    sp = sub.add_parser(
        "simulate",
        help="Monte Carlo BER/FER of a lifted code",
        description="Lift, then run seeded frames per channel point until "
        "--min-frame-errors or --max-frames, flushing one row per point sorted by "
        "channel_param. BEC decodes by peeling; BIAWGN by sum-product (or min-sum) "
        "with --param read as Eb/N0 in dB. Columns: channel_param, frames, "
        "bit_errors, frame_errors, ber, fer, ci95, seed; ber counts residual "
        "erasures or wrong hard decisions over all transmitted bits, ci95 is the "
        "95%% halfwidth on ber from frame-level variance.",
    )
    _add_ensemble_flags(sp)
    sp.add_argument("-M", "--lift-factor", dest="M", type=int, help="circulant size")
    sp.add_argument("--lift-seed", type=int, default=0, help="shift-selection seed")
    sp.add_argument("--no-certify", dest="certify", action="store_false", help="skip GF(2) rank certification")
    sp.add_argument("--max-retries", type=int, default=10, help="reseeded draws before giving up on full rank")
    sp.add_argument(
        "--allow-deficient",
        action="store_true",
        help="accept the best rank-deficient draw instead of failing",
    )
    sp.add_argument("--channel", choices=("BEC", "BIAWGN"), help="channel model")
    sp.add_argument("--params", help="comma-separated channel parameters (erasure probability or Eb/N0 dB)")
    sp.add_argument("--seed", type=int, default=0, help="noise seed; frames are keyed (seed, frame_index)")
    sp.add_argument("--min-frame-errors", type=int, default=100, help="stop a point after this many frame errors")
    sp.add_argument("--max-frames", type=int, default=1_000_000, help="frame cap per point")
    sp.add_argument("--max-iter", type=int, default=100, help="decoder iteration cap (BIAWGN)")
    sp.add_argument("--min-sum", action="store_true", help="min-sum check update instead of sum-product")
    sp.add_argument("--chunk", type=int, default=256, help="frames between stop-rule checks")
    sp.add_argument(
        "--rate",
        type=float,
        default=None,
        help="rate for the Eb/N0 to sigma^2 conversion (default: realized rate k/n from the certified rank)",
    )
    sp.add_argument("--threads", type=int, default=None, help="worker threads over channel points")
    _add_common_flags(sp, ("csv", "json"), "csv")

    return parser


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join(f"--{n.replace('_', '-')}" for n in missing)
        raise ValueError(f"missing required flags: {flags}")


def _parse_json_flag(name: str, text: str | None):
    if text is None:
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"--{name} is not valid JSON: {e}")


def _ensemble_params(args: argparse.Namespace) -> dict:
    _require(args, ["family", "dv", "dc", "L", "omega"])
    return {
        "family": args.family,
        "dv": args.dv,
        "dc": args.dc,
        "L": args.L,
        "omega": args.omega,
        "T_removed": args.T_removed,
        "spreading": _parse_json_flag("spreading", args.spreading),
        "connection_overrides": _parse_json_flag("overrides", args.overrides),
    }


def _spec_from(params: dict) -> EnsembleSpec:
    keys = ("family", "dv", "dc", "L", "omega", "T_removed", "spreading", "connection_overrides")
    return EnsembleSpec.from_dict({k: params.get(k) for k in keys})


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _Sink:
    """Output writer; CSV rows are flushed as they arrive."""

    def __init__(self, out: str):
        self.path = out
        self.fh = sys.stdout if out == "-" else open(out, "w", encoding="utf-8")

    def write_json(self, config: dict, result) -> None:
        doc = {"config": config, "result": result}
        self.fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def start_csv(self, config: dict, columns: list[str]) -> None:
        echo = json.dumps(config, sort_keys=True, separators=(",", ":"))
        self.fh.write(f"# config={echo}\n")
        self.fh.write(",".join(columns) + "\n")
        self.fh.flush()
        self._columns = columns

    def write_row(self, row: dict) -> None:
        self.fh.write(",".join(_csv_cell(row[c]) for c in self._columns) + "\n")
        self.fh.flush()

    def close(self) -> None:
        if self.fh is not sys.stdout:
            self.fh.close()
        else:
            self.fh.flush()


def _rate_fields(p) -> dict:
    r = design_rate(p)
    return {"rate_fraction": str(r), "rate_decimal": float(r)}


def _ensemble_columns(params: dict) -> dict:
    spec = _spec_from(params)
    return {
        "family": params["family"],
        "dv": params["dv"],
        "dc": params["dc"],
        "L": params["L"],
        "omega": params["omega"],
        "T": spec.resolved_T,
    }


def _degree_histogram(degrees) -> dict:
    counts = collections.Counter(degrees.tolist())
    return {str(v): int(counts[v]) for v in sorted(counts)}


def _run_construct(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    result = {
        "protograph": json.loads(to_json(p)),
        "n_vn": p.n_vn,
        "n_cn": p.n_cn,
        "n_edges": p.n_edges,
        "cn_degree_histogram": _degree_histogram(p.cn_degrees),
        "vn_degree_histogram": _degree_histogram(p.vn_degrees),
        **_rate_fields(p),
    }
    sink.write_json(config, result)


def _run_rate(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    row = {**_ensemble_columns(params), "n_vn": p.n_vn, "n_cn": p.n_cn, **_rate_fields(p)}
    if params["format"] == "csv":
        cols = ["family", "dv", "dc", "L", "omega", "T", "n_vn", "n_cn", "rate_fraction", "rate_decimal"]
        sink.start_csv(config, cols)
        sink.write_row(row)
    else:
        sink.write_json(config, row)


def _run_threshold(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    res = bp_threshold(p, tol=params["tol"], max_iter=params["max_iter"], target=params["target"])
    row = {
        **_ensemble_columns(params),
        **_rate_fields(p),
        "threshold": res.epsilon_star,
        "bracket": res.bracket,
        "evaluations": res.evaluations,
    }
    if params["format"] == "csv":
        cols = [
            "family", "dv", "dc", "L", "omega", "T",
            "rate_fraction", "rate_decimal", "threshold", "bracket", "evaluations",
        ]
        sink.start_csv(config, cols)
        sink.write_row(row)
    else:
        sink.write_json(config, row)


def _sweep_rows(params: dict, threads: int):
    grid = [(f, L) for f in params["families"] for L in params["L_list"]]

    def point(fl):
        f, L = fl
        return sweep_point(
            f, L, params["dv"], params["dc"], params["omega"],
            T_removed=params["T_removed"], tol=params["tol"],
            max_iter=params["max_iter"], target=params["target"],
        )

    if threads > 1 and len(grid) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(point, grid)
    else:
        for fl in grid:
            yield point(fl)


def _format_sweep_row(raw: dict) -> dict:
    row = dict(raw)
    r = row.pop("rate")
    row["rate_fraction"] = str(r)
    row["rate_decimal"] = float(r)
    return row


def _run_sweep(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    cols = ["family", "dv", "dc", "L", "omega", "T", "rate_fraction", "rate_decimal", "threshold", "evaluations"]
    if params["format"] == "csv":
        sink.start_csv(config, cols)
        for raw in _sweep_rows(params, threads):
            sink.write_row(_format_sweep_row(raw))
    else:
        rows = [_format_sweep_row(raw) for raw in _sweep_rows(params, threads)]
        sink.write_json(config, {"rows": rows})


def _run_iavg(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    value = iavg(p, params["epsilon"], target_ber=params["target_ber"], max_iter=params["max_iter"])
    row = {"epsilon": params["epsilon"], "target_ber": params["target_ber"], "iavg": value}
    if params["format"] == "csv":
        sink.start_csv(config, ["epsilon", "target_ber", "iavg"])
        sink.write_row(row)
    else:
        sink.write_json(config, row)


def _run_optimize(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    spec = _spec_from(params)
    base = construct(spec)
    best = optimize(
        base,
        granularity=params["granularity"],
        budget=params["budget"],
        tol=params["tol"],
        max_iter=params["max_iter"],
    )
    overrides = [list(e) for e in best.edges]
    spec_doc = spec.to_dict()
    # the realized construction: open-end bases become their filled families
    realized = {"C1": "S1", "C2": "S2"}.get(spec.family, spec.family)
    if realized in ("S1", "S2", "M1") and overrides:
        spec_doc["family"] = realized
        spec_doc["connection_overrides"] = overrides
    result = {
        "connection_overrides": overrides,
        "threshold": best.threshold,
        "feasible": best.feasible,
        "granularity": params["granularity"],
        "spec": spec_doc,
    }
    sink.write_json(config, result)


def _run_lift(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    code = lift(
        p,
        M=params["M"],
        seed=params["seed"],
        certify=params["certify"],
        max_retries=params["max_retries"],
        allow_deficient=params["allow_deficient"],
    )
    if params["alist"] is not None:
        export_alist(code, params["alist"])
    manifest = shift_manifest(code)
    if params["format"] == "csv":
        sink.start_csv(config, ["cn", "vn", "shift"])
        for c, v, s in manifest["shifts"]:
            sink.write_row({"cn": c, "vn": v, "shift": s})
    else:
        result = {
            "n": code.n,
            "m_rows": code.m_rows,
            "rank": code.rank,
            "k": code.k,
            "girth4_free": code.girth4_free,
            "attempts": code.attempts,
            "manifest": manifest,
        }
        sink.write_json(config, result)


def _run_simulate(params: dict, sink: _Sink, config: dict, threads: int) -> None:
    p = construct(_spec_from(params))
    code = lift(
        p,
        M=params["M"],
        seed=params["lift_seed"],
        certify=params["certify"],
        max_retries=params["max_retries"],
        allow_deficient=params["allow_deficient"],
    )

    def point(param: float):
        channel = ChannelSpec(kind=params["channel"], param=param, rate=params["rate"])
        return simulate(
            code,
            channel,
            min_frame_errors=params["min_frame_errors"],
            max_frames=params["max_frames"],
            seed=params["seed"],
            max_iter=params["max_iter"],
            min_sum=params["min_sum"],
            chunk=params["chunk"],
        )

    grid = params["params"]
    if threads > 1 and len(grid) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            points = pool.map(point, grid)
    else:
        points = map(point, grid)

    cols = ["channel_param", "frames", "bit_errors", "frame_errors", "ber", "fer", "ci95", "seed"]
    if params["format"] == "csv":
        sink.start_csv(config, cols)
        for pt in points:
            sink.write_row(pt.as_row())
    else:
        sink.write_json(config, {"points": [pt.as_row() for pt in points]})


_RUNNERS = {
    "construct": _run_construct,
    "rate": _run_rate,
    "threshold": _run_threshold,
    "sweep": _run_sweep,
    "iavg": _run_iavg,
    "optimize": _run_optimize,
    "lift": _run_lift,
    "simulate": _run_simulate,
}


def _parse_list(name: str, text: str | None, cast):
    if text is None:
        raise ValueError(f"missing required flags: --{name}")
    try:
        values = [cast(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"--{name} must be comma-separated {cast.__name__} values, got {text!r}")
    if not values:
        raise ValueError(f"--{name} is empty")
    return sorted(set(values))


def _params_from_args(args: argparse.Namespace) -> dict:
    """Canonical, JSON-ready parameter dict for the echo."""
    cmd = args.cmd
    if cmd == "construct":
        return {**_ensemble_params(args), "format": args.format}
    if cmd == "rate":
        return {**_ensemble_params(args), "format": args.format}
    if cmd == "threshold":
        return {
            **_ensemble_params(args),
            "tol": args.tol,
            "max_iter": args.max_iter,
            "target": args.target,
            "format": args.format,
        }
    if cmd == "sweep":
        _require(args, ["dv", "dc", "omega"])
        families = _parse_list("families", args.families, str)
        bad = [f for f in families if f not in FAMILIES]
        if bad:
            raise ValueError(f"unknown families: {','.join(bad)}")
        return {
            "families": families,
            "L_list": _parse_list("L-list", args.L_list, int),
            "dv": args.dv,
            "dc": args.dc,
            "omega": args.omega,
            "T_removed": args.T_removed,
            "tol": args.tol,
            "max_iter": args.max_iter,
            "target": args.target,
            "format": args.format,
        }
    if cmd == "iavg":
        _require(args, ["epsilon"])
        return {
            **_ensemble_params(args),
            "epsilon": args.epsilon,
            "target_ber": args.target_ber,
            "max_iter": args.max_iter,
            "format": args.format,
        }
    if cmd == "optimize":
        return {
            **_ensemble_params(args),
            "granularity": args.granularity,
            "budget": args.budget,
            "tol": args.tol,
            "max_iter": args.max_iter,
            "format": args.format,
        }
    if cmd == "lift":
        _require(args, ["M"])
        return {
            **_ensemble_params(args),
            "M": args.M,
            "seed": args.seed,
            "certify": args.certify,
            "max_retries": args.max_retries,
            "allow_deficient": args.allow_deficient,
            "alist": args.alist,
            "format": args.format,
        }
    if cmd == "simulate":
        _require(args, ["M", "channel"])
        return {
            **_ensemble_params(args),
            "M": args.M,
            "lift_seed": args.lift_seed,
            "certify": args.certify,
            "max_retries": args.max_retries,
            "allow_deficient": args.allow_deficient,
            "channel": args.channel,
            "params": _parse_list("params", args.params, float),
            "seed": args.seed,
            "min_frame_errors": args.min_frame_errors,
            "max_frames": args.max_frames,
            "max_iter": args.max_iter,
            "min_sum": args.min_sum,
            "chunk": args.chunk,
            "rate": args.rate,
            "format": args.format,
        }
    raise ValueError(f"unknown subcommand {cmd!r}")


def _load_config(path: str, cmd: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ValueError(f"cannot read --config {path}: {e}")
    if text.startswith("# config="):
        doc = json.loads(text.split("\n", 1)[0][len("# config=") :])
    else:
        doc = json.loads(text)
        if isinstance(doc, dict) and "config" in doc:
            doc = doc["config"]
    if not isinstance(doc, dict) or "subcommand" not in doc or "params" not in doc:
        raise ValueError(f"--config {path} does not contain a run configuration")
    if doc["subcommand"] != cmd:
        raise ValueError(
            f"--config {path} is for subcommand {doc['subcommand']!r}, not {cmd!r}"
        )
    return doc["params"]


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.cmd is None:
        parser.print_help()
        return 2
    try:
        if args.config is not None:
            params = _load_config(args.config, args.cmd)
        else:
            params = _params_from_args(args)
        threads = args.__dict__.get("threads")
        if threads is None:
            threads = _default_threads()
        if threads < 1:
            raise ValueError(f"--threads must be >= 1, got {threads}")
        config = {"subcommand": args.cmd, "params": params}
        sink = _Sink(args.out)
        try:
            _RUNNERS[args.cmd](params, sink, config, threads)
        finally:
            sink.close()
        return 0
    except (ConstructionError, StructuralError, LiftingError, ValueError, KeyError, TypeError) as e:
        msg = str(e).replace("\n", " ")
        sys.stderr.write(f"error: {msg}\n")
        return 2
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
