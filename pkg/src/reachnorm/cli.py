"""Command-line front end.

Subcommands tie the library together as a batch pipeline over plain files:

* ``simulate`` — synthesize an event log plus ground-truth counts CSV
* ``count``    — ingest an event log into a counts CSV
* ``fit``      — estimate the norm exponent from a counts CSV (JSON report)
* ``combine``  — fold a counts CSV through the L^p combination
* ``forecast`` — predict cumulative counts and the saturation ceiling
* ``plotdata`` — emit the four figure series as tidy CSV (optional image)
* ``replay``   — re-run a previous invocation from its manifest

Exit codes: 0 success, 2 usage/validation, 3 I/O failure, 4 numeric
non-convergence or an infeasible fit.  All file outputs are written
atomically (temp file + rename) and contain no timestamps, so a rerun with
the same inputs is byte-identical.  Every subcommand can record a JSON run
manifest (``--manifest``); ``simulate`` writes one next to its outputs by
default.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .fitting import DimensionFit, FitInfeasibleError, FitSettings, fit_p
from .forecast import (
    FitNotConvergedError,
    forecast_lp,
    forecast_scaling,
    saturation_ceiling,
)
from .ingest import EventParseError, ingest, read_events
from .norms import geometric_mean, lp_combine
from .pareto import ParetoLifetimeModel
from .series import (
    COUNTS_CSV_HEADER,
    read_counts_csv,
    write_counts_csv,
)
from .simulate import SimConfig, emit_events, load_sim_config, run_sim

__all__ = ["main", "build_parser", "RunManifest"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


@dataclass(frozen=True)
class RunManifest:
    """Record of one CLI run, sufficient to replay it to identical outputs."""

    subcommand: str
    params: dict
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    seed: int | None
    exit_status: int

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "seed": self.seed,
            "exit_status": self.exit_status,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        for field in ("subcommand", "params", "inputs", "outputs", "seed", "exit_status"):
            if field not in data:
                raise ValueError(f"manifest is missing field {field!r}")
        return cls(
            subcommand=str(data["subcommand"]),
            params=dict(data["params"]),
            inputs=tuple(data["inputs"]),
            outputs=tuple(data["outputs"]),
            seed=data["seed"],
            exit_status=int(data["exit_status"]),
        )


def _atomic_write_bytes(path: str | os.PathLike, data: bytes) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode="wb", dir=target.parent, prefix=f".{target.name}.", delete=False
    )
    try:
        with handle:
            handle.write(data)
        os.replace(handle.name, target)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def _atomic_write_text(path: str | os.PathLike, write: Callable[[io.StringIO], object]) -> None:
    buffer = io.StringIO()
    write(buffer)
    _atomic_write_bytes(path, buffer.getvalue().encode("utf-8"))


def _write_manifest(
    manifest_path: str | None,
    subcommand: str,
    params: dict,
    inputs: list[str],
    outputs: list[str],
    seed: int | None,
    exit_status: int,
) -> None:
    if manifest_path is None:
        return
    manifest = RunManifest(
        subcommand=subcommand,
        params=params,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        seed=seed,
        exit_status=exit_status,
    )
    _atomic_write_bytes(
        manifest_path,
        (json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"),
    )


def _emit_counts_csv(out: str | None, counts, cumulative) -> None:
    if out is None:
        write_counts_csv(sys.stdout, counts, cumulative)
    else:
        _atomic_write_text(out, lambda sink: write_counts_csv(sink, counts, cumulative))


def run_simulate(params: dict) -> int:
    if params.get("config"):
        config = load_sim_config(params["config"])
        model = config.model
        overrides = {
            "population_n": params.get("n"),
            "shape_b": params.get("shape_b"),
            "scale_a": params.get("scale_a"),
        }
        model = ParetoLifetimeModel(
            scale_a=overrides["scale_a"] if overrides["scale_a"] is not None else model.scale_a,
            shape_b=overrides["shape_b"] if overrides["shape_b"] is not None else model.shape_b,
            population_n=(
                overrides["population_n"]
                if overrides["population_n"] is not None
                else model.population_n
            ),
        )
        config = SimConfig(
            model=model,
            horizon=params["horizon"] if params.get("horizon") is not None else config.horizon,
            interval_width=(
                params["width"] if params.get("width") is not None else config.interval_width
            ),
            seed=params["seed"] if params.get("seed") is not None else config.seed,
            burn_in=params["burn_in"] if params.get("burn_in") is not None else config.burn_in,
            max_events=(
                params["max_events"]
                if params.get("max_events") is not None
                else config.max_events
            ),
        )
    else:
        required = {"n": "--n", "shape_b": "--shape-b", "horizon": "--horizon", "seed": "--seed"}
        missing = [flag for key, flag in required.items() if params.get(key) is None]
        if missing:
            raise ValueError(f"missing required options: {', '.join(missing)} (or use --config)")
        model = ParetoLifetimeModel(
            scale_a=params["scale_a"] if params.get("scale_a") is not None else 0.01,
            shape_b=params["shape_b"],
            population_n=params["n"],
        )
        config = SimConfig(
            model=model,
            horizon=params["horizon"],
            interval_width=params["width"] if params.get("width") is not None else 1.0,
            seed=params["seed"],
            burn_in=params["burn_in"] if params.get("burn_in") is not None else 0,
            max_events=(
                params["max_events"] if params.get("max_events") is not None else 10**9
            ),
        )

    prefix = params["out"]
    events_path = f"{prefix}.events.jsonl"
    counts_path = f"{prefix}.counts.csv"
    result = run_sim(config)

    record_box: list[int] = []

    def _write_events(sink: io.StringIO) -> None:
        record_box.append(emit_events(config, sink, fmt="jsonl"))

    _atomic_write_text(events_path, _write_events)
    _atomic_write_text(
        counts_path,
        lambda sink: write_counts_csv(sink, result.interval_counts, result.cumulative_counts),
    )

    manifest_path = params.get("manifest") or f"{prefix}.manifest.json"
    _write_manifest(
        manifest_path,
        "simulate",
        params,
        inputs=[params["config"]] if params.get("config") else [],
        outputs=[events_path, counts_path],
        seed=config.seed,
        exit_status=EXIT_OK,
    )

    print(f"events={events_path}")
    print(f"counts={counts_path}")
    print(f"records={record_box[0]}")
    print(f"distinct_ids={result.distinct_ids}")
    print(f"r={config.model.dimension_r}")
    return EXIT_OK


def run_count(params: dict) -> int:
    records, skipped = read_events(
        params["events"], fmt=params.get("format", "auto"), strict=not params.get("lenient")
    )
    counts, cumulative = ingest(
        records,
        interval_width=params.get("width") or 1.0,
        origin=params.get("origin") or 0.0,
    )
    _emit_counts_csv(params.get("out"), counts, cumulative)
    if skipped:
        print(f"skipped={skipped}", file=sys.stderr)
    _write_manifest(
        params.get("manifest"),
        "count",
        params,
        inputs=[params["events"]],
        outputs=[params["out"]] if params.get("out") else [],
        seed=None,
        exit_status=EXIT_OK,
    )
    return EXIT_OK


def _fit_settings(params: dict) -> FitSettings:
    keyword = {}
    if params.get("damping") is not None:
        keyword["damping"] = params["damping"]
    if params.get("tolerance") is not None:
        keyword["tolerance"] = params["tolerance"]
    if params.get("max_iterations") is not None:
        keyword["max_iterations"] = params["max_iterations"]
    if params.get("initial_p") is not None:
        keyword["initial_p"] = params["initial_p"]
    return FitSettings(**keyword)


def run_fit(params: dict) -> int:
    counts, cumulative = read_counts_csv(params["counts"])
    fit = fit_p(counts, cumulative, _fit_settings(params))
    payload = json.dumps(fit.to_dict(), indent=2, sort_keys=True) + "\n"
    if params.get("out"):
        _atomic_write_bytes(params["out"], payload.encode("utf-8"))
    else:
        sys.stdout.write(payload)
    status = EXIT_OK if fit.converged else EXIT_NUMERIC
    _write_manifest(
        params.get("manifest"),
        "fit",
        params,
        inputs=[params["counts"]],
        outputs=[params["out"]] if params.get("out") else [],
        seed=None,
        exit_status=status,
    )
    return status


def run_combine(params: dict) -> int:
    counts, _ = read_counts_csv(params["counts"])
    value = lp_combine(counts, params["p"])
    print(repr(value))
    return EXIT_OK


def run_forecast(params: dict) -> int:
    counts, cumulative = read_counts_csv(params["counts"])
    fit = fit_p(counts, cumulative, _fit_settings(params))
    horizon = params["horizon"]
    force = bool(params.get("force"))
    method = params.get("method") or "scaling"
    if method == "scaling":
        level = params["c1"] if params.get("c1") is not None else geometric_mean(counts.counts)
        result = forecast_scaling(fit, level, horizon, force=force)
    else:
        result = forecast_lp(fit, counts, horizon=horizon, force=force)
    ceiling = saturation_ceiling(fit)

    observed_counts = counts.counts
    observed_cumulative = cumulative.cumulative
    predicted_by_span = {
        result.start_span + k: value for k, value in enumerate(result.predicted)
    }

    def _write(sink) -> None:
        from .series import _format_number

        import csv as _csv

        writer = _csv.writer(sink, lineterminator="\n")
        writer.writerow(COUNTS_CSV_HEADER + ("predicted",))
        for span in range(1, max(horizon, len(observed_counts)) + 1):
            row = [span]
            if span <= len(observed_counts):
                row.append(_format_number(observed_counts[span - 1]))
                row.append(_format_number(observed_cumulative[span - 1]))
            else:
                row.extend(["", ""])
            if span in predicted_by_span:
                row.append(_format_number(predicted_by_span[span]))
            else:
                row.append("")
            writer.writerow(row)

    if params.get("out"):
        _atomic_write_text(params["out"], _write)
    else:
        _write(sys.stdout)
    print(f"p={fit.p}")
    print(f"r={fit.r}")
    print(f"saturation_ceiling={ceiling.ceiling}")
    print(f"predicted_final={result.final}")
    _write_manifest(
        params.get("manifest"),
        "forecast",
        params,
        inputs=[params["counts"]],
        outputs=[params["out"]] if params.get("out") else [],
        seed=None,
        exit_status=EXIT_OK,
    )
    return EXIT_OK


def run_plotdata(params: dict) -> int:
    from .plots import PLOT_CSV_HEADER, plot_series_table, render_figure_bytes
    from .series import _format_number

    counts, cumulative = read_counts_csv(params["counts"])
    if params.get("fit"):
        with open(params["fit"], "r", encoding="utf-8") as handle:
            fit = DimensionFit.from_dict(json.load(handle))
    else:
        fit = fit_p(counts, cumulative)
    rows = plot_series_table(counts, cumulative, fit)

    def _write(sink) -> None:
        import csv as _csv

        writer = _csv.writer(sink, lineterminator="\n")
        writer.writerow(PLOT_CSV_HEADER)
        for row in rows:
            writer.writerow(
                (
                    row.interval,
                    _format_number(row.count),
                    _format_number(row.lp_combined),
                    _format_number(row.cumulative),
                    _format_number(row.scaling_law),
                )
            )

    outputs = []
    if params.get("out"):
        _atomic_write_text(params["out"], _write)
        outputs.append(params["out"])
    else:
        _write(sys.stdout)
    if params.get("figure"):
        figure_path = params["figure"]
        image_format = (Path(figure_path).suffix.lstrip(".") or "png").lower()
        data = render_figure_bytes(counts, cumulative, fit, image_format=image_format)
        _atomic_write_bytes(figure_path, data)
        outputs.append(figure_path)
        print(f"figure={figure_path}")
    inputs = [params["counts"]] + ([params["fit"]] if params.get("fit") else [])
    _write_manifest(
        params.get("manifest"),
        "plotdata",
        params,
        inputs=inputs,
        outputs=outputs,
        seed=None,
        exit_status=EXIT_OK,
    )
    return EXIT_OK


_RUNNERS: dict[str, Callable[[dict], int]] = {}


def run_replay(params: dict) -> int:
    with open(params["manifest"], "r", encoding="utf-8") as handle:
        manifest = RunManifest.from_dict(json.load(handle))
    if manifest.subcommand not in _RUNNERS or manifest.subcommand == "replay":
        raise ValueError(f"manifest names unknown subcommand {manifest.subcommand!r}")
    return _RUNNERS[manifest.subcommand](dict(manifest.params))


_RUNNERS.update(
    {
        "simulate": run_simulate,
        "count": run_count,
        "fit": run_fit,
        "combine": run_combine,
        "forecast": run_forecast,
        "plotdata": run_plotdata,
        "replay": run_replay,
    }
)


def _add_fit_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--damping", type=float, default=None, help="update damping in (0, 1]")
    parser.add_argument(
        "--tolerance", type=float, default=None, help="stop when |mean residual| drops below this"
    )
    parser.add_argument("--max-iterations", type=int, default=None, help="iteration cap")
    parser.add_argument(
        "--initial-p", type=float, default=None, help="override the data-driven starting exponent"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachnorm",
        description=(
            "Estimate the fractal dimension of distinct-count series, combine "
            "per-interval counts via the L^p norm, and simulate populations with "
            "heavy-tailed churn."
        ),
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    sim = subparsers.add_parser(
        "simulate", help="synthesize an event log plus ground-truth counts"
    )
    sim.add_argument("--config", default=None, help="key=value config file (flags override it)")
    sim.add_argument("--n", type=int, default=None, help="population size per interval")
    sim.add_argument("--shape-b", type=float, default=None, help="lifetime tail shape in (0, 1)")
    sim.add_argument("--scale-a", type=float, default=None, help="minimum lifetime (default 0.01)")
    sim.add_argument("--horizon", type=int, default=None, help="number of intervals")
    sim.add_argument("--width", type=float, default=None, help="interval width (default 1.0)")
    sim.add_argument("--seed", type=int, default=None, help="random seed (required without --config)")
    sim.add_argument("--burn-in", type=int, default=None, help="intervals discarded before the window")
    sim.add_argument("--max-events", type=float, default=None, help="event-record cap (default 1e9)")
    sim.add_argument("--out", required=True, help="output prefix for .events.jsonl and .counts.csv")
    sim.add_argument("--manifest", default=None, help="manifest path (default <out>.manifest.json)")
    sim.set_defaults(runner="simulate")

    cnt = subparsers.add_parser("count", help="ingest an event log into a counts CSV")
    cnt.add_argument("events", help="event log (.csv or .jsonl)")
    cnt.add_argument("--width", type=float, default=1.0, help="interval width (default 1.0)")
    cnt.add_argument("--origin", type=float, default=0.0, help="bucket-edge anchor (default 0.0)")
    cnt.add_argument(
        "--format", choices=("auto", "csv", "jsonl"), default="auto", help="event format"
    )
    mode = cnt.add_mutually_exclusive_group()
    mode.add_argument(
        "--strict", dest="lenient", action="store_false", help="abort on malformed records (default)"
    )
    mode.add_argument(
        "--lenient", dest="lenient", action="store_true", help="skip malformed records, count them"
    )
    cnt.set_defaults(lenient=False)
    cnt.add_argument("--out", default=None, help="counts CSV path (default stdout)")
    cnt.add_argument("--manifest", default=None, help="write a run manifest here")
    cnt.set_defaults(runner="count")

    fit = subparsers.add_parser("fit", help="estimate the norm exponent from a counts CSV")
    fit.add_argument("counts", help="counts CSV (interval,count,cumulative)")
    _add_fit_options(fit)
    fit.add_argument("--out", default=None, help="fit report JSON path (default stdout)")
    fit.add_argument("--manifest", default=None, help="write a run manifest here")
    fit.set_defaults(runner="fit")

    comb = subparsers.add_parser("combine", help="fold the count column through the L^p norm")
    comb.add_argument("counts", help="counts CSV (interval,count,cumulative)")
    comb.add_argument("--p", type=float, required=True, help="norm exponent (>= 1, 'inf' allowed)")
    comb.set_defaults(runner="combine")

    fcst = subparsers.add_parser(
        "forecast", help="predict cumulative counts and the saturation ceiling"
    )
    fcst.add_argument("counts", help="counts CSV (interval,count,cumulative)")
    fcst.add_argument("--horizon", type=int, required=True, help="target span in intervals")
    fcst.add_argument(
        "--method", choices=("scaling", "lp"), default="scaling", help="forecast method"
    )
    fcst.add_argument(
        "--c1", type=float, default=None, help="single-interval level (default geometric mean)"
    )
    fcst.add_argument(
        "--force", action="store_true", help="forecast even from a non-converged fit"
    )
    _add_fit_options(fcst)
    fcst.add_argument("--out", default=None, help="forecast CSV path (default stdout)")
    fcst.add_argument("--manifest", default=None, help="write a run manifest here")
    fcst.set_defaults(runner="forecast")

    plot = subparsers.add_parser(
        "plotdata", help="emit per-interval count/combine/cumulative/scaling series"
    )
    plot.add_argument("counts", help="counts CSV (interval,count,cumulative)")
    plot.add_argument("--fit", default=None, help="fit report JSON (default: fit internally)")
    plot.add_argument("--out", default=None, help="tidy CSV path (default stdout)")
    plot.add_argument("--figure", default=None, help="also render a log-log figure to this image")
    plot.add_argument("--manifest", default=None, help="write a run manifest here")
    plot.set_defaults(runner="plotdata")

    rep = subparsers.add_parser("replay", help="re-run a previous invocation from its manifest")
    rep.add_argument("manifest", help="manifest JSON written by an earlier run")
    rep.set_defaults(runner="replay")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    params = {key: value for key, value in vars(args).items() if key not in ("runner", "subcommand")}
    runner = _RUNNERS[args.runner]
    try:
        return runner(params)
    except (FitInfeasibleError, FitNotConvergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EventParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
