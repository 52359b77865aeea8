"""Command-line scenario runner.

Emits deterministic machine-readable tables (CSV with a metadata comment
block, or JSON) for interference distributions, heralded conditional
distributions, shutter pass probabilities, and output purity.  Identical
scenarios produce byte-identical output.  Figures are opt-in via
``--plot`` and accompany the tables, never replace them.

A scenario file is a JSON document using the same vocabulary as the
flags; flags override scalar scenario fields.  Schema by quantity:

  {"quantity": "hom-dist", "s_i": 200, "delta_i": 0, "threshold": 30}

  {"quantity": "cond-dist" | "shutter-prob" | "purity",
   "input": {"kind": "uniform-fixed-sum", "s_i": 200}
          | {"kind": "fock", "n": 3, "m": 3}
          | {"kind": "uniform-range", "s_lo": 80, "s_hi": 120}
          | {"kind": "state-file", "path": "state.json"},
   "reflectivity": 0.1,
   "outcome": {"s": 20, "delta": 0},
   "detector": {"model": "ideal"}
             | {"model": "binomial", "eta": 0.95}
             | {"model": "gaussian", "sigma": 1.667},
   "condition": "adt >= 120",
   "condition_params": {"a": 0.3},
   "shutter_threshold": 0.5,
   "clamp_domain_errors": false}

  {"quantity": "purity-sweep",
   "input": {"kind": "uniform-fixed-sum"},
   "sweep": {"variable": "s_i", "values": [10, 20, 40]}
          | {"variable": "s_i", "start": 10, "stop": 400, "step": 10},
   "reflectivity": 0.1,
   "outcome": {"s": 20, "delta": 0},
   "detectors": [{"model": "binomial", "eta": 0.95}, ...]}

Exit codes: 0 success, 1 validation failure, 2 runtime or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import condition as cond_mod
from .condition import ConditionError, ConditionSyntaxError
from .detectors import DetectorModel, noisy_filtered_state, purity
from .filtering import (
    FilterSettings,
    MeasurementOutcome,
    condition_probability,
    conditional_distribution,
    outcome_probability,
    shutter_probability,
)
from .fock import (
    TwoModeState,
    make_uniform_fixed_sum,
    make_uniform_range,
    marginal_sum_diff,
    state_from_json,
)
from .interference import hom_distribution, threshold_probability

QUANTITIES = ("hom-dist", "cond-dist", "shutter-prob", "purity", "purity-sweep")
SWEEP_VARIABLES = ("s_i", "s", "reflectivity", "eta", "sigma")


class ScenarioError(Exception):
    """Validation failure carrying one line per violated constraint."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


@dataclass
class Report:
    columns: list[str]
    rows: list[list]
    extras: dict = field(default_factory=dict)
    plot: Optional[tuple] = None  # (kind, *payload), rendered only on --plot


def format_number(x: float) -> str:
    """12 significant digits; lowercase scientific outside [1e-4, 1e6)."""
    if x == 0.0:
        return "0"
    if 1e-4 <= abs(x) < 1e6:
        return f"{x:.12g}"
    return f"{x:.11e}"


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _flatten(prefix: str, value, out: list[tuple[str, object]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out)
    elif isinstance(value, list):
        out.append((prefix, json.dumps(value, sort_keys=True)))
    else:
        out.append((prefix, value))


def render_report(scenario: dict, report: Report, fmt: str) -> str:
    # the output destination is not part of the scenario's meaning, and
    # echoing it would break byte-identical reruns to different paths
    echo = {key: value for key, value in scenario.items() if key != "out"}
    if fmt == "json":
        doc = {
            "scenario": echo,
            "results": report.extras,
            "columns": report.columns,
            "rows": report.rows,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    meta: list[tuple[str, object]] = []
    _flatten("", echo, meta)
    for key, value in meta:
        buf.write(f"# {key} = {format_value(value)}\n")
    for key in sorted(report.extras):
        buf.write(f"# result.{key} = {format_value(report.extras[key])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_value(cell) for cell in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# scenario validation

def _check_input_spec(spec, diags: list[str]) -> None:
    if not isinstance(spec, dict) or "kind" not in spec:
        diags.append("input must be an object with a 'kind'")
        return
    kind = spec["kind"]
    if kind == "fock":
        n, m = spec.get("n"), spec.get("m")
        if not (isinstance(n, int) and isinstance(m, int) and n >= 0 and m >= 0):
            diags.append("fock input needs integer n, m >= 0")
    elif kind == "uniform-fixed-sum":
        s_i = spec.get("s_i")
        if not (isinstance(s_i, int) and s_i >= 0):
            diags.append("uniform-fixed-sum input needs integer s_i >= 0")
    elif kind == "uniform-range":
        lo, hi = spec.get("s_lo"), spec.get("s_hi")
        if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi):
            diags.append("uniform-range input needs integers 0 <= s_lo <= s_hi")
    elif kind == "state-file":
        path = spec.get("path")
        if not isinstance(path, str) or not os.path.exists(path):
            diags.append(f"state file does not exist: {path!r}")
    else:
        diags.append(f"unknown input kind {kind!r}")


def _check_outcome(spec, diags: list[str]) -> None:
    if not isinstance(spec, dict):
        diags.append("outcome must be an object with 's' and 'delta'")
        return
    s, delta = spec.get("s"), spec.get("delta")
    if not (isinstance(s, int) and isinstance(delta, int)):
        diags.append("outcome needs integer s and delta")
        return
    if s < 0:
        diags.append("outcome s must be nonnegative")
    elif abs(delta) > s:
        diags.append("outcome needs |delta| <= s")
    elif (s + delta) % 2:
        diags.append("S and Delta parity mismatch")


def _check_detector(spec, diags: list[str], where: str = "detector") -> None:
    if not isinstance(spec, dict) or "model" not in spec:
        diags.append(f"{where} must be an object with a 'model'")
        return
    model = spec["model"]
    if model == "ideal":
        pass
    elif model == "binomial":
        eta = spec.get("eta")
        if not isinstance(eta, (int, float)) or not (0.0 < eta <= 1.0):
            diags.append(f"{where}: eta out of (0, 1]")
    elif model == "gaussian":
        sigma = spec.get("sigma")
        if not isinstance(sigma, (int, float)) or not (sigma > 0.0):
            diags.append(f"{where}: sigma must be positive")
    else:
        diags.append(f"{where}: unknown model {model!r}")


def validate_scenario(scenario) -> list[str]:
    """Every violated constraint, one line each; empty when clean."""
    diags: list[str] = []
    if not isinstance(scenario, dict):
        return ["scenario must be a JSON object"]
    quantity = scenario.get("quantity")
    if quantity not in QUANTITIES:
        return [f"unknown quantity {quantity!r} (expected one of {', '.join(QUANTITIES)})"]
    if scenario.get("format", "csv") not in ("csv", "json"):
        diags.append("format must be 'csv' or 'json'")
    if quantity == "hom-dist":
        s_i, delta_i = scenario.get("s_i"), scenario.get("delta_i", 0)
        if not (isinstance(s_i, int) and s_i >= 0):
            diags.append("hom-dist needs integer s_i >= 0")
        elif not isinstance(delta_i, int) or abs(delta_i) > s_i:
            diags.append("hom-dist needs |delta_i| <= s_i")
        elif (s_i + delta_i) % 2:
            diags.append("S and Delta parity mismatch")
        threshold = scenario.get("threshold")
        if threshold is not None and not (isinstance(threshold, int) and threshold >= 0):
            diags.append("threshold must be a nonnegative integer")
        return diags
    sweeps_input = False
    if quantity == "purity-sweep":
        for index, spec in enumerate(scenario.get("detectors") or []):
            _check_detector(spec, diags, where=f"detectors[{index}]")
        if not scenario.get("detectors"):
            diags.append("purity-sweep needs a nonempty 'detectors' list")
        sweep = scenario.get("sweep")
        if not isinstance(sweep, dict) or sweep.get("variable") not in SWEEP_VARIABLES:
            diags.append(f"sweep.variable must be one of {', '.join(SWEEP_VARIABLES)}")
        else:
            try:
                values = expand_sweep(sweep)
            except (TypeError, KeyError, ValueError) as exc:
                diags.append(f"sweep values: {exc}")
            else:
                if not values:
                    diags.append("sweep produced no points")
                if sweep["variable"] == "s_i":
                    input_kind = (scenario.get("input") or {}).get("kind")
                    if input_kind != "uniform-fixed-sum":
                        diags.append("sweeping s_i requires a uniform-fixed-sum input")
                    else:
                        sweeps_input = True  # s_i supplied per point, not up front
    else:
        _check_detector(scenario.get("detector", {"model": "ideal"}), diags)
    if not sweeps_input:
        _check_input_spec(scenario.get("input"), diags)
    r = scenario.get("reflectivity")
    if not isinstance(r, (int, float)) or not (0.0 < r < 1.0):
        diags.append("reflectivity out of (0, 1)")
    _check_outcome(scenario.get("outcome"), diags)
    source = scenario.get("condition")
    if source is not None:
        if not isinstance(source, str):
            diags.append("condition must be a string")
        else:
            try:
                cond_mod.parse(source)
            except ConditionSyntaxError as exc:
                diags.append(str(exc))
    params = scenario.get("condition_params", {})
    if not isinstance(params, dict) or not all(
        isinstance(v, (int, float)) for v in params.values()
    ):
        diags.append("condition_params must map names to numbers")
    gate = scenario.get("shutter_threshold", 0.5)
    if not isinstance(gate, (int, float)) or not (0.0 <= gate <= 1.0):
        diags.append("shutter_threshold out of [0, 1]")
    return diags


def expand_sweep(sweep: dict) -> list:
    if "values" in sweep:
        return list(sweep["values"])
    start, stop, step = sweep["start"], sweep["stop"], sweep["step"]
    if step <= 0:
        raise ValueError("step must be positive")
    values = []
    value = start
    while value <= stop:
        values.append(value)
        value += step
    return values


# ---------------------------------------------------------------------------
# scenario execution

def build_input(spec: dict) -> TwoModeState:
    kind = spec["kind"]
    if kind == "fock":
        return TwoModeState.fock(spec["n"], spec["m"])
    if kind == "uniform-fixed-sum":
        return make_uniform_fixed_sum(spec["s_i"])
    if kind == "uniform-range":
        return make_uniform_range(spec["s_lo"], spec["s_hi"])
    with open(spec["path"], "r", encoding="utf-8") as handle:
        return state_from_json(handle.read())


def build_model(spec: Optional[dict]) -> DetectorModel:
    if spec is None or spec["model"] == "ideal":
        return DetectorModel.ideal()
    if spec["model"] == "binomial":
        return DetectorModel.binomial(float(spec["eta"]))
    return DetectorModel.gaussian(float(spec["sigma"]))


def model_label(model: DetectorModel) -> str:
    if model.kind == "ideal":
        return "ideal"
    if model.kind == "binomial":
        return f"binomial(eta={model.eta:g})"
    return f"gaussian(sigma={model.sigma:g})"


def build_settings(scenario: dict) -> FilterSettings:
    source = scenario.get("condition")
    return FilterSettings(
        reflectivity=float(scenario["reflectivity"]),
        condition=cond_mod.parse(source) if source else None,
        condition_params={
            k: float(v) for k, v in scenario.get("condition_params", {}).items()
        },
        clamp_domain_errors=bool(scenario.get("clamp_domain_errors", False)),
    )


def _filtered_mixture(scenario: dict, settings: FilterSettings):
    """(report probability, mixture, impossible flag) for one scenario."""
    state = build_input(scenario["input"])
    outcome = MeasurementOutcome(scenario["outcome"]["s"], scenario["outcome"]["delta"])
    model = build_model(scenario.get("detector"))
    prob, mixed = noisy_filtered_state(state, settings, outcome, model)
    return prob, mixed, mixed.is_empty


def execute_scenario(scenario: dict) -> Report:
    quantity = scenario["quantity"]
    if quantity == "hom-dist":
        dist = hom_distribution(scenario["s_i"], scenario.get("delta_i", 0))
        report = Report(
            columns=["delta", "probability"],
            rows=[[delta, p] for delta, p in dist.items()],
            plot=("delta", dist, scenario.get("threshold")),
        )
        if scenario.get("threshold") is not None:
            report.extras["threshold_probability"] = threshold_probability(
                dist, scenario["threshold"]
            )
        return report

    if quantity == "cond-dist":
        settings = build_settings({**scenario, "condition": None})
        model = build_model(scenario.get("detector"))
        if model.kind == "ideal":
            # full line, zero entries included
            state = build_input(scenario["input"])
            outcome = MeasurementOutcome(
                scenario["outcome"]["s"], scenario["outcome"]["delta"]
            )
            dist = conditional_distribution(state, settings, outcome)
            prob = outcome_probability(state, settings, outcome)
            impossible = dist.impossible
            if impossible or not dist.support():
                dist = None
        else:
            prob, mixed, impossible = _filtered_mixture(scenario, settings)
            dist = None if mixed.is_empty else marginal_sum_diff(mixed)
        dist_rows = [] if dist is None else [
            [s_t, delta_t, p] for (s_t, delta_t), p in dist.items()
        ]
        return Report(
            columns=["s_t", "delta_t", "probability"],
            rows=dist_rows,
            extras={"outcome_probability": prob, "impossible": impossible},
            plot=("transmitted", dist),
        )

    if quantity == "shutter-prob":
        settings = build_settings(scenario)
        gate = float(scenario.get("shutter_threshold", 0.5))
        model = build_model(scenario.get("detector"))
        state = build_input(scenario["input"])
        outcome = MeasurementOutcome(
            scenario["outcome"]["s"], scenario["outcome"]["delta"]
        )
        if model.kind == "ideal":
            prob = outcome_probability(state, settings, outcome)
            passed = shutter_probability(state, settings, outcome)
        else:
            prob, mixed = noisy_filtered_state(state, settings, outcome, model)
            mode = "false" if settings.clamp_domain_errors else "raise"
            passed = 0.0 if mixed.is_empty else condition_probability(
                mixed, settings.condition, settings.condition_params, mode
            )
        return Report(
            columns=["s", "delta", "outcome_probability",
                     "pass_probability", "shutter"],
            rows=[[outcome.s, outcome.delta, prob, passed,
                   "open" if passed >= gate else "closed"]],
            extras={"gate_threshold": gate},
        )

    if quantity == "purity":
        settings = build_settings({**scenario, "condition": None})
        prob, mixed, impossible = _filtered_mixture(scenario, settings)
        model = build_model(scenario.get("detector"))
        gamma = 0.0 if mixed.is_empty else purity(mixed)
        outcome = scenario["outcome"]
        return Report(
            columns=["s", "delta", "model", "report_probability", "purity"],
            rows=[[outcome["s"], outcome["delta"], model_label(model), prob, gamma]],
            extras={"impossible": impossible},
        )

    # purity-sweep
    sweep = scenario["sweep"]
    variable = sweep["variable"]
    values = expand_sweep(sweep)
    models = [build_model(spec) for spec in scenario["detectors"]]
    labels = [model_label(m) for m in models]
    columns = [variable] + [f"purity {label}" for label in labels]
    rows = []
    curves: dict[str, list[float]] = {label: [] for label in labels}
    for value in values:
        point = _sweep_point(scenario, variable, value)
        row: list = [value]
        for model, label in zip(models, labels):
            point_model = _model_with(model, variable, value)
            settings = build_settings({**point, "condition": None})
            state = build_input(point["input"])
            outcome = MeasurementOutcome(point["outcome"]["s"], point["outcome"]["delta"])
            prob, mixed = noisy_filtered_state(state, settings, outcome, point_model)
            gamma = 0.0 if mixed.is_empty else purity(mixed)
            row.append(gamma)
            curves[label].append(gamma)
        rows.append(row)
    return Report(
        columns=columns,
        rows=rows,
        plot=("sweep", [row[0] for row in rows], curves, variable),
    )


def _sweep_point(scenario: dict, variable: str, value) -> dict:
    point = json.loads(json.dumps(scenario))  # deep copy, JSON-safe by design
    if variable == "s_i":
        point["input"] = {"kind": "uniform-fixed-sum", "s_i": int(value)}
    elif variable == "s":
        point["outcome"]["s"] = int(value)
    elif variable == "reflectivity":
        point["reflectivity"] = float(value)
    return point


def _model_with(model: DetectorModel, variable: str, value) -> DetectorModel:
    if variable == "eta" and model.kind == "binomial":
        return DetectorModel.binomial(float(value))
    if variable == "sigma" and model.kind == "gaussian":
        return DetectorModel.gaussian(float(value))
    return model


# ---------------------------------------------------------------------------
# argument parsing and dispatch

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # validation failures exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_table_flags(parser, with_plot: bool = True) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", metavar="PATH",
                        help="output path, '-' for stdout")
    if with_plot:
        parser.add_argument("--plot", nargs="?", const="@auto", default=None,
                            metavar="PATH",
                            help="also render a figure (default: output path with .png)")


def _add_input_flags(parser) -> None:
    parser.add_argument("--si", type=int, metavar="S_I",
                        help="uniform fixed-sum input shell (with --di: a Fock input)")
    parser.add_argument("--di", type=int, metavar="DELTA_I",
                        help="population difference; selects the Fock input (S_i, Delta_i)")
    parser.add_argument("--range", nargs=2, type=int, metavar=("S_LO", "S_HI"),
                        help="uniform-range input over shells [S_LO, S_HI]")
    parser.add_argument("--state", metavar="PATH", help="explicit state file (JSON)")


def _add_filter_flags(parser) -> None:
    parser.add_argument("--r", type=float, default=0.1,
                        help="tapping reflectivity (default 0.1)")
    parser.add_argument("--s", type=int, required=True, help="detected photon total")
    parser.add_argument("--delta", type=int, required=True,
                        help="detected count difference")


def _add_detector_flags(parser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--eta", type=float,
                       help="binomial loss model with this efficiency")
    group.add_argument("--sigma", type=float,
                       help="gaussian blur model with this deviation")


def _add_condition_flags(parser) -> None:
    parser.add_argument("--condition", metavar="TEXT",
                        help="shutter condition over st and adt")
    parser.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="bind a condition parameter (repeatable)")
    parser.add_argument("--clamp", action="store_true",
                        help="treat condition domain faults as an unmet condition")


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="homfilter",
        description="Multiphoton interference and feed-forward filter tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_ArgumentParser)

    hom = sub.add_parser("hom-dist", help="balanced-splitter count-difference table")
    hom.add_argument("--si", type=int, required=True)
    hom.add_argument("--di", type=int, default=0)
    hom.add_argument("--threshold", type=int, default=None,
                     help="also report P(|delta| >= threshold)")
    _add_table_flags(hom)
    hom.set_defaults(handler=_cmd_hom_dist)

    cond = sub.add_parser("cond-dist", help="heralded transmitted (S_t, Delta_t) table")
    _add_input_flags(cond)
    _add_filter_flags(cond)
    _add_detector_flags(cond)
    _add_table_flags(cond)
    cond.set_defaults(handler=_cmd_cond_dist)

    shut = sub.add_parser("shutter-prob", help="condition pass probability")
    _add_input_flags(shut)
    _add_filter_flags(shut)
    _add_detector_flags(shut)
    _add_condition_flags(shut)
    shut.add_argument("--gate-threshold", type=float, default=0.5,
                      help="open the shutter when the pass probability reaches this")
    _add_table_flags(shut, with_plot=False)
    shut.set_defaults(handler=_cmd_shutter_prob)

    pur = sub.add_parser("purity", help="purity of the noisily heralded state")
    _add_input_flags(pur)
    _add_filter_flags(pur)
    _add_detector_flags(pur)
    _add_table_flags(pur, with_plot=False)
    pur.set_defaults(handler=_cmd_purity)

    val = sub.add_parser("validate", help="check a scenario file")
    val.add_argument("file")
    val.set_defaults(handler=_cmd_validate)

    runp = sub.add_parser("run", help="execute a scenario file")
    runp.add_argument("file")
    runp.add_argument("--format", choices=("csv", "json"), default=None)
    runp.add_argument("--out", default=None, metavar="PATH")
    runp.add_argument("--plot", nargs="?", const="@auto", default=None, metavar="PATH")
    runp.set_defaults(handler=_cmd_run)

    return parser


def _input_spec_from_flags(args) -> dict:
    chosen = [name for name, given in (
        ("--si", args.si is not None),
        ("--range", args.range is not None),
        ("--state", args.state is not None),
    ) if given]
    if len(chosen) != 1:
        raise ScenarioError(
            ["exactly one input among --si, --range, --state is required"]
        )
    if args.state is not None:
        return {"kind": "state-file", "path": args.state}
    if args.range is not None:
        return {"kind": "uniform-range", "s_lo": args.range[0], "s_hi": args.range[1]}
    if args.di is not None:
        if (args.si + args.di) % 2 or abs(args.di) > args.si:
            raise ScenarioError(["S and Delta parity mismatch"
                                 if (args.si + args.di) % 2
                                 else "input needs |delta_i| <= s_i"])
        return {"kind": "fock", "n": (args.si + args.di) // 2,
                "m": (args.si - args.di) // 2}
    return {"kind": "uniform-fixed-sum", "s_i": args.si}


def _detector_spec_from_flags(args) -> dict:
    if args.eta is not None:
        return {"model": "binomial", "eta": args.eta}
    if args.sigma is not None:
        return {"model": "gaussian", "sigma": args.sigma}
    return {"model": "ideal"}


def _params_from_flags(args) -> dict:
    params = {}
    for entry in args.param:
        name, sep, value = entry.partition("=")
        if not sep or not name:
            raise ScenarioError([f"--param expects NAME=VALUE, got {entry!r}"])
        try:
            params[name] = float(value)
        except ValueError:
            raise ScenarioError([f"--param {name}: {value!r} is not a number"]) from None
    return params


def _finish(scenario: dict, args) -> int:
    diagnostics = validate_scenario(scenario)
    if diagnostics:
        raise ScenarioError(diagnostics)
    report = execute_scenario(scenario)
    fmt = scenario.get("format", "csv")
    out = scenario.get("out", "-")
    text = render_report(scenario, report, fmt)
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    plot_target = getattr(args, "plot", None)
    if plot_target is not None:
        _render_plot(report, scenario, plot_target, out)
    return 0


def _render_plot(report: Report, scenario: dict, target: str, out: str) -> None:
    if report.plot is None:
        raise ScenarioError(
            [f"no figure is defined for quantity {scenario['quantity']!r}"]
        )
    if target == "@auto":
        if out == "-":
            raise ScenarioError(
                ["--plot needs an explicit path when the table goes to stdout"]
            )
        target = os.path.splitext(out)[0] + ".png"
    from . import plots  # matplotlib loads only when figures are requested

    kind, *payload = report.plot
    title = scenario["quantity"]
    if kind == "delta":
        dist, threshold = payload
        plots.plot_delta_distribution(dist, target, title, threshold)
    elif kind == "transmitted":
        (dist,) = payload
        if dist is None:
            raise ScenarioError(["nothing to plot: the outcome has no support"])
        plots.plot_transmitted_distribution(dist, target, title)
    else:
        xs, curves, xlabel = payload
        plots.plot_purity_sweep(xs, curves, xlabel, target, title)


def _cmd_hom_dist(args) -> int:
    scenario = {
        "quantity": "hom-dist",
        "s_i": args.si,
        "delta_i": args.di,
        "threshold": args.threshold,
        "format": args.format,
        "out": args.out,
    }
    if scenario["threshold"] is None:
        del scenario["threshold"]
    return _finish(scenario, args)


def _scenario_common(args, quantity: str) -> dict:
    return {
        "quantity": quantity,
        "input": _input_spec_from_flags(args),
        "reflectivity": args.r,
        "outcome": {"s": args.s, "delta": args.delta},
        "detector": _detector_spec_from_flags(args),
        "format": args.format,
        "out": args.out,
    }


def _cmd_cond_dist(args) -> int:
    return _finish(_scenario_common(args, "cond-dist"), args)


def _cmd_shutter_prob(args) -> int:
    scenario = _scenario_common(args, "shutter-prob")
    if args.condition is not None:
        scenario["condition"] = args.condition
    scenario["condition_params"] = _params_from_flags(args)
    scenario["shutter_threshold"] = args.gate_threshold
    scenario["clamp_domain_errors"] = args.clamp
    return _finish(scenario, args)


def _cmd_purity(args) -> int:
    return _finish(_scenario_common(args, "purity"), args)


def _load_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ScenarioError([f"cannot read scenario file: {exc}"]) from None
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"scenario file is not valid JSON: {exc}"]) from None


def _cmd_validate(args) -> int:
    scenario = _load_scenario(args.file)
    diagnostics = validate_scenario(scenario)
    if diagnostics:
        for line in diagnostics:
            print(line, file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.file)
    if args.format is not None:
        scenario["format"] = args.format
    if args.out is not None:
        scenario["out"] = args.out
    scenario.setdefault("format", "csv")
    scenario.setdefault("out", "-")
    return _finish(scenario, args)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ScenarioError as err:
        for line in err.diagnostics:
            print(line, file=sys.stderr)
        return 1
    except ConditionSyntaxError as err:
        print(err, file=sys.stderr)
        return 1
    except (ConditionError, ValueError, OSError) as err:
        print(err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
