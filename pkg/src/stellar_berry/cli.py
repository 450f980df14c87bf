"""Command-line interface.

Subcommands read a JSON config (``--config``) and write machine-readable
records to ``--out`` (a directory) or to stdout.  Exit codes: 0 success,
2 input error, 3 numerical or tracking failure, 4 empty result set.
Log verbosity comes from the ``STELLAR_BERRY_LOG`` environment variable
(``DEBUG``, ``INFO``, ``WARNING``; default ``WARNING``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .berry import (
    LoopTrajectory,
    berry_phase,
    berry_phase_oracle,
    random_smooth_positions,
    rotated_constellation_loop,
    spin_in_field_loop,
)
from .boson import ControlLoop, eigensystem_track, lambda_zero_reference, sweep_lambda
from .correlation import beta_matrix, normalization_report
from .entangle import DEFAULT_CLUSTER_TOL, entanglement_report
from .errors import (
    DegeneratePairError,
    DiscontinuityError,
    InvalidInputError,
    InvalidStateError,
    NumericalFailureError,
    ResourceLimitError,
    StellarError,
)
from .geometry import wrap_angle
from .stellar import SpinState, StarSet, find_stars, state_from_stars

SCHEMA_VERSION = "1"
LOG_ENV = "STELLAR_BERRY_LOG"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_EMPTY = 4

MIN_STEPS = 16

log = logging.getLogger("stellar_berry")


class ConfigError(InvalidInputError):
    """Malformed or inconsistent configuration file."""


class EmptyResult(StellarError):
    """A command produced no valid records."""


# -- config parsing -----------------------------------------------------------


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _require(cfg: dict, key: str, path: str):
    if not isinstance(cfg, dict) or key not in cfg:
        raise ConfigError(f"{path}: missing field {key!r}")
    return cfg[key]


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(f"{what} must be finite")
    return out


def _complex_list(raw, what: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{what} must be a non-empty list of [re, im] pairs")
    out = []
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{what}[{k}] must be a [re, im] pair")
        out.append(complex(_number(pair[0], f"{what}[{k}][0]"), _number(pair[1], f"{what}[{k}][1]")))
    return np.array(out)


def parse_state(cfg, path: str = "<state>") -> SpinState:
    """State record ``{"n": n, "amplitudes": [[re, im], ...]}``, low to high ``J + m``."""
    n = _require(cfg, "n", path)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"{path}: n must be a positive integer")
    amps = _complex_list(_require(cfg, "amplitudes", path), f"{path}: amplitudes")
    if amps.size != n + 1:
        raise ConfigError(f"{path}: expected {n + 1} amplitudes for n={n}, got {amps.size}")
    return SpinState(amps)


def parse_stars(raw, what: str) -> StarSet:
    """Star list ``[[theta, phi], ...]`` in radians."""
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{what} must be a non-empty list of [theta, phi] pairs")
    pairs = []
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{what}[{k}] must be a [theta, phi] pair")
        pairs.append((_number(pair[0], f"{what}[{k}][0]"), _number(pair[1], f"{what}[{k}][1]")))
    return StarSet.from_angles(pairs)


# -- output -------------------------------------------------------------------


def _clean(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    return value


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def render_json(payload) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


def render_csv(records: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_csv_cell(rec.get(c)) for c in columns])
    return buf.getvalue()


class Sink:
    """Writes named outputs into ``--out`` or concatenates them to stdout."""

    def __init__(self, out: str | None):
        self.out = Path(out) if out else None
        self.pending: list[tuple[str, str]] = []

    def add(self, name: str, text: str):
        self.pending.append((name, text))

    def flush(self):
        if self.out is None:
            for _, text in self.pending:
                sys.stdout.write(text)
            return
        self.out.mkdir(parents=True, exist_ok=True)
        for name, text in self.pending:
            (self.out / name).write_text(text, encoding="utf-8")
            log.info("wrote %s", self.out / name)


def _emit_records(sink: Sink, stem: str, records: list[dict], columns: list[str], fmt: str, extra: dict | None = None):
    records = [{"schema_version": SCHEMA_VERSION, **r} for r in records]
    columns = ["schema_version", *columns]
    if fmt == "csv":
        sink.add(f"{stem}.csv", render_csv(records, columns))
    else:
        payload = {"schema_version": SCHEMA_VERSION, "records": records}
        if extra:
            payload.update(extra)
        sink.add(f"{stem}.json", render_json(payload))


# -- commands -----------------------------------------------------------------


def cmd_stars(args, sink: Sink):
    state = parse_state(_load_json(args.config), args.config)
    stars = find_stars(state, tol=args.tol)
    residuals = stars.residuals if stars.residuals is not None else np.zeros(stars.n)
    # rows ordered by (theta, phi) so equal constellations print identically
    order = sorted(range(stars.n), key=lambda k: (round(stars[k].theta, 12), round(stars[k].phi, 12)))
    records = []
    for k, idx in enumerate(order):
        s = stars[idx]
        x, y, z = s.cartesian
        records.append({"index": k, "theta": s.theta, "phi": s.phi, "x": x, "y": y, "z": z,
                        "residual": residuals[idx]})
    _emit_records(sink, "stars", records, ["index", "theta", "phi", "x", "y", "z", "residual"], args.format,
                  {"n": stars.n, "infinity_count": stars.infinity_count})


def cmd_state(args, sink: Sink):
    cfg = _load_json(args.config)
    stars = parse_stars(_require(cfg, "stars", args.config), f"{args.config}: stars")
    state = state_from_stars(stars)
    records = [
        {"index": p, "j_plus_m": p, "re": a.real, "im": a.imag}
        for p, a in enumerate(state.amplitudes)
    ]
    _emit_records(sink, "state", records, ["index", "j_plus_m", "re", "im"], args.format,
                  {"n": state.n, "amplitudes": [[a.real, a.imag] for a in state.amplitudes]})


def cmd_norm(args, sink: Sink):
    cfg = _load_json(args.config)
    stars = parse_stars(_require(cfg, "stars", args.config), f"{args.config}: stars")
    report = normalization_report(stars)
    betas = beta_matrix(stars)
    records = [
        {"i": i, "j": j, "d": 1.0 - float(stars.cartesian[i] @ stars.cartesian[j]), "beta": betas[i, j]}
        for i in range(stars.n) for j in range(i + 1, stars.n)
    ]
    _emit_records(sink, "norm", records, ["i", "j", "d", "beta"], args.format,
                  {"n": stars.n, "norm_sq": report.value, "permanent_norm_sq": report.permanent_value,
                   "ratio": report.ratio})


def _steps(args, cfg: dict) -> int:
    n_steps = args.steps if args.steps is not None else cfg.get("n_steps", 2000)
    if isinstance(n_steps, bool) or not isinstance(n_steps, int) or n_steps < MIN_STEPS:
        raise ConfigError(f"n_steps must be an integer >= {MIN_STEPS}, got {n_steps!r}")
    return n_steps


def build_loop(cfg: dict, args, path: str):
    """Loop and its sampled states from a ``berry`` config.

    Returns ``(LoopTrajectory, states, reference)`` where ``reference`` is an
    analytic target phase or None.
    """
    kind = _require(cfg, "kind", path)
    if kind == "spin_in_field":
        n = int(_number(_require(cfg, "n", path), "n"))
        m = _number(_require(cfg, "m", path), "m")
        theta = _number(cfg.get("theta", math.pi / 3), "theta")
        phi_start = _number(cfg.get("phi_start", 0.0), "phi_start")
        phi_end = _number(cfg.get("phi_end", 2.0 * math.pi), "phi_end")
        loop = spin_in_field_loop(n, m, theta, _steps(args, cfg), phi_start, phi_end)
        # solid angle of the field loop, accumulated over the swept azimuth
        omega = (1.0 - math.cos(theta)) * (phi_end - phi_start)
        return loop, None, -m * omega
    if kind == "rigid":
        stars = parse_stars(_require(cfg, "stars", path), f"{path}: stars")
        axis = cfg.get("axis", [0.0, 0.0, 1.0])
        if not isinstance(axis, list) or len(axis) != 3:
            raise ConfigError(f"{path}: axis must be [x, y, z]")
        axis = [_number(a, "axis") for a in axis]
        if np.linalg.norm(axis) == 0:
            raise ConfigError(f"{path}: axis must be nonzero")
        loop = rotated_constellation_loop(stars, _steps(args, cfg), axis)
        return loop, None, None
    if kind == "stars":
        samples = _require(cfg, "samples", path)
        if not isinstance(samples, list) or len(samples) < 3:
            raise ConfigError(f"{path}: samples must list at least 3 constellations")
        sets = [parse_stars(s, f"{path}: samples[{k}]") for k, s in enumerate(samples)]
        return LoopTrajectory.from_star_sets(sets), None, None
    if kind == "states":
        raw = _require(cfg, "states", path)
        if not isinstance(raw, list) or len(raw) < 3:
            raise ConfigError(f"{path}: states must list at least 3 amplitude vectors")
        states = [SpinState(_complex_list(s, f"{path}: states[{k}]")) for k, s in enumerate(raw)]
        return LoopTrajectory.from_states(states, tol=args.tol), states, None
    if kind == "random_smooth":
        n = int(_number(_require(cfg, "n", path), "n"))
        rng = np.random.default_rng(args.seed)
        pos = random_smooth_positions(n, _steps(args, cfg), rng,
                                      int(cfg.get("n_modes", 2)), _number(cfg.get("amplitude", 0.5), "amplitude"))
        return LoopTrajectory.from_positions(pos), None, None
    if kind == "boson":
        n = int(_number(_require(cfg, "n", path), "n"))
        level = int(_number(_require(cfg, "level", path), "level"))
        R = _number(cfg.get("R", 1.0), "R")
        loop = ControlLoop.latitude(_number(cfg.get("theta", math.pi / 3), "theta"), _steps(args, cfg), R,
                                    _number(cfg.get("lambda", 0.0), "lambda"))
        track = eigensystem_track(loop, n, level)
        return LoopTrajectory.from_states(track.states, tol=args.tol), list(track.states), None
    raise ConfigError(f"{path}: unknown loop kind {kind!r}")


def cmd_berry(args, sink: Sink):
    cfg = _load_json(args.config)
    loop, states, reference = build_loop(cfg, args, args.config)
    if states is None:
        states = [state_from_stars(StarSet.from_cartesian(p)) for p in loop.positions]
    parts = berry_phase(loop)
    oracle = berry_phase_oracle(states)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": cfg["kind"],
        "n": loop.n_stars,
        "n_steps": loop.n_samples - 1,
        "gamma_total": parts.gamma_total,
        "gamma_0": parts.gamma_0,
        "gamma_C": parts.gamma_C,
        "gamma_R": parts.gamma_R,
        "gamma_A": parts.gamma_A,
        "wrapped": parts.wrapped(),
        "per_star_solid_angles": list(parts.per_star_solid_angles),
        "per_pair": [
            {"i": p.i, "j": p.j, "gamma_C": p.gamma_C, "gamma_R": p.gamma_R, "gamma_A": p.gamma_A,
             "degenerate": p.degenerate}
            for p in parts.per_pair
        ],
        "gamma_oracle": oracle,
        "delta": abs(wrap_angle(parts.gamma_total - oracle)),
        "closing_permutation": [int(k) for k in loop.closing_permutation],
    }
    if reference is not None:
        summary["reference"] = reference
        summary["reference_delta"] = abs(wrap_angle(parts.gamma_total - reference))
    sink.add("berry.json", render_json(summary))
    if args.trace:
        records = []
        for t, sample in enumerate(loop.positions):
            theta = np.arccos(np.clip(sample[:, 2], -1.0, 1.0))
            phi = np.mod(np.arctan2(sample[:, 1], sample[:, 0]), 2.0 * math.pi)
            for k in range(sample.shape[0]):
                records.append({"schema_version": SCHEMA_VERSION, "step": t, "star": k, "theta": theta[k],
                                "phi": phi[k], "x": sample[k, 0], "y": sample[k, 1], "z": sample[k, 2]})
        cols = ["schema_version", "step", "star", "theta", "phi", "x", "y", "z"]
        sink.add("berry_trace.csv", render_csv(records, cols))


SWEEP_COLUMNS = ["lambda_over_R", "gamma_formula", "gamma_oracle", "gamma0", "gammaC", "gammaR", "gammaA",
                 "min_gap", "valid", "level", "magnetic_number", "delta", "reference"]


def cmd_boson_sweep(args, sink: Sink):
    cfg = _load_json(args.config)
    path = args.config
    n = int(_number(_require(cfg, "n", path), "n"))
    level = int(_number(_require(cfg, "level", path), "level"))
    R = _number(cfg.get("R", 1.0), "R")
    theta = _number(cfg.get("theta", math.pi / 3), "theta")
    ratios = cfg.get("lambda_over_R", [round(0.05 * k, 2) for k in range(11)])
    if not isinstance(ratios, list):
        raise ConfigError(f"{path}: lambda_over_R must be a list")
    ratios = [_number(r, "lambda_over_R") for r in ratios]
    min_overlap = _number(cfg.get("min_overlap", 0.9), "min_overlap")
    if not 0 < min_overlap <= 1:
        raise ConfigError(f"{path}: min_overlap must lie in (0, 1]")
    n_steps = _steps(args, cfg)
    loop = ControlLoop.latitude(theta, n_steps, R)
    if not 0 <= level <= n:
        raise ConfigError(f"{path}: level {level} out of range for n={n}")
    rows = sweep_lambda(n, loop, level, [r * R for r in ratios], min_overlap)
    reference = lambda_zero_reference(n, level, loop)
    records = []
    for row in rows:
        rec = {"schema_version": SCHEMA_VERSION, **row.as_dict()}
        rec["reference"] = reference if row.lambda_over_R == 0.0 else None
        records.append(rec)
        if not row.valid:
            log.warning("row lambda/R=%g invalid: %s", row.lambda_over_R, row.error)
    sink.add("sweep.csv", render_csv(records, ["schema_version", *SWEEP_COLUMNS]))
    meta = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "config": cfg,
        "resolved": {"n": n, "level": level, "R": R, "theta": theta, "lambda_over_R": ratios,
                     "n_steps": n_steps, "min_overlap": min_overlap, "loop": "latitude"},
        "lambda_zero_reference": reference,
        "rows": len(rows),
        "valid_rows": sum(r.valid for r in rows),
    }
    sink.add("sweep.json", render_json(meta))
    if not any(r.valid for r in rows):
        sink.flush()
        raise EmptyResult("every sweep row is invalid")


def cmd_entangle(args, sink: Sink):
    cfg = _load_json(args.config)
    if "stars" in cfg:
        stars = parse_stars(cfg["stars"], f"{args.config}: stars")
    else:
        stars = find_stars(parse_state(cfg, args.config), tol=args.tol)
    cluster_tol = _number(cfg.get("cluster_tol", DEFAULT_CLUSTER_TOL), "cluster_tol")
    if cluster_tol <= 0:
        raise ConfigError("cluster_tol must be positive")
    reports = entanglement_report(stars, cluster_tol)
    records = [
        {"n": r.n, "diversity": r.diversity, "classification": r.classification, "measure": r.measure_name,
         "value": r.value, "flagged": r.flagged}
        for r in reports
    ]
    _emit_records(sink, "entangle", records, ["n", "diversity", "classification", "measure", "value", "flagged"],
                  args.format)


def _selftest_checks():
    """Quick end-to-end checks; each yields ``(name, passed, detail)``."""
    omega = 2.0 * math.pi * (1.0 - math.cos(math.pi / 3))
    for n, m in [(1, 0.5), (2, -1.0), (3, 0.5)]:
        b = berry_phase(spin_in_field_loop(n, m, math.pi / 3, 400))
        err = abs(wrap_angle(b.gamma_total + m * omega))
        yield f"spin_in_field n={n} m={m:+g}", err < 1e-5, err
    ghz = find_stars(np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0))
    tau = [r.value for r in entanglement_report(ghz) if r.measure_name == "three-tangle"][0]
    yield "GHZ three-tangle", abs(tau - 1.0) < 1e-8, abs(tau - 1.0)
    rng = np.random.default_rng(0)
    pos = random_smooth_positions(3, 400, rng)
    loop = LoopTrajectory.from_positions(pos)
    states = [state_from_stars(StarSet.from_cartesian(p)) for p in pos]
    err = abs(wrap_angle(berry_phase(loop).gamma_total - berry_phase_oracle(states)))
    yield "random loop vs oracle", err < 1e-3, err


def cmd_selftest(args, sink: Sink):
    records = []
    for name, passed, detail in _selftest_checks():
        records.append({"check": name, "passed": bool(passed), "error": detail})
    _emit_records(sink, "selftest", records, ["check", "passed", "error"], args.format)
    if not all(r["passed"] for r in records):
        sink.flush()
        raise NumericalFailureError("selftest failed")


COMMANDS = {
    "stars": (cmd_stars, "Majorana stars of a state file"),
    "state": (cmd_state, "state amplitudes from a star list"),
    "norm": (cmd_norm, "normalization and correlation factors of a star list"),
    "berry": (cmd_berry, "Berry phase breakdown of a loop"),
    "boson-sweep": (cmd_boson_sweep, "Berry phase versus lambda/R for the boson model"),
    "entangle": (cmd_entangle, "entanglement measures of a state or star list"),
    "selftest": (cmd_selftest, "run quick built-in checks"),
}

NEEDS_CONFIG = {"stars", "state", "norm", "berry", "boson-sweep", "entangle"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stellar-berry", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=name in NEEDS_CONFIG, help="JSON input file")
        p.add_argument("--out", help="output directory (default: stdout)")
        p.add_argument("--steps", type=int, help=f"loop samples N (>= {MIN_STEPS})")
        p.add_argument("--tol", type=float, default=1e-10, help="root-finding coefficient tolerance")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized loops")
        p.add_argument("--format", choices=["csv", "json"], default="json")
        if name == "berry":
            p.add_argument("--trace", action="store_true", help="also write a per-step star trace CSV")
    return parser


def _configure_logging():
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.tol > 0:
        parser.error("--tol must be positive")
    handler, _ = COMMANDS[args.command]
    sink = Sink(args.out)
    try:
        handler(args, sink)
    except EmptyResult as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except DiscontinuityError as exc:
        where = "" if exc.step is None or "step" in str(exc) else f" (step {exc.step})"
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NumericalFailureError, InvalidStateError, DegeneratePairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInputError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sink.flush()
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
