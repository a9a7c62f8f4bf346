"""Command-line experiment harness.

Every command writes CSV files plus a ``manifest.json`` into ``--out``.
Configuration is an INI file; ``--seed`` overrides ``[run] seed``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .coding import offset_bands, plan_gains
from .decoder import PartitionSpec, decode_stream
from .errors import ConfigError, NumericalError, WiC1Error
from .experiments import (
    dispersion_experiment,
    flow_return_map,
    interference_experiment,
    matched_filter_experiment,
    sweep_snr,
    two_user_stream,
)
from .channel import add_noise
from .lyapunov import le_continuous_hybrid, le_map_1d, le_qr, le_rossler_pair, q_scaling_errors
from .maps import shift_map, shift_orbit_from_digits
from .oscillator import OscParams

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SWEEP_HEADER = ["snr_db", "I1", "I2", "sum_I", "C", "C_e", "ber1", "ber2"]


class Settings:
    """Typed access to the INI sections with defaults."""

    def __init__(self, parser: configparser.ConfigParser, seed_override=None):
        self.cp = parser
        seed = seed_override if seed_override is not None else parser.get("run", "seed", fallback=None)
        if seed is None:
            raise ConfigError("a seed is required ([run] seed or --seed)")
        try:
            self.seed = int(seed)
        except ValueError:
            raise ConfigError(f"seed must be an integer, got {seed!r}") from None
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def _get(self, conv, section, key, default):
        try:
            raw = self.cp.get(section, key, fallback=None)
            return default if raw is None or raw.strip() == "" else conv(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None

    def int(self, section, key, default, minimum=None):
        v = self._get(int, section, key, default)
        if minimum is not None and v < minimum:
            raise ConfigError(f"[{section}] {key} must be >= {minimum}")
        return v

    def float(self, section, key, default):
        return self._get(float, section, key, default)

    def opt_float(self, section, key):
        return self._get(float, section, key, None)

    def str(self, section, key, default):
        return self._get(str, section, key, default)

    def echo(self) -> dict:
        out = {s: dict(self.cp[s]) for s in self.cp.sections()}
        out.setdefault("run", {})["seed"] = str(self.seed)
        return out


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _oscillator(st: Settings, freq=1.0) -> OscParams:
    return OscParams(st.float("oscillator", "beta_base", math.log(2.0)), freq)


def _gains(st: Settings) -> tuple:
    return plan_gains(2, zeta1=st.float("gains", "zeta1", 0.2)).gains


# ---------------------------------------------------------------- commands


def cmd_return_maps(st: Settings, out: Path) -> dict:
    periods = st.int("return_maps", "periods", 100, minimum=1)
    divisor = st.int("oscillator", "dt_divisor", 2000, minimum=200)
    beta = _oscillator(st).beta_base
    results = {}
    rng = np.random.default_rng(st.seed)
    for k in (1, 2):
        u0, u1 = flow_return_map(k, periods, divisor, beta)
        pred = np.array([shift_map(u, k)[0] for u in u0])
        write_csv(out / f"flow_k{k}.csv", ["u_n", "u_next", "map_next"], zip(u0, u1, pred))
        digits = rng.integers(0, 1 << k, size=periods + 53 // k)
        u = shift_orbit_from_digits(digits, k)[: periods + 1]
        write_csv(out / f"map_k{k}.csv", ["u_n", "u_next"], zip(u[:-1], u[1:]))
        results[f"max_flow_map_deviation_k{k}"] = float(np.max(np.abs(u1 - pred)))
    return results


def cmd_received_map(st: Settings, out: Path) -> dict:
    periods = st.int("received_map", "periods", 10_000, minimum=2)
    snr = st.float("received_map", "snr_db", 40.0)
    gains = _gains(st)
    link = two_user_stream(periods, st.seed, gains)
    rx = add_noise(link.O, snr, st.seed)
    spec = PartitionSpec(gains)
    res = decode_stream(rx, spec).score(link.b1, link.b2)
    R = 4.0 * rx[:-1] - rx[1:]
    write_csv(out / "received_map.csv", ["n", "O_n", "O_next", "R", "j", "b1", "b2"],
              zip(range(periods), rx[:-1], rx[1:], R, res.j, link.b1, link.b2))
    write_csv(out / "partition.csv", ["j", "threshold"], zip(range(1, 8), spec.thresholds))
    write_csv(out / "bands.csv", ["j", "low", "high"], [(j, lo, hi) for j, (lo, hi) in enumerate(offset_bands(gains))])
    clean_j = decode_stream(link.O, spec).j
    return {
        "branches_clean": int(np.unique(clean_j).size),
        "symbol_errors": [int(res.err1.sum()), int(res.err2.sum())],
        "snr_db": snr,
    }


def _sweep_grid(st: Settings):
    lo = st.float("sweep", "snr_min", 0.0)
    hi = st.float("sweep", "snr_max", 50.0)
    step = st.float("sweep", "snr_step", 2.0)
    if step <= 0 or hi < lo:
        raise ConfigError("[sweep] needs snr_step > 0 and snr_max >= snr_min")
    return np.round(np.arange(lo, hi + 0.5 * step, step), 12)


def _run_sweep(st: Settings):
    grid = _sweep_grid(st)
    periods = st.int("sweep", "periods", 100_000, minimum=100)
    workers = st.int("sweep", "workers", 4, minimum=1)
    return grid, sweep_snr(grid, periods, st.seed, _gains(st), workers)


def cmd_sweep_snr(st: Settings, out: Path) -> dict:
    grid, reports = _run_sweep(st)
    write_csv(out / "sweep.csv", SWEEP_HEADER, [r.row() for r in reports])
    return {
        "grid": [float(g) for g in grid],
        "sum_I": [r.sum_info for r in reports],
        "below_capacity": bool(all(r.sum_info <= r.capacity for r in reports)),
    }


def cmd_matched_filter(st: Settings, out: Path) -> dict:
    periods = st.int("matched_filter", "periods", 220, minimum=20)
    snr = st.float("matched_filter", "snr_db", 20.0)
    warm = st.int("matched_filter", "warmup", 10, minimum=0)
    stride = st.int("matched_filter", "trace_stride", 20, minimum=1)
    run = matched_filter_experiment(periods, st.seed, snr, warm, _oscillator(st))
    for name, res in (("clean", run.clean), ("noisy", run.noisy)):
        off = run.traj.x.size - res.y.size
        sl = slice(0, res.y.size, stride)
        write_csv(out / f"filter_{name}.csv", ["t", "x", "s", "eta", "y", "S"],
                  zip(res.t[sl], run.traj.x[off:][sl], run.traj.s[off:][sl], res.eta[sl], res.y[sl], res.S[sl]))
    n = min(run.clean.symbols.size, run.signs.size)
    write_csv(out / "periods.csv", ["n", "s", "S_clean", "S_noisy"],
              zip(range(n), run.signs[:n], run.clean.symbols[:n], run.noisy.symbols[:n]))
    return {"match_rate_clean": run.clean_rate, "match_rate_noisy": run.noisy_rate, "snr_db": snr}


def cmd_lyapunov(st: Settings, out: Path) -> dict:
    steps = st.int("lyapunov", "rossler_steps", 1_000_000, minimum=1000)
    Q = st.float("lyapunov", "Q", 2.0)
    g1 = _gains(st)[0]
    spectra = []
    beta = _oscillator(st).beta_base
    p1 = _oscillator(st)
    e = math.exp(p1.theta)
    spectra.append(le_map_1d(lambda r: (e * r - (e - 1.0) * (1.0 if r >= 0 else -1.0), e), 0.3, 10_000,
                             "direct path map"))
    J = np.broadcast_to(np.array([[4.0, -2.0 * g1], [0.0, 2.0]]), (1000, 2, 2))
    spectra.append(le_qr(J, label="composed received map"))
    for f in (1.0, 2.0):
        p = OscParams(beta, f)
        spectra.append(le_continuous_hybrid(p))
        spectra.append(le_continuous_hybrid(p, inverse=True))
    s1, s2 = le_rossler_pair(Q=Q, n_steps=steps)
    spectra += [s1, s2]
    doc = {"spectra": [dict(s.as_dict(), **{k: v for k, v in s.extras.items() if k == "mean_trace"}) for s in spectra],
           "rossler_q_scaling_error": q_scaling_errors(s1, s2, Q).tolist()}
    with open(out / "spectra.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    return doc


def cmd_dispersion(st: Settings, out: Path) -> dict:
    n = st.int("dispersion", "symbols", 1000, minimum=10)
    delay = st.float("dispersion", "extra_delay", 0.125)
    snr = st.opt_float("dispersion", "snr_db")
    run = dispersion_experiment(n, st.seed, delay, snr, params=_oscillator(st))
    amb = np.concatenate([[False], run.ambiguous])
    write_csv(out / "dispersion.csv", ["n", "s", "s_hat", "ambiguous"], zip(range(run.sent.size), run.sent, run.decoded, amb))
    return {"K0": run.K0, "errors": run.errors, "ambiguous_steps": int(run.ambiguous.sum()), "symbols": int(run.sent.size)}


def cmd_interference(st: Settings, out: Path) -> dict:
    A = st.float("interference", "amplitude", 0.3)
    phi = st.float("interference", "phase", 1.0)
    a0 = st.float("interference", "alpha0", 1.0)
    run = interference_experiment(A, phi, alpha0=a0, seed=st.seed, params=_oscillator(st))
    write_csv(out / "interference.csv", ["quantity", "value"],
              [("c", run.c), ("le", run.le), ("offset_s_minus", run.offsets[0]), ("offset_s_plus", run.offsets[1]),
               ("expected_offset", run.expected_offset)])
    return {"c": run.c, "le": run.le, "offsets": list(run.offsets), "expected_offset": run.expected_offset}


def read_baseline(path) -> list[tuple[float, float, str]]:
    """Rows (snr_db, rate, unit) of an external rate table."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            if not {"snr_db", "rate"} <= set(fields):
                raise ConfigError(f"{path}: need columns snr_db and rate, found {fields}")
            rows = []
            for line, rec in enumerate(reader, start=2):
                try:
                    rows.append((float(rec["snr_db"]), float(rec["rate"]), (rec.get("unit") or "").strip()))
                except (TypeError, ValueError):
                    raise ConfigError(f"{path}:{line}: malformed row") from None
            return rows
    except OSError as exc:
        raise ConfigError(f"cannot read baseline: {exc}") from None


def unit_flag(unit: str) -> str:
    u = unit.lower().replace(" ", "")
    if u in ("", "bits/period", "bit/period"):
        return "ok"
    if u in ("bits/s", "bps", "bit/s", "bits/s/hz", "bps/hz"):
        return "assumed_T=1s"
    return f"mismatch:{unit}"


def cmd_overlay_external(st: Settings, out: Path, baseline: str, sweep_csv: str | None = None) -> dict:
    ext = read_baseline(baseline)
    if sweep_csv:
        try:
            with open(sweep_csv, newline="") as fh:
                own = {float(r["snr_db"]): float(r["sum_I"]) for r in csv.DictReader(fh)}
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"cannot read sweep {sweep_csv}: {exc}") from None
    else:
        grid, reports = _run_sweep(st)
        own = {float(r.snr_db): r.sum_info for r in reports}
    ext_map = {}
    for snr, rate, unit in ext:
        ext_map[snr] = (rate, unit_flag(unit))
    rows = []
    for snr in sorted(set(own) | set(ext_map)):
        rate, flag = ext_map.get(snr, ("", ""))
        rows.append((snr, own.get(snr, ""), rate, flag))
    write_csv(out / "overlay.csv", ["snr_db", "sum_I", "external_rate", "unit_flag"], rows)
    return {"rows": len(rows), "external_points": len(ext_map), "flags": sorted({f for _, f in ext_map.values()})}


COMMANDS = {
    "return-maps": cmd_return_maps,
    "received-map": cmd_received_map,
    "sweep-snr": cmd_sweep_snr,
    "matched-filter": cmd_matched_filter,
    "lyapunov": cmd_lyapunov,
    "overlay-external": cmd_overlay_external,
    "dispersion": cmd_dispersion,
    "interference": cmd_interference,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wic1", description="Chaos-based multi-user link experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="INI run configuration")
        sp.add_argument("--seed", type=int, help="override [run] seed")
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if name == "overlay-external":
            sp.add_argument("baseline", help="CSV with columns snr_db,rate[,unit]")
            sp.add_argument("--sweep", help="existing sweep.csv to merge instead of re-running")
    return ap


def load_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if path is not None:
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"bad config {path}: {exc}") from None
    return cp


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        st = Settings(load_config(args.config), args.seed)
        out = args.out
        out.mkdir(parents=True, exist_ok=True)
        fn = COMMANDS[args.command]
        if args.command == "overlay-external":
            results = fn(st, out, args.baseline, args.sweep)
        else:
            results = fn(st, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except WiC1Error as exc:
        # remaining domain errors stem from configured values
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest = {
        "command": args.command,
        "config": st.echo(),
        "version": __version__,
        "results": results,
        "wall_time_s": time.perf_counter() - t0,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
    print(json.dumps({"command": args.command, "out": str(out)}))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
