"""Command-line front end: simulate, sweep and nash subcommands.

Configuration files are plain UTF-8 text, one ``key = value`` per line with
``#`` comments. All CSV outputs carry a header row, use fixed column orders
and shortest round-trip float formatting, so regression fixtures stay byte
stable. Exit codes: 0 success, 2 usage/config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .engine import Scenario, SimulationResult, run, scenario_digest, smooth_trajectory
from .game import (
    EquilibriumSet,
    PayoffTable,
    SWEEP_HORIZON_DEFAULT,
    epsilon_nash,
    summarize,
    sweep,
)
from .model import (
    ConfigurationError,
    SUBSTREAM_SCHEME,
    TrafficClass,
    TrafficConfig,
    uniform_length_pmf,
)
from .reputation import FloorPolicy, ReputationConfig
from .strategy import StrategyProfile, format_profile, neutral_profile, parse_profile

SIMULATE_HORIZON_DEFAULT = 100_000

PAYOFF_COLUMNS = (
    "ta_comb",
    "ta_down",
    "tb_down",
    "tb_up",
    "u_a_be",
    "u_a_vo",
    "u_b_be",
    "u_b_vo",
    "U_a",
    "U_b",
)


class ConfigError(ValueError):
    """Bad configuration file or option."""


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines, ignoring blanks and # comments."""
    items: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        items[key.strip()] = value.strip()
    return items


def load_config(path: Optional[str]) -> Dict[str, str]:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(p.read_text(encoding="utf-8"))


def _parse_seeds(value: str) -> List[int]:
    parts = [p for chunk in value.split(",") for p in chunk.split()]
    if not parts:
        raise ConfigError("empty seed list")
    return [int(p) for p in parts]


def build_settings(cfg: Dict[str, str], horizon_default: int) -> Dict[str, object]:
    """Resolve a raw config dict into typed simulation settings."""
    known_prefixes = ("pmf.",)
    known = {
        "rho_a",
        "rho_b",
        "w",
        "R",
        "r0",
        "epsilon",
        "horizon",
        "seed",
        "seeds",
        "floor_policy",
        "len_min",
        "len_max",
        "profile",
        "r_am_cap",
    }
    for key in cfg:
        if key not in known and not any(key.startswith(p) for p in known_prefixes):
            raise ConfigError(f"unknown config key: {key}")
    try:
        pmf_entries = {
            int(key[4:]): float(value) for key, value in cfg.items() if key.startswith("pmf.")
        }
        settings: Dict[str, object] = {
            "rho_a": float(cfg.get("rho_a", "0.5")),
            "rho_b": float(cfg.get("rho_b", "0.5")),
            "w": float(cfg.get("w", "10")),
            "R": int(cfg.get("R", "10")),
            "epsilon": float(cfg.get("epsilon", "0.15")),
            "horizon": int(cfg.get("horizon", str(horizon_default))),
            "floor_policy": FloorPolicy(cfg.get("floor_policy", "unclamped")),
            "len_min": int(cfg.get("len_min", "6")),
            "len_max": int(cfg.get("len_max", "15")),
            "pmf": pmf_entries,
            "r_am_cap": float(cfg["r_am_cap"]) if "r_am_cap" in cfg else None,
            "profile": parse_profile(cfg["profile"]) if "profile" in cfg else None,
        }
        settings["r0"] = int(cfg.get("r0", str(settings["R"])))
        if "seeds" in cfg:
            settings["seeds"] = _parse_seeds(cfg["seeds"])
        elif "seed" in cfg:
            settings["seeds"] = [int(cfg["seed"])]
        else:
            settings["seeds"] = [1]
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    return settings


def build_traffic(settings: Dict[str, object], seed: int) -> TrafficConfig:
    pmf = settings["pmf"] or uniform_length_pmf(settings["len_min"], settings["len_max"])
    return TrafficConfig(
        rho_a=settings["rho_a"],
        rho_b=settings["rho_b"],
        length_pmf=pmf,
        horizon=settings["horizon"],
        seed=seed,
    )


def build_reputation(settings: Dict[str, object]) -> ReputationConfig:
    return ReputationConfig(
        ceiling=settings["R"],
        r0=settings["r0"],
        floor_policy=settings["floor_policy"],
        r_am_cap=settings["r_am_cap"],
    )


def settings_echo(settings: Dict[str, object], seeds: Sequence[int]) -> List[str]:
    """Config lines that re-parse to the same effective configuration."""
    lines = [
        f"rho_a = {settings['rho_a']!r}",
        f"rho_b = {settings['rho_b']!r}",
        f"w = {settings['w']!r}",
        f"R = {settings['R']}",
        f"r0 = {settings['r0']}",
        f"epsilon = {settings['epsilon']!r}",
        f"horizon = {settings['horizon']}",
        f"floor_policy = {settings['floor_policy'].value}",
        f"seeds = {','.join(str(s) for s in seeds)}",
    ]
    pmf = settings["pmf"] or uniform_length_pmf(settings["len_min"], settings["len_max"])
    for length in sorted(pmf):
        lines.append(f"pmf.{length} = {pmf[length]!r}")
    if settings["r_am_cap"] is not None:
        lines.append(f"r_am_cap = {settings['r_am_cap']!r}")
    if settings["profile"] is not None:
        lines.append(f"profile = {format_profile(settings['profile'])}")
    return lines


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(
    path: Path,
    settings: Dict[str, object],
    seeds: Sequence[int],
    outputs: Sequence[Path],
    duration: float,
    digest: str,
) -> None:
    lines = [
        f"code_version = {__version__}",
        f"substream_scheme = {SUBSTREAM_SCHEME}",
        f"config_digest = {digest}",
        f"duration_seconds = {duration!r}",
        "",
        "[config]",
        *settings_echo(settings, seeds),
        "",
        "[outputs]",
        *[str(p.name) for p in outputs],
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_simulation(result: SimulationResult, out_dir: Path) -> List[Path]:
    sessions = out_dir / "sessions.csv"
    _write_csv(
        sessions,
        ("station", "k", "start", "length", "icos", "cos", "u"),
        [
            (rec.station, rec.k, rec.start, rec.length, rec.icos.name, rec.cos.name, rec.u)
            for rec in result.records
        ],
    )
    reputation = out_dir / "reputation.csv"
    _write_csv(
        reputation,
        ("slot", "station", "event", "r_before", "r_after", "r_am"),
        [
            (ev.slot, ev.station, ev.kind.value, ev.r_before, ev.r_after, ev.r_am)
            for ev in result.events
        ],
    )
    trajectories = out_dir / "trajectories.csv"
    rows: List[Tuple[object, object, object]] = []
    for station, records in (("a", result.records_a), ("b", result.records_b)):
        for cls in (TrafficClass.BE, TrafficClass.VO):
            series = [rec.u for rec in records if rec.icos == cls]
            if not series:
                continue
            smoothed = smooth_trajectory(series)
            name = f"u_{station}_{cls.name.lower()}"
            rows.extend((name, idx + 1, float(v)) for idx, v in enumerate(smoothed))
    rows.extend(("r", slot, int(v)) for slot, v in enumerate(result.r_trace))
    _write_csv(trajectories, ("series", "index", "value"), rows)

    summary = out_dir / "summary.csv"
    rep = result.report
    _write_csv(
        summary,
        ("station", "u_be", "u_vo", "U", "n_be", "n_vo", "empty_be", "empty_vo"),
        [
            ("A", rep.a.u_be, rep.a.u_vo, rep.a.weighted, rep.a.n_be, rep.a.n_vo, rep.a.empty_be, rep.a.empty_vo),
            ("B", rep.b.u_be, rep.b.u_vo, rep.b.weighted, rep.b.n_be, rep.b.n_vo, rep.b.empty_be, rep.b.empty_vo),
        ],
    )
    return [sessions, reputation, trajectories, summary]


def _payoff_rows(table: PayoffTable) -> List[Tuple[object, ...]]:
    rows = []
    for i, (ta_comb, ta_down) in enumerate(table.strategies_a):
        for j, (tb_down, tb_up) in enumerate(table.strategies_b):
            rows.append(
                (
                    ta_comb,
                    ta_down,
                    tb_down,
                    tb_up,
                    float(table.u_a_be[i, j]),
                    float(table.u_a_vo[i, j]),
                    float(table.u_b_be[i, j]),
                    float(table.u_b_vo[i, j]),
                    float(table.payoff_a[i, j]),
                    float(table.payoff_b[i, j]),
                )
            )
    return rows


def _read_payoff_file(path: Path, w: float) -> PayoffTable:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(PAYOFF_COLUMNS):
            raise ConfigError(f"{path}: unexpected payoff header {header}")
        rows = [tuple(row) for row in reader]
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    strategies_a: List[Tuple[int, int]] = []
    strategies_b: List[Tuple[int, int]] = []
    for row in rows:
        sa = (int(float(row[0])), int(float(row[1])))
        sb = (int(float(row[2])), int(float(row[3])))
        if sa not in strategies_a:
            strategies_a.append(sa)
        if sb not in strategies_b:
            strategies_b.append(sb)
    n_i, n_j = len(strategies_a), len(strategies_b)
    if n_i * n_j != len(rows):
        raise ConfigError(f"{path}: rows do not form a full strategy grid")
    shape = (n_i, n_j)
    u_a_be = np.zeros(shape)
    u_a_vo = np.zeros(shape)
    u_b_be = np.zeros(shape)
    u_b_vo = np.zeros(shape)
    payoff_a = np.zeros(shape)
    payoff_b = np.zeros(shape)
    index_a = {s: i for i, s in enumerate(strategies_a)}
    index_b = {s: j for j, s in enumerate(strategies_b)}
    for row in rows:
        i = index_a[(int(float(row[0])), int(float(row[1])))]
        j = index_b[(int(float(row[2])), int(float(row[3])))]
        u_a_be[i, j] = float(row[4])
        u_a_vo[i, j] = float(row[5])
        u_b_be[i, j] = float(row[6])
        u_b_vo[i, j] = float(row[7])
        payoff_a[i, j] = float(row[8])
        payoff_b[i, j] = float(row[9])
    return PayoffTable(
        strategies_a=strategies_a,
        strategies_b=strategies_b,
        u_a_be=u_a_be,
        u_a_vo=u_a_vo,
        u_b_be=u_b_be,
        u_b_vo=u_b_vo,
        payoff_a=payoff_a,
        payoff_b=payoff_b,
        halted=np.zeros(shape, dtype=bool),
        seed=-1,
        w=w,
        ceiling=max(s[0] for s in strategies_a),
        rho_a=-1.0,
        rho_b=-1.0,
        horizon=-1,
    )


def _prepare_out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"out dir not writable: {exc}") from exc
    return out


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    settings = build_settings(cfg, SIMULATE_HORIZON_DEFAULT)
    if args.horizon is not None:
        settings["horizon"] = args.horizon
    profile = settings["profile"]
    if args.profile is not None:
        profile = parse_profile(args.profile)
    if profile is None:
        profile = neutral_profile()
    seed = args.seed if args.seed is not None else settings["seeds"][0]
    out_dir = _prepare_out_dir(args.out)

    scenario = Scenario(
        traffic=build_traffic(settings, seed),
        reputation=build_reputation(settings),
        w=settings["w"],
        profile=profile,
    )
    started = time.perf_counter()
    result = run(scenario)
    outputs = _write_simulation(result, out_dir)
    duration = time.perf_counter() - started
    settings["profile"] = profile
    _write_manifest(
        out_dir / "manifest.txt",
        settings,
        [seed],
        outputs,
        duration,
        scenario_digest(scenario, seed),
    )
    if result.halted:
        print(f"run halted at revocation slot {result.revoked_slot}", file=sys.stderr)
    print(f"wrote {len(outputs) + 1} files to {out_dir}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    settings = build_settings(cfg, SWEEP_HORIZON_DEFAULT)
    if args.horizon is not None:
        settings["horizon"] = args.horizon
    seeds = _parse_seeds(args.seeds) if args.seeds else settings["seeds"]
    out_dir = _prepare_out_dir(args.out)
    reputation = build_reputation(settings)

    started = time.perf_counter()
    outputs = []
    for seed in seeds:
        traffic = build_traffic(settings, seed)
        table = sweep(traffic, reputation, settings["w"], workers=args.workers)
        path = out_dir / f"payoffs_seed{seed}.csv"
        _write_csv(path, PAYOFF_COLUMNS, _payoff_rows(table))
        outputs.append(path)
    duration = time.perf_counter() - started
    _write_manifest(out_dir / "manifest.txt", settings, seeds, outputs, duration, "")
    print(f"wrote {len(outputs)} payoff files to {out_dir}")
    return 0


def cmd_nash(args: argparse.Namespace) -> int:
    if not 0.0 <= args.epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in [0, 1], got {args.epsilon}")
    out_dir = _prepare_out_dir(args.out)
    tables = []
    run_ids = []
    for name in args.payoffs:
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"payoff file not found: {name}")
        tables.append(_read_payoff_file(path, args.w))
        run_ids.append(path.stem)
    ref = tables[0]
    for path_name, table in zip(args.payoffs, tables[1:], strict=False):
        if (
            table.strategies_a != ref.strategies_a
            or table.strategies_b != ref.strategies_b
        ):
            raise ConfigError(f"{path_name}: strategy space differs from {args.payoffs[0]}")

    sets = [epsilon_nash(table, args.epsilon) for table in tables]
    summary = summarize(sets, tables)

    nash_rows = []
    for run_id, es, table in zip(run_ids, sets, tables):
        for i, j in es.indices:
            ta_comb, ta_down = table.strategies_a[i]
            tb_down, tb_up = table.strategies_b[j]
            nash_rows.append(
                (
                    run_id,
                    ta_comb,
                    ta_down,
                    tb_down,
                    tb_up,
                    float(table.u_a_be[i, j]),
                    float(table.u_a_vo[i, j]),
                    float(table.u_b_be[i, j]),
                    float(table.u_b_vo[i, j]),
                    float(table.payoff_a[i, j]),
                    float(table.payoff_b[i, j]),
                )
            )
    nash_path = out_dir / "nash.csv"
    _write_csv(nash_path, ("run",) + PAYOFF_COLUMNS, nash_rows)

    lines = [
        f"epsilon = {args.epsilon!r}",
        f"runs = {len(tables)}",
        f"pooled_equilibria = {len(summary.pooled_points_a)}",
        f"pooled_starvation = {summary.pooled_starvation}",
        f"pooled_frac_u_a_vo_ge_u_b_vo = {summary.pooled_frac_vo_a_ge_b!r}",
        f"pooled_frac_u_a_be_ge_u_b_be = {summary.pooled_frac_be_a_ge_b!r}",
        "",
        "per-run equilibrium counts:",
    ]
    for run_id, rs in zip(run_ids, summary.per_run):
        flag = " (EMPTY)" if rs.empty else ""
        lines.append(
            f"  {run_id}: n={rs.n_equilibria} starvation={rs.starvation} "
            f"frac_vo_a_ge_b={rs.frac_vo_a_ge_b!r} frac_be_a_ge_b={rs.frac_be_a_ge_b!r}{flag}"
        )
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote nash.csv ({len(nash_rows)} rows) and report.txt to {out_dir}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risc2win",
        description="Simulate the relay reputation scheme and analyse the induced game.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write trajectory CSVs")
    sim.add_argument("--config", help="config file (key = value lines)")
    sim.add_argument("--profile", help='threshold profile, e.g. "(3, 1, 4, 1)"')
    sim.add_argument("--seed", type=int, help="master traffic seed")
    sim.add_argument("--horizon", type=int, help="simulated slots")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="payoff table over the full strategy space, per seed")
    sw.add_argument("--config", help="config file")
    sw.add_argument("--seeds", help="comma-separated seed list (overrides config)")
    sw.add_argument("--horizon", type=int, help="simulated slots per cell")
    sw.add_argument("--workers", type=int, help="parallel workers for sweep cells")
    sw.add_argument("--out", required=True, help="output directory")
    sw.set_defaults(func=cmd_sweep)

    na = sub.add_parser("nash", help="epsilon-Nash equilibria from payoff CSVs")
    na.add_argument("payoffs", nargs="+", help="payoff CSV files from the sweep subcommand")
    na.add_argument("--epsilon", type=float, default=0.15)
    na.add_argument("--w", type=float, default=10.0, help="VO weight used in the sweep")
    na.add_argument("--out", required=True, help="output directory")
    na.set_defaults(func=cmd_nash)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
