"""catwig command line.

Settings come from flags, then a key=value file named by $CATWIG_CONFIG,
then built-in defaults.  Exit codes: 0 ok, 2 usage, 3 numeric
precondition (truncation, degenerate state, grid), 4 file I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import hv, measurement, qubits
from .hilbert import DegenerateStateError, DimensionError, TruncationError, default_cutoff
from .qfunc import GridError, q_distance, q_marginal_XX
from .states import fr_mixture, fr_state, wf_state

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

DEFAULTS = {
    "alpha": 3.0,
    "beta": 3.0,
    "gamma": 3.0,
    "theta": math.pi / 4,
    "omega": 1.0,
    "cutoff": None,
    "grid": None,
    "times": None,
    "scenario": "fr",
    "bases": "zz",
    "format": "json",
    "out": None,
}
FLOAT_KEYS = ("alpha", "beta", "gamma", "theta", "omega")


class UsageError(Exception):
    pass


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        grid = (float(lo), float(hi), int(n))
    except ValueError:
        raise UsageError(f"grid must look like min:max:n, got {text!r}") from None
    if grid[2] < 2 or not grid[1] > grid[0]:
        raise UsageError(f"empty grid {text!r}")
    return grid


def parse_times(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"times must be comma-separated numbers, got {text!r}") from None


def parse_bases(text: str) -> tuple[str, str]:
    b = tuple(text.replace(",", "").strip())
    if len(b) != 2 or any(s not in ("z", "y") for s in b):
        raise UsageError(f"bases must be two of z/y (e.g. 'yz'), got {text!r}")
    return b


def read_config_file(path: str) -> dict:
    cfg = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise OSError(f"cannot read config {path}: {e}") from e
    for k, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{k}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{k}: unknown key {key!r}")
        cfg[key] = val
    return cfg


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults, then coerce types."""
    cfg = dict(DEFAULTS)
    path = os.environ.get("CATWIG_CONFIG")
    if path:
        cfg.update(read_config_file(path))
    cfg.update({k: v for k, v in vars(args).items() if k in DEFAULTS and v is not None})
    try:
        for k in FLOAT_KEYS:
            cfg[k] = float(cfg[k])
        if cfg["cutoff"] is not None:
            cfg["cutoff"] = int(cfg["cutoff"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    if isinstance(cfg["grid"], str):
        cfg["grid"] = parse_grid(cfg["grid"])
    if isinstance(cfg["times"], str):
        cfg["times"] = parse_times(cfg["times"])
    cfg["bases"] = parse_bases(cfg["bases"]) if isinstance(cfg["bases"], str) else cfg["bases"]
    if cfg["scenario"] not in ("wf", "fr"):
        raise UsageError(f"scenario must be wf or fr, got {cfg['scenario']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {cfg['format']!r}")
    if cfg["cutoff"] is None:
        cfg["cutoff"] = default_cutoff(max(abs(cfg["alpha"]), abs(cfg["beta"])))
    return cfg


def echo(cfg: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items() if k != "out"}


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    path.write_text(text)


def base_state(cfg):
    a, b = cfg["alpha"], cfg["beta"]
    if cfg["scenario"] == "wf":
        return wf_state(cfg["theta"], a, ("z", "z"), cfg["cutoff"]).state
    return fr_state("zz", a, b, cutoff=cfg["cutoff"]).state


def default_axis(cfg) -> tuple[float, float, int]:
    half = max(abs(cfg["alpha"]), abs(cfg["beta"])) + 6
    return cfg["grid"] or (-half, half, 121)


def cmd_qgrid(cfg) -> None:
    out = Path(cfg["out"] or "qgrid_out")
    out.mkdir(parents=True, exist_ok=True)
    state = base_state(cfg)
    axis = default_axis(cfg)
    rot = tuple(s == "y" for s in cfg["bases"])
    times = cfg["times"] if cfg["times"] else (None,)
    # Mixture that a single rotation cannot tell apart from the FR state.
    compare = {}
    if cfg["scenario"] == "fr":
        if rot == (True, False):
            compare["mixB"] = fr_mixture("mixB", cfg["alpha"], cfg["beta"], cfg["cutoff"])
        elif rot == (False, True):
            compare["mixA"] = fr_mixture("mixA", cfg["alpha"], cfg["beta"], cfg["cutoff"])
        else:
            for k in ("mixA", "mixB"):
                compare[k] = fr_mixture(k, cfg["alpha"], cfg["beta"], cfg["cutoff"])
    steps = []
    for k, t in enumerate(times):
        ev = None if t is None else (t if rot[0] else 0.0, t if rot[1] else 0.0)
        grid = q_marginal_XX(state, axis, evolution=ev, omega=cfg["omega"])
        name = f"qgrid_{k:03d}.csv"
        (out / name).write_text(grid.to_csv())
        dist = {m: q_distance(grid, q_marginal_XX(rho, axis, evolution=ev, omega=cfg["omega"]))[0]
                for m, rho in compare.items()}
        steps.append({"file": name, "evolution": list(ev or (0.0, 0.0)), "sup_distance": dist})
    manifest = {
        "config": echo(cfg),
        "state": f"{cfg['scenario']} zz-prepared, rotated labs {''.join(cfg['bases'])}",
        "steps": steps,
        "max_sup_distance": {m: max(s["sup_distance"][m] for s in steps) for m in compare},
    }
    (out / "manifest.json").write_text(dump_json(manifest))


def qubit_checks() -> list[hv.Check]:
    th = math.pi / 4
    b = qubits.brukner_state(th, "minus")
    expect = {"zz": -math.cos(th), "zy": -math.sin(th), "yz": -math.sin(th), "yy": math.cos(th)}
    out = [
        hv.Check(f"qubit Bell-Wigner moment {k}", v, qubits.qubit_moments(b, tuple(k)), 1e-12)
        for k, v in expect.items()
    ]
    out.append(hv.Check("qubit Bell-Wigner |S|", 2 * math.sqrt(2), abs(qubits.qubit_chsh(b)), 1e-12))
    xx = qubits.fr_microscopic("xx").probabilities()[3]
    out.append(hv.Check("qubit FR P(T_x, down_x)", 1 / 12, float(xx), 1e-12))
    return out


def build_report(cfg) -> dict:
    a, b = cfg["alpha"], cfg["beta"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        checks = qubit_checks()
        wf = wf_state(cfg["theta"], a, ("z", "z"), cfg["cutoff"])
        checks.append(hv.Check("wf |S|", 2 * math.sqrt(2), abs(measurement.chsh(wf, omega=cfg["omega"])), 5e-3))
        fr = fr_state("zz", a, b, cutoff=cfg["cutoff"])
        mom = measurement.moments(fr, omega=cfg["omega"])
        for k, v in {"zz": -1 / 3, "zy": -2 / 3, "yz": -2 / 3, "yy": 2 / 3}.items():
            checks.append(hv.Check(f"fr moment {k}", v, mom[k], 2e-3))
        s_fr = mom["zz"] + mom["zy"] + mom["yz"] - mom["yy"]
        checks.append(hv.Check("fr |S|", 7 / 3, abs(s_fr), 5e-3))
        for pair, tol, expected in (("yy", 1e-3, 1 / 12), ("yz", 1e-6, 0.0), ("zy", 1e-6, 0.0)):
            rotated = fr_state(pair, a, b, cutoff=cfg["cutoff"])
            p = measurement.pointer_probabilities(rotated)["--"]
            checks.append(hv.Check(f"fr P(--|{pair})", expected, p, tol, "abs" if expected else "le"))
        rho = fr_mixture("zz", a, b, cutoff=cfg["cutoff"])
        checks.append(hv.Check("mixture |S|", 2.0, abs(measurement.chsh(rho, omega=cfg["omega"])), 1e-9, "le"))
        checks.extend(hv.Check(f"lhv max {p}", 2, hv.lhv_chsh_max(p), 0)
                      for p in ((1, 1, 1, -1), (1, 1, -1, 1), (1, -1, 1, 1), (-1, 1, 1, 1)))
        verdict = hv.dmr_no_go()
        wmr = hv.wmr_model_check(a, cutoff=cfg["cutoff"], omega=cfg["omega"])
    return {
        "config": echo(cfg),
        "checks": [c.to_dict() for c in checks],
        "dmr_table_sha256": hv.dmr_table_hash(),
        "dmr_no_go": {
            "verdict": verdict.verdict,
            "witness": [list(w.as_tuple()) for w in verdict.witness],
        },
        "wmr_check": wmr.to_dict(),
        "warnings": sorted({str(w.message) for w in caught}),
        "all_passed": all(c.passed for c in checks) and (wmr.passed or not wmr.checks),
    }


def cmd_report(cfg) -> None:
    emit(dump_json(build_report(cfg)), cfg["out"])


def cmd_dmr_table(cfg) -> None:
    text = hv.dmr_table_csv() if cfg["format"] == "csv" else hv.dmr_table_json()
    emit(text, cfg["out"])


def _moments(cfg) -> dict:
    state = base_state(cfg)
    return measurement.moments(state, omega=cfg["omega"])


def cmd_moments(cfg) -> None:
    m = _moments(cfg)
    if cfg["format"] == "csv":
        text = "pair,moment\n" + "".join(f"{k},{v:.17g}\n" for k, v in m.items())
    else:
        text = dump_json({"config": echo(cfg), "moments": m})
    emit(text, cfg["out"])


def cmd_chsh(cfg) -> None:
    m = _moments(cfg)
    s = m["zz"] + m["zy"] + m["yz"] - m["yy"]
    if cfg["format"] == "csv":
        text = f"S,abs_S\n{s:.17g},{abs(s):.17g}\n"
    else:
        text = dump_json({"config": echo(cfg), "moments": m, "S": s, "abs_S": abs(s)})
    emit(text, cfg["out"])


def cmd_wmr_check(cfg) -> None:
    times = cfg["times"] or None
    report = hv.wmr_model_check(cfg["alpha"], times, cutoff=cfg["cutoff"], omega=cfg["omega"])
    emit(dump_json({"config": echo(cfg), **report.to_dict()}), cfg["out"])


COMMANDS = {
    "qgrid": cmd_qgrid,
    "report": cmd_report,
    "dmr-table": cmd_dmr_table,
    "moments": cmd_moments,
    "chsh": cmd_chsh,
    "wmr-check": cmd_wmr_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catwig", description="Cat-state Wigner's-friend calculations")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--grid", help="min:max:n for both X axes")
    p.add_argument("--times", help="comma-separated evolution times")
    p.add_argument("--scenario", choices=("wf", "fr"))
    p.add_argument("--bases", help="lab settings after rotation, e.g. yz")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file, or directory for qgrid ('-' = stdout)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = resolve(args)
        COMMANDS[args.command](cfg)
    except UsageError as e:
        print(f"catwig: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, DegenerateStateError, DimensionError, GridError) as e:
        print(f"catwig: numeric precondition failed: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"catwig: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
