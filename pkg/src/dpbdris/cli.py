"""Command-line experiments.

Subcommands
-----------
sweep-gain      BD-RIS gain versus chi for the four polarization/fading scenarios
pareto          power/complexity frontier for opposite polarization under LoS
verify-scaling  Monte Carlo check of every scaling law (exit 1 on any failure)
synth           synthesize an optimal scattering matrix and report its residuals
oracle-check    brute-force the pairing optimum over all partitions

Exit status: 0 when every verdict passes, 1 when any fails, 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import closedform as cf
from .channel import LoS, compose, sample_fading
from .montecarlo import (DEFAULT_REL_TOL, DEFAULT_TRIALS, estimate_gain, scenario_config,
                         verify_scaling_law)
from .oracle import oracle_check
from .scattering import (POWER_RTOL, SYNTH_TOL, RisArchitecture, max_power, received_power,
                         relative_gap, synth_group_optimal)

SIG_DIGITS = 12


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Parsing helpers
# --------------------------------------------------------------------------

def parse_grid(values, kind=float) -> list:
    """Flatten repeated/comma-separated values; ``a:b:k`` expands to k evenly spaced points."""
    out = []
    for v in values:
        for tok in str(v).split(","):
            tok = tok.strip()
            if not tok:
                continue
            if ":" in tok:
                try:
                    a, b, k = tok.split(":")
                    a, b, k = float(a), float(b), int(k)
                except ValueError:
                    raise UsageError(f"bad range {tok!r}; expected start:stop:count") from None
                if k < 2:
                    raise UsageError(f"range {tok!r} needs at least two points")
                out.extend(kind(a + (b - a) * i / (k - 1)) for i in range(k))
            else:
                try:
                    out.append(kind(tok))
                except ValueError:
                    raise UsageError(f"cannot parse {tok!r}") from None
    return out


def chi_grid(values, default) -> list:
    grid = parse_grid(values) if values else list(default)
    if not grid:
        raise UsageError("empty chi grid")
    bad = [c for c in grid if not 0.0 <= c <= 1.0]
    if bad:
        raise UsageError(f"chi values must lie in [0, 1], got {bad}")
    return grid


def int_list(values, default) -> list:
    return parse_grid(values, int) if values else list(default)


def scenarios(values, default) -> list:
    if not values:
        return list(default)
    try:
        return [cf.Scenario.parse(s) for s in parse_grid(values, str)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def fmt_csv(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return format(float(value), f".{SIG_DIGITS}g")
    if isinstance(value, list):
        return ";".join(",".join(str(i) for i in g) for g in value)
    return str(value)


def json_safe(value):
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(rows: list, columns: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([json_safe({c: r.get(c) for c in columns}) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt_csv(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def sweep_gain(chis, scens, n_elements=None, trials=None, seed=0) -> list:
    """One row per (scenario, chi): asymptotic gain, optionally finite-N and empirical ratios."""
    rows = []
    for sc in scens:
        for chi in chis:
            row = {"scenario": sc.name, "chi": chi, "gain": cf.gain(sc, chi)}
            if n_elements is not None:
                row["n"] = n_elements
                row["finite_gain"] = cf.finite_gain(sc, n_elements, chi)
                if trials:
                    est = estimate_gain(scenario_config(sc, n_elements, chi), trials, seed)
                    row.update(empirical_gain=est.ratio, empirical_stderr=est.stderr,
                               trials=trials, seed=seed)
            rows.append(row)
    return rows


def pareto_rows(n_elements: int, chis) -> list:
    rows = []
    for chi in chis:
        for p in cf.pareto_frontier(n_elements, chi):
            rows.append({"chi": chi, "n": p.n, "complexity": p.complexity,
                         "groups": len(p.architecture.groups), "power": p.power})
    return rows


SCALING_SCENARIOS = tuple(
    cf.Scenario(r, f) for f in (cf.Fading.RAYLEIGH, cf.Fading.LOS)
    for r in (cf.Relation.UNI, cf.Relation.SAME, cf.Relation.OPPOSITE))


def verify_scaling(ns, chis, trials, seed, rel_tol, scens=SCALING_SCENARIOS,
                   law_scale=1.0) -> list:
    """Verdict rows for every (scenario, architecture class, N, chi) cell.

    LoS laws are deterministic, so their cells use a single trial.
    """
    rows = []
    for n in ns:
        for sc in scens:
            cell_chis = [1.0] if sc.relation is cf.Relation.UNI else chis
            cell_trials = 1 if sc.fading is cf.Fading.LOS else trials
            for chi in cell_chis:
                for ac in cf.ArchClass:
                    rep = verify_scaling_law(sc, ac, n, chi, cell_trials, seed, rel_tol,
                                             law_scale=law_scale)
                    rows.append({"scenario": sc.name, "arch": ac.value, "n": n, "chi": chi,
                                 **rep.to_dict()})
    return rows


def synth_report(n_elements, chi, scenario, arch_spec, seed, zero_phases=False) -> dict:
    arch = architecture_from_spec(arch_spec, n_elements)
    fading = None
    if scenario.fading is cf.Fading.LOS and zero_phases:
        fading = LoS(np.zeros(n_elements), np.zeros(n_elements))
    config = scenario_config(scenario, n_elements, chi, fading)
    rng = np.random.default_rng(seed)
    real = compose(config, sample_fading(config.fading, n_elements, rng))
    theta = synth_group_optimal(arch, real.h_r, real.h_t)
    achieved = received_power(theta, real.h_r, real.h_t, config.tx_power)
    bound = max_power(arch, real.h_r, real.h_t, config.tx_power)
    residuals = theta.residuals()
    ratio = achieved / bound if bound > 0 else (1.0 if achieved == 0 else math.inf)
    ok = relative_gap(achieved, bound) <= POWER_RTOL and all(v <= SYNTH_TOL for v in residuals.values())
    return {
        **theta.to_json_dict(),
        "scenario": scenario.name,
        "chi": config.chi,
        "seed": seed,
        "complexity": arch.complexity,
        "achieved_power": achieved,
        "bound_power": bound,
        "ratio": ratio,
        "residuals": residuals,
        "verdict": "pass" if ok else "fail",
        "channel": real.to_json_dict(),
    }


def architecture_from_spec(spec: str, n_elements: int) -> RisArchitecture:
    """``single``, ``group2`` (V/H pairs), ``fully`` or an explicit 1-based partition."""
    key = spec.strip().lower()
    if key == "single":
        return RisArchitecture.single(n_elements)
    if key == "fully":
        return RisArchitecture.fully(n_elements)
    if key == "group2":
        return cf.optimal_architecture(n_elements, n_elements // 2)
    try:
        return RisArchitecture.parse(spec, n_elements)
    except ValueError as exc:
        raise UsageError(f"malformed partition spec {spec!r}: {exc}") from None


# --------------------------------------------------------------------------
# argparse wiring
# --------------------------------------------------------------------------

def _common(p, fmt_default="csv", n_help="number of RIS elements"):
    p.add_argument("--n", action="append", help=n_help)
    p.add_argument("--chi", action="append",
                   help="inverse XPD; repeatable, comma list, or start:stop:count")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpbdris", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-gain", help="gain versus chi")
    _common(p, n_help="add finite-N ratio columns for this N")
    p.add_argument("--scenario", action="append",
                   help="e.g. same-rayleigh, opposite-los (default: the four dual-polarized ones)")
    p.add_argument("--empirical", action="store_true",
                   help="also estimate the finite-N ratio by Monte Carlo (needs --n)")

    p = sub.add_parser("pareto", help="power/complexity frontier (opposite polarization, LoS)")
    _common(p)

    p = sub.add_parser("verify-scaling", help="Monte Carlo check of the scaling laws")
    _common(p, n_help="element counts (default 8,16,32)")
    p.add_argument("--scenario", action="append")
    p.add_argument("--law-scale", type=float, default=1.0, help=argparse.SUPPRESS)

    p = sub.add_parser("synth", help="synthesize an optimal scattering matrix")
    _common(p, fmt_default="json")
    p.add_argument("--scenario", default="opposite-los")
    p.add_argument("--arch", default="group2",
                   help="single, group2, fully, or a partition such as '1,3;2,4'")
    p.add_argument("--zero-phases", action="store_true", help="LoS with all phases 0")

    p = sub.add_parser("oracle-check", help="brute-force check of the pairing optimum")
    _common(p, fmt_default="json", n_help="element counts (default 4,6,8)")
    p.add_argument("--pairs", action="append", help="pair counts n (default: 0..N/2)")
    return parser


def _single_n(args, default):
    ns = int_list(args.n, [default])
    if len(ns) != 1:
        raise UsageError(f"{args.command} takes a single --n")
    return ns[0]


def run(args) -> int:
    fmt = args.format
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be >= 1")

    if args.command == "sweep-gain":
        n = _single_n(args, None) if args.n else None
        if args.empirical and n is None:
            raise UsageError("--empirical needs --n")
        trials = (args.trials or DEFAULT_TRIALS) if args.empirical else None
        chis = chi_grid(args.chi, [i / 100 for i in range(101)])
        rows = sweep_gain(chis, scenarios(args.scenario, cf.FIGURE_SCENARIOS), n, trials, args.seed)
        cols = ["scenario", "chi", "gain"]
        if n is not None:
            cols += ["n", "finite_gain"]
            if trials:
                cols += ["empirical_gain", "empirical_stderr", "trials", "seed"]
        emit(render(rows, cols, fmt), args.out)
        return 0

    if args.command == "pareto":
        n = _single_n(args, 64)
        if n % 2 or n < 2:
            raise UsageError(f"--n must be a positive even integer, got {n}")
        rows = pareto_rows(n, chi_grid(args.chi, [0.1, 0.3, 0.5, 0.7, 1.0]))
        emit(render(rows, ["chi", "n", "complexity", "groups", "power"], fmt), args.out)
        return 0

    if args.command == "verify-scaling":
        ns = int_list(args.n, [8, 16, 32])
        rows = verify_scaling(ns, chi_grid(args.chi, [0.0, 0.5, 1.0]),
                              args.trials or DEFAULT_TRIALS, args.seed, args.tol,
                              scenarios(args.scenario, SCALING_SCENARIOS), args.law_scale)
        cols = ["scenario", "arch", "n", "chi", "mean", "stderr", "trials", "seed",
                "target", "verdict"]
        emit(render(rows, cols, fmt), args.out)
        return 0 if all(r["verdict"] == "pass" for r in rows) else 1

    if args.command == "synth":
        if fmt != "json":
            raise UsageError("synth writes JSON only")
        n = _single_n(args, 4)
        chis = chi_grid(args.chi, [0.5])
        if len(chis) != 1:
            raise UsageError("synth takes a single --chi")
        report = synth_report(n, chis[0], scenarios([args.scenario], [])[0], args.arch,
                              args.seed, args.zero_phases)
        emit(json.dumps(json_safe(report), indent=2) + "\n", args.out)
        return 0 if report["verdict"] == "pass" else 1

    if args.command == "oracle-check":
        rows = []
        for n_el in int_list(args.n, [4, 6, 8]):
            pairs = int_list(args.pairs, range(n_el // 2 + 1)) if args.pairs else range(n_el // 2 + 1)
            for k in pairs:
                for chi in chi_grid(args.chi, [0.0, 0.1, 0.5, 0.9, 1.0]):
                    rows.append(oracle_check(n_el, k, chi, args.seed))
        cols = ["n_elements", "n", "chi", "seed", "max_complexity", "candidates", "oracle_power",
                "formula_power", "rel_gap", "maximizers", "best_groups", "structure_ok", "verdict"]
        emit(render(rows, cols, fmt), args.out)
        return 0 if all(r["verdict"] == "pass" for r in rows) else 1

    raise UsageError(f"unknown command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"dpbdris: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dpbdris: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
