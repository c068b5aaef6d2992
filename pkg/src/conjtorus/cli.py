"""Command-line front door: verification suites, transference sweeps,
constant estimation, and martingale checks.

Subcommands: ``verify``, ``transfer``, ``estimate``, ``mds``.  Exit codes:
0 success, 1 check failure, 2 usage or config error.  Every report embeds
the resolved run configuration (minus the worker count, which by contract
never changes results) and the tool version, so reruns with the same
flags reproduce reports byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .indices import Index
from .orders import RevLex, separating_homomorphism, sgn_order, twist, verify_separation
from .polynomials import GridQuadrature, TrigPolynomial, lp_norm, random_poly, substream
from .spaces import NormedSpaceSpec
from .operators import composition_residual, hilbert_multiplier
from .martingales import (
    DyadicMDS,
    block_spectrum_check,
    distribution_check,
    martingale_property_check,
    random_mds,
    realize_on_torus,
)
from .estimator import (
    ConstantKind,
    SearchParams,
    estimate_constant,
    random_block_polys,
    theorem31_consistency,
)
from .reporting import atomic_write_text, canonical_json, parallel_map

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def parse_space(text: str) -> NormedSpaceSpec:
    """Parse the space grammar ``d=<int>,q=<rational|inf>``."""
    d, q = None, None
    try:
        for part in text.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "d":
                d = int(value)
            elif key == "q":
                if value == "inf":
                    q = math.inf
                elif "/" in value:
                    q = float(Fraction(value))
                else:
                    q = float(value)
            else:
                raise ValueError(f"unknown key {key!r}")
        if d is None or q is None:
            raise ValueError("both d and q are required")
        return NormedSpaceSpec(d, q)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad space spec {text!r}: {exc}") from exc


def parse_number_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def load_config(path: str) -> dict:
    """Flat key=value file; values parse as JSON where possible."""
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key = key.strip().replace("-", "_")
                value = value.strip()
                try:
                    out[key] = json.loads(value)
                except json.JSONDecodeError:
                    out[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def resolve(args, spec: dict) -> dict:
    """Merge flag > config-file > default, per option name."""
    config = load_config(args.config) if args.config else {}
    unknown = set(config) - set(spec) - {"jobs"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, default in spec.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in config:
            resolved[key] = config[key]
        else:
            resolved[key] = default
    return resolved


def emit(args, name: str, report: dict) -> str:
    out_dir = args.out or "."
    path = os.path.join(out_dir, name)
    atomic_write_text(path, canonical_json(report))
    return path


def _jobs(args) -> int:
    return max(1, args.jobs or 1)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check_identity_exhaustive() -> dict:
    """Twist-sign identity over the full small box, exact integers."""
    from itertools import product

    failures = 0
    total = 0
    patterns = list(product((-1, 1), repeat=4))
    box = [Index(j) for j in product(range(-3, 4), repeat=4)]
    for eps in patterns:
        order = twist(eps)
        for J in box:
            if not J:
                continue
            total += 1
            lhs = eps[len(J) - 1]
            if lhs != sgn_order(order, J) * sgn_order(RevLex(), J):
                failures += 1
    return {
        "name": "twist_identity_exhaustive",
        "tolerance": 0.0,
        "residual": float(failures),
        "checked": total,
        "passed": failures == 0,
    }


def _check_composition(seed: int, samples: int, tol: float, jobs: int) -> dict:
    rng = substream(seed, "verify", "composition")
    qs = [1.0, 2.0, math.inf]
    cases = []
    for i in range(samples):
        space = NormedSpaceSpec(int(rng.integers(1, 4)), qs[int(rng.integers(0, 3))])
        blocks = int(rng.integers(1, 5))
        eps = tuple(1 if x >= 0 else -1 for x in rng.standard_normal(blocks))
        blocks_polys = random_block_polys(blocks, space, 3, 2, rng)
        cases.append((eps, blocks_polys))

    def residual(case):
        eps, blocks_polys = case
        f = blocks_polys[0]
        for b in blocks_polys[1:]:
            f = f + b
        return composition_residual(eps, f)

    pairs = parallel_map(residual, cases, jobs)
    worst = max(min(p) for p in pairs)
    sides = {(p[0] <= p[1]) for p in pairs if p[0] != p[1]}
    return {
        "name": "composition_residual_sweep",
        "tolerance": tol,
        "residual": worst,
        "samples": samples,
        "single_side": len(sides) <= 1,
        "vanishing_side": "minus" if sides == {False} else ("plus" if sides == {True} else "mixed"),
        "passed": worst <= tol and len(sides) <= 1,
    }


def _check_separation(seed: int, samples: int) -> dict:
    rng = substream(seed, "verify", "separation")
    failures = 0
    for _ in range(samples):
        size = int(rng.integers(1, 21))
        support = int(rng.integers(1, 6))
        idx = set()
        while len(idx) < size:
            entries = rng.integers(-8, 9, size=support)
            idx.add(Index(entries))
        if rng.integers(0, 2):
            order = twist(tuple(1 if x >= 0 else -1 for x in rng.standard_normal(support)))
        else:
            order = RevLex()
        w = separating_homomorphism(idx, order)
        if not verify_separation(idx, w, order):
            failures += 1
    return {
        "name": "separating_homomorphism_sweep",
        "tolerance": 0.0,
        "residual": float(failures),
        "samples": samples,
        "passed": failures == 0,
    }


def _check_parseval(seed: int, samples: int, tol: float) -> dict:
    rng = substream(seed, "verify", "parseval")
    worst = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, 3))
        f = random_poly(m, NormedSpaceSpec(1, 2.0), 3, 5, rng=rng)
        if not f:
            continue
        grid = GridQuadrature(2 * f.max_degree() + 2)
        lhs = lp_norm(f, 2.0, grid)
        rhs = math.sqrt(sum(float(np.abs(v) ** 2) for v in f.coeffs.values()))
        worst = max(worst, abs(lhs - rhs))
    return {
        "name": "parseval_grid",
        "tolerance": tol,
        "residual": worst,
        "samples": samples,
        "passed": worst <= tol,
    }


def cmd_verify(args) -> int:
    spec = {
        "seed": 0,
        "tol": None,
        "composition_samples": 200,
        "separation_samples": 100,
        "parseval_samples": 50,
    }
    cfg = resolve(args, spec)
    tol = cfg["tol"]
    comp_tol = 1e-12 if tol is None else float(tol)
    pars_tol = 1e-10 if tol is None else float(tol)
    checks = [
        _check_identity_exhaustive(),
        _check_composition(cfg["seed"], int(cfg["composition_samples"]), comp_tol, _jobs(args)),
        _check_separation(cfg["seed"], int(cfg["separation_samples"])),
        _check_parseval(cfg["seed"], int(cfg["parseval_samples"]), pars_tol),
    ]
    passed = all(c["passed"] for c in checks)
    report = {
        "version": __version__,
        "command": "verify",
        "config": cfg,
        "checks": checks,
        "passed": passed,
    }
    path = emit(args, "verify_report.json", report)
    for c in checks:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: residual={c['residual']:.3e} tol={c['tolerance']:.1e}")
    print(f"report: {path}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# transfer
# ---------------------------------------------------------------------------


def cmd_transfer(args) -> int:
    spec = {
        "seed": 0,
        "tol": 1e-6,
        "lam": [1.0, 0.0, -1.0],
        "levels": [10.0, 100.0, 1000.0],
        "quad_points": 16,
    }
    cfg = resolve(args, spec)
    lams = parse_number_list(cfg["lam"])
    levels = parse_number_list(cfg["levels"])
    tol = float(cfg["tol"])
    rows = []
    failed = 0
    for lam in lams:
        for n in levels:
            m = hilbert_multiplier(lam, n, int(cfg["quad_points"]))
            if lam == 0.0:
                rows.append(
                    {"lam": lam, "n": n, "multiplier": [m.real, m.imag],
                     "flag": "no-limit", "asserted": False}
                )
                continue
            deviation = abs(m + 1j * math.copysign(1.0, lam))
            bound = 2.0 / (abs(lam) * n)
            asserted = abs(lam) * n >= 10.0
            ok = (deviation <= bound + tol) if asserted else True
            failed += 0 if ok else 1
            rows.append(
                {"lam": lam, "n": n, "multiplier": [m.real, m.imag],
                 "deviation": deviation, "bound": bound,
                 "asserted": asserted, "passed": ok}
            )
    report = {
        "version": __version__,
        "command": "transfer",
        "config": {**cfg, "lam": lams, "levels": levels},
        "rows": rows,
        "failed": failed,
        "passed": failed == 0,
    }
    path = emit(args, "transfer_report.json", report)
    for r in rows:
        if r.get("flag"):
            print(f"lam={r['lam']:+.3g} n={r['n']:<6g} multiplier=0 ({r['flag']})")
        else:
            mark = "PASS" if r["passed"] else ("FAIL" if r["asserted"] else "info")
            print(
                f"lam={r['lam']:+.3g} n={r['n']:<6g} deviation={r['deviation']:.3e} "
                f"bound={r['bound']:.3e} [{mark}]"
            )
    print(f"report: {path}")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

_KIND_ALIASES = {
    "conj": ConstantKind.CONJUGATE,
    "conjugate": ConstantKind.CONJUGATE,
    "umd": ConstantKind.TRANSFORM,
    "transform": ConstantKind.TRANSFORM,
    "ht": ConstantKind.HILBERT,
    "hilbert": ConstantKind.HILBERT,
}


def cmd_estimate(args) -> int:
    spec = {
        "seed": 0,
        "tol": 1e-6,
        "constant": "conj",
        "p": 2.0,
        "space": "d=1,q=2",
        "budget": 1000,
        "torus_dim": None,
        "degree": None,
        "truncation": None,
        "check_thm31": False,
        "thm31_instances": 100,
        "thm31_eps": 2,
    }
    cfg = resolve(args, spec)
    kind = _KIND_ALIASES.get(str(cfg["constant"]).lower())
    if kind is None:
        raise ConfigError(f"unknown constant kind {cfg['constant']!r}")
    space = parse_space(str(cfg["space"]))
    p = float(cfg["p"])
    if not p > 1.0:
        raise ConfigError("p must lie in (1, inf)")
    from dataclasses import replace as dc_replace

    search = SearchParams()
    if cfg["torus_dim"] is not None:
        search = dc_replace(search, torus_dim=int(cfg["torus_dim"]))
    if cfg["degree"] is not None:
        search = dc_replace(search, max_degree=int(cfg["degree"]))
    if cfg["truncation"] is not None:
        search = dc_replace(search, truncation=float(cfg["truncation"]))
    report_obj = estimate_constant(kind, space, p, int(cfg["budget"]), int(cfg["seed"]), search)
    report = {
        "version": __version__,
        "command": "estimate",
        "config": {**cfg, "constant": kind.value},
        **report_obj.to_json(),
    }
    violations = 0
    if cfg["check_thm31"]:
        thm = theorem31_consistency(
            space, p, int(cfg["thm31_eps"]), int(cfg["thm31_instances"]),
            int(cfg["seed"]), tol=float(cfg["tol"]),
        )
        report["thm31"] = thm
        violations = len(thm["violations"])
    path = emit(args, "estimate_report.json", report)
    csv_buf = io.StringIO()
    writer = csv.DictWriter(csv_buf, fieldnames=["kind", "p", "d", "q", "lower_bound", "budget", "seed"])
    writer.writeheader()
    writer.writerow(report_obj.summary_row())
    csv_path = os.path.join(args.out or ".", "estimate_summary.csv")
    atomic_write_text(csv_path, csv_buf.getvalue())
    print(f"{kind.value} p={p} space=d={space.dim},q={space.q}: lower bound {report_obj.lower_bound:.6f}")
    if cfg["check_thm31"]:
        print(f"composition-inequality sweep: {violations} violations")
    print(f"report: {path}\nsummary: {csv_path}")
    return EXIT_OK if violations == 0 else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# mds
# ---------------------------------------------------------------------------


def cmd_mds(args) -> int:
    spec = {
        "seed": 0,
        "length": 6,
        "space": "d=1,q=2",
        "truncation": 3,
        "mds_file": None,
        "save": None,
    }
    cfg = resolve(args, spec)
    generator = None
    if cfg["mds_file"]:
        try:
            with open(str(cfg["mds_file"])) as fh:
                payload = json.load(fh)
            mds = DyadicMDS.from_json(payload)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"cannot load martingale file: {exc}") from exc
        generator = payload.get("generator")
    else:
        space = parse_space(str(cfg["space"]))
        mds = random_mds(int(cfg["length"]), space, int(cfg["seed"]))
        generator = {
            "length": int(cfg["length"]),
            "seed": int(cfg["seed"]),
            "space": space.to_json(),
        }
    torus = realize_on_torus(mds, int(cfg["truncation"]))
    checks = {
        "distribution": distribution_check(mds, torus),
        "block_spectrum": block_spectrum_check(torus),
        "martingale_property": martingale_property_check(torus, int(cfg["seed"])),
    }
    if cfg["mds_file"] and generator:
        try:
            ref = random_mds(int(generator["length"]), NormedSpaceSpec.from_json(generator["space"]),
                             int(generator["seed"]))
            checks["matches_generator"] = distribution_check(ref, torus)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed generator provenance: {exc}") from exc
    if cfg["save"]:
        payload = mds.to_json()
        if generator:
            payload["generator"] = generator
        atomic_write_text(str(cfg["save"]), canonical_json(payload))
    passed = all(checks.values())
    report = {
        "version": __version__,
        "command": "mds",
        "config": cfg,
        "length": mds.length,
        "checks": checks,
        "passed": passed,
    }
    path = emit(args, "mds_report.json", report)
    for name, ok in checks.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"report: {path}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conjtorus",
        description="Order-induced conjugation operators on tori: verification, "
        "transference sweeps, constant estimation, martingale checks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory (default .)")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--config", default=None, help="flat key=value config file")
        sp.add_argument("--jobs", type=int, default=None,
                        help="worker threads; never changes results")

    sp = sub.add_parser("verify", help="run the exact-identity and quadrature suites")
    common(sp)
    sp.add_argument("--composition-samples", dest="composition_samples", type=int, default=None)
    sp.add_argument("--separation-samples", dest="separation_samples", type=int, default=None)
    sp.add_argument("--parseval-samples", dest="parseval_samples", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("transfer", help="truncated-multiplier convergence sweep")
    common(sp)
    sp.add_argument("--lam", default=None, help="comma list of frequencies")
    sp.add_argument("--levels", default=None, help="comma list of truncation levels")
    sp.add_argument("--quad-points", dest="quad_points", type=int, default=None)
    sp.set_defaults(func=cmd_transfer)

    sp = sub.add_parser("estimate", help="estimate a norm-constant lower bound")
    common(sp)
    sp.add_argument("--constant", default=None, help="conj | umd | ht")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--space", default=None, help="d=<int>,q=<rational|inf>")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--torus-dim", dest="torus_dim", type=int, default=None)
    sp.add_argument("--degree", type=int, default=None)
    sp.add_argument("--truncation", type=float, default=None)
    sp.add_argument("--check-thm31", dest="check_thm31", action="store_true", default=None)
    sp.add_argument("--thm31-instances", dest="thm31_instances", type=int, default=None)
    sp.add_argument("--thm31-eps", dest="thm31_eps", type=int, default=None)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("mds", help="martingale difference realization checks")
    common(sp)
    sp.add_argument("--length", type=int, default=None)
    sp.add_argument("--space", default=None)
    sp.add_argument("--truncation", type=int, default=None)
    sp.add_argument("--mds-file", dest="mds_file", default=None)
    sp.add_argument("--save", default=None, help="write the sequence (with provenance) here")
    sp.set_defaults(func=cmd_mds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
