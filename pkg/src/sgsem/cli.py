"""Command-line front end: ``sgsem {eigs,seeds,solve,converge,scan,export}``.

Every command that writes files produces one run directory::

    OUT/manifest.json   command, resolved config, rng seed, file list, counts
    OUT/seeds/          one JSON record per signed seed
    OUT/solutions/      solution JSON plus nodal-grid CSV
    OUT/tables/         CSV and plain-text tables

Exit status is 0 when every solve converged, 2 when some failed and 1 on
configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analysis import (
    classify,
    convergence_study,
    export_field,
    format_convergence_table,
    write_convergence_csv,
)
from .discretization import DiscreteSolution, tensor_operators
from .eigen import (
    DomainError,
    EigenPair,
    Normalization,
    RectDomain,
    eigen_group,
    eigenvalue,
    group_by_multiplicity,
    laplace_eigenpairs,
)
from .newton import NewtonConfig, NewtonError, continuation_solve, newton_solve
from .nonlinearity import NonlinearityError, make_nonlinearity
from .seeds import (
    DEFAULT_RNG_SEED,
    SeedGuess,
    enumerate_cubic_seeds,
    make_label,
    random_newton_search,
    seed_to_nodal,
    subproblem_residual,
)

log = logging.getLogger("sgsem")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2

RNG_ENV = "SGSEM_RNG_SEED"
ZERO_TOL = 1e-8
SOLUTION_DEDUP_TOL = 1e-6


class ConfigError(ValueError):
    pass


def _reject_unknown(d: dict, allowed, where: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


@dataclass
class RandomSearchSpec:
    J: int = 10
    trials: int = 2000
    box: float = 10.0


@dataclass
class SeedSpec:
    """Where seeds come from.

    ``eigenvalues``: closed-form cubic seeds for each listed eigenvalue.
    ``coefficients``: explicit records ``{"basis": [[m, n], ...], "coefficients": [...]}``.
    ``random``: random Newton search on the first J eigenpairs.
    With nothing set, cubic problems use eigenvalue 2 and others use random search.
    """

    eigenvalues: list | None = None
    coefficients: list | None = None
    random: RandomSearchSpec | None = None


@dataclass
class ConvergeSpec:
    N_list: list = field(default_factory=lambda: [8, 16, 24, 32])
    reference_N: int = 100
    seed_label: str | None = None


@dataclass
class RunConfig:
    """Validated run configuration. See ``CONFIG_SCHEMA`` for the JSON layout."""

    domain: RectDomain = field(default_factory=RectDomain)
    nonlinearity: dict = field(default_factory=lambda: {"name": "cubic", "parameter": None})
    N: int = 32
    seeds: SeedSpec = field(default_factory=SeedSpec)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    converge: ConvergeSpec = field(default_factory=ConvergeSpec)
    kappas: list = field(default_factory=lambda: [1, 4, 6, 9, 11])
    resolution: int = 64
    mass: str = "lgl"
    rng_seed: int = DEFAULT_RNG_SEED
    workers: int = 1
    out: str = "sgsem-run"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        _reject_unknown(d, {f.name for f in fields(cls)}, "config")
        kw = {}
        try:
            if "domain" in d:
                _reject_unknown(d["domain"], ("x_lo", "x_hi", "y_lo", "y_hi"), "domain")
                kw["domain"] = RectDomain(**{k: float(v) for k, v in d["domain"].items()})
            if "nonlinearity" in d:
                nl = d["nonlinearity"]
                _reject_unknown(nl, ("name", "parameter"), "nonlinearity")
                if "name" not in nl:
                    raise ConfigError("nonlinearity: 'name' is required")
                kw["nonlinearity"] = {"name": str(nl["name"]), "parameter": nl.get("parameter")}
                make_nonlinearity(nl["name"], nl.get("parameter"))
            if "seeds" in d:
                s = d["seeds"]
                _reject_unknown(s, ("eigenvalues", "coefficients", "random"), "seeds")
                rnd = None
                if s.get("random") is not None:
                    _reject_unknown(s["random"], ("J", "trials", "box"), "seeds.random")
                    rnd = RandomSearchSpec(**s["random"])
                kw["seeds"] = SeedSpec(s.get("eigenvalues"), s.get("coefficients"), rnd)
            if "newton" in d:
                nw = dict(d["newton"])
                _reject_unknown(nw, {f.name for f in fields(NewtonConfig)}, "newton")
                if nw.get("continuation") is not None:
                    nw["continuation"] = tuple(float(v) for v in nw["continuation"])
                kw["newton"] = NewtonConfig(**nw)
            if "converge" in d:
                _reject_unknown(d["converge"], {f.name for f in fields(ConvergeSpec)}, "converge")
                kw["converge"] = ConvergeSpec(**d["converge"])
            for key in ("N", "resolution", "rng_seed", "workers"):
                if key in d:
                    kw[key] = int(d[key])
            for key in ("kappas",):
                if key in d:
                    kw[key] = [float(v) for v in d[key]]
            for key in ("mass", "out"):
                if key in d:
                    kw[key] = str(d[key])
        except (TypeError, ValueError, DomainError, NonlinearityError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.N < 2:
            raise ConfigError("N must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.resolution < 2:
            raise ConfigError("resolution must be >= 2")
        if self.mass not in ("lgl", "exact"):
            raise ConfigError("mass must be 'lgl' or 'exact'")
        if self.seeds.random is not None:
            r = self.seeds.random
            if r.J < 1 or r.trials < 1 or not r.box > 0:
                raise ConfigError("seeds.random needs J >= 1, trials >= 1, box > 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["domain"] = self.domain.to_dict()
        nw = d["newton"]
        if nw["continuation"] is not None:
            nw["continuation"] = list(nw["continuation"])
        return d

    def problem(self):
        nl = self.nonlinearity
        return make_nonlinearity(nl["name"], nl.get("parameter"))


CONFIG_SCHEMA = {
    "domain": "object {x_lo, x_hi, y_lo, y_hi}; default (0, pi)^2",
    "nonlinearity": "object {name: cubic | sine-gordon | zero, parameter: number or null}",
    "N": "integer polynomial order, default 32",
    "seeds": "object {eigenvalues: [number], coefficients: [{basis, coefficients, normalization?}], "
             "random: {J, trials, box}}",
    "newton": "object {tol, max_iters, max_halvings, continuation: [number] or null, "
              "linear_rtol, min_iters}",
    "converge": "object {N_list: [int], reference_N: int, seed_label: string or null}",
    "kappas": "list of sine-Gordon parameters for scan",
    "resolution": "uniform grid size for export, default 64",
    "mass": "lgl (default) or exact",
    "rng_seed": f"integer, default {DEFAULT_RNG_SEED}; overridden by ${RNG_ENV} and --seed",
    "workers": "integer thread count for per-seed work, default 1",
    "out": "run directory, default sgsem-run",
}


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(raw)


def resolve_config(args) -> RunConfig:
    """Merge the config file with the environment and command-line flags."""
    cfg = load_config(args.config)
    env = os.environ.get(RNG_ENV)
    if env is not None:
        try:
            cfg.rng_seed = int(env)
        except ValueError as exc:
            raise ConfigError(f"{RNG_ENV} must be an integer, got {env!r}") from exc
    if args.seed is not None:
        cfg.rng_seed = args.seed
    if args.N is not None:
        cfg.N = args.N
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out is not None:
        cfg.out = args.out
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- run output


def safe_name(label: str) -> str:
    name = label.replace("-u_", "neg_u_").replace(",", "_")
    return re.sub(r"[^A-Za-z0-9_+\-.]", "", name)


class Run:
    """Run directory plus the manifest being accumulated."""

    def __init__(self, cfg: RunConfig, command: str):
        self.root = Path(cfg.out)
        self.cfg = cfg
        self.manifest = {
            "command": command,
            "config": cfg.to_dict(),
            "rng_seed": cfg.rng_seed,
            "files": [],
            "counts": {},
        }
        try:
            for sub in ("seeds", "solutions", "tables"):
                (self.root / sub).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create run directory {self.root}: {exc}") from exc

    def record(self, path: Path) -> None:
        self.manifest["files"].append(str(Path(path).relative_to(self.root)))

    def write_json(self, rel: str, data) -> Path:
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
        self.record(path)
        return path

    def close(self) -> Path:
        self.manifest["files"].sort()
        # the only field allowed to differ between identical runs
        self.manifest["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        path = self.root / "manifest.json"
        path.write_text(json.dumps(self.manifest, indent=1, sort_keys=True) + "\n")
        return path


# ---------------------------------------------------------------- seeds


def _explicit_seed(rec: dict, domain: RectDomain, f) -> SeedGuess:
    _reject_unknown(rec, ("basis", "coefficients", "normalization", "label"), "seeds.coefficients[]")
    norm = Normalization(rec.get("normalization", Normalization.UNIT_AMPLITUDE.value))
    basis = tuple(EigenPair(int(m), int(n), eigenvalue(int(m), int(n), domain), domain, norm)
                  for m, n in rec["basis"])
    a = np.asarray(rec["coefficients"], dtype=float)
    if a.shape != (len(basis),):
        raise ConfigError("seed coefficients must match the basis length")
    return SeedGuess(basis=basis, coefficients=a, normalization=norm,
                     label=rec.get("label") or make_label(basis, a),
                     residual_norm=float(np.linalg.norm(subproblem_residual(a, basis, f))))


def signed(seeds) -> list[SeedGuess]:
    """Each canonical seed followed by its negation."""
    out = []
    for s in seeds:
        out += [s, s.negated()]
    return out


def build_seeds(cfg: RunConfig, f=None) -> tuple[list[SeedGuess], int]:
    """Signed seed list and the number of canonical (up to sign) seeds."""
    f = f or cfg.problem()
    spec = cfg.seeds
    if spec.coefficients:
        seeds = [_explicit_seed(rec, cfg.domain, f) for rec in spec.coefficients]
        return seeds, len(seeds)
    eigenvalues = spec.eigenvalues
    if eigenvalues is None and spec.random is None and f.name == "cubic":
        eigenvalues = [2]
    if eigenvalues:
        seeds = []
        for lam in eigenvalues:
            try:
                group = eigen_group(float(lam), cfg.domain)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            seeds += enumerate_cubic_seeds(group, f, cfg.domain)
        return seeds, len(seeds) // 2
    rnd = spec.random or RandomSearchSpec()
    basis = laplace_eigenpairs(cfg.domain, rnd.J)
    found = random_newton_search(basis, f, trials=rnd.trials, box=rnd.box,
                                 rng_seed=cfg.rng_seed, workers=cfg.workers)
    return signed(found), len(found)


def write_seeds(run: Run, seeds) -> None:
    for i, s in enumerate(seeds):
        run.write_json(f"seeds/{i:03d}_{safe_name(s.label)}.json", s.to_dict())


def read_seeds(directory) -> list[SeedGuess]:
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise ConfigError(f"no seed files in {directory}")
    try:
        return [SeedGuess.from_dict(json.loads(p.read_text())) for p in paths]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"bad seed file in {directory}: {exc}") from exc


# ---------------------------------------------------------------- solving


@dataclass
class SolveOutcome:
    seed: SeedGuess
    solution: DiscreteSolution | None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.solution is not None


def solve_seed(seed: SeedGuess, cfg: RunConfig, f, ops) -> SolveOutcome:
    U0 = seed_to_nodal(seed, cfg.N, cfg.domain)
    try:
        if cfg.newton.continuation and f.parameter is not None:
            sol = continuation_solve(U0, ops, f, cfg.newton, seed_label=seed.label)[-1]
        else:
            sol = newton_solve(U0, ops, f, cfg.newton, seed_label=seed.label)
    except NewtonError as exc:
        return SolveOutcome(seed, None, str(exc))
    return SolveOutcome(seed, sol)


def solve_all(seeds, cfg: RunConfig, f) -> list[SolveOutcome]:
    ops = tensor_operators(cfg.N, cfg.domain, cfg.mass)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            return list(ex.map(lambda s: solve_seed(s, cfg, f, ops), seeds))
    return [solve_seed(s, cfg, f, ops) for s in seeds]


def write_outcomes(run: Run, outcomes, prefix: str = "solutions") -> list[dict]:
    rows = []
    for i, o in enumerate(outcomes):
        row = {"index": i, "seed_label": o.seed.label, "status": "converged" if o.ok else "failed"}
        if o.ok:
            c = classify(o.solution)
            path = o.solution.save(run.root / prefix / f"{i:03d}_{safe_name(o.seed.label)}.json")
            run.record(path)
            run.record(path.with_suffix(".csv"))
            row.update(residual_norm=o.solution.residual_norm, newton_iters=o.solution.newton_iters,
                       sign=c.sign.value, num_peaks=c.num_peaks, max_abs=c.max_abs)
        else:
            row.update(residual_norm=math.nan, newton_iters="", sign="", num_peaks="",
                       max_abs=math.nan, error=o.error)
        rows.append(row)
    return rows


SUMMARY_COLUMNS = ["index", "seed_label", "status", "residual_norm", "newton_iters",
                   "sign", "num_peaks", "max_abs"]


def write_csv(run: Run, rel: str, rows, columns) -> Path:
    path = run.root / rel
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    run.record(path)
    return path


def distinct_solutions(solutions, tol: float = SOLUTION_DEDUP_TOL) -> list[DiscreteSolution]:
    """Nonzero solutions up to sign, each oriented so its largest |U| entry is positive."""
    reps: list[DiscreteSolution] = []
    for s in solutions:
        U = s.U
        peak = np.max(np.abs(U))
        if peak < ZERO_TOL:
            continue
        if U.flat[np.argmax(np.abs(U))] < 0:
            U = -U
        if all(np.max(np.abs(U - r.U)) >= tol for r in reps):
            reps.append(DiscreteSolution(U, s.N, s.domain, s.nonlinearity, s.seed_label,
                                         s.residual_norm, s.newton_iters, s.history))
    return reps


# ---------------------------------------------------------------- commands


def cmd_eigs(args) -> int:
    domain = RectDomain(*args.domain) if args.domain else load_config(args.config).domain
    pairs = laplace_eigenpairs(domain, args.count)
    groups = group_by_multiplicity(pairs)
    lines = [f"{'k':>3} {'m':>3} {'n':>3} {'lambda':>12}"]
    lines += [f"{k + 1:>3} {p.m:>3} {p.n:>3} {p.lam:>12.6g}" for k, p in enumerate(pairs)]
    lines.append("")
    lines += [f"lambda={g.lam:g} multiplicity={g.multiplicity} members="
              + " ".join(f"({m},{n})" for m, n in g.members) for g in groups]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        cfg = RunConfig(domain=domain, out=args.out)
        run = Run(cfg, "eigs")
        rows = [{"k": k + 1, "m": p.m, "n": p.n, "lambda": p.lam} for k, p in enumerate(pairs)]
        write_csv(run, "tables/eigenpairs.csv", rows, ["k", "m", "n", "lambda"])
        (run.root / "tables/eigenpairs.txt").write_text(text)
        run.record(run.root / "tables/eigenpairs.txt")
        run.manifest["counts"] = {"eigenpairs": len(pairs), "groups": len(groups)}
        run.close()
    return EXIT_OK


def cmd_seeds(args) -> int:
    cfg = resolve_config(args)
    seeds, canonical = build_seeds(cfg)
    run = Run(cfg, "seeds")
    write_seeds(run, seeds)
    run.manifest["counts"] = {"canonical": canonical, "signed": len(seeds)}
    run.close()
    print(f"{len(seeds)} seeds ({canonical} up to sign) written to {run.root / 'seeds'}")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = resolve_config(args)
    f = cfg.problem()
    if args.seeds:
        seeds = read_seeds(args.seeds)
    else:
        seeds, _ = build_seeds(cfg, f)
    run = Run(cfg, "solve")
    write_seeds(run, seeds)
    outcomes = solve_all(seeds, cfg, f)
    rows = write_outcomes(run, outcomes)
    write_csv(run, "tables/summary.csv", rows, SUMMARY_COLUMNS + ["error"])
    failed = sum(not o.ok for o in outcomes)
    signs = [r["sign"] for r in rows if r["status"] == "converged"]
    run.manifest["counts"] = {
        "seeds": len(seeds), "converged": len(seeds) - failed, "failed": failed,
        "positive": signs.count("positive"), "negative": signs.count("negative"),
    }
    run.close()
    for r in rows:
        status = r["status"] if r["status"] == "failed" else f"residual {r['residual_norm']:.2e} {r['sign']}"
        print(f"{r['seed_label']:>32}  {status}")
    print(f"{len(seeds) - failed}/{len(seeds)} converged")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_converge(args) -> int:
    cfg = resolve_config(args)
    if args.N_list:
        cfg.converge.N_list = list(args.N_list)
    if args.reference_N:
        cfg.converge.reference_N = args.reference_N
    if not cfg.converge.N_list:
        raise ConfigError("N_list is empty")
    f = cfg.problem()
    seeds, _ = build_seeds(cfg, f)
    want = cfg.converge.seed_label
    pick = [s for s in seeds if want is None or s.label == want]
    if not pick:
        raise ConfigError(f"no seed labelled {want!r}; have {[s.label for s in seeds]}")
    seed = pick[0]
    try:
        records = convergence_study(seed, cfg.converge.N_list, cfg.converge.reference_N, f,
                                    cfg.domain, cfg.newton, mass=cfg.mass)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    run = Run(cfg, "converge")
    write_seeds(run, [seed])
    run.record(write_convergence_csv(records, run.root / "tables/convergence.csv"))
    table = format_convergence_table(records)
    (run.root / "tables/convergence.txt").write_text(f"{seed.label}\n{table}")
    run.record(run.root / "tables/convergence.txt")
    failed = sum(not r.converged for r in records)
    run.manifest["counts"] = {"orders": len(records), "failed": failed}
    run.close()
    sys.stdout.write(f"{seed.label} (reference N={cfg.converge.reference_N})\n{table}")
    return EXIT_PARTIAL if failed else EXIT_OK


CATALOG_COLUMNS = ["kappa", "canonical", "signed", "positive", "negative", "sign_changing",
                   "failed", "peaks"]


def scan_kappa(kappa: float, cfg: RunConfig):
    f = make_nonlinearity("sine-gordon", kappa)
    rnd = cfg.seeds.random or RandomSearchSpec()
    basis = laplace_eigenpairs(cfg.domain, rnd.J)
    found = random_newton_search(basis, f, trials=rnd.trials, box=rnd.box,
                                 rng_seed=cfg.rng_seed, workers=cfg.workers)
    seeds = signed(found)
    outcomes = solve_all(seeds, cfg, f) if seeds else []
    reps = distinct_solutions([o.solution for o in outcomes if o.ok])
    classes = [classify(r) for r in reps]
    row = {
        "kappa": kappa,
        "canonical": len(reps),
        "signed": 2 * len(reps),
        # reps are oriented positive-peak, so negative solutions show up as the partner of a positive one
        "positive": sum(c.sign.value == "positive" for c in classes),
        "negative": sum(c.sign.value == "positive" for c in classes),
        "sign_changing": sum(c.sign.value == "sign-changing" for c in classes),
        "failed": sum(not o.ok for o in outcomes),
        "peaks": " ".join(str(c.num_peaks) for c in classes),
    }
    return row, seeds, outcomes


def cmd_scan(args) -> int:
    cfg = resolve_config(args)
    if args.kappa:
        cfg.kappas = list(args.kappa)
    cfg.nonlinearity = {"name": "sine-gordon", "parameter": None}
    run = Run(cfg, "scan")
    rows = []
    for kappa in cfg.kappas:
        row, seeds, outcomes = scan_kappa(kappa, cfg)
        tag = f"kappa_{kappa:g}"
        for i, s in enumerate(seeds):
            run.write_json(f"seeds/{tag}/{i:03d}_{safe_name(s.label)}.json", s.to_dict())
        write_outcomes(run, outcomes, prefix=f"solutions/{tag}")
        rows.append(row)
        print(f"kappa={kappa:g}: {row['canonical']} solutions up to sign ({row['signed']} signed), "
              f"{row['positive']} positive, {row['failed']} failed solves")
    write_csv(run, "tables/catalog.csv", rows, CATALOG_COLUMNS)
    run.manifest["counts"] = {f"kappa_{r['kappa']:g}": r["signed"] for r in rows}
    run.close()
    return EXIT_PARTIAL if any(r["failed"] for r in rows) else EXIT_OK


def cmd_export(args) -> int:
    cfg = resolve_config(args)
    if args.resolution:
        cfg.resolution = args.resolution
    try:
        sol = DiscreteSolution.load(args.solution)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read solution {args.solution}: {exc}") from exc
    run = Run(cfg, "export")
    path = run.root / "solutions" / (Path(args.solution).stem + ".field.csv")
    export_field(sol, cfg.resolution, path)
    run.record(path)
    run.manifest["counts"] = {"points": cfg.resolution**2}
    run.close()
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", help="run directory")
    common.add_argument("--workers", type=int, metavar="INT", help="worker threads")
    common.add_argument("--seed", type=int, metavar="INT", help="random-search seed")
    common.add_argument("-N", type=int, metavar="INT", help="polynomial order (default 32)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sgsem", description="Multiple solutions of -Lap u = f(u) "
                                "on rectangles by eigenfunction seeds and spectral Newton.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eigs", parents=[common], help="Dirichlet Laplacian eigenpairs")
    e.add_argument("--count", type=int, default=10)
    e.add_argument("--domain", type=float, nargs=4, metavar=("X_LO", "X_HI", "Y_LO", "Y_HI"))
    e.set_defaults(func=cmd_eigs)

    s = sub.add_parser("seeds", parents=[common], help="construct initial guesses")
    s.set_defaults(func=cmd_seeds)

    v = sub.add_parser("solve", parents=[common], help="Newton solve from every seed")
    v.add_argument("--seeds", metavar="DIR", help="read seed JSON files instead of building them")
    v.set_defaults(func=cmd_solve)

    c = sub.add_parser("converge", parents=[common], help="error table against a high-order reference")
    c.add_argument("--N-list", type=int, nargs="+", dest="N_list")
    c.add_argument("--reference-N", type=int, dest="reference_N")
    c.set_defaults(func=cmd_converge)

    k = sub.add_parser("scan", parents=[common], help="sine-Gordon solution catalog over kappa")
    k.add_argument("--kappa", type=float, nargs="+")
    k.set_defaults(func=cmd_scan)

    x = sub.add_parser("export", parents=[common], help="sample a solution on a uniform grid")
    x.add_argument("solution", help="solution JSON written by solve or scan")
    x.add_argument("--resolution", type=int)
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, NonlinearityError, OSError) as exc:
        print(f"sgsem: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
