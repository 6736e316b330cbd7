"""Experiment drivers behind the command line: verification suites, the
defect scan and one-shot computations."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from . import fileio, instances, verifier
from .angles import dixmier_cosine, inequality_defect
from .cstar import BlockAlgebra
from .errors import ConfigError, ParseError, SpaceMismatch, ZeroProduct
from .hmod import ModuleSpace, Submodule
from .modop import ModuleOperator, gamma, mp_inverse, range_

log = logging.getLogger(__name__)

DEFAULT_FAMILIES = ((1,), (2,), (1, 1), (1, 2), (2, 3))
RANK_CHOICES = (1, 2, 3)
ORACLE_MAX_DIM = 12
NEAR_EQUALITY = 1e-6
REPORT_VERSION = 1


@dataclass
class RunConfig:
    master_seed: int = 0
    algebra_dims: list = field(default_factory=lambda: [list(f) for f in DEFAULT_FAMILIES])
    module_ranks: tuple | None = None
    trials: int = 100
    tolerances: dict = field(default_factory=dict)
    suite: str = "all"
    out: str | None = None
    format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master seed must be a 64-bit unsigned integer")
        fams = self.algebra_dims
        if fams and all(isinstance(n, (int, np.integer)) for n in fams):
            fams = [fams]
        if not fams:
            raise ConfigError("at least one algebra is required")
        try:
            self.algebra_dims = [list(BlockAlgebra(tuple(f)).block_dims) for f in fams]
        except Exception as exc:
            raise ConfigError(f"bad algebra {fams!r}: {exc}") from None
        if self.module_ranks is not None:
            k, m = self.module_ranks
            if k is not None and k < 1 or m is not None and m < 1:
                raise ConfigError("module ranks must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        unknown = set(self.tolerances) - set(verifier.DEFAULT_TOLERANCES) - {"rank"}
        if unknown:
            raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")

    @property
    def rank_tol(self) -> float | None:
        return self.tolerances.get("rank")


def _ranks(config: RunConfig, rng: np.random.Generator) -> tuple[int, int, int]:
    """(e, k, m): ranks of E, F, G for S: E -> F and T: F -> G."""
    k = m = None
    if config.module_ranks is not None:
        k, m = config.module_ranks
    e = int(rng.choice(RANK_CHOICES))
    k = int(rng.choice(RANK_CHOICES)) if k is None else int(k)
    m = int(rng.choice(RANK_CHOICES)) if m is None else int(m)
    return e, k, m


def _projection_pair(space: ModuleSpace, rng: np.random.Generator):
    kind = rng.uniform()
    if kind < 0.2:
        return instances.commuting_projection_pair(space, rng)
    if kind < 0.4:
        return instances.nested_projection_pair(space, rng)
    return instances.random_projection(space, rng), instances.random_projection(space, rng)


def _trial_operators(alg, config, rng, nonzero=False):
    e, k, m = _ranks(config, rng)
    E, F, G = ModuleSpace(alg, e), ModuleSpace(alg, k), ModuleSpace(alg, m)
    gen = instances.random_nonzero_operator if nonzero else instances.random_operator
    s = gen(E, F, rng)
    t = gen(F, G, rng)
    return t, s


def _suite_penrose(alg, config, rng):
    _, k, m = _ranks(config, rng)
    t = instances.random_nonzero_operator(ModuleSpace(alg, k), ModuleSpace(alg, m), rng)
    return verifier.check_penrose(t, config.rank_tol, config.tolerances)


def _suite_closed_range(alg, config, rng):
    _, k, m = _ranks(config, rng)
    t = instances.random_nonzero_operator(ModuleSpace(alg, k), ModuleSpace(alg, m), rng)
    return verifier.check_closed_range_tt(t, rng, tol=config.rank_tol, overrides=config.tolerances)


def _suite_prop_transfer(alg, config, rng):
    t, s = _trial_operators(alg, config, rng, nonzero=True)
    return verifier.check_prop_generalized_inverse_transfer(t, s, config.rank_tol, config.tolerances)


def _pair_space(alg, config, rng):
    _, k, _ = _ranks(config, rng)
    return ModuleSpace(alg, k)


def _suite_koliha(alg, config, rng):
    p, q = _projection_pair(_pair_space(alg, config, rng), rng)
    return verifier.check_koliha_identities(p, q, instances.random_lambdas(rng), config.tolerances)


def _suite_spectral(alg, config, rng):
    p, q = _projection_pair(_pair_space(alg, config, rng), rng)
    return verifier.check_spectral_correspondence(p, q, config.tolerances)


def _suite_range_sum(alg, config, rng):
    p, q = _projection_pair(_pair_space(alg, config, rng), rng)
    return verifier.check_range_sum_identity(p, q, config.rank_tol, config.tolerances)


def _suite_commuting(alg, config, rng):
    p, q = _projection_pair(_pair_space(alg, config, rng), rng)
    return verifier.check_commuting_projections(p, q, config.rank_tol, config.tolerances)


def _suite_inequality(alg, config, rng):
    p, q = _projection_pair(_pair_space(alg, config, rng), rng)
    return verifier.check_inequality(p, q, rng, tol=config.rank_tol, overrides=config.tolerances)


def _suite_theorem(alg, config, rng):
    t, s = _trial_operators(alg, config, rng, nonzero=True)
    return verifier.check_theorem_equivalences(t, s, config.rank_tol, config.tolerances)


def _suite_mp_product(alg, config, rng):
    t, s = _trial_operators(alg, config, rng, nonzero=True)
    return verifier.check_mp_of_product_boundedness(t, s, config.rank_tol, config.tolerances)


def _suite_angle(alg, config, rng):
    t, s = _trial_operators(alg, config, rng, nonzero=True)
    return verifier.check_angle_identity(t, s, config.rank_tol, config.tolerances)


def _suite_oracle(alg, config, rng):
    width = sum(alg.block_dims)
    allowed = [r for r in RANK_CHOICES if r * width <= ORACLE_MAX_DIM]
    e, k, m = _ranks(config, rng)
    if config.module_ranks is None:
        if not allowed:
            return verifier.VerdictReport("subspace_oracle", {"algebra": list(alg.block_dims)}, {}, True, 0.0,
                                          degenerate=True)
        e, k, m = (int(rng.choice(allowed)) for _ in range(3))
    elif max(e, k, m) * width > ORACLE_MAX_DIM:
        return verifier.VerdictReport("subspace_oracle", {"algebra": list(alg.block_dims)}, {}, True, 0.0,
                                      degenerate=True)
    E, F, G = ModuleSpace(alg, e), ModuleSpace(alg, k), ModuleSpace(alg, m)
    s = instances.random_operator(E, F, rng)
    t = instances.random_operator(F, G, rng)
    return verifier.check_subspace_oracle(t, s, config.rank_tol, config.tolerances)


SUITES: dict[str, Callable] = {
    "penrose": _suite_penrose,
    "closed-range": _suite_closed_range,
    "prop-transfer": _suite_prop_transfer,
    "koliha": _suite_koliha,
    "spectral": _suite_spectral,
    "range-sum": _suite_range_sum,
    "theorem": _suite_theorem,
    "commuting": _suite_commuting,
    "mp-product": _suite_mp_product,
    "angle": _suite_angle,
    "inequality": _suite_inequality,
    "oracle": _suite_oracle,
}


def suite_names(suite: str) -> list[str]:
    if suite == "all":
        return list(SUITES)
    names = [s.strip() for s in suite.split(",") if s.strip()]
    bad = [s for s in names if s not in SUITES]
    if bad or not names:
        raise ConfigError(f"unknown suite(s) {bad or suite!r}; choose from {', '.join(SUITES)} or all")
    return names


def _run_trial(config: RunConfig, suite: str, family: int, trial: int) -> dict:
    alg = BlockAlgebra(tuple(config.algebra_dims[family]))
    rng = instances.trial_rng(config.master_seed, trial)
    report = SUITES[suite](alg, config, rng)
    out = report.to_dict()
    out["trial"] = trial
    out["seed"] = config.master_seed
    return out


def _map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*items), chunksize=max(1, len(items) // (8 * workers))))


def verify(config: RunConfig) -> dict:
    """Run the configured suites and return the JSON-ready report."""
    names = suite_names(config.suite)
    checks, failures = {}, []
    for name in names:
        items = [
            (config, name, f, f * config.trials + j)
            for f in range(len(config.algebra_dims))
            for j in range(config.trials)
        ]
        results = _map(_run_trial, items, config.workers)
        results.sort(key=lambda r: r["trial"])
        per_family = {}
        for f, dims in enumerate(config.algebra_dims):
            fam = [r for r in results if r["trial"] // config.trials == f]
            per_family["-".join(map(str, dims))] = _summary(fam)
        checks[name] = {"families": per_family, "total": _summary(results)}
        failures.extend(r for r in results if not r["passed"] and not r["degenerate"])
    return {
        "version": REPORT_VERSION,
        "rng_algorithm": instances.RNG_ALGORITHM,
        "master_seed": config.master_seed,
        "trials_per_family": config.trials,
        "algebras": config.algebra_dims,
        "module_ranks": list(config.module_ranks) if config.module_ranks else None,
        "tolerances": {**verifier.DEFAULT_TOLERANCES, **config.tolerances},
        "finite_dim_shadow": True,
        "module_restriction": "free modules A^k over A = M_n1 + ... + M_nB",
        "checks": checks,
        "failure_count": len(failures),
        "failures": failures[:20],
    }


def _summary(results: Sequence[dict]) -> dict:
    out = {"trials": len(results), "passed": 0, "failed": 0, "degenerate": 0, "max_residual": {}}
    for r in results:
        if r["degenerate"]:
            out["degenerate"] += 1
        elif r["passed"]:
            out["passed"] += 1
        else:
            out["failed"] += 1
        for k, v in r["residuals"].items():
            if v > out["max_residual"].get(k, -np.inf):
                out["max_residual"][k] = v
    return out


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "algebra", "trials", "passed", "failed", "degenerate", "residual", "max_value"])
    for name, data in report["checks"].items():
        for fam, s in data["families"].items():
            if not s["max_residual"]:
                w.writerow([name, fam, s["trials"], s["passed"], s["failed"], s["degenerate"], "", ""])
            for res in sorted(s["max_residual"]):
                w.writerow([name, fam, s["trials"], s["passed"], s["failed"], s["degenerate"], res,
                            repr(s["max_residual"][res])])
    return buf.getvalue()


def run_verify(config: RunConfig) -> int:
    """Run, write the report, and return the process exit code (0 pass, 1 failure)."""
    report = verify(config)
    text = fileio.dump_json(report) if config.format == "json" else report_to_csv(report)
    _emit(text, config.out)
    return 1 if report["failure_count"] else 0


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        print(text, end="")
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{out}: {exc.strerror}") from None


# -- defect scan ----------------------------------------------------------------


SCAN_HEADER = ["seed", "block_dims", "k", "trial", "gamma_pq", "delta", "defect", "degenerate"]


@dataclass
class ScanRecord:
    seed: int
    block_dims: str
    k: int
    trial: int
    gamma_pq: float | None
    delta: float | None
    defect: float | None
    degenerate: bool

    def row(self) -> list:
        f = lambda v: "" if v is None else repr(float(v))  # noqa: E731
        return [self.seed, self.block_dims, self.k, self.trial, f(self.gamma_pq), f(self.delta), f(self.defect),
                str(self.degenerate).lower()]


def _scan_trial(config: RunConfig, family: int, trial: int) -> ScanRecord:
    alg = BlockAlgebra(tuple(config.algebra_dims[family]))
    rng = instances.trial_rng(config.master_seed, trial)
    _, k, _ = _ranks(config, rng)
    space = ModuleSpace(alg, k)
    p = instances.random_projection(space, rng)
    q = instances.random_projection(space, rng)
    return _scan_record(config.master_seed, alg, k, trial, p, q, config.rank_tol)


def _scan_record(seed, alg, k, trial, p, q, tol=None) -> ScanRecord:
    try:
        d = inequality_defect(p, q, tol)
    except ZeroProduct:
        return ScanRecord(seed, alg.descriptor(), k, trial, None, None, None, True)
    return ScanRecord(seed, alg.descriptor(), k, trial, d.gamma_pq, d.delta, d.defect, False)


def defect_scan(config: RunConfig) -> list[ScanRecord]:
    items = [
        (config, f, f * config.trials + j)
        for f in range(len(config.algebra_dims))
        for j in range(config.trials)
    ]
    rows = sorted(_map(_scan_trial, items, config.workers), key=lambda r: r.trial)
    if [1, 1] in config.algebra_dims:
        p, q = instances.witness_pair()
        rows.append(_scan_record(config.master_seed, p.domain.algebra, 2, -1, p, q, config.rank_tol))
    return rows


def scan_summary(rows: Sequence[ScanRecord]) -> dict:
    live = [r.defect for r in rows if not r.degenerate and r.trial >= 0]
    return {
        "trials": sum(1 for r in rows if r.trial >= 0),
        "degenerate": sum(1 for r in rows if r.degenerate),
        "min_defect": min(live) if live else None,
        "mean_defect": float(np.mean(live)) if live else None,
        "max_defect": max(live) if live else None,
        "near_equality": sum(1 for d in live if abs(d) <= NEAR_EQUALITY),
        "below_bound": sum(1 for d in live if d < -1e-8),
    }


def scan_to_csv(rows: Sequence[ScanRecord], summary: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        w.writerow(r.row())
    for key in ("trials", "degenerate", "min_defect", "mean_defect", "max_defect", "near_equality", "below_bound"):
        v = summary[key]
        buf.write(f"# {key}={'' if v is None else repr(v)}\n")
    buf.write(f"# rng={instances.RNG_ALGORITHM}\n")
    return buf.getvalue()


def read_scan_csv(text: str) -> list[dict]:
    """Parse a scan CSV, skipping the ``#`` summary footer."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def run_defect_scan(config: RunConfig) -> int:
    rows = defect_scan(config)
    summary = scan_summary(rows)
    if config.format == "csv":
        text = scan_to_csv(rows, summary)
    else:
        text = fileio.dump_json({
            "rng_algorithm": instances.RNG_ALGORITHM,
            "records": [asdict(r) for r in rows],
            "summary": summary,
        })
    _emit(text, config.out)
    return 1 if summary["below_bound"] else 0


# -- one-shot computations -----------------------------------------------------------


COMPUTE_COMMANDS = ("c0", "gamma", "mpinv", "defect")


def _as_submodule(obj, path) -> Submodule:
    if isinstance(obj, Submodule):
        return obj
    if isinstance(obj, ModuleOperator):
        return range_(obj)
    raise ParseError(f"{path}: expected a submodule or operator file")


def _as_operator(obj, path) -> ModuleOperator:
    if not isinstance(obj, ModuleOperator):
        raise ParseError(f"{path}: expected an operator file")
    return obj


def compute(command: str, inputs: Sequence[str], out: str | None = None) -> str:
    """Evaluate one quantity from stored inputs; returns the text that is printed."""
    need = {"c0": 2, "gamma": 1, "mpinv": 1, "defect": 2}
    if command not in need:
        raise ConfigError(f"unknown compute command {command!r}; choose from {', '.join(COMPUTE_COMMANDS)}")
    if len(inputs) != need[command]:
        raise ConfigError(f"{command} takes {need[command]} input file(s), got {len(inputs)}")
    objs = [fileio.read_any(p) for p in inputs]
    if command == "c0":
        m, n = (_as_submodule(o, p) for o, p in zip(objs, inputs))
        if m.space != n.space:
            raise SpaceMismatch(f"{inputs[0]} and {inputs[1]} live in different modules")
        return f"{dixmier_cosine(m, n).cosine!r}\n"
    if command == "gamma":
        return f"{gamma(_as_operator(objs[0], inputs[0])).value!r}\n"
    if command == "mpinv":
        text = fileio.dump_json(fileio.operator_to_dict(mp_inverse(_as_operator(objs[0], inputs[0]))))
        if out is not None:
            _emit(text, out)
            return ""
        return text
    p, q = (_as_operator(o, path) for o, path in zip(objs, inputs))
    if p.domain != q.domain:
        raise SpaceMismatch(f"{inputs[0]} and {inputs[1]} act on different modules")
    d = inequality_defect(p, q)
    return f"gamma_pq={d.gamma_pq!r}\ndelta={d.delta!r}\ndefect={d.defect!r}\n"
