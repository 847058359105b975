"""Simulation harness: size/power table rows and eigen-convergence diagnostics.

Replication ``r`` under H0 draws from stream ``r``, under H1 from stream
``r + H1_STREAM_OFFSET``; results are collected by index, so the output does
not depend on the number of workers or on completion order.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .dgp import LagModel, NoisePlan, UnitRootScenario, generate_errors, generate_panel
from .errors import PanelRootError, ValidationError
from .limitlaw import LimitMoments, default_moments, load_moments
from .randomness import RngStream
from .spectra import build_basis, correlation_eigenvalues, top_eigen_T_form
from .stats import empirical_rate, ks_normality_pvalue, summarize
from .urtest import decide, test_statistic

__all__ = [
    "H0",
    "H1",
    "ExperimentConfig",
    "TableRow",
    "ReplicationError",
    "simulate_panel",
    "run_replication",
    "simulate_statistics",
    "run_experiment",
    "run_convergence_diagnostics",
    "read_config_file",
    "write_report",
]

H0 = "H0"
H1 = "H1"
H1_STREAM_OFFSET = 1 << 32
TABLE_COLUMNS = ("n", "T", "log_n", "h0_mean", "h0_variance", "ks_pvalue", "type1", "h1_min", "power")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 100
    T: int = 100
    reps: int = 1000
    seed: int = 0
    rho_h1: float = 0.6
    K: int = 3
    burn_in: int = 1000
    limits_path: str | None = None
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValidationError("reps must be at least 1")
        if self.n < 4 or self.T < 4:
            raise ValidationError(f"need n, T >= 4, got n={self.n}, T={self.T}")
        if not -1.0 < self.rho_h1 < 1.0:
            raise ValidationError(f"rho_h1 must lie in (-1, 1), got {self.rho_h1}")
        if not 1 <= self.K <= 5:
            raise ValidationError("K must lie in 1..5")
        if self.workers < 1:
            raise ValidationError("workers must be at least 1")
        if self.burn_in < 0:
            raise ValidationError("burn_in must be non-negative")
        if not 0 <= self.seed < 1 << 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class TableRow:
    n: int
    T: int
    log_n: float
    h0_mean: float
    h0_variance: float
    ks_pvalue: float
    type1: float
    h1_min: float
    power: float

    def as_list(self) -> list:
        return [getattr(self, c) for c in TABLE_COLUMNS]


class ReplicationError(PanelRootError):
    def __init__(self, rep: int, hypothesis: str, cause: Exception):
        self.rep = rep
        self.hypothesis = hypothesis
        self.cause = cause
        super().__init__(f"replication {rep} under {hypothesis} failed: {cause}")


def _stream(seed: int, rep: int, hypothesis: str) -> RngStream:
    offset = 0 if hypothesis == H0 else H1_STREAM_OFFSET
    return RngStream(seed, rep + offset)


def simulate_panel(n: int, T: int, rng: RngStream, rho: float = 1.0, burn_in: int = 1000) -> np.ndarray:
    """Panel with AR(1) mixture-noise errors; ``rho == 1`` gives the random walk."""
    model = LagModel.sinusoidal(n, burn_in)
    errors = generate_errors(model, NoisePlan(), T, rng)
    scenario = UnitRootScenario.unit_root(n) if rho == 1.0 else UnitRootScenario.stationary(n, rho)
    return generate_panel(scenario, errors).values


def _panel_for(config: ExperimentConfig, rep: int, hypothesis: str) -> np.ndarray:
    if hypothesis not in (H0, H1):
        raise ValidationError(f"hypothesis must be H0 or H1, got {hypothesis!r}")
    rho = 1.0 if hypothesis == H0 else config.rho_h1
    return simulate_panel(config.n, config.T, _stream(config.seed, rep, hypothesis), rho, config.burn_in)


def run_replication(config: ExperimentConfig, rep: int, hypothesis: str, moments: LimitMoments) -> float:
    X = _panel_for(config, rep, hypothesis)
    lam1 = float(correlation_eigenvalues(X)[0])
    return test_statistic(lam1, config.n, moments)


def _task(args):
    config, moments, hypothesis, reps = args
    out = []
    for rep in reps:
        try:
            out.append(run_replication(config, rep, hypothesis, moments))
        except Exception as exc:  # noqa: BLE001 - re-raised with its coordinates
            raise ReplicationError(rep, hypothesis, exc) from exc
    return out


def _resolve_moments(config: ExperimentConfig, moments: LimitMoments | None) -> LimitMoments:
    if moments is not None:
        return moments
    if config.limits_path:
        return load_moments(config.limits_path)
    return default_moments()


def simulate_statistics(config: ExperimentConfig, moments: LimitMoments | None = None) -> dict[str, np.ndarray]:
    """Test statistics for every replication, keyed by hypothesis, in rep order."""
    moments = _resolve_moments(config, moments)
    reps = list(range(config.reps))
    if config.workers == 1:
        return {h: np.array(_task((config, moments, h, reps))) for h in (H0, H1)}
    size = max(1, math.ceil(config.reps / (4 * config.workers)))
    batches = [reps[i : i + size] for i in range(0, len(reps), size)]
    tasks = [(config, moments, h, b) for h in (H0, H1) for b in batches]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        parts = list(pool.map(_task, tasks))
    out = {}
    for i, h in enumerate((H0, H1)):
        chunk = parts[i * len(batches) : (i + 1) * len(batches)]
        out[h] = np.array([s for part in chunk for s in part])
    return out


def table_row(config: ExperimentConfig, stats: dict[str, np.ndarray]) -> TableRow:
    h0, h1 = stats[H0], stats[H1]
    summary = summarize(h0)
    ks = ks_normality_pvalue(h0) if h0.size >= 30 else float("nan")
    return TableRow(
        n=config.n,
        T=config.T,
        log_n=math.log(config.n),
        h0_mean=summary.mean,
        h0_variance=summary.variance,
        ks_pvalue=ks,
        type1=empirical_rate([decide(s, config.n) for s in h0]),
        h1_min=float(np.min(np.abs(h1))),
        power=empirical_rate([decide(s, config.n) for s in h1]),
    )


def run_experiment(config: ExperimentConfig, moments: LimitMoments | None = None) -> TableRow:
    moments = _resolve_moments(config, moments)
    row = table_row(config, simulate_statistics(config, moments))
    if config.output_path:
        write_report(config.output_path, row, config, moments)
    return row


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def write_report(path, row: TableRow, config: ExperimentConfig, moments: LimitMoments) -> tuple[Path, Path]:
    """CSV with one header and one data row, plus a JSON sidecar with provenance."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        writer.writerow([_fmt(v) for v in row.as_list()])
    sidecar = path.with_suffix(".json")
    sidecar.write_text(
        json.dumps(
            {
                "row": asdict(row),
                "config": asdict(config),
                "limits": {
                    "source": moments.source,
                    "K": moments.K,
                    "N": moments.N,
                    "samples": moments.samples,
                    "seed": moments.seed,
                    "m1": moments.m1,
                    "s11": moments.s11,
                },
                "backend": BACKEND,
                "version": __version__,
            },
            indent=2,
        )
        + "\n"
    )
    return path, sidecar


@dataclass
class DiagnosticRow:
    n: int
    T: int
    k: int
    target: float
    lambda_over_n: np.ndarray = field(repr=False)
    lambda_over_trace: np.ndarray = field(repr=False)
    alignment: np.ndarray = field(repr=False)
    alpha_kk_sq: np.ndarray = field(repr=False)

    @property
    def median_abs_error(self) -> float:
        return float(np.median(np.abs(self.lambda_over_n - self.target)))

    @property
    def median_alignment(self) -> float:
        return float(np.median(self.alignment))

    def summary(self) -> dict:
        return {
            "n": self.n,
            "T": self.T,
            "k": self.k,
            "target_m_k": self.target,
            "median_lambda_over_n": float(np.median(self.lambda_over_n)),
            "median_lambda_over_trace": float(np.median(self.lambda_over_trace)),
            "median_abs_error": self.median_abs_error,
            "median_alignment": self.median_alignment,
            "median_alpha_kk_sq": float(np.median(self.alpha_kk_sq)),
        }


def run_convergence_diagnostics(
    config: ExperimentConfig,
    grid=((100, 100), (200, 200)),
    moments: LimitMoments | None = None,
) -> dict:
    """Compare leading eigenvalues/eigenvectors of H0 panels with their limits.

    Returns ``{"rows": [DiagnosticRow, ...], "ordered": bool}`` where
    ``ordered`` records whether lambda_1 > ... > lambda_K held in every
    replication.
    """
    moments = _resolve_moments(config, moments)
    K = config.K
    if K > moments.K:
        raise ValidationError(f"limit table only covers K={moments.K}")
    rows = []
    ordered = True
    for n, T in grid:
        cfg = replace(config, n=n, T=T)
        basis = build_basis(T, K)
        lo_n, lo_tr, align, akk = (np.empty((cfg.reps, K)) for _ in range(4))
        for rep in range(cfg.reps):
            X = _panel_for(cfg, rep, H0)
            spec = top_eigen_T_form(X, K, basis)
            lam = spec.eigenvalues[:K]
            ordered &= bool(np.all(np.diff(lam) < 0))
            lo_n[rep] = lam / n
            lo_tr[rep] = lam / spec.trace
            align[rep] = np.abs(np.sum(spec.top_vectors_T * basis.d, axis=0))
            akk[rep] = spec.alpha[np.arange(K), np.arange(K)] ** 2
        for k in range(K):
            rows.append(
                DiagnosticRow(n, T, k + 1, float(moments.m[k]), lo_n[:, k], lo_tr[:, k], align[:, k], akk[:, k])
            )
    return {"rows": rows, "ordered": ordered}


def _coerce(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in kinds:
        raise ValidationError(f"unknown config key {name!r}")
    kind = kinds[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ValidationError(f"bad value for {name}: {raw!r}") from exc
    return raw or None


def read_config_file(path) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = _coerce(key, value)
    return out
