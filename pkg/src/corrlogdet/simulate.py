"""Configuration-driven Monte Carlo harness for the log-determinant laws.

Each replication derives its own random substream from ``(seed, rep)``,
fills a data matrix, forms the correlation (or covariance) matrix, takes
the Cholesky log-determinant and standardizes it.  Replications are
embarrassingly parallel and scheduling never affects values, so the
statistics CSV is byte-identical across thread counts.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Any

import numpy as np

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover

    def threadpool_limits(*_args, **_kwargs):
        return nullcontext()

from .cltstats import KsResult, SummaryMoments, ks_test, standardize_corr, standardize_cov, summary_moments
from .errors import ConfigError, NotPositiveDefiniteError, NumericalFailure
from .matrices import DataMatrix, log_det_spd, sample_correlation, sample_covariance
from .sampling import RngStream, TailLaw, fill_matrix

_STATISTICS = ("corr_logdet", "cov_logdet")
_FLAG_BUDGET = 0.001
_KDE_POINTS = 256


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: law, shape, replication count, outputs."""

    law: TailLaw
    p: int
    n: int
    reps: int
    seed: int
    statistic: str = "corr_logdet"
    parallelism: int | None = None
    csv_path: str | None = None
    json_path: str | None = None
    svg_path: str | None = None

    def __post_init__(self):
        if not isinstance(self.law, TailLaw):
            raise ConfigError("law must be a TailLaw")
        if not 0 < self.p < self.n:
            raise ConfigError(f"need 0 < p < n, got p={self.p}, n={self.n}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.statistic not in _STATISTICS:
            raise ConfigError(f"statistic must be one of {_STATISTICS}")
        if self.parallelism is not None and self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "law": self.law.to_config(),
            "p": self.p,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "statistic": self.statistic,
            "parallelism": self.parallelism if self.parallelism is not None else "auto",
        }
        outputs = {}
        if self.csv_path:
            outputs["csv_path"] = self.csv_path
        if self.json_path:
            outputs["json_path"] = self.json_path
        if self.svg_path:
            outputs["svg_path"] = self.svg_path
        if outputs:
            out["outputs"] = outputs
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            data = dict(raw)
            law = TailLaw.from_config(data.pop("law"))
            outputs = data.pop("outputs", {}) or {}
            parallelism = data.pop("parallelism", None)
            if parallelism in ("auto", None):
                parallelism = None
            else:
                parallelism = int(parallelism)
            return cls(
                law=law,
                p=int(data.pop("p")),
                n=int(data.pop("n")),
                reps=int(data.pop("reps")),
                seed=int(data.pop("seed", 0)),
                statistic=str(data.pop("statistic", "corr_logdet")),
                parallelism=parallelism,
                csv_path=outputs.get("csv_path"),
                json_path=outputs.get("json_path"),
                svg_path=outputs.get("svg_path"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid experiment config: {exc}") from exc

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)


@dataclass
class ExperimentReport:
    """Aggregated simulation output, JSON-serializable.

    ``statistics`` holds the standardized values in replication order with
    NaN at flagged replications; summary statistics, the KS test, the
    histogram and the KDE curve are computed from the unflagged values.
    """

    config: dict
    statistics: np.ndarray
    logdet_raw: np.ndarray
    flagged: np.ndarray
    summary: SummaryMoments
    ks: KsResult
    histogram: dict
    kde: dict
    timing: dict = field(default_factory=dict)

    @property
    def n_flagged(self) -> int:
        return int(np.sum(self.flagged))

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "statistics": [None if f else float(s) for s, f in zip(self.statistics, self.flagged)],
            "logdet_raw": [None if f else float(x) for x, f in zip(self.logdet_raw, self.flagged)],
            "flagged": [bool(f) for f in self.flagged],
            "summary": self.summary._asdict(),
            "ks": self.ks._asdict(),
            "histogram": self.histogram,
            "kde": self.kde,
            "timing": self.timing,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        raw = json.loads(text)
        flagged = np.array(raw["flagged"], dtype=bool)
        stats = np.array([math.nan if s is None else s for s in raw["statistics"]])
        logdets = np.array([math.nan if s is None else s for s in raw["logdet_raw"]])
        return cls(
            config=raw["config"],
            statistics=stats,
            logdet_raw=logdets,
            flagged=flagged,
            summary=SummaryMoments(**raw["summary"]),
            ks=KsResult(**raw["ks"]),
            histogram=raw["histogram"],
            kde=raw["kde"],
            timing=raw.get("timing", {}),
        )


def resolve_parallelism(requested: int | None) -> int:
    """THREADS environment variable wins, then the config, then a default."""
    env = os.environ.get("THREADS")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(f"THREADS must be an integer, got {env!r}") from exc
        if value < 1:
            raise ConfigError("THREADS must be >= 1")
        return value
    if requested is not None:
        return requested
    # replication workers contend on the interpreter lock between BLAS
    # calls, so threading only pays off with plenty of cores
    cpus = os.cpu_count() or 1
    return min(8, cpus) if cpus >= 4 else 1


def freedman_diaconis_histogram(x: np.ndarray) -> dict:
    lo, hi = float(np.min(x)), float(np.max(x))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    m = x.size
    width = 2.0 * iqr * m ** (-1.0 / 3.0)
    if width <= 0.0 or hi <= lo:
        bins = max(1, int(math.ceil(math.sqrt(m))))
    else:
        bins = max(1, int(math.ceil((hi - lo) / width)))
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi) if hi > lo else (lo - 0.5, lo + 0.5))
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


def silverman_bandwidth(x: np.ndarray) -> float:
    m = x.size
    sd = float(np.std(x, ddof=1)) if m > 1 else 0.0
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    if scale <= 0.0:
        scale = max(abs(float(x[0])), 1.0) * 1e-3
    return 0.9 * scale * m ** (-0.2)


def kde_curve(x: np.ndarray, points: int = _KDE_POINTS) -> dict:
    bw = silverman_bandwidth(x)
    lo = float(np.min(x)) - 3.0 * bw
    hi = float(np.max(x)) + 3.0 * bw
    grid = np.linspace(lo, hi, points)
    z = (grid[None, :] - x[:, None]) / bw
    density = np.exp(-0.5 * z * z).sum(axis=0) / (x.size * bw * math.sqrt(2.0 * math.pi))
    return {
        "grid": [float(g) for g in grid],
        "density": [float(d) for d in density],
        "bandwidth": bw,
    }


def _replication_worker(config: ExperimentConfig, scale: float, fourth_moment: float):
    law, p, n = config.law, config.p, config.n

    def run(rep: int) -> tuple[float, float, bool]:
        stream = RngStream(config.seed, rep)
        x = fill_matrix(law, p, n, stream)
        try:
            if config.statistic == "corr_logdet":
                logdet = log_det_spd(sample_correlation(x))
                return logdet, standardize_corr(logdet, p, n), False
            scaled = DataMatrix(x.values / scale)
            logdet = log_det_spd(sample_covariance(scaled))
            return logdet, standardize_cov(logdet, p, n, fourth_moment), False
        except NotPositiveDefiniteError:
            return math.nan, math.nan, True

    return run


def run_simulation(config: ExperimentConfig) -> ExperimentReport:
    """Run all replications and aggregate; raises
    :class:`NumericalFailure` if more than 0.1% of them flag."""
    scale = 1.0
    fourth_moment = 3.0
    if config.statistic == "cov_logdet":
        variance = config.law.variance()
        if not math.isfinite(variance):
            raise ConfigError("cov_logdet needs a finite-variance law")
        scale = math.sqrt(variance)
        fourth_moment = config.law.standardized_fourth_moment()
        if not math.isfinite(fourth_moment):
            raise ConfigError("cov_logdet needs a finite fourth moment")

    workers = resolve_parallelism(config.parallelism)
    worker = _replication_worker(config, scale, fourth_moment)
    logdets = np.empty(config.reps)
    stats = np.empty(config.reps)
    flagged = np.zeros(config.reps, dtype=bool)

    # Parallelism lives at the replication level; pinning the BLAS pool to
    # one thread avoids oversubscription and keeps every value bitwise
    # independent of the scheduler.
    start = time.perf_counter()
    with threadpool_limits(limits=1, user_api="blas"):
        if workers == 1:
            results = map(worker, range(config.reps))
        else:
            pool = ThreadPoolExecutor(max_workers=workers)
            results = pool.map(worker, range(config.reps))
        for rep, (logdet, stat, bad) in enumerate(results):
            logdets[rep] = logdet
            stats[rep] = stat
            flagged[rep] = bad
        if workers != 1:
            pool.shutdown()
    wall = time.perf_counter() - start

    if np.mean(flagged) > _FLAG_BUDGET:
        raise NumericalFailure(
            f"{int(flagged.sum())} of {config.reps} replications failed Cholesky"
        )
    good = stats[~flagged]
    if good.size < 8:
        raise NumericalFailure("too few successful replications to summarize")

    report = ExperimentReport(
        config=config.to_dict(),
        statistics=stats,
        logdet_raw=logdets,
        flagged=flagged,
        summary=summary_moments(good),
        ks=ks_test(good),
        histogram=freedman_diaconis_histogram(good),
        kde=kde_curve(good),
        timing={
            "wall_seconds": wall,
            "per_replication_seconds": wall / config.reps,
            "threads": workers,
        },
    )
    return report


def statistics_csv(report: ExperimentReport) -> str:
    """Deterministic per-replication CSV (independent of thread count)."""
    lines = ["rep_index,logdet_raw,standardized,flagged"]
    for rep in range(len(report.statistics)):
        if report.flagged[rep]:
            lines.append(f"{rep},nan,nan,1")
        else:
            lines.append(
                f"{rep},{float(report.logdet_raw[rep])!r},{float(report.statistics[rep])!r},0"
            )
    return "\n".join(lines) + "\n"


def write_outputs(report: ExperimentReport, config: ExperimentConfig) -> list[str]:
    """Write whichever of csv/json/svg outputs the config requests."""
    written = []
    if config.csv_path:
        with open(config.csv_path, "w", encoding="ascii") as fh:
            fh.write(statistics_csv(report))
        written.append(config.csv_path)
    if config.json_path:
        with open(config.json_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        written.append(config.json_path)
    if config.svg_path:
        from .svgplot import emit_plot

        with open(config.svg_path, "w", encoding="utf-8") as fh:
            fh.write(emit_plot(report))
        written.append(config.svg_path)
    return written
