"""Grid sweep over pulse magnitude and transduction temperature."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging
import os

from ..codebook import ensemble, load_codebook
from ..discrimination import (
    classical_codeword_baseline,
    optimal_povm,
    povm_error_prob,
    pretty_good_measurement,
)
from ..exceptions import NoConvergence, QJDRError
from ..transduction import nbar_from_temperature
from ..vqc import AnsatzSpec, train
from .config import grid_points

log = logging.getLogger(__name__)

DOMINANCE_ATOL = 1e-8


@dataclass(frozen=True)
class SweepRow:
    magnitude: float
    alpha_sq: float
    nbar: float
    p_err_classical: float
    p_err_optimal: float
    p_err_pgm: float
    p_err_vqc: float
    ykl_residual: float
    train_iterations: int
    seed: int
    temperature_kelvin: float = None

    def check_dominance(self, atol=DOMINANCE_ATOL):
        problems = []
        for name in ("p_err_classical", "p_err_optimal", "p_err_pgm", "p_err_vqc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name}={value} outside [0, 1]")
        for name in ("p_err_pgm", "p_err_vqc"):
            if getattr(self, name) < self.p_err_optimal - atol:
                problems.append(f"{name}={getattr(self, name)} below p_err_optimal={self.p_err_optimal}")
        return problems


@dataclass(frozen=True)
class PointFailure:
    temperature_kelvin: float
    magnitude: float
    error: str
    numerical: bool

    def __str__(self):
        return f"T={self.temperature_kelvin} K, |alpha|={self.magnitude}: {self.error}"


class SweepFailed(QJDRError):
    """Raised after a sweep in which some grid points failed.

    Carries the rows that did succeed and the per-point failures.
    """

    def __init__(self, rows, failures):
        self.rows = rows
        self.failures = failures
        lines = "\n  ".join(str(f) for f in failures)
        super().__init__(f"{len(failures)} grid point(s) failed:\n  {lines}")

    @property
    def numerical(self):
        return any(f.numerical for f in self.failures)


def evaluate_bounds(config, temperature, magnitude, codebook=None):
    """Ensemble, classical baseline, optimal and PGM errors at one grid point."""
    codebook = codebook or load_codebook(config.codebook)
    nbar = nbar_from_temperature(temperature, config.frequency_hz)
    ens = ensemble(codebook, magnitude, config.transduction_params(nbar))
    d = config.discrimination
    opt = optimal_povm(ens, tol=d.tol, max_iter=d.max_iter, shift=d.shift)
    if not opt.converged:
        raise NoConvergence(
            f"optimal POVM iteration hit max_iter={d.max_iter} with YKL residual {opt.ykl_residual:.3e}"
        )
    return {
        "nbar": nbar,
        "ensemble": ens,
        "classical": classical_codeword_baseline(magnitude, config.info_pulses),
        "optimal": opt,
        "pgm": povm_error_prob(ens, pretty_good_measurement(ens)),
    }


def evaluate_point(config, temperature, magnitude, codebook=None, with_training=True):
    codebook = codebook or load_codebook(config.codebook)
    b = evaluate_bounds(config, temperature, magnitude, codebook)
    if with_training:
        spec = AnsatzSpec(codebook.length, config.num_layers)
        result = train(spec, b["ensemble"], config.train)
        p_vqc, iterations = result.p_err, result.iterations
    else:
        p_vqc, iterations = float("nan"), 0
    return SweepRow(
        magnitude=magnitude,
        alpha_sq=magnitude**2,
        nbar=b["nbar"],
        p_err_classical=b["classical"],
        p_err_optimal=b["optimal"].p_err,
        p_err_pgm=b["pgm"],
        p_err_vqc=p_vqc,
        ykl_residual=b["optimal"].ykl_residual,
        train_iterations=iterations,
        seed=config.train.seed,
        temperature_kelvin=temperature,
    )


def _worker(args):
    config, temperature, magnitude, with_training = args
    try:
        return evaluate_point(config, temperature, magnitude, with_training=with_training), None
    except (QJDRError, ValueError, ArithmeticError) as exc:
        numerical = isinstance(exc, ArithmeticError)
        return None, PointFailure(temperature, magnitude, f"{type(exc).__name__}: {exc}", numerical)


def resolve_jobs(jobs):
    if jobs is None or jobs == 0:
        return os.cpu_count() or 1
    if jobs < 0:
        raise ValueError(f"jobs must be >= 0, got {jobs}")
    return jobs


def run_sweep(config, jobs=1, with_training=True, progress=None):
    """Evaluate every ``(temperature, magnitude)`` grid point.

    Rows come back sorted by temperature then magnitude, independent of
    ``jobs``. Failing points are collected; once all points have run,
    :class:`SweepFailed` is raised carrying the successful rows.
    """
    load_codebook(config.codebook)  # fail fast on a bad codebook source
    tasks = [(config, t, m, with_training) for t, m in grid_points(config)]
    jobs = min(resolve_jobs(jobs), len(tasks))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, tasks))
    else:
        results = []
        for task in tasks:
            results.append(_worker(task))
            if progress is not None:
                progress(task[1], task[2], results[-1])
    rows = [r for r, _ in results if r is not None]
    failures = [f for _, f in results if f is not None]
    rows.sort(key=lambda r: (r.temperature_kelvin, r.magnitude))
    for row in rows:
        for problem in row.check_dominance() if with_training else []:
            log.warning("T=%s |alpha|=%s: %s", row.temperature_kelvin, row.magnitude, problem)
    if failures:
        raise SweepFailed(rows, failures)
    return rows
