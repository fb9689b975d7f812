"""
Monte Carlo oracle: PPP base-station fields with exponential fading marks
around a typical user at the origin.

Each trial draws from its own counter-based Philox stream keyed by
(seed, trial_index), so estimates do not depend on worker count or
scheduling order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats

from siet.config import settings
from siet.core.exceptions import ErrorCode, NumericalException, ValidationException
from siet.core.model import harvested_power, instantaneous_sinr, sample_user_state
from siet.models.schemas import EstimateSource, ProbabilityEstimate, SimConfig, SystemParams
from siet.services.analytic import nearest_distance_cdf

logger = structlog.get_logger()

# Substreams within a trial's Philox counter space.
PPP_STREAM = 0
STATE_STREAM = 1
# Redraws of an empty window use substreams RESAMPLE_STREAM, RESAMPLE_STREAM + 1, ...
RESAMPLE_STREAM = 2
MAX_RESAMPLES = 1000

MIN_WINDOW_RADIUS = 1.0
MAX_LOG_RADIUS = 700.0
EMPTY_WARNING_RATE = 1e-3
Z_95 = 1.96

# Returns (per-outcome hits, empty windows redrawn) for one trial.
TrialFn = Callable[[int], Tuple[np.ndarray, int]]


@dataclass(frozen=True)
class PppRealization:
    """Base stations inside a disk of radius window_radius around the origin."""

    distances: np.ndarray
    fades: np.ndarray
    window_radius: float

    @property
    def count(self) -> int:
        return int(self.distances.size)

    @property
    def is_empty(self) -> bool:
        return self.distances.size == 0

    def received_powers(self, alpha: float) -> np.ndarray:
        """h_i * R_i^-alpha for every base station."""
        return self.fades * np.power(self.distances, -alpha)

    def interference_at_origin(self, alpha: float) -> float:
        """I(0): received power summed over every base station."""
        return float(np.sum(self.received_powers(alpha)))

    def serving_split(self, alpha: float) -> Tuple[float, float, float]:
        """(nearest distance, its fade, interference from all others)."""
        i = int(np.argmin(self.distances))
        others = self.received_powers(alpha)
        interference = float(np.sum(others) - others[i])
        return float(self.distances[i]), float(self.fades[i]), max(0.0, interference)


@dataclass
class Tally:
    """Integer outcome counts; addition is exact so merge order never matters."""

    hits: np.ndarray
    trials: int = 0
    empty_resamples: int = 0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(
            hits=self.hits + other.hits,
            trials=self.trials + other.trials,
            empty_resamples=self.empty_resamples + other.empty_resamples,
        )


class KsResult(NamedTuple):
    statistic: float
    pvalue: float
    critical_value: float
    samples: int


@dataclass(frozen=True)
class WindowPlan:
    """Resolved simulation window and the interference it leaves out."""

    radius: float
    truncated_tail_mean: float
    expected_points: float = 0.0


# ============= Streams and sampling =============

def trial_generator(seed: int, trial_index: int, substream: int = PPP_STREAM) -> np.random.Generator:
    """Independent generator for (seed, trial_index, substream)."""
    return np.random.Generator(
        np.random.Philox(key=seed, counter=[0, 0, trial_index, substream])
    )


def tail_mean(params: SystemParams, radius: float) -> float:
    """Expected interference from base stations beyond radius: 2*pi*lambda*P*R^(2-alpha)/(alpha-2)."""
    a = params.alpha
    return 2.0 * math.pi * params.density * params.power * radius ** (2.0 - a) / (a - 2.0)


def auto_window_radius(params: SystemParams, tail_tolerance: float) -> float:
    """
    Smallest disk radius whose expected truncated interference is at most
    tail_tolerance, floored at MIN_WINDOW_RADIUS.
    """
    if not tail_tolerance > 0:
        raise ValidationException("tail_tolerance must be positive", details={"tail_tolerance": tail_tolerance})
    a = params.alpha
    log_radius = math.log(2.0 * math.pi * params.density * params.power / ((a - 2.0) * tail_tolerance)) / (a - 2.0)
    if log_radius > MAX_LOG_RADIUS:
        raise NumericalException(
            ErrorCode.DOMAIN_ERROR,
            "Window radius overflows; pass window_radius explicitly",
            details={"alpha": a, "tail_tolerance": tail_tolerance}
        )
    return max(MIN_WINDOW_RADIUS, math.exp(log_radius))


def resolve_window(params: SystemParams, config: SimConfig) -> WindowPlan:
    """
    Window radius from the config: an explicit radius wins, then an explicit
    tail tolerance, then MC_TAIL_FRACTION * lambda^(alpha/2) * P.
    """
    if config.window_radius is not None:
        radius = config.window_radius
    else:
        tolerance = config.tail_tolerance
        if tolerance is None:
            tolerance = settings.MC_TAIL_FRACTION * params.density ** (params.alpha / 2.0) * params.power
        radius = auto_window_radius(params, tolerance)
    return WindowPlan(
        radius=radius,
        truncated_tail_mean=tail_mean(params, radius),
        expected_points=params.density * math.pi * radius ** 2,
    )


def _draw(params: SystemParams, radius: float, rng: np.random.Generator) -> PppRealization:
    n = rng.poisson(params.density * math.pi * radius ** 2)
    # Radial density 2r/R^2 on (0, R]; 1 - U keeps r strictly positive.
    distances = radius * np.sqrt(1.0 - rng.random(n))
    fades = rng.exponential(scale=params.power, size=n)
    return PppRealization(distances=distances, fades=fades, window_radius=radius)


def sample_ppp(
    params: SystemParams,
    config: SimConfig,
    trial_index: int,
    attempt: int = 0
) -> PppRealization:
    """
    One PPP realization on the simulation window.

    The draw is fully determined by (config.seed, trial_index, attempt);
    attempt > 0 selects the redraw streams used after an empty window.
    """
    substream = PPP_STREAM if attempt == 0 else RESAMPLE_STREAM + attempt - 1
    rng = trial_generator(config.seed, trial_index, substream)
    return _draw(params, resolve_window(params, config).radius, rng)


def _nonempty_ppp(params: SystemParams, config: SimConfig, trial_index: int) -> Tuple[PppRealization, int]:
    for attempt in range(MAX_RESAMPLES + 1):
        realization = sample_ppp(params, config, trial_index, attempt)
        if not realization.is_empty:
            return realization, attempt
    raise NumericalException(
        ErrorCode.DOMAIN_ERROR,
        "Simulation window stays empty; lambda * pi * R^2 is too small",
        details={"trial_index": trial_index, "attempts": MAX_RESAMPLES + 1}
    )


# ============= Driver =============

def _run_chunk(trial_fn: TrialFn, n_outcomes: int, start: int, stop: int) -> Tally:
    hits = np.zeros(n_outcomes, dtype=np.int64)
    resamples = 0
    for trial_index in range(start, stop):
        outcome, redrawn = trial_fn(trial_index)
        hits += outcome
        resamples += redrawn
    return Tally(hits=hits, trials=stop - start, empty_resamples=resamples)


def run_trials(trial_fn: TrialFn, n_outcomes: int, config: SimConfig) -> Tally:
    """
    Run config.trials independent trials in chunks, fanned out to
    config.workers threads, and merge their integer tallies.
    """
    bounds = [
        (start, min(start + config.chunk_size, config.trials))
        for start in range(0, config.trials, config.chunk_size)
    ]
    total = Tally(hits=np.zeros(n_outcomes, dtype=np.int64))

    if config.workers == 1:
        for start, stop in bounds:
            total = total + _run_chunk(trial_fn, n_outcomes, start, stop)
        return total

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        for tally in executor.map(lambda b: _run_chunk(trial_fn, n_outcomes, *b), bounds):
            total = total + tally
    return total


def binomial_ci(p: float, n: int) -> float:
    """95% normal-approximation half-width, rule-of-three at p in {0, 1}."""
    if n <= 0:
        return 1.0
    if p <= 0.0 or p >= 1.0:
        return min(1.0, 3.0 / n)
    return Z_95 * math.sqrt(p * (1.0 - p) / n)


def _estimates(tally: Tally, plan: WindowPlan, config: SimConfig, quantity: str) -> List[ProbabilityEstimate]:
    if tally.empty_resamples > EMPTY_WARNING_RATE * tally.trials:
        logger.warning(
            "montecarlo.empty_windows",
            quantity=quantity,
            empty_resamples=tally.empty_resamples,
            trials=tally.trials
        )

    results = []
    for hits in tally.hits:
        value = int(hits) / tally.trials
        ci = binomial_ci(value, tally.trials)
        if config.ci_target is not None and ci > config.ci_target:
            logger.warning(
                "montecarlo.ci_target_missed",
                quantity=quantity,
                ci_halfwidth=ci,
                ci_target=config.ci_target,
                trials=tally.trials
            )
        results.append(ProbabilityEstimate(
            value=value,
            ci_halfwidth=ci,
            trials=tally.trials,
            source=EstimateSource.MONTE_CARLO,
            empty_resamples=tally.empty_resamples,
            truncated_tail_mean=plan.truncated_tail_mean,
        ))
    return results


# ============= Estimators =============

def estimate_coverage(params: SystemParams, T: float, config: SimConfig) -> ProbabilityEstimate:
    """
    Fraction of trials where the SINR from the nearest base station exceeds T.

    Empty windows are redrawn from fresh substreams and counted.
    """
    if T < 0:
        raise ValidationException("T must be nonnegative", details={"T": T})

    plan = resolve_window(params, config)
    logger.info(
        "montecarlo.coverage.start",
        T=T,
        trials=config.trials,
        window_radius=plan.radius,
        expected_points=plan.expected_points
    )

    def trial(trial_index: int) -> Tuple[np.ndarray, int]:
        realization, redrawn = _nonempty_ppp(params, config, trial_index)
        distance, fade, interference = realization.serving_split(params.alpha)
        sinr = instantaneous_sinr(fade, distance, interference, params)
        return np.array([sinr > T], dtype=np.int64), redrawn

    estimate = _estimates(run_trials(trial, 1, config), plan, config, "coverage")[0]
    logger.info("montecarlo.coverage.done", value=estimate.value, ci_halfwidth=estimate.ci_halfwidth)
    return estimate


def estimate_interference_ccdf(
    params: SystemParams,
    levels: Sequence[float],
    config: SimConfig
) -> List[ProbabilityEstimate]:
    """
    Empirical P[I(0) > level] for each level, all from the same trials so
    the results are nonincreasing in the level.
    """
    grid = np.asarray(levels, dtype=float)
    if grid.size == 0:
        raise ValidationException("empty grid", details={"levels": list(levels)})
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise ValidationException("levels must be nonnegative and sorted", details={"levels": list(levels)})

    plan = resolve_window(params, config)
    logger.info("montecarlo.interference.start", levels=grid.size, trials=config.trials, window_radius=plan.radius)
    # I(0) > 0 almost surely on the plane.
    always = grid <= 0

    def trial(trial_index: int) -> Tuple[np.ndarray, int]:
        interference = sample_ppp(params, config, trial_index).interference_at_origin(params.alpha)
        return ((interference > grid) | always).astype(np.int64), 0

    return _estimates(run_trials(trial, grid.size, config), plan, config, "interference_ccdf")


def estimate_eeh(params: SystemParams, theta: float, config: SimConfig) -> ProbabilityEstimate:
    """
    Fraction of trials where the harvested power exceeds theta, with the
    user state drawn per trial (active with probability epsilon).
    """
    if not theta > 0:
        raise ValidationException("theta must be positive", details={"theta": theta})

    plan = resolve_window(params, config)
    if theta <= params.noise:
        logger.debug("montecarlo.eeh.theta_below_noise", theta=theta, noise=params.noise)
        return ProbabilityEstimate(
            value=1.0,
            trials=config.trials,
            source=EstimateSource.MONTE_CARLO,
            truncated_tail_mean=plan.truncated_tail_mean,
        )

    logger.info("montecarlo.eeh.start", theta=theta, trials=config.trials, window_radius=plan.radius)

    def trial(trial_index: int) -> Tuple[np.ndarray, int]:
        interference = sample_ppp(params, config, trial_index).interference_at_origin(params.alpha)
        state = sample_user_state(trial_generator(config.seed, trial_index, STATE_STREAM), params.epsilon)
        return np.array([harvested_power(interference, params, state) > theta], dtype=np.int64), 0

    estimate = _estimates(run_trials(trial, 1, config), plan, config, "eeh")[0]
    logger.info("montecarlo.eeh.done", value=estimate.value, ci_halfwidth=estimate.ci_halfwidth)
    return estimate


# ============= Distribution checks =============

def nearest_distance_samples(params: SystemParams, config: SimConfig) -> np.ndarray:
    """Nearest base-station distance of every trial, in trial order."""
    samples = np.empty(config.trials)

    def fill(bounds: Tuple[int, int]) -> None:
        for trial_index in range(*bounds):
            realization, _ = _nonempty_ppp(params, config, trial_index)
            samples[trial_index] = float(np.min(realization.distances))

    bounds = [
        (start, min(start + config.chunk_size, config.trials))
        for start in range(0, config.trials, config.chunk_size)
    ]
    if config.workers == 1:
        for chunk in bounds:
            fill(chunk)
        return samples

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        list(executor.map(fill, bounds))
    return samples


def ks_nearest_distance(
    params: SystemParams,
    config: SimConfig,
    significance: float = 0.01
) -> KsResult:
    """Kolmogorov-Smirnov test of nearest distances against 1 - exp(-lambda*pi*r^2)."""
    samples = nearest_distance_samples(params, config)
    result = stats.kstest(samples, lambda r: nearest_distance_cdf(r, params.density))
    critical = float(stats.kstwo.ppf(1.0 - significance, samples.size))
    logger.info(
        "montecarlo.ks_nearest_distance",
        statistic=float(result.statistic),
        critical_value=critical,
        samples=samples.size
    )
    return KsResult(float(result.statistic), float(result.pvalue), critical, int(samples.size))
