"""
Pipeline Service
Preprocess, bound and refine: infers the microstate behind a scalar series
"""

import logging
from collections import deque
from typing import NamedTuple, Optional

import numpy as np

from microinit.exceptions import GuessError, MicroinitError, TrajectoryOverflowError
from microinit.models.observation import ObservationSeries
from microinit.models.optim import OptRun, StopRule
from microinit.models.pipeline import Box, InitializationResult, PipelineConfig, StageFlags
from microinit.services.dynamics import SystemModel, iterate
from microinit.services.filter import lpma
from microinit.services.objective import cost, cost_from_predictions, cost_gradient
from microinit.services.optim import minimize
from microinit.services.seeding import stage_rng

logger = logging.getLogger(__name__)

# tolerance of the level-set constraint, relative to max(1, |y|)
LEVEL_TOLERANCE = 1e-10


class BoundOutcome(NamedTuple):
    state: np.ndarray
    steps_used: int
    value: float
    bounded: bool


def _level_error(op, point: np.ndarray, target: float) -> float:
    return abs(float(op(point)) - target)


def initial_guess(
    op,
    series: ObservationSeries,
    rng: np.random.Generator,
    dimension: int,
    retries: int = 10,
    box: Optional[Box] = None,
) -> np.ndarray:
    """
    Random state on the level set H(x) = y_{-T}

    A random direction is scaled onto the level set using degree-one
    homogeneity. Directions of the wrong sign are flipped for odd operators and
    redrawn otherwise. A zero first observation uses the operator's closed-form
    zero-level point.

    Args:
        op: Degree-one homogeneous operator
        series: Series whose first value sets the level
        rng: Direction source
        dimension: State length
        retries: Directions tried before giving up
        box: Optional basin the direction is drawn from

    Returns:
        State x with H(x) = y_{-T} to within the level tolerance
    """
    target = float(series.values[0])
    tolerance = LEVEL_TOLERANCE * max(1.0, abs(target))
    if box is not None and len(box.low) != dimension:
        raise GuessError("basin box does not match the state dimension", dimension=dimension)

    for attempt in range(retries):
        if box is None:
            direction = rng.standard_normal(dimension)
        else:
            direction = rng.uniform(box.low, box.high)

        if target == 0.0:
            point = op.zero_level_point(direction) if hasattr(op, "zero_level_point") else None
            if point is not None and np.any(point != 0.0) and _level_error(op, point, 0.0) <= tolerance:
                return point
            continue

        level = float(op(direction))
        if level == 0.0 or not np.isfinite(level):
            continue
        if np.sign(level) != np.sign(target):
            if not (hasattr(op, "is_odd") and op.is_odd(dimension)):
                continue
            direction = -direction
            level = -level
        # check the homogeneity degree on this direction before relying on it
        if abs(float(op(2.0 * direction)) - 2.0 * level) > 1e-9 * max(1.0, abs(level)):
            raise GuessError("operator is not homogeneous of degree one")
        point = direction * (target / level)
        if _level_error(op, point, target) <= tolerance:
            return point
        logger.debug("guess attempt %d missed the level set", attempt)
    raise GuessError(
        "no admissible initial guess on the level set", target=target, retries=retries
    )


def _scan(model, op, filtered, guess, delta, budget) -> BoundOutcome:
    """Slide a (T+1)-sample window along the orbit of the guess, every m steps"""
    T, m = filtered.T, filtered.m
    states = deque()
    observations = deque()
    x = np.asarray(guess, dtype=float)
    for j in range(T + 1):
        if j > 0:
            x = iterate(model, x, m)
        states.append(x)
        observations.append(float(op(x)))

    best: Optional[BoundOutcome] = None
    shifts = 0
    while True:
        value = cost_from_predictions(filtered, np.array(observations)).value
        if best is None or value < best.value:
            best = BoundOutcome(states[0], m * shifts, value, False)
        if value <= delta:
            return BoundOutcome(states[0], m * shifts, value, True)
        if m * (shifts + 1) > budget:
            return best
        x = iterate(model, x, m)
        states.popleft()
        observations.popleft()
        states.append(x)
        observations.append(float(op(x)))
        shifts += 1


def bound(
    model: SystemModel,
    op,
    filtered: ObservationSeries,
    guess: np.ndarray,
    config: PipelineConfig,
    rng: Optional[np.random.Generator] = None,
    noise_ratio: Optional[float] = None,
) -> BoundOutcome:
    """
    Let the guess evolve until its window cost drops to delta_R

    Candidates are iterate(guess, m R) for R = 0, 1, ... With the budget spent the
    best candidate seen comes back with bounded=False. An escaping orbit draws a
    fresh guess from rng, up to config.guess_retries times.

    Args:
        filtered: Series the cost is measured against
        guess: Starting state on the level set of the first observation
        rng: Source of replacement guesses, None disables redrawing
        noise_ratio: Overrides the ratio taken from config or the series

    Returns:
        The accepted or best candidate with its cost and the steps used
    """
    ratio = _noise_ratio(config, filtered) if noise_ratio is None else noise_ratio
    delta = config.delta_R(ratio)
    for attempt in range(config.guess_retries + 1):
        try:
            outcome = _scan(model, op, filtered, guess, delta, config.bound_budget)
            logger.debug(
                "bound stage: J=%.3e after %d steps (bounded=%s)",
                outcome.value,
                outcome.steps_used,
                outcome.bounded,
            )
            return outcome
        except TrajectoryOverflowError as exc:
            if rng is None or attempt == config.guess_retries:
                raise
            logger.warning("guess orbit escaped at step %s, drawing a new guess", exc.step_index)
            guess = initial_guess(op, filtered, rng, model.dimension, config.guess_retries)
    raise GuessError("bound stage ran out of guesses")


def refine(
    model: SystemModel,
    op,
    filtered: ObservationSeries,
    x_R: np.ndarray,
    config: PipelineConfig,
    noise_ratio: Optional[float] = None,
    r0: Optional[float] = None,
) -> OptRun:
    """Minimize the cost from x_R until it reaches delta_r"""
    ratio = _noise_ratio(config, filtered) if noise_ratio is None else noise_ratio
    stop = StopRule(
        threshold=config.delta_r(ratio, r0),
        max_iters=config.refine_budget,
        patience=config.patience,
    )
    return minimize(
        lambda x: cost(model, op, filtered, x).value,
        lambda x: cost_gradient(model, op, filtered, x),
        x_R,
        config.optimizer,
        stop,
    )


def _noise_ratio(config: PipelineConfig, series: ObservationSeries) -> float:
    return config.noise_ratio if config.noise_ratio is not None else series.noise_ratio


def initialize(
    model: SystemModel,
    op,
    raw: ObservationSeries,
    config: PipelineConfig,
    r0: Optional[float] = None,
) -> InitializationResult:
    """
    Full procedure on a raw series

    The series is smoothed with config.q filter passes unless the noise ratio in
    use is zero. Every random draw comes from streams derived from config.seed.
    A basin whose guess or bound stage fails is recorded in the flags and skipped;
    the run only raises when no basin yields a candidate.

    Args:
        model: System the series was observed on
        op: Observation operator that produced the series
        raw: Unfiltered observations y_{-T}, ..., y_0
        config: Thresholds, budgets, optimizer and basins
        r0: Filter gain used in delta_r, defaults to config.r0

    Returns:
        Assimilated and initialized states with costs, thresholds and flags

    Raises:
        GuessError: When no basin produced a bound-stage candidate
    """
    ratio = _noise_ratio(config, raw)
    r0_used = config.r0 if r0 is None else r0
    delta_R = config.delta_R(ratio)
    delta_r = config.delta_r(ratio, r0_used)
    # a noiseless series has nothing to smooth away
    q_used = config.q if ratio > 0 else 0
    filtered = lpma(raw, q_used)
    rng = stage_rng(config.seed, "guess")
    flags = {"bounded": False, "refined": False, "failed_stage": None, "message": None}

    candidates = []
    for box in config.basins or [None]:
        stage = "guess"
        try:
            guess = initial_guess(op, filtered, rng, model.dimension, config.guess_retries, box)
            stage = "bound"
            candidates.append(bound(model, op, filtered, guess, config, rng, ratio))
        except MicroinitError as exc:
            logger.warning("%s stage failed for one basin: %s", stage, exc.detail)
            flags.update(failed_stage=stage, message=exc.detail)
    if not candidates:
        raise GuessError(
            f"no basin produced a candidate: {flags['message']}", stage=flags["failed_stage"]
        )
    rough = min(candidates, key=lambda c: c.value)
    flags["bounded"] = rough.bounded
    if rough.bounded:
        flags.update(failed_stage=None, message=None)

    run = refine(model, op, filtered, rough.state, config, ratio, r0_used)
    assimilated = run.best_point
    if run.failed:
        flags.update(failed_stage="refine", message=run.message)
    flags["refined"] = run.converged

    initialized = iterate(model, assimilated, filtered.m * filtered.T)

    cost_assimilated = run.best_value if np.isfinite(run.best_value) else None
    return InitializationResult(
        assimilated=assimilated,
        initialized=initialized,
        rough=rough.state,
        cost_assimilated=cost_assimilated,
        cost_rough=rough.value,
        bound_steps_used=rough.steps_used,
        refine_trace=run,
        r0_used=r0_used,
        noise_ratio_used=ratio,
        q_used=q_used,
        delta_R=delta_R,
        delta_r=delta_r,
        flags=StageFlags(**flags),
    )
