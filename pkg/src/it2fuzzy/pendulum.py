"""Inverted pendulum plant and deterministic closed-loop simulation.

The plant models only the pole angle: gravity tips it over, a force on
the cart (filtered by a fast first-order actuator) rights it.  The
controller sees the negated, saturated angle and angular velocity as
error and error derivative, optionally with Gaussian noise on the error
channel, and commands a force that is held constant over each
fixed-step Runge-Kutta update.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .core import T1System, UndefinedCentroid, t1_output
from .decomposed import DecomposedSystem, UndefinedOutput, it2_output

__all__ = [
    "SimulationDiverged",
    "PendulumState",
    "PlantParams",
    "SimConfig",
    "Trace",
    "Metrics",
    "TRACE_COLUMNS",
    "dynamics",
    "rk4",
    "rk4_step",
    "controller_input",
    "gaussian_noise",
    "run_closed_loop",
    "compute_metrics",
]

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("t", "y", "y_dot", "f_bar", "e_measured", "f_command")

Controller = Union[T1System, DecomposedSystem, Callable[[float, float], float]]


class SimulationDiverged(ArithmeticError):
    """The plant state stopped being finite."""


@dataclass(frozen=True)
class PendulumState:
    """Pole angle (rad), angular velocity (rad/s), filtered actuator force (N)."""

    angle: float
    angular_velocity: float
    actuator_force: float

    def as_array(self) -> np.ndarray:
        return np.array([self.angle, self.angular_velocity, self.actuator_force])


@dataclass(frozen=True)
class PlantParams:
    gravity: float = 9.8

    def __post_init__(self) -> None:
        if not self.gravity > 0:
            raise ValueError("gravity must be positive")


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Everything a closed-loop run depends on, including the RNG seed."""

    controller: Controller
    dt: float = 1e-3
    duration: float = 5.0
    theta0: float = 0.1
    theta_dot0: float = 0.0
    noise_sigma: float = 0.0
    rng_seed: int = 0
    saturation: float = math.pi / 4
    plant: PlantParams = field(default_factory=PlantParams)

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.duration < self.dt:
            raise ValueError("duration must cover at least one step")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if not self.saturation > 0:
            raise ValueError("saturation must be positive")


def dynamics(state: PendulumState, force: float, params: PlantParams) -> tuple[float, float, float]:
    """Time derivatives (d angle, d angular velocity, d actuator force).

    The angular acceleration balances gravity against the cart force and
    the centripetal term; the actuator is a first-order lag with pole at
    -100 tracking the commanded force.
    """
    y, y_dot, f_bar = state.angle, state.angular_velocity, state.actuator_force
    if not (math.isfinite(y) and math.isfinite(y_dot) and math.isfinite(f_bar) and math.isfinite(force)):
        raise ValueError("dynamics require finite state and force")
    sin_y = math.sin(y)
    cos_y = math.cos(y)
    accel = (params.gravity * sin_y + cos_y * ((-f_bar - 0.25 * y_dot * y_dot * sin_y) / 1.5)) / (
        2.0 / 3.0 - cos_y * cos_y / 6.0
    )
    return y_dot, accel, -100.0 * f_bar + 100.0 * force


def rk4(deriv: Callable[[np.ndarray], np.ndarray], state: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of an autonomous field."""
    k1 = deriv(state)
    k2 = deriv(state + 0.5 * dt * k1)
    k3 = deriv(state + 0.5 * dt * k2)
    k4 = deriv(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(state: PendulumState, force: float, dt: float, params: PlantParams) -> PendulumState:
    """Advance the plant by dt with the commanded force held constant."""
    if not dt > 0:
        raise ValueError("dt must be positive")

    def field_fn(s: np.ndarray) -> np.ndarray:
        return np.array(dynamics(PendulumState(float(s[0]), float(s[1]), float(s[2])), force, params))

    try:
        nxt = rk4(field_fn, state.as_array(), dt)
    except (ValueError, OverflowError) as exc:
        raise SimulationDiverged(
            f"state became non-finite during step from angle={state.angle!r}: {exc}"
        ) from exc
    if not np.all(np.isfinite(nxt)):
        raise SimulationDiverged(
            f"state became non-finite after step from angle={state.angle!r}"
        )
    return PendulumState(float(nxt[0]), float(nxt[1]), float(nxt[2]))


def _clamp(value: float, limit: float) -> float:
    return min(max(value, -limit), limit)


def controller_input(state: PendulumState, noise: float, saturation: float) -> tuple[float, float]:
    """Saturated error signals for a zero reference: e = -angle + noise."""
    e = _clamp(-state.angle + noise, saturation)
    e_dot = _clamp(-state.angular_velocity, saturation)
    return e, e_dot


def gaussian_noise(rng: np.random.Generator, sigma: float) -> float:
    """Zero-mean normal sample; exactly 0.0 for sigma = 0, one draw either way."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return float(rng.standard_normal()) * sigma


def _controller_fn(controller: Controller) -> Callable[[float, float], float]:
    if isinstance(controller, T1System):
        return lambda e, e_dot: t1_output(controller, (e, e_dot))
    if isinstance(controller, DecomposedSystem):
        return lambda e, e_dot: it2_output(controller, (e, e_dot))
    if callable(controller):
        return controller
    raise TypeError(f"unsupported controller type: {type(controller).__name__}")


@dataclass(frozen=True, eq=False)
class Trace:
    """Per-step closed-loop time series plus run metadata."""

    t: np.ndarray
    angle: np.ndarray
    angular_velocity: np.ndarray
    actuator_force: np.ndarray
    error_measured: np.ndarray
    force_command: np.ndarray
    undefined_output_count: int = 0
    aborted: bool = False
    abort_reason: str | None = None

    def __post_init__(self) -> None:
        n = self.t.size
        for name in ("angle", "angular_velocity", "actuator_force", "error_measured", "force_command"):
            if getattr(self, name).size != n:
                raise ValueError("trace columns must have equal length")
        if n == 0:
            raise ValueError("trace is empty")

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def dt(self) -> float:
        if len(self) < 2:
            raise ValueError("need at least two rows to infer the step")
        return float(self.t[1] - self.t[0])

    def columns(self) -> tuple[np.ndarray, ...]:
        return (
            self.t,
            self.angle,
            self.angular_velocity,
            self.actuator_force,
            self.error_measured,
            self.force_command,
        )

    def write_csv(self, path) -> None:
        """Full double precision via shortest-repr decimals; round-trips exactly."""
        cols = self.columns()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for i in range(len(self)):
                writer.writerow([repr(float(col[i])) for col in cols])

    @classmethod
    def read_csv(cls, path) -> "Trace":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != TRACE_COLUMNS:
                raise ValueError(f"unexpected trace header {header}")
            rows = [[float(v) for v in row] for row in reader]
        data = np.array(rows)
        return cls(*(data[:, i].copy() for i in range(len(TRACE_COLUMNS))))


def run_closed_loop(config: SimConfig) -> Trace:
    """Simulate the feedback loop, one controller evaluation per step.

    The controller output is held constant across each integration step.
    An undefined controller output is replaced by zero force and counted;
    a non-finite state aborts the run and returns the partial trace with a
    diagnostic.
    """
    control = _controller_fn(config.controller)
    rng = np.random.default_rng(config.rng_seed)
    n_steps = int(round(config.duration / config.dt))
    cols = {name: np.empty(n_steps) for name in TRACE_COLUMNS}
    state = PendulumState(config.theta0, config.theta_dot0, 0.0)
    undefined = 0
    aborted = False
    reason: str | None = None
    steps_done = 0
    for i in range(n_steps):
        noise = gaussian_noise(rng, config.noise_sigma)
        e, e_dot = controller_input(state, noise, config.saturation)
        try:
            force = control(e, e_dot)
        except (UndefinedCentroid, UndefinedOutput):
            force = 0.0
            undefined += 1
        cols["t"][i] = i * config.dt
        cols["y"][i] = state.angle
        cols["y_dot"][i] = state.angular_velocity
        cols["f_bar"][i] = state.actuator_force
        cols["e_measured"][i] = e
        cols["f_command"][i] = force
        steps_done = i + 1
        try:
            state = rk4_step(state, force, config.dt, config.plant)
        except (SimulationDiverged, ValueError) as exc:
            aborted = True
            reason = f"aborted at t={i * config.dt!r}: {exc}"
            break
    if undefined:
        logger.warning("controller output undefined on %d of %d steps; used zero force", undefined, steps_done)
    if aborted:
        logger.error("simulation %s", reason)
    return Trace(
        t=cols["t"][:steps_done],
        angle=cols["y"][:steps_done],
        angular_velocity=cols["y_dot"][:steps_done],
        actuator_force=cols["f_bar"][:steps_done],
        error_measured=cols["e_measured"][:steps_done],
        force_command=cols["f_command"][:steps_done],
        undefined_output_count=undefined,
        aborted=aborted,
        abort_reason=reason,
    )


@dataclass(frozen=True)
class Metrics:
    """Response quality figures for one closed-loop trace."""

    settled: bool
    settling_time: float | None
    overshoot: float
    ise: float
    post_settle_rms: float


def compute_metrics(trace: Trace, band: float = 0.005) -> Metrics:
    """Settling time into |angle| < band, overshoot past upright, integral
    squared error, and RMS angle over the last quarter of the run."""
    if len(trace) < 2:
        raise ValueError("metrics need at least two trace rows")
    y = trace.angle
    dt = trace.dt
    outside = np.where(np.abs(y) >= band)[0]
    if outside.size == 0:
        settling_time: float | None = 0.0
    elif outside[-1] == len(trace) - 1:
        settling_time = None
    else:
        settling_time = float(trace.t[outside[-1] + 1])
    sign0 = math.copysign(1.0, y[0]) if y[0] != 0.0 else 0.0
    overshoot = 0.0
    if sign0 != 0.0:
        crossed = np.where(sign0 * y < 0.0)[0]
        if crossed.size:
            overshoot = max(0.0, float(np.max(-sign0 * y[crossed[0]:])))
    ise = float(np.sum(y * y) * dt)
    tail = y[-max(1, len(trace) // 4):]
    rms = float(np.sqrt(np.mean(tail * tail)))
    return Metrics(
        settled=settling_time is not None,
        settling_time=settling_time,
        overshoot=overshoot,
        ise=ise,
        post_settle_rms=rms,
    )
