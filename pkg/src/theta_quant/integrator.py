"""Adaptive Dormand-Prince 5(4) integration in complex arithmetic."""

import logging
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import StepUnderflow
from .models import Trajectory


logger = logging.getLogger(__name__)

Field = Callable[[Union[float, complex], np.ndarray], np.ndarray]

# Dormand-Prince 5(4) tableau, FSAL row last
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
DP_B_HAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
DP_E = DP_B - DP_B_HAT

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
ORDER = 5


def dopri_step(field: Field, t: complex, y: np.ndarray, dt: complex) -> Tuple[np.ndarray, np.ndarray]:
    """
    One Dormand-Prince step of (complex) size dt.

    Returns:
        (fifth-order solution, embedded error vector)
    """
    stages = []
    for i in range(7):
        increment = sum((a * kj for a, kj in zip(DP_A[i], stages)), np.zeros_like(y))
        stages.append(np.asarray(field(t + DP_C[i] * dt, y + dt * increment), dtype=complex))
    K = np.array(stages)
    y_new = y + dt * (DP_B @ K)
    error = dt * (DP_E @ K)
    return y_new, error


def _as_time(t0: complex, t1: complex, value: complex) -> Union[float, complex]:
    if complex(t0).imag == 0 and complex(t1).imag == 0:
        return float(complex(value).real)
    return complex(value)


def _segment_offset(t: Union[float, complex], t0: Union[float, complex], unit: complex, length: float) -> float:
    """Arc-length position of t on the segment from t0; ValueError if t is off it."""
    offset = (complex(t) - complex(t0)) / unit
    slack = 1e-12 * max(1.0, length)
    if abs(offset.imag) > slack or offset.real < -slack or offset.real > length + slack:
        raise ValueError(f"t_eval point {t} lies outside the segment [{t0}, {t0 + unit * length}]")
    return min(max(offset.real, 0.0), length)


def integrate(
    field: Field,
    s0: Sequence[complex],
    t0: Union[float, complex],
    t1: Union[float, complex],
    tol: float = 1e-10,
    t_eval: Optional[Sequence[Union[float, complex]]] = None,
    first_step: Optional[float] = None,
    fixed_step: Optional[float] = None,
    max_steps: int = 200000,
    labels: Tuple[str, ...] = (),
) -> Trajectory:
    """
    Integrate y' = field(t, y) from t0 to t1 along the straight time segment.

    Complex endpoints are allowed; the path t0 + s (t1 - t0)/|t1 - t0| is
    parametrized by arc length s. The error of each step is measured
    componentwise against tol * max(1, |y|) in the max norm. Steps are
    clipped so that every requested output time is hit exactly.

    Args:
        field: Vector field on complex arrays
        s0: Initial state
        t0: Start time
        t1: End time
        tol: Per-step tolerance
        t_eval: Output times on the segment; defaults to every accepted step
        first_step: Initial arc-length step
        fixed_step: If set, take steps of this arc length without error control
        max_steps: Hard cap on attempted steps
        labels: Coordinate names stored on the trajectory

    Returns:
        Trajectory with samples and step statistics

    Raises:
        StepUnderflow: If the step collapses (e.g. near a pole)
        ValueError: If tol is not positive or a t_eval point lies off the segment
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    y = np.array(s0, dtype=complex)
    span = complex(t1) - complex(t0)
    length = abs(span)
    unit = span / length if length else 1.0

    if t_eval is None:
        targets = []
        record_start = True
    else:
        offsets = sorted({_segment_offset(t, t0, unit, length) for t in t_eval})
        targets = [s for s in offsets if 0 < s < length] + [length]
        record_start = 0 in offsets
        if length not in offsets and not any(abs(s - length) <= 1e-14 * length for s in offsets):
            targets = targets[:-1]

    def time_at(s: float) -> Union[float, complex]:
        value = complex(t1) if s == length else complex(t0) + unit * s
        return _as_time(t0, t1, value)

    times = [time_at(0.0)] if record_start else []
    states = [y.copy()] if record_start else []

    s = 0.0
    h = fixed_step or first_step or 1e-2 * max(length, 1.0)
    accepted = rejected = 0
    errors = []
    target_index = 0

    while s < length:
        if accepted + rejected >= max_steps:
            raise StepUnderflow(f"integration from {t0} to {t1} exceeded {max_steps} steps")
        stop = targets[target_index] if target_index < len(targets) else length
        clipped = h >= stop - s
        step = stop - s if clipped else h

        t = complex(t0) + unit * s
        y_new, err_vec = dopri_step(field, t, y, unit * step)
        scale = np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.max(np.abs(err_vec) / scale)) / tol
        finite = bool(np.all(np.isfinite(y_new))) and np.isfinite(err)

        if finite and (fixed_step is not None or err <= 1.0):
            s = stop if clipped else s + step
            y = y_new
            accepted += 1
            errors.append(err * tol)
            if clipped and target_index < len(targets):
                target_index += 1
                times.append(time_at(s))
                states.append(y.copy())
            elif t_eval is None:
                times.append(time_at(s))
                states.append(y.copy())
            if fixed_step is None:
                factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err ** (-1 / ORDER)))
                h = max(h, step * factor) if clipped else step * factor
        else:
            rejected += 1
            factor = MIN_FACTOR if not finite else max(MIN_FACTOR, SAFETY * err ** (-1 / ORDER))
            h = step * min(1.0, factor)
            logger.debug(f"rejected step at s={s:.6g}: error ratio {err:.3g}, new step {h:.3g}")
            if h < 16 * np.finfo(float).eps * max(1.0, length):
                raise StepUnderflow(f"step size collapsed to {h:.3e} at t={t}")

    logger.debug(f"integrate {t0} -> {t1}: {accepted} accepted, {rejected} rejected steps")
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        labels=labels,
        accepted_steps=accepted,
        rejected_steps=rejected,
        error_estimates=errors,
        tolerance=tol,
    )
