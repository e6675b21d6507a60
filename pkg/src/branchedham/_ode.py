"""Embedded Dormand-Prince 5(4) integrator with dense output and event location.

Internal plumbing shared by the trajectory integrators and the scaled
exponential-integral ODE.  State is a small numpy vector; tolerances follow
the usual mixed absolute/relative convention.  Events are located on the
quartic dense-output interpolant by bisection, which keeps switch points
accurate to ~1e-13 in time.

The right-hand side may be mildly non-Lipschitz at an event surface (branch
cusps behave like sqrt(p_c - |p|)); the controller is therefore allowed to
force-accept a step once the step size hits a hard floor, counting such
steps instead of aborting.  Genuine stalls still raise StepFailureError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import StepFailureError

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# embedded 4th-order weights
_B41, _B43, _B44, _B45, _B46, _B47 = (
    5179 / 57600, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
# dense-output coefficients (Hairer's dopri5 rcont5)
_D1 = -12715105075 / 11282082432
_D3 = 87487479700 / 32700410799
_D4 = -10690763975 / 1880347072
_D5 = 701980252875 / 199316789632
_D6 = -1453857185 / 822651844
_D7 = 69997945 / 29380423


@dataclass
class Event:
    """Terminal event: root of ``g(t, y)`` crossed in the given direction.

    direction: +1 fires on negative-to-positive crossings, -1 on the
    opposite, 0 on any sign change.
    """

    g: Callable[[float, np.ndarray], float]
    direction: int = 0


class DenseSegment:
    """Quartic interpolant valid on [t0, t1] (h is the underlying step)."""

    __slots__ = ("t0", "t1", "h", "_r1", "_r2", "_r3", "_r4", "_r5")

    def __init__(self, t0, t1, h, r1, r2, r3, r4, r5):
        self.t0, self.t1, self.h = t0, t1, h
        self._r1, self._r2, self._r3, self._r4, self._r5 = r1, r2, r3, r4, r5

    def __call__(self, t: float) -> np.ndarray:
        th = (t - self.t0) / self.h
        th1 = 1.0 - th
        return self._r1 + th * (self._r2 + th1 * (self._r3 + th * (self._r4 + th1 * self._r5)))

    def trimmed(self, t_end: float) -> "DenseSegment":
        return DenseSegment(self.t0, t_end, self.h,
                            self._r1, self._r2, self._r3, self._r4, self._r5)


@dataclass
class OdeResult:
    status: str  # "reached" | "event"
    t: float
    y: np.ndarray
    event_index: int | None = None
    n_steps: int = 0
    n_forced: int = 0


def solve_rk45(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[float],
    t1: float,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    events: Sequence[Event] = (),
    on_dense: Callable[[DenseSegment], None] | None = None,
    max_step: float | None = None,
    first_step: float | None = None,
) -> OdeResult:
    """Integrate y' = f(t, y) from t0 to t1 (t1 may be below t0).

    Stops at t1 or at the first event root, whichever comes first.  When
    ``on_dense`` is given it is called once per accepted step (trimmed to the
    event time on the final step) so callers can sample the solution at
    arbitrary times without constraining the step sequence.
    """
    y = np.asarray(y0, dtype=float).copy()
    t = t0
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0.0:
        return OdeResult("reached", t0, y)
    hmax = span if max_step is None else min(max_step, span)
    h = first_step if first_step is not None else min(1e-3 * span + 1e-12, hmax)
    h = min(h, hmax)
    h_floor = 1e-13 * max(1.0, abs(t0), abs(t1))

    k1 = np.asarray(f(t, y), dtype=float)
    g_prev = [ev.g(t, y) for ev in events]
    err_prev = 1.0
    n_steps = n_forced = 0
    n_reject_run = 0

    while direction * (t1 - t) > 0.0:
        h = min(h, abs(t1 - t), hmax)
        if h < h_floor:
            h = h_floor
        hs = direction * h

        k2 = f(t + _C2 * hs, y + hs * (_A21 * k1))
        k3 = f(t + _C3 * hs, y + hs * (_A31 * k1 + _A32 * k2))
        k4 = f(t + _C4 * hs, y + hs * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = f(t + _C5 * hs, y + hs * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = f(t + hs, y + hs * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        dy5 = hs * (_A71 * k1 + _A73 * k3 + _A74 * k4 + _A75 * k5 + _A76 * k6)
        y5 = y + dy5
        k7 = np.asarray(f(t + hs, y5), dtype=float)
        y4 = y + hs * (_B41 * k1 + _B43 * k3 + _B44 * k4 + _B45 * k5 + _B46 * k6 + _B47 * k7)

        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))

        forced = False
        if err > 1.0:
            if h <= h_floor * 1.0001 or n_reject_run > 40:
                forced = True  # cusp-grade singularity: accept; events cut the step
            else:
                n_reject_run += 1
                h *= max(0.2, 0.9 * err ** -0.2)
                continue
        n_reject_run = 0
        n_steps += 1
        if forced:
            n_forced += 1
            if n_forced > 1000:
                raise StepFailureError(
                    f"step size pinned at floor near t={t!r} ({n_forced} forced steps)")

        t_new = t + hs
        r2 = dy5
        r3 = hs * k1 - dy5
        r4 = dy5 - hs * k7 - r3
        r5 = hs * (_D1 * k1 + _D3 * k3 + _D4 * k4 + _D5 * k5 + _D6 * k6 + _D7 * k7)
        seg = DenseSegment(t, t_new, hs, y.copy(), r2, r3, r4, r5)

        hit_index = None
        t_hit = None
        for i, ev in enumerate(events):
            g_new = ev.g(t_new, y5)
            g_old = g_prev[i]
            if ev.direction > 0:
                crossed = g_old < 0.0 <= g_new
            elif ev.direction < 0:
                crossed = g_old > 0.0 >= g_new
            else:
                crossed = (g_old * g_new < 0.0) or (g_old != 0.0 and g_new == 0.0)
            if crossed:
                tr = _locate_root(lambda tt: ev.g(tt, seg(tt)), t, t_new, g_old, g_new)
                if t_hit is None or direction * (tr - t_hit) < 0.0:
                    t_hit, hit_index = tr, i
            g_prev[i] = g_new

        if hit_index is not None:
            y_hit = seg(t_hit)
            if on_dense is not None:
                on_dense(seg.trimmed(t_hit))
            return OdeResult("event", t_hit, y_hit, hit_index, n_steps, n_forced)

        if on_dense is not None:
            on_dense(seg)

        t, y, k1 = t_new, y5, k7
        # PI step-size controller
        fac = 0.9 * err ** -0.2 * err_prev ** 0.08 if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-10)

    return OdeResult("reached", t, y, None, n_steps, n_forced)


def _locate_root(g, ta, tb, ga, gb, iters: int = 80) -> float:
    """Bisection for the event time on the dense interpolant."""
    if ga == 0.0:
        return ta
    if gb == 0.0:
        return tb
    for _ in range(iters):
        tm = 0.5 * (ta + tb)
        if tm == ta or tm == tb:
            break
        gm = g(tm)
        if gm == 0.0:
            return tm
        if (ga < 0.0) != (gm < 0.0):
            tb, gb = tm, gm
        else:
            ta, ga = tm, gm
    return tb


class SampleCollector:
    """Collects dense-output samples at prescribed, sorted times."""

    def __init__(self, times: np.ndarray):
        self.times = np.asarray(times, dtype=float)
        self.values: list[np.ndarray] = []
        self.taken: list[float] = []
        self._idx = 0

    def __call__(self, seg: DenseSegment) -> None:
        lo, hi = sorted((seg.t0, seg.t1))
        while self._idx < len(self.times):
            tq = self.times[self._idx]
            if tq < lo - 1e-15:
                self._idx += 1
                continue
            if tq > hi + 1e-15:
                break
            self.values.append(np.asarray(seg(min(max(tq, lo), hi)), dtype=float))
            self.taken.append(tq)
            self._idx += 1
