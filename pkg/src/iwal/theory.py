"""Probes for the distance metric, disagreement coefficient, and bounds.

The hypothesis-space distance is the expected max-over-labels absolute loss
difference. The disagreement coefficient estimate scans a radius grid: for
each radius it restricts a finite hypothesis sample to the distance ball
around the reference and measures the expected supremum loss deviation per
unit radius. Because the ball is approximated by a finite sample, the
estimate is one-sided (an underestimate), and checks against closed-form
bounds assert only that direction.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .hypotheses import predict_many
from .losses import LossFunction

DEFAULT_LABELS = (-1.0, 1.0)


def loss_distance_exact(f, g, loss: LossFunction, instance,
                        labels=DEFAULT_LABELS) -> float:
    """E_x max_y |l(f(x), y) - l(g(x), y)| by enumeration of the atoms."""
    total = 0.0
    for a in range(len(instance.masses)):
        x = instance.points[a]
        zf, zg = f.predict(x), g.predict(x)
        gap = max(abs(loss.eval(zf, y) - loss.eval(zg, y)) for y in labels)
        total += instance.masses[a] * gap
    return total


def loss_distance_mc(f, g, loss: LossFunction, xs,
                     labels=DEFAULT_LABELS) -> tuple[float, float]:
    """Monte-Carlo estimate of the distance with its standard error."""
    xs = np.asarray(xs, dtype=float)
    zf = predict_many(f, xs)
    zg = predict_many(g, xs)
    gaps = np.zeros(len(xs))
    for y in labels:
        gaps = np.maximum(gaps, np.abs(loss.eval_many(zf, y) - loss.eval_many(zg, y)))
    mean = float(np.mean(gaps))
    stderr = float(np.std(gaps) / math.sqrt(len(gaps))) if len(gaps) > 1 else 0.0
    return mean, stderr


def distance_bounded_by_losses(h, reference, loss: LossFunction, instance,
                               labels=DEFAULT_LABELS) -> bool:
    """Whether distance(h, reference) <= K * (L(h) + L(reference)) holds.

    K is the loss's slope asymmetry; an infinite K makes the check vacuous.
    """
    k = loss.slope_asymmetry()
    if math.isinf(k):
        return True
    d = loss_distance_exact(h, reference, loss, instance, labels)
    bound = k * (instance.exact_loss(h, loss) + instance.exact_loss(reference, loss))
    return d <= bound + 1e-12


def disagreement_coefficient(reference, candidates, xs, loss: LossFunction,
                             r_grid, labels=DEFAULT_LABELS,
                             instance=None) -> dict:
    """Estimate the disagreement coefficient over a radius grid.

    For each radius r, candidates within distance r of the reference form
    the ball; theta_hat(r) is the expected (over xs, or exactly over an
    enumerable instance) supremum over the ball of the max-label loss
    deviation from the reference, divided by r. Radii whose ball catches no
    candidate are skipped with a warning. Returns per-radius estimates and
    their supremum.
    """
    xs = np.asarray(xs, dtype=float)
    cand = list(candidates)
    if instance is not None:
        rho = np.array([loss_distance_exact(h, reference, loss, instance, labels)
                        for h in cand])
        weights = instance.masses
        points = instance.points
    else:
        rho = np.array([loss_distance_mc(h, reference, loss, xs, labels)[0]
                        for h in cand])
        weights = np.full(len(xs), 1.0 / len(xs))
        points = xs

    z_ref = predict_many(reference, points)
    deviations = np.zeros((len(cand), len(points)))
    for i, h in enumerate(cand):
        z = predict_many(h, points)
        for y in labels:
            deviations[i] = np.maximum(
                deviations[i],
                np.abs(loss.eval_many(z, y) - loss.eval_many(z_ref, y)),
            )

    per_radius = {}
    for r in r_grid:
        if r <= 0:
            raise ValueError("radii must be positive")
        in_ball = rho <= r
        if not np.any(in_ball):
            warnings.warn(f"no sampled hypothesis within distance {r}; skipping")
            continue
        sup_dev = deviations[in_ball].max(axis=0)
        per_radius[float(r)] = float(weights @ sup_dev) / r
    supremum = max(per_radius.values()) if per_radius else 0.0
    return {"per_radius": per_radius, "supremum": supremum}


def sphere_coefficient_bound(loss: LossFunction, dim: int) -> float:
    """Closed-form ceiling (2 C1/C0) sqrt(d) for spherical linear problems."""
    c0, c1 = loss.derivative_bounds()
    if c0 <= 0:
        return math.inf
    return 2.0 * (c1 / c0) * math.sqrt(dim)


def loss_deviation_bound(p_min: float, class_size: int, confidence: float,
                         steps: int) -> float:
    """Uniform deviation ceiling for floor-bounded sampling probabilities.

    sqrt(2)/p_min * sqrt((ln|H| + ln(2/delta)) / T); with probability at
    least 1 - delta no hypothesis's weighted loss estimate deviates more.
    """
    if not p_min > 0:
        raise ValueError("p_min must be positive")
    if class_size < 1:
        raise ValueError("class size must be at least 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    return (math.sqrt(2.0) / p_min) * math.sqrt(
        (math.log(class_size) + math.log(2.0 / confidence)) / steps
    )


def expected_query_bound(theta: float, slope_asymmetry: float, best_loss: float,
                         steps: int, class_size: int,
                         confidence: float) -> tuple[float, float]:
    """Expected-query ceiling split into its linear and sublinear terms.

    Returns (4 theta K L* T, 4 theta K sqrt(T ln(|H| T / delta))). The
    sublinear term's unspecified constant is reported as 1, which callers
    must treat as a convention rather than a guarantee.
    """
    if math.isinf(slope_asymmetry):
        raise ValueError("query bound is vacuous for infinite slope asymmetry")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    front = 4.0 * theta * slope_asymmetry
    linear = front * best_loss * steps
    sublinear = front * math.sqrt(steps * math.log(class_size * steps / confidence))
    return linear, sublinear
