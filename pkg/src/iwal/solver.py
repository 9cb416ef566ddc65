"""Log-barrier interior-point solver for the two per-step convex programs.

Program 1 minimizes an importance-weighted smooth convex loss over the ball
{u : ||u||^2 <= norm_bound}. Program 2 minimizes the linear functional u . x
over the ball intersected with at most one weighted empirical-loss cap. Both
are solved by damped-Newton centering on t*f0 + barrier, with the barrier
parameter multiplied by mu per stage until m/t is below the gap target, which
bounds the suboptimality of the returned point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleStartError, SolverConvergenceError
from .losses import LossFunction

_STRICT_MARGIN = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    gap_target: float = 1e-6
    mu: float = 10.0
    barrier_init: float = 1.0
    newton_tol: float = 1e-10      # stop centering when decrement^2/2 falls below
    max_newton: int = 200          # per centering stage
    armijo: float = 0.25
    backtrack: float = 0.5


DEFAULT_OPTIONS = SolverOptions()


@dataclass
class SolverDiagnostics:
    outer_stages: int = 0
    newton_steps: int = 0
    final_gap: float = math.inf
    used_shortcut: bool = False
    stage_values: list = field(default_factory=list)

    def as_dict(self):
        return {
            "outer_stages": self.outer_stages,
            "newton_steps": self.newton_steps,
            "final_gap": self.final_gap,
            "used_shortcut": self.used_shortcut,
        }


@dataclass
class SolverResult:
    point: np.ndarray
    value: float
    diagnostics: SolverDiagnostics


class BallConstraint:
    """||u||^2 - norm_bound <= 0."""

    def __init__(self, norm_bound: float):
        self.norm_bound = float(norm_bound)

    def value(self, u):
        return float(u @ u) - self.norm_bound

    def grad(self, u):
        return 2.0 * u

    def hess(self, u):
        return 2.0 * np.eye(len(u))


class WeightedLossCap:
    """sum_i w_i * loss(u . x_i, y_i) - bound <= 0, losses normalized."""

    def __init__(self, loss: LossFunction, xs, ys, ws, bound: float):
        self.loss = loss
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.ws = np.asarray(ws, dtype=float)
        self.bound = float(bound)
        self._z_key = None
        self._z = None

    def _margins(self, u):
        # one matmul per distinct u; Newton asks for value, grad, and
        # Hessian at the same point back to back
        key = u.tobytes()
        if key != self._z_key:
            self._z = self.xs @ u
            self._z_key = key
        return self._z

    def value(self, u):
        z = self._margins(u)
        return float(self.ws @ self.loss.smooth_value_many(z, self.ys)) - self.bound

    def grad(self, u):
        z = self._margins(u)
        return self.xs.T @ (self.ws * self.loss.smooth_grad_many(z, self.ys))

    def hess(self, u):
        z = self._margins(u)
        curv = self.ws * self.loss.smooth_curv_many(z, self.ys)
        return (self.xs * curv[:, None]).T @ self.xs


class WeightedLossObjective:
    """sum_i w_i * loss(u . x_i, y_i), losses normalized."""

    def __init__(self, loss: LossFunction, xs, ys, ws):
        self.cap = WeightedLossCap(loss, xs, ys, ws, 0.0)

    def value(self, u):
        return self.cap.value(u)

    def grad(self, u):
        return self.cap.grad(u)

    def hess(self, u):
        return self.cap.hess(u)


class LinearObjective:
    def __init__(self, direction):
        self.direction = np.asarray(direction, dtype=float)

    def value(self, u):
        return float(self.direction @ u)

    def grad(self, u):
        return self.direction

    def hess(self, u):
        return np.zeros((len(u), len(u)))


def _strictly_feasible(u, constraints, margin=_STRICT_MARGIN) -> bool:
    return all(c.value(u) < -margin for c in constraints)


def _center(objective, constraints, u, t_barrier, options, diag):
    """Damped Newton on t*f0 - sum log(-f_i), from a strictly feasible u."""

    def barrier_value(v):
        total = t_barrier * objective.value(v)
        for c in constraints:
            fv = c.value(v)
            if fv >= 0:
                return math.inf
            total -= math.log(-fv)
        return total

    current = None  # barrier value at u, carried across iterations
    for _ in range(options.max_newton):
        grad = t_barrier * objective.grad(u)
        hess = t_barrier * objective.hess(u)
        for c in constraints:
            fv = c.value(u)
            g = c.grad(u)
            grad += g / (-fv)
            hess += np.outer(g, g) / (fv * fv) + c.hess(u) / (-fv)
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        decrement_sq = float(-grad @ step)
        if decrement_sq < 0:
            # rounding noise at the precision floor of an extremely
            # ill-conditioned barrier Hessian; the iterate is centered
            return u
        if decrement_sq / 2.0 <= options.newton_tol:
            return u
        if decrement_sq <= 1e-6:
            # quadratic phase: the undamped step is guaranteed to decrease the
            # barrier, and its improvement can sit below the float resolution
            # of the barrier value, so skip the Armijo test
            scale = 1.0
            while not _strictly_feasible(u + scale * step, constraints, 0.0):
                scale *= options.backtrack
                if scale < 1e-14:
                    return u
            candidate = u + scale * step
            current = None
        else:
            if current is None:
                current = barrier_value(u)
            slope = float(grad @ step)
            scale = 1.0
            while True:
                candidate = u + scale * step
                trial = barrier_value(candidate)
                if trial <= current + options.armijo * scale * slope:
                    current = trial
                    break
                scale *= options.backtrack
                if scale < 1e-14:
                    # step direction exhausted by rounding; treat as centered
                    return u
        u = candidate
        diag.newton_steps += 1
    raise SolverConvergenceError(
        "Newton centering did not converge within the iteration cap",
        iterate=u, diagnostics=diag,
    )


def _barrier_minimize(objective, constraints, start, options) -> SolverResult:
    if not _strictly_feasible(start, constraints):
        raise InfeasibleStartError("starting point is not strictly feasible")
    diag = SolverDiagnostics()
    u = np.asarray(start, dtype=float).copy()
    t_barrier = options.barrier_init
    m = len(constraints)
    while True:
        u = _center(objective, constraints, u, t_barrier, options, diag)
        diag.outer_stages += 1
        diag.stage_values.append(objective.value(u))
        diag.final_gap = m / t_barrier
        if diag.final_gap <= options.gap_target:
            break
        t_barrier *= options.mu
    return SolverResult(point=u, value=objective.value(u), diagnostics=diag)


def _shrink_into_ball(u, norm_bound, factor=1.0 - 1e-9):
    """Scale u to lie strictly inside the ball, preserving direction."""
    u = np.asarray(u, dtype=float)
    sq = float(u @ u)
    limit = norm_bound * factor
    if sq >= limit:
        u = u * math.sqrt(limit / sq)
    return u


def _interior_start(candidate, norm_bound, constraints):
    """Pull a candidate inside the ball, as deep as the other constraints allow.

    Starts hugging the ball boundary make the barrier nearly singular and
    stall the damped Newton phase, so prefer the strongest shrink that stays
    strictly feasible.
    """
    for factor in (0.96, 0.999, 1.0 - 1e-6, 1.0 - 1e-9):
        u0 = _shrink_into_ball(candidate, norm_bound, factor)
        if _strictly_feasible(u0, constraints):
            return u0
    return None


def minimize_weighted_loss(loss, xs, ys, ws, norm_bound,
                           start=None, options=None) -> SolverResult:
    """Minimize the importance-weighted normalized loss over the norm ball.

    The objective is evaluated on unclamped inner products, which is the
    convex program actually solved; clamping applies only when predictions
    are fed back through the normalized loss.
    """
    options = options or DEFAULT_OPTIONS
    xs = np.asarray(xs, dtype=float)
    dim = xs.shape[1]
    if xs.shape[0] == 0:
        return SolverResult(np.zeros(dim), 0.0, SolverDiagnostics(used_shortcut=True))
    objective = WeightedLossObjective(loss, xs, ys, ws)
    constraints = [BallConstraint(norm_bound)]
    u0 = np.zeros(dim) if start is None else _shrink_into_ball(start, norm_bound)
    if not _strictly_feasible(u0, constraints):
        u0 = np.zeros(dim)
    return _barrier_minimize(objective, constraints, u0, options)


def minimize_linear(direction, norm_bound, loss_cap: WeightedLossCap | None = None,
                    start_candidates=(), options=None) -> SolverResult:
    """Minimize u . direction over the ball, plus an optional loss cap.

    Without an active cap the ball optimum -sqrt(norm_bound) * x/||x|| is
    analytic; the barrier only runs when that point violates the cap.
    """
    options = options or DEFAULT_OPTIONS
    direction = np.asarray(direction, dtype=float)
    dim = len(direction)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return SolverResult(np.zeros(dim), 0.0, SolverDiagnostics(used_shortcut=True))
    ball_opt = -math.sqrt(norm_bound) * direction / norm
    if loss_cap is None or loss_cap.value(ball_opt) <= 0.0:
        diag = SolverDiagnostics(used_shortcut=True, final_gap=0.0)
        return SolverResult(ball_opt, float(direction @ ball_opt), diag)
    objective = LinearObjective(direction)
    constraints = [BallConstraint(norm_bound), loss_cap]
    candidates = list(start_candidates) + [np.zeros(dim)]
    for candidate in candidates:
        u0 = _interior_start(candidate, norm_bound, constraints)
        if u0 is not None:
            return _barrier_minimize(objective, constraints, u0, options)
    # phase I: the cap minimizer over the ball is strictly feasible unless the
    # cap bound is genuinely unattainable
    phase1 = minimize_weighted_loss(loss_cap.loss, loss_cap.xs, loss_cap.ys,
                                    loss_cap.ws, norm_bound, options=options)
    u0 = _interior_start(phase1.point, norm_bound, constraints)
    if u0 is not None:
        return _barrier_minimize(objective, constraints, u0, options)
    raise InfeasibleStartError(
        "no strictly feasible start for the capped linear program"
    )
