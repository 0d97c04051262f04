"""Implicit symplectic kernel predictor.

One macro step maps x0 = (q0, p0) to (Q, P) through the learned potential s:

    P = p0 - dT * ds/dq (q0, P)      (implicit, momentum block only)
    Q = q0 + dT * ds/dp (q0, P)      (explicit)

This is the symplectic Euler update of the Hamiltonian s with step dT, so
the map is symplectic by construction regardless of how well s was fitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySample, NoConvergence
from .integrators import SolveReport, Trajectory
from .kernels import LONG_EPS, mixed2_self
from .linalg import sym_eigen
from .surrogate import Surrogate
from .systems import jmat

FIXED_POINT_MAX = 60
NEWTON_MAX = 25
DEFAULT_TOL_FACTOR = 1e-11
# fall back to Newton when one sweep shrinks the residual by less than 10%
STALL_RATIO = 0.9


@dataclass
class PredictorModel:
    surrogate: Surrogate
    delta_t: float
    tol_factor: float = DEFAULT_TOL_FACTOR

    def __post_init__(self):
        if self.surrogate.dim % 2 != 0:
            raise DimensionMismatch("surrogate dimension must be even")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")

    @property
    def n(self) -> int:
        return self.surrogate.dim // 2

    def gradient_noise_floor(self) -> float:
        """Rounding-noise bound for one gradient evaluation.

        Expansions with large cancelling coefficients cannot be evaluated
        below eps * sum|c| * (term scale); solves are floored there.  The
        predictor evaluates gradients with extended-precision accumulation,
        so the relevant eps is LONG_EPS.
        """
        s = self.surrogate
        if s.size == 0:
            return 0.0
        scale = max(1.0, mixed2_self(s.kernel))
        return float(LONG_EPS * np.sum(np.abs(s.coeffs)) * scale)


def _solve_momentum(model: PredictorModel, q0, p0, p_start, tol):
    """Fixed-point iteration on the momentum block, Newton on stall.

    Convergence is declared at max(tol, dt * evaluation noise floor); the
    best iterate seen is kept, since noise-limited residuals jitter.
    Returns (P, gradient of s at (q0, P), iterations, residual).
    """
    s, dt, n = model.surrogate, model.delta_t, model.n
    tol_eff = max(tol, dt * model.gradient_noise_floor())
    P = p_start.copy()
    evals = 0

    def grad_at(P_):
        return s.gradient_precise(np.concatenate([q0, P_]))

    g = grad_at(P)
    evals += 1
    F = p0 - dt * g[:n] - P
    res = float(np.max(np.abs(F)))
    best = (res, P.copy(), g)
    prev = np.inf
    for _ in range(FIXED_POINT_MAX):
        if res <= tol_eff:
            return P, g, evals, res
        if res > STALL_RATIO * prev:
            break
        prev = res
        P = P + F
        g = grad_at(P)
        evals += 1
        F = p0 - dt * g[:n] - P
        res = float(np.max(np.abs(F)))
        if res < best[0]:
            best = (res, P.copy(), g)
    # Newton on the momentum block with a finite-difference Jacobian
    h = 1e-7
    for _ in range(NEWTON_MAX):
        if res <= tol_eff:
            return P, g, evals, res
        M = np.empty((n, n))
        for j in range(n):
            dp = np.zeros(n)
            dp[j] = h
            gp = grad_at(P + dp)[:n]
            gm = grad_at(P - dp)[:n]
            evals += 2
            M[:, j] = (gp - gm) / (2 * h)
        JF = -dt * M - np.eye(n)
        P = P - np.linalg.solve(JF, F)
        g = grad_at(P)
        evals += 1
        F = p0 - dt * g[:n] - P
        res = float(np.max(np.abs(F)))
        if res < best[0]:
            best = (res, P.copy(), g)
    if best[0] <= tol_eff:
        return best[1], best[2], evals, best[0]
    raise NoConvergence(
        f"momentum solve stalled at residual {best[0]:.3e} (tol {tol_eff:.3e})"
    )


def predict_step(model: PredictorModel, x0, tol_factor: float | None = None):
    """One macro step of the kernel predictor; returns (state, report)."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.surrogate.dim,):
        raise DimensionMismatch(f"state shape {x0.shape} != ({model.surrogate.dim},)")
    n = model.n
    q0, p0 = x0[:n], x0[n:]
    if model.surrogate.size == 0:
        return x0.copy(), SolveReport(iterations=0, final_residual_norm=0.0, converged=True)
    tol = (model.tol_factor if tol_factor is None else tol_factor) \
        * (1.0 + np.max(np.abs(p0), initial=0.0))
    try:
        P, g, evals, res = _solve_momentum(model, q0, p0, p0, tol)
    except NoConvergence:
        g0 = model.surrogate.gradient_precise(x0)
        P, g, evals, res = _solve_momentum(model, q0, p0, p0 - model.delta_t * g0[:n], tol)
    Q = q0 + model.delta_t * g[n:]
    return np.concatenate([Q, P]), SolveReport(evals, res, True)


def rollout(model: PredictorModel, x0, num_steps: int) -> Trajectory:
    """Compose macro steps; the composition stays symplectic."""
    x = np.asarray(x0, dtype=float)
    states = np.empty((num_steps + 1, x.size))
    states[0] = x
    iters = np.zeros(num_steps + 1, dtype=int)
    for k in range(num_steps):
        try:
            x, report = predict_step(model, x)
        except NoConvergence as exc:
            raise NoConvergence(f"macro step {k}: {exc}") from exc
        states[k + 1] = x
        iters[k + 1] = report.iterations
    return Trajectory(times=np.arange(num_steps + 1) * model.delta_t, states=states,
                      step=model.delta_t, solver_iterations=iters)


def symplecticity_defect(model: PredictorModel, x0, fd_step: float = 1e-6) -> float:
    """Max-entry norm of D'JD - J for the finite-difference Jacobian D.

    The inner solves run at a tightened tolerance so that solver noise
    stays well below the finite-difference scale.
    """
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    D = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = fd_step
        up, down = x0 + e, x0 - e
        xp, _ = predict_step(model, up, tol_factor=1e-13)
        xm, _ = predict_step(model, down, tol_factor=1e-13)
        # divide by the realized spacing so the identity map differences
        # exactly
        D[:, j] = (xp - xm) / (up[j] - down[j])
    J = jmat(d // 2)
    return float(np.max(np.abs(D.T @ J @ D - J)))


def contraction_margin(model: PredictorModel, region_sample) -> float:
    """dT times the sampled Lipschitz bound of P -> ds/dq (q0, P).

    The fixed-point solve is certified to converge where this is < 1.
    """
    sample = np.atleast_2d(np.asarray(region_sample, dtype=float))
    if sample.size == 0:
        raise EmptySample("contraction_margin needs at least one state")
    if model.surrogate.size == 0:
        return 0.0
    n = model.n
    h = 1e-6
    worst = 0.0
    for x in sample:
        q0, p = x[:n], x[n:]
        M = np.empty((n, n))
        for j in range(n):
            dp = np.zeros(n)
            dp[j] = h
            gp = model.surrogate.gradient_precise(np.concatenate([q0, p + dp]))[:n]
            gm = model.surrogate.gradient_precise(np.concatenate([q0, p - dp]))[:n]
            M[:, j] = (gp - gm) / (2 * h)
        w, _ = sym_eigen(M.T @ M)
        worst = max(worst, float(np.sqrt(max(w[0], 0.0))))
    return model.delta_t * worst
