"""Floating-point cross-validation: integrate the canonical equations with
classical RK4 and measure drift of claimed first integrals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamsys import NaturalHamiltonian
from .poly import MultiPoly


class NotRealEvaluableError(ValueError):
    """Coefficients with a nonzero imaginary part cannot be evaluated on
    real trajectories."""


@dataclass(frozen=True)
class Trajectory:
    samples: list[tuple[float, np.ndarray]]
    h: float
    method: str = "rk4"


def _compile(poly: MultiPoly) -> tuple[np.ndarray, np.ndarray]:
    """(coefficients, exponent matrix) for fast float evaluation."""
    coeffs = []
    exps = []
    for e, c in poly.sorted_terms():
        if not c.is_real():
            raise NotRealEvaluableError(f"{poly} has non-real coefficients")
        coeffs.append(c.to_float())
        exps.append(e)
    if not coeffs:
        return np.zeros(0), np.zeros((0, poly.varset.n), dtype=np.int64)
    return np.asarray(coeffs), np.asarray(exps, dtype=np.int64)


def _eval_compiled(coeffs: np.ndarray, exps: np.ndarray, state: np.ndarray) -> float:
    if coeffs.size == 0:
        return 0.0
    return float(coeffs @ np.prod(state[None, :] ** exps, axis=1))


def evaluate_float(poly: MultiPoly, state: np.ndarray) -> float:
    coeffs, exps = _compile(poly)
    return _eval_compiled(coeffs, exps, state)


def integrate_rk4(
    sys: NaturalHamiltonian, x0, h: float, T: float
) -> Trajectory:
    """Fixed-step classical RK4 for qdot_i = mu_i p_i, pdot_i = -dV/dq_i."""
    if h <= 0:
        raise ValueError("step size h must be positive")
    if T <= 0:
        raise ValueError("horizon T must be positive")
    m = sys.m
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2 * m,):
        raise ValueError(f"initial state must have {2 * m} coordinates")
    mu = np.array([x.to_float() for x in sys.mu])
    grad = [_compile(g) for g in sys.grad_V]

    def rhs(state: np.ndarray) -> np.ndarray:
        q, p = state[:m], state[m:]
        dq = mu * p
        dp = np.array([-_eval_compiled(c, e, state) for c, e in grad])
        del q
        return np.concatenate([dq, dp])

    steps = int(round(T / h))
    samples = [(0.0, x0.copy())]
    x = x0.copy()
    t = 0.0
    for _ in range(steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        samples.append((t, x.copy()))
    return Trajectory(samples=samples, h=h)


def drift(sys: NaturalHamiltonian, F: MultiPoly, x0, h: float, T: float) -> float:
    """max_t |F(x(t)) - F(x0)| / max(1, |F(x0)|) along the RK4 trajectory."""
    coeffs, exps = _compile(F)
    trajectory = integrate_rk4(sys, x0, h, T)
    f0 = _eval_compiled(coeffs, exps, trajectory.samples[0][1])
    scale = max(1.0, abs(f0))
    worst = 0.0
    for _, state in trajectory.samples[1:]:
        worst = max(worst, abs(_eval_compiled(coeffs, exps, state) - f0) / scale)
    return worst
