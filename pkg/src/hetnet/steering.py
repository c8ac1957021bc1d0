"""Minimum-energy open-loop steering, used as a constructive certificate.

A pair that is declared controllable should be steerable from any state to
any other over a finite horizon. ``min_energy_steer`` builds the input from
the controllability Gramian and then integrates the closed trajectory with
an independent RK4 scheme, so the reported terminal error checks the whole
chain from the system matrices to the target.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .ctrb import DEFAULT_TOL, ToleranceConfig, numerical_rank
from .errors import DimensionMismatch, GramianSingular

__all__ = [
    "PiecewiseConstant",
    "SteeringProblem",
    "SteeringResult",
    "matrix_exponential",
    "gramian",
    "gramian_factor",
    "gramian_is_definite",
    "drift_response",
    "min_energy_steer",
    "GRAMIAN_SINGULAR_RATIO",
]

# smallest/largest Gramian eigenvalue below which steering is refused
GRAMIAN_SINGULAR_RATIO = 1e-10


def matrix_exponential(M) -> np.ndarray:
    """``exp(M)`` by Pade scaling and squaring (``scipy.linalg.expm``)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {M.shape}")
    return sla.expm(M)


def _system(system):
    if hasattr(system, "Amat"):
        return np.asarray(system.Amat, float), np.asarray(system.Bmat, float)
    A, B = system
    A = np.atleast_2d(np.asarray(A, float))
    B = np.asarray(B, float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.shape[0] != A.shape[0] or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"inconsistent shapes {A.shape} and {B.shape}")
    return A, B


def gramian(system, t0: float, tf: float) -> np.ndarray:
    """Controllability Gramian ``int_0^(tf-t0) e^(A s) B B^T e^(A^T s) ds``.

    Uses Van Loan's block exponential: the top-right block of
    ``expm([[-A, BB^T], [0, A^T]] h)`` premultiplied by ``e^(A h)``.
    """
    A, B = _system(system)
    h = float(tf) - float(t0)
    if not h > 0:
        raise DimensionMismatch(f"horizon must be positive, got [{t0}, {tf}]")
    n = A.shape[0]
    big = np.zeros((2 * n, 2 * n))
    big[:n, :n] = -A
    big[:n, n:] = B @ B.T
    big[n:, n:] = A.T
    E = matrix_exponential(big * h)
    W = E[n:, n:].T @ E[:n, n:]
    return 0.5 * (W + W.T)


def gramian_factor(system, t0: float, tf: float, nodes: int | None = None) -> np.ndarray:
    """Square-root factor ``Z`` with ``Z Z^T`` the Gauss-Legendre Gramian.

    Column block ``k`` is ``sqrt(w_k) e^(A s_k) B``. With at least ``n``
    distinct nodes the range of ``Z`` is exactly the controllable subspace,
    and its singular values are square roots of Gramian eigenvalues, so
    definiteness can be decided on ``Z`` with half the dynamic range.
    """
    A, B = _system(system)
    h = float(tf) - float(t0)
    if not h > 0:
        raise DimensionMismatch(f"horizon must be positive, got [{t0}, {tf}]")
    n = A.shape[0]
    nodes = nodes or max(2 * n, 20)
    x, w = np.polynomial.legendre.leggauss(nodes)
    tau = 0.5 * h * (x + 1.0)
    w = 0.5 * h * w
    return np.hstack([np.sqrt(wk) * matrix_exponential(A * t) @ B for t, wk in zip(tau, w)])


def gramian_is_definite(system, t0: float = 0.0, tf: float = 1.0,
                        cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether the Gramian on ``[t0, tf]`` is positive definite.

    Decided as full row rank of :func:`gramian_factor` under the same
    singular-value threshold as every other rank decision.
    """
    Z = gramian_factor(system, t0, tf)
    return numerical_rank(Z, cfg) == Z.shape[0]


@dataclass(frozen=True)
class PiecewiseConstant:
    """Signal equal to ``values[k]`` on ``[breakpoints[k], breakpoints[k+1])``.

    Zero before the first breakpoint; the last value persists forever.
    """

    breakpoints: tuple
    values: np.ndarray

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if len(bp) != vals.shape[0]:
            raise DimensionMismatch(f"{len(bp)} breakpoints but {vals.shape[0]} values")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise DimensionMismatch("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DimensionMismatch("drift values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zero(cls, dim: int) -> "PiecewiseConstant":
        return cls((0.0,), np.zeros((1, dim)))

    def __call__(self, t: float) -> np.ndarray:
        k = np.searchsorted(self.breakpoints, t, side="right") - 1
        if k < 0:
            return np.zeros(self.dim)
        return self.values[k]

    def segments(self, t0: float, tf: float):
        """Yield ``(a, b, value)`` covering ``[t0, tf]`` with constant value."""
        cuts = [t0] + [t for t in self.breakpoints if t0 < t < tf] + [tf]
        for a, b in zip(cuts, cuts[1:]):
            yield a, b, self(0.5 * (a + b))

    def to_json(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": self.values.tolist()}


def drift_response(A, f: PiecewiseConstant, t0: float, tf: float) -> np.ndarray:
    """Exact ``int_t0^tf e^(A (tf - s)) f(s) ds`` for a piecewise-constant ``f``."""
    A = np.asarray(A, float)
    n = A.shape[0]
    if f.dim != n:
        raise DimensionMismatch(f"drift has dimension {f.dim}, system has {n}")
    d = np.zeros(n)
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = A
    for a, b, val in f.segments(t0, tf):
        if not np.any(val):
            continue
        aug[:n, n] = val
        # expm of the augmented matrix carries int_0^h e^(A s) ds val in its last column
        seg = matrix_exponential(aug * (b - a))[:n, n]
        d += matrix_exponential(A * (tf - b)) @ seg
    return d


@dataclass
class SteeringProblem:
    system: object
    x0: np.ndarray
    xstar: np.ndarray
    t0: float = 0.0
    tf: float = 2.0
    drift: PiecewiseConstant | None = None

    def __post_init__(self):
        A, B = _system(self.system)
        n = A.shape[0]
        self.x0 = np.asarray(self.x0, float).reshape(-1)
        self.xstar = np.asarray(self.xstar, float).reshape(-1)
        if self.x0.size != n or self.xstar.size != n:
            raise DimensionMismatch(f"states must have length {n}")
        if not float(self.tf) - float(self.t0) > 0:
            raise DimensionMismatch(f"horizon must be positive, got [{self.t0}, {self.tf}]")
        if self.drift is not None and self.drift.dim != n:
            raise DimensionMismatch(f"drift has dimension {self.drift.dim}, system has {n}")


@dataclass
class SteeringResult:
    times: np.ndarray
    input: np.ndarray
    trajectory: np.ndarray
    terminal_error: float
    gramian_condition: float
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"terminal_error": self.terminal_error,
                "gramian_condition": self.gramian_condition,
                "grid_points": int(self.times.size),
                "t0": float(self.times[0]), "tf": float(self.times[-1])}

    def to_csv(self, fh=None) -> str:
        """Columns ``t, u_1..u_r, x_1..x_N``; returns the text if ``fh`` is None."""
        buf = fh if fh is not None else io.StringIO()
        r = self.input.shape[1]
        n = self.trajectory.shape[1]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"u_{i + 1}" for i in range(r)] + [f"x_{i + 1}" for i in range(n)])
        for t, u, x in zip(self.times, self.input, self.trajectory):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in u] + [repr(float(v)) for v in x])
        return buf.getvalue() if fh is None else ""

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def min_energy_steer(p: SteeringProblem, grid_points: int = 1000) -> SteeringResult:
    """Steer ``x0`` at ``t0`` to ``xstar`` at ``tf`` with the minimum-energy input.

    ``u(t) = B^T e^(A^T (tf - t)) W^-1 (xstar - e^(A (tf - t0)) x0 - d)``
    where ``d`` is the free response to the drift. The trajectory is then
    integrated by classical RK4 on a uniform grid of ``grid_points`` nodes,
    with steps split at drift breakpoints.

    Raises
    ------
    GramianSingular
        If the Gramian's eigenvalue ratio is below ``GRAMIAN_SINGULAR_RATIO``.
    """
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    A, B = _system(p.system)
    n = A.shape[0]
    t0, tf = float(p.t0), float(p.tf)
    W = gramian((A, B), t0, tf)
    wv = np.linalg.eigvalsh(W)
    cond = float(wv[-1] / wv[0]) if wv[0] > 0 else float("inf")
    if not wv[-1] > 0 or wv[0] <= GRAMIAN_SINGULAR_RATIO * wv[-1]:
        raise GramianSingular(cond)

    d = np.zeros(n) if p.drift is None else drift_response(A, p.drift, t0, tf)
    free = matrix_exponential(A * (tf - t0)) @ p.x0
    eta = np.linalg.solve(W, p.xstar - free - d)

    times = np.linspace(t0, tf, grid_points)
    h = times[1] - times[0]
    # costate v(t) = e^(A^T (tf - t)) eta on the half-step grid, stepped backwards
    half = matrix_exponential(A.T * (h / 2))
    costate = np.empty((2 * grid_points - 1, n))
    costate[-1] = eta
    for k in range(2 * grid_points - 3, -1, -1):
        costate[k] = half @ costate[k + 1]
    u_half = costate @ B
    inputs = u_half[::2]

    def u_at(t):
        return B.T @ matrix_exponential(A.T * (tf - t)) @ eta

    def rhs(x, u, fval):
        return A @ x + B @ u + fval

    x = p.x0.copy()
    traj = np.empty((grid_points, n))
    traj[0] = x
    for k in range(grid_points - 1):
        a, b = times[k], times[k + 1]
        cuts = [a, b]
        if p.drift is not None:
            cuts = [a] + [t for t in p.drift.breakpoints if a < t < b] + [b]
        for s, e in zip(cuts, cuts[1:]):
            fval = np.zeros(n) if p.drift is None else p.drift(0.5 * (s + e))
            dt = e - s
            if len(cuts) == 2:
                u0, um, u1 = u_half[2 * k], u_half[2 * k + 1], u_half[2 * k + 2]
            else:
                u0, um, u1 = u_at(s), u_at(s + dt / 2), u_at(e)
            k1 = rhs(x, u0, fval)
            k2 = rhs(x + dt / 2 * k1, um, fval)
            k3 = rhs(x + dt / 2 * k2, um, fval)
            k4 = rhs(x + dt * k3, u1, fval)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        traj[k + 1] = x

    err = float(np.linalg.norm(traj[-1] - p.xstar) / (1.0 + np.linalg.norm(p.xstar)))
    return SteeringResult(times=times, input=inputs, trajectory=traj,
                          terminal_error=err, gramian_condition=cond,
                          extra={"eta": eta, "drift_response": d})
