"""Linear operators exposing apply / shifted-solve, and exact semigroup oracles.

The expansion algorithms only ever need two capabilities from an operator A:
``apply(x) -> A x`` and ``shift_solve(mu, x) -> (mu I + A)^{-1} x``.  Concrete
realizations here are dense matrices (LU with cached factorizations), diagonal
multiplication operators (exact), and the translation semigroup generator on a
uniform grid (resolvent realized as exponential convolution, the generator
itself is never formed).  Each comes with an independent reference semigroup.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .laguerre import IndexLike, LaguerreIndex, ell
from .quadrature import AdaptiveConfig, _quad_checked, tail_cutoff

__all__ = [
    "LinearOperatorHandle",
    "DenseOperator",
    "DiagonalOperator",
    "ShiftOperator",
    "SemigroupOracle",
    "KernelFamily",
    "BoundInfo",
    "dense_operator",
    "multiplication_operator",
    "shift_operator",
    "shift_semigroup_oracle",
    "convolution_kernel",
    "kernel_coefficient_a_n",
    "kernel_coefficient_profile",
    "kernel_fourier_residuals",
    "expansion_weight_condition",
    "expm_oracle",
    "multiplication_semigroup_oracle",
    "read_matrix_file",
]


@dataclass(frozen=True)
class BoundInfo:
    """Optional growth data for the generated semigroup: |T(t)| <= M e^{w t}."""

    uniform_bound: float = 1.0
    exponential_bound: float = 0.0


class LinearOperatorHandle:
    """Abstract operator A with the two capabilities the expansions need."""

    dim: int
    bound_info: Optional[BoundInfo] = None

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def shift_solve(self, mu: float, x: np.ndarray) -> np.ndarray:
        """Solve (mu I + A) y = x."""
        raise NotImplementedError


class DenseOperator(LinearOperatorHandle):
    """Dense square matrix; shifted solves use partial-pivoted LU with one step
    of iterative refinement, factorizations cached per exact mu."""

    def __init__(self, matrix: np.ndarray, bound_info: Optional[BoundInfo] = None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("matrix entries must be finite")
        self.matrix = matrix
        self.dim = matrix.shape[0]
        self.bound_info = bound_info
        self._lu_cache: dict[float, tuple] = {}
        self._lock = threading.Lock()

    def apply(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def _factorization(self, mu: float):
        with self._lock:
            entry = self._lu_cache.get(mu)
            if entry is None:
                shifted = mu * np.eye(self.dim) + self.matrix
                with warnings.catch_warnings():
                    # singularity is detected from the solve result instead
                    warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                    entry = (scipy.linalg.lu_factor(shifted), shifted)
                self._lu_cache[mu] = entry
        return entry

    def shift_solve(self, mu, x):
        mu = float(mu)
        x = np.asarray(x, dtype=float)
        fac, shifted = self._factorization(mu)
        y = scipy.linalg.lu_solve(fac, x)
        if not np.all(np.isfinite(y)):
            raise np.linalg.LinAlgError(
                f"(mu I + A) is singular for mu={mu}; mu lies in the spectrum of -A"
            )
        # one step of iterative refinement
        residual = x - shifted @ y
        y = y + scipy.linalg.lu_solve(fac, residual)
        return y


class DiagonalOperator(LinearOperatorHandle):
    """A = diag(values); applies and solves are entrywise and exact."""

    def __init__(self, values: np.ndarray, bound_info: Optional[BoundInfo] = None):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1:
            raise ValueError("diagonal values must be a vector")
        self.values = values
        self.dim = values.size
        self.bound_info = bound_info

    def apply(self, x):
        return self.values * np.asarray(x, dtype=float)

    def shift_solve(self, mu, x):
        denom = mu + self.values
        if np.any(denom == 0.0):
            raise np.linalg.LinAlgError(f"mu={mu} lies in the spectrum of -A")
        return np.asarray(x, dtype=float) / denom


class ShiftOperator(LinearOperatorHandle):
    """Generator of the translation semigroup on a uniform grid over [0, L].

    Only the resolvent action is realized: (mu + A)^{-1} f equals the causal
    exponential convolution (e^{-mu .} * f), evaluated exactly for the
    piecewise-linear interpolant of f (overall accuracy O(h^2)).  The
    derivative operator itself is never discretized.
    """

    def __init__(self, grid: np.ndarray):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must contain at least two points")
        h = np.diff(grid)
        if grid[0] != 0.0 or not np.allclose(h, h[0], rtol=1e-12, atol=0.0):
            raise ValueError("grid must be uniform and start at 0")
        self.grid = grid
        self.h = float(h[0])
        self.dim = grid.size
        self.bound_info = BoundInfo(uniform_bound=1.0)

    def apply(self, x):
        raise NotImplementedError(
            "the translation generator is not formed; only shift_solve is available"
        )

    def shift_solve(self, mu, x):
        mu = float(mu)
        if mu <= 0:
            raise ValueError("shift_solve of the translation generator requires mu > 0")
        f = np.asarray(x, dtype=float)
        h = self.h
        decay = math.exp(-mu * h)
        e0 = (1.0 - decay) / mu                      # int_0^h e^{-mu s} ds
        e1 = (1.0 - decay * (1.0 + mu * h)) / mu**2  # int_0^h s e^{-mu s} ds
        y = np.empty_like(f)
        y[0] = 0.0
        for i in range(1, f.size):
            cell = f[i] * e0 + (f[i - 1] - f[i]) * e1 / h
            y[i] = decay * y[i - 1] + cell
        return y


@dataclass(frozen=True)
class SemigroupOracle:
    """Reference action (t, x) -> T(t) x of an exactly-known semigroup."""

    eval: Callable[[float, np.ndarray], np.ndarray]
    description: str = ""


def dense_operator(matrix, bound_info: Optional[BoundInfo] = None) -> DenseOperator:
    return DenseOperator(np.asarray(matrix, dtype=float), bound_info)


def multiplication_operator(q_values) -> DiagonalOperator:
    """Generator of the multiplication semigroup e^{t q} for q <= 0: A = diag(-q)."""
    q = np.asarray(q_values, dtype=float)
    if np.any(q > 0.0):
        raise ValueError("multiplication symbol q must map into (-inf, 0]")
    return DiagonalOperator(-q, bound_info=BoundInfo(uniform_bound=1.0))


def multiplication_semigroup_oracle(q_values) -> SemigroupOracle:
    """Exact semigroup x -> e^{t q} x of the multiplication operator."""
    q = np.asarray(q_values, dtype=float)
    if np.any(q > 0.0):
        raise ValueError("multiplication symbol q must map into (-inf, 0]")
    return SemigroupOracle(
        eval=lambda t, x: np.exp(t * q) * np.asarray(x, dtype=float),
        description="multiplication semigroup e^{tq}",
    )


def expm_oracle(matrix) -> SemigroupOracle:
    """Reference semigroup T(t) x = expm(-t A) x (Pade scaling-and-squaring)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")

    def evaluate(t, x):
        et = scipy.linalg.expm(-float(t) * matrix)
        if not np.all(np.isfinite(et)):
            raise OverflowError(f"matrix exponential overflowed at t={t}")
        return et @ np.asarray(x, dtype=float)

    return SemigroupOracle(eval=evaluate, description="expm(-tA) oracle")


def shift_operator(num_points: int, length: float) -> ShiftOperator:
    return ShiftOperator(np.linspace(0.0, length, num_points))


def shift_semigroup_oracle(grid) -> SemigroupOracle:
    """Translation T(t) f(x) = f(x - t), zero for x < t, linear interpolation
    between grid points (exact for grid-aligned t)."""
    grid = np.asarray(grid, dtype=float)

    def evaluate(t, samples):
        t = float(t)
        if t < 0:
            raise ValueError("translation semigroup requires t >= 0")
        return np.interp(grid - t, grid, np.asarray(samples, dtype=float), left=0.0)

    return SemigroupOracle(eval=evaluate, description="translation semigroup")


@dataclass(frozen=True)
class KernelFamily:
    """Closed-form convolution kernel family k_t on R^m, evaluated on the
    radial distance |s| (scalar or array)."""

    kind: str
    m: int
    eval: Callable[[float, float], float]

    def peak_time(self, s: float) -> float:
        """Location in t of the kernel's maximum at fixed distance |s|."""
        s = abs(float(s))
        if self.kind == "gaussian":
            return s * s / (2.0 * self.m)
        return s / math.sqrt(self.m)


def convolution_kernel(kind: str, m: int = 1) -> KernelFamily:
    """Gaussian g_t(s) = (4 pi t)^{-m/2} e^{-|s|^2/4t} or Poisson
    p_t(s) = Gamma((m+1)/2) / pi^{(m+1)/2} * t / (t^2 + |s|^2)^{(m+1)/2}."""
    if m < 1:
        raise ValueError("dimension m must be >= 1")
    if kind == "gaussian":

        def evaluate(t, s):
            if t <= 0:
                raise ValueError("kernel defined for t > 0")
            s2 = np.square(np.asarray(s, dtype=float))
            val = (4.0 * math.pi * t) ** (-m / 2.0) * np.exp(-s2 / (4.0 * t))
            return float(val) if val.ndim == 0 else val

    elif kind == "poisson":
        const = math.gamma((m + 1) / 2.0) / math.pi ** ((m + 1) / 2.0)

        def evaluate(t, s):
            if t <= 0:
                raise ValueError("kernel defined for t > 0")
            s2 = np.square(np.asarray(s, dtype=float))
            val = const * t / (t * t + s2) ** ((m + 1) / 2.0)
            return float(val) if val.ndim == 0 else val

    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return KernelFamily(kind=kind, m=m, eval=evaluate)


def expansion_weight_condition(kernel: KernelFamily, s: float, alpha: float) -> bool:
    """Whether the weighted square-integral of t -> k_t(s) is finite, the
    sufficient condition for the pointwise expansion of the kernel in t.

    At s != 0 any alpha > -1 works; at s = 0 the Gaussian needs alpha > m - 1
    and the Poisson kernel alpha > 2m - 1.
    """
    if alpha <= -1.0:
        return False
    if abs(float(s)) > 0.0:
        return True
    if kernel.kind == "gaussian":
        return alpha > kernel.m - 1.0
    return alpha > 2.0 * kernel.m - 1.0


def _an_integrability(kernel: KernelFamily, s: float, alpha: float) -> None:
    # the coefficient integral itself: integrand ~ t^{alpha - m} near 0 at s = 0
    if alpha <= -1.0:
        raise ValueError("coefficient integral requires alpha > -1")
    if abs(float(s)) == 0.0 and alpha <= kernel.m - 1.0:
        raise ValueError(
            f"coefficient integral diverges at s=0 for alpha={alpha} <= m-1={kernel.m - 1}"
        )


def kernel_coefficient_a_n(kernel: KernelFamily, idx: IndexLike, s: float,
                           abs_tol: float = 1e-12, rel_tol: float = 1e-11) -> float:
    """a_n(s) = integral over t of l_n^(alpha)(t) k_t(s), split at the kernel peak."""
    idx = LaguerreIndex.of(idx)
    _an_integrability(kernel, s, idx.alpha)
    t_hi = tail_cutoff(idx.n, idx.alpha)
    peak = kernel.peak_time(s)
    points = [peak] if 0.0 < peak < t_hi else None
    cfg = AdaptiveConfig(abs_tol=abs_tol, rel_tol=rel_tol, t_max=t_hi)
    return _quad_checked(lambda t: ell(idx, t) * kernel.eval(t, s), 0.0, t_hi, cfg, points)


def kernel_coefficient_profile(kernel: KernelFamily, idx: IndexLike, s_grid,
                               abs_tol: float = 1e-10) -> np.ndarray:
    """Vectorized a_n over a grid of distances, sharing one adaptive partition."""
    from scipy.integrate import quad_vec

    idx = LaguerreIndex.of(idx)
    s_grid = np.asarray(s_grid, dtype=float)
    for s in s_grid:
        _an_integrability(kernel, s, idx.alpha)
    t_hi = tail_cutoff(idx.n, idx.alpha)

    def integrand(t):
        return ell(idx, t) * kernel.eval(t, s_grid)

    val, _ = quad_vec(integrand, 0.0, t_hi, epsabs=abs_tol, epsrel=1e-9, limit=800)
    return val


def kernel_fourier_residuals(kernel: KernelFamily, idx: IndexLike, xi_grid,
                             u_max: float = 80.0, num_points: int = 4001) -> np.ndarray:
    """|F(a_n)(xi) - phi_{n,alpha}(xi^2 or |xi|)| on a probe frequency grid.

    The Fourier transform of the (even) coefficient profile is evaluated by a
    cosine Simpson rule over a dense radial grid; the reference is
    phi_{n,alpha}(xi^2) for the Gaussian family and phi_{n,alpha}(|xi|) for the
    Poisson family.
    """
    from scipy.integrate import simpson

    from .laguerre import phi

    idx = LaguerreIndex.of(idx)
    if kernel.m != 1:
        raise ValueError("the Fourier residual check is implemented for m = 1")
    if idx.alpha <= kernel.m - 1.0:
        raise ValueError("the Fourier residual grid includes s = 0 and needs alpha > m - 1")
    xi_grid = np.asarray(xi_grid, dtype=float)
    u = np.linspace(0.0, u_max, num_points)
    profile = kernel_coefficient_profile(kernel, idx, u)
    residuals = np.empty_like(xi_grid)
    for i, xi in enumerate(xi_grid):
        transform = 2.0 * simpson(profile * np.cos(xi * u), x=u)
        arg = xi * xi if kernel.kind == "gaussian" else abs(xi)
        residuals[i] = abs(transform - phi(idx, arg))
    return residuals


def read_matrix_file(path) -> np.ndarray:
    """Read the CLI matrix format: first line n, then n rows of n entries;
    lines starting with # are comments."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        tokens = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens.extend(line.split())
    if not tokens:
        raise ValueError(f"{path}: empty matrix file")
    n = int(tokens[0])
    vals = [float(tok) for tok in tokens[1:]]
    if len(vals) != n * n:
        raise ValueError(f"{path}: expected {n}x{n} entries, found {len(vals)}")
    return np.array(vals, dtype=float).reshape(n, n)
