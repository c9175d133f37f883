"""Numerical oracles on (0, inf): Gauss-Laguerre rules, adaptive integrals,
convolution, Laplace transforms, Lebesgue norms and expansion coefficients.

Everything here is deliberately independent of the closed forms it is used to
check: rules come from the Jacobi-matrix eigenproblem, adaptive integration is
Gauss-Kronrod bisection, sup norms come from grid search plus golden-section
refinement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .laguerre import (
    IndexLike,
    LaguerreIndex,
    ell,
    gamma_ratio,
    laguerre_poly,
    laguerre_poly_sequence,
)

__all__ = [
    "AccuracyError",
    "WeightedFunction",
    "QuadratureRule",
    "Coefficient",
    "AdaptiveConfig",
    "gauss_laguerre_rule",
    "adaptive_integral",
    "coefficient",
    "scalar_partial_sum",
    "numeric_convolution",
    "numeric_laplace",
    "numeric_lp_norm",
    "numeric_sup_norm",
    "laguerre_function",
    "orthonormal_laguerre_function",
    "exponential_function",
    "tail_cutoff",
]


class AccuracyError(RuntimeError):
    """Raised when an adaptive rule cannot meet its tolerance.

    Carries the best estimate so diagnostics can still report a value.
    """

    def __init__(self, message: str, best_estimate, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


@dataclass
class WeightedFunction:
    """A scalar function on (0, inf) together with integration hints.

    ``origin_power`` declares the power p with f(t) ~ t^p as t -> 0+ (used to
    reject convolutions with non-integrable endpoint singularities), and
    ``t_max`` the truncation point beyond which |f| is negligible relative to
    the integral scale.
    """

    fn: Callable[[float], float]
    description: str = ""
    t_max: Optional[float] = None
    origin_power: float = 0.0
    singular_points: tuple = ()
    complex_valued: bool = False

    def __call__(self, t):
        return self.fn(t)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights of a positive quadrature rule; nodes strictly increasing."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def integrate(self, fn) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))


@dataclass(frozen=True)
class Coefficient:
    """Expansion coefficient c_n(f) = integral of l_n^(alpha) f over (0, inf)."""

    n: int
    alpha: float
    value: float


@dataclass(frozen=True)
class AdaptiveConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    t_max: float = 120.0
    limit: int = 300


def gauss_laguerre_rule(alpha: float, num_nodes: int) -> QuadratureRule:
    """Gauss-Laguerre rule for weight t^alpha e^{-t} via Golub-Welsch.

    Nodes are the eigenvalues of the Jacobi matrix (diagonal 2k + alpha + 1,
    off-diagonal sqrt(k (k + alpha))).  Weights come from the eigenvector
    identity w_i = 1 / sum_k p_k(x_i)^2 with p_k the orthonormal Laguerre
    polynomials, evaluated through the e^{-x/2}-scaled recurrence so the far
    nodes keep full relative accuracy (LAPACK eigenvectors only carry absolute
    accuracy, which is not enough there).  Weights underflow only when the true
    weight is below the smallest double (~nodes beyond x = 745; N ~ 180).
    """
    if alpha <= -1.0:
        raise ValueError("gauss_laguerre_rule requires alpha > -1")
    if num_nodes < 1:
        raise ValueError("num_nodes must be >= 1")
    k = np.arange(num_nodes, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh_tridiagonal is robust
        raise RuntimeError(
            f"Jacobi-matrix eigenproblem failed for alpha={alpha}, N={num_nodes}: {exc}"
        ) from exc
    nodes = np.sort(nodes)
    # scaled orthonormal recurrence q_k(x) = p_k(x) e^{-x/2}
    q_prev = np.exp(-0.5 * nodes - 0.5 * gammaln(alpha + 1.0))
    total = q_prev**2
    q_cur = (nodes - diag[0]) / off[0] * q_prev if num_nodes > 1 else None
    if num_nodes > 1:
        total += q_cur**2
        for j in range(1, num_nodes - 1):
            q_prev, q_cur = q_cur, ((nodes - diag[j]) * q_cur - off[j - 1] * q_prev) / off[j]
            total += q_cur**2
    weights = np.exp(-nodes) / total
    return QuadratureRule(nodes=nodes, weights=weights, kind=f"gauss_laguerre(alpha={alpha})")


def _quad_checked(fn, a: float, b: float, cfg: AdaptiveConfig, points=None) -> float:
    pts = sorted(p for p in (points or []) if a < p < b)
    if b - a > 1e3:
        # seed log-spaced anchors so wide intervals cannot hide near-origin mass
        decade = max(a, 1e-2)
        while decade < b:
            if decade > a:
                pts.append(decade)
            decade *= 10.0
        pts = sorted(set(pts))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            fn, a, b,
            epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=max(cfg.limit, 10 * len(pts) + 50),
            points=pts or None,
        )
    if err > cfg.abs_tol + cfg.rel_tol * abs(val) + 1e-300:
        raise AccuracyError(
            f"adaptive integral did not meet tolerance (estimate {val!r}, error {err:.3e})",
            best_estimate=val, error_estimate=err,
        )
    return val


def adaptive_integral(f: WeightedFunction, cfg: AdaptiveConfig = AdaptiveConfig()) -> float:
    """Integrate f over (0, t_max] adaptively; raises AccuracyError on failure."""
    t_max = f.t_max if f.t_max is not None else cfg.t_max
    points = [p for p in f.singular_points if 0.0 < p < t_max]
    if f.complex_valued:
        re = _quad_checked(lambda t: f(t).real, 0.0, t_max, cfg, points)
        im = _quad_checked(lambda t: f(t).imag, 0.0, t_max, cfg, points)
        return complex(re, im)
    return _quad_checked(f, 0.0, t_max, cfg, points)


def tail_cutoff(n: int, alpha: float, eps: float = 1e-18) -> float:
    """Smallest T with t^{n+alpha} e^{-t} / Gamma(n+alpha+1) < eps beyond T.

    The left side is the large-t envelope of |l_n^(alpha)| (leading polynomial
    term under the weight), so (T, inf) contributes below ~eps to integrals of
    Laguerre functions.  A margin of e^15 guards the lower-order terms.
    """
    power = max(n + alpha, 0.0)
    target = -math.log(eps) - float(gammaln(n + alpha + 1.0)) + 15.0
    t = max(target + 10.0, 50.0)
    for _ in range(200):
        t_new = max(target + power * math.log(max(t, 2.0)), 2.0)
        if abs(t_new - t) < 1e-9:
            t = t_new
            break
        t = t_new
    return max(t, 35.0)


def laguerre_function(idx: IndexLike, eps: float = 1e-18) -> WeightedFunction:
    """l_n^(alpha) wrapped with its analytic truncation envelope."""
    idx = LaguerreIndex.of(idx)
    return WeightedFunction(
        fn=lambda t, _i=idx: ell(_i, t),
        description=f"ell(n={idx.n}, alpha={idx.alpha})",
        t_max=tail_cutoff(idx.n, idx.alpha, eps),
        origin_power=idx.alpha,
    )


def orthonormal_laguerre_function(idx: IndexLike, eps: float = 1e-18) -> WeightedFunction:
    """Orthonormal Laguerre function with truncation envelope (weight e^{-t/2})."""
    idx = LaguerreIndex.of(idx)
    from .laguerre import script_ell

    return WeightedFunction(
        fn=lambda t, _i=idx: script_ell(_i, t),
        description=f"script_ell(n={idx.n}, alpha={idx.alpha})",
        t_max=2.0 * tail_cutoff(idx.n, idx.alpha, eps),
        origin_power=idx.alpha / 2.0,
    )


def exponential_function(a: float) -> WeightedFunction:
    if a <= 0:
        raise ValueError("decaying exponential requires a > 0")
    return WeightedFunction(
        fn=lambda t: math.exp(-a * t),
        description=f"exp(-{a} t)",
        t_max=45.0 / a,
    )


def coefficient(f: WeightedFunction, idx: IndexLike, num_nodes: Optional[int] = None) -> Coefficient:
    """Expansion coefficient c_n(f) by Gauss-Laguerre quadrature in weighted form:

    c_n(f) = (n!/Gamma(n+alpha+1)) * sum_i w_i L_n^(alpha)(x_i) f(x_i),
    with the rule supplying the weight t^alpha e^{-t} exactly.
    """
    idx = LaguerreIndex.of(idx)
    if num_nodes is None:
        num_nodes = max(64, 2 * idx.n + 8)
    rule = gauss_laguerre_rule(idx.alpha, num_nodes)
    ratio = gamma_ratio(idx.n, idx.alpha).value
    lag = laguerre_poly(idx, rule.nodes)
    fvals = np.array([f(x) for x in rule.nodes])
    return Coefficient(n=idx.n, alpha=idx.alpha, value=ratio * float(np.dot(rule.weights, lag * fvals)))


def scalar_partial_sum(coeffs: Sequence[Coefficient], alpha: float, t: float) -> float:
    """Partial sum sum_n c_n L_n^(alpha)(t), accumulated with math.fsum."""
    if not coeffs:
        return 0.0
    m = max(c.n for c in coeffs)
    lag = laguerre_poly_sequence(m, alpha, float(t))
    return math.fsum(c.value * lag[c.n] for c in coeffs)


def numeric_convolution(f: WeightedFunction, g: WeightedFunction, t: float,
                        abs_tol: float = 1e-10, rel_tol: float = 1e-10) -> float:
    """(f * g)(t) = integral of f(t-s) g(s) over (0, t).

    Substitutes s = t u so both endpoint singularities (powers origin_power of
    f and g, each required > -1) sit at the ends of (0, 1) where the adaptive
    rule's extrapolation handles them.
    """
    if t <= 0:
        raise ValueError("convolution evaluated at t > 0 only")
    for h in (f, g):
        if h.origin_power <= -1.0:
            raise ValueError(
                f"endpoint singularity of {h.description or 'integrand'} "
                f"(power {h.origin_power}) is not integrable"
            )
    cfg = AdaptiveConfig(abs_tol=abs_tol, rel_tol=rel_tol, t_max=1.0)

    def integrand(u: float) -> float:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return f(t * (1.0 - u)) * g(t * u)

    return t * _quad_checked(integrand, 0.0, 1.0, cfg, points=[0.5])


def numeric_laplace(f: WeightedFunction, z: complex, abs_tol: float = 1e-12, rel_tol: float = 1e-11):
    """Laplace transform integral of e^{-zt} f(t) dt for Re z > 0."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("numeric_laplace requires Re z > 0")
    t_max = f.t_max if f.t_max is not None else 45.0 / min(z.real, 1.0)
    cfg = AdaptiveConfig(abs_tol=abs_tol, rel_tol=rel_tol, t_max=t_max)
    is_complex = z.imag != 0.0 or f.complex_valued
    damped = WeightedFunction(
        fn=(lambda t: np.exp(-z * t) * f(t)) if is_complex
        else (lambda t: math.exp(-z.real * t) * f(t)),
        description=f"exp(-({z}) t) * ({f.description})",
        t_max=t_max,
        complex_valued=is_complex,
    )
    return adaptive_integral(damped, cfg)


def numeric_lp_norm(f: WeightedFunction, p: float, abs_tol: float = 1e-12, rel_tol: float = 1e-11) -> float:
    """(integral of |f|^p)^{1/p} over (0, t_max) by adaptive quadrature."""
    if p < 1.0:
        raise ValueError("p must be >= 1")
    cfg = AdaptiveConfig(abs_tol=abs_tol, rel_tol=rel_tol,
                         t_max=f.t_max if f.t_max is not None else 120.0)
    powered = WeightedFunction(
        fn=lambda t: abs(f(t)) ** p,
        description=f"|{f.description}|^{p}",
        t_max=cfg.t_max,
        singular_points=f.singular_points,
    )
    return adaptive_integral(powered, cfg) ** (1.0 / p)


def numeric_sup_norm(f: WeightedFunction, grid_size: int = 1024) -> float:
    """Heuristic sup norm: log-spaced coarse grid on (1e-4, t_max), then
    golden-section refinement around the three best cells."""
    t_max = f.t_max if f.t_max is not None else 120.0
    grid = np.logspace(-4, math.log10(t_max), grid_size)
    try:
        vals = np.abs(np.asarray(f(grid), dtype=float))
        if vals.shape != grid.shape:
            raise TypeError
    except Exception:
        vals = np.abs([f(t) for t in grid])
    best = np.argsort(vals)[-3:]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    top = float(vals.max())
    for i in best:
        a = grid[max(int(i) - 1, 0)]
        b = grid[min(int(i) + 1, grid_size - 1)]
        c, d = b - gr * (b - a), a + gr * (b - a)
        fc, fd = abs(f(c)), abs(f(d))
        for _ in range(60):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = abs(f(c))
            else:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = abs(f(d))
        top = max(top, fc, fd)
    return top
