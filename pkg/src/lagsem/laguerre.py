"""Generalized Laguerre polynomials, weighted Laguerre functions and their
Laplace-transform family.

Conventions used throughout the package:

* ``laguerre_poly``      L_n^(a)(t), the degree-n generalized Laguerre polynomial.
* ``ell``                l_n^(a)(t) = (n!/Gamma(n+a+1)) t^a e^{-t} L_n^(a)(t),
                         the weighted (dual-kernel) Laguerre function on (0, inf).
* ``script_ell``         the L^2(R_+)-orthonormal Laguerre function
                         sqrt(n!/Gamma(n+a+1)) t^{a/2} e^{-t/2} L_n^(a)(t).
* ``phi``                phi_{n,a}(z) = z^n/(z+1)^{n+a+1}, the Laplace transform
                         of l_n^(a), defined on the right half-plane.

All weight prefactors are assembled in log space so large n / large t do not
underflow.  Evaluations accept scalars or numpy arrays in the abscissa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import gammaln, gammasgn

__all__ = [
    "LaguerreIndex",
    "GammaRatio",
    "laguerre_poly",
    "laguerre_poly_sequence",
    "ell",
    "script_ell",
    "phi",
    "phi_derivative",
    "phi_p_norm",
    "phi_sup_norm",
    "gamma_ratio",
    "fractional_kernel",
]

IndexLike = Union["LaguerreIndex", tuple]


@dataclass(frozen=True)
class LaguerreIndex:
    """Degree/parameter pair (n, alpha) indexing a Laguerre family member.

    alpha may be any real that is not a negative integer; alpha = -1 + eps is
    accepted for every eps > 0.
    """

    n: int
    alpha: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValueError(f"degree n must be a non-negative integer, got {self.n!r}")
        a = float(self.alpha)
        if not math.isfinite(a):
            raise ValueError("alpha must be finite")
        if a <= -1.0 and a == round(a):
            raise ValueError(f"alpha must not be a negative integer, got {a}")
        object.__setattr__(self, "alpha", a)

    @staticmethod
    def of(obj: IndexLike) -> "LaguerreIndex":
        if isinstance(obj, LaguerreIndex):
            return obj
        n, alpha = obj
        return LaguerreIndex(int(n), float(alpha))


@dataclass(frozen=True)
class GammaRatio:
    """The ratio n!/Gamma(n+alpha+1), stored with its natural log."""

    value: float
    log_value: float


def gamma_ratio(n: int, alpha: float) -> GammaRatio:
    """Return n!/Gamma(n+alpha+1) for alpha > -1, computed in log space.

    For n >= 1 the value is comparable to n^{-alpha} (two-sided bounds with
    n-independent constants).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if alpha <= -1.0:
        raise ValueError("gamma_ratio requires alpha > -1")
    log_value = float(gammaln(n + 1) - gammaln(n + alpha + 1))
    return GammaRatio(value=math.exp(log_value), log_value=log_value)


def _check_abscissa(t, allow_zero: bool):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("abscissa must be finite")
    if allow_zero:
        if np.any(t < 0):
            raise ValueError("abscissa must be >= 0")
    elif np.any(t <= 0):
        raise ValueError("abscissa must be > 0")
    return t


def laguerre_poly(idx: IndexLike, t) -> Union[float, np.ndarray]:
    """Evaluate L_n^(alpha)(t) by the forward three-term recurrence.

    Seeds L_0 = 1, L_1 = alpha + 1 - t, then
    (k+1) L_{k+1} = (2k + alpha + 1 - t) L_k - (k + alpha) L_{k-1}.
    Stable in double precision for the n <= ~500 and moderate-t regime this
    package works in.
    """
    idx = LaguerreIndex.of(idx)
    t = _check_abscissa(t, allow_zero=True)
    scalar = t.ndim == 0
    n, alpha = idx.n, idx.alpha
    prev = np.ones_like(t)
    if n == 0:
        return float(prev) if scalar else prev
    cur = alpha + 1.0 - t
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + alpha + 1.0 - t) * cur - (k + alpha) * prev) / (k + 1.0)
    return float(cur) if scalar else cur


def laguerre_poly_sequence(m: int, alpha: float, t) -> np.ndarray:
    """Return [L_0^(alpha)(t), ..., L_m^(alpha)(t)] along axis 0.

    Shares the exact recurrence path of :func:`laguerre_poly`, so element k
    reproduces laguerre_poly((k, alpha), t) bit for bit.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    LaguerreIndex.of((0, alpha))
    t = np.asarray(t, dtype=float)
    _check_abscissa(t, allow_zero=True)
    out = np.empty((m + 1,) + t.shape, dtype=float)
    out[0] = 1.0
    if m >= 1:
        out[1] = alpha + 1.0 - t
    for k in range(1, m):
        out[k + 1] = ((2.0 * k + alpha + 1.0 - t) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0)
    return out


def _log_ratio_signed(n: int, alpha: float) -> tuple[float, float]:
    """log |n!/Gamma(n+alpha+1)| and its sign, valid for any non-pole alpha."""
    arg = n + alpha + 1.0
    return float(gammaln(n + 1) - gammaln(arg)), float(gammasgn(arg))


def ell(idx: IndexLike, t) -> Union[float, np.ndarray]:
    """Weighted Laguerre function l_n^(alpha)(t) on (0, inf).

    Computed as sign * exp(log(n!/Gamma(n+alpha+1)) + alpha log t - t) * L_n^(alpha)(t).
    For alpha < -1 (non-integer) the prefactor may be negative; the sign of the
    Gamma in the denominator is tracked explicitly.
    """
    idx = LaguerreIndex.of(idx)
    t = _check_abscissa(t, allow_zero=False)
    scalar = t.ndim == 0
    log_ratio, sign = _log_ratio_signed(idx.n, idx.alpha)
    val = sign * np.exp(log_ratio + idx.alpha * np.log(t) - t) * laguerre_poly(idx, t)
    return float(val) if scalar else val


def script_ell(idx: IndexLike, t) -> Union[float, np.ndarray]:
    """Orthonormal Laguerre function sqrt(n!/Gamma(n+alpha+1)) t^{alpha/2} e^{-t/2} L_n^(alpha)(t).

    Requires alpha > -1 (the square root of the Gamma ratio must be real).
    """
    idx = LaguerreIndex.of(idx)
    if idx.alpha <= -1.0:
        raise ValueError("script_ell requires alpha > -1")
    t = _check_abscissa(t, allow_zero=False)
    scalar = t.ndim == 0
    log_ratio, _ = _log_ratio_signed(idx.n, idx.alpha)
    val = np.exp(0.5 * log_ratio + 0.5 * idx.alpha * np.log(t) - 0.5 * t) * laguerre_poly(idx, t)
    return float(val) if scalar else val


def fractional_kernel(s: float, t) -> Union[float, np.ndarray]:
    """Fractional-semigroup kernel I_s(t) = t^{s-1} e^{-t} / Gamma(s), s > 0.

    Satisfies I_s * I_r = I_{s+r} under Laplace convolution, and
    I_{alpha+1} = l_0^(alpha).
    """
    if s <= 0:
        raise ValueError("fractional kernel requires s > 0")
    t = _check_abscissa(t, allow_zero=False)
    scalar = t.ndim == 0
    val = np.exp((s - 1.0) * np.log(t) - t - gammaln(s))
    return float(val) if scalar else val


def phi(idx: IndexLike, z) -> complex:
    """phi_{n,alpha}(z) = z^n / (z+1)^{n+alpha+1} with principal logarithms.

    Real non-negative z is evaluated in real arithmetic and returned as float.
    The boundary Re z = 0 is permitted (sup norms are attained on the
    imaginary axis); z = -1 is a pole.
    """
    idx = LaguerreIndex.of(idx)
    n, alpha = idx.n, idx.alpha
    zc = complex(z)
    if zc == -1.0:
        raise ZeroDivisionError("phi has a pole at z = -1")
    if zc.imag == 0.0 and zc.real >= 0.0:
        x = zc.real
        if x == 0.0:
            val = 1.0 if n == 0 else 0.0
        else:
            val = math.exp(n * math.log(x) - (n + alpha + 1.0) * math.log1p(x))
        return val if not isinstance(z, complex) else complex(val)
    if zc == 0.0:
        return complex(0.0) if n else complex(1.0)
    return complex(np.exp(n * np.log(zc) - (n + alpha + 1.0) * np.log(zc + 1.0)))


@lru_cache(maxsize=None)
def _derivative_table(j: int, alpha: float) -> tuple[float, ...]:
    """Coefficients b_{l,alpha} of the j-th derivative expansion of phi.

    Built by the recursion b_l^(j+1) = b_{l-1}^(j) - (alpha + j + l + 1) b_l^(j)
    starting from b^(0) = (1,).  Cached per (j, alpha); lru_cache makes the memo
    table safe for concurrent callers.
    """
    b = [1.0]
    for jj in range(j):
        nxt = [0.0] * (jj + 2)
        for l in range(jj + 2):
            prev_lower = b[l - 1] if 1 <= l <= jj + 1 else 0.0
            prev_same = b[l] if l <= jj else 0.0
            nxt[l] = prev_lower - (alpha + jj + l + 1.0) * prev_same
        b = nxt
    return tuple(b)


def phi_derivative(idx: IndexLike, z, j: int) -> complex:
    """j-th derivative of phi_{n,alpha} at z, via the finite expansion

    phi^(j) = sum_{l=0}^{min(j,n)} n!/(n-l)! * b_{l,alpha} * phi_{n-l, alpha+j+l}.
    """
    idx = LaguerreIndex.of(idx)
    if j < 1:
        raise ValueError("derivative order j must be >= 1")
    n, alpha = idx.n, idx.alpha
    b = _derivative_table(j, alpha)
    total = 0.0 + 0.0j
    fall = 1.0  # n!/(n-l)!
    for l in range(min(j, n) + 1):
        if b[l] != 0.0:
            total += fall * b[l] * phi((n - l, alpha + j + l), z)
        fall *= n - l
    return total


def phi_p_norm(idx: IndexLike, p: float) -> float:
    """Closed-form L^p(R_+) norm of phi_{n,alpha}:

    ||phi||_p = (Gamma(np+1) Gamma(p(alpha+1)-1) / Gamma(p(n+alpha+1)))^{1/p},
    finite iff alpha > 1/p - 1.
    """
    idx = LaguerreIndex.of(idx)
    if p < 1.0:
        raise ValueError("p must be >= 1")
    n, alpha = idx.n, idx.alpha
    if alpha <= 1.0 / p - 1.0:
        raise ValueError(f"integral diverges: alpha={alpha} <= 1/p - 1 = {1.0 / p - 1.0}")
    log_pth_power = gammaln(n * p + 1.0) + gammaln(p * (alpha + 1.0) - 1.0) - gammaln(p * (n + alpha + 1.0))
    return math.exp(log_pth_power / p)


def phi_sup_norm(idx: IndexLike) -> float:
    """Supremum of |phi_{n,alpha}| over the closed right half-plane.

    For n >= 1 the maximum sits on the imaginary axis and equals
    (alpha+1)^{(alpha+1)/2} n^{n/2} / (n+alpha+1)^{(n+alpha+1)/2}.
    For n = 0 the modulus is bounded by 1 and approaches it as z -> 0, so the
    supremum is 1 (not attained in the interior).
    """
    idx = LaguerreIndex.of(idx)
    n, alpha = idx.n, idx.alpha
    if alpha <= -1.0:
        raise ValueError("phi_sup_norm requires alpha > -1")
    if n == 0:
        return 1.0
    a1 = alpha + 1.0
    log_max = 0.5 * (a1 * math.log(a1) + n * math.log(n) - (n + a1) * math.log(n + a1))
    return math.exp(log_max)
