"""Two-parameter Mittag-Leffler functions on the non-positive real axis and
the relaxation kernels they generate.

E_{a,b}(x) for a in (0,1], b > 0, x <= 0 is evaluated by a compensated power
series while the terms are small enough for full double-precision accuracy,
and otherwise by the real-axis integral representation (the series is entire
but loses ~log10(max|term|/|sum|) digits to cancellation, so the switch is
driven by a running cancellation estimate, not by |x| alone).  b > 1 is
reduced to b <= 1 with the recurrence E_{a,b}(x) = 1/Gamma(b) + x E_{a,b+a}(x)
before integrating; on the negative axis this direction is stable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .fractional import DomainError

# ml() targets this relative accuracy on the supported domain.
ML_RTOL = 1e-10
_SERIES_MAX_TERMS = 200
_SERIES_TRY_LIMIT = 5.0  # try the series first for |x| at or below this


def _ml_series(alpha: float, beta: float, x: float):
    """Kahan-summed power series; returns (value, cancellation_ok).

    The ok flag estimates the digits lost to cancellation: each term carries
    a relative rounding noise amplified by psi(arg)*arg from the rounding of
    the gamma argument, and that noise scales with the largest term.
    """
    total = 1.0 / gamma_fn(beta)
    comp = 0.0
    max_abs = abs(total)
    arg_at_max = beta
    term_pow = 1.0
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term_pow *= x
        arg = alpha * k + beta
        term = term_pow / gamma_fn(arg)
        if abs(term) > max_abs:
            max_abs = abs(term)
            arg_at_max = arg
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) <= 1e-17 * max(abs(total), 1e-300):
            noise_eps = 2.5e-16 * max(4.0, arg_at_max * np.log(arg_at_max + 1.0))
            cancel = max_abs * noise_eps / max(abs(total), 1e-300)
            return total, cancel < 0.5 * ML_RTOL
    return total, False


def _ml_integral(alpha: float, beta: float, x: float) -> float:
    """Real-axis integral representation, valid for 0 < alpha < 1, x < 0.

    E_{a,b}(x) = int_0^inf K(r) dr with
    K(r) = (1/(pi*a)) r^{(1-b)/a} e^{-r^{1/a}}
           [r sin(pi(1-b)) - x sin(pi(1-b+a))] / (r^2 - 2 r x cos(pi a) + x^2)
    """
    if beta > 1.0 + 1e-12:
        # reduce to beta' <= 1; stable since E_{a,b'}(x) stays O(1) and x < 0
        return (_ml_integral(alpha, beta - alpha, x) - 1.0 / gamma_fn(beta - alpha)) / x

    sin_b = np.sin(np.pi * (1 - beta))
    sin_ab = np.sin(np.pi * (1 - beta + alpha))
    cos_a = np.cos(np.pi * alpha)
    pref = 1.0 / (np.pi * alpha)
    expo = (1.0 - beta) / alpha

    def integrand(r):
        num = r * sin_b - x * sin_ab
        den = r * r - 2.0 * r * x * cos_a + x * x
        return pref * r**expo * np.exp(-(r ** (1.0 / alpha))) * num / den

    # integrand decays like exp(-r^{1/a}); split at the decay scale
    r_split = max(1.0, (-x) ** alpha)
    val1, _ = quad(integrand, 0.0, r_split, epsabs=1e-14, epsrel=1e-12, limit=200)
    val2, _ = quad(integrand, r_split, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val1 + val2


def ml(alpha: float, beta: float, x: float) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(x), x <= 0."""
    if not (0 < alpha <= 1):
        raise DomainError(f"first parameter must lie in (0, 1], got {alpha}")
    if not (beta > 0):
        raise DomainError(f"second parameter must be positive, got {beta}")
    if x > 0:
        raise DomainError(f"only the non-positive real axis is supported, got x={x}")
    x = float(x)
    if x == 0.0:
        return 1.0 / gamma_fn(beta)
    if alpha == 1.0:
        if beta == 1.0:
            return float(np.exp(x))
        if beta == 2.0:
            return float(np.expm1(x) / x)
        # generic beta: fall through to series/integral below

    if abs(x) <= _SERIES_TRY_LIMIT:
        value, ok = _ml_series(alpha, beta, x)
        if ok:
            return value
    if alpha == 1.0:
        # integral representation degenerates at alpha = 1; closed forms above
        # cover beta in {1, 2}, the only production uses
        raise DomainError(
            "alpha = 1 with large |x| is supported only for beta in {1, 2}"
        )
    return _ml_integral(alpha, beta, x)


@dataclass(frozen=True)
class RelaxationKernel:
    """Relaxation kernel tau^{-g} t^{g-1} E_{g,g}(-(t/tau)^g), g in (0, 1].

    Nonnegative, nonincreasing, unit total mass; reduces to the exponential
    exp(-t/tau)/tau at g = 1.  Diverges at t -> 0+ for g < 1, so it must be
    integrated with product rules, never sampled at 0.
    """

    order: float
    tau: float

    def __post_init__(self):
        if not (0 < self.order <= 1):
            raise DomainError(f"kernel order must lie in (0, 1], got {self.order}")
        if not (self.tau > 0):
            raise DomainError(f"relaxation time must be positive, got {self.tau}")


def kernel_value(kernel: RelaxationKernel, t) -> np.ndarray | float:
    """Pointwise kernel value at t > 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("kernel is evaluated for t > 0 only")
    g, tau = kernel.order, kernel.tau
    vals = np.array(
        [
            tau ** (-g) * ti ** (g - 1.0) * ml(g, g, -((ti / tau) ** g))
            for ti in np.atleast_1d(t_arr)
        ]
    )
    return float(vals[0]) if t_arr.ndim == 0 else vals.reshape(t_arr.shape)


def kernel_mass(kernel: RelaxationKernel, horizon: float) -> float:
    """Closed-form cumulative mass int_0^T kernel = 1 - E_{g,1}(-(T/tau)^g)."""
    if horizon < 0:
        raise DomainError("horizon must be nonnegative")
    if horizon == 0:
        return 0.0
    g, tau = kernel.order, kernel.tau
    return 1.0 - ml(g, 1.0, -((horizon / tau) ** g))


def kernel_cell_moments(kernel: RelaxationKernel, h: float, n_cells: int):
    """Exact moments of the kernel over grid cells [kh, (k+1)h].

    Returns (m0, m1) with m0[k] = int k(u) du and m1[k] = int u k(u) du over
    the k-th cell, both in closed form:
        m0[k] = E(kh) - E((k+1)h)             with E(t) = E_{g,1}(-(t/tau)^g)
        m1[k] = a E(a) - b E(b) + b E2(b) - a E2(a)
    where E2(t) = t E_{g,2}(-(t/tau)^g) is the running integral of E.
    """
    g, tau = kernel.order, kernel.tau
    edges = np.arange(n_cells + 1) * h
    e1 = np.array([ml(g, 1.0, -((t / tau) ** g)) if t > 0 else 1.0 for t in edges])
    e2 = np.array([t * ml(g, 2.0, -((t / tau) ** g)) if t > 0 else 0.0 for t in edges])
    m0 = e1[:-1] - e1[1:]
    # int_a^b u k(u) du = [ -u E(u) ]_a^b + int_a^b E(u) du
    m1 = edges[:-1] * e1[:-1] - edges[1:] * e1[1:] + e2[1:] - e2[:-1]
    return m0, m1
