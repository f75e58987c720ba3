"""Time integration of the semi-discrete Galerkin systems via their Volterra
reformulation in the leading-derivative unknown mu.

For family III, mu = xi_ttt and the kernel is a sum of nonnegative powers
{0, 1, 2, alpha} of (t - s); for families base and I, mu = D^{2+alpha} xi and
the exponent set is {alpha-1, alpha+1, 1, alpha} resp. {alpha-1, alpha+1, 1,
2 alpha-1}.  All kernels are sums of normalized powers p^g(u) = u^g/Gamma(g+1)
with g > -1, so one product-integration marcher covers every family: the
power kernel is integrated exactly against a piecewise interpolant of mu
(linear on the first cell, backward quadratic afterwards, third order on
smooth problems).  Nonlinear and variable-coefficient solves wrap the linear
marcher in a Picard fixed-point iteration with frozen coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .fractional import DomainError, TimeGrid
from .models import (
    Family,
    InitialData,
    ModelError,
    ModelSpec,
    ModelVariant,
    Nonlinearity,
    residual as model_residual,
    validate,
)
from .spectral import EigenBasis, SpectralField


class SolverBlowUpError(RuntimeError):
    """Non-finite values during marching; carries the offending node index."""

    def __init__(self, node: int):
        super().__init__(f"solution became non-finite at node {node}")
        self.node = node


def p_power(gamma_: float, t):
    """Normalized power p^g(t) = t^g / Gamma(g+1)."""
    t = np.asarray(t, dtype=float)
    if gamma_ == 0.0:
        return np.ones_like(t)
    with np.errstate(divide="ignore"):
        out = t**gamma_ / gamma_fn(gamma_ + 1.0)
    return out


@dataclass
class KernelTerm:
    """One kernel summand coeff * Op(t) applied to (p^exponent * mu)(t).

    kind 'diag' applies a per-mode diagonal; 'colloc' applies the collocation
    multiplier v -> P(sigma_n ⊙ E v); 'graddot' applies
    v -> P(sum_axis grad_w[axis]_n ⊙ G_axis v).
    """

    exponent: float
    kind: str
    coeff: float
    diag: np.ndarray | None = None
    grid_values: np.ndarray | None = None  # (N+1, Mgrid) for 'colloc'
    grad_values: list | None = None  # per-axis (N+1, Mgrid) for 'graddot'


@dataclass
class PowerKernelSum:
    """K(t,s) = sum of coeff_k Op_k(t) p^{g_k}(t-s); exponents all > -1."""

    terms: list

    def __post_init__(self):
        for t in self.terms:
            if t.exponent <= -1:
                raise DomainError(f"kernel exponent must exceed -1, got {t.exponent}")


@dataclass
class VolterraProblem:
    """lead * mu(t) + sum_k Op_k(t) (p^{g_k} * mu)(t) = forcing(t).

    forcing already contains the data terms; it is finite at every node
    (the singular p-power data contributions of the energy analysis never
    appear in these assembled systems: all data exponents are >= 0).
    """

    basis: EigenBasis
    grid: TimeGrid
    lead: float
    kernel: PowerKernelSum
    forcing: np.ndarray  # (N+1, modes)
    recon_exponents: tuple  # conv exponents for (psi, psi_t, psi_tt)
    xi0: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    spec: ModelSpec | None = None

    def kernel_apply(self, t: float, s: float, vec: np.ndarray, node: int = 0):
        """-(1/lead) sum_k Op_k(t)(p^{g_k}(t-s) vec): the resolvent-form kernel
        K(t, s) of the reformulated equation mu = f~ + int K mu, applied to a
        mode vector.  Exposed for verification."""
        out = np.zeros_like(vec)
        for term in self.kernel.terms:
            w = p_power(term.exponent, t - s)
            out += _apply_term(self, term, node, float(w) * vec)
        return -out / self.lead


def _apply_term(problem: VolterraProblem, term: KernelTerm, n: int, vec: np.ndarray):
    if term.kind == "diag":
        return term.coeff * term.diag * vec
    if term.kind == "colloc":
        E, P = problem.basis.eval_matrix(), problem.basis.proj_matrix()
        return term.coeff * (P @ (term.grid_values[n] * (E @ vec)))
    if term.kind == "graddot":
        P = problem.basis.proj_matrix()
        G = problem.basis.grad_matrices()
        acc = np.zeros(P.shape[1])
        for g_vals, Gmat in zip(term.grad_values, G):
            acc += g_vals[n] * (Gmat @ vec)
        return term.coeff * (P @ acc)
    raise ValueError(f"unknown kernel term kind {term.kind}")


# ---------------------------------------------------------------------------
# product-integration weights for p^g kernels


class _PIWeights:
    """Weights for int_0^{t_n} p^g(t_n - s) q(s) ds with q piecewise linear on
    the first cell and backward quadratic on interior cells."""

    def __init__(self, gamma_: float, n_steps: int, h: float):
        self.gamma = gamma_
        self.h = h
        g = gamma_
        scale = 1.0 / gamma_fn(g + 1.0)
        m = np.arange(n_steps + 2, dtype=float)

        def mom(r):
            # int_{mh}^{(m+1)h} u^{g+r} du, normalized
            q = m ** (g + r + 1.0)
            return scale * h ** (g + r + 1.0) * (q[1:] - q[:-1]) / (g + r + 1.0)

        M0, M1, M2 = mom(0), mom(1), mom(2)
        mm = np.arange(n_steps + 1, dtype=float)
        h2 = h * h
        # interior quadratic cells, lag index m = n-1-j
        self.W0 = (M2 - (2 * mm + 1) * h * M1 + mm * (mm + 1) * h2 * M0) / (2 * h2)
        self.W1 = -(M2 - (2 * mm + 2) * h * M1 + mm * (mm + 2) * h2 * M0) / h2
        self.W2 = (M2 - (2 * mm + 3) * h * M1 + (mm + 1) * (mm + 2) * h2 * M0) / (2 * h2)
        # first cell, linear in (mu_0, mu_1); row n uses lag m = n-1
        n_arr = np.arange(1, n_steps + 1, dtype=float)
        self.A1 = n_arr * M0[: n_steps] - M1[: n_steps] / h
        self.A0 = (1.0 - n_arr) * M0[: n_steps] + M1[: n_steps] / h

    def self_weight(self, n: int) -> float:
        return self.A1[0] if n == 1 else self.W2[0]

    def conv_known(self, mu: np.ndarray, n: int) -> np.ndarray:
        """Convolution at t_n using mu[0..n-1] only (mu_n slot excluded)."""
        out = self.A0[n - 1] * mu[0] + self.A1[n - 1] * mu[1] if n >= 2 else self.A0[0] * mu[0]
        if n >= 2:
            out = out + self.W0[n - 2 :: -1] @ mu[0 : n - 1]
            out = out + self.W1[n - 2 :: -1] @ mu[1:n]
            if n >= 3:
                out = out + self.W2[n - 2 : 0 : -1] @ mu[2:n]
        return out

    def conv_at(self, mu: np.ndarray, n: int) -> np.ndarray:
        """Full convolution at t_n including the mu_n contribution."""
        if n == 0:
            return np.zeros_like(mu[0])
        return self.conv_known(mu, n) + self.self_weight(n) * mu[n]

    def conv_all(self, mu: np.ndarray) -> np.ndarray:
        out = np.zeros_like(mu)
        for n in range(1, mu.shape[0]):
            out[n] = self.conv_at(mu, n)
        return out


# ---------------------------------------------------------------------------
# assembly


def _data_coeffs(data: InitialData):
    return data.psi0.coeffs, data.psi1.coeffs, data.psi2.coeffs


def _forcing_array(f, basis: EigenBasis, grid: TimeGrid) -> np.ndarray:
    """Accept None, a callable t -> SpectralField/array, or an (N+1, modes) array."""
    n1 = grid.steps + 1
    if f is None:
        return np.zeros((n1, basis.size))
    if callable(f):
        rows = []
        for t in grid.nodes:
            ft = f(t)
            rows.append(ft.coeffs if isinstance(ft, SpectralField) else np.asarray(ft))
        return np.array(rows, dtype=float)
    f = np.asarray(f, dtype=float)
    if f.shape != (n1, basis.size):
        raise DomainError(f"forcing must have shape {(n1, basis.size)}, got {f.shape}")
    return f


def _sigma_grid_values(basis, grid, sigma):
    """Validate sigma as an (N+1, Mgrid) collocation-value trajectory.

    The contract is grid values, never mode coefficients: the two shapes
    coincide at cutoff 1, so no dispatch-by-shape is possible.  Values must
    be finite (the analysis assumes a uniformly bounded coefficient).
    """
    if sigma is None:
        return None
    sigma = np.asarray(sigma, dtype=float)
    expected = (grid.steps + 1, basis.eval_matrix().shape[0])
    if sigma.shape != expected:
        raise DomainError(
            f"sigma must be collocation values of shape {expected}, got {sigma.shape}"
        )
    if not np.all(np.isfinite(sigma)):
        raise DomainError("sigma must be uniformly bounded (finite grid values)")
    return sigma


def assemble_fmgt3(
    spec: ModelSpec,
    data: InitialData,
    f=None,
    grid: TimeGrid = None,
    sigma: np.ndarray | None = None,
    grad_w: list | None = None,
    grad_data_term: np.ndarray | None = None,
) -> VolterraProblem:
    """Volterra problem for family III (integer-order leading term).

    tau mu + M_sigma(t)(p^0*mu) + c^2 K (p^2*mu) + tau c^2 K (p^1*mu)
          + delta K (p^a*mu) [+ 2 l~ G_w(t)(p^1*mu)] = F(t)
    with mu = xi_ttt and F(t) = f(t) - data terms.  At alpha = 1 the
    delta-term exponent merges into the linear-exponent family and the kernel
    is continuous.
    """
    if spec.family is not Family.III:
        raise ModelError("assemble_fmgt3 serves family iii")
    basis = data.basis
    lam = basis.eigenvalues
    p = spec.params
    a = spec.alpha
    xi0, xi1, xi2 = _data_coeffs(data)
    t = grid.nodes

    terms = [KernelTerm(0.0, "diag", 1.0, diag=np.ones(basis.size))]
    if a == 1.0:
        terms.append(KernelTerm(1.0, "diag", p.tau * p.c**2 + p.delta, diag=lam))
    else:
        terms.append(KernelTerm(1.0, "diag", p.tau * p.c**2, diag=lam))
        terms.append(KernelTerm(a, "diag", p.delta, diag=lam))
    terms.append(KernelTerm(2.0, "diag", p.c**2, diag=lam))

    # damping data: delta K I^a xi_tt -> delta p^a(t) xi2 for a < 1; the
    # a = 1 member is the true first derivative and also carries xi1
    # (right-sided discontinuity at integer order; psi1 = 0 restores
    # continuity, as in the limit propositions)
    if a == 1.0:
        delta_data = p.delta * lam[None, :] * (t[:, None] * xi2[None, :] + xi1[None, :])
    else:
        delta_data = p.delta * lam[None, :] * p_power(a, t)[:, None] * xi2[None, :]
    F = _forcing_array(f, basis, grid)
    F = F - (
        xi2[None, :]
        + p.c**2 * lam[None, :] * (xi0[None, :] + t[:, None] * xi1[None, :] + 0.5 * t[:, None] ** 2 * xi2[None, :])
        + p.tau * p.c**2 * lam[None, :] * (xi1[None, :] + t[:, None] * xi2[None, :])
        + delta_data
    )

    sig = _sigma_grid_values(basis, grid, sigma)
    if sig is not None:
        terms.append(KernelTerm(0.0, "colloc", 1.0, grid_values=sig))
        P = basis.proj_matrix()
        E = basis.eval_matrix()
        F = F - (sig * (xi2 @ E.T)) @ P.T
    if grad_w is not None:
        terms.append(KernelTerm(1.0, "graddot", 2.0 * spec.l_eff, grad_values=grad_w))
        F = F - grad_data_term

    return VolterraProblem(
        basis, grid, p.tau, PowerKernelSum(terms), F, (2.0, 1.0, 0.0), xi0, xi1, xi2, spec
    )


def assemble_fmgt1(
    spec: ModelSpec,
    data: InitialData,
    f=None,
    grid: TimeGrid = None,
    sigma: np.ndarray | None = None,
    grad_w: list | None = None,
    grad_data_term: np.ndarray | None = None,
) -> VolterraProblem:
    """Volterra problem for families base and I (fractional leading term).

    mu = D^{2+alpha} xi; reconstruction uses xi_tt = p^{a-1}*mu + xi2 etc.
    Family I damping contributes exponent 2 alpha - 1 with data p^a xi2;
    family base contributes exponent alpha with data p^1 xi2 + p^0 xi1.
    """
    if spec.family not in (Family.BASE, Family.I):
        raise ModelError("assemble_fmgt1 serves families base and i")
    a = spec.alpha
    if not (0.5 < a <= 1.0):
        raise ModelError(f"alpha must lie in (1/2, 1] for family {spec.family.value}")
    basis = data.basis
    lam = basis.eigenvalues
    p = spec.params
    xi0, xi1, xi2 = _data_coeffs(data)
    t = grid.nodes

    terms = [KernelTerm(a - 1.0, "diag", 1.0, diag=np.ones(basis.size))]
    terms.append(KernelTerm(a + 1.0, "diag", p.c**2, diag=lam))
    if spec.family is Family.I:
        if a == 1.0:
            terms.append(KernelTerm(1.0, "diag", p.tau * p.c**2 + p.delta, diag=lam))
            # order-1 damping is the true derivative: data carries xi1 too
            delta_data = (
                p.delta * lam[None, :] * (t[:, None] * xi2[None, :] + xi1[None, :])
            )
        else:
            terms.append(KernelTerm(1.0, "diag", p.tau**a * p.c**2, diag=lam))
            terms.append(KernelTerm(2.0 * a - 1.0, "diag", p.delta, diag=lam))
            delta_data = p.delta * lam[None, :] * p_power(a, t)[:, None] * xi2[None, :]
    else:
        if a == 1.0:
            terms.append(KernelTerm(1.0, "diag", p.tau * p.c**2 + p.delta, diag=lam))
        else:
            terms.append(KernelTerm(1.0, "diag", p.tau**a * p.c**2, diag=lam))
            terms.append(KernelTerm(a, "diag", p.delta, diag=lam))
        delta_data = (
            p.delta
            * lam[None, :]
            * (t[:, None] * xi2[None, :] + xi1[None, :])
        )

    F = _forcing_array(f, basis, grid)
    F = F - (
        xi2[None, :]
        + p.c**2
        * lam[None, :]
        * (
            p_power(2.0, t)[:, None] * xi2[None, :]
            + t[:, None] * xi1[None, :]
            + xi0[None, :]
        )
        + p.tau**a
        * p.c**2
        * lam[None, :]
        * (
            p_power(2.0 - a, t)[:, None] * xi2[None, :]
            + p_power(1.0 - a, t)[:, None] * xi1[None, :]
        )
        + delta_data
    )

    sig = _sigma_grid_values(basis, grid, sigma)
    if sig is not None:
        terms.append(KernelTerm(a - 1.0, "colloc", 1.0, grid_values=sig))
        P = basis.proj_matrix()
        E = basis.eval_matrix()
        F = F - (sig * (xi2 @ E.T)) @ P.T
    if grad_w is not None:
        terms.append(KernelTerm(a, "graddot", 2.0 * spec.l_eff, grad_values=grad_w))
        F = F - grad_data_term

    return VolterraProblem(
        basis, grid, p.tau**a, PowerKernelSum(terms), F, (a + 1.0, a, a - 1.0), xi0, xi1, xi2, spec
    )


# ---------------------------------------------------------------------------
# marching


@dataclass
class Trajectory:
    """Solution states on the grid: mu plus reconstructed (psi, psi_t, psi_tt),
    all as (N+1, modes) coefficient arrays in the basis's sorted mode order."""

    basis: EigenBasis
    grid: TimeGrid
    mu: np.ndarray
    psi: np.ndarray
    psi_t: np.ndarray
    psi_tt: np.ndarray
    spec: ModelSpec | None = None
    diagnostics: dict = field(default_factory=dict)

    def fields(self, n: int):
        return (
            SpectralField(self.basis, self.psi[n]),
            SpectralField(self.basis, self.psi_t[n]),
            SpectralField(self.basis, self.psi_tt[n]),
        )

    def residual(self, f=None) -> np.ndarray:
        if self.spec is None:
            raise ModelError("trajectory carries no model spec")
        farr = _forcing_array(f, self.basis, self.grid) if f is not None else None
        return model_residual(
            self.spec, self.basis, self.grid, self.psi, self.psi_t, self.psi_tt, farr
        )


def solve_mu(problem: VolterraProblem) -> np.ndarray:
    """March the mu equation; deterministic, unconditionally solvable since
    the diagonal block is lead + O(h^{1+min g})."""
    grid = problem.grid
    n_steps = grid.steps
    h = grid.h
    basis = problem.basis
    mu = np.zeros((n_steps + 1, basis.size))
    mu[0] = problem.forcing[0] / problem.lead

    weights = {}
    for term in problem.kernel.terms:
        if term.exponent not in weights:
            weights[term.exponent] = _PIWeights(term.exponent, n_steps, h)

    diag_terms = [t for t in problem.kernel.terms if t.kind == "diag"]
    other_terms = [t for t in problem.kernel.terms if t.kind != "diag"]

    # overflow is handled by the explicit non-finite check per node
    with np.errstate(over="ignore", invalid="ignore"):
        return _march(problem, mu, weights, diag_terms, other_terms, n_steps)


def _march(problem, mu, weights, diag_terms, other_terms, n_steps):
    basis = problem.basis
    for n in range(1, n_steps + 1):
        rhs = problem.forcing[n].copy()
        dcoef = np.full(basis.size, problem.lead)
        for term in diag_terms:
            w = weights[term.exponent]
            rhs -= term.coeff * term.diag * w.conv_known(mu, n)
            dcoef += term.coeff * term.diag * w.self_weight(n)
        sw_other = []
        for term in other_terms:
            w = weights[term.exponent]
            rhs -= _apply_term(problem, term, n, w.conv_known(mu, n))
            sw_other.append(w.self_weight(n))

        x = rhs / dcoef
        if other_terms:
            for _ in range(60):
                corr = np.zeros(basis.size)
                for term, sw in zip(other_terms, sw_other):
                    corr += _apply_term(problem, term, n, sw * x)
                x_new = (rhs - corr) / dcoef
                if np.max(np.abs(x_new - x)) <= 1e-14 * (1.0 + np.max(np.abs(x_new))):
                    x = x_new
                    break
                x = x_new
        if not np.all(np.isfinite(x)):
            raise SolverBlowUpError(n)
        mu[n] = x
    return mu


def reconstruct(problem: VolterraProblem, mu: np.ndarray) -> Trajectory:
    grid = problem.grid
    t = grid.nodes
    e_psi, e_psit, e_psitt = problem.recon_exponents
    n_steps = grid.steps
    conv = {
        e: _PIWeights(e, n_steps, grid.h).conv_all(mu) for e in {e_psi, e_psit, e_psitt}
    }
    xi0, xi1, xi2 = problem.xi0, problem.xi1, problem.xi2
    psi_tt = xi2[None, :] + conv[e_psitt]
    psi_t = xi1[None, :] + t[:, None] * xi2[None, :] + conv[e_psit]
    psi = (
        xi0[None, :]
        + t[:, None] * xi1[None, :]
        + 0.5 * t[:, None] ** 2 * xi2[None, :]
        + conv[e_psi]
    )
    return Trajectory(problem.basis, grid, mu, psi, psi_t, psi_tt, problem.spec)


def solve(problem: VolterraProblem) -> Trajectory:
    """Solve for mu and reconstruct the state trajectory."""
    return reconstruct(problem, solve_mu(problem))


def solve_linear(spec: ModelSpec, data: InitialData, grid: TimeGrid, f=None) -> Trajectory:
    """Linear solve for families base, I, III through the mu reformulation."""
    validate(spec)
    if spec.family is Family.II:
        raise ModelError("family ii linear solves are served by the memory solver")
    if spec.family is Family.III:
        problem = assemble_fmgt3(spec, data, f, grid)
    else:
        problem = assemble_fmgt1(spec, data, f, grid)
    return solve(problem)


# ---------------------------------------------------------------------------
# classical (alpha = 1) oracle


def classical_mgt_reference(
    spec: ModelSpec, data: InitialData, grid: TimeGrid, f=None, rtol=1e-12, atol=1e-14
) -> Trajectory:
    """Adaptive third-order-in-time integrator for the classical linear MGT
    system per mode (tau xi''' + xi'' + c^2 lam xi + (tau c^2 + delta) lam xi'
    = f), used as an independent oracle for alpha = 1 degeneration."""
    from scipy.integrate import solve_ivp

    basis = data.basis
    lam = basis.eigenvalues
    p = spec.params
    farr = _forcing_array(f, basis, grid)
    nodes = grid.nodes

    def f_interp(t):
        # linear interpolation of the forcing samples
        x = np.clip(t / grid.h, 0, grid.steps)
        i0 = min(int(np.floor(x)), grid.steps - 1)
        w = x - i0
        return (1 - w) * farr[i0] + w * farr[i0 + 1]

    m = basis.size

    def rhs(t, y):
        xi, xit, xitt = y[:m], y[m : 2 * m], y[2 * m :]
        xittt = (
            f_interp(t)
            - xitt
            - p.c**2 * lam * xi
            - (p.tau * p.c**2 + p.delta) * lam * xit
        ) / p.tau
        return np.concatenate([xit, xitt, xittt])

    y0 = np.concatenate([data.psi0.coeffs, data.psi1.coeffs, data.psi2.coeffs])
    sol = solve_ivp(
        rhs, (0.0, grid.horizon), y0, method="DOP853", t_eval=nodes, rtol=rtol, atol=atol
    )
    if not sol.success:
        raise SolverBlowUpError(grid.steps)
    y = sol.y.T
    mu = np.gradient(y[:, 2 * m :], grid.h, axis=0)
    return Trajectory(basis, grid, mu, y[:, :m], y[:, m : 2 * m], y[:, 2 * m :], spec)


# ---------------------------------------------------------------------------
# Picard iteration for nonlinear / variable-coefficient problems


@dataclass
class PicardResult:
    trajectory: Trajectory
    iterations: int
    distances: list
    contraction_ratio: float
    converged: bool


def _iterate_distance(basis, a, b) -> float:
    """Discrete W^{1,inf}(H^1) + W^{2,inf}(L^2) distance between trajectories."""
    lam = basis.eigenvalues
    d_psi = np.sqrt(np.max(np.sum(lam[None, :] * (a.psi - b.psi) ** 2, axis=1)))
    d_psit = np.sqrt(np.max(np.sum(lam[None, :] * (a.psi_t - b.psi_t) ** 2, axis=1)))
    d_psitt = np.sqrt(np.max(np.sum((a.psi_tt - b.psi_tt) ** 2, axis=1)))
    return d_psi + d_psit + d_psitt


def picard_nonlinear(
    spec: ModelSpec,
    data: InitialData,
    grid: TimeGrid,
    f=None,
    tol: float = 1e-10,
    max_iter: int = 25,
    ball_radius: float | None = None,
) -> PicardResult:
    """Fixed-point iteration w -> psi solving the frozen-coefficient linear
    problem with sigma = 2 k w_t (and the gradient term 2 l~ grad w . grad
    psi_t for Kuznetsov).  The initial guess is the linear solution, which
    lies inside the contraction ball for small data.  Raises if max_iter is
    exceeded: the iteration has left the contraction regime, so shrink the
    horizon or the data."""
    validate(spec)
    if spec.family is Family.II:
        raise ModelError("family ii admits linear solves only")
    if spec.nonlinearity is Nonlinearity.LINEAR:
        traj = solve_linear(spec, data, grid, f)
        return PicardResult(traj, 1, [0.0], 0.0, True)

    basis = data.basis
    k = spec.k_eff
    l = spec.l_eff
    E = basis.eval_matrix()
    assemble = assemble_fmgt3 if spec.family is Family.III else assemble_fmgt1

    current = solve_linear(
        ModelSpec(ModelVariant(spec.family, Nonlinearity.LINEAR), spec.params, spec.alpha),
        data,
        grid,
        f,
    )
    distances = []
    t = grid.nodes
    xi1, xi2 = data.psi1.coeffs, data.psi2.coeffs
    for it in range(1, max_iter + 1):
        sigma = 2.0 * k * (current.psi_t @ E.T) if k != 0.0 else None
        grad_w = None
        grad_data = None
        if l != 0.0:
            G = basis.grad_matrices()
            grad_w = [current.psi @ Gm.T for Gm in G]
            # data part of the gradient term: 2 l~ G_w(t)(xi1 + t xi2)
            P = basis.proj_matrix()
            lin = xi1[None, :] + t[:, None] * xi2[None, :]
            acc = np.zeros_like(grad_w[0])
            for gw, Gm in zip(grad_w, G):
                acc += gw * (lin @ Gm.T)
            grad_data = 2.0 * l * (acc @ P.T)
        problem = assemble(
            spec, data, f, grid, sigma=sigma, grad_w=grad_w, grad_data_term=grad_data
        )
        nxt = solve(problem)
        d = _iterate_distance(basis, nxt, current)
        distances.append(d)
        current = nxt
        if ball_radius is not None:
            size = np.sqrt(
                np.max(np.sum(basis.eigenvalues[None, :] ** 2 * nxt.psi_t**2, axis=1))
            )
            if size > ball_radius:
                raise SolverBlowUpError(grid.steps)
        if d < tol:
            ratios = [
                distances[i + 1] / distances[i]
                for i in range(len(distances) - 1)
                if distances[i] > 0
            ]
            ratio = float(np.exp(np.mean(np.log(ratios)))) if ratios else 0.0
            current.diagnostics["picard_iterations"] = it
            current.diagnostics["contraction_ratio"] = ratio
            return PicardResult(current, it, distances, ratio, True)
    raise ModelError(
        f"Picard iteration did not contract within {max_iter} iterations "
        f"(last update {distances[-1]:.3e}); decrease the horizon or the data"
    )


# ---------------------------------------------------------------------------
# direct L1 collocation (independent discretization, also the family-II
# cross-check partner)


def solve_direct_l1(spec: ModelSpec, data: InitialData, grid: TimeGrid, f=None) -> Trajectory:
    """Brute-force linear-PI/L1 discretization of the fractional-leading-term
    equation in the unknown w = psi_tt (families base, I, II; linear only).

    tau^a D^a w + w + c^2 K psi + tau^a c^2 K D^a psi + delta K damp = f with
    psi, D^a psi, damp reconstructed from w by classical piecewise-linear
    product integration and D^a w by the L1 scheme: a genuinely different
    algorithm from both the quadratic-PI mu marcher and the z-form stepper.
    """
    if spec.nonlinearity is not Nonlinearity.LINEAR:
        raise ModelError("direct L1 solver covers linear models only")
    if spec.family is Family.III:
        raise ModelError("direct L1 solver covers the fractional-leading families")
    a = spec.alpha
    basis = data.basis
    lam = basis.eigenvalues
    p = spec.params
    h = grid.h
    n_steps = grid.steps
    t = grid.nodes
    xi0, xi1, xi2 = _data_coeffs(data)
    farr = _forcing_array(f, basis, grid)

    from .fractional import l1_weights, power_weights_linear

    # linear-PI weights for I^2, I^{2-a}, and the damping integral
    def pi_pack(order):
        c0, d = power_weights_linear(order - 1.0, n_steps, h)
        return c0 / gamma_fn(order), d / gamma_fn(order)

    c0_2, d_2 = pi_pack(2.0)
    c0_2a, d_2a = pi_pack(2.0 - a) if a < 1.0 else pi_pack(1.0)
    c0_1, d_1 = pi_pack(1.0)
    if spec.family is Family.I and a < 1.0:
        c0_d, d_d = pi_pack(a)
    elif spec.family is Family.II and a < 1.0:
        c0_d, d_d = c0_2a, d_2a  # D^a psi, shared with the stiffness term
    else:
        c0_d, d_d = c0_1, d_1  # psi_t (base) or any family at alpha = 1

    b = l1_weights(a, n_steps, h) if a < 1.0 else None
    l1_scale = h ** (-a) / gamma_fn(2.0 - a) if a < 1.0 else None

    w = np.zeros((n_steps + 1, basis.size))
    w[0] = xi2

    def hist(c0, d, n):
        return c0[n] * w[0] + d[n - 1 : 0 : -1].T @ w[1:n] if n >= 2 else c0[n] * w[0]

    for n in range(1, n_steps + 1):
        tn = t[n]
        # I^2 w history (for psi) and I^{2-a} w (for D^a psi), I^1 w (psi_t)
        h_2 = hist(c0_2, d_2, n)
        h_2a = hist(c0_2a, d_2a, n)
        h_1 = hist(c0_1, d_1, n)
        h_d = hist(c0_d, d_d, n)

        psi_part = xi0 + tn * xi1 + h_2
        if a < 1.0:
            dapsi_part = p_power(1.0 - a, tn) * xi1 + h_2a
        else:
            dapsi_part = xi1 + h_1
        if spec.family is Family.I and a < 1.0:
            damp_part = h_d  # I^a w = D^{2-a} psi
        elif spec.family is Family.II and a < 1.0:
            damp_part = dapsi_part
        else:
            damp_part = xi1 + h_d  # psi_t

        if a < 1.0:
            l1_hist = -b[n - 1] * w[0]
            if n >= 2:
                l1_hist = l1_hist - (b[n - 2 :: -1] - b[n - 1 : 0 : -1]).T @ w[1:n]
            lead_known = p.tau**a * l1_scale * l1_hist
            lead_self = p.tau**a * l1_scale * b[0]
        else:
            # alpha = 1: backward difference for w'
            lead_known = -p.tau * w[n - 1] / h
            lead_self = p.tau / h

        rhs = (
            farr[n]
            - lead_known
            - p.c**2 * lam * psi_part
            - p.tau**a * p.c**2 * lam * dapsi_part
            - p.delta * lam * damp_part
        )
        dcoef = (
            lead_self
            + 1.0
            + p.c**2 * lam * d_2[0]
            + p.tau**a * p.c**2 * lam * (d_2a[0] if a < 1.0 else d_1[0])
            + p.delta * lam * d_d[0]
        )
        w[n] = rhs / dcoef
        if not np.all(np.isfinite(w[n])):
            raise SolverBlowUpError(n)

    # reconstruct psi and psi_t with the same linear-PI weights
    conv2 = np.zeros_like(w)
    conv1 = np.zeros_like(w)
    for n in range(1, n_steps + 1):
        conv2[n] = hist(c0_2, d_2, n) + d_2[0] * w[n]
        conv1[n] = hist(c0_1, d_1, n) + d_1[0] * w[n]
    psi = xi0[None, :] + t[:, None] * xi1[None, :] + conv2
    psi_t = xi1[None, :] + conv1
    mu = np.gradient(w, h, axis=0)
    return Trajectory(basis, grid, mu, psi, psi_t, w, spec)
