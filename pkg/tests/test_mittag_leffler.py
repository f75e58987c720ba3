"""Mittag-Leffler function and relaxation kernel tests.

High-precision reference values were produced with an mpmath series oracle
(exact rational gamma arguments, adaptive precision; see oracle below) and
frozen into the assertions.
"""
import math

import numpy as np
import pytest

from fmgt import DomainError, RelaxationKernel, kernel_mass, kernel_value, ml
from fmgt.mittag_leffler import kernel_cell_moments

mpmath = pytest.importorskip("mpmath")


def ml_oracle(a: float, b: float, x: float) -> float:
    """Adaptive-precision series; the gamma argument is kept in mpf arithmetic
    (rounding it to double poisons the sum for small a)."""
    xa = abs(x) ** (1.0 / a)
    dps = 60 + int(0.6 * xa)
    kmax = int(8 * xa / a) + 400
    with mpmath.workdps(dps):
        s = mpmath.mpf(0)
        xm, am, bm = mpmath.mpf(x), mpmath.mpf(a), mpmath.mpf(b)
        for k in range(kmax):
            t = xm**k / mpmath.gamma(am * k + bm)
            s += t
            if k > 2 * xa / a and abs(t) < mpmath.mpf(10) ** (-dps):
                break
        return float(s)


class TestMl:
    def test_exponential_case(self):
        xs = np.linspace(-50, 0, 101)
        for x in xs:
            assert ml(1.0, 1.0, x) == pytest.approx(math.exp(x), rel=1e-12)

    def test_e12_closed_form(self):
        for x in np.linspace(-50, -0.5, 25):
            assert ml(1.0, 2.0, x) == pytest.approx(math.expm1(x) / x, rel=1e-12)

    def test_series_constant_term(self):
        assert ml(0.6, 0.6, 0.0) == pytest.approx(1 / math.gamma(0.6), rel=1e-14)

    def test_half_order_erfc_identity(self):
        # E_{1/2,1}(-x) = e^{x^2} erfc(x); frozen: e*erfc(1) at x = 1
        assert ml(0.5, 1.0, -1.0) == pytest.approx(0.42758357615580700441, rel=1e-12)
        for x in np.linspace(0.0, 3.0, 31):
            ref = math.exp(x * x) * math.erfc(x)
            assert ml(0.5, 1.0, -x) == pytest.approx(ref, rel=1e-9)

    def test_beta_recurrence_value(self):
        # E_{1/2,1/2}(-1) = 1/sqrt(pi) - e erfc(1)
        assert ml(0.5, 0.5, -1.0) == pytest.approx(0.13660600739194928254, rel=1e-12)

    @pytest.mark.parametrize(
        "a,b,x",
        [
            (0.5, 1.0, -3.0),
            (0.5, 1.0, -10.0),
            (0.3, 1.0, -4.0),
            (0.3, 0.3, -2.0),
            (0.7, 0.7, -6.0),
            (0.9, 1.0, -63.0957),
            (0.5, 0.5, -25.0),
            (0.8, 2.0, -7.0),
            (0.5, 2.0, -30.0),
            (0.3, 2.0, -8.0),
            (0.95, 0.95, -4.5),
            (0.4, 1.0, -5.0),
        ],
    )
    def test_against_series_oracle(self, a, b, x):
        assert ml(a, b, x) == pytest.approx(ml_oracle(a, b, x), rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ml(0.5, 1.0, 0.5)
        with pytest.raises(DomainError):
            ml(0.0, 1.0, -1.0)
        with pytest.raises(DomainError):
            ml(1.2, 1.0, -1.0)
        with pytest.raises(DomainError):
            ml(0.5, 0.0, -1.0)


class TestRelaxationKernel:
    def test_exponential_at_order_one(self):
        k = RelaxationKernel(order=1.0, tau=0.5)
        assert kernel_value(k, 1.0) == pytest.approx(2 * math.exp(-2.0), rel=1e-12)

    def test_blowup_at_origin(self):
        k = RelaxationKernel(order=0.5, tau=1.0)
        ts = np.array([0.1, 0.01, 0.001, 1e-4, 1e-5])
        vals = kernel_value(k, ts)
        assert np.all(np.diff(vals) > 0)  # grows monotonically as t -> 0
        assert vals[-1] > 50.0

    def test_value_composed_from_ml(self):
        # tau^-0.7 * 1^{-0.3} * E_{0.7,0.7}(-1); frozen oracle value
        k = RelaxationKernel(order=0.7, tau=1.0)
        assert kernel_value(k, 1.0) == pytest.approx(0.2103933463890237074, rel=1e-11)

    @pytest.mark.parametrize("order", [0.3, 0.5, 0.7, 0.9, 1.0])
    def test_nonnegative_and_nonincreasing(self, order):
        k = RelaxationKernel(order=order, tau=1.0)
        ts = np.logspace(-4, 2, 60)
        vals = kernel_value(k, ts)
        assert np.all(vals >= 0)
        assert np.all(np.diff(vals) <= 1e-15)

    def test_mass_closed_form_vs_quadrature(self):
        from scipy.integrate import quad

        k = RelaxationKernel(order=0.5, tau=1.0)
        closed = kernel_mass(k, 4.0)
        # split off the t^{a-1} singularity as an algebraic quadrature weight;
        # the remaining factor extends continuously to t = 0
        smooth = lambda t: ml(0.5, 0.5, -(t**0.5)) if t > 0 else 1 / math.gamma(0.5)
        val, _ = quad(
            smooth,
            0.0,
            4.0,
            weight="alg",
            wvar=(-0.5, 0),
            epsabs=1e-10,
            epsrel=1e-10,
            limit=200,
        )
        assert abs(closed - val) < 1e-6

    def test_mass_limits(self):
        k1 = RelaxationKernel(order=1.0, tau=1.0)
        assert kernel_mass(k1, 50.0) == pytest.approx(1.0, abs=1e-12)
        assert kernel_mass(k1, 0.0) == 0.0
        # algebraic tail: mass(100) for order 1/2 is NOT within 1e-3 of 1;
        # frozen closed form 1 - e^100 erfc(10)
        k2 = RelaxationKernel(order=0.5, tau=1.0)
        assert kernel_mass(k2, 100.0) == pytest.approx(0.94385900725617741414, rel=1e-10)

    def test_mass_monotone_bounded(self):
        k = RelaxationKernel(order=0.7, tau=0.8)
        masses = [kernel_mass(k, T) for T in (0.5, 1.0, 2.0, 5.0, 20.0)]
        assert all(m2 > m1 for m1, m2 in zip(masses, masses[1:]))
        assert all(0 <= m <= 1 for m in masses)

    @pytest.mark.parametrize("order", [0.3, 0.5, 0.7, 0.9])
    def test_gram_matrix_positive_semidefinite(self, order):
        # symmetric Toeplitz matrix of exact cell masses: numerical face of
        # complete monotonicity (Schoenberg); no eigenvalue below -eps
        k = RelaxationKernel(order=order, tau=1.0)
        m0, _ = kernel_cell_moments(k, h=0.05, n_cells=40)
        gram = np.empty((40, 40))
        for i in range(40):
            for j in range(40):
                gram[i, j] = m0[abs(i - j)]
        eig = np.linalg.eigvalsh(gram)
        assert eig.min() >= -1e-10

    def test_cell_moments_consistency(self):
        # m0 sums telescope to the closed-form mass; m1 matches quadrature
        from scipy.integrate import quad

        k = RelaxationKernel(order=0.6, tau=1.0)
        m0, m1 = kernel_cell_moments(k, h=0.25, n_cells=8)
        assert m0.sum() == pytest.approx(kernel_mass(k, 2.0), rel=1e-12)
        ref, _ = quad(lambda u: u * kernel_value(k, u), 0.25, 0.5, epsrel=1e-12)
        assert m1[1] == pytest.approx(ref, rel=1e-9)

    def test_invalid_construction(self):
        with pytest.raises(DomainError):
            RelaxationKernel(order=0.0, tau=1.0)
        with pytest.raises(DomainError):
            RelaxationKernel(order=0.5, tau=0.0)
        k = RelaxationKernel(order=0.5, tau=1.0)
        with pytest.raises(DomainError):
            kernel_value(k, 0.0)
