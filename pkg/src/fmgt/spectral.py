"""Dirichlet-Laplacian eigenbases on intervals and rectangles.

Interval modes are sqrt(2/L) sin(j pi x / L) with eigenvalues (j pi / L)^2;
rectangles take tensor products with eigenvalue sums.  The basis is
L2-orthonormal, so the mass matrix is the identity and the stiffness matrix
is the diagonal of eigenvalues.  Nonlinear terms are formed by collocation
on a 2x-oversampled interior sine grid, which dealiases quadratic products
exactly (modes above the cutoff produced by a product either fall below the
transform's Nyquist index or vanish on the grid).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fractional import DomainError


@dataclass(frozen=True)
class Domain:
    """Open box (0, L1) x ... in one or two dimensions, lengths in meters."""

    lengths: tuple

    def __post_init__(self):
        if len(self.lengths) not in (1, 2):
            raise DomainError("only 1-D intervals and 2-D rectangles are supported")
        if any(not (L > 0) for L in self.lengths):
            raise DomainError(f"domain lengths must be positive, got {self.lengths}")

    @classmethod
    def interval(cls, length: float) -> "Domain":
        return cls((float(length),))

    @classmethod
    def rectangle(cls, lx: float, ly: float) -> "Domain":
        return cls((float(lx), float(ly)))

    @property
    def ndim(self) -> int:
        return len(self.lengths)


class EigenBasis:
    """Truncated Dirichlet sine basis with collocation transforms.

    Eigenvalues are stored sorted ascending with a map back to per-axis mode
    indices.  All transform matrices are built once and never mutated, so one
    basis may be shared between concurrent solves.
    """

    def __init__(self, domain: Domain, cutoff):
        self.domain = domain
        if np.isscalar(cutoff):
            cutoff = (int(cutoff),) * domain.ndim
        if len(cutoff) != domain.ndim or any(m < 1 for m in cutoff):
            raise DomainError(f"bad mode cutoff {cutoff}")
        self.cutoff = tuple(int(m) for m in cutoff)

        self._eval_mats = []
        self._deriv_mats = []
        self._proj_mats = []
        axis_lams = []
        for L, m in zip(domain.lengths, self.cutoff):
            M = 2 * m  # collocation refinement: interior nodes i*L/M, i=1..M-1
            i = np.arange(1, M)[:, None]
            j = np.arange(1, m + 1)[None, :]
            E = np.sqrt(2.0 / L) * np.sin(np.pi * i * j / M)
            D = np.sqrt(2.0 / L) * (np.pi * j / L) * np.cos(np.pi * i * j / M)
            self._eval_mats.append(E)
            self._deriv_mats.append(D)
            self._proj_mats.append((L / M) * E.T)
            axis_lams.append((np.pi * j[0] / L) ** 2)

        if domain.ndim == 1:
            lams = axis_lams[0]
            pairs = [(j,) for j in range(1, self.cutoff[0] + 1)]
        else:
            lx, ly = axis_lams
            lams = (lx[:, None] + ly[None, :]).ravel()
            pairs = [
                (j, k)
                for j in range(1, self.cutoff[0] + 1)
                for k in range(1, self.cutoff[1] + 1)
            ]
        order = np.lexsort((np.arange(lams.size), lams))
        self.eigenvalues = lams[order]
        self.mode_index_map = [pairs[p] for p in order]
        self._tensor_pos = order  # sorted slot -> C-order tensor slot
        self._inv_pos = np.argsort(order)

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def collocation_points(self):
        """Interior collocation nodes, one array per axis."""
        pts = []
        for L, m in zip(self.domain.lengths, self.cutoff):
            M = 2 * m
            pts.append(np.arange(1, M) * (L / M))
        return pts

    def _to_tensor(self, coeffs: np.ndarray) -> np.ndarray:
        t = np.empty(self.size)
        t[self._tensor_pos] = coeffs
        return t.reshape(self.cutoff)

    def _from_tensor(self, tensor: np.ndarray) -> np.ndarray:
        return tensor.ravel()[self._tensor_pos]

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        """Field values on the collocation grid."""
        t = self._to_tensor(coeffs)
        if self.domain.ndim == 1:
            return self._eval_mats[0] @ t
        return self._eval_mats[0] @ t @ self._eval_mats[1].T

    def evaluate_grad(self, coeffs: np.ndarray):
        """Per-axis partial derivatives on the collocation grid."""
        t = self._to_tensor(coeffs)
        if self.domain.ndim == 1:
            return [self._deriv_mats[0] @ t]
        return [
            self._deriv_mats[0] @ t @ self._eval_mats[1].T,
            self._eval_mats[0] @ t @ self._deriv_mats[1].T,
        ]

    def project_values(self, grid_values: np.ndarray) -> np.ndarray:
        """L2 projection of collocation-grid values onto the basis."""
        if self.domain.ndim == 1:
            t = self._proj_mats[0] @ grid_values
        else:
            t = self._proj_mats[0] @ grid_values @ self._proj_mats[1].T
        return self._from_tensor(t)

    def eval_matrix(self) -> np.ndarray:
        """Dense (grid points, modes) evaluation matrix, sorted mode order."""
        if "_emat" not in self.__dict__:
            if self.domain.ndim == 1:
                E = self._eval_mats[0]
            else:
                E = np.kron(self._eval_mats[0], self._eval_mats[1])
            self._emat = E[:, self._tensor_pos]
        return self._emat

    def proj_matrix(self) -> np.ndarray:
        """Dense (modes, grid points) projection matrix, sorted mode order."""
        if "_pmat" not in self.__dict__:
            if self.domain.ndim == 1:
                P = self._proj_mats[0]
            else:
                P = np.kron(self._proj_mats[0], self._proj_mats[1])
            self._pmat = P[self._tensor_pos, :]
        return self._pmat

    def grad_matrices(self):
        """Per-axis dense (grid points, modes) derivative evaluation matrices."""
        if "_gmats" not in self.__dict__:
            if self.domain.ndim == 1:
                self._gmats = [self._deriv_mats[0][:, self._tensor_pos]]
            else:
                gx = np.kron(self._deriv_mats[0], self._eval_mats[1])
                gy = np.kron(self._eval_mats[0], self._deriv_mats[1])
                self._gmats = [g[:, self._tensor_pos] for g in (gx, gy)]
        return self._gmats

    def project(self, f, oversample: int = 16) -> "SpectralField":
        """Project a pointwise function; exact on band-limited inputs.

        General (non-band-limited) inputs alias under the working 2x grid, so
        function projection uses a finer quadrature grid; the transforms are
        cached per oversampling factor.
        """
        mats, pts = self._fine_quadrature(oversample)
        if self.domain.ndim == 1:
            t = mats[0] @ np.asarray(f(pts[0]), dtype=float)
        else:
            X, Y = np.meshgrid(pts[0], pts[1], indexing="ij")
            t = mats[0] @ np.asarray(f(X, Y), dtype=float) @ mats[1].T
        return SpectralField(self, self._from_tensor(t))

    def _fine_quadrature(self, oversample: int):
        cache = self.__dict__.setdefault("_fine_cache", {})
        if oversample not in cache:
            mats, pts = [], []
            for L, m in zip(self.domain.lengths, self.cutoff):
                M = oversample * 2 * m
                i = np.arange(1, M)[:, None]
                j = np.arange(1, m + 1)[None, :]
                E = np.sqrt(2.0 / L) * np.sin(np.pi * i * j / M)
                mats.append((L / M) * E.T)
                pts.append(np.arange(1, M) * (L / M))
            cache[oversample] = (mats, pts)
        return cache[oversample]

    def unit_mode(self, index: int, amplitude: float = 1.0) -> "SpectralField":
        c = np.zeros(self.size)
        c[index] = amplitude
        return SpectralField(self, c)

    def zero_field(self) -> "SpectralField":
        return SpectralField(self, np.zeros(self.size))


@dataclass
class SpectralField:
    """Coefficients of a field in a shared eigenbasis (sorted-mode order)."""

    basis: EigenBasis
    coeffs: np.ndarray = field(default=None)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise DomainError(
                f"expected {self.basis.size} coefficients, got {self.coeffs.shape}"
            )

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float):
        return SpectralField(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _check(self, other):
        if other.basis is not self.basis:
            raise DomainError("fields must share one basis")


def laplacian_apply(u: SpectralField) -> SpectralField:
    """Laplacian in mode space: c_i -> -lambda_i c_i."""
    return SpectralField(u.basis, -u.basis.eigenvalues * u.coeffs)


def sobolev_norm(u: SpectralField, m: int) -> float:
    """Spectral Sobolev seminorm (sum lambda^m c^2)^(1/2) for m in 0..3.

    m = 0 is the L2 norm, 1 the gradient norm, 2 the Laplacian norm, and
    3 the gradient-of-Laplacian norm.
    """
    if m not in (0, 1, 2, 3):
        raise DomainError(f"Sobolev order must be one of 0..3, got {m}")
    return float(np.sqrt(np.sum(u.basis.eigenvalues**m * u.coeffs**2)))


def pointwise_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Dealiased collocation product projected back to the cutoff."""
    u._check(v)
    vals = u.basis.evaluate(u.coeffs) * v.basis.evaluate(v.coeffs)
    return SpectralField(u.basis, u.basis.project_values(vals))


def gradient_dot(u: SpectralField, v: SpectralField) -> SpectralField:
    """Collocation evaluation of grad(u) . grad(v), projected to the basis."""
    u._check(v)
    gu = u.basis.evaluate_grad(u.coeffs)
    gv = v.basis.evaluate_grad(v.coeffs)
    vals = sum(a * b for a, b in zip(gu, gv))
    return SpectralField(u.basis, u.basis.project_values(vals))
