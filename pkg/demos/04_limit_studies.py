"""How fast do fractional solutions approach the classical one as a -> 1?

With psi1 = 0 the type-III solutions converge in W^{1,inf}(H^1) and
W^{2,inf}(L^2) with difference norms shrinking linearly in (1 - alpha);
the type-II model converges through its memory form, with the uniform-in-
time velocity column valid only for psi0 = 0 (the kernel difference
k_a - k_1 is unbounded at t = 0, so for psi0 != 0 the study flags it).
"""
import numpy as np

from fmgt import Domain, EigenBasis, TimeGrid
from fmgt.analysis import limit_study
from fmgt.models import Family, InitialData, MediumParams, ModelVariant, Nonlinearity
from fmgt.spectral import SpectralField

print(__doc__)

basis = EigenBasis(Domain.interval(1.0), 4)
bump = basis.project(lambda x: x * (1 - x))
psi0 = SpectralField(basis, 1e-2 * bump.coeffs / np.max(np.abs(bump.coeffs)))
grid = TimeGrid(1.0, 256)
alphas = [0.6, 0.8, 0.9, 0.95, 0.99]

data3 = InitialData(psi0, basis.zero_field(), SpectralField(basis, -0.5 * psi0.coeffs))
s3 = limit_study(
    ModelVariant(Family.III, Nonlinearity.WESTERVELT), MediumParams(k=0.1),
    data3, grid, alphas,
)
print("type III (Westervelt, k = 0.1):")
print(f"  {'alpha':>6} {'W1inf(H1)':>12} {'W2inf(L2)':>12}")
for i, a in enumerate(s3.alphas):
    print(f"  {a:>6} {s3.columns['W1inf_H1'][i]:>12.3e} {s3.columns['W2inf_L2'][i]:>12.3e}")
print(f"  log-log slopes vs (1-alpha): "
      f"{s3.slopes['W1inf_H1']:.2f}, {s3.slopes['W2inf_L2']:.2f}")

data2 = InitialData(psi0, basis.zero_field(), basis.zero_field())
s2 = limit_study(
    ModelVariant(Family.II, Nonlinearity.LINEAR), MediumParams(), data2, grid, alphas
)
print("\ntype II (linear, memory form), psi0 != 0:")
print(f"  {'alpha':>6} {'Linf(H1)':>12} {'W1,4(L2)':>12} {'W1inf(L2)':>12}")
for i, a in enumerate(s2.alphas):
    print(
        f"  {a:>6} {s2.columns['Linf_H1'][i]:>12.3e} "
        f"{s2.columns['W1p4_L2'][i]:>12.3e} {s2.columns['W1inf_L2'][i]:>12.3e}"
    )
for col, note in s2.flags.items():
    print(f"  flag on {col}: {note}")
