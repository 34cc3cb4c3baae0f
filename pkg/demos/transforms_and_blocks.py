"""Fourier and Hilbert transforms as diagonal models, then the real block model."""

import numpy as np

from conjorbit import adjoint_witness, complexify, transforms
from conjorbit.numerics import haar_unitary, max_norm

basis = transforms.hermite_basis(8)
FH = transforms.fourier_apply(basis.values)
res = basis.grid.norm(FH - basis.values * transforms.fourier_eigenvalues(8))
print("Hermite eigen residuals", np.array2string(res, precision=1))

G = transforms.hilbert_gram(-3, 3)
print(f"rational basis Gram defect {np.max(np.abs(G - np.eye(7))):.1e}")
ev = transforms.hilbert_eigenvalues(3)
member, C = transforms.sigma_diagonal_member(ev, transforms.hilbert_sigma(3))
print("index pairing returns the Hilbert eigenvalues:", np.array_equal(member, ev))

U = haar_unitary(4, seed=3)
C = adjoint_witness(U)
b = complexify.complexify_blocks(U, C)
print("\nblock relations", {k: f"{v:.1e}" for k, v in b.relation_residuals().items()})
Wb = complexify.wblock_generate(4, seed=5)
V = complexify.orbit_via_blocks(U, C, Wb)
print("orbit member spectrum is conj(spectrum of U):",
      np.allclose(np.sort_complex(np.linalg.eigvals(V)), np.sort_complex(np.conj(np.linalg.eigvals(U)))))
print(f"model fidelity {complexify.model_fidelity(U, C):.1e}, unitarity {max_norm(V @ V.conj().T - np.eye(4)):.1e}")
