"""Walk through conjugate orbits of small unitary matrices."""

from itertools import permutations

import numpy as np

from conjorbit import adjoint_witness, cuc, diag_in_orbit, random_conjugation, same_member
from conjorbit.cli import q9_basis
from conjorbit.numerics import haar_unitary, max_norm

U = haar_unitary(5, seed=7)
C = adjoint_witness(U)
print("C U C equals U* up to", f"{max_norm(cuc(C, U).matrix - U.conj().T):.2e}")

C1, C2 = random_conjugation(5, 1), random_conjugation(5, 2)
print("two random conjugations give the same member:", same_member(C1, C2, U))

xi = np.exp(1j * np.array([0.4, 1.7, 3.1]))
D = np.diag(xi)
print("\ndiagonal orderings of diag(xi) reached by some C D C:")
for p in permutations(range(3)):
    print(f"  {[k + 1 for k in p]}: {diag_in_orbit(D, p, labels=xi)}")

Q = q9_basis()
V = Q @ np.diag(xi) @ Q.conj().T
hits = [p for p in permutations(range(3)) if diag_in_orbit(V, p, labels=xi)]
print("\nthe explicit 3x3 eigenbasis admits", len(hits), "diagonal members")
