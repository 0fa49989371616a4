"""At alpha = 0 the profiles are Gaussians with a kernel of dimension N - 1.

Prints the lowest eigenvalues of the Kirchhoff T1 operator and checks that
the equivariant generator lies in the kernel.
"""
import numpy as np

from lognls_star import (assemble_t1_kirchhoff, eigen_lowest, equivariant_kernel_generator, l2_norm,
                         make_graph, restrict_equivariant)


def main():
    n = 5
    g = make_graph(n, 12.0, 4000)
    A = assemble_t1_kirchhoff(n, g)
    rep = eigen_lowest(A, n + 1)
    print(f"N={n}: lowest T1 eigenvalues at alpha=0")
    for i, lam in enumerate(rep.eigenvalues):
        print(f"  {i}: {lam: .3e}")
    for k in range(1, (n - 1) // 2 + 1):
        gen = equivariant_kernel_generator(n, k, g)
        res = A.matvec(gen.vector())
        print(f"k={k}: |T1 gen| / |gen| = {np.sqrt(A.inner(res, res)) / l2_norm(gen):.2e}, "
              f"reduced kernel size {int(np.sum(np.abs(eigen_lowest(restrict_equivariant(A, k), 3).eigenvalues) < 1e-4))}")


if __name__ == "__main__":
    main()
