#!/usr/bin/env python3
"""Monodromy around the discriminant point h1* = -3 * 3^(2/3) (h2 = 6).

Prints M, its rank-one structure (Picard-Lefschetz transvection), the
Liouville check and the comparison with the deformation oracle.
"""
import numpy as np

from pfperiods import CurveSpec, monodromy
from pfperiods.verify import discriminant_loop


def main():
    np.set_printoptions(precision=4, suppress=True, linewidth=140)
    loop = discriminant_loop()
    curve = CurveSpec((4, 5, 6), *loop.start)
    m = monodromy(curve, loop, 1e-12)
    print("basis cycles:", [c.pair for c in m.basis])
    print("M =\n", m.M)
    sv = np.linalg.svd(m.M - np.eye(5), compute_uv=False)
    print("singular values of M - I:", sv)
    print(f"det M = {m.det:.15f}")
    print(f"Liouville residual {m.liouville_residual:.2e}, oracle residual {m.residual_vs_oracle:.2e}")


if __name__ == "__main__":
    main()
