"""Why the first built-in family cannot be processed as printed.

The pencil M(s) must be invertible at infinity.  For the printed data the
constant parts of N0, N1 and the limits of D0, D1 make M(inf) singular,
and the determinant keeps only one unstable zero.
"""
import numpy as np

from simustab.errors import ImproperPencil
from simustab.fixtures import example1_plants
from simustab.ratmat import RationalMatrix, rm_det_adj
from simustab.stabdata import build_pencil

pp = example1_plants()
M = RationalMatrix.block([[pp.N0, pp.N1], [pp.D0, pp.D1]])
Minf = M.at_infinity()
print("M(inf) =\n", Minf)
print("singular values:", np.linalg.svd(Minf, compute_uv=False))

det, _ = rm_det_adj(M)
print("det M numerator degree:", det.num.degree, "poles:", len(det.poles))
roots = det.num.roots()
print("zeros of det M:", np.round(roots, 4))
print("in the right half plane:", np.round(roots[roots.real > 0], 4))

try:
    build_pencil(pp)
except ImproperPencil as exc:
    print("build_pencil refuses the data:", exc)
