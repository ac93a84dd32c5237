"""Diagnostics for the XX spin chain as the hard-core limit of the Bose-Hubbard model.

Two independent engines compute the same observables:

* :mod:`xxcrit.hilbert` -- brute-force exact diagonalization in the full
  2^N (or truncated bosonic) Hilbert space; the ground truth for small N.
* :mod:`xxcrit.freefermion` -- Jordan-Wigner free-fermion solver with
  parity-projected boundary handling; exact for any N and in the
  thermodynamic limit.

On top of those sit superfluid-fraction estimators (:mod:`xxcrit.superfluid`),
entanglement measures and witnesses (:mod:`xxcrit.entanglement`),
correlation-decay classification (:mod:`xxcrit.order`), a 2D mean-field
energy-density module (:mod:`xxcrit.dim2`) and physical-units conversion for
cold-atom parameters (:mod:`xxcrit.physunits`).  ``xxcrit.cli`` exposes the
lot as a command-line tool.
"""

from xxcrit.errors import NumericError, ResourceLimitError, ValidationError, XXCritError

__all__ = [
    "XXCritError",
    "ValidationError",
    "ResourceLimitError",
    "NumericError",
    "__version__",
]

__version__ = "0.1.0"
