"""Desk-scale numerics laboratory for phase-space analysis.

Subpackage layout:

* ``exponents``  -- exact rational calculus over extended Lebesgue exponents,
  boundedness-condition predicates and the interpolation-parameter solver.
* ``grids``      -- symplectically self-dual discretisation of phase space,
  Fourier / symplectic-Fourier transforms, Gaussian atoms.
* ``stft``       -- ordinary and symplectic short-time Fourier transforms.
* ``weights``    -- moderate weight functions and multilinear weight conditions.
* ``norms``      -- weighted mixed norms of STFT tensors (modulation / amalgam).
* ``weyl``       -- twisted convolution, Weyl-type symbol products, symbol or
  kernel maps, operator matrices, kernel composition.
* ``lab``        -- randomized ensembles and norm-ratio experiments.
* ``cli``        -- command-line runner emitting JSON/CSV reports.
"""

__version__ = "0.1.0"
