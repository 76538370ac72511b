"""apointlab: desk-scale numerics for the solutions of zeta(s) = a.

Submodules:

    complexfn   zeta, zeta', log-gamma, the functional-equation factor
    apoints     root counting and location in rectangles, zero-table ingest
    dirichlet   von Mangoldt sieves, Dirichlet convolution algebra
    verify      numerical harnesses for the summation identities
    cli         command-line front end
"""

__version__ = "0.1.0"
