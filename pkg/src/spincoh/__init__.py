"""Mod p cohomology computations for Spin groups and exceptional groups.

Subpackages build on each other roughly in this order: modp_poly (sparse
graded polynomial arithmetic over Z/p), symfun (symmetric function tables and
Spin(2m) cohomology rings), steenrod (reduced power operations), idealred
(reduction and membership modulo structured ideals), weyl (E7 root data and
invariant-theory solvers), paperchecks (the named verification registry),
samelson (Samelson product criteria over CW fact bases), and cli.
"""

__version__ = "0.1.0"
