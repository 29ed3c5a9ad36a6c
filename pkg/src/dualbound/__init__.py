"""dualbound: certified upper bounds for dual packing problems.

Exact LP bounds for self-dual binary codes, linear-programming style
spectral bounds for even unimodular lattices and chiral 2d CFTs, and
high-precision evaluation of the associated magic functions.
"""

__version__ = "0.1.0"
