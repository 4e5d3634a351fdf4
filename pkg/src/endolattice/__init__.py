"""Exact lattice, root-datum and Tate-cohomology computations for depth-zero
endoscopy and L-packet combinatorics."""

__version__ = "0.1.0"
