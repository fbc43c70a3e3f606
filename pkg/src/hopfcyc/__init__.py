"""hopfcyc: exact rational computations in Hopf-cyclic cohomology.

Builds cocyclic modules with anti-Yetter-Drinfeld coefficients, the
noncommutative Weil algebra and its truncation tower, universal differential
calculi, computes their (co)homology over Q, and evaluates cup products and
S-operation identities on finite-dimensional inputs.
"""

__version__ = "0.1.0"
