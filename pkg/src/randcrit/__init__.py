"""randcrit: expected-critical-point constants of random smooth functions.

Gaussian measures on symmetric matrices, GOE one-point correlation
machinery, the universal constants pipeline, and a Monte Carlo simulator of
random spherical harmonics on the 2-sphere.
"""

__version__ = "0.1.0"
