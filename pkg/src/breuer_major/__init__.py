"""Total variation Berry-Esseen bounds for the Breuer-Major central limit theorem.

The library covers the full chain at desk scale: Hermite expansions of
subordinating functions, covariance models and their variance sums,
exact-in-law simulation of stationary Gaussian paths, the explicit bound
formulas and their quadruple correlation sums, Gebelein's maximal
correlation inequality for Gaussian subspaces together with the coupling
construction behind it, and distance estimators with uncertainty
quantification.
"""

__version__ = "0.1.0"

from . import bounds, cli, covariance, gebelein, hermite, simulate, stats

__all__ = [
    "bounds",
    "cli",
    "covariance",
    "gebelein",
    "hermite",
    "simulate",
    "stats",
    "__version__",
]
