"""Exact analysis of linear multiple-relaxation-time lattice Boltzmann schemes.

Subpackages cover the exact algebra (rationals, derivative operators,
symmetric tensors), the scheme definitions (D2Q9, D2Q13), the equivalent
partial-differential-equation expansion, the rotation-invariance classifier,
the closed-form isotropic parameter families, and a small float simulator
for anisotropy measurements.
"""

__version__ = "0.1.0"
