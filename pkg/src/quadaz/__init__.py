"""Quadratic forms over fields and discrete valuation rings, even Clifford
algebras, quaternion Azumaya algebras, and the quadric bundles attached to
cubic fourfolds containing a plane."""

__version__ = "0.1.0"
