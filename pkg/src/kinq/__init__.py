"""Superconducting-circuit Hamiltonian prediction from film electrodynamics.

The package models superconducting films through their complex conductivity
and surface impedance instead of treating them as perfect conductors, feeds
the resulting kinetic inductance into analytic transmission-line and lumped
network models, and quantizes the circuit (impedance-pole or
energy-participation route) to produce mode frequencies, anharmonicities,
and dispersive shifts.
"""

__version__ = "0.1.0"

from . import (
    errors,
    fock,
    io,
    materials,
    network,
    numerics,
    pipeline,
    quantize,
    tline,
)

__all__ = [
    "errors",
    "fock",
    "io",
    "materials",
    "network",
    "numerics",
    "pipeline",
    "quantize",
    "tline",
    "__version__",
]
