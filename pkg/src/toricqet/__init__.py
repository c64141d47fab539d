"""Exact check of measurement-feedback energy extraction on the toric code.

Two independent backends compute the same protocol energies: a symbolic
stabilizer-expectation engine that works at any lattice size, and a dense
statevector oracle limited to small lattices.  Agreement between them is
the package's core evidence.
"""

from .pauli import PauliPolynomial, PauliString, phase_value
from .stabilizer import StabilizerGroup
from .lattice import MeasurementScheme, ToricLattice
from .statevector import CapacityError, StateVector, ground_state

__all__ = [
    "PauliPolynomial",
    "PauliString",
    "phase_value",
    "StabilizerGroup",
    "MeasurementScheme",
    "ToricLattice",
    "CapacityError",
    "StateVector",
    "ground_state",
]

__version__ = "0.1.0"
