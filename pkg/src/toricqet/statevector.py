"""Dense statevector backend, the brute-force cross-check oracle.

Basis states are integers whose bit j is the Z eigenvalue of qubit j
(qubit 0 is the least significant bit).  A packed string i^p X^x Z^z acts as

    P |b> = i^p * (-1)^popcount(z & b) |b XOR x>

which vectorizes over the whole amplitude array.  Everything here is
exponential in qubit count and guarded by explicit capacity limits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import ToricLattice
from .pauli import PauliPolynomial, PauliString, phase_value

STATE_QUBIT_LIMIT = 20
DENSE_QUBIT_LIMIT = 16


class CapacityError(Exception):
    """Request exceeds the brute-force backend's qubit limits."""


def _check_state_capacity(n_qubits: int):
    if n_qubits > STATE_QUBIT_LIMIT:
        raise CapacityError(
            f"{n_qubits} qubits exceeds the statevector limit of {STATE_QUBIT_LIMIT}"
        )


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(n_qubits: int) -> np.ndarray:
    idx = _INDEX_CACHE.get(n_qubits)
    if idx is None:
        idx = np.arange(1 << n_qubits, dtype=np.uint64)
        _INDEX_CACHE[n_qubits] = idx
    return idx


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def basis_state(cls, n_qubits: int, bits: int) -> "StateVector":
        _check_state_capacity(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[bits] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_qubits, self.amplitudes / n)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _apply_bare(x_bits: int, z_bits: int, amps: np.ndarray, n_qubits: int) -> np.ndarray:
    idx = _indices(n_qubits)
    signed = amps
    if z_bits:
        parity = np.bitwise_count(idx & np.uint64(z_bits)).astype(np.int64) & 1
        signed = amps * (1.0 - 2.0 * parity)
    if x_bits:
        out = np.empty_like(amps)
        out[idx ^ np.uint64(x_bits)] = signed
        return out
    return signed.copy() if signed is amps else signed


def apply_string(p: PauliString, state: StateVector) -> StateVector:
    if p.n_qubits != state.n_qubits:
        raise ValueError("string and state act on different qubit counts")
    out = _apply_bare(p.x_bits, p.z_bits, state.amplitudes, state.n_qubits)
    if p.phase_exp:
        out = out * phase_value(p.phase_exp)
    return StateVector(state.n_qubits, out)


def apply_poly(poly: PauliPolynomial, state: StateVector) -> StateVector:
    if poly.n_qubits != state.n_qubits:
        raise ValueError("polynomial and state act on different qubit counts")
    total = np.zeros_like(state.amplitudes)
    for (x, z), coeff in poly.terms.items():
        total += coeff * _apply_bare(x, z, state.amplitudes, state.n_qubits)
    return StateVector(state.n_qubits, total)


def string_expectation(p: PauliString, state: StateVector) -> complex:
    return complex(np.vdot(state.amplitudes, apply_string(p, state).amplitudes))


def poly_expectation(poly: PauliPolynomial, state: StateVector) -> complex:
    return complex(np.vdot(state.amplitudes, apply_poly(poly, state).amplitudes))


def ground_state(lat: ToricLattice, sector: tuple[int, int] = (1, 1)) -> StateVector:
    """Exact toric-code ground state in the given loop sector.

    Starts from the all-zero Z basis state (already a +1 eigenstate of every
    plaquette and both Z loops), flips it into the requested sector with the
    dual X loops, then projects onto the +1 star sector.  One star projector
    is redundant because the stars multiply to identity.
    """
    if len(sector) != 2 or any(s not in (1, -1) for s in sector):
        raise ValueError("sector must be a pair of +-1 loop signs")
    _check_state_capacity(lat.n_qubits)
    bits = 0
    for flip_edges, sign in zip(lat.x_flip_edges, sector):
        if sign == -1:
            for e in flip_edges:
                bits ^= 1 << e
    state = StateVector.basis_state(lat.n_qubits, bits)
    for star in lat.stars()[:-1]:
        flipped = apply_string(star, state)
        state = StateVector(lat.n_qubits, 0.5 * (state.amplitudes + flipped.amplitudes))
    state = state.normalized()
    return state


def poly_to_dense(poly: PauliPolynomial) -> np.ndarray:
    """Full matrix of a Pauli polynomial, for exact diagonalization."""
    if poly.n_qubits > DENSE_QUBIT_LIMIT:
        raise CapacityError(
            f"{poly.n_qubits} qubits exceeds the dense-matrix limit of {DENSE_QUBIT_LIMIT}"
        )
    dim = 1 << poly.n_qubits
    idx = _indices(poly.n_qubits)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for (x, z), coeff in poly.terms.items():
        parity = np.bitwise_count(idx & np.uint64(z)).astype(np.int64) & 1
        vals = coeff * (1.0 - 2.0 * parity)
        mat[(idx ^ np.uint64(x)).astype(np.int64), idx.astype(np.int64)] += vals
    return mat


def ground_space_dimension(lat: ToricLattice, tol: float = 1e-9) -> int:
    """Degeneracy of the lowest eigenvalue by dense diagonalization."""
    if lat.n_qubits > DENSE_QUBIT_LIMIT:
        raise CapacityError(
            f"{lat.n_qubits} qubits exceeds the dense-matrix limit of {DENSE_QUBIT_LIMIT}"
        )
    evals = np.linalg.eigvalsh(poly_to_dense(lat.hamiltonian()))
    return int(np.count_nonzero(evals <= evals[0] + tol))
