"""Packed Pauli algebra against a dense matrix oracle.

The oracle builds every operator from literal 2x2 matrices with np.kron,
sharing no code with the packed implementation.  Qubit 0 is the least
significant index bit, so it is the rightmost kron factor.
"""

import numpy as np
import pytest

from toricqet.pauli import PauliPolynomial, PauliString, phase_value

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


def dense_string(p: PauliString) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for j in range(p.n_qubits):
        xb = (p.x_bits >> j) & 1
        zb = (p.z_bits >> j) & 1
        factor = (I2, X2, Z2, X2 @ Z2)[xb + 2 * zb]
        out = np.kron(factor, out)
    return phase_value(p.phase_exp) * out


def dense_poly(poly: PauliPolynomial) -> np.ndarray:
    dim = 1 << poly.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for string, coeff in poly.strings():
        out += coeff * dense_string(string)
    return out


def random_string(rng, n: int) -> PauliString:
    top = 1 << n
    return PauliString(n, int(rng.integers(top)), int(rng.integers(top)), int(rng.integers(4)))


def random_poly(rng, n: int, max_terms: int = 6) -> PauliPolynomial:
    k = int(rng.integers(1, max_terms + 1))
    weighted = []
    for _ in range(k):
        c = complex(rng.standard_normal(), rng.standard_normal())
        weighted.append((random_string(rng, n), c))
    return PauliPolynomial.from_strings(n, weighted)


class TestPauliString:
    def test_single_qubit_matrices(self):
        assert np.array_equal(dense_string(PauliString.single(1, 0, "x")), X2)
        assert np.array_equal(dense_string(PauliString.single(1, 0, "y")), Y2)
        assert np.array_equal(dense_string(PauliString.single(1, 0, "z")), Z2)

    def test_x_times_x_is_identity(self):
        x = PauliString.single(1, 0, "x")
        assert x.mul(x) == PauliString.identity(1)

    def test_x_times_z_convention(self):
        # XZ = -iY in the fixed convention.
        x = PauliString.single(1, 0, "x")
        z = PauliString.single(1, 0, "z")
        prod = x.mul(z)
        assert prod.canonical_phase_exp() == 3
        assert np.array_equal(dense_string(prod), -1j * Y2)

    def test_two_qubit_example(self):
        xx = PauliString.from_support(2, [0, 1], "x")
        zz = PauliString.from_support(2, [0, 1], "z")
        yy = PauliString.from_support(2, [0, 1], "y")
        prod = xx.mul(zz)
        assert np.array_equal(dense_string(prod), -dense_string(yy))
        assert prod.canonical_phase_exp() == 2

    def test_mul_against_dense_oracle(self):
        rng = np.random.default_rng(20240811)
        for _ in range(10_000):
            n = int(rng.integers(1, 5))
            p = random_string(rng, n)
            q = random_string(rng, n)
            lhs = dense_string(p) @ dense_string(q)
            rhs = dense_string(p.mul(q))
            assert np.array_equal(lhs, rhs)

    def test_commutes_matches_dense(self):
        rng = np.random.default_rng(7)
        for _ in range(2_000):
            n = int(rng.integers(1, 5))
            p = random_string(rng, n)
            q = random_string(rng, n)
            pq, qp = p.mul(q), q.mul(p)
            assert (pq.x_bits, pq.z_bits) == (qp.x_bits, qp.z_bits)
            offset = (pq.phase_exp - qp.phase_exp) % 4
            assert offset in (0, 2)
            mp, mq = dense_string(p), dense_string(q)
            zero_comm = np.array_equal(mp @ mq, mq @ mp)
            assert p.commutes(q) == zero_comm == (offset == 0)

    def test_adjoint_matches_dense(self):
        rng = np.random.default_rng(11)
        for _ in range(2_000):
            p = random_string(rng, int(rng.integers(1, 5)))
            assert np.array_equal(dense_string(p.adjoint()), dense_string(p).conj().T)
            assert p.is_hermitian() == (p.adjoint() == p)

    def test_from_support_y_phase(self):
        p = PauliString.from_support(3, [0, 2], "y")
        oracle = np.kron(Y2, np.kron(I2, Y2))
        assert np.array_equal(dense_string(p), oracle)
        assert p.is_hermitian()

    def test_weight_and_label(self):
        p = PauliString.single(3, 1, "y").mul(PauliString.single(3, 2, "z"))
        assert p.weight() == 2
        assert p.label() == "+IYZ"
        x = PauliString.single(1, 0, "x")
        z = PauliString.single(1, 0, "z")
        assert x.mul(z).label() == "-iY"

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PauliString.single(2, 0, "x").mul(PauliString.single(3, 0, "x"))
        with pytest.raises(ValueError):
            PauliString.single(2, 0, "x").commutes(PauliString.single(3, 0, "x"))

    def test_bad_construction_rejected(self):
        with pytest.raises(ValueError):
            PauliString(2, 1 << 2, 0)
        with pytest.raises(ValueError):
            PauliString.single(2, 0, "w")
        with pytest.raises(ValueError):
            PauliString.from_support(4, [1, 1], "x")
        with pytest.raises(ValueError):
            PauliString.from_support(4, [9], "z")


class TestPauliPolynomial:
    def test_from_string_folds_phase(self):
        y = PauliString.single(1, 0, "y")
        poly = PauliPolynomial.from_string(y)
        # Stored bare as XZ with the i folded into the coefficient.
        assert poly.coeff(1, 1) == 1j
        assert np.allclose(dense_poly(poly), Y2)

    def test_from_strings_merges_duplicates(self):
        x = PauliString.single(2, 0, "x")
        poly = PauliPolynomial.from_strings(2, [(x, 0.25), (x, 0.75)])
        assert poly.n_terms() == 1
        assert poly.coeff(1, 0) == 1.0

    def test_projector_pair_sums_to_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            s = random_string(rng, n)
            if not s.is_hermitian():
                s = PauliString(n, s.x_bits, s.z_bits, s.phase_exp + 1)
            sp = PauliPolynomial.from_string(s, 0.5)
            plus = PauliPolynomial.identity(n, 0.5) + sp
            minus = PauliPolynomial.identity(n, 0.5) - sp
            assert (plus + minus).isclose(PauliPolynomial.identity(n))
            # Hermitian strings square to identity, so these are projectors.
            assert plus.mul(plus).isclose(plus)
            assert plus.mul(minus).is_zero()

    def test_mul_against_dense_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            n = int(rng.integers(1, 4))
            a = random_poly(rng, n)
            b = random_poly(rng, n)
            assert np.allclose(dense_poly(a.mul(b)), dense_poly(a) @ dense_poly(b), atol=1e-12)

    def test_ring_identities(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(1, 4))
            a, b, c = (random_poly(rng, n) for _ in range(3))
            assert a.mul(b.mul(c)).isclose(a.mul(b).mul(c), tol=1e-10)
            assert a.mul(b + c).isclose(a.mul(b) + a.mul(c), tol=1e-10)
            assert a.mul(b).adjoint().isclose(b.adjoint().mul(a.adjoint()), tol=1e-10)

    def test_commutator_matches_dense(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            n = int(rng.integers(1, 4))
            a = random_poly(rng, n)
            b = random_poly(rng, n)
            oracle = dense_poly(a) @ dense_poly(b) - dense_poly(b) @ dense_poly(a)
            assert np.allclose(dense_poly(a.commutator(b)), oracle, atol=1e-12)

    def test_adjoint_matches_dense(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            a = random_poly(rng, int(rng.integers(1, 4)))
            assert np.allclose(dense_poly(a.adjoint()), dense_poly(a).conj().T, atol=1e-14)

    def test_exact_cancellation_prunes(self):
        x = PauliPolynomial.from_string(PauliString.single(2, 0, "x"))
        assert (x - x).n_terms() == 0
        assert (x - x).is_zero()

    def test_scale_and_rmul(self):
        x = PauliPolynomial.from_string(PauliString.single(1, 0, "x"))
        assert (2.0 * x).coeff(1, 0) == 2.0
        assert x.scale(0.5).coeff(1, 0) == 0.5
        assert (x * 3).coeff(1, 0) == 3.0

    def test_strings_roundtrip(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            a = random_poly(rng, 3)
            again = PauliPolynomial.from_strings(3, list(a.strings()))
            assert again.isclose(a, tol=0.0)

    def test_size_mismatch_rejected(self):
        a = PauliPolynomial.identity(2)
        b = PauliPolynomial.identity(3)
        with pytest.raises(ValueError):
            a.add(b)
        with pytest.raises(ValueError):
            a.mul(b)
