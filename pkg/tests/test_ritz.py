import json

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from anharmonic.polynomial import Polynomial, parse_potential
from anharmonic.ritz import (
    RitzConfig,
    RitzError,
    RitzResult,
    SymmetricMatrix,
    converge_ground_state,
    ground_energy,
    hamiltonian_matrix,
    kinetic_matrix,
    lowest_eigenpair,
    lowest_eigenvalue,
    position_matrix,
)

# published high-accuracy energies, at least 10 significant digits
REFERENCES = {
    "x^2": 1.0,
    "x^4": 1.0603620904841828,
    "x^2+x^3+x^4": 1.31025752970575,
    "x^6": 1.1448024538,
    "x^2+x^6": 1.435624619,
    "x^4+x^5+x^6": 1.30272754246,
    "x^2-x^3+x^4+x^6": 1.58657805318,
    "x^2-x^3+x^4-x^5+x^6": 1.4711571858,
    "x^4-x^2": 0.6576530051807151,
}


def jacobi_eigenvalues(a, sweeps=100):
    """Cyclic Jacobi rotations; an oracle independent of LAPACK."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < 1e-15 * max(1.0, np.linalg.norm(a)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def grid_ground_energy(V, length, n):
    """Lowest eigenvalue of the 3-point finite-difference Hamiltonian on [-L, L]."""
    x = np.linspace(-length, length, n + 2)[1:-1]
    step = x[1] - x[0]
    diag = 2 / step**2 + V(x)
    off = np.full(n - 1, -1 / step**2)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, 0), eigvals_only=True)[0], step


class TestMatrices:
    def test_position_entries(self):
        x = position_matrix(5, 2.0)
        for k in range(4):
            assert float(x[k, k + 1]) == pytest.approx(np.sqrt((k + 1) / 4.0), rel=1e-15)
        assert float(x[0, 2]) == 0.0 and float(x[2, 2]) == 0.0

    def test_position_squared_diagonal(self):
        n, omega = 12, 1.7
        x = np.asarray(position_matrix(n, omega), dtype=float)
        x2 = x @ x
        for k in range(n - 1):
            assert x2[k, k] == pytest.approx((2 * k + 1) / (2 * omega), rel=1e-14)

    def test_harmonic_is_diagonal_at_unit_frequency(self):
        h = np.asarray(hamiltonian_matrix(Polynomial([0, 0, 1]), 10, 1.0), dtype=float)
        np.testing.assert_allclose(np.diag(h), 2 * np.arange(10) + 1, rtol=0, atol=1e-14)
        np.testing.assert_allclose(h - np.diag(np.diag(h)), 0, atol=1e-14)

    def test_kinetic_band(self):
        t = np.asarray(kinetic_matrix(6, 3.0), dtype=float)
        assert t[1, 1] == pytest.approx(4.5)
        assert t[1, 3] == pytest.approx(-1.5 * np.sqrt(6))
        assert t[0, 1] == 0.0

    @pytest.mark.parametrize("text", list(REFERENCES))
    def test_potential_block_matches_matrix_power(self, text):
        V = parse_potential(text)
        n, omega, pad = 10, 1.3, V.degree
        big = np.asarray(position_matrix(n + pad, omega), dtype=float)
        expected = sum(c * np.linalg.matrix_power(big, d) for d, c in enumerate(V.coefficients))
        expected = expected + np.asarray(kinetic_matrix(n + pad, omega), dtype=float)
        got = np.asarray(hamiltonian_matrix(V, n, omega), dtype=float)
        np.testing.assert_allclose(got, expected[:n, :n], rtol=0, atol=1e-11 * np.abs(expected).max())

    @pytest.mark.parametrize("text", list(REFERENCES))
    @pytest.mark.parametrize("omega", [0.5, 2.0, 8.0])
    def test_symmetric(self, text, omega):
        h = hamiltonian_matrix(parse_potential(text), 16, omega).entries
        assert np.all(h == h.T)

    def test_symmetric_matrix_reads_upper_triangle(self):
        m = SymmetricMatrix([[1.0, 2.0], [99.0, 3.0]])
        assert m[1, 0] == 2.0
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0
        with pytest.raises(ValueError):
            SymmetricMatrix([[1.0, 2.0]])

    @pytest.mark.parametrize("bad", [(1, 1.0), (4, 0.0), (4, -1.0)])
    def test_bad_order_or_frequency(self, bad):
        with pytest.raises(ValueError):
            position_matrix(*bad)

    def test_rejects_unbounded_potential(self):
        with pytest.raises(ValueError):
            hamiltonian_matrix(parse_potential("x^3"), 8, 1.0)
        with pytest.raises(ValueError):
            hamiltonian_matrix(parse_potential("-x^4"), 8, 1.0)


class TestLowestEigenvalue:
    @pytest.mark.parametrize(
        "m, expected",
        [(np.eye(4), 1.0), (np.diag([3.0, 1.0, 5.0]), 1.0), ([[2.0, 1.0], [1.0, 2.0]], 1.0)],
    )
    def test_examples(self, m, expected):
        assert lowest_eigenvalue(SymmetricMatrix(m)) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_jacobi(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(9, 9))
        a = a + a.T
        lam, v, diag = lowest_eigenpair(SymmetricMatrix(a))
        assert lam == pytest.approx(jacobi_eigenvalues(a)[0], abs=1e-12)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)
        assert diag.residual_norm <= 1e-9 * diag.frobenius_norm

    @pytest.mark.parametrize("text", ["x^4", "x^2-x^3+x^4-x^5+x^6"])
    def test_hamiltonian_against_jacobi(self, text):
        m = hamiltonian_matrix(parse_potential(text), 12, 2.0)
        assert lowest_eigenvalue(m) == pytest.approx(jacobi_eigenvalues(np.asarray(m, float))[0], rel=1e-12)

    @pytest.mark.parametrize("text", list(REFERENCES))
    def test_residual_diagnostics(self, text):
        _, _, diag = lowest_eigenpair(hamiltonian_matrix(parse_potential(text), 64, 2.0))
        assert diag.relative_residual <= 1e-9


class TestGroundEnergy:
    def test_harmonic_mismatched_frequency(self):
        V = Polynomial([0, 0, 1])
        assert ground_energy(V, 40, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_quartic_fixed_basis(self):
        assert ground_energy(parse_potential("x^4"), 40, 2.0) == pytest.approx(1.060362090, abs=1e-6)

    @pytest.mark.parametrize("text", list(REFERENCES))
    @pytest.mark.parametrize("omega", [0.7, 2.0, 5.0])
    def test_monotone_and_bounded_below(self, text, omega):
        V = parse_potential(text)
        energies = [ground_energy(V, n, omega) for n in (4, 8, 16, 32, 64)]
        assert all(b <= a + 1e-13 for a, b in zip(energies, energies[1:]))
        assert min(energies) >= REFERENCES[text] - 5e-10 * abs(REFERENCES[text])


class TestConverge:
    @pytest.fixture(scope="class")
    @classmethod
    def results(cls):
        return {text: converge_ground_state(parse_potential(text)) for text in REFERENCES}

    @pytest.mark.parametrize("text", list(REFERENCES))
    def test_reference_values(self, results, text):
        assert results[text].energy == pytest.approx(REFERENCES[text], rel=1e-9)

    def test_harmonic_exact(self, results):
        assert results["x^2"].energy == pytest.approx(1.0, abs=1e-12)

    def test_quartic(self, results):
        assert results["x^4"].energy == pytest.approx(1.060362090, abs=1e-8)

    @pytest.mark.parametrize("text", list(REFERENCES))
    def test_trace_and_scan(self, results, text):
        r = results[text]
        sizes = [n for n, _ in r.trace]
        assert sizes[0] == 8 and all(b == min(2 * a, 400) for a, b in zip(sizes, sizes[1:]))
        assert abs(r.trace[-1][1] - r.trace[-2][1]) < 1e-10
        energies = [e for _, e in r.trace]
        assert all(b <= a + 1e-13 for a, b in zip(energies, energies[1:]))
        converged = sorted(e for _, e in r.scan if e is not None)
        assert converged[0] == r.energy
        # frequency robustness: the best two grid points agree
        assert converged[1] - converged[0] <= 10 * 1e-10

    def test_double_well_against_grid(self, results):
        # Richardson-extrapolated finite-difference grid, independent of the basis
        V = parse_potential("x^4-5*x^2")
        e1, h1 = grid_ground_energy(V, 8.0, 4000)
        e2, h2 = grid_ground_energy(V, 8.0, 8001)
        extrapolated = (e2 * h1**2 - e1 * h2**2) / (h1**2 - h2**2)
        assert extrapolated == pytest.approx(-3.4101427612, abs=1e-7)
        r = converge_ground_state(V)
        assert r.energy == pytest.approx(extrapolated, abs=1e-7)

    def test_single_frequency(self):
        r = converge_ground_state(parse_potential("x^4"), RitzConfig(frequency=3.0))
        assert r.frequency == 3.0 and len(r.scan) == 1
        assert r.energy == pytest.approx(1.060362090, abs=1e-8)

    def test_no_convergence(self):
        config = RitzConfig(max_basis_size=8, energy_tolerance=1e-15)
        with pytest.raises(RitzError, match="max_basis_size=8"):
            converge_ground_state(parse_potential("x^6"), config)

    def test_json_round_trip(self, results):
        r = results["x^2+x^3+x^4"]
        assert RitzResult.from_dict(json.loads(r.to_json())) == r


@pytest.mark.parametrize(
    "kwargs",
    [{"basis_size": 1}, {"max_basis_size": 4}, {"energy_tolerance": 0}, {"frequency": -1.0},
     {"frequency_grid": ()}, {"padding": -1}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        RitzConfig(**kwargs)
