import numpy as np
import pytest

from gmespin.errors import ContractError, InvalidStateError, SizeError
from gmespin.spin_core import (
    DOWN,
    UP,
    DensityMatrix,
    Operator,
    PAULI,
    PureState,
    expectation,
    mean_spin,
    named_state,
    pauli_op,
    random_state,
    reduced_density,
    schmidt_spectrum,
    tensor_product,
)

S = 1 / np.sqrt(2)
BELL = PureState([0, S, S, 0])


def up():
    return PureState(UP)


def down():
    return PureState(DOWN)


def test_tensor_product_basis():
    assert np.allclose(tensor_product([up(), up()]).amplitudes, [1, 0, 0, 0])


def test_tensor_product_linearity():
    plus = PureState([S, S])
    assert np.allclose(tensor_product([plus, down()]).amplitudes, [0, S, 0, S])


def test_sz_on_down_up_is_eigenvector():
    op = tensor_product([Operator(PAULI["z"]), Operator(PAULI["0"])])
    psi = tensor_product([down(), up()])
    assert np.allclose(op.apply(psi), -psi.amplitudes)


def test_tensor_product_mixed_or_empty():
    with pytest.raises(ContractError):
        tensor_product([])
    with pytest.raises(ContractError):
        tensor_product([up(), Operator(PAULI["x"])])


def test_tensor_product_size_limit():
    with pytest.raises(SizeError):
        tensor_product([PureState(np.ones(2**8) / 16)] * 2)  # 16 qubits


def test_tensor_product_associative(rng):
    ops = [Operator(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) for _ in range(3)]
    left = tensor_product([tensor_product(ops[:2]), ops[2]])
    right = tensor_product([ops[0], tensor_product(ops[1:])])
    assert np.max(np.abs(left.matrix - right.matrix)) <= 1e-12


def test_pauli_op_z_on_up_down():
    psi = tensor_product([up(), down()])
    assert np.allclose(pauli_op(1, "z", 2).apply(psi), psi.amplitudes)


def test_sigma_x_product_swaps_up_down():
    sx = pauli_op(1, "x", 2) @ pauli_op(2, "x", 2)
    out = sx.apply(tensor_product([up(), down()]))
    assert np.allclose(out, tensor_product([down(), up()]).amplitudes)


def test_sigma_y_x_on_up_down():
    # sigma^y (x) sigma^x written out by hand
    literal = np.array([[0, 0, 0, -1j], [0, 0, -1j, 0], [0, 1j, 0, 0], [1j, 0, 0, 0]])
    sy = pauli_op(1, "y", 2) @ pauli_op(2, "x", 2)
    assert np.allclose(sy.matrix, literal)
    out = sy.apply(tensor_product([up(), down()]))
    assert np.allclose(out, 1j * tensor_product([down(), up()]).amplitudes)


def test_pauli_op_site_out_of_range():
    with pytest.raises(ContractError):
        pauli_op(3, "x", 2)
    with pytest.raises(ContractError):
        pauli_op(0, "x", 2)
    with pytest.raises(ContractError):
        pauli_op(1, "w", 2)


def test_expectation_values():
    assert expectation(up(), Operator(PAULI["z"])) == pytest.approx(1)
    assert expectation(BELL, pauli_op(1, "z", 2)) == pytest.approx(0, abs=1e-15)
    sx = pauli_op(1, "x", 2) @ pauli_op(2, "x", 2)
    full = DensityMatrix((np.eye(4) + 0.3 * sx.matrix) / 4)
    assert expectation(full, sx) == pytest.approx(0.3)
    # rank-2 version on span{|up down>, |down up>}
    rank2 = np.zeros((4, 4), dtype=complex)
    rank2[np.ix_([1, 2], [1, 2])] = 0.5 * (np.eye(2) + 0.3 * PAULI["x"])
    assert expectation(DensityMatrix(rank2), sx) == pytest.approx(0.3)


def test_expectation_rejects_non_hermitian():
    with pytest.raises(ContractError):
        expectation(up(), Operator([[0, 1], [0, 0]]))


def test_expectation_dimension_mismatch():
    with pytest.raises(ContractError):
        expectation(up(), pauli_op(1, "z", 2))


def test_mean_spin_product(rng):
    phi = random_state((3,), rng)
    psi = tensor_product([up(), phi])
    assert np.allclose(mean_spin(psi, 1), [0, 0, 1])


def test_mean_spin_bell():
    assert np.allclose(mean_spin(BELL, 1), 0)


def test_mean_spin_partially_entangled():
    c, s = np.cos(np.pi / 8), np.sin(np.pi / 8)
    psi = PureState([c, 0, 0, s])
    # oracle: reduced density of site 1 by explicit index loops
    rho1 = np.zeros((2, 2), dtype=complex)
    amp = psi.amplitudes.reshape(2, 2)
    for i in range(2):
        for j in range(2):
            rho1[i, j] = sum(amp[i, k] * np.conj(amp[j, k]) for k in range(2))
    oracle = [np.trace(PAULI[a] @ rho1).real for a in "xyz"]
    assert np.allclose(mean_spin(psi, 1), oracle, atol=1e-14)
    assert mean_spin(psi, 1)[2] == pytest.approx(0.7071067811865476, abs=1e-12)


def test_mean_spin_rejects_qudit_site(rng):
    with pytest.raises(ContractError):
        mean_spin(random_state((2, 3), rng), 2)


def test_reduced_density_examples():
    prod = tensor_product([PureState([S, S]), up()])
    r = reduced_density(prod, [1])
    assert np.allclose(np.sort(r.eigenvalues()), [0, 1], atol=1e-12)
    assert np.allclose(reduced_density(BELL, {1}).matrix, np.eye(2) / 2)
    psi = PureState([0.8, 0, 0, 0.6])
    assert np.allclose(np.sort(reduced_density(psi, 1).eigenvalues()), [0.36, 0.64])


def test_reduced_density_rejects_bad_keep():
    with pytest.raises(ContractError):
        reduced_density(BELL, [])
    with pytest.raises(ContractError):
        reduced_density(BELL, [1, 2])


def test_reduced_density_valid_for_random_states(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        psi = random_state((2,) * n, rng)
        keep = sorted(rng.choice(np.arange(1, n + 1), size=int(rng.integers(1, n)), replace=False))
        rho = reduced_density(psi, keep)
        assert abs(np.trace(rho.matrix) - 1) <= 1e-10
        assert rho.eigenvalues()[0] >= -1e-10


def test_schmidt_examples(rng):
    spec = schmidt_spectrum(tensor_product([up(), random_state((4,), rng)]))
    assert (spec.lambda1, spec.lambda2) == pytest.approx((1, 0), abs=1e-12)
    spec = schmidt_spectrum(BELL)
    assert (spec.lambda1, spec.lambda2) == pytest.approx((S, S), abs=1e-12)


def test_schmidt_matches_reduced_density_eigenvalue(rng):
    for d in range(2, 9):
        psi = random_state((2, d), rng)
        spec = schmidt_spectrum(psi)
        lam_max = np.linalg.eigvalsh(reduced_density(psi, [1]).matrix)[-1]
        assert spec.lambda1**2 == pytest.approx(lam_max, abs=1e-12)
        assert spec.lambda1**2 + spec.lambda2**2 == pytest.approx(1, abs=1e-10)


def test_two_qubit_spin_lengths_equal(rng):
    for _ in range(200):
        psi = random_state((2, 2), rng)
        assert abs(np.sum(mean_spin(psi, 1) ** 2) - np.sum(mean_spin(psi, 2) ** 2)) <= 1e-10


def test_spin_length_is_schmidt_gap(rng):
    for d in range(2, 9):
        for _ in range(20):
            psi = random_state((2, d), rng)
            spec = schmidt_spectrum(psi)
            assert abs(np.linalg.norm(mean_spin(psi, 1)) - (spec.lambda1**2 - spec.lambda2**2)) <= 1e-10


def test_pure_state_rejects_unnormalised():
    with pytest.raises(InvalidStateError):
        PureState([1, 1])
    with pytest.raises(ContractError):
        PureState([1, 0, 0], (2, 2))
    assert PureState.normalized([1, 1]).amplitudes == pytest.approx([S, S])


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        DensityMatrix([[0.5, 0.5], [0, 0.5]])


def test_named_states():
    assert np.allclose(named_state("bell").amplitudes, BELL.amplitudes)
    assert np.allclose(named_state("product:up,down").amplitudes, [0, 1, 0, 0])
    ghz = named_state("ghz:3")
    assert ghz.dims == (2, 2, 2) and ghz.amplitudes[0] == pytest.approx(S)
    with pytest.raises(ContractError):
        named_state("product:sideways")
