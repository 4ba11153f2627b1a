import numpy as np
import pytest

from qps.builder import (
    QpsConfig,
    bc_matrix,
    build_bc,
    build_flag,
    build_inversion_parallel,
    build_inversion_serial,
    build_qps,
    solve,
    standard_registers,
)
from qps.circuit import count_resources
from qps.poisson import TridiagonalSystem, eigenpair, eigenvalue, solve_classical
from qps.simulator import (
    StateVector,
    apply,
    fidelity,
    inject_register,
    postselect,
)

DEMO_B = np.array([2**-0.5, 0.5, 0.5])


def _basis_input(circ, j, n):
    amps = np.zeros(2**n, dtype=complex)
    amps[j] = 1.0
    return inject_register(StateVector.ground(circ.num_qubits), circ.register("B"), amps)


def _all_ones_amp(circ, state, j, n):
    ones = (2 ** (2 * n - 2) - 1) << n
    return state.amplitudes[j + ones]


def test_register_layout():
    regs = standard_registers(4)
    names = {r.name: r for r in regs}
    assert names["B"].qubits == (0, 1, 2, 3)
    assert names["E"].width == 6
    assert names["Anc"].width == 1
    assert names["BCaux"].width == 1
    assert sum(r.width for r in regs) == 12  # 3n
    par = standard_registers(4, parallel=True)
    assert sum(r.width for r in par) == 14  # 4n - 2
    assert next(r for r in par if r.name == "C").width == 2


def test_bc_rows_are_eigenvectors():
    n = 3
    U = bc_matrix(n)
    for j in range(1, 8):
        pair = eigenpair(n, j)
        embedded = np.zeros(8)
        embedded[1:] = pair.u
        out = U @ embedded
        expected = np.zeros(8)
        expected[j] = 1.0
        assert np.allclose(out, expected, atol=1e-12)


def test_bc_is_unitary_and_matches_dst_oracle():
    for n in (2, 3, 4, 5):
        U = bc_matrix(n)
        N = 2**n
        assert np.max(np.abs(U.conj().T @ U - np.eye(N))) <= 1e-12
        # independent oracle: direct sine-matrix construction
        for j in range(1, N):
            for k in range(1, N):
                assert U[j, k] == pytest.approx(
                    np.sqrt(2 / N) * np.sin(j * k * np.pi / N), abs=1e-15
                )


def test_build_bc_bounds():
    with pytest.raises(ValueError):
        build_bc(1)
    with pytest.raises(ValueError):
        build_bc(13)
    lazy = build_bc(5, materialize=False)
    assert lazy.matrix is None and lazy.label == "BC"


@pytest.mark.parametrize("ry", ["semantic", "bitwise"])
def test_inversion_n2_basis_inputs(ry):
    circ = build_inversion_serial(2, ry)
    st = apply(_basis_input(circ, 1, 2), circ)
    assert abs(_all_ones_amp(circ, st, 1, 2)) == pytest.approx(0.8535533905932737, abs=1e-12)
    st = apply(_basis_input(circ, 2, 2), circ)
    assert _all_ones_amp(circ, st, 2, 2).real == pytest.approx(0.25, abs=1e-14)


@pytest.mark.parametrize("ry", ["semantic", "bitwise"])
def test_inversion_n3_uniform_superposition(ry):
    n = 3
    circ = build_inversion_serial(n, ry)
    amps = np.zeros(8, dtype=complex)
    amps[1:] = 1 / np.sqrt(7)
    st = apply(
        inject_register(StateVector.ground(circ.num_qubits), circ.register("B"), amps),
        circ,
    )
    for j in range(1, 8):
        expected = 8 / eigenvalue(n, j) / np.sqrt(7)
        assert abs(_all_ones_amp(circ, st, j, n)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("ry", ["semantic", "bitwise"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_amplitude_audit_exhaustive(ry, n):
    circ = build_inversion_serial(n, ry)
    for j in range(1, 2**n):
        out = apply(_basis_input(circ, j, n), circ)
        amp = _all_ones_amp(circ, out, j, n)
        assert abs(amp.imag) <= 1e-15
        assert amp.real == pytest.approx(8 / eigenvalue(n, j), abs=1e-12)


def test_flag_behaviour():
    n = 3
    flag = build_flag(n)
    e = flag.register("E")
    anc = flag.register("Anc")
    ones = (2 ** e.width - 1) << e.offset
    # E = |1...1> flips the ancilla
    amps = np.zeros(2**flag.num_qubits, dtype=complex)
    amps[ones] = 1.0
    out = apply(StateVector(flag.num_qubits, amps), flag)
    assert out.amplitudes[ones + (1 << anc.offset)] == 1.0
    # any E with a zero leaves it alone
    amps = np.zeros(2**flag.num_qubits, dtype=complex)
    amps[ones ^ (1 << e.offset)] = 1.0
    st = StateVector(flag.num_qubits, amps)
    assert np.array_equal(apply(st, flag).amplitudes, st.amplitudes)
    # involution
    back = apply(apply(st, flag), flag)
    assert np.array_equal(back.amplitudes, st.amplitudes)


def test_qps_composition_uncomputes_bc():
    circ = build_qps(QpsConfig(n=2))
    assert circ.gates[0].label == "BC"
    assert circ.gates[-1].label == "BC†"
    assert np.allclose(circ.gates[0].matrix @ circ.gates[-1].matrix, np.eye(4), atol=1e-14)


def test_demo_reproduction():
    sol = solve(QpsConfig(n=2), DEMO_B)
    assert np.max(np.abs(sol.solution - [0.552987, 0.674065, 0.489736])) <= 1e-6
    # success probability equals 64 ||A^-1 b||^2 (b already normalized)
    v = solve_classical(TridiagonalSystem(N=4), DEMO_B)
    assert sol.success_probability == pytest.approx(64 * float(v @ v), abs=1e-12)
    assert sol.fidelity >= 1 - 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eigencomponent_isolation(n):
    for j in range(1, 2**n):
        sol = solve(QpsConfig(n=n), eigenpair(n, j).u)
        assert fidelity(sol.solution, eigenpair(n, j).u) >= 1 - 1e-10
        assert sol.success_probability == pytest.approx(
            (8 / eigenvalue(n, j)) ** 2, abs=1e-10
        )


@pytest.mark.parametrize("n", [2, 3, 4])
def test_solve_matches_classical_oracle(n):
    rng = np.random.default_rng(40 + n)
    system = TridiagonalSystem(N=2**n)
    for _ in range(10):
        b = rng.standard_normal(2**n - 1)
        sol = solve(QpsConfig(n=n), b)
        assert sol.fidelity >= 1 - 1e-10
        b_hat = b / np.linalg.norm(b)
        v = solve_classical(system, b_hat)
        assert sol.success_probability == pytest.approx(64 * float(v @ v), abs=1e-10)
        # sign convention: the postselected direction is A^-1 b itself
        assert np.allclose(sol.solution, v / np.linalg.norm(v), atol=1e-10)


def test_solve_rejects_bad_input():
    with pytest.raises(ValueError):
        solve(QpsConfig(n=2), np.zeros(3))
    with pytest.raises(ValueError):
        solve(QpsConfig(n=2), np.ones(4))


def test_config_validation():
    with pytest.raises(ValueError):
        QpsConfig(n=1)
    with pytest.raises(ValueError):
        QpsConfig(n=2, mode="parallel")
    with pytest.raises(ValueError):
        QpsConfig(n=3, mode="fast")
    with pytest.raises(ValueError):
        QpsConfig(n=3, ry_construction="magic")


def test_semantic_bitwise_equivalence_exhaustive_n3():
    for j in range(1, 8):
        b = np.zeros(7)
        b[j - 1] = 1.0
        a = solve(QpsConfig(n=3, ry_construction="semantic"), b)
        c = solve(QpsConfig(n=3, ry_construction="bitwise"), b)
        assert fidelity(a.solution, c.solution) >= 1 - 1e-10
        assert a.success_probability == pytest.approx(c.success_probability, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_serial_parallel_equivalence(n):
    rng = np.random.default_rng(50 + n)
    for _ in range(5):
        b = rng.standard_normal(2**n - 1)
        s = solve(QpsConfig(n=n, mode="serial"), b)
        p = solve(QpsConfig(n=n, mode="parallel"), b)
        assert fidelity(s.solution, p.solution) >= 1 - 1e-10
        assert s.success_probability == pytest.approx(p.success_probability, abs=1e-12)


def test_parallel_register_c_uncomputed():
    n = 4
    config = QpsConfig(n=n, mode="parallel")
    circ = build_qps(config)
    rng = np.random.default_rng(9)
    b = rng.standard_normal(2**n - 1)
    amps = np.zeros(2**n, dtype=complex)
    amps[1:] = b / np.linalg.norm(b)
    state = inject_register(StateVector.ground(circ.num_qubits), circ.register("B"), amps)
    state = apply(state, circ)
    c = circ.register("C")
    res = postselect(state, list(c.qubits), [0] * c.width)
    assert res.probability >= 1 - 1e-12


def test_parallel_inversion_unitary_equals_serial():
    # compare action on B (tensor) E for every basis input, bitwise mode
    n = 3
    ser = build_inversion_serial(n)
    par = build_inversion_parallel(n)
    for j in range(1, 2**n):
        out_s = apply(_basis_input(ser, j, n), ser)
        out_p = apply(_basis_input(par, j, n), par)
        dim = 2 ** (3 * n)  # parallel layout extends beyond serial's qubits
        assert np.allclose(out_p.amplitudes[:dim], out_s.amplitudes, atol=1e-12)
        assert np.linalg.norm(out_p.amplitudes[dim:]) <= 1e-12


def test_parallel_depth_improves_with_n():
    ratios = []
    for n in (4, 5):
        serial = count_resources(build_qps(QpsConfig(n=n), materialize_bc=False))
        par = count_resources(
            build_qps(QpsConfig(n=n, mode="parallel"), materialize_bc=False)
        )
        ratios.append(par.depth_serial / serial.depth_serial)
    assert all(r < 1 for r in ratios)
    assert ratios[1] < ratios[0]


def test_serial_qubit_count_is_3n():
    for n in range(2, 9):
        circ = build_qps(QpsConfig(n=n), materialize_bc=False)
        assert circ.num_qubits == 3 * n
