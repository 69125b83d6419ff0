import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqss import phase_ops as ops
from rqss.analytic import alpha_recursion, cost_formula
from rqss.engine import SearchParams, amplify, apply_U, build_psi, run_search
from rqss.engine import _tau_block
from rqss.lattice import LatticeGeometry, QuantumState, flat_index
from rqss.noise import ErrorConfig, ErrorModel
from rqss.phase_ops import CostLedger, OperatorRequest

ALPHA2 = -23 / 81


def test_apply_U_zero_is_identity(rng):
    g = LatticeGeometry(2)
    psi = QuantumState.random(g, rng)
    led = CostLedger()
    out = apply_U(psi.copy(), 0, ErrorModel(ErrorConfig(), g), 40, ledger=led)
    np.testing.assert_array_equal(out.amplitudes, psi.amplitudes)
    assert led.steps == 0


@pytest.mark.parametrize("kappa,expected", [(1, 10), (2, 64), (3, 298)])
def test_apply_U_ledger(kappa, expected):
    g = LatticeGeometry(3)
    led = CostLedger()
    apply_U(QuantumState.basis(g, 13, 13), kappa, ErrorModel(ErrorConfig(0.1, 0.2), g), flat_index(13, 13, g),
            ledger=led)
    assert led.steps == expected == cost_formula(kappa)


@pytest.mark.parametrize("cfg", [ErrorConfig(), ErrorConfig(0.2, -0.3, 0.05, 1)])
def test_apply_U_adjoint_roundtrip(cfg, rng):
    g = LatticeGeometry(3)
    model = ErrorModel(cfg, g)
    t = flat_index(13, 13, g)
    psi = QuantumState.random(g, rng)
    for k in (1, 2, 3):
        out = apply_U(apply_U(psi.copy(), k, model, t), k, model, t, adjoint=True)
        assert np.abs(out.amplitudes - psi.amplitudes).max() <= 1e-10


def test_apply_U_against_dense_products():
    g = LatticeGeometry(2)
    cfg = ErrorConfig(0.15, -0.1, 0.06, 8)
    model = ErrorModel(cfg, g)
    t = flat_index(4, 4, g)
    dense = lambda req: ops.dense_matrix(lambda s: model.apply(s, req), g)  # noqa: E731
    T = dense(OperatorRequest("selective_phase_target", target=t))
    B = {k: dense(OperatorRequest("big_S", level=k)) for k in (1, 2)}
    U0 = np.eye(g.N)
    U1 = U0 @ T @ U0.conj().T @ B[1] @ U0
    U2 = U1 @ T @ U1.conj().T @ B[2] @ U1
    for k, U in ((1, U1), (2, U2)):
        got = ops.dense_matrix(lambda s: apply_U(s, k, model, t), g)
        np.testing.assert_allclose(got, U, atol=1e-12)


def test_base_amplitudes_zero_error():
    for n in (1, 2, 3, 4):
        _, tr = build_psi(SearchParams(n))
        assert abs(tr.alpha[0] - 1 / 3) <= 1e-12
        assert abs(tr.omega[0] - 1 / 9) <= 1e-12
        if n >= 2:
            assert abs(tr.alpha[1] - ALPHA2) <= 1e-12


def test_orthogonality_residual_zero_error():
    _, tr = build_psi(SearchParams(3))
    assert len(tr.residual) == 3
    assert tr.max_residual <= 1e-12


def test_build_psi_matches_recomposed_U(rng):
    for cfg in (ErrorConfig(0.2, 0.1), ErrorConfig(-0.1, 0.3, 0.08, 2)):
        p = SearchParams(3, errors=cfg)
        model = p.error_model()
        psi, tr = build_psi(p, model)
        ref = apply_U(QuantumState.basis(p.geometry, *p.target), 2, model, p.target_index)
        np.testing.assert_allclose(psi.amplitudes, ref.amplitudes, atol=1e-12)
        assert tr.steps == [cost_formula(k) for k in range(3)]


def test_through_n_diagnostic():
    p = SearchParams(2, through_n=True)
    psi, tr = build_psi(p)
    assert len(tr.alpha) == 2 and tr.steps[-1] == cost_formula(2)
    ref = apply_U(QuantumState.basis(p.geometry, *p.target), 2, p.error_model(), p.target_index)
    np.testing.assert_allclose(psi.amplitudes, ref.amplitudes, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_recursion_fidelity(n, e, d):
    _, tr = build_psi(SearchParams(n, errors=ErrorConfig(e, d)))
    assert np.abs(np.asarray(tr.alpha) - alpha_recursion(n, e, d).alpha).max() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi),
       st.floats(0, 0.1), st.integers(0, 1000))
def test_orthogonality_invariant(n, e, d, nu, seed):
    _, tr = build_psi(SearchParams(n, errors=ErrorConfig(e, d, nu, seed)))
    assert tr.max_residual <= 1e-10


def test_monotone_decay_zero_error():
    _, tr = build_psi(SearchParams(5))
    om = tr.omega
    assert np.all(np.diff(om) < 0)
    np.testing.assert_allclose(om[1:] / om[:-1], (1 - 4 * om[:-1] / 3) ** 2, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_conjugation_identity_local_errors(n):
    # with E present, <s_k|E psi_{k-1}> follows the ideal recursion seeded by <s_1|E|t>
    cfg = ErrorConfig(0.2, -0.1, 0.1, 4)
    p = SearchParams(n, errors=cfg)
    model = p.error_model()
    primed = []
    for k in range(1, n + 1):
        psi = apply_U(QuantumState.basis(p.geometry, *p.target), k - 1, model, p.target_index)
        primed.append(_tau_block(model.local.apply(psi), k, p.target)[0])
    model_alpha = alpha_recursion(n, cfg.epsilon, cfg.delta, alpha1=primed[0]).alpha
    assert np.abs(np.asarray(primed) - model_alpha).max() <= 1e-9
    assert abs(primed[0] - 1 / 3) > 1e-3


def test_amplify_n2_auto():
    res = run_search(SearchParams(2))
    theta = math.asin(23 / 81)
    assert res.iterations == 2
    assert res.success_probability == pytest.approx(math.sin(5 * theta) ** 2, abs=1e-12)
    assert res.success_probability == pytest.approx(0.98288, abs=1e-5)


def test_amplify_fixed_three_steps():
    res = run_search(SearchParams(2, amplification=3))
    assert res.total_steps == 188
    assert res.success_probability == pytest.approx(math.sin(7 * math.asin(23 / 81)) ** 2, abs=1e-12)


def test_amplify_identity_gates():
    res = run_search(SearchParams(2, errors=ErrorConfig(np.pi, np.pi)))
    assert res.success_probability == pytest.approx(1 / 81, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_amplify_zero_iterations_gives_omega_n(n):
    res = run_search(SearchParams(n, errors=ErrorConfig(0.1, -0.05), amplification=0))
    assert res.success_probability == pytest.approx(res.trace.omega[-1], abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_amplification_follows_rotation(n):
    res = run_search(SearchParams(n))
    th = math.asin(abs(res.trace.alpha[-1]))
    assert res.success_probability == pytest.approx(math.sin((2 * res.iterations + 1) * th) ** 2, abs=1e-6)


def test_dense_oracle_full_search_n2():
    cfg = ErrorConfig(0.07, -0.04, 0.05, 3)
    p = SearchParams(2, errors=cfg, amplification=3)
    model = p.error_model()
    g, t = p.geometry, p.target_index
    dense = lambda req: ops.dense_matrix(lambda s: model.apply(s, req), g)  # noqa: E731
    T = dense(OperatorRequest("selective_phase_target", target=t))
    U1 = T @ dense(OperatorRequest("big_S", level=1))
    B2 = dense(OperatorRequest("big_S", level=2))
    psi = U1.conj().T @ dense(OperatorRequest("S_k", level=2))[:, 0]
    for _ in range(3):
        psi = U1.conj().T @ B2 @ U1 @ T @ psi
    assert run_search(p).success_probability == pytest.approx(abs(psi[t]) ** 2, abs=1e-12)


def test_scan_mode():
    res = run_search(SearchParams(3, amplification="scan"))
    assert res.success_probability == pytest.approx(max(res.scan))
    assert res.iterations == int(np.argmax(res.scan))
    auto = run_search(SearchParams(3))
    assert res.success_probability >= auto.success_probability - 1e-12


def test_end_to_end_n3():
    assert run_search(SearchParams(3)).success_probability >= 0.9


def test_robust_n4():
    p0 = run_search(SearchParams(4)).success_probability
    p1 = run_search(SearchParams(4, errors=ErrorConfig(0.05, 0.05))).success_probability
    assert abs(p1 - p0) <= 0.05


def test_run_search_total_steps_composition():
    for n in (2, 3):
        res = run_search(SearchParams(n))
        j = res.iterations
        expect = 2 * (3**n - 1) + cost_formula(n - 1) + j * (2 * cost_formula(n - 1) + 4 * 3**n - 3 + 1)
        assert res.total_steps == expect


def test_circuit_path_search_matches_fast():
    cfg = ErrorConfig(0.1, 0.05, 0.04, 6)
    a = run_search(SearchParams(2, errors=cfg))
    b = run_search(SearchParams(2, errors=cfg, fastpath=False))
    assert a.success_probability == pytest.approx(b.success_probability, abs=1e-12)
    assert a.total_steps == b.total_steps


def test_target_defaults_and_warning():
    p = SearchParams(3)
    assert p.target == (13, 13) and p.centered
    assert not run_search(SearchParams(2, target=(0, 0))).params.centered
    assert run_search(SearchParams(2, target=(0, 0))).target_warning


def test_invalid_amplification():
    with pytest.raises(ValueError):
        SearchParams(2, amplification="many")
