"""Constitutive model tests.

The viscoplastic backward-Euler update is checked against an independent
explicit (RK4) sub-stepped integrator of the flow ODE along piecewise-linear
strain paths. The expected trajectories below were generated by
``_rk4_flow_oracle`` with 20'000 substeps per step (run this file as a script
to regenerate); the update must match them to 1e-4 relative.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hrom.errors import ValidationError
from hrom.materials import (
    ElasParams,
    ElasticLaw,
    EvpParams,
    MaterialState,
    TemperatureTable,
    ViscoplasticLaw,
    _cubic_stress,
    deviator,
    evaluate_elas,
    evaluate_evp,
    load_material,
    save_material,
    tensor_to_strain,
)

# Parameters shared by the oracle histories (m = 1, no recall: the flow
# relaxes fast relative to the step length, where backward Euler is accurate).
ORACLE_ELAS = dict(y1111=2.0e5, y1122=0.8e5, y1212=0.6e5, alpha=1.0e-5)
ORACLE_EVP = dict(C=2.0e4, D=0.0, K=50.0, m=1.0, R0=100.0)
ORACLE_TIMES = np.linspace(1.0, 10.0, 10)


def _history_ramp_hold(tk):
    e = np.zeros(6)
    e[0] = 2.5e-3 * min(tk / 4.0, 1.0)
    return e


def _history_ramp_unload(tk):
    e = np.zeros(6)
    if tk <= 4.0:
        e[0] = 2.5e-3 * tk / 4.0
    elif tk <= 7.0:
        e[0] = 2.5e-3
    else:
        e[0] = 2.5e-3 - 1.5e-3 * (tk - 7.0) / 3.0
    return e


# Frozen RK4 oracle trajectories (sigma_11, sigma_22, p at the step times).
ORACLE_A = {
    "sig11": [125.0, 221.43877551020404, 303.5816326530612, 385.7244897959183,
              385.71428571428567, 385.71428571428567, 385.71428571428567,
              385.71428571428567, 385.71428571428567, 385.71428571428567],
    "sig22": [50.0, 114.28061224489795, 185.7091836734694, 257.13775510204084,
              257.1428571428571, 257.1428571428571, 257.1428571428571,
              257.1428571428571, 257.1428571428571, 257.1428571428571],
    "p": [0.0, 0.00023801020408163268, 0.0005951530612244898, 0.000952295918367347,
          0.0009523809523809523, 0.0009523809523809523, 0.0009523809523809523,
          0.0009523809523809523, 0.0009523809523809523, 0.0009523809523809523],
}
ORACLE_B = {
    "sig11": [125.0, 221.43877551020404, 303.5816326530612, 385.7244897959183,
              385.71428571428567, 385.71428571428567, 385.71428571428567,
              285.7142857142857, 185.71428571428572, 85.7142857142857],
    "sig22": [50.0, 114.28061224489795, 185.7091836734694, 257.13775510204084,
              257.1428571428571, 257.1428571428571, 257.1428571428571,
              217.14285714285714, 177.14285714285714, 137.1428571428571],
    "p": [0.0, 0.00023801020408163268, 0.0005951530612244898, 0.000952295918367347,
          0.0009523809523809523, 0.0009523809523809523, 0.0009523809523809523,
          0.0009523809523809523, 0.0009523809523809523, 0.0009523809523809523],
}


def _rk4_flow_oracle(elas_kw, evp_kw, times, history, substeps_per_step):
    """Explicit RK4 integration of the flow ODE along a piecewise-linear path."""
    elas = ElasParams(**elas_kw)
    y11, y12, y44 = (np.asarray(float(c)) for c in elas.coefficients(20.0))
    C, D, K, m, R0 = (evp_kw[k] for k in ("C", "D", "K", "m", "R0"))

    def rate(t, p, eps):
        sig = _cubic_stress(y11, y12, y44, (eps - tensor_to_strain(t))[None, :])[0]
        s = deviator(sig) - C * t
        seq = np.sqrt(1.5 * ((s[:3] ** 2).sum() + 2 * (s[3:] ** 2).sum()))
        pdot = (max(seq - R0, 0.0) / K) ** m
        if seq > 0.0 and pdot > 0.0:
            return pdot * (1.5 * s / seq - D * t), pdot
        return np.zeros(6), 0.0

    t = np.zeros(6)
    p = 0.0
    tprev, eprev = 0.0, np.zeros(6)
    sig_out, p_out = [], []
    for tk in times:
        ek = history(tk)
        h = (tk - tprev) / substeps_per_step
        for i in range(substeps_per_step):
            e0 = eprev + (i / substeps_per_step) * (ek - eprev)
            e1 = eprev + ((i + 0.5) / substeps_per_step) * (ek - eprev)
            e2 = eprev + ((i + 1.0) / substeps_per_step) * (ek - eprev)
            k1t, k1p = rate(t, p, e0)
            k2t, k2p = rate(t + 0.5 * h * k1t, p + 0.5 * h * k1p, e1)
            k3t, k3p = rate(t + 0.5 * h * k2t, p + 0.5 * h * k2p, e1)
            k4t, k4p = rate(t + h * k3t, p + h * k3p, e2)
            t = t + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
            p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        sig = _cubic_stress(y11, y12, y44, (ek - tensor_to_strain(t))[None, :])[0]
        sig_out.append(sig.copy())
        p_out.append(p)
        tprev, eprev = tk, ek
    return np.array(sig_out), np.array(p_out)


def _backward_euler_path(law, times, history):
    state = MaterialState.virgin(1)
    tprev = 0.0
    sig_out, p_out = [], []
    for tk in times:
        r = law.evaluate(history(tk)[None, :], 20.0, tk - tprev, state)
        state = r.state
        sig_out.append(r.stress[0])
        p_out.append(state.p[0])
        tprev = tk
    return np.array(sig_out), np.array(p_out)


@pytest.fixture
def elas():
    return ElasParams(**ORACLE_ELAS)


@pytest.fixture
def evp(elas):
    return EvpParams(elas, C=2.0e4, D=30.0, K=500.0, m=2.0, R0=80.0)


# -- elastic law ----------------------------------------------------------------


def test_elastic_zero_strain_reference_temperature(elas):
    r = evaluate_elas(elas, np.zeros(6), 20.0)
    assert_allclose(r.stress, 0.0, atol=1e-14)
    assert_allclose(r.tangent, elas.stiffness(20.0), rtol=0, atol=0)


def test_elastic_thermal_strain_exactly_compensated(elas):
    T = 333.0
    eps = elas.thermal_strain(T)
    r = evaluate_elas(elas, eps, T)
    assert_allclose(r.stress, 0.0, atol=1e-10)


def test_elastic_isotropic_reduction_matches_hooke():
    lam, mu = 1.1e5, 0.7e5
    params = ElasParams(lam + 2 * mu, lam, mu, 1.0e-5)
    e11 = 1.3e-3
    eps = np.array([e11, 0, 0, 0, 0, 0.0])
    r = evaluate_elas(params, eps, 20.0)
    assert_allclose(r.stress[0], (lam + 2 * mu) * e11, rtol=1e-14)
    assert_allclose(r.stress[1], lam * e11, rtol=1e-14)
    assert_allclose(r.stress[2], lam * e11, rtol=1e-14)
    assert_allclose(r.stress[3:], 0.0, atol=1e-14)
    # pure shear: sigma_12 = mu * gamma_12 = 2 mu eps_12
    gamma = 2.0e-3
    r = evaluate_elas(params, np.array([0, 0, 0, 0, 0, gamma]), 20.0)
    assert_allclose(r.stress[5], mu * gamma, rtol=1e-14)


def test_elastic_stiffness_positive_definite_at_all_tabulated_temperatures():
    params = ElasParams(
        y1111=TemperatureTable([20, 400, 800], [2.2e5, 1.9e5, 1.5e5]),
        y1122=TemperatureTable([20, 400, 800], [0.9e5, 0.85e5, 0.7e5]),
        y1212=TemperatureTable([20, 800], [0.7e5, 0.5e5]),
        alpha=TemperatureTable([20, 800], [1.1e-5, 1.6e-5]),
    )
    for T in params.tabulated_temperatures():
        np.linalg.cholesky(params.stiffness(float(T)))


def test_elastic_rejects_indefinite_table():
    with pytest.raises(ValidationError):
        ElasParams(1.0e5, 1.2e5, 0.5e5, 1e-5)  # y1111 - y1122 < 0


def test_temperature_table_clamps_and_interpolates():
    tab = TemperatureTable([100.0, 200.0], [1.0, 3.0])
    assert tab(50.0) == 1.0
    assert tab(250.0) == 3.0
    assert tab(150.0) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        TemperatureTable([100.0, 100.0], [1.0, 2.0])


# -- viscoplastic law -------------------------------------------------------------


def test_evp_thermal_strain_only_stays_elastic(evp):
    T = 250.0
    eps = evp.elastic.thermal_strain(T)[None, :]
    law = ViscoplasticLaw(evp)
    state = MaterialState.virgin(1)
    r = law.evaluate(eps, T, 0.5, state)
    assert_allclose(r.stress, 0.0, atol=1e-10)
    assert r.state.p[0] == 0.0
    assert_allclose(r.state.eps_p, 0.0, atol=0)


def test_evp_below_yield_matches_elastic_with_plastic_offset(evp):
    law = ViscoplasticLaw(evp)
    eps_p = np.array([[4e-4, -2e-4, -2e-4, 1e-4, 0.0, 0.0]])
    state = MaterialState(eps_p, np.array([1e-3]))
    eps = tensor_to_strain(eps_p[0]) + np.array([1e-4, 0, 0, 0, 0, 0.0])
    r = law.evaluate(eps[None, :], 20.0, 1.0, state)
    r_el = ElasticLaw(evp.elastic).evaluate(
        (eps - tensor_to_strain(eps_p[0]))[None, :], 20.0
    )
    assert_allclose(r.stress, r_el.stress, rtol=1e-13)
    assert r.state.p[0] == state.p[0]
    assert_allclose(r.tangent, evp.elastic.stiffness(np.array([20.0])), rtol=0, atol=0)


@pytest.mark.parametrize(
    "history,expected",
    [(_history_ramp_hold, ORACLE_A), (_history_ramp_unload, ORACLE_B)],
    ids=["ramp-hold", "ramp-unload"],
)
def test_evp_trajectory_matches_substepped_explicit_oracle(history, expected):
    elas = ElasParams(**ORACLE_ELAS)
    law = ViscoplasticLaw(EvpParams(elas, **ORACLE_EVP))
    sig, p = _backward_euler_path(law, ORACLE_TIMES, history)
    sig_ref = np.column_stack([expected["sig11"], expected["sig22"]])
    err_sig = np.abs(sig[:, :2] - sig_ref).max() / np.abs(sig_ref).max()
    err_p = np.abs(p - expected["p"]).max() / np.max(expected["p"])
    assert err_sig <= 1e-4
    assert err_p <= 1e-4


def test_evp_consistent_tangent_matches_finite_differences(evp):
    law = ViscoplasticLaw(evp)
    rng = np.random.default_rng(3)
    for T in (20.0, 350.0):
        eps = np.array([[2.1e-3, -4e-4, 1e-4, 6e-4, -3e-4, 2e-4]])
        eps += 1e-4 * rng.standard_normal((1, 6))
        state = MaterialState.virgin(1)
        # march two steps so the test point starts from a flowed state
        state = law.evaluate(0.5 * eps, T, 0.4, state).state
        r = law.evaluate(eps, T, 0.4, state)
        assert r.state.p[0] > state.p[0]  # genuinely plastic
        h = 1e-7 * np.linalg.norm(eps)
        fd = np.zeros((6, 6))
        for j in range(6):
            ep, em = eps.copy(), eps.copy()
            ep[0, j] += h
            em[0, j] -= h
            fd[:, j] = (
                law.evaluate(ep, T, 0.4, state).stress[0]
                - law.evaluate(em, T, 0.4, state).stress[0]
            ) / (2 * h)
        assert np.abs(r.tangent[0] - fd).max() / np.abs(fd).max() <= 1e-4


def test_evp_rate_consistency_first_order(evp):
    """Backward-Euler p-increment converges at order >= 0.9 to the ODE solution."""
    law = ViscoplasticLaw(evp)
    e_start = np.zeros(6)
    e_start[0] = 1.5e-3
    state0 = law.evaluate(e_start[None, :], 20.0, 0.5, MaterialState.virgin(1)).state
    e_end = np.zeros(6)
    e_end[0] = 3.0e-3
    h0 = 0.2

    def segment_oracle(nsub):
        y11, y12, y44 = (np.asarray(float(c)) for c in evp.elastic.coefficients(20.0))
        C, D, K, m, R0 = (float(f(20.0)) for f in (evp.C, evp.D, evp.K, evp.m, evp.R0))
        t, p = state0.eps_p[0].copy(), state0.p[0]
        hh = h0 / nsub
        for i in range(nsub):
            def rate(t_, p_, eps):
                sig = _cubic_stress(y11, y12, y44, (eps - tensor_to_strain(t_))[None, :])[0]
                s = deviator(sig) - C * t_
                seq = np.sqrt(1.5 * ((s[:3] ** 2).sum() + 2 * (s[3:] ** 2).sum()))
                pdot = (max(seq - R0, 0.0) / K) ** m
                tdot = pdot * (1.5 * s / seq - D * t_) if seq > 0 and pdot > 0 else np.zeros(6)
                return tdot, pdot
            e0 = e_start + (i / nsub) * (e_end - e_start)
            e1 = e_start + ((i + 0.5) / nsub) * (e_end - e_start)
            e2 = e_start + ((i + 1) / nsub) * (e_end - e_start)
            k1t, k1p = rate(t, p, e0)
            k2t, k2p = rate(t + 0.5 * hh * k1t, p + 0.5 * hh * k1p, e1)
            k3t, k3p = rate(t + 0.5 * hh * k2t, p + 0.5 * hh * k2p, e1)
            k4t, k4p = rate(t + hh * k3t, p + hh * k3p, e2)
            t = t + hh / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
            p = p + hh / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        return p - state0.p[0]

    dp_exact = segment_oracle(20000)
    errors = []
    for k in range(3):
        nsteps = 2 ** k
        state = state0
        for i in range(1, nsteps + 1):
            e = e_start + (i / nsteps) * (e_end - e_start)
            state = law.evaluate(e[None, :], 20.0, h0 / nsteps, state).state
        errors.append(abs((state.p[0] - state0.p[0]) - dp_exact))
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    assert min(orders) >= 0.9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_evp_cumulated_plasticity_never_decreases(evp, seed):
    law = ViscoplasticLaw(evp)
    rng = np.random.default_rng(seed)
    state = MaterialState.virgin(4)
    eps = np.zeros((4, 6))
    for _ in range(30):
        eps += 4e-4 * rng.standard_normal((4, 6))
        r = law.evaluate(eps, 20.0 + 200.0 * rng.random(), 0.3, state)
        assert np.all(r.state.p >= state.p - 1e-16)
        state = r.state


def test_evp_requires_positive_dt(evp):
    law = ViscoplasticLaw(evp)
    with pytest.raises(ValidationError):
        law.evaluate(np.zeros((1, 6)), 20.0, 0.0, MaterialState.virgin(1))


def test_evp_params_validation(elas):
    with pytest.raises(ValidationError):
        EvpParams(elas, C=1e4, D=0.0, K=-1.0, m=2.0, R0=10.0)
    with pytest.raises(ValidationError):
        EvpParams(elas, C=1e4, D=0.0, K=10.0, m=0.5, R0=10.0)
    with pytest.raises(ValidationError):
        EvpParams(elas, C=1e4, D=0.0, K=10.0, m=2.0, R0=-5.0)


def test_single_point_wrappers(elas, evp):
    r = evaluate_elas(elas, np.array([1e-3, 0, 0, 0, 0, 0.0]), 20.0)
    assert r.stress.shape == (6,)
    assert r.tangent.shape == (6, 6)
    r2 = evaluate_evp(evp, MaterialState.virgin(1), np.array([3e-3, 0, 0, 0, 0, 0.0]), 20.0, 0.5)
    assert r2.stress.shape == (6,)
    assert r2.state.p[0] > 0.0


# -- HRMAT I/O ---------------------------------------------------------------------


def test_hrmat_round_trip(tmp_path, evp):
    law = ViscoplasticLaw(evp)
    path = tmp_path / "mat.hrmat"
    save_material(law, path)
    loaded = load_material(path)
    assert isinstance(loaded, ViscoplasticLaw)
    for name in ("y1111", "y1122", "y1212", "alpha"):
        a, b = getattr(evp.elastic, name), getattr(loaded.params.elastic, name)
        assert_allclose(a.temperatures, b.temperatures)
        assert_allclose(a.values, b.values)
    for name in ("C", "D", "K", "m", "R0"):
        a, b = getattr(evp, name), getattr(loaded.params, name)
        assert_allclose(a.values, b.values)


def test_hrmat_elastic_only(tmp_path, elas):
    path = tmp_path / "mat.hrmat"
    save_material(ElasticLaw(elas), path)
    assert isinstance(load_material(path), ElasticLaw)


def test_hrmat_rejects_malformed_files(tmp_path):
    bad = tmp_path / "bad.hrmat"
    bad.write_text("HRMAT 2\n[elas]\n")
    with pytest.raises(ValidationError):
        load_material(bad)
    bad.write_text("HRMAT 1\n[elas]\ny1111 20:1e5\n")
    with pytest.raises(ValidationError, match="missing"):
        load_material(bad)
    bad.write_text("HRMAT 1\n[weird]\n")
    with pytest.raises(ValidationError, match="unknown section"):
        load_material(bad)


if __name__ == "__main__":
    # Regenerate the frozen oracle trajectories (takes a few minutes).
    for name, hist in (("A", _history_ramp_hold), ("B", _history_ramp_unload)):
        sig, p = _rk4_flow_oracle(ORACLE_ELAS, ORACLE_EVP, ORACLE_TIMES, hist, 20000)
        print(f"ORACLE_{name} sig11 = {sig[:, 0].tolist()!r}")
        print(f"ORACLE_{name} sig22 = {sig[:, 1].tolist()!r}")
        print(f"ORACLE_{name} p     = {p.tolist()!r}")
