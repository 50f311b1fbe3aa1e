import math

import numpy as np
import pytest

from paulisdp.certify import (
    CertifyError,
    brute_force_qubo,
    purity_uniqueness,
    sandwich_report,
    stability_diag,
    xi_lp,
)
from paulisdp.gibbs import BackendConfig, DenseBackend, GibbsParams
from paulisdp.hu import SolveReport, gw_binary_search, gw_to_ugw
from paulisdp.instances import (
    Instance,
    InstanceFlags,
    gen_commuting4,
    gen_hamming_family,
    gen_random_pauli_sparse,
)
from paulisdp.paulis import (
    ConstraintSet,
    PauliOperator,
    PauliString,
    diagonal_group,
    enumerate_traceless,
)
from paulisdp.rounding import RoundedSolution
from paulisdp.simplex import UNBOUNDED, simplex_max


def test_brute_force_examples():
    op = PauliOperator(2, {PauliString.from_label("XX"): 1.0})
    res = brute_force_qubo(op)
    assert res["value"] == pytest.approx(4.0)
    assert np.all(res["argmax"] == 1.0)
    # diagonal cancellation: C = Z on one qubit
    res = brute_force_qubo(PauliOperator(1, {PauliString.from_label("Z"): 1.0}))
    assert res["value"] == pytest.approx(0.0)


def test_brute_force_matches_direct_enumeration():
    rng = np.random.default_rng(2)
    for seed in range(3):
        inst = gen_random_pauli_sparse(3, 5, seed=seed)
        dense = inst.op.to_dense().real
        best = -np.inf
        for g in range(1 << 8):
            x = 1.0 - 2.0 * ((g >> (7 - np.arange(8))) & 1)
            best = max(best, float(x @ dense @ x))
        assert brute_force_qubo(inst.op, cap_n=3)["value"] == pytest.approx(best)


def test_brute_force_cap():
    with pytest.raises(CertifyError):
        brute_force_qubo(gen_random_pauli_sparse(5, 4, seed=0).op)


def test_xi_single_site_equals_v():
    for n in (3, 4, 6):
        s = ConstraintSet(n, tuple(1 << (n - 1 - j) for j in range(n)))
        res = xi_lp(s, 0.73)
        assert not res["unbounded"]
        assert res["xi"] == pytest.approx(0.73, abs=1e-9)


def test_xi_commuting4_is_three_v():
    s = enumerate_traceless(diagonal_group(gen_commuting4().op))
    res = xi_lp(s, 1.0)
    assert res["xi"] == pytest.approx(3.0, abs=1e-9)
    res = xi_lp(s, 0.4)
    assert res["xi"] == pytest.approx(1.2, abs=1e-9)


def test_xi_single_constraint_and_homogeneity():
    s = ConstraintSet(3, (0b110,))
    assert xi_lp(s, 0.5)["xi"] == pytest.approx(0.5, abs=1e-9)
    s2 = enumerate_traceless(diagonal_group(gen_commuting4().op))
    a = xi_lp(s2, 1.0)["xi"]
    b = xi_lp(s2, 2.5)["xi"]
    assert b == pytest.approx(2.5 * a, abs=1e-9)


def test_xi_monotone_under_lp_row_removal():
    # dropping an achievable sign-pattern row relaxes the program
    import itertools

    def xi_from_rows(rows, v):
        m = rows.shape[1]
        best = 0.0
        for tau in itertools.product((1.0, -1.0), repeat=m):
            a = -(rows * np.asarray(tau))
            st, _, val = simplex_max(np.ones(m), a, np.full(rows.shape[0], v))
            if st == UNBOUNDED:
                return math.inf
            best = max(best, val)
        return best

    rows = np.array([[1.0, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    full = xi_from_rows(rows, 1.0)
    for drop in range(4):
        sub = np.delete(rows, drop, axis=0)
        assert xi_from_rows(sub, 1.0) >= full - 1e-9


def test_xi_caps_and_validation():
    s = ConstraintSet(3, (1, 2, 3))
    with pytest.raises(CertifyError):
        xi_lp(s, 0.0)
    with pytest.raises(CertifyError):
        xi_lp(s, 1.0, cap_m=2)


def test_simplex_unbounded_detection():
    st, _, _ = simplex_max([1.0], [[-1.0]], [1.0])
    assert st == UNBOUNDED


def test_stability_diag_values():
    assert stability_diag(0, 1e-3, 1.0) == 0.0
    assert stability_diag(2, 1e-3, 1.0) == pytest.approx(3 ** (1 / 6) * 0.1)
    assert stability_diag(3, 1e-3, 2.0) == pytest.approx(7 ** (1 / 6) * 0.1 * 2.0)
    # monotone in k and eps
    assert stability_diag(4, 1e-3, 1.0) > stability_diag(3, 1e-3, 1.0)
    assert stability_diag(3, 1e-2, 1.0) > stability_diag(3, 1e-3, 1.0)


def test_purity_certificate_pass_and_fail():
    # nondegenerate top eigenvalue: hypercube passes at large scale
    hyper = gen_hamming_family(4, 1, "hypercube")
    s0 = ConstraintSet(4, ())
    be = DenseBackend(hyper, s0, BackendConfig())
    cert = purity_uniqueness(hyper, s0, GibbsParams(1.0, {}), [1, 2, 4, 8, 16],
                             0.01, be)
    assert cert.payload["passed"]
    purities = cert.payload["purities"]
    assert all(b >= a - 1e-12 for a, b in zip(purities, purities[1:]))
    # doubly degenerate top eigenvalue: purity plateaus at 1/2 per the pair,
    # i.e. tr sigma^2 -> 1/2 >= 1/4 ... construct an exactly 2-fold degenerate
    # top: C = X (x) I has top eigenspace of dimension 2^(n-1); plateau 2^-(n-1)
    deg = Instance(
        PauliOperator(3, {PauliString.from_label("XII"): 1.0}),
        InstanceFlags(real_symmetric=True),
    )
    cert = purity_uniqueness(deg, ConstraintSet(3, ()), GibbsParams(1.0, {}),
                             [1, 4, 16, 64], 0.01)
    assert not cert.payload["passed"]
    assert max(cert.payload["purities"]) <= 0.25 + 1e-9
    # lambda = 0 purity is 2^-n: fails
    cert0 = purity_uniqueness(hyper, s0, GibbsParams(0.0, {}), [1.0], 0.01, be)
    assert not cert0.payload["passed"]
    assert cert0.payload["purities"][0] == pytest.approx(2.0 ** -4)


def test_purity_requires_trivial_group():
    c4 = gen_commuting4()
    with pytest.raises(CertifyError):
        purity_uniqueness(c4, ConstraintSet(4, ()), GibbsParams(1.0, {}), [1.0], 0.01)


def test_sandwich_report():
    gw = SolveReport(gw_lower=0.8, gw_upper=0.9, eps=0.1,
                     lambda_star=GibbsParams(), n=4)
    rounded = RoundedSolution("implicit", 0.72, 0.02, 100)
    cert = sandwich_report(gw, rounded)
    assert cert.payload["ratio"] == pytest.approx(0.8)
    lo, hi = cert.payload["bracket"]
    assert lo == pytest.approx(0.70) and hi == pytest.approx(1.0)
    assert cert.payload["ratio"] <= 1 + (gw.eps + rounded.energy_stderr) / gw.gw_upper


def test_xi_consequence_bounds_eps_dependence():
    # |GW(eps) - GW(eps/8)| <= eps * Xi(S, GW) within solver tolerance
    inst = gen_commuting4()
    s = enumerate_traceless(diagonal_group(inst.op))
    be = DenseBackend(inst, s, BackendConfig())
    eps = 0.2
    coarse = gw_binary_search(inst, s, eps, be)
    fine = gw_binary_search(inst, s, eps / 8, be)
    mid_c = 0.5 * (coarse.gw_lower + coarse.gw_upper)
    mid_f = 0.5 * (fine.gw_lower + fine.gw_upper)
    xi = xi_lp(s, max(mid_c, 1e-6))["xi"]
    # solver tolerance: each bracket is only resolved to its own eps
    assert abs(mid_c - mid_f) <= eps * xi + eps + eps / 8


def test_full_sandwich_on_brute_forceable_instances():
    # rounded * 2^n ||C|| <= QUBO <= ugw(gw_upper + eps), zero violations
    from paulisdp.rounding import round_explicit, sample_rotation

    for seed in (0, 1, 2):
        inst = gen_random_pauli_sparse(4, 6, seed=seed)
        s = enumerate_traceless(diagonal_group(inst.op))
        be = DenseBackend(inst, s, BackendConfig())
        eps = 0.1
        rep = gw_binary_search(inst, s, eps, be)
        rot = sample_rotation(4, seed=seed)
        sol = round_explicit(inst, s, rep.lambda_star, rot, be)
        qubo = brute_force_qubo(inst.op)["value"]
        norm = inst.op.norm_upper_bound
        assert gw_to_ugw(sol.energy_density, 4, norm) <= qubo + 1e-9
        assert qubo <= gw_to_ugw(rep.gw_upper + eps, 4, norm) + 1e-9
