import math

import numpy as np
import pytest

from paulisdp.instances import DEFAULT_INITIATOR, gen_commuting4, default_kronecker_spec
from paulisdp.paulis import PauliOperator, PauliString
from paulisdp.sparsify import (
    ExplicitSampler,
    kron_sampler,
    renormalize_sparsified,
    sample_count,
    sparsified_instance,
    sparsify,
)


def test_sample_count_formula():
    assert sample_count(3, 2.0, 0.5) == math.floor(2 * 3 * 4.0 * 4 / 1.5)
    assert sample_count(1, 1.0, 1.0) == 1
    # doubling l1 quadruples the count (up to floor)
    base = sample_count(4, 1.3, 0.25)
    assert abs(sample_count(4, 2.6, 0.25) - 4 * base) <= 4
    with pytest.raises(ValueError):
        sample_count(2, 1.0, 0.0)


def test_sparsify_single_term_exact():
    op = PauliOperator(3, {PauliString.from_label("XZI"): -0.7})
    s = ExplicitSampler(op, seed=0)
    for m in (1, 5, 50):
        out = sparsify(s, m)
        assert out.terms == pytest.approx(op.terms)


def test_sparsify_l1_contraction_and_support():
    op = gen_commuting4().op
    s = ExplicitSampler(op, seed=3)
    out = sparsify(s, 40)
    assert out.pauli_l1 <= op.pauli_l1 + 1e-12
    assert set(out.terms) <= set(op.terms)


def test_sparsify_unbiased_dense_mean():
    op = gen_commuting4().op
    dense = op.to_dense().real
    acc = np.zeros_like(dense)
    reps = 300
    for r in range(reps):
        out = sparsify(ExplicitSampler(op, seed=r), 8)
        acc += out.to_dense().real
    acc /= reps
    # operator-norm deviation of the empirical mean shrinks like 1/sqrt(reps*m)
    err = float(np.max(np.abs(np.linalg.eigvalsh(acc - dense))))
    assert err < 3.0 * op.pauli_l1 / math.sqrt(reps * 8)


def test_kron_sampler_marginals_and_l1():
    spec = default_kronecker_spec(2)
    s = kron_sampler(spec, seed=5)
    norm_a = float(np.max(np.abs(np.linalg.eigvalsh(DEFAULT_INITIATOR))))
    assert s.l1 == pytest.approx((5.0 / norm_a) ** 2)
    draws = s.draw_many(20000)
    # per-factor marginal of the first factor: count first-factor labels
    counts: dict = {}
    for p, _ in draws:
        first = p.restrict((1, 2)) if False else PauliString(2, p.x >> 2, p.z >> 2)
        counts[first.label] = counts.get(first.label, 0) + 1
    probs = {"II": 2 / 5, "IX": 0.5 / 5, "XI": 0.5 / 5, "XX": 1 / 5, "XZ": 0.5 / 5,
             "ZX": 0.5 / 5}
    for label, p in probs.items():
        got = counts.get(label, 0) / 20000
        sigma = math.sqrt(p * (1 - p) / 20000)
        assert abs(got - p) < 4 * sigma, (label, got, p)


def test_kron_sampler_deterministic_single_term():
    spec_op = np.array([[0.0, 1.0], [1.0, 0.0]])  # pure X factor
    from paulisdp.instances import KroneckerSpec

    s = kron_sampler(KroneckerSpec([spec_op], repetitions=3), seed=0)
    for p, sign in s.draw_many(5):
        assert p.label == "XXX" and sign == 1.0


def test_renormalize():
    op = gen_commuting4().op.scaled(7.0)
    out = renormalize_sparsified(op)
    assert out.pauli_l1 == pytest.approx(1.0)
    assert all(c == pytest.approx(1.0 / 8.0) for _, c in out.items())
    again = renormalize_sparsified(out)
    assert again.terms == pytest.approx(out.terms)
    with pytest.raises(ValueError):
        renormalize_sparsified(PauliOperator(2, {}))


def test_sparsification_operator_norm_bound():
    # Kronecker k=2 at eps=0.5: ||C - C_tilde|| <= 0.5 in >= 2/3 of seeded runs
    spec = default_kronecker_spec(2)
    dense = None
    ok = 0
    runs = 15
    for seed in range(runs):
        s = kron_sampler(spec, seed=seed)
        if dense is None:
            ops = s._spec.factor_ops()
            m0 = ops[0].to_dense().real
            dense = np.kron(m0, ops[1].to_dense().real)
        m = sample_count(4, s.l1, 0.5)
        out = sparsify(s, m)
        err = float(np.max(np.abs(np.linalg.eigvalsh(out.to_dense().real - dense))))
        ok += err <= 0.5
    assert ok >= (2 * runs) // 3


def test_sparsified_instance_metadata():
    inst = sparsified_instance(default_kronecker_spec(2), 0.5, seed=1)
    assert inst.op.pauli_l1 == pytest.approx(1.0)
    assert inst.metadata["model"] == "kronecker_sparsified"
    assert inst.op.norm_upper_bound == pytest.approx(1.0)


def test_feasibility_transfer_holder():
    # |tr((C - C~)Y)| <= ||C - C~|| for unit-trace PSD Y
    rng = np.random.default_rng(0)
    spec = default_kronecker_spec(2)
    s = kron_sampler(spec, seed=9)
    out = sparsify(s, 30)
    ops = spec.factor_ops()
    dense = np.kron(ops[0].to_dense().real, ops[1].to_dense().real)
    diff = out.to_dense().real - dense
    norm = float(np.max(np.abs(np.linalg.eigvalsh(diff))))
    for _ in range(20):
        g = rng.normal(size=(16, 16))
        y = g @ g.T
        y /= np.trace(y)
        assert abs(np.sum(diff * y)) <= norm + 1e-10
