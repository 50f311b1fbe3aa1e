import itertools

import numpy as np
import pytest

from paulisdp.instances import (
    InstanceError,
    DEFAULT_INITIATOR,
    decompose_dense,
    gen_cluster1d,
    gen_commuting4,
    gen_hamming_family,
    gen_kronecker,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    default_kronecker_spec,
    save_instance,
    structure_report,
)
from paulisdp.paulis import PauliString, diagonal_group, enumerate_traceless


def test_decompose_default_initiator():
    op = decompose_dense(DEFAULT_INITIATOR)
    got = {p.label: c for p, c in op.items()}
    assert got == pytest.approx(
        {"II": 2.0, "IX": 0.5, "XI": 0.5, "XX": 1.0, "XZ": 0.5, "ZX": 0.5}
    )
    assert op.pauli_l1 == pytest.approx(5.0)


def test_decompose_identity_and_roundtrip():
    op = decompose_dense(np.eye(2))
    assert len(op) == 1 and op.terms[PauliString.from_label("I")] == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4))
    a = a + a.T
    op = decompose_dense(a)
    assert np.max(np.abs(op.to_dense().real - a)) < 1e-12


def test_decompose_rejects_nonsymmetric():
    with pytest.raises(InstanceError):
        decompose_dense(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hypercube_dense_is_adjacency():
    inst = gen_hamming_family(2, 1, "hypercube")
    assert sorted(p.label for p, _ in inst.op.items()) == ["IX", "XI"]
    dense = inst.op.to_dense().real
    want = np.zeros((4, 4))
    for r in range(4):
        for c in range(4):
            if bin(r ^ c).count("1") == 1:
                want[r, c] = 1.0
    assert np.allclose(dense, want)


def test_hamming_k_and_complete():
    inst = gen_hamming_family(3, 3, "hamming_k")
    assert [p.label for p, _ in inst.op.items()] == ["XXX"]
    comp = gen_hamming_family(2, 1, "complete")
    dense = comp.op.to_dense().real
    want = (np.ones((4, 4)) - np.eye(4)) / 4.0
    assert np.allclose(dense, want)
    with pytest.raises(InstanceError):
        gen_hamming_family(17, 1, "complete")


def test_dense_adjacency_matches_for_generators():
    # Hamming-k dense form connects exactly distance-k pairs
    inst = gen_hamming_family(4, 2, "hamming_k")
    dense = inst.op.to_dense().real
    for r in range(16):
        for c in range(16):
            want = 1.0 if bin(r ^ c).count("1") == 2 else 0.0
            assert dense[r, c] == pytest.approx(want)


def test_cluster1d_structure():
    with pytest.raises(InstanceError):
        gen_cluster1d(6)
    for n, seed in ((7, 0), (8, 5), (11, 2)):
        inst = gen_cluster1d(n, seed)
        assert abs(sum(abs(c) for c in inst.op.terms.values()) - 1.0) < 1e-12
        assert inst.op.is_real_symmetric()
        assert inst.flags.commuting_1d and inst.flags.window_width == 6
        assert len(inst.grouped_blocks()) == 2 * n - 9
        assert len(inst.op) == 2 * n - 4
        ts = enumerate_traceless(diagonal_group(inst.op))
        assert len(ts) == 3
    # group independent of seed
    g1 = enumerate_traceless(diagonal_group(gen_cluster1d(9, 1).op))
    g2 = enumerate_traceless(diagonal_group(gen_cluster1d(9, 99).op))
    assert g1.z_strings == g2.z_strings


def test_cluster1d_grouped_blocks_commute_dense():
    inst = gen_cluster1d(8, seed=3)
    mats = [
        sum(c * p.to_dense() for p, c in blk) for blk in inst.grouped_blocks()
    ]
    for a, b in itertools.combinations(mats, 2):
        assert np.allclose(a @ b, b @ a, atol=1e-12)


def test_commuting4_examples():
    inst = gen_commuting4()
    assert len(inst.op) == 8
    assert all(c == 1.0 for _, c in inst.op.items())
    rep = structure_report(inst)
    # aligned-pair entries of XX and YY cancel exactly, leaving pure hopping
    # on the first three qubits: the vertex graph splits into the weight
    # {0,3} sector (4 states) and the weight {1,2} sector (12 states)
    assert not rep["connected"]
    assert not rep["fully_commuting"]
    # lambda_max strictly exceeds the constrained SDP value (checked via the
    # symmetric-axis dual bound at small constraint weight)
    dense = inst.op.to_dense().real
    lam_max = float(np.max(np.linalg.eigvalsh(dense)))
    idx = np.arange(16, dtype=np.uint64)
    dvec = sum(
        np.where(np.bitwise_count(idx & np.uint64(z)) & np.uint64(1) == 1, -1.0, 1.0)
        for z in enumerate_traceless(diagonal_group(inst.op)).z_strings
    )
    duals = [
        float(np.max(np.linalg.eigvalsh(dense + t * np.diag(dvec))))
        for t in np.linspace(0, 2, 41)
    ]
    assert min(duals) < lam_max - 1e-6


def test_structure_report_walk_regular():
    hyper = gen_hamming_family(3, 1, "hypercube")
    rep = structure_report(hyper, kmax=6)
    assert rep["walk_regular"] and rep["connected"] and rep["fully_commuting"]


def test_fully_commuting_nontrivial_group_is_disconnected():
    # ZZ-coupled X-free model: fully commuting with nontrivial group
    op_terms = {
        PauliString.from_label("ZZI"): 1.0,
        PauliString.from_label("IZZ"): 0.5,
        PauliString.from_label("XII"): 0.7,
    }
    from paulisdp.instances import Instance
    from paulisdp.paulis import PauliOperator, commutation_report

    # replace with a genuinely fully-commuting example: X1 X2 and Z3-free words
    terms = {
        PauliString.from_label("XXI"): 1.0,
        PauliString.from_label("IIZ"): 1.0,
    }
    op = PauliOperator(3, terms)
    assert commutation_report(op)["fully_commuting"]
    assert diagonal_group(op).order > 1
    inst = Instance(op)
    rep = structure_report(inst)
    assert not rep["connected"]


def test_kronecker_instance_and_l1():
    spec1 = default_kronecker_spec(1)
    inst = gen_kronecker(spec1)
    norm_a = float(np.max(np.abs(np.linalg.eigvalsh(DEFAULT_INITIATOR))))
    assert inst.op.pauli_l1 == pytest.approx(5.0 / norm_a)
    spec3 = default_kronecker_spec(3)
    assert spec3.pauli_l1() == pytest.approx((5.0 / norm_a) ** 3)
    # identity factor
    from paulisdp.instances import KroneckerSpec

    assert KroneckerSpec([np.eye(2)], 1).pauli_l1() == pytest.approx(1.0)
    # explicit expansion matches the dense tensor product
    dense = gen_kronecker(default_kronecker_spec(2)).op.to_dense().real
    a = DEFAULT_INITIATOR / norm_a
    assert np.allclose(dense, np.kron(a, a), atol=1e-12)


def test_instance_json_roundtrip(tmp_path):
    inst = gen_cluster1d(8, seed=4)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert back.op.terms == inst.op.terms
    assert back.groups == inst.groups
    assert back.flags == inst.flags
    assert back.seed == inst.seed
    assert back.op.norm_upper_bound == pytest.approx(inst.op.norm_upper_bound)


def test_instance_json_validation(tmp_path):
    inst = gen_hamming_family(3, 1, "hypercube")
    data = instance_to_dict(inst)
    data["terms"][0]["coeff"] = 0.0
    with pytest.raises(InstanceError):
        instance_from_dict(data)
    data = instance_to_dict(inst)
    data["terms"][0]["x"] = "01"
    with pytest.raises(InstanceError):
        instance_from_dict(data)
    # commuting flag on non-commuting terms
    bad = {
        "n": 2,
        "terms": [
            {"x": "10", "z": "00", "coeff": 1.0},
            {"x": "10", "z": "10", "coeff": 1.0},
        ],
        "norm_upper_bound": None,
        "flags": {"real_symmetric": False, "commuting_1d": True, "window_width": 2},
        "seed": None,
        "metadata": {},
    }
    with pytest.raises(InstanceError):
        instance_from_dict(bad)
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(InstanceError):
        load_instance(path)
