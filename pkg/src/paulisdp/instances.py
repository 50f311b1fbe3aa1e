"""Instance families: Hamming graphs, the modified 1D cluster model, the
4-qubit regrouping example, and Kronecker graphs, plus JSON (de)serialization
and structural diagnostics."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .paulis import (
    PauliOperator,
    PauliString,
    bits_to_str,
    commutation_report,
    commutes,
    str_to_bits,
)

DENSE_NORM_MAX_N = 12


class InstanceError(ValueError):
    """Malformed instance data or parameters."""


@dataclass
class InstanceFlags:
    real_symmetric: bool = False
    commuting_1d: bool = False
    window_width: int | None = None


@dataclass
class Instance:
    op: PauliOperator
    flags: InstanceFlags = field(default_factory=InstanceFlags)
    seed: int | None = None
    metadata: dict = field(default_factory=dict)
    # term -> group id; terms sharing an id form one exponent block for the
    # commuting-1d backend (ungrouped terms are their own block)
    groups: dict[PauliString, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.op.n

    def grouped_blocks(self) -> list[list[tuple[PauliString, float]]]:
        """Support terms partitioned into exponent blocks."""
        blocks: dict[int, list[tuple[PauliString, float]]] = {}
        singles = []
        for p, c in self.op.items():
            gid = self.groups.get(p)
            if gid is None:
                singles.append([(p, c)])
            else:
                blocks.setdefault(gid, []).append((p, c))
        return singles + [blocks[g] for g in sorted(blocks)]

    def validate(self):
        if self.flags.real_symmetric and not self.op.is_real_symmetric():
            raise InstanceError("real_symmetric flag set but a term has odd Y count")
        if self.flags.commuting_1d:
            blocks = self.grouped_blocks()
            w = self.flags.window_width
            for blk in blocks:
                qubits = sorted({q for p, _ in blk for q in p.support()})
                if w is not None and qubits and qubits[-1] - qubits[0] + 1 > w:
                    raise InstanceError(
                        f"block support spans {qubits[-1] - qubits[0] + 1} qubits, "
                        f"window_width is {w}"
                    )
            if not _blocks_commute(self.n, blocks):
                raise InstanceError("commuting_1d flag set but grouped terms do not commute")
        return self


def _block_commutator_is_zero(n, blk_a, blk_b) -> bool:
    """[sum_a, sum_b] == 0, accumulated symbolically over Pauli products."""
    from .paulis import pauli_mul

    acc: dict[tuple[int, int], complex] = {}
    for p, cp in blk_a:
        for q, cq in blk_b:
            if commutes(p, q):
                continue
            sp = pauli_mul(p, q)  # qp = -pq for anticommuting words
            key = (sp.pauli.x, sp.pauli.z)
            acc[key] = acc.get(key, 0) + 2 * cp * cq * sp.phase
    return all(abs(v) < 1e-12 for v in acc.values())


def _blocks_commute(n, blocks) -> bool:
    return all(
        _block_commutator_is_zero(n, a, b)
        for a, b in itertools.combinations(blocks, 2)
    )


def _tighten_norm(op: PauliOperator) -> PauliOperator:
    """Replace the l1 norm bound by the exact operator norm when cheap.

    Dense eigendecomposition for tiny systems; matrix-free Lanczos (with a
    tiny safety factor on the iterative estimate) up to n = 12.
    """
    if not op.terms or op.n > DENSE_NORM_MAX_N:
        return op
    if op.n <= 8:
        w = np.linalg.eigvalsh(op.to_dense())
        op.norm_upper_bound = float(np.max(np.abs(w)))
        return op
    from .stochastic import _PauliMatvec

    mvs = [(c, _PauliMatvec(p, cache=True)) for p, c in op.items()]

    def matvec(v):
        out = np.zeros_like(v, dtype=float)
        for c, mv in mvs:
            out += c * np.real(mv.apply(v))
        return out

    dim = 1 << op.n
    lin = LinearOperator((dim, dim), matvec=matvec, dtype=float)
    top = float(eigsh(lin, k=1, which="LM", return_eigenvectors=False, tol=1e-10)[0])
    op.norm_upper_bound = abs(top) * (1.0 + 1e-9)
    return op


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _xstring(n: int, sites) -> PauliString:
    x = 0
    for q in sites:
        x |= 1 << (n - q)
    return PauliString(n, x, 0)


def gen_hamming_family(n: int, k: int = 1, mode: str = "hypercube") -> Instance:
    """Hamming-family cost matrices: hypercube, distance-k graph, complete graph."""
    if not 1 <= k <= n:
        raise InstanceError(f"need 1 <= k <= n, got k={k}, n={n}")
    if mode == "hypercube":
        terms = {_xstring(n, (j,)): 1.0 for j in range(1, n + 1)}
        flags = InstanceFlags(real_symmetric=True, commuting_1d=True, window_width=1)
    elif mode == "hamming_k":
        terms = {
            _xstring(n, sites): 1.0
            for sites in itertools.combinations(range(1, n + 1), k)
        }
        flags = InstanceFlags(real_symmetric=True, commuting_1d=(k == 1),
                              window_width=1 if k == 1 else None)
    elif mode == "complete":
        if n > 16:
            raise InstanceError("complete-graph mode stores 2^n - 1 terms; n <= 16 only")
        terms = {PauliString(n, x, 0): 2.0 ** -n for x in range(1, 1 << n)}
        flags = InstanceFlags(real_symmetric=True)
    else:
        raise InstanceError(f"unknown mode {mode!r}")
    op = _tighten_norm(PauliOperator(n, terms))
    return Instance(op, flags, metadata={"model": mode, "k": str(k)})


def gen_cluster1d(n: int, seed: int = 0) -> Instance:
    """Modified 1D cluster model with a grouped six-word boundary block.

    Coefficients are uniform on (0, 1] from the seeded generator and divided
    by their sum afterwards; the six two-body boundary words share one
    coefficient (split equally) and one group id so the commuting-1d backend
    exponentiates them as a single block.
    """
    if n < 7:
        raise InstanceError("cluster1d needs n >= 7")
    rng = np.random.default_rng(seed)
    n_zxz = (n - 5) - 2 + 1           # i = 2 .. n-5
    n_zyyz = max(0, (n - 6) - 2 + 1)  # i = 2 .. n-6
    raw = 1.0 - rng.random(1 + n_zxz + n_zyyz + 3)  # uniform (0, 1]
    raw /= raw.sum()
    it = iter(raw)

    def pstr(sites: dict[int, str]) -> PauliString:
        x = z = 0
        for q, ch in sites.items():
            xb = ch in "XY"
            zb = ch in "ZY"
            x |= xb << (n - q)
            z |= zb << (n - q)
        return PauliString(n, x, z)

    terms: dict[PauliString, float] = {}
    groups: dict[PauliString, int] = {}
    terms[pstr({1: "X", 2: "Z"})] = next(it)
    for i in range(2, n - 4):
        terms[pstr({i - 1: "Z", i: "X", i + 1: "Z"})] = next(it)
    for i in range(2, n - 5):
        terms[pstr({i - 1: "Z", i: "Y", i + 1: "Y", i + 2: "Z"})] = next(it)
    terms[pstr({n - 6: "Z", n - 5: "Y", n - 4: "Y", n - 3: "X", n - 2: "X", n - 1: "X"})] = next(it)
    terms[pstr({n: "X"})] = next(it)
    a_boundary = next(it)
    for a, b in itertools.combinations((n - 3, n - 2, n - 1), 2):
        for ch in "XY":
            p = pstr({a: ch, b: ch})
            terms[p] = a_boundary / 6.0
            groups[p] = 1

    op = _tighten_norm(PauliOperator(n, terms))
    inst = Instance(
        op,
        InstanceFlags(real_symmetric=True, commuting_1d=True, window_width=6),
        seed=seed,
        groups=groups,
        metadata={"model": "cluster1d"},
    )
    return inst.validate()


def gen_commuting4() -> Instance:
    """The fixed 4-qubit example that is commuting only after regrouping."""
    labels = ["XXII", "YYII", "IXXI", "IYYI", "XIXI", "YIYI", "XXXX", "IIIX"]
    op = _tighten_norm(
        PauliOperator(4, {PauliString.from_label(s): 1.0 for s in labels})
    )
    return Instance(op, InstanceFlags(real_symmetric=True), metadata={"model": "commuting4"})


# ---------------------------------------------------------------------------
# Kronecker graphs
# ---------------------------------------------------------------------------

DEFAULT_INITIATOR = np.array(
    [[2.0, 1, 1, 1], [1, 2, 1, 0], [1, 1, 2, 0], [1, 0, 0, 2]]
)


def decompose_dense(a: np.ndarray) -> PauliOperator:
    """Exact Pauli expansion of a dense real symmetric 2^k x 2^k matrix.

    Coefficients are tr(P a) / 2^k; the Pauli words are orthogonal in the
    Hilbert-Schmidt inner product, so the expansion reconstructs `a` exactly.
    """
    a = np.asarray(a, dtype=float)
    dim = a.shape[0]
    k = dim.bit_length() - 1
    if a.shape != (dim, dim) or (1 << k) != dim:
        raise InstanceError("matrix dimension must be a power of two")
    if k > 6:
        raise InstanceError("dense decomposition capped at 2^6")
    if not np.allclose(a, a.T, atol=1e-12):
        raise InstanceError("matrix is not symmetric")
    from .paulis import basis_phases

    cols = np.arange(dim)
    terms = {}
    for x in range(dim):
        for z in range(dim):
            p = PauliString(k, x, z)
            # tr(P a) = sum_c phase_c * a[c, c^x]; real for symmetric a
            c = np.real(np.sum(basis_phases(p, cols) * a[cols, cols ^ x])) / dim
            if abs(c) > 1e-12:
                terms[p] = c
    return PauliOperator(k, terms)


@dataclass
class KroneckerSpec:
    """Tensor-product cost matrix C = factor_1 (x) ... (x) factor_m."""

    factors: list[np.ndarray]
    repetitions: int = 1

    def expanded_factors(self) -> list[np.ndarray]:
        return [f for _ in range(self.repetitions) for f in self.factors]

    def factor_ops(self) -> list[PauliOperator]:
        return [decompose_dense(f) for f in self.expanded_factors()]

    @property
    def total_qubits(self) -> int:
        return sum(f.shape[0].bit_length() - 1 for f in self.expanded_factors())

    def pauli_l1(self) -> float:
        out = 1.0
        for op in self.factor_ops():
            out *= op.pauli_l1
        return out


def default_kronecker_spec(repetitions: int) -> KroneckerSpec:
    """The default 4x4 initiator, normalized to unit operator norm."""
    a = DEFAULT_INITIATOR / np.max(np.abs(np.linalg.eigvalsh(DEFAULT_INITIATOR)))
    return KroneckerSpec([a], repetitions=repetitions)


def gen_kronecker(spec: KroneckerSpec) -> Instance:
    """Explicit product-form instance (total qubit count capped at 12)."""
    n = spec.total_qubits
    if n > 12:
        raise InstanceError(
            "explicit Kronecker expansion capped at 12 qubits; sparsify instead"
        )
    ops = spec.factor_ops()
    terms: dict[PauliString, float] = {}
    for combo in itertools.product(*[op.items() for op in ops]):
        x = z = 0
        c = 1.0
        for p, cf in combo:
            x = (x << p.n) | p.x
            z = (z << p.n) | p.z
            c *= cf
        p = PauliString(n, x, z)
        terms[p] = terms.get(p, 0.0) + c
    op = _tighten_norm(PauliOperator(n, terms))
    return Instance(op, InstanceFlags(real_symmetric=op.is_real_symmetric()),
                    metadata={"model": "kronecker", "repetitions": str(spec.repetitions)})


def gen_random_pauli_sparse(n: int, m: int, seed: int = 0) -> Instance:
    """Random real-symmetric Pauli-sparse test instance with m distinct words."""
    rng = np.random.default_rng(seed)
    terms: dict[PauliString, float] = {}
    while len(terms) < m:
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        p = PauliString(n, x, z)
        if p.is_identity() or p.y_count % 2 == 1 or p in terms:
            continue
        terms[p] = float(rng.uniform(-1.0, 1.0)) or 0.5
    op = _tighten_norm(PauliOperator(n, terms))
    return Instance(op, InstanceFlags(real_symmetric=True), seed=seed,
                    metadata={"model": "random"})


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def structure_report(inst: Instance, kmax: int = 6) -> dict:
    """Walk-regularity, connectivity, and commutation structure (dense, n <= 10)."""
    if inst.n > 10:
        raise InstanceError("structure_report uses dense forms; n <= 10 only")
    c = inst.op.to_dense().real
    dim = c.shape[0]
    walk_regular = True
    power = np.eye(dim)
    for _ in range(kmax):
        power = power @ c
        d = np.diag(power)
        if np.max(np.abs(d - d[0])) > 1e-9:
            walk_regular = False
            break
    adj = np.abs(c) > 1e-12
    np.fill_diagonal(adj, False)
    seen = np.zeros(dim, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for u in np.nonzero(adj[v])[0]:
            if not seen[u]:
                seen[u] = True
                stack.append(int(u))
    return {
        "walk_regular": walk_regular,
        "connected": bool(seen.all()),
        "fully_commuting": commutation_report(inst.op)["fully_commuting"],
    }


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------


def instance_to_dict(inst: Instance) -> dict:
    terms = []
    for p, c in inst.op.items():
        row = {"x": bits_to_str(p.x, inst.n), "z": bits_to_str(p.z, inst.n), "coeff": c}
        if p in inst.groups:
            row["group"] = inst.groups[p]
        terms.append(row)
    return {
        "n": inst.n,
        "terms": terms,
        "norm_upper_bound": inst.op.norm_upper_bound,
        "flags": {
            "real_symmetric": inst.flags.real_symmetric,
            "commuting_1d": inst.flags.commuting_1d,
            "window_width": inst.flags.window_width,
        },
        "seed": inst.seed,
        "metadata": dict(inst.metadata),
    }


def instance_from_dict(data: dict) -> Instance:
    try:
        n = int(data["n"])
        raw_terms = data["terms"]
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance file: {exc}") from exc
    terms: dict[PauliString, float] = {}
    groups: dict[PauliString, int] = {}
    for row in raw_terms:
        xs, zs = row["x"], row["z"]
        if len(xs) != n or len(zs) != n:
            raise InstanceError(
                f"bitstring length mismatch: expected {n}, got x={xs!r} z={zs!r}"
            )
        c = float(row["coeff"])
        if c == 0.0:
            raise InstanceError(f"zero coefficient stored for x={xs} z={zs}")
        p = PauliString(n, str_to_bits(xs), str_to_bits(zs))
        if p in terms:
            raise InstanceError(f"duplicate term x={xs} z={zs}")
        terms[p] = c
        if "group" in row and row["group"] is not None:
            groups[p] = int(row["group"])
    fl = data.get("flags", {})
    flags = InstanceFlags(
        real_symmetric=bool(fl.get("real_symmetric", False)),
        commuting_1d=bool(fl.get("commuting_1d", False)),
        window_width=fl.get("window_width"),
    )
    nub = data.get("norm_upper_bound")
    op = PauliOperator(n, terms, norm_upper_bound=nub)
    inst = Instance(op, flags, seed=data.get("seed"),
                    metadata=dict(data.get("metadata", {})), groups=groups)
    return inst.validate()


def save_instance(inst: Instance, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"malformed JSON in {path}: {exc}") from exc
    return instance_from_dict(data)


def save_kronecker_spec(spec: KroneckerSpec, path):
    data = {
        "kronecker_spec": {
            "factors": [f.tolist() for f in spec.factors],
            "repetitions": spec.repetitions,
        }
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_kronecker_spec(path) -> KroneckerSpec:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        body = data["kronecker_spec"]
        factors = [np.array(f, dtype=float) for f in body["factors"]]
        return KroneckerSpec(factors, repetitions=int(body["repetitions"]))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed Kronecker spec file: {exc}") from exc
