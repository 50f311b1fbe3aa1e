"""Pauli-string algebra over the symplectic GF(2) representation.

An n-qubit Pauli word is encoded by two bit-vectors (x, z), packed into
Python integers with qubit 1 as the most significant bit (so the integer
reads the same way as the serialized bitstring, leftmost char = qubit 1):

    P(x, z) = prod_j  i^{x_j z_j} X_j^{x_j} Z_j^{z_j}

With this phase convention every P(x, z) is Hermitian with eigenvalues +-1.
Computational basis indices use the same MSB-first packing, so P(x,z)|b>
lands on |b XOR x>.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

_PHASES = (1, 1j, -1, -1j)  # i**k for k = 0..3
_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class DimensionMismatchError(ValueError):
    """Raised when two Pauli objects act on different qubit counts."""


def bits_to_str(bits: int, n: int) -> str:
    """Render a packed bit-vector as an n-char 0/1 string, qubit 1 leftmost."""
    return format(bits, "b").zfill(n)


def str_to_bits(s: str) -> int:
    if set(s) - {"0", "1"}:
        raise ValueError(f"not a 0/1 string: {s!r}")
    return int(s, 2) if s else 0


@dataclass(frozen=True, order=True)
class PauliString:
    """An n-qubit Pauli word in symplectic (x, z) form (sign-free)."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError("bit-vector longer than qubit count")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for ch in label:
            xb, zb = _CHAR_TO_XZ[ch]
            x = (x << 1) | xb
            z = (z << 1) | zb
        return cls(len(label), x, z)

    @property
    def label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[(self.x >> k & 1, self.z >> k & 1)]
            for k in range(self.n - 1, -1, -1)
        )

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return (self.x | self.z).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def is_diagonal(self) -> bool:
        return self.x == 0

    def support(self) -> tuple[int, ...]:
        """1-based qubit positions where the word is non-identity."""
        occ = self.x | self.z
        return tuple(j for j in range(1, self.n + 1) if occ >> (self.n - j) & 1)

    def restrict(self, qubits: tuple[int, ...]) -> "PauliString":
        """Project onto the given 1-based qubits (must cover the support)."""
        occ = self.x | self.z
        keep = 0
        for q in qubits:
            keep |= 1 << (self.n - q)
        if occ & ~keep:
            raise ValueError("support not contained in the requested qubits")
        x = z = 0
        for q in qubits:
            k = self.n - q
            x = (x << 1) | (self.x >> k & 1)
            z = (z << 1) | (self.z >> k & 1)
        return PauliString(len(qubits), x, z)

    def to_dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (n <= 14)."""
        if self.n > 14:
            raise ValueError("dense form capped at n <= 14")
        dim = 1 << self.n
        cols = np.arange(dim)
        rows = cols ^ self.x
        mat = np.zeros((dim, dim), dtype=complex)
        mat[rows, cols] = basis_phases(self, cols)
        return mat

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class SignedPauli:
    """A Pauli word together with one of the four unit phases."""

    pauli: PauliString
    phase: complex

    def __post_init__(self):
        if self.phase not in _PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")


def pauli_mul(p: PauliString, q: PauliString) -> SignedPauli:
    """Product p * q with exact phase: matrix(p) @ matrix(q) = phase * matrix(r)."""
    if p.n != q.n:
        raise DimensionMismatchError(f"qubit counts differ: {p.n} vs {q.n}")
    x = p.x ^ q.x
    z = p.z ^ q.z
    k = (
        p.y_count
        + q.y_count
        - (x & z).bit_count()
        + 2 * (p.z & q.x).bit_count()
    ) % 4
    return SignedPauli(PauliString(p.n, x, z), _PHASES[k])


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the dense matrices commute (symplectic form vanishes mod 2)."""
    if p.n != q.n:
        raise DimensionMismatchError(f"qubit counts differ: {p.n} vs {q.n}")
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def apply_to_basis(p: PauliString, b: int) -> tuple[int, complex]:
    """P|b> = phase * |b'> with b' = b XOR x and phase in {+-1, +-i}."""
    if not 0 <= b < (1 << p.n):
        raise IndexError(f"basis index {b} out of range for n={p.n}")
    k = (p.y_count + 2 * (p.z & b).bit_count()) % 4
    return b ^ p.x, _PHASES[k]


def basis_phases(p: PauliString, b: np.ndarray) -> np.ndarray:
    """Vectorized phases of P acting on an array of basis indices."""
    zpar = np.bitwise_count(np.bitwise_and(b.astype(np.uint64), np.uint64(p.z))) & 1
    base = _PHASES[p.y_count % 4]
    return np.where(zpar == 1, -base, base)


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------


class PauliOperator:
    """A real linear combination of PauliStrings.

    Zero coefficients are dropped and duplicate words merged on construction.
    `norm_upper_bound` defaults to the Pauli l1 norm (a valid operator-norm
    bound by the triangle inequality) and may be tightened by the caller.
    """

    def __init__(self, n: int, terms, norm_upper_bound: float | None = None):
        merged: dict[PauliString, float] = {}
        for p, c in dict(terms).items() if isinstance(terms, dict) else terms:
            if p.n != n:
                raise DimensionMismatchError("term qubit count differs from operator")
            if c == 0.0:
                continue
            merged[p] = merged.get(p, 0.0) + float(c)
        self.n = n
        self.terms = {p: c for p, c in merged.items() if c != 0.0}
        self._l1 = sum(abs(c) for c in self.terms.values())
        self.norm_upper_bound = float(norm_upper_bound) if norm_upper_bound else self._l1

    @property
    def pauli_l1(self) -> float:
        return self._l1

    def __len__(self):
        return len(self.terms)

    def items(self):
        """Terms in a deterministic (lexicographic) order."""
        return sorted(self.terms.items(), key=lambda t: (t[0].x, t[0].z))

    def support(self) -> list[PauliString]:
        return [p for p, _ in self.items()]

    def scaled(self, f: float) -> "PauliOperator":
        return PauliOperator(
            self.n,
            {p: c * f for p, c in self.terms.items()},
            norm_upper_bound=self.norm_upper_bound * abs(f),
        )

    def is_real_symmetric(self) -> bool:
        """Even Y-count per term makes every term (hence the sum) real symmetric."""
        return all(p.y_count % 2 == 0 for p in self.terms)

    def to_dense(self) -> np.ndarray:
        if self.n > 14:
            raise ValueError("dense form capped at n <= 14")
        dim = 1 << self.n
        mat = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for p, c in self.items():
            mat[cols ^ p.x, cols] += c * basis_phases(p, cols)
        return mat


def pauli_l1(op: PauliOperator) -> float:
    """Sum of absolute Pauli coefficients."""
    return op.pauli_l1


def commutation_report(op: PauliOperator) -> dict:
    """Pairwise commutation over the support of `op`."""
    supp = op.support()
    bad = 0
    for p, q in itertools.combinations(supp, 2):
        if not commutes(p, q):
            bad += 1
    return {"fully_commuting": bad == 0, "anticommuting_pair_count": bad}


# ---------------------------------------------------------------------------
# GF(2) linear algebra on packed bit-vectors
# ---------------------------------------------------------------------------


def gf2_reduce(vectors) -> list[int]:
    """Reduced (RREF) GF(2) basis of the span, pivots from the high bit down.

    Returned basis is sorted by descending leading bit, which is canonical.
    """
    basis: list[int] = []  # kept in descending leading-bit order
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis = [min(b, b ^ v) if b ^ v < b else b for b in basis]
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def gf2_in_span(v: int, basis) -> bool:
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


@dataclass
class DiagonalGroup:
    """The Z-string subgroup of the group generated by an operator's support."""

    n: int
    generators: list[int]  # GF(2)-independent packed z-vectors

    @property
    def order(self) -> int:
        return 1 << len(self.generators)


@dataclass
class ConstraintSet:
    """Deduplicated nonzero z-bit-vectors defining relaxed-SDP constraints."""

    n: int
    z_strings: tuple[int, ...]
    truncated: bool = False

    def __post_init__(self):
        zs = tuple(sorted(set(self.z_strings)))
        if zs and zs[0] == 0:
            raise ValueError("identity is never a constraint")
        object.__setattr__(self, "z_strings", zs)

    def __len__(self):
        return len(self.z_strings)

    def paulis(self) -> list[PauliString]:
        return [PauliString(self.n, 0, z) for z in self.z_strings]


def diagonal_group(op: PauliOperator) -> DiagonalGroup:
    """Generators of the traceless diagonal subgroup generated by op's support.

    Works in the quotient modulo signs: the support words span a subspace of
    GF(2)^{2n}; its intersection with {x = 0} is read off a row-echelon basis
    computed with the x-part in the high bits. Echelon rows whose leading bit
    falls in the z-part necessarily have vanishing x-part and span exactly
    that intersection.
    """
    if not op.terms:
        raise ValueError("operator has no terms")
    n = op.n
    vecs = [(p.x << n) | p.z for p in op.support()]
    basis = gf2_reduce(vecs)
    zmask = (1 << n) - 1
    zgens = [b & zmask for b in basis if b <= zmask]
    return DiagonalGroup(n, gf2_reduce(zgens))


def enumerate_traceless(g: DiagonalGroup, cap: int = 1 << 20) -> ConstraintSet:
    """All nonzero GF(2) combinations of the generators."""
    if g.order > cap:
        raise ValueError(
            f"group order {g.order} exceeds enumeration cap {cap}; "
            "use the generators, Krylov constraints, or a user-supplied set"
        )
    elems = {0}
    for gen in g.generators:
        elems |= {e ^ gen for e in elems}
    elems.discard(0)
    return ConstraintSet(g.n, tuple(sorted(elems)))


def krylov_constraints(
    op: PauliOperator, k: int, cap: int = 1 << 20, work_cap: int = 5_000_000
) -> ConstraintSet:
    """Diagonal, non-identity products of at most k distinct support words.

    Order within a product only changes the sign, which the two-sided SDP
    constraint ignores, so results are plain z-vectors. Exceeding `cap`
    results or `work_cap` examined products truncates with an explicit flag.
    """
    if k < 2:
        raise ValueError("krylov order k must be >= 2")
    supp = op.support()
    xs = [p.x for p in supp]
    zs = [p.z for p in supp]
    m = len(supp)
    found: set[int] = set()
    truncated = False

    # l = 1: diagonal support words themselves
    for i in range(m):
        if xs[i] == 0 and zs[i] != 0:
            found.add(zs[i])

    # l = 2: pairs with matching x-part
    by_x: dict[int, list[int]] = {}
    for i, x in enumerate(xs):
        by_x.setdefault(x, []).append(i)
    for grp in by_x.values():
        for i, j in itertools.combinations(grp, 2):
            z = zs[i] ^ zs[j]
            if z:
                found.add(z)

    # l >= 3: extend pairs by a third (then deeper) index with x-cancellation
    if k >= 3:
        work = 0
        for i, j in itertools.combinations(range(m), 2):
            work += 1
            if work > work_cap or len(found) > cap:
                truncated = True
                break
            for c in by_x.get(xs[i] ^ xs[j], ()):
                if c > j:
                    z = zs[i] ^ zs[j] ^ zs[c]
                    if z:
                        found.add(z)
    if k >= 4:
        # generic (rare) path: brute-force the remaining orders
        for l in range(4, k + 1):
            work = 0
            for combo in itertools.combinations(range(m), l):
                work += 1
                if work > work_cap or len(found) > cap:
                    truncated = True
                    break
                x = z = 0
                for i in combo:
                    x ^= xs[i]
                    z ^= zs[i]
                if x == 0 and z != 0:
                    found.add(z)
            if truncated:
                break

    if len(found) > cap:
        found = set(sorted(found)[:cap])
        truncated = True
    return ConstraintSet(op.n, tuple(sorted(found)), truncated=truncated)


def all_z_constraints(n: int) -> ConstraintSet:
    """Every nonzero Z-string: the unrelaxed GW constraint set (small n only)."""
    if n > 20:
        raise ValueError("full Z constraint set only supported for n <= 20")
    return ConstraintSet(n, tuple(range(1, 1 << n)))
