"""Importance-sampling Pauli sparsification.

Draws Pauli words with probability |c| / l1 and averages the unbiased
estimator l1 * sign(c) * P; merged duplicates give the sparsified operator.
Kronecker specs sample each factor independently from its own |c| / l1
marginal, so no explicit product expansion is ever formed.
"""

from __future__ import annotations

import math

import numpy as np

from .instances import Instance, InstanceFlags, KroneckerSpec
from .paulis import PauliOperator, PauliString


class TermSampler:
    """Yields (PauliString, sign) with P(x,z) proportional to |c_(x,z)|."""

    def __init__(self, n: int, l1: float, seed=None):
        self.n = n
        self.l1 = l1
        self.rng = np.random.default_rng(seed)

    def draw(self) -> tuple[PauliString, float]:
        raise NotImplementedError

    def draw_many(self, m: int) -> list[tuple[PauliString, float]]:
        return [self.draw() for _ in range(m)]

    def clone(self, seed) -> "TermSampler":
        raise NotImplementedError


class ExplicitSampler(TermSampler):
    """Exact categorical sampling from an explicit term list."""

    def __init__(self, op: PauliOperator, seed=None):
        super().__init__(op.n, op.pauli_l1, seed)
        if not op.terms:
            raise ValueError("cannot sample from the zero operator")
        self._paulis = op.support()
        coeffs = np.array([op.terms[p] for p in self._paulis])
        self._signs = np.sign(coeffs)
        self._probs = np.abs(coeffs) / op.pauli_l1
        self._op = op

    def draw(self):
        i = int(self.rng.choice(len(self._paulis), p=self._probs))
        return self._paulis[i], float(self._signs[i])

    def draw_many(self, m):
        idx = self.rng.choice(len(self._paulis), size=m, p=self._probs)
        return [(self._paulis[i], float(self._signs[i])) for i in idx]

    def clone(self, seed):
        return ExplicitSampler(self._op, seed)


class KroneckerSampler(TermSampler):
    """Product-form sampling: one categorical draw per factor, concatenated."""

    def __init__(self, spec: KroneckerSpec, seed=None):
        ops = spec.factor_ops()
        l1 = 1.0
        for op in ops:
            l1 *= op.pauli_l1
        super().__init__(spec.total_qubits, l1, seed)
        self._spec = spec
        self._factors = []
        for op in ops:
            paulis = op.support()
            coeffs = np.array([op.terms[p] for p in paulis])
            self._factors.append(
                (op.n, paulis, np.sign(coeffs), np.abs(coeffs) / op.pauli_l1)
            )

    def draw(self):
        return self.draw_many(1)[0]

    def draw_many(self, m):
        picks = [
            self.rng.choice(len(paulis), size=m, p=probs)
            for _, paulis, _, probs in self._factors
        ]
        out = []
        for j in range(m):
            x = z = 0
            sign = 1.0
            for (nf, paulis, signs, _), idx in zip(self._factors, picks):
                i = idx[j]
                x = (x << nf) | paulis[i].x
                z = (z << nf) | paulis[i].z
                sign *= signs[i]
            out.append((PauliString(self.n, x, z), float(sign)))
        return out

    def clone(self, seed):
        return KroneckerSampler(self._spec, seed)


def kron_sampler(spec: KroneckerSpec, seed=None) -> KroneckerSampler:
    return KroneckerSampler(spec, seed)


def sample_count(k_qubits: int, l1: float, eps: float) -> int:
    """floor(2 k l1^2 eps^-2 / 1.5) draws, k the total qubit count."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.floor(2.0 * k_qubits * l1 * l1 / (eps * eps) / 1.5)


def sparsify(s: TermSampler, m: int) -> PauliOperator:
    """Empirical mean of m draws of the estimator l1 * sign * P."""
    if m < 1:
        raise ValueError("need at least one sample")
    counts: dict[PauliString, float] = {}
    for p, sign in s.draw_many(m):
        counts[p] = counts.get(p, 0.0) + sign
    terms = {p: c * s.l1 / m for p, c in counts.items() if c != 0.0}
    return PauliOperator(s.n, terms)


def renormalize_sparsified(op: PauliOperator) -> PauliOperator:
    """Divide by the Pauli l1 norm so the result has unit l1."""
    if op.pauli_l1 <= 0:
        raise ValueError("cannot renormalize the zero operator")
    out = PauliOperator(op.n, {p: c / op.pauli_l1 for p, c in op.terms.items()})
    out.norm_upper_bound = 1.0
    return out


def sparsified_instance(spec: KroneckerSpec, eps: float, seed=None,
                        m: int | None = None) -> Instance:
    """Sample, sparsify, and l1-renormalize a Kronecker spec into an Instance."""
    sampler = kron_sampler(spec, seed)
    draws = m if m is not None else sample_count(spec.total_qubits, sampler.l1, eps)
    op = renormalize_sparsified(sparsify(sampler, max(1, draws)))
    return Instance(
        op,
        InstanceFlags(real_symmetric=op.is_real_symmetric()),
        seed=seed if isinstance(seed, int) else None,
        metadata={"model": "kronecker_sparsified", "samples": str(max(1, draws)),
                  "eps": repr(float(eps))},
    )
