"""Gibbs-state estimation backends for exponents
E(lambda) = lambda_C * C/||C|| + sum_A lambda_A Z_A, with sigma ~ exp(E).

Three engines share one interface: dense eigendecomposition (exact, small n),
matrix-free stochastic traces, and the commuting-1D contraction. Raising
lambda_C raises tr(C' sigma) monotonically under this sign convention, which
is what the update loop relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain1d import Chain1DBackend, ChainBackendError
from .paulis import ConstraintSet, PauliOperator, PauliString
from .stochastic import StochasticBackend, StochasticBackendError


class BackendError(RuntimeError):
    """No capable backend, or a capability mismatch for an explicit request."""


@dataclass(frozen=True)
class GibbsParams:
    """The dual vector (lambda_C, {lambda_A}) defining sigma(lambda)."""

    lambda_c: float = 0.0
    lambda_a: dict = field(default_factory=dict)

    @property
    def l1(self) -> float:
        return abs(self.lambda_c) + sum(abs(v) for v in self.lambda_a.values())

    def scaled(self, f: float) -> "GibbsParams":
        return GibbsParams(self.lambda_c * f, {z: v * f for z, v in self.lambda_a.items()})

    def with_c(self, lambda_c: float) -> "GibbsParams":
        return GibbsParams(lambda_c, dict(self.lambda_a))

    def with_a(self, z: int, value: float) -> "GibbsParams":
        za = dict(self.lambda_a)
        za[z] = value
        return GibbsParams(self.lambda_c, za)

    def key(self):
        return (self.lambda_c, tuple(sorted(self.lambda_a.items())))

    @staticmethod
    def zeros(constraints: ConstraintSet | None = None) -> "GibbsParams":
        za = {z: 0.0 for z in constraints.z_strings} if constraints else {}
        return GibbsParams(0.0, za)


@dataclass
class ExpectationResult:
    values: list[float]
    stderr: list[float]
    log_partition: float


@dataclass
class StochasticConfig:
    num_probes: int = 256
    taylor_degree: int | None = None     # None: degree from the target accuracy
    fragment_norm_cap: float = 1.0
    max_n: int = 24
    probe_cap: int = 4096


@dataclass
class Commuting1dConfig:
    bond_cap: int = 64
    expectation_mode: str = "insertion"  # or "finite_difference"
    fd_step: float = 1e-4


@dataclass
class BackendConfig:
    kind: str = "auto"  # dense | stochastic | commuting1d | auto
    dense_max_n: int = 12
    stochastic: StochasticConfig = field(default_factory=StochasticConfig)
    commuting1d: Commuting1dConfig = field(default_factory=Commuting1dConfig)
    seed: int = 0

    def __post_init__(self):
        caps = (self.dense_max_n, self.stochastic.num_probes,
                self.stochastic.fragment_norm_cap, self.stochastic.max_n,
                self.stochastic.probe_cap, self.commuting1d.bond_cap,
                self.commuting1d.fd_step)
        if any(c <= 0 for c in caps):
            raise BackendError("all backend caps must be positive")


def observable_terms(obs, inst) -> list[tuple[float, PauliString]]:
    """Normalize an observable spec to (coeff, PauliString) pairs.

    Accepts a PauliOperator, a PauliString, a packed z-bit-vector, or the
    string "objective" for C/||C||.
    """
    if obs == "objective":
        norm = inst.op.norm_upper_bound
        return [(c / norm, p) for p, c in inst.op.items()]
    if isinstance(obs, PauliOperator):
        return [(c, p) for p, c in obs.items()]
    if isinstance(obs, PauliString):
        return [(1.0, obs)]
    if isinstance(obs, int):
        return [(1.0, PauliString(inst.n, 0, obs))]
    raise TypeError(f"unsupported observable: {obs!r}")


# ---------------------------------------------------------------------------
# Dense backend
# ---------------------------------------------------------------------------


class DenseBackend:
    """Exact eigendecomposition backend for n <= 14."""

    kind = "dense"

    def __init__(self, inst, constraints=None, cfg=None):
        self.inst = inst
        self.n = inst.n
        if self.n > 14:
            raise BackendError("dense backend capped at n <= 14")
        self.z_order = tuple(constraints.z_strings) if constraints is not None else ()
        dense = inst.op.to_dense()
        if np.max(np.abs(dense.imag)) > 1e-9:
            raise BackendError("dense backend expects a real symmetric cost matrix")
        self.cp = dense.real / inst.op.norm_upper_bound
        idx = np.arange(1 << self.n, dtype=np.uint64)
        self.zsigns = {
            z: np.where(np.bitwise_count(idx & np.uint64(z)) & np.uint64(1) == 1, -1.0, 1.0)
            for z in self.z_order
        }
        self._cache_key = None
        self._cache = None

    def _eig(self, lam: GibbsParams):
        key = lam.key()
        if key == self._cache_key:
            return self._cache
        e = lam.lambda_c * self.cp
        diag = np.zeros(1 << self.n)
        for z, la in lam.lambda_a.items():
            if la:
                sign = self.zsigns.get(z)
                if sign is None:
                    idx = np.arange(1 << self.n, dtype=np.uint64)
                    sign = np.where(
                        np.bitwise_count(idx & np.uint64(z)) & np.uint64(1) == 1, -1.0, 1.0
                    )
                diag = diag + la * sign
        e = e + np.diag(diag)
        w, v = np.linalg.eigh(e)
        self._cache_key, self._cache = key, (w, v)
        return w, v

    def _weights(self, w):
        m = w[-1]
        p = np.exp(w - m)
        return p / p.sum(), m

    def log_partition(self, lam) -> float:
        w, _ = self._eig(lam)
        m = w[-1]
        return float(m + math.log(np.sum(np.exp(w - m))))

    def hu_values(self, lam, min_stderr=None):
        w, v = self._eig(lam)
        p, m = self._weights(w)
        diag_sigma = (v * v) @ p
        mu_a = np.array([float(self.zsigns[z] @ diag_sigma) for z in self.z_order])
        quad = np.sum(v * (self.cp @ v), axis=0)
        mu_c = float(quad @ p)
        logz = float(m + math.log(np.sum(np.exp(w - m))))
        return mu_c, mu_a, 0.0, np.zeros(len(self.z_order)), logz

    def hu_values_batch(self, lams):
        """Stacked-eigendecomposition evaluation of many lambda vectors."""
        if self.n > 8:
            out = [self.hu_values(lam) for lam in lams]
            return (
                np.array([o[0] for o in out]),
                np.array([o[1] for o in out]),
                np.array([o[4] for o in out]),
            )
        dim = 1 << self.n
        bsz = len(lams)
        es = np.empty((bsz, dim, dim))
        for i, lam in enumerate(lams):
            diag = np.zeros(dim)
            for z, la in lam.lambda_a.items():
                if la:
                    diag = diag + la * self.zsigns[z]
            es[i] = lam.lambda_c * self.cp + np.diag(diag)
        w, v = np.linalg.eigh(es)
        m = w[:, -1]
        p = np.exp(w - m[:, None])
        p /= p.sum(axis=1, keepdims=True)
        diag_sigma = np.einsum("bik,bk->bi", v * v, p)
        if self.z_order:
            zmat = np.stack([self.zsigns[z] for z in self.z_order])
            mu_a = diag_sigma @ zmat.T
        else:
            mu_a = np.zeros((bsz, 0))
        quad = np.sum(v * (self.cp @ v), axis=1)
        mu_c = np.sum(quad * p, axis=1)
        logz = m + np.log(np.sum(np.exp(w - m[:, None]), axis=1))
        return mu_c, mu_a, logz

    def expectation(self, lam, obs) -> tuple[float, float]:
        w, v = self._eig(lam)
        p, _ = self._weights(w)
        total = 0.0
        for coeff, ps in observable_terms(obs, self.inst):
            bd = ps.to_dense()
            quad = np.real(np.sum(np.conj(v) * (bd @ v), axis=0))
            total += coeff * float(quad @ p)
        return total, 0.0

    def amplitude_scaled(self, lam_half, bra: int, ket_vectors):
        w, v = self._eig(lam_half)
        ket = np.array([1.0 + 0j])
        for u in ket_vectors:
            ket = np.kron(ket, np.asarray(u, dtype=complex))
        m = w[-1]
        amp = v[bra] @ (np.exp(w - m) * (np.conj(v).T @ ket))
        return complex(amp), float(m)

    def apply_exp_scaled(self, lam, vec):
        w, v = self._eig(lam)
        m = w[-1]
        out = v @ (np.exp(w - m) * (np.conj(v).T @ np.asarray(vec, dtype=complex)))
        return out, float(m)


# ---------------------------------------------------------------------------
# Selection and module-level operations
# ---------------------------------------------------------------------------

_BACKENDS = {
    "dense": DenseBackend,
    "stochastic": StochasticBackend,
    "commuting1d": Chain1DBackend,
}


def select_backend(inst, cfg: BackendConfig | None = None) -> str:
    cfg = cfg or BackendConfig()
    if cfg.kind != "auto":
        return cfg.kind
    if inst.flags.commuting_1d:
        return "commuting1d"
    if inst.n < cfg.dense_max_n:
        return "dense"
    if inst.n <= cfg.stochastic.max_n:
        return "stochastic"
    raise BackendError(
        f"no capable backend for n={inst.n}: not commuting-1d and beyond the "
        f"stochastic cap {cfg.stochastic.max_n}"
    )


def make_backend(inst, constraints=None, cfg: BackendConfig | None = None):
    cfg = cfg or BackendConfig()
    kind = select_backend(inst, cfg)
    try:
        return _BACKENDS[kind](inst, constraints, cfg)
    except KeyError:
        raise BackendError(f"unknown backend kind {cfg.kind!r}") from None
    except (ChainBackendError, StochasticBackendError) as exc:
        raise BackendError(str(exc)) from exc


def expectations(inst, constraints, lam, observables, cfg=None) -> ExpectationResult:
    backend = make_backend(inst, constraints, cfg)
    values, errs = [], []
    for obs in observables:
        val, se = backend.expectation(lam, obs)
        values.append(val)
        errs.append(se)
    return ExpectationResult(values, errs, backend.log_partition(lam))


def log_partition(inst, constraints, lam, cfg=None) -> float:
    return make_backend(inst, constraints, cfg).log_partition(lam)


def purity(inst, constraints, lam, cfg=None) -> float:
    backend = make_backend(inst, constraints, cfg)
    return purity_from_backend(backend, lam)


def purity_from_backend(backend, lam) -> float:
    """tr sigma^2 = Z(2 lambda) / Z(lambda)^2."""
    return math.exp(backend.log_partition(lam.scaled(2.0)) - 2.0 * backend.log_partition(lam))


def amplitude(inst, constraints, lam_half, bra: int, ket_vectors, cfg=None) -> complex:
    backend = make_backend(inst, constraints, cfg)
    mant, log_scale = backend.amplitude_scaled(lam_half, bra, ket_vectors)
    return mant * math.exp(log_scale)


def stochastic_apply_exp_half(inst, constraints, lam, v, cfg=None) -> np.ndarray:
    """exp(E(lambda)/2) @ v via the fragmented Taylor engine (unscaled)."""
    cfg = cfg or BackendConfig()
    backend = StochasticBackend(inst, constraints, cfg)
    w, log_scale = backend.apply_exp_scaled(lam.scaled(0.5), v)
    return w * math.exp(log_scale)
