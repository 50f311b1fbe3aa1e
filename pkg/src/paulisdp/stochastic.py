"""Matrix-free stochastic Gibbs backend: Gaussian Hutchinson trace probes
combined with a fragmented Taylor expansion of the matrix exponential.

exp(E/2) v is approximated by r = ceil((||lambda||_l1 / 2) / cap) repetitions
of a degree-kappa Taylor polynomial of E/(2r); every Pauli application is one
permutation-with-phases pass over the state vector. Expectations are ratio
estimates tr(B e^E) / tr(e^E) sharing one probe set, with jackknife errors.
"""

from __future__ import annotations

import math

import numpy as np

from .paulis import PauliString


class StochasticBackendError(RuntimeError):
    pass


def default_taylor_degree(exponent_norm: float, eps_target: float = 1e-10) -> int:
    """max(8, ceil(log2(||E|| / eps)) + 8); the series is grouped to unit norm."""
    if exponent_norm <= 0:
        return 8
    return max(8, math.ceil(math.log2(max(exponent_norm / eps_target, 2.0))) + 8)


class _PauliMatvec:
    """Cached permutation + sign data for fast P @ v on 2^n vectors."""

    def __init__(self, p: PauliString, cache: bool):
        self.p = p
        phase = 1j ** (p.y_count % 4)
        self.phase = phase.real if phase.imag == 0 else phase
        self._perm = None
        self._signs = None
        if cache:
            idx = np.arange(1 << p.n, dtype=np.uint64)
            self._perm = (idx ^ np.uint64(p.x)).astype(np.intp)
            par = np.bitwise_count(idx & np.uint64(p.z)) & np.uint64(1)
            self._signs = np.where(par == 1, -1.0, 1.0)

    def apply(self, v: np.ndarray) -> np.ndarray:
        if self._perm is not None:
            vals = (self.phase * self._signs) * v if self.phase != 1 else self._signs * v
            out = np.empty_like(vals)
            out[self._perm] = vals
            return out
        idx = np.arange(v.shape[0], dtype=np.uint64)
        par = np.bitwise_count(idx & np.uint64(self.p.z)) & np.uint64(1)
        signs = np.where(par == 1, -self.phase, self.phase)
        vals = signs * v
        out = np.empty_like(vals)
        out[(idx ^ np.uint64(self.p.x)).astype(np.intp)] = vals
        return out


class StochasticBackend:
    """Hutchinson estimates of tr(B sigma(lambda)) for Pauli-sparse exponents."""

    kind = "stochastic"

    def __init__(self, inst, constraints=None, cfg=None):
        from .gibbs import BackendConfig

        cfg = cfg or BackendConfig()
        sc = cfg.stochastic
        self.inst = inst
        self.n = inst.n
        if self.n > sc.max_n:
            raise StochasticBackendError(
                f"n={self.n} exceeds the stochastic state-vector cap {sc.max_n}"
            )
        self.z_order = tuple(constraints.z_strings) if constraints is not None else ()
        self.cfg = cfg
        self.num_probes = sc.num_probes
        self.probe_cap = sc.probe_cap
        self.fragment_norm_cap = sc.fragment_norm_cap
        self.taylor_degree = sc.taylor_degree
        self.seed = cfg.seed
        cache = self.n <= 16
        norm = inst.op.norm_upper_bound
        self._terms = [
            (c / norm, _PauliMatvec(p, cache)) for p, c in inst.op.items()
        ]
        self._zmv = {z: _PauliMatvec(PauliString(self.n, 0, z), cache)
                     for z in self.z_order}
        self._zsigns = {}
        idx = np.arange(1 << self.n, dtype=np.uint64)
        for z in self.z_order:
            par = np.bitwise_count(idx & np.uint64(z)) & np.uint64(1)
            self._zsigns[z] = np.where(par == 1, -1.0, 1.0)

    # -- exponential application --------------------------------------------

    def _exponent_matvec(self, lam, v):
        out = lam.lambda_c * self._apply_cprime(v) if lam.lambda_c else np.zeros_like(v)
        for z, la in lam.lambda_a.items():
            if la:
                out = out + la * (self._zsigns[z] * v if z in self._zsigns
                                  else _PauliMatvec(PauliString(self.n, 0, z), False).apply(v))
        return out

    def _apply_cprime(self, v):
        out = np.zeros_like(v)
        for c, mv in self._terms:
            out += c * mv.apply(v)
        return out

    def apply_exp_scaled(self, lam, v: np.ndarray, kappa: int | None = None):
        """exp(E(lam)) @ v by fragmented Taylor; returns (w, log_scale)."""
        l1 = lam.l1
        r = max(1, math.ceil(l1 / self.fragment_norm_cap))
        kappa = kappa or self.taylor_degree or default_taylor_degree(l1)
        if kappa < 1:
            raise StochasticBackendError("taylor degree must be >= 1")
        w = np.asarray(v, dtype=complex if np.iscomplexobj(v) else float).copy()
        log_scale = 0.0
        frag = lam.scaled(1.0 / r)
        for _ in range(r):
            acc = w.copy()
            term = w
            for d in range(1, kappa + 1):
                term = self._exponent_matvec(frag, term) / d
                acc += term
            w = acc
            c = float(np.max(np.abs(w)))
            if c > 0 and np.isfinite(c):
                w /= c
                log_scale += math.log(c)
        return w, log_scale

    # -- Hutchinson estimates -------------------------------------------------

    def _probes(self, count):
        rng = np.random.default_rng(self.seed)
        return rng.standard_normal((count, 1 << self.n))

    def _probe_stats(self, lam, count):
        """Per-probe W_i = |e^{E/2} psi|^2 and V_i for the objective and
        every constraint, all on the shared probe set.

        apply_exp_scaled renormalizes per fragment, so each probe carries its
        own log scale; the common scale is restored before the ratio so the
        probes keep their true relative weights (dropping it biases the
        ratio-of-sums estimator).
        """
        half = lam.scaled(0.5)
        ws = np.empty(count)
        vc = np.empty(count)
        va = np.empty((len(self.z_order), count))
        logs = np.empty(count)
        for i, psi in enumerate(self._probes(count)):
            w, ls = self.apply_exp_scaled(half, psi)
            ws[i] = float(np.real(np.vdot(w, w)))
            vc[i] = float(np.real(np.vdot(w, self._apply_cprime(w))))
            for j, z in enumerate(self.z_order):
                va[j, i] = float(np.real(np.vdot(w, self._zsigns[z] * w)))
            logs[i] = 2.0 * ls
        rel = np.exp(logs - logs.max())
        ws = ws * rel
        vc = vc * rel
        va = va * rel
        return ws, vc, va, logs

    @staticmethod
    def _ratio_jackknife(vs, ws):
        """Ratio-of-sums estimate with jackknife error; the jackknife bias
        magnitude is folded into the reported error, which keeps the bars
        honest for the heavy-tailed weights large exponents produce."""
        total_v, total_w = vs.sum(), ws.sum()
        est = total_v / total_w
        m = len(vs)
        if m < 2:
            return est, abs(est)
        loo = (total_v - vs) / (total_w - ws)
        se = float(np.sqrt((m - 1) / m * np.sum((loo - loo.mean()) ** 2)))
        bias = float((m - 1) * (loo.mean() - est))
        return est - bias, math.hypot(se, abs(bias))

    def hu_values(self, lam, min_stderr: float | None = None):
        count = self.num_probes
        while True:
            ws, vc, va, logs = self._probe_stats(lam, count)
            mu_c, se_c = self._ratio_jackknife(vc, ws)
            mu_a = np.empty(len(self.z_order))
            se_a = np.empty(len(self.z_order))
            for j in range(len(self.z_order)):
                mu_a[j], se_a[j] = self._ratio_jackknife(va[j], ws)
            worst = max([se_c, *se_a], default=se_c)
            if min_stderr is None or worst <= min_stderr or count >= self.probe_cap:
                break
            count = min(self.probe_cap, count * 2)
        return mu_c, mu_a, se_c, se_a, self._log_partition_from(ws, logs)

    def _log_partition_from(self, ws, logs):
        # ws already carries exp(logs - logs.max()) from _probe_stats
        return float(logs.max() + math.log(np.mean(ws)))

    def log_partition(self, lam) -> float:
        ws, _, _, logs = self._probe_stats(lam, self.num_probes)
        return self._log_partition_from(ws, logs)

    def expectation(self, lam, obs) -> tuple[float, float]:
        from .gibbs import observable_terms

        half = lam.scaled(0.5)
        count = self.num_probes
        ws = np.empty(count)
        vs = np.empty(count)
        logs = np.empty(count)
        terms = observable_terms(obs, self.inst)
        mvs = [(c, _PauliMatvec(p, self.n <= 16)) for c, p in terms]
        for i, psi in enumerate(self._probes(count)):
            w, ls = self.apply_exp_scaled(half, psi)
            ws[i] = float(np.real(np.vdot(w, w)))
            acc = 0.0
            for c, mv in mvs:
                acc += c * float(np.real(np.vdot(w, mv.apply(w))))
            vs[i] = acc
            logs[i] = 2.0 * ls
        rel = np.exp(logs - logs.max())
        return self._ratio_jackknife(vs * rel, ws * rel)

    def amplitude_scaled(self, lam_half, bra: int, ket_vectors):
        """Full-vector path: build exp(E/2)|ket> once and index it."""
        ket = np.array([1.0 + 0j])
        for u in ket_vectors:
            ket = np.kron(ket, np.asarray(u, dtype=complex))
        key = (lam_half.key(), tuple(np.round(np.concatenate(ket_vectors), 14)))
        cached = getattr(self, "_amp_cache", None)
        if cached is None or cached[0] != key:
            w, ls = self.apply_exp_scaled(lam_half, ket)
            self._amp_cache = (key, w, ls)
        _, w, ls = self._amp_cache
        return complex(w[bra]), ls
