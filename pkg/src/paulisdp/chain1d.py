"""Exact Gibbs-state contraction for block-commuting 1D instances.

The exponent E = lambda_C * C/||C|| + sum_A lambda_A Z_A is split into
commuting components: grouped instance blocks and constraint words are merged
(union-find over non-commuting pairs) until the component sums pairwise
commute, so exp(E) factorizes exactly into a product of local gates. Each
component is exponentiated densely on its own support window; the product is
then contracted along the chain with a bounded open window.

Expectations come out of one sweep with forward-mode derivative environments:
d(log Z)/d(lambda_p) = tr(O_p sigma) holds exactly, and the derivative of the
factorized product is accumulated gate-by-gate (analytically for single-word
gates, via the eigendecomposition divided-difference formula for merged
gates). Sweeps are batched over a leading axis of lambda vectors, which is
what makes the update loop's speculative objective streaks cheap. All
environments carry running log-scale prefactors, keeping sweeps finite at
the large lambda the update loop reaches.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass

import numpy as np

from .paulis import PauliString

LN2 = math.log(2.0)
_LETTERS = [c for c in string.ascii_letters if c not in "BZ"]


class ChainBackendError(RuntimeError):
    """The instance/constraints cannot be handled by the 1D contraction."""


@dataclass
class _Component:
    qubits: tuple[int, ...]        # sorted 1-based support
    params: list                   # "C" or ("A", z), aligned with h_mats
    h_mats: list                   # local dense derivative directions
    single: tuple | None = None    # (pauli_tensor, coeff): analytic fast path

    @property
    def dim(self):
        return 1 << len(self.qubits)

    def dense_gates(self, thetas: np.ndarray):
        """Batched prefactored gates for theta rows: exp(M_b) = e^{m_b} g_b,
        d[p][b] = e^{-m_b} dG_b/d theta_p (divided-difference formula)."""
        bsz = thetas.shape[0]
        dtype = complex if any(np.iscomplexobj(h) for h in self.h_mats) else float
        mats = np.zeros((bsz, self.dim, self.dim), dtype=dtype)
        for j, h in enumerate(self.h_mats):
            mats += thetas[:, j, None, None] * h
        w, u = np.linalg.eigh(mats)
        m = w[:, -1].copy()
        ew = np.exp(w - m[:, None])
        uh = np.conj(np.swapaxes(u, 1, 2))
        g = (u * ew[:, None, :]) @ uh
        dw = w[:, :, None] - w[:, None, :]
        small = np.abs(dw) < 1e-9
        phi = np.where(
            small,
            np.exp(0.5 * (w[:, :, None] + w[:, None, :]) - m[:, None, None]),
            (ew[:, :, None] - ew[:, None, :]) / np.where(small, 1.0, dw),
        )
        d = {}
        for p, h in zip(self.params, self.h_mats):
            inner = phi * (uh @ h @ u)
            d[p] = u @ inner @ uh
        t = len(self.qubits)
        shape = (bsz,) + (2,) * (2 * t)
        return (
            np.ascontiguousarray(g).reshape(shape),
            {p: np.ascontiguousarray(v).reshape(shape) for p, v in d.items()},
            m,
        )


def _local_dense(p: PauliString, qubits: tuple[int, ...]) -> np.ndarray:
    return p.restrict(qubits).to_dense()


def _items_commute(a_ops, b_ops) -> bool:
    """[sum_a, sum_b] == 0, accumulated symbolically over Pauli products."""
    from .paulis import commutes, pauli_mul

    acc: dict[tuple[int, int], complex] = {}
    for p, cp in a_ops:
        for q, cq in b_ops:
            if commutes(p, q):
                continue
            sp = pauli_mul(p, q)  # qp = -pq for anticommuting words
            key = (sp.pauli.x, sp.pauli.z)
            acc[key] = acc.get(key, 0) + 2 * cp * cq * sp.phase
    return all(abs(v) < 1e-12 for v in acc.values())


def _realify(mat: np.ndarray) -> np.ndarray:
    """Drop a vanishing imaginary part (even-Y words have real dense forms)."""
    if np.iscomplexobj(mat) and np.max(np.abs(mat.imag)) < 1e-14:
        return np.ascontiguousarray(mat.real)
    return mat


def _delta_tensor(count: int) -> np.ndarray:
    """Identity on `count` fresh qubits with axes (out, in) per qubit."""
    eye = np.eye(2)
    out = np.array(1.0)
    for _ in range(count):
        out = np.multiply.outer(out, eye)
    return out


class Chain1DBackend:
    """Expectations, partition functions, and amplitudes for block-commuting
    instances whose exponent blocks live on bounded windows."""

    kind = "commuting1d"

    def __init__(self, inst, constraints=None, cfg=None):
        from .gibbs import BackendConfig

        cfg = cfg or BackendConfig()
        self.inst = inst
        self.n = inst.n
        self.z_order = tuple(constraints.z_strings) if constraints is not None else ()
        self.bond_cap = cfg.commuting1d.bond_cap
        self.fd_step = cfg.commuting1d.fd_step
        self.expectation_mode = cfg.commuting1d.expectation_mode
        self._wmax = max(1, int(math.log2(self.bond_cap)))

        norm = inst.op.norm_upper_bound
        # identity terms only shift E by a multiple of lambda_C: they cancel
        # in sigma and enter log Z and the objective expectation as constants
        self.identity_coeff = sum(
            c / norm for p, c in inst.op.items() if p.is_identity()
        )
        items = []
        for blk in inst.grouped_blocks():
            ops = [(p, c / norm) for p, c in blk if not p.is_identity()]
            if ops:
                items.append(("C", ops))
        items += [
            (("A", z), [(PauliString(self.n, 0, z), 1.0)]) for z in self.z_order
        ]
        if not items:
            raise ChainBackendError("objective has no non-identity terms")
        self.components = self._merge(items)
        self.stack = 2 + len(self.z_order)
        self._singles = [i for i, c in enumerate(self.components) if c.single]
        self._sg_index = {gi: k for k, gi in enumerate(self._singles)}
        self._single_coeff = np.array(
            [self.components[i].single[1] for i in self._singles]
        )
        self._single_param = [self.components[i].params[0] for i in self._singles]
        self._deltas = [_delta_tensor(k) for k in range(self._wmax + 1)]
        self._all_real = all(
            not np.iscomplexobj(h) for c in self.components for h in c.h_mats
        ) and all(not np.iscomplexobj(c.single[0])
                  for c in self.components if c.single)
        self._trace_plan, self._untouched, self.param_rows = self._build_trace_plan()
        self._amp_plan = self._build_amp_plan()

    # -- construction -----------------------------------------------------

    def _merge(self, items):
        k = len(items)
        parent = list(range(k))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(k):
            for j in range(i + 1, k):
                if not _items_commute(items[i][1], items[j][1]):
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(k):
            groups.setdefault(find(i), []).append(i)

        comps = []
        for members in groups.values():
            c_blocks = sum(1 for i in members if items[i][0] == "C")
            if c_blocks > 1:
                raise ChainBackendError(
                    "instance is not block-commuting: grouped objective terms "
                    "fail to commute pairwise, so the 1D contraction does not apply"
                )
            qubits = tuple(sorted(
                {q for i in members for p, _ in items[i][1] for q in p.support()}
            ))
            if len(qubits) > self._wmax:
                raise ChainBackendError(
                    f"merged exponent block spans {len(qubits)} qubits, "
                    f"bond cap {self.bond_cap} allows {self._wmax}; "
                    "instance is not commuting-1d for this constraint set"
                )
            by_param: dict = {}
            for i in members:
                param, ops = items[i]
                h = sum(c * _local_dense(p, qubits) for p, c in ops)
                by_param[param] = by_param.get(param, 0) + h
            params = sorted(by_param, key=lambda p: (0, 0) if p == "C" else (1, p[1]))
            h_mats = [_realify(np.asarray(by_param[p], dtype=complex)) for p in params]
            single = None
            if len(members) == 1 and len(items[members[0]][1]) == 1:
                p, c = items[members[0]][1][0]
                t = len(qubits)
                pt = np.ascontiguousarray(
                    _realify(_local_dense(p, qubits))
                ).reshape((2,) * (2 * t))
                single = (pt, c)
            comps.append(_Component(qubits, params, h_mats, single))
        comps.sort(key=lambda c: (c.qubits[0], c.qubits[-1]))
        return comps

    def _thetas(self, comp, lams) -> np.ndarray:
        return np.array(
            [
                [lam.lambda_c if p == "C" else lam.lambda_a.get(p[1], 0.0)
                 for p in comp.params]
                for lam in lams
            ]
        )

    def _single_scalars(self, lams):
        """Vectorized (ch, sh, m) over (batch, single gates)."""
        theta = np.array(
            [
                [lam.lambda_c if p == "C" else lam.lambda_a.get(p[1], 0.0)
                 for p in self._single_param]
                for lam in lams
            ]
        )
        a = theta * self._single_coeff
        m = np.abs(a)
        decay = np.exp(-2.0 * m)
        ch = 0.5 * (1.0 + decay)
        sh = np.sign(a) * 0.5 * (1.0 - decay)
        return ch, sh, m

    # -- trace plan ---------------------------------------------------------

    def _build_trace_plan(self):
        """Compile the sweep into tensordot steps with leg-relative axes.

        Environment layout at runtime: (batch, stack, *legs); axes stored in
        the plan count legs only and are offset by 2 when used. Leg tokens
        ("out", q) / ("in", q) are tracked symbolically here so no runtime
        reordering logic is needed.
        """
        last: dict[int, int] = {}
        for gi, comp in enumerate(self.components):
            for q in comp.qubits:
                last[q] = gi
        # derivative rows appear when their parameter's first gate is applied
        param_rows: dict = {}
        for comp in self.components:
            for p in sorted(comp.params,
                            key=lambda p: (0, 0) if p == "C" else (1, p[1])):
                if p not in param_rows:
                    param_rows[p] = 1 + len(param_rows)
        steps = []
        tokens: list = []
        open_set: set[int] = set()
        seen_params: set = set()
        for gi, comp in enumerate(self.components):
            activates = [p for p in sorted(comp.params, key=param_rows.get)
                         if p not in seen_params]
            seen_params.update(activates)
            qs = comp.qubits
            t = len(qs)
            fresh = [q for q in qs if q not in open_set]
            shared = [q for q in qs if q in open_set]
            env_axes = tuple(tokens.index(("out", q)) for q in shared)
            gate_axes = tuple(t + qs.index(q) for q in shared)
            td_tokens = [tok for k, tok in enumerate(tokens) if k not in env_axes]
            td_tokens += [("out", q) for q in qs]
            td_tokens += [("in", q) for q in qs if q in fresh]
            if comp.single is not None:
                ei_tokens = list(tokens)
                for q in fresh:
                    ei_tokens += [("out", q), ("in", q)]
                perm = tuple(td_tokens.index(tok) for tok in ei_tokens)
                steps.append(("sg", gi, env_axes, gate_axes, len(fresh), perm,
                              len(activates)))
                tokens = ei_tokens
            else:
                # einsum with a batch letter: gate tensors vary per lambda
                avail = iter(_LETTERS)
                leg = {tok: next(avail) for tok in tokens}
                gout = {q: next(avail) for q in qs}
                gin = {q: leg[("out", q)] if q in shared else next(avail) for q in qs}
                g_sub = "B" + "".join(gout[q] for q in qs) + "".join(gin[q] for q in qs)
                e_sub = "BZ" + "".join(leg[tok] for tok in tokens)
                out_sub = ""
                for tok in td_tokens:
                    kind, q = tok
                    if kind == "out":
                        out_sub += gout[q] if q in gout else leg[tok]
                    else:
                        out_sub += gin[q] if q in qs and tok not in leg else leg[tok]
                sub = f"{g_sub},{e_sub}->BZ{out_sub}"
                steps.append(("dg", gi, sub, len(activates)))
                tokens = td_tokens
            open_set |= set(qs)
            if len(open_set) > self._wmax:
                raise ChainBackendError(
                    f"open contraction window {len(open_set)} exceeds bond cap "
                    f"{self.bond_cap}"
                )
            for q in sorted(q for q in qs if last[q] == gi):
                ax_out = tokens.index(("out", q))
                ax_in = tokens.index(("in", q))
                steps.append(("close", q, ax_out, ax_in))
                tokens = [tok for k, tok in enumerate(tokens)
                          if k not in (ax_out, ax_in)]
                open_set.discard(q)
        untouched = [q for q in range(1, self.n + 1) if q not in last]
        return steps, untouched, param_rows

    def _sweep(self, lams, derivative: bool, closures: dict | None = None):
        """Batched contraction of tr(B * exp(E(lam))) for each lam in lams.

        Returns (scalars, log_scale) with scalars shape (batch, rows):
        scalars[:, 0] is the trace mantissa and, in derivative mode,
        scalars[:, row] / scalars[:, 0] = tr(O_row sigma) exactly.
        """
        bsz = len(lams)
        rows = self.stack if derivative else 1
        if closures:
            for q in self._untouched:
                if q in closures and abs(np.trace(closures[q])) < 1e-12:
                    return np.zeros((bsz, rows), dtype=complex), np.zeros(bsz)
        dtype = float if self._all_real else complex
        ch_all, sh_all, m_all = self._single_scalars(lams)
        env = np.zeros((bsz, 1), dtype=dtype)
        env[:, 0] = 1.0
        log_scale = np.full(bsz, LN2 * len(self._untouched)) + m_all.sum(axis=1)
        deltas = self._deltas
        for step in self._trace_plan:
            kind = step[0]
            if kind == "sg":
                _, gi, env_axes, gate_axes, n_fresh, perm, n_act = step
                if derivative and n_act:
                    env = np.concatenate(
                        [env, np.zeros((bsz, n_act) + env.shape[2:], env.dtype)],
                        axis=1,
                    )
                comp = self.components[gi]
                k = self._sg_index[gi]
                pv = np.tensordot(
                    env, comp.single[0],
                    axes=(tuple(a + 2 for a in env_axes), gate_axes),
                )
                pv = pv.transpose((0, 1) + tuple(p + 2 for p in perm))
                ei = np.multiply.outer(env, deltas[n_fresh]) if n_fresh else env
                shp = (bsz,) + (1,) * (ei.ndim - 1)
                new_env = ch_all[:, k].reshape(shp) * ei + sh_all[:, k].reshape(shp) * pv
                if derivative:
                    row = self.param_rows.get(comp.params[0])
                    if row is not None and row < new_env.shape[1]:
                        coeff = comp.single[1]
                        shp0 = (bsz,) + (1,) * (ei.ndim - 2)
                        new_env[:, row] += (
                            (coeff * sh_all[:, k]).reshape(shp0) * ei[:, 0]
                            + (coeff * ch_all[:, k]).reshape(shp0) * pv[:, 0]
                        )
                env = new_env
            elif kind == "dg":
                _, gi, sub, n_act = step
                if derivative and n_act:
                    env = np.concatenate(
                        [env, np.zeros((bsz, n_act) + env.shape[2:], env.dtype)],
                        axis=1,
                    )
                comp = self.components[gi]
                g, dmap, m = comp.dense_gates(self._thetas(comp, lams))
                log_scale += m
                new_env = np.einsum(sub, g, env)
                if derivative:
                    for p, d in dmap.items():
                        row = self.param_rows.get(p)
                        if row is not None and row < new_env.shape[1]:
                            new_env[:, row] += np.einsum(sub, d, env[:, 0:1])[:, 0]
                env = new_env
            else:
                _, q, ax_out, ax_in = step
                b = closures.get(q) if closures else None
                if b is None:
                    env = np.trace(env, axis1=ax_out + 2, axis2=ax_in + 2)
                else:
                    env = np.tensordot(env, b, axes=([ax_out + 2, ax_in + 2], [1, 0]))
                continue
            flat = np.abs(env[:, 0].reshape(bsz, -1))
            c = flat.max(axis=1)
            bad = ~np.isfinite(c) | (c == 0.0)
            if bad.any():
                c = np.where(bad, np.abs(env.reshape(bsz, -1)).max(axis=1), c)
                c = np.maximum(c, 1e-300)
            env *= (1.0 / c).reshape((bsz,) + (1,) * (env.ndim - 1))
            log_scale += np.log(c)
        out = np.zeros((bsz, rows), dtype=env.dtype)
        out[:, : env.shape[1]] = env.reshape(bsz, -1)
        return out, log_scale

    # -- public trace-side API -----------------------------------------------

    def log_partition(self, lam) -> float:
        scal, log_scale = self._sweep([lam], derivative=False)
        val = scal[0, 0].real
        if val <= 0 or not np.isfinite(val):
            raise ChainBackendError("non-positive partition mantissa; numerical failure")
        return math.log(val) + float(log_scale[0]) + lam.lambda_c * self.identity_coeff

    def hu_values(self, lam, min_stderr=None):
        """(mu_c, mu_a, stderr_c, stderr_a, logZ) from one derivative sweep."""
        mu_c, mu_a, logz = self.hu_values_batch([lam])
        return (
            float(mu_c[0]),
            mu_a[0],
            0.0,
            np.zeros(len(self.z_order)),
            float(logz[0]),
        )

    def hu_values_batch(self, lams):
        """Vectorized hu_values over a list of GibbsParams."""
        if self.expectation_mode == "finite_difference":
            out = [self._hu_values_fd(lam) for lam in lams]
            return (
                np.array([o[0] for o in out]),
                np.array([o[1] for o in out]),
                np.array([o[4] for o in out]),
            )
        scal, log_scale = self._sweep(lams, derivative=True)
        val = scal[:, 0]
        mu_c = (scal[:, 1] / val).real + self.identity_coeff
        rows = [self.param_rows[("A", z)] for z in self.z_order]
        mu_a = (scal[:, rows] / val[:, None]).real if rows else np.zeros((len(lams), 0))
        logz = (
            np.log(val.real) + log_scale
            + self.identity_coeff * np.array([lam.lambda_c for lam in lams])
        )
        return np.asarray(mu_c, dtype=float), np.asarray(mu_a, dtype=float), logz

    def _hu_values_fd(self, lam):
        """Cross-check mode: central differences of log Z in each direction."""
        from .gibbs import GibbsParams

        d = self.fd_step
        logz = self.log_partition(lam)
        lp = self.log_partition(GibbsParams(lam.lambda_c + d, dict(lam.lambda_a)))
        lm = self.log_partition(GibbsParams(lam.lambda_c - d, dict(lam.lambda_a)))
        mu_c = (lp - lm) / (2 * d)
        mu_a = []
        for z in self.z_order:
            za_p = dict(lam.lambda_a)
            za_m = dict(lam.lambda_a)
            za_p[z] = za_p.get(z, 0.0) + d
            za_m[z] = za_m.get(z, 0.0) - d
            vp = self.log_partition(GibbsParams(lam.lambda_c, za_p))
            vm = self.log_partition(GibbsParams(lam.lambda_c, za_m))
            mu_a.append((vp - vm) / (2 * d))
        return float(mu_c), np.array(mu_a), 0.0, np.zeros(len(self.z_order)), logz

    def expectation(self, lam, obs) -> tuple[float, float]:
        """tr(obs sigma) by closure insertion (exact for any Pauli sum)."""
        from .gibbs import observable_terms

        base, base_log = self._sweep([lam], derivative=False)
        total = 0.0
        for coeff, p in observable_terms(obs, self.inst):
            # identity observables contribute their coefficient exactly
            if p.is_identity():
                total += coeff
                continue
            num, num_log = self._sweep([lam], derivative=False,
                                       closures=_pauli_closures(p))
            if num[0, 0] != 0:
                total += coeff * float(
                    (num[0, 0] / base[0, 0]).real
                    * math.exp(float(num_log[0] - base_log[0]))
                )
        return total, 0.0

    # -- amplitudes -----------------------------------------------------------

    def _build_amp_plan(self):
        """Einsum schedule for <bra| prod(gates) |ket>, ket a product state."""
        last: dict[int, int] = {}
        for gi, comp in enumerate(self.components):
            for q in comp.qubits:
                last[q] = gi
        steps = []
        open_list: list[int] = []
        for gi, comp in enumerate(self.components):
            avail = iter(_LETTERS)
            env_letters = {q: next(avail) for q in open_list}
            env_sub = "Z" + "".join(env_letters[q] for q in open_list)
            gate_out = {q: next(avail) for q in comp.qubits}
            gate_in = {}
            ket_subs = []
            fresh_kets = []
            for q in comp.qubits:
                if q in env_letters:
                    gate_in[q] = env_letters[q]
                else:
                    gate_in[q] = next(avail)
                    ket_subs.append(gate_in[q])
                    fresh_kets.append(q)
            gate_sub = "".join(gate_out[q] for q in comp.qubits) + "".join(
                gate_in[q] for q in comp.qubits
            )
            new_open = sorted(set(open_list) | set(comp.qubits))
            out_sub = "Z" + "".join(
                gate_out.get(q, env_letters.get(q)) for q in new_open
            )
            sub = ",".join([gate_sub, env_sub] + ket_subs) + "->" + out_sub
            steps.append(("gate", gi, sub, fresh_kets))
            open_list = new_open
            for q in sorted(q for q in comp.qubits if last[q] == gi):
                steps.append(("close", q, 1 + open_list.index(q), None))
                open_list.remove(q)
        return steps

    def _gate_dense(self, comp, lam):
        """Full gate tensor for one lambda (single or merged component)."""
        if comp.single is None:
            g, _, m = comp.dense_gates(self._thetas(comp, [lam]))
            return g[0], float(m[0])
        pt, coeff = comp.single
        theta = lam.lambda_c if comp.params[0] == "C" else lam.lambda_a.get(
            comp.params[0][1], 0.0
        )
        a = theta * coeff
        m = abs(a)
        decay = math.exp(-2.0 * m)
        ch = 0.5 * (1.0 + decay)
        sh = math.copysign(0.5 * (1.0 - decay), a)
        t = len(comp.qubits)
        eye = _delta_tensor(t)
        # delta axes are (out, in) pairs; gate layout is out*t + in*t
        order = [2 * i for i in range(t)] + [2 * i + 1 for i in range(t)]
        return ch * eye.transpose(order) + sh * pt, m

    def amplitude_scaled(self, lam_half, bra: int, ket_vectors):
        """<bra| exp(E(lam_half)) |ket> as (mantissa, log_scale)."""
        env = np.ones((1,), dtype=complex)
        log_scale = lam_half.lambda_c * self.identity_coeff
        amp_factor = 1.0 + 0.0j
        for q in self._untouched:
            bit = bra >> (self.n - q) & 1
            amp_factor *= complex(ket_vectors[q - 1][bit])
        for step in self._amp_plan:
            if step[0] == "gate":
                _, gi, sub, fresh_kets = step
                comp = self.components[gi]
                g, m = self._gate_dense(comp, lam_half)
                log_scale += m
                operands = [g, env] + [
                    np.asarray(ket_vectors[q - 1], dtype=complex) for q in fresh_kets
                ]
                env = np.einsum(sub, *operands)
                c = float(np.max(np.abs(env)))
                if c > 0 and np.isfinite(c):
                    env = env / c
                    log_scale += math.log(c)
            else:
                _, q, axis, _ = step
                bit = bra >> (self.n - q) & 1
                env = np.take(env, bit, axis=axis)
        return complex(env.reshape(())) * amp_factor, log_scale

    # -- explicit state-vector application (small n) ---------------------------

    def apply_exp_scaled(self, lam, v: np.ndarray):
        """exp(E(lam)) @ v for an explicit vector, n <= 20; returns (w, log)."""
        if self.n > 20:
            raise ChainBackendError("explicit vectors capped at n <= 20")
        w = np.asarray(v, dtype=complex).reshape((2,) * self.n)
        log_scale = lam.lambda_c * self.identity_coeff
        for comp in self.components:
            g, m = self._gate_dense(comp, lam)
            t = len(comp.qubits)
            axes = [q - 1 for q in comp.qubits]
            gm = g.reshape(1 << t, 1 << t)
            moved = np.moveaxis(w, axes, range(t))
            shape = moved.shape
            flat = gm @ moved.reshape(1 << t, -1)
            w = np.moveaxis(flat.reshape(shape), range(t), axes)
            log_scale += m
            c = float(np.max(np.abs(w)))
            if c > 0 and np.isfinite(c):
                w = w / c
                log_scale += math.log(c)
        return w.reshape(-1), log_scale


def _pauli_closures(p: PauliString) -> dict[int, np.ndarray]:
    """Per-qubit 2x2 factors of a Pauli word, keyed by 1-based qubit."""
    out = {}
    for q in p.support():
        xb = p.x >> (p.n - q) & 1
        zb = p.z >> (p.n - q) & 1
        if xb and zb:
            out[q] = np.array([[0, -1j], [1j, 0]])
        elif xb:
            out[q] = np.array([[0.0, 1], [1, 0]])
        else:
            out[q] = np.array([[1.0, 0], [0, -1]])
    return out
