"""Randomized rounding: map a feasible Gibbs dual to a sign vector
x_i = sign(Re <i| exp(E(lambda/2)) U |0>) with U a product of random
single-qubit rotations, and estimate its energy density either exactly
(explicit vectors, small n) or by Monte Carlo over uniformly sampled basis
indices (any n), plus the Gaussian-state rounding heuristic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gibbs import GibbsParams, make_backend
from .paulis import PauliOperator, apply_to_basis


class RoundingError(RuntimeError):
    pass


@dataclass
class RotationSpec:
    """Per-qubit rotation angles (phi, omega, theta), uniform on [0, 2pi)."""

    angles: np.ndarray  # shape (n, 3)
    seed: int

    @property
    def n(self):
        return self.angles.shape[0]

    def ket_vectors(self) -> list[np.ndarray]:
        """R(phi, omega, theta)|0> per qubit (first column of the rotation)."""
        out = []
        for phi, omega, theta in self.angles:
            out.append(np.array([
                np.exp(-0.5j * (phi + omega)) * math.cos(theta / 2.0),
                np.exp(-0.5j * (phi - omega)) * math.sin(theta / 2.0),
            ]))
        return out


def sample_rotation(n: int, seed: int = 0) -> RotationSpec:
    rng = np.random.default_rng(seed)
    return RotationSpec(rng.uniform(0.0, 2.0 * math.pi, size=(n, 3)), seed)


@dataclass
class RoundedSolution:
    mode: str                              # explicit | implicit
    energy_density: float
    energy_stderr: float
    samples_used: int
    signs: np.ndarray | None = None        # explicit mode, +-1 entries
    lam_half: GibbsParams | None = None    # implicit handle
    rotation: RotationSpec | None = None


def _sign(v: np.ndarray) -> np.ndarray:
    """Component sign with the fixed tie-break sign(0) = +1."""
    return np.where(v >= 0.0, 1.0, -1.0)


def round_explicit(inst, constraints, lam, rot: RotationSpec, backend=None,
                   cfg=None, cap_n: int = 24) -> RoundedSolution:
    """Materialize the full sign vector and score it exactly."""
    if inst.n > cap_n:
        raise RoundingError(f"explicit rounding capped at n <= {cap_n}")
    if backend is None:
        backend = make_backend(inst, constraints, cfg)
    ket = np.array([1.0 + 0j])
    for u in rot.ket_vectors():
        ket = np.kron(ket, u)
    if inst.flags.real_symmetric:
        # Re <i| e^{E/2} U |0> = <i| e^{E/2} |Re U|0>> for a real exponential,
        # so one real apply suffices; its imaginary residue detects a mis-flag
        w, _ = backend.apply_exp_scaled(lam.scaled(0.5), ket.real)
    else:
        w, _ = backend.apply_exp_scaled(lam.scaled(0.5), ket)
    resid = float(np.max(np.abs(w.imag))) if np.iscomplexobj(w) else 0.0
    scale = float(np.max(np.abs(w))) or 1.0
    if inst.flags.real_symmetric and resid > 1e-10 * scale:
        import warnings

        warnings.warn(
            "rounding amplitudes have a non-trivial imaginary part; "
            "instance may be mis-flagged real_symmetric"
        )
    x = _sign(np.real(w))
    cp = inst.op.scaled(1.0 / inst.op.norm_upper_bound)
    val = energy_density_exact(x, cp)
    return RoundedSolution("explicit", val, 0.0, 0, signs=x,
                           lam_half=lam.scaled(0.5), rotation=rot)


def energy_density_exact(x: np.ndarray, c: PauliOperator) -> float:
    """2^-n <x|C|x> by per-term Pauli application (cost m 2^n)."""
    n = c.n
    if n > 24:
        raise RoundingError("explicit energy density capped at n <= 24")
    dim = 1 << n
    if x.shape[0] != dim:
        raise RoundingError("sign vector has the wrong length")
    idx = np.arange(dim, dtype=np.uint64)
    total = 0.0
    for p, coeff in c.items():
        from .paulis import basis_phases

        phases = basis_phases(p, idx)
        contrib = np.sum(x[(idx ^ np.uint64(p.x)).astype(np.intp)] * phases * x)
        total += coeff * float(np.real(contrib))
    return total / dim


def energy_density_mc(inst, constraints, lam, rot: RotationSpec, eps: float,
                      delta: float = 1.0 / 3.0, backend=None, cfg=None,
                      seed: int = 0) -> RoundedSolution:
    """Monte Carlo estimate of 2^-n <x|C|x> without materializing x.

    Samples N = ceil(2 ||alpha||_l1^2 ln(2/delta) / eps^2) uniform basis
    indices; each sample is X = x_i sum_j alpha_j <k_j|P_j|i> x_{k_j}, with
    every sign read off one amplitude evaluation. |X| <= ||alpha||_l1 always.
    """
    if eps <= 0:
        raise RoundingError("eps must be positive")
    if backend is None:
        backend = make_backend(inst, constraints, cfg)
    n = inst.n
    norm = inst.op.norm_upper_bound
    terms = [(c / norm, p) for p, c in inst.op.items()]
    alpha_l1 = sum(abs(c) for c, _ in terms)
    nsamp = math.ceil(2.0 * alpha_l1 * alpha_l1 * math.log(2.0 / delta) / (eps * eps))
    rng = np.random.default_rng(seed)
    lam_half = lam.scaled(0.5)
    kets = rot.ket_vectors()
    sign_cache: dict[int, float] = {}

    def sign_at(i: int) -> float:
        s = sign_cache.get(i)
        if s is None:
            mant, _ = backend.amplitude_scaled(lam_half, i, kets)
            s = 1.0 if mant.real >= 0.0 else -1.0
            sign_cache[i] = s
        return s

    samples = np.empty(nsamp)
    for k in range(nsamp):
        i = int(rng.integers(0, 1 << n))
        xi = sign_at(i)
        acc = 0.0
        for coeff, p in terms:
            j, phase = apply_to_basis(p, i)
            acc += coeff * float(phase.real) * sign_at(j)
        val = xi * acc
        if abs(val) > alpha_l1 + 1e-9:
            raise RoundingError("sample exceeded the l1 bound; backend inconsistency")
        samples[k] = val
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(nsamp)) if nsamp > 1 else float("inf")
    return RoundedSolution("implicit", mean, stderr, nsamp,
                           lam_half=lam_half, rotation=rot)


def haar_round_heuristic(inst, constraints, lam, l_prime: int = 50,
                         backend=None, cfg=None, seed: int = 0) -> float:
    """Average energy of entrywise-rounded Gaussian states pushed through
    exp(E/2), each normalized by its own partition estimate."""
    if backend is None:
        backend = make_backend(inst, constraints, cfg)
    n = inst.n
    if n > 24:
        raise RoundingError("heuristic rounding capped at n <= 24")
    rng = np.random.default_rng(seed)
    norm = inst.op.norm_upper_bound
    half = lam.scaled(0.5)
    dim = 1 << n
    idx = np.arange(dim, dtype=np.uint64)
    total = 0.0
    from .paulis import basis_phases

    for _ in range(l_prime):
        psi = rng.standard_normal(dim)
        tilde = _sign(psi) / math.sqrt(dim)
        w, _ = backend.apply_exp_scaled(half, tilde)
        num = 0.0
        for p, coeff in inst.op.items():
            phases = basis_phases(p, idx)
            num += (coeff / norm) * float(
                np.real(np.sum(np.conj(w[(idx ^ np.uint64(p.x)).astype(np.intp)]) * phases * w))
            )
        den = float(np.real(np.vdot(w, w)))
        total += num / den
    return total / l_prime
