"""Certificates and diagnostics: the brute-force QUBO oracle, the l1-maximizing
stability linear program, the constraint-count scaling diagnostic, the purity
uniqueness test, and sandwich reports combining solver and rounding output."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .gibbs import make_backend, purity_from_backend
from .simplex import UNBOUNDED, simplex_max
from .paulis import ConstraintSet, PauliOperator, diagonal_group


class CertifyError(ValueError):
    pass


@dataclass
class Certificate:
    kind: str          # sandwich | xi_bound | purity | stability_diag
    payload: dict = field(default_factory=dict)
    summary: str = ""


def brute_force_qubo(c: PauliOperator, cap_n: int = 4) -> dict:
    """Exact max of <x|C|x> over all sign vectors (2^(2^n) enumeration).

    Vectors are enumerated with +1 preferred: index g maps to
    x_j = +1 - 2*bit_{D-1-j}(g), so the first argmax is the lexicographically
    smallest optimizer under (+1 < -1) ordering.
    """
    n = c.n
    if n > cap_n:
        raise CertifyError(f"brute force capped at n <= {cap_n}")
    dim = 1 << n
    dense = c.to_dense().real
    count = 1 << dim
    vals = np.empty(count)
    best_val = -np.inf
    best_g = 0
    chunk = 1 << 16
    shifts = (dim - 1 - np.arange(dim)).astype(np.uint64)
    for start in range(0, count, chunk):
        gs = np.arange(start, min(start + chunk, count), dtype=np.uint64)
        x = 1.0 - 2.0 * ((gs[:, None] >> shifts) & np.uint64(1))
        v = np.einsum("bi,bi->b", x @ dense, x)
        vals[start:start + len(gs)] = v
        k = int(np.argmax(v))
        if v[k] > best_val:
            best_val = float(v[k])
            best_g = start + k
    x = 1.0 - 2.0 * (((np.uint64(best_g) >> shifts) & np.uint64(1)).astype(float))
    return {"value": best_val, "argmax": x}


def _achievable_sign_patterns(s: ConstraintSet) -> np.ndarray:
    """All sign rows (-1)^<z_i, b> over basis states b, via the GF(2) image.

    The map b -> (<z_1,b>, ..., <z_m,b>) is linear, so its image is spanned by
    the patterns of the n unit vectors; enumerating that span covers every
    basis state regardless of n.
    """
    m = len(s.z_strings)
    n = s.n
    gens = set()
    for j in range(n):
        bit = 1 << (n - 1 - j)
        pat = 0
        for i, z in enumerate(s.z_strings):
            if z & bit:
                pat |= 1 << i
        gens.add(pat)
    span = {0}
    for g in gens:
        span |= {p ^ g for p in span}
    rows = np.array(
        [[-1.0 if (p >> i) & 1 else 1.0 for i in range(m)] for p in sorted(span)]
    )
    return rows


def xi_lp(s: ConstraintSet, v: float, n: int | None = None,
          cap_m: int = 12) -> dict:
    """sup ||xi||_1  s.t.  sum_i xi_i Z_{A_i} >= -v I, solved orthant by
    orthant with the dense simplex; diagonal constraints reduce the matrix
    inequality to one linear row per achievable sign pattern."""
    m = len(s.z_strings)
    if m == 0:
        return {"xi": 0.0, "unbounded": False}
    if m > cap_m:
        raise CertifyError(f"|S|={m} exceeds the LP cap {cap_m}")
    if v <= 0:
        raise CertifyError("v must be positive")
    rows = _achievable_sign_patterns(s)
    best = 0.0
    for tau in itertools.product((1.0, -1.0), repeat=m):
        a = -(rows * np.asarray(tau))
        status, u, val = simplex_max(np.ones(m), a, np.full(rows.shape[0], v))
        if status == UNBOUNDED:
            return {"xi": math.inf, "unbounded": True}
        best = max(best, val)
    return {"xi": best, "unbounded": False}


def stability_diag(k: int, eps: float, norm_c: float) -> float:
    """(2^k - 1)^(1/6) * eps^(1/3) * ||C||, a constant-free scaling diagnostic
    for the relaxed-vs-exact gap at group order 2^k."""
    if k < 0:
        raise CertifyError("k must be >= 0")
    return ((2.0 ** k - 1.0) ** (1.0 / 6.0)) * (eps ** (1.0 / 3.0)) * norm_c


def purity_uniqueness(inst, constraints, lam, scale_list, delta: float,
                      backend=None, cfg=None) -> Certificate:
    """Unique-leading-eigenvector test: purity above 1/4 + delta at any scale
    certifies a non-degenerate top eigenvalue (trivial diagonal group only)."""
    if diagonal_group(inst.op).order != 1:
        raise CertifyError(
            "purity certificate requires a trivial diagonal group: with "
            "nontrivial constraints the Gibbs family is not a pure spectral probe"
        )
    if backend is None:
        backend = make_backend(inst, constraints, cfg)
    purities = [purity_from_backend(backend, lam.scaled(t)) for t in scale_list]
    passed = any(p >= 0.25 + delta for p in purities)
    return Certificate(
        "purity",
        {
            "scales": list(scale_list),
            "purities": purities,
            "delta": delta,
            "passed": passed,
        },
        summary=(
            f"purity reaches {max(purities):.4f} "
            f"({'>= ' if passed else '< '}1/4 + {delta}); "
            + ("leading eigenvector is unique" if passed else "no uniqueness certificate")
        ),
    )


def sandwich_report(gw, rounded) -> Certificate:
    """Bracket QUBO/(2^n ||C||) between the rounded value and the SDP bound."""
    if gw.gw_upper == 0:
        ratio = math.inf
    else:
        ratio = rounded.energy_density / gw.gw_upper
    lo = rounded.energy_density - rounded.energy_stderr
    hi = gw.gw_upper + gw.eps
    if lo > hi + 1e-12:
        raise CertifyError("inconsistent sandwich: rounded value above the SDP bound")
    return Certificate(
        "sandwich",
        {
            "rounded": rounded.energy_density,
            "rounded_stderr": rounded.energy_stderr,
            "gw_lower": gw.gw_lower,
            "gw_upper": gw.gw_upper,
            "eps": gw.eps,
            "ratio": ratio,
            "bracket": [lo, hi],
        },
        summary=(
            f"QUBO/(2^n ||C||) in [{lo:.4f}, {hi:.4f}]; "
            f"rounded/SDP ratio {ratio:.4f}"
        ),
    )
