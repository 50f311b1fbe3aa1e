"""Hamiltonian Updates: the feasibility loop and the bisection driver.

One feasibility run asks whether some Gibbs state sigma(lambda) attains
objective value >= mu - eps while every |tr(Z_A sigma)| <= eps. The loop
checks the objective first; an objective shortfall raises lambda_C, otherwise
the largest constraint violation is pushed back by a step of eps/4 (fixed
mode) or by the violation itself (adaptive mode). Exhausting the budget of
ceil(16 n eps^-2) updates declares the target mu infeasible.

With fixed steps, stretches of consecutive objective updates are evaluated
speculatively in batches when the backend supports it; the visited iterates
and verdicts are identical to the one-at-a-time loop.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .gibbs import ExpectationResult, GibbsParams, make_backend
from .paulis import ConstraintSet, bits_to_str


class SolverError(RuntimeError):
    pass


@dataclass
class HUPolicy:
    step_mode: str = "fixed"              # fixed | adaptive
    eta: float | None = None              # fixed step size, default eps/4
    budget_mode: str = "iterations"       # iterations | squared_decrement
    max_iterations: int | None = None     # default ceil(16 n eps^-2)
    check_order: str = "objective_first"
    tie_break: str = "largest_violation_then_lex"
    speculation_batch: int = 64           # 0 disables batched streaks

    def step(self, eps: float) -> float:
        eta = self.eta if self.eta is not None else eps / 4.0
        if eta <= 0:
            raise SolverError("step size must be positive")
        return eta

    def budget(self, n: int, eps: float) -> float:
        if self.max_iterations is not None:
            return self.max_iterations
        return math.ceil(16.0 * n / (eps * eps))


@dataclass
class HUOutcome:
    status: str                      # feasible | infeasible
    lam: GibbsParams
    final_expectations: ExpectationResult
    iterations_used: int
    oracle_calls: int


_FEASIBLE, _OBJECTIVE, _CONSTRAINT = 0, 1, 2


def _classify(mu_c, mu_a, mu, eps):
    if mu_c >= mu - eps and (mu_a.size == 0 or np.max(np.abs(mu_a)) <= eps):
        return _FEASIBLE
    if mu_c < mu - eps:
        return _OBJECTIVE
    return _CONSTRAINT


def hu_feasibility(inst, constraints: ConstraintSet, eps: float, mu: float,
                   backend, policy: HUPolicy | None = None) -> HUOutcome:
    """One feasibility run of the update loop at objective target mu."""
    if eps <= 0:
        raise SolverError("eps must be positive")
    policy = policy or HUPolicy()
    eta = policy.step(eps)
    budget = policy.budget(inst.n, eps)
    sq_budget = 16.0 * inst.n / (eps * eps)
    zs = constraints.z_strings if constraints is not None else ()
    lam = GibbsParams(0.0, {z: 0.0 for z in zs})

    batch_size = policy.speculation_batch
    can_batch = (
        policy.step_mode == "fixed"
        and batch_size > 1
        and hasattr(backend, "hu_values_batch")
    )

    def evaluate(l):
        mu_c, mu_a, se_c, se_a, logz = backend.hu_values(l, min_stderr=eps / 4.0)
        if not np.isfinite(mu_c) or not np.all(np.isfinite(mu_a)):
            raise SolverError(
                f"non-finite expectation at lambda l1={l.l1:.3g} (mu={mu})"
            )
        return mu_c, mu_a, se_c, se_a, logz

    t = 0
    oracle = 0
    spent_sq = 0.0
    streak = min(8, batch_size) if batch_size else 0
    vals = evaluate(lam)
    oracle += 1
    while True:
        mu_c, mu_a, se_c, se_a, logz = vals
        cls = _classify(mu_c, mu_a, mu, eps)
        if cls == _FEASIBLE:
            res = ExpectationResult(
                [mu_c, *mu_a.tolist()],
                [float(se_c), *np.atleast_1d(se_a).tolist()],
                logz,
            )
            return HUOutcome("feasible", lam, res, t, oracle)
        exhausted = (
            t >= budget
            if policy.budget_mode == "iterations"
            else spent_sq >= sq_budget
        )
        if exhausted:
            res = ExpectationResult(
                [mu_c, *mu_a.tolist()],
                [float(se_c), *np.atleast_1d(se_a).tolist()],
                logz,
            )
            return HUOutcome("infeasible", lam, res, t, oracle)

        if cls == _OBJECTIVE:
            if can_batch:
                remaining = (
                    int(budget - t)
                    if policy.budget_mode == "iterations"
                    else int(math.floor((sq_budget - spent_sq - 1e-12) / (eta * eta))) + 1
                )
                k_max = max(1, min(streak, remaining))
                lams = []
                cur = lam
                for _ in range(k_max):  # accumulate like the plain loop does
                    cur = cur.with_c(cur.lambda_c + eta)
                    lams.append(cur)
                bc, ba, blz = backend.hu_values_batch(lams)
                oracle += k_max
                adv = k_max
                broke = False
                for k in range(k_max):
                    if _classify(bc[k], ba[k], mu, eps) != _OBJECTIVE:
                        adv = k + 1
                        broke = True
                        break
                streak = min(8, batch_size) if broke else min(2 * streak, batch_size)
                lam = lams[adv - 1]
                vals = (
                    float(bc[adv - 1]),
                    np.asarray(ba[adv - 1]),
                    0.0,
                    np.zeros(len(zs)),
                    float(blz[adv - 1]),
                )
                t += adv
                spent_sq += adv * eta * eta
                continue
            step = eta if policy.step_mode == "fixed" else (mu - mu_c)
            lam = lam.with_c(lam.lambda_c + step)
        else:
            j = int(np.argmax(np.abs(mu_a)))  # first max = lex smallest z
            z = zs[j]
            step = eta if policy.step_mode == "fixed" else abs(mu_a[j])
            lam = lam.with_a(z, lam.lambda_a[z] - math.copysign(step, mu_a[j]))
        t += 1
        spent_sq += step * step
        vals = evaluate(lam)
        oracle += 1


@dataclass
class SolveReport:
    gw_lower: float
    gw_upper: float
    eps: float
    lambda_star: GibbsParams
    search_trace: list = field(default_factory=list)  # (mu, status, iterations)
    wall_time_s: float | None = None
    backend_kind: str = ""
    constraint_count: int = 0
    n: int = 0
    oracle_calls: int = 0
    iterations: int = 0

    def to_dict(self, include_timing: bool = False) -> dict:
        lam = self.lambda_star
        return {
            "gw_lower": self.gw_lower,
            "gw_upper": self.gw_upper,
            "eps": self.eps,
            "lambda_star": {
                "lambda_c": lam.lambda_c,
                "lambda_a": {
                    bits_to_str(z, self.n): v for z, v in sorted(lam.lambda_a.items())
                },
            },
            "search_trace": [
                {"mu": mu, "status": status, "iterations": iters}
                for mu, status, iters in self.search_trace
            ],
            "wall_time_s": self.wall_time_s if include_timing else None,
            "backend_kind": self.backend_kind,
            "constraint_count": self.constraint_count,
            "n": self.n,
            "oracle_calls": self.oracle_calls,
            "iterations": self.iterations,
        }

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


def gw_binary_search(inst, constraints: ConstraintSet, eps: float, backend=None,
                     policy: HUPolicy | None = None, cfg=None) -> SolveReport:
    """Bisect the objective target over [-1, 1] with one feasibility run per
    midpoint; stops when the bracket is narrower than eps."""
    if eps <= 0:
        raise SolverError("eps must be positive")
    if backend is None:
        backend = make_backend(inst, constraints, cfg)
    t0 = time.perf_counter()
    lo, hi = -1.0, 1.0
    best: HUOutcome | None = None
    trace = []
    oracle = 0
    iters = 0
    while hi - lo > eps:
        mu = (lo + hi) / 2.0
        out = hu_feasibility(inst, constraints, eps, mu, backend, policy)
        trace.append((mu, out.status, out.iterations_used))
        oracle += out.oracle_calls
        iters += out.iterations_used
        if out.status == "feasible":
            lo = mu
            best = out
        else:
            hi = mu
    zs = constraints.z_strings if constraints is not None else ()
    lam_star = best.lam if best is not None else GibbsParams(0.0, {z: 0.0 for z in zs})
    return SolveReport(
        gw_lower=lo,
        gw_upper=hi,
        eps=eps,
        lambda_star=lam_star,
        search_trace=trace,
        wall_time_s=time.perf_counter() - t0,
        backend_kind=getattr(backend, "kind", "?"),
        constraint_count=len(zs),
        n=inst.n,
        oracle_calls=oracle,
        iterations=iters,
    )


def gw_to_ugw(gw_value: float, n: int, norm_c: float) -> float:
    """Undo the 2^n ||C|| normalization of the SDP value."""
    return gw_value * (2.0 ** n) * norm_c
