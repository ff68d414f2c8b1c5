"""Optimal correlated equilibria for the participation game.

The planner's problem: choose a distribution G over the 2^n joint
participation outcomes that maximizes expected total profit, subject to G
being a correlated equilibrium — no device that receives a recommendation
can gain in conditional expectation by playing the opposite action.  That
is a linear program in the outcome probabilities, solved exactly by
:mod:`fedpart.lp_core`.

Two decision-extraction rules are provided.  Sampling (`sample_decision`)
realizes one outcome from G with a seeded generator and is the
game-theoretically faithful rule; thresholding (`threshold_decision`)
rounds per-device marginals at 1/2 and is the rule used for deterministic
reporting.  Harness output labels which rule produced each column.

A solved game may admit many optimal G; we return the solver's
deterministic vertex, so repeated runs agree bit-for-bit, but equality
with some other solver's optimizer should only ever be asserted on the
objective, never on G itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import game_model as gm
from .errors import NumericalError, UsageError
from .lp_core import EQ, GE, LinearProgram, LpSolution, Tolerances, solve
from .rng import SplitMix64

CE_TOL = 1e-7


@dataclass(frozen=True)
class CorrelatedDistribution:
    """Probabilities over joint decisions, canonical outcome order."""

    probabilities: np.ndarray
    num_devices: int

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (2 ** self.num_devices,):
            raise UsageError(
                f"distribution needs {2 ** self.num_devices} entries, got {p.shape}")
        if (p < -1e-8).any():
            raise UsageError("distribution has a significantly negative entry")
        p = np.maximum(p, 0.0)
        if abs(p.sum() - 1.0) > 1e-8:
            raise UsageError(f"distribution sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def point_mass(cls, decision: gm.Decision) -> "CorrelatedDistribution":
        n = len(decision)
        p = np.zeros(2 ** n)
        p[gm.decision_index(decision)] = 1.0
        return cls(p, n)


def marginals(dist: CorrelatedDistribution) -> np.ndarray:
    """Per-device participation probability Σ_{p: p_i=1} G(p)."""
    bits = gm.outcome_bits(dist.num_devices)
    return dist.probabilities @ bits


def sample_decision(dist: CorrelatedDistribution, seed: int) -> gm.Decision:
    """Draw one joint decision by inverse CDF in canonical outcome order."""
    u = SplitMix64(seed).uniform()
    cdf = np.cumsum(dist.probabilities)
    idx = int(np.searchsorted(cdf, u, side="right"))
    idx = min(idx, len(dist.probabilities) - 1)
    return gm.decision_from_index(idx, dist.num_devices)


def threshold_decision(dist: CorrelatedDistribution, cutoff: float = 0.5) -> gm.Decision:
    """Deterministic extraction: participate where the marginal reaches the cutoff."""
    return tuple(int(m >= cutoff) for m in marginals(dist))


@dataclass(frozen=True)
class CeCheck:
    ok: bool
    worst_violation: float
    worst_device: int | None = None
    worst_from: int | None = None
    worst_to: int | None = None


def _deviation_gains(profits: np.ndarray, i: int) -> np.ndarray:
    """Per-outcome V_i(p) - V_i(p with device i's bit flipped)."""
    num = profits.shape[0]
    flipped = np.arange(num) ^ (1 << i)
    return profits[:, i] - profits[flipped, i]


def verify_ce(dist: CorrelatedDistribution, devices: Sequence[gm.DeviceProfile],
              params: gm.GameParams, tol: float = CE_TOL) -> CeCheck:
    """Check every conditional deviation constraint; report the worst one.

    For device i recommended action q, the constraint is
    Σ_{p: p_i=q} G(p)·(V_i(p) − V_i(flip_i(p))) ≥ 0.  Pairs with
    q = q' are identically zero and can never be the strict worst.
    """
    n = len(devices)
    if dist.num_devices != n:
        raise UsageError("distribution and device list disagree on n")
    profits = gm.profit_tensor(devices, params)
    bits = gm.outcome_bits(n)
    worst = (0.0, None, None, None)
    for i in range(n):
        gains = _deviation_gains(profits, i)
        for q in (0, 1):
            mask = bits[:, i] == q
            value = float(np.sum(dist.probabilities[mask] * gains[mask]))
            if value < worst[0]:
                worst = (value, i, q, 1 - q)
    violation = -worst[0]
    return CeCheck(ok=violation <= tol, worst_violation=violation,
                   worst_device=worst[1], worst_from=worst[2], worst_to=worst[3])


@dataclass(frozen=True)
class GpmProgram:
    """The planner's LP plus the bookkeeping the reports want.

    ``raw_constraint_count`` counts the problem as posed: 2^n nonnegativity
    bounds, one normalization equality, and 4n conditional-deviation rows
    (including the 2n with q = q', which are identically 0 >= 0).  The
    solver-facing ``lp`` keeps only the 2n informative deviation rows plus
    the normalization, with nonnegativity handled as variable bounds.
    """

    lp: LinearProgram
    num_devices: int
    num_outcomes: int
    raw_constraint_count: int
    solver_constraint_count: int
    profits: np.ndarray


def build_gpm(devices: Sequence[gm.DeviceProfile],
              params: gm.GameParams | None = None,
              enumeration_cap: int = gm.DEFAULT_ENUMERATION_CAP) -> GpmProgram:
    """Assemble the profit-maximization LP over correlated equilibria."""
    params = params or gm.GameParams()
    gm.validate_devices(devices)
    n = len(devices)
    if n < 1:
        raise UsageError("need at least one device")
    profits = gm.profit_tensor(devices, params, cap=enumeration_cap)
    num = 2 ** n
    bits = gm.outcome_bits(n)
    rows = []
    for i in range(n):
        gains = _deviation_gains(profits, i)
        for q in (0, 1):
            rows.append(np.where(bits[:, i] == q, gains, 0.0))
    rows.append(np.ones(num))
    senses = tuple([GE] * 2 * n + [EQ])
    rhs = np.zeros(2 * n + 1)
    rhs[-1] = 1.0
    lp = LinearProgram(c=profits.sum(axis=1), rows=np.array(rows),
                       senses=senses, rhs=rhs)
    return GpmProgram(lp=lp, num_devices=n, num_outcomes=num,
                      raw_constraint_count=num + 4 * n + 1,
                      solver_constraint_count=2 * n + 1,
                      profits=profits)


@dataclass(frozen=True)
class GpmSolution:
    distribution: CorrelatedDistribution
    total_profit: float
    lp_solution: LpSolution
    program: GpmProgram

    def __iter__(self):
        # allows `dist, profit = solve_gpm(...)`
        return iter((self.distribution, self.total_profit))


def solve_gpm(devices: Sequence[gm.DeviceProfile],
              params: gm.GameParams | None = None,
              tol: Tolerances | None = None,
              enumeration_cap: int = gm.DEFAULT_ENUMERATION_CAP) -> GpmSolution:
    """Maximize expected total profit over correlated equilibria."""
    params = params or gm.GameParams()
    program = build_gpm(devices, params, enumeration_cap=enumeration_cap)
    sol = solve(program.lp, tol)
    if sol.status == "infeasible":
        # the all-abstain point mass always satisfies the q=1 rows vacuously,
        # so an infeasible report can only mean the LP was assembled wrong
        raise NumericalError("GPM reported infeasible; the constraint build is broken")
    if sol.status != "optimal":
        raise NumericalError(f"GPM solve ended with status {sol.status!r}")
    dist = CorrelatedDistribution(sol.x, program.num_devices)
    check = verify_ce(dist, devices, params)
    if not check.ok:
        raise NumericalError(
            f"solver output violates a deviation constraint by {check.worst_violation:.3e} "
            f"(device {check.worst_device}, {check.worst_from}->{check.worst_to})")
    return GpmSolution(distribution=dist, total_profit=sol.objective_value,
                       lp_solution=sol, program=program)
