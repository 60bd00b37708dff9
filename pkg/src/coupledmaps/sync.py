"""Synchronization bounds for the skew pair and their check along orbits.

With Delta_n = |x_n - y_n| and Delta_c = |c1 - c2| one step of the pair gives

    Delta_{n+1} <= (1 - k) Delta_c + 4 c1 (1 - k) Delta_n,

a contraction once k > 1 - 1/(4 c1). Summing the geometric series yields the
asymptotic bound W_inf(k) on limsup Delta_n.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import BoundInvalid, DomainError
from .maps import CoupledTrajectory

# slack for comparing floating-point orbits against closed-form bounds
BOUND_SLACK = 1e-6

CSV_COLUMNS = (
    "c1", "c2", "k", "k_threshold", "w_inf", "crude_bound",
    "mb_bound", "empirical_limsup", "n_used", "flag",
)


def coupling_threshold(c1: float) -> float:
    if not 0.0 < c1 <= 1.0:
        raise DomainError(f"c1={c1!r} outside (0, 1]")
    return 1.0 - 1.0 / (4.0 * c1)


def w_infinity(c1: float, c2: float, k: float) -> float:
    """Asymptotic bound on |x_n - y_n|; finite only above the coupling threshold."""
    threshold = coupling_threshold(c1)
    if k <= threshold:
        raise BoundInvalid(f"k={k} <= threshold {threshold:.6f}: series diverges")
    rate = (1.0 - k) * 4.0 * c1
    return abs(c1 - c2) * (1.0 - k) / (1.0 - rate)


def crude_bound(c1: float, c2: float, k: float) -> float:
    """sup_n Delta_n <= (1 - k)(c1 + c2), the one-step estimate."""
    return (1.0 - k) * (c1 + c2)


def mb_bound(c1: float, c2: float, k: float) -> float:
    """The general two-map estimate 2(1 - k) sup |T_i|, with sup |T_i| = c_i."""
    return 2.0 * (1.0 - k) * max(c1, c2)


def delta_series(traj: CoupledTrajectory) -> np.ndarray:
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    return np.abs(traj.xs - traj.ys)


def recursion_holds(traj: CoupledTrajectory, slack: float = 1e-12) -> bool:
    """Check the one-step inequality at every step, including the first."""
    s = traj.system
    delta = np.abs(np.concatenate(([traj.x0], traj.xs)) - np.concatenate(([traj.y0], traj.ys)))
    if traj.burn_in:
        # the first stored step is not adjacent to (x0, y0)
        delta = delta[1:]
    rhs = (1.0 - s.k) * abs(s.c1 - s.c2) + 4.0 * s.c1 * (1.0 - s.k) * delta[:-1]
    return bool(np.all(delta[1:] <= rhs + slack))


@dataclass(frozen=True)
class SyncBoundReport:
    c1: float
    c2: float
    k: float
    k_threshold: float
    w_inf: Optional[float]
    crude_bound: float
    mb_bound: float
    empirical_limsup: float
    n_used: int
    violated: bool = False
    flag: str = ""

    def as_row(self) -> dict:
        row = asdict(self)
        row.pop("violated")
        return {key: row[key] for key in CSV_COLUMNS}


def verify_limsup_bound(
    traj: CoupledTrajectory, tail_start: int = 0, slack: float = BOUND_SLACK
) -> SyncBoundReport:
    """Compare max Delta_n over the tail against W_inf(k).

    ``tail_start`` indexes the stored trajectory, so with burn_in b the tail
    starts at iterate b + tail_start + 1. Raises BoundInvalid below threshold.
    """
    if not 0 <= tail_start < len(traj):
        raise DomainError(f"tail_start={tail_start} not inside trajectory of length {len(traj)}")
    s = traj.system
    w = w_infinity(s.c1, s.c2, s.k)
    tail = delta_series(traj)[tail_start:]
    limsup = float(tail.max())
    violated = limsup > w + slack
    return SyncBoundReport(
        c1=s.c1,
        c2=s.c2,
        k=s.k,
        k_threshold=coupling_threshold(s.c1),
        w_inf=w,
        crude_bound=crude_bound(s.c1, s.c2, s.k),
        mb_bound=mb_bound(s.c1, s.c2, s.k),
        empirical_limsup=limsup,
        n_used=len(tail),
        violated=violated,
        flag="VIOLATED" if violated else "",
    )


def sync_report(traj: CoupledTrajectory, tail_start: int = 0) -> SyncBoundReport:
    """Like verify_limsup_bound, but a below-threshold k gives a flagged row."""
    try:
        return verify_limsup_bound(traj, tail_start)
    except BoundInvalid:
        s = traj.system
        tail = delta_series(traj)[tail_start:]
        return SyncBoundReport(
            c1=s.c1,
            c2=s.c2,
            k=s.k,
            k_threshold=coupling_threshold(s.c1),
            w_inf=None,
            crude_bound=crude_bound(s.c1, s.c2, s.k),
            mb_bound=mb_bound(s.c1, s.c2, s.k),
            empirical_limsup=float(tail.max()),
            n_used=len(tail),
            flag="BOUND_INVALID",
        )
