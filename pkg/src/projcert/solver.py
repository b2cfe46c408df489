"""Exact nearest point of a polyhedron (optionally cut by a hyperplane).

Solves ``min ||y - x||_2  s.t.  G y + h <= 0,  e @ y + e0 = 0`` with the dual
active-set method of Goldfarb and Idnani specialised to an identity Hessian.
The method starts at the unconstrained minimiser and adds violated
constraints one at a time while keeping the multipliers dual feasible, so the
first primal feasible iterate is the global minimiser. When a violated
constraint is a non-positive combination of the active ones the problem is
empty; that combination is checked as a Farkas certificate before
``INFEASIBLE`` is reported.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .regions import DEGENERATE_NORM, Constraint

FEAS_TOL = 1e-10
KKT_TOL = 1e-9
WITNESS_TOL = 1e-7
INTERIOR_MARGIN = 1e-7


class SolverStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NOT_CONVERGED = "not_converged"


@dataclass(frozen=True)
class SolverOutcome:
    status: SolverStatus
    distance: float = np.inf
    witness: Optional[np.ndarray] = None
    iterations: int = 0
    interior: bool = False

    @property
    def feasible(self) -> bool:
        return self.status is SolverStatus.FEASIBLE


@dataclass(frozen=True)
class RegionProblem:
    """Inequalities ``G @ y + h <= 0`` and an optional hyperplane ``e @ y + e0 = 0``."""

    center: np.ndarray
    G: np.ndarray
    h: np.ndarray
    eq_normal: Optional[np.ndarray] = None
    eq_offset: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.center, dtype=np.float64).reshape(-1)
        m = x.shape[0]
        G = np.asarray(self.G, dtype=np.float64).reshape(-1, m) if np.size(self.G) else np.zeros((0, m))
        h = np.asarray(self.h, dtype=np.float64).reshape(-1)
        if G.shape[1] != m or h.shape[0] != G.shape[0]:
            raise ValueError(f"inequalities of shape {G.shape}/{h.shape} do not fit dimension {m}")
        object.__setattr__(self, "center", x)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        if self.eq_normal is not None:
            e = np.asarray(self.eq_normal, dtype=np.float64).reshape(-1)
            if e.shape[0] != m:
                raise ValueError(f"equality normal has dimension {e.shape[0]}, expected {m}")
            if np.linalg.norm(e) <= DEGENERATE_NORM:
                raise ValueError("equality normal is degenerate")
            object.__setattr__(self, "eq_normal", e)
            object.__setattr__(self, "eq_offset", float(self.eq_offset))

    @classmethod
    def from_constraints(cls, center, inequalities: Sequence[Constraint], equality: Constraint | None = None):
        m = np.asarray(center).shape[0]
        G = np.stack([c.normal for c in inequalities]) if inequalities else np.zeros((0, m))
        h = np.array([c.offset for c in inequalities])
        if equality is None:
            return cls(center, G, h)
        return cls(center, G, h, equality.normal, equality.offset)

    @property
    def dim(self) -> int:
        return self.center.shape[0]


def _normalise(G, h):
    """Unit-normal rows; zero rows are either trivially true or a certificate of emptiness."""
    norms = np.linalg.norm(G, axis=1)
    zero = norms <= DEGENERATE_NORM
    if np.any(h[zero] > FEAS_TOL):
        return None, None, None
    keep = ~zero
    return G[keep] / norms[keep, None], h[keep] / norms[keep], np.flatnonzero(keep)


def _solve(x, G, h, e=None, e0=0.0, max_iter=None) -> SolverOutcome:
    m = x.shape[0]
    Gn, hn, _ = _normalise(G, h)
    if Gn is None:
        return SolverOutcome(SolverStatus.INFEASIBLE)
    # a @ y >= beta form
    A = -Gn
    beta = hn
    k_ineq = A.shape[0]
    if max_iter is None:
        max_iter = 10 * (k_ineq + m + 1)
    tol = FEAS_TOL * max(1.0, float(np.max(np.abs(x))) if m else 1.0)

    y = x.copy()
    cols: list[np.ndarray] = []  # active normals
    rhs: list[float] = []
    ids: list[int] = []  # -1 marks the equality
    u: list[float] = []
    if e is not None:
        en = np.linalg.norm(e)
        a_eq, b_eq = e / en, -e0 / en
        y = y - (a_eq @ y - b_eq) * a_eq
        cols.append(a_eq)
        rhs.append(b_eq)
        ids.append(-1)
        u.append(0.0)

    it = 0
    while True:
        if k_ineq == 0:
            break
        s = A @ y - beta
        p = int(np.argmin(s))
        if s[p] >= -tol:
            break
        uplus = np.array(u + [0.0])
        while True:
            it += 1
            if it > max_iter:
                return SolverOutcome(SolverStatus.NOT_CONVERGED, iterations=it)
            a_p = A[p]
            if cols:
                N = np.column_stack(cols)
                r = np.linalg.lstsq(N, a_p, rcond=None)[0]
                z = a_p - N @ r
            else:
                N = None
                r = np.zeros(0)
                z = a_p
            znorm2 = float(z @ z)
            t1, k_drop = np.inf, -1
            for k, idx in enumerate(ids):
                if idx >= 0 and r[k] > 1e-14:
                    ratio = uplus[k] / r[k]
                    if ratio < t1:
                        t1, k_drop = ratio, k
            s_p = float(a_p @ y - beta[p])
            t2 = -s_p / znorm2 if znorm2 > 1e-20 else np.inf
            if t2 <= 0.0:
                break  # already satisfied after earlier moves
            t = min(t1, t2)
            if not np.isfinite(t):
                if _farkas_ok(N, r, a_p, np.array(rhs), beta[p], ids, tol):
                    return SolverOutcome(SolverStatus.INFEASIBLE, iterations=it)
                return SolverOutcome(SolverStatus.NOT_CONVERGED, iterations=it)
            if np.isfinite(t2):
                y = y + t * z
            uplus[: len(r)] -= t * r
            uplus[-1] += t
            if t2 <= t1:
                cols.append(a_p)
                rhs.append(float(beta[p]))
                ids.append(p)
                u = list(uplus)
                break
            del cols[k_drop], rhs[k_drop], ids[k_drop]
            uplus = np.delete(uplus, k_drop)
            u = list(uplus[:-1])

    resid = _max_violation(y, Gn, hn, e, e0)
    if resid > WITNESS_TOL:
        return SolverOutcome(SolverStatus.NOT_CONVERGED, iterations=it)
    return SolverOutcome(SolverStatus.FEASIBLE, float(np.linalg.norm(y - x)), y, it)


def _farkas_ok(N, r, a_p, rhs, beta_p, ids, tol) -> bool:
    # a_p = N r with non-positive weights on inequalities and beta_p > r @ rhs
    # means no y satisfies the active set together with a_p @ y >= beta_p.
    if N is None:
        return False
    ineq = np.array([i >= 0 for i in ids])
    if np.any(r[ineq] > 1e-12):
        return False
    if np.linalg.norm(a_p - N @ r) > KKT_TOL:
        return False
    return beta_p - float(r @ rhs) > tol


def _max_violation(y, Gn, hn, e, e0) -> float:
    viol = float(np.max(Gn @ y + hn, initial=0.0))
    if e is not None:
        viol = max(viol, abs(float(e @ y + e0)) / float(np.linalg.norm(e)))
    return viol


def min_distance_on_boundary(problem: RegionProblem, max_iter: int | None = None) -> SolverOutcome:
    """Closest point to ``problem.center`` satisfying every constraint of the problem."""
    return _solve(problem.center, problem.G, problem.h, problem.eq_normal, problem.eq_offset, max_iter)


def feasibility(G, h, center=None, prefer_interior: bool = True) -> SolverOutcome:
    """Decide whether ``G @ y + h <= 0`` has a solution.

    With ``prefer_interior`` the constraints are first tightened by a small
    margin, so the witness is strictly inside whenever that tightened system
    is non-empty (``interior`` is then set on the outcome).
    """
    G = np.asarray(G, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64).reshape(-1)
    if G.ndim != 2 or G.shape[0] != h.shape[0]:
        raise ValueError(f"inequalities of shape {G.shape}/{h.shape} are inconsistent")
    m = G.shape[1]
    x = np.zeros(m) if center is None else np.asarray(center, dtype=np.float64)
    if x.shape != (m,):
        raise ValueError(f"center has shape {x.shape}, expected ({m},)")
    if prefer_interior and G.shape[0]:
        norms = np.linalg.norm(G, axis=1)
        out = _solve(x, G, h + INTERIOR_MARGIN * norms)
        if out.feasible:
            return SolverOutcome(out.status, out.distance, out.witness, out.iterations, interior=True)
    return _solve(x, G, h)
