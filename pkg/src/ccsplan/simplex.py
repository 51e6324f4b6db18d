"""Two-phase bounded-variable primal simplex.

Dantzig pricing with a Bland's-rule fallback after a stall threshold, ratio
ties broken by lowest variable index, geometric-mean row/column equilibration
before solving. Deterministic: identical inputs give bit-identical output.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lu_factor, lu_solve

from .lp import EQ, GE, LE, LinearProgram, LpSolution, Status, check_solution

BASIC, AT_LOWER, AT_UPPER = 0, 1, 2


@dataclass
class SolverSettings:
    feas_tol: float = 1e-7  # primal feasibility, on scaled rows
    opt_tol: float = 1e-9  # reduced-cost optimality
    pivot_tol: float = 1e-10
    max_iters: int = 50000
    stall_limit: int = 100  # iterations without progress before Bland's rule
    scale: bool = True


def _geometric_scaling(A: sp.csr_matrix, passes: int = 2):
    m, n = A.shape
    rs = np.ones(m)
    cs = np.ones(n)
    coo = A.tocoo()
    absv = np.abs(coo.data)
    for _ in range(passes):
        v = absv * rs[coo.row] * cs[coo.col]
        nz = v > 0
        for axis, scale, size in ((coo.row, rs, m), (coo.col, cs, n)):
            hi = np.zeros(size)
            lo = np.full(size, np.inf)
            np.maximum.at(hi, axis[nz], v[nz])
            np.minimum.at(lo, axis[nz], v[nz])
            used = hi > 0
            scale[used] /= np.sqrt(hi[used] * lo[used])
            v = absv * rs[coo.row] * cs[coo.col]
    return rs, cs


class _Loop:
    """One simplex phase over the standard-form system A x = b with bounds."""

    def __init__(self, A: sp.csc_matrix, b, lb, ub, settings):
        self.A = A
        self.AT = A.T.tocsr()
        self.b = b
        self.lb = lb
        self.ub = ub
        self.s = settings
        self.m = A.shape[0]
        self.iters = 0
        self.ray_var = None

    def run(self, c, basis, vstat, x):
        s = self.s
        m = self.m
        bland = False
        stall = 0
        best_obj = np.inf
        # optimality tolerance relative to the cost magnitude: with costs of
        # order 1e11 the roundoff in reduced costs dwarfs any absolute cutoff
        d_tol = s.opt_tol * max(1.0, float(np.abs(c).max(initial=0.0)))
        while True:
            if self.iters >= s.max_iters:
                return Status.ITERATION_LIMIT
            if m:
                B = self.A[:, basis].toarray()
                lu = lu_factor(B)
                xx = x.copy()
                xx[basis] = 0.0
                x[basis] = lu_solve(lu, self.b - self.A @ xx)
                y = lu_solve(lu, c[basis], trans=1)
                d = c - self.AT @ y
            else:
                d = c.copy()
            movable = self.ub > self.lb
            elig = movable & (
                ((vstat == AT_LOWER) & (d < -d_tol)) | ((vstat == AT_UPPER) & (d > d_tol))
            )
            cand = np.nonzero(elig)[0]
            if cand.size == 0:
                return Status.OPTIMAL
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            sigma = 1.0 if vstat[q] == AT_LOWER else -1.0
            if m:
                w = lu_solve(lu, self.A[:, [q]].toarray().ravel())
            else:
                w = np.zeros(0)
            dxb = -sigma * w

            # ratio test over basic variables; ties to lowest variable index
            t_basic = np.inf
            leave_p = -1
            leave_to = AT_LOWER
            for p in range(m):
                v = basis[p]
                if dxb[p] < -s.pivot_tol:
                    lim = max((x[v] - self.lb[v]) / (-dxb[p]), 0.0)
                    to = AT_LOWER
                elif dxb[p] > s.pivot_tol:
                    if np.isinf(self.ub[v]):
                        continue
                    lim = max((self.ub[v] - x[v]) / dxb[p], 0.0)
                    to = AT_UPPER
                else:
                    continue
                if lim < t_basic - 1e-12 or (
                    abs(lim - t_basic) <= 1e-12 and (leave_p == -1 or v < basis[leave_p])
                ):
                    t_basic = lim
                    leave_p = p
                    leave_to = to

            t_flip = self.ub[q] - self.lb[q]
            if t_flip <= t_basic:
                if np.isinf(t_flip):
                    self.ray_var = q
                    return Status.UNBOUNDED
                x[basis] += dxb * t_flip
                x[q] = self.ub[q] if vstat[q] == AT_LOWER else self.lb[q]
                vstat[q] = AT_UPPER if vstat[q] == AT_LOWER else AT_LOWER
            else:
                if np.isinf(t_basic):
                    self.ray_var = q
                    return Status.UNBOUNDED
                x[basis] += dxb * t_basic
                x[q] = x[q] + sigma * t_basic
                v_leave = basis[leave_p]
                x[v_leave] = self.lb[v_leave] if leave_to == AT_LOWER else self.ub[v_leave]
                vstat[v_leave] = leave_to
                basis[leave_p] = q
                vstat[q] = BASIC

            self.iters += 1
            obj = float(c @ x)
            if obj < best_obj - 1e-10 * (1.0 + abs(best_obj)):
                best_obj = obj
                stall = 0
            else:
                stall += 1
                if stall >= s.stall_limit:
                    bland = True


def solve(lp: LinearProgram, settings: SolverSettings | None = None) -> LpSolution:
    """Solve a bounded-variable LP; statuses Optimal/Infeasible/Unbounded or
    IterationLimit (with the current feasible point, never mislabelled)."""
    settings = settings or SolverSettings()
    lp.validate()
    n = lp.num_vars
    m = len(lp.rows)
    A = lp.matrix()
    b = lp.rhs()

    if settings.scale and m > 0 and A.nnz > 0:
        rs, cs = _geometric_scaling(A)
    else:
        rs, cs = np.ones(m), np.ones(n)
    As = (sp.diags(rs) @ A @ sp.diags(cs)).tocsc() if m else sp.csc_matrix((0, n))
    bs = b * rs
    lb = lp.lower / cs
    ub = lp.upper / cs
    c_struct = lp.objective * cs

    slack_coef = np.array([1.0 if r.sense in (LE, EQ) else -1.0 for r in lp.rows])
    slack_lb = np.zeros(m)
    slack_ub = np.array([0.0 if r.sense == EQ else np.inf for r in lp.rows])

    x = np.concatenate([lb[:n], np.zeros(m)])
    lb_all = np.concatenate([lb, slack_lb])
    ub_all = np.concatenate([ub, slack_ub])
    vstat = np.full(n + m, AT_LOWER, dtype=np.int8)

    if m:
        resid = bs - As @ x[:n]
        s_val = np.clip(resid * slack_coef, slack_lb, slack_ub)
        x[n:] = s_val
        gap = resid - slack_coef * s_val
    else:
        gap = np.zeros(0)

    art_rows = np.nonzero(np.abs(gap) > 0.0)[0]
    n_art = len(art_rows)
    cols = [As, sp.diags(slack_coef, shape=(m, m), format="csc")] if m else [sp.csc_matrix((0, n))]
    if n_art:
        art = sp.csc_matrix(
            (np.sign(gap[art_rows]), (art_rows, np.arange(n_art))), shape=(m, n_art)
        )
        cols.append(art)
    A_std = sp.hstack(cols, format="csc") if m else sp.csc_matrix((0, n + m))
    lb_all = np.concatenate([lb_all, np.zeros(n_art)])
    ub_all = np.concatenate([ub_all, np.full(n_art, np.inf)])
    x = np.concatenate([x, np.abs(gap[art_rows])])
    vstat = np.concatenate([vstat, np.full(n_art, AT_LOWER, dtype=np.int8)])

    basis = []
    art_of_row = {int(r): n + m + a for a, r in enumerate(art_rows)}
    for p in range(m):
        j = art_of_row.get(p, n + p)
        basis.append(j)
        vstat[j] = BASIC

    loop = _Loop(A_std, bs, lb_all, ub_all, settings)

    def finish(status):
        x_orig = x[:n] * cs
        rep = check_solution(lp, x_orig)
        return LpSolution(
            status=status,
            x=x_orig,
            objective_value=float(lp.objective @ x_orig),
            iterations=loop.iters,
            max_primal_infeasibility=rep.max_violation,
            ray_var=loop.ray_var,
        )

    if n_art:
        c1 = np.zeros(n + m + n_art)
        c1[n + m :] = 1.0
        st = loop.run(c1, basis, vstat, x)
        if st == Status.ITERATION_LIMIT:
            return finish(Status.ITERATION_LIMIT)
        art_sum = float(np.sum(x[n + m :]))
        if st != Status.OPTIMAL or art_sum > settings.feas_tol * (1.0 + np.abs(bs).max(initial=0.0)):
            return finish(Status.INFEASIBLE)
        # pin artificials at zero for phase 2
        ub_all[n + m :] = 0.0
        x[n + m :] = 0.0

    c2 = np.concatenate([c_struct, np.zeros(m + n_art)])
    st = loop.run(c2, basis, vstat, x)
    return finish(st)
