"""Optimization core for credal dominance tests.

Two kinds of programs are minimized over the polytope
``{x : x_j >= lower, sum_j x_j = total}``:

* ratios of affine functions (``FractionalLP``), solved exactly by the
  Charnes-Cooper transformation followed by a dense two-phase simplex;
* ratios of weighted log sums (``RatioProgram``), solved by multistart
  projected-gradient descent.

A dense Bland's-rule simplex is used on purpose: the programs have at most
a couple of dozen variables and exactness plus determinism matter more
than speed here.  The nonlinear program is attacked by multistart rather
than Dinkelbach iterations because the Dinkelbach subproblems mix concave
and convex log terms (the coefficients alpha_j - lambda*beta_j change
sign) and are themselves nonconvex; many cheap local descents validated
against a grid oracle are easier to trust.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Dominance decisions use "optimum > 1 + DOMINANCE_MARGIN" so that numerical
#: noise errs toward returning extra classes, never toward dropping one.
DOMINANCE_MARGIN = 1e-9

_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-8


class OptimizeError(Exception):
    """Base class for solver failures."""


class DenominatorSignError(OptimizeError):
    """The fractional denominator is not strictly positive on the feasible set."""


class IndefiniteRatioError(OptimizeError):
    """The ratio denominator changes sign on the feasible set."""


class LinearProgramError(OptimizeError):
    """Infeasible or unbounded linear program (indicates a construction bug)."""


@dataclass(frozen=True)
class FractionalLP:
    """Minimize (num_coeffs.x + num_const) / (den_coeffs.x + den_const)
    subject to x_j >= lower and sum_j x_j = total.
    """

    num_coeffs: np.ndarray
    den_coeffs: np.ndarray
    lower: float
    total: float
    num_const: float = 0.0
    den_const: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "num_coeffs", np.asarray(self.num_coeffs, dtype=float))
        object.__setattr__(self, "den_coeffs", np.asarray(self.den_coeffs, dtype=float))
        if self.num_coeffs.shape != self.den_coeffs.shape or self.num_coeffs.ndim != 1:
            raise ValueError("numerator/denominator coefficient shapes differ")
        if self.total < self.size * self.lower - 1e-12:
            raise ValueError("empty feasible set: total < size * lower")

    @property
    def size(self) -> int:
        return self.num_coeffs.shape[0]

    def vertices(self) -> np.ndarray:
        """The k extreme points: one coordinate at total-(k-1)*lower, rest at lower."""
        k = self.size
        v = np.full((k, k), self.lower)
        np.fill_diagonal(v, self.total - (k - 1) * self.lower)
        return v

    def ratio_at(self, x: np.ndarray) -> np.ndarray:
        num = x @ self.num_coeffs + self.num_const
        den = x @ self.den_coeffs + self.den_const
        return num / den


@dataclass(frozen=True)
class LinearProgram:
    """minimize c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0."""

    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray


@dataclass(frozen=True)
class RatioProgram:
    """Minimize (alpha . log(y) - a) / (beta . log(y) - b) subject to
    y_j >= epsilon and sum_j y_j = total(), where y ranges over the priors of
    the n_feasible surviving models out of n_models, plus a fixed-epsilon
    null model.
    """

    alpha: np.ndarray
    beta: np.ndarray
    a: float
    b: float
    epsilon: float
    n_models: int
    n_feasible: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        if self.n_feasible == 0:
            object.__setattr__(self, "n_feasible", self.alpha.shape[0])
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise ValueError("alpha/beta shapes differ")
        if self.alpha.shape[0] != self.n_feasible:
            raise ValueError("coefficient length must equal n_feasible")
        if not 1 <= self.n_feasible <= self.n_models:
            raise ValueError("need 1 <= n_feasible <= n_models")

    def total(self) -> float:
        """Prior mass shared by the surviving models.

        The null model keeps epsilon and each of the n_models - n_feasible
        removed models is parked at its epsilon lower bound.
        """
        return 1.0 - self.epsilon - (self.n_models - self.n_feasible) * self.epsilon

    def vertices(self) -> np.ndarray:
        k = self.n_feasible
        v = np.full((k, k), self.epsilon)
        np.fill_diagonal(v, self.total() - (k - 1) * self.epsilon)
        return v

    def value_at(self, y: np.ndarray) -> np.ndarray:
        logs = np.log(y)
        num = logs @ self.alpha - self.a
        den = logs @ self.beta - self.b
        return num / den


# ---------------------------------------------------------------------------
# dense two-phase simplex
# ---------------------------------------------------------------------------

def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _simplex_iterate(T: np.ndarray, basis: list[int], n_cols: int) -> None:
    """Run Bland's-rule pivots on tableau T until the cost row is optimal.

    T has shape (m+1, n_cols+1); the last row is the reduced-cost row, the
    last column the right-hand side.  Raises on unboundedness.
    """
    max_pivots = 50 * (n_cols + len(basis) + 10)
    for _ in range(max_pivots):
        costs = T[-1, :n_cols]
        candidates = np.nonzero(costs < -_PIVOT_TOL)[0]
        if candidates.size == 0:
            return
        col = int(candidates[0])  # Bland: lowest index enters
        rows = np.nonzero(T[:-1, col] > _PIVOT_TOL)[0]
        if rows.size == 0:
            raise LinearProgramError("unbounded linear program")
        ratios = T[rows, -1] / T[rows, col]
        best = ratios.min()
        tied = rows[ratios <= best + _PIVOT_TOL]
        row = int(min(tied, key=lambda r: basis[r]))  # Bland: lowest basis index leaves
        _pivot(T, row, col)
        basis[row] = col
    raise LinearProgramError("simplex failed to terminate")


def solve_lp(lp: LinearProgram) -> tuple[float, np.ndarray]:
    """Solve a dense LP exactly by the two-phase simplex with Bland's rule.

    Returns (optimal value, optimizer).  Deterministic for identical input.
    Raises LinearProgramError when infeasible or unbounded; the programs
    built by this package are feasible and bounded by construction, so such
    an error indicates a bug in the caller.
    """
    c = np.asarray(lp.c, dtype=float)
    A_eq = np.atleast_2d(np.asarray(lp.A_eq, dtype=float))
    b_eq = np.atleast_1d(np.asarray(lp.b_eq, dtype=float))
    A_ub = np.atleast_2d(np.asarray(lp.A_ub, dtype=float))
    b_ub = np.atleast_1d(np.asarray(lp.b_ub, dtype=float))
    n = c.shape[0]

    # slacks turn inequality rows into equalities
    m_ub = A_ub.shape[0] if A_ub.size else 0
    m_eq = A_eq.shape[0] if A_eq.size else 0
    m = m_eq + m_ub
    A = np.zeros((m, n + m_ub))
    b = np.zeros(m)
    if m_eq:
        A[:m_eq, :n] = A_eq
        b[:m_eq] = b_eq
    if m_ub:
        A[m_eq:, :n] = A_ub
        A[m_eq:, n:] = np.eye(m_ub)
        b[m_eq:] = b_ub
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    n_real = n + m_ub
    # phase 1: one artificial per row, minimize their sum
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = A
    T[:m, n_real:n_real + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n_real, n_real + m))
    T[-1, :n_real] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    _simplex_iterate(T, basis, n_real)  # artificial columns never re-enter
    if T[-1, -1] < -_FEAS_TOL:
        raise LinearProgramError("infeasible linear program")

    # drive leftover artificials out of the basis (degenerate rows)
    keep_rows = list(range(m))
    for r in range(m):
        if basis[r] >= n_real:
            pivots = np.nonzero(np.abs(T[r, :n_real]) > _PIVOT_TOL)[0]
            if pivots.size:
                _pivot(T, r, int(pivots[0]))
                basis[r] = int(pivots[0])
            else:
                keep_rows.remove(r)  # redundant constraint

    rows = keep_rows
    T2 = np.zeros((len(rows) + 1, n_real + 1))
    T2[:-1, :n_real] = T[rows, :n_real]
    T2[:-1, -1] = T[rows, -1]
    basis2 = [basis[r] for r in rows]

    # phase 2: rebuild the reduced-cost row for the true objective
    full_c = np.zeros(n_real)
    full_c[:n] = c
    T2[-1, :n_real] = full_c
    T2[-1, -1] = 0.0
    for r, bv in enumerate(basis2):
        if abs(full_c[bv]) > 0:
            T2[-1] -= full_c[bv] * T2[r]
    _simplex_iterate(T2, basis2, n_real)

    x = np.zeros(n_real)
    for r, bv in enumerate(basis2):
        x[bv] = T2[r, -1]
    return float(-T2[-1, -1]), x[:n]


# ---------------------------------------------------------------------------
# Charnes-Cooper
# ---------------------------------------------------------------------------

def charnes_cooper(fp: FractionalLP) -> LinearProgram:
    """Map a fractional program to an equivalent LP in variables (y, t).

    With y := x*t and t := 1/(den_coeffs.x + den_const) the ratio objective
    becomes linear, the bound x_j >= lower becomes y_j >= lower*t, and the
    normalization sum x_j = total becomes sum y_j = total*t; one constraint
    (den.y + den_const*t = 1) is added.  Requires the denominator to be
    strictly positive on the feasible set, which by linearity only needs
    checking at the extreme points.
    """
    dens = fp.vertices() @ fp.den_coeffs + fp.den_const
    if np.any(dens <= 0.0):
        raise DenominatorSignError(
            "denominator is not strictly positive over the feasible polytope"
        )
    k = fp.size
    c = np.append(fp.num_coeffs, fp.num_const)
    A_eq = np.vstack([
        np.append(fp.den_coeffs, fp.den_const),
        np.append(np.ones(k), -fp.total),
    ])
    b_eq = np.array([1.0, 0.0])
    # lower*t - y_j <= 0
    A_ub = np.hstack([-np.eye(k), np.full((k, 1), fp.lower)])
    b_ub = np.zeros(k)
    return LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub)


def fractional_min(fp: FractionalLP) -> tuple[float, np.ndarray]:
    """Exact minimum of a FractionalLP, with the optimizer mapped back to x."""
    value, z = solve_lp(charnes_cooper(fp))
    t = z[-1]
    if t <= 0:
        raise LinearProgramError("Charnes-Cooper scale variable vanished")
    return value, z[:-1] / t


def vertex_oracle(fp: FractionalLP) -> float:
    """Minimum ratio over the polytope's k extreme points.

    A linear-fractional objective attains its optimum at a vertex, so this
    equals the Charnes-Cooper + simplex optimum; it is kept as an
    independent cross-check.
    """
    return float(np.min(fp.ratio_at(fp.vertices())))


# ---------------------------------------------------------------------------
# nonlinear ratio-of-log-sums program
# ---------------------------------------------------------------------------

def _project_capped_simplex(z: np.ndarray, lower: float, total: float) -> np.ndarray:
    """Euclidean projection onto {y : y >= lower, sum y = total}."""
    k = z.shape[0]
    budget = total - k * lower
    if budget <= 1e-15:
        return np.full(k, lower) + max(budget, 0.0) / k
    w = z - lower
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - budget
    idx = np.arange(1, k + 1)
    cond = u - css / idx > 0
    rho = int(np.nonzero(cond)[0][-1]) + 1
    theta = css[rho - 1] / rho
    return np.maximum(w - theta, 0.0) + lower


def _ratio_and_grad(rp: RatioProgram, y: np.ndarray) -> tuple[float, np.ndarray]:
    logs = np.log(y)
    num = float(logs @ rp.alpha - rp.a)
    den = float(logs @ rp.beta - rp.b)
    grad = (rp.alpha * den - num * rp.beta) / (y * den * den)
    return num / den, grad


def _check_denominator_sign(rp: RatioProgram, rng: np.random.Generator) -> None:
    total = rp.total()
    k = rp.n_feasible
    points = [rp.vertices(), np.full((1, k), total / k)]
    if k > 1:
        interior = rng.dirichlet(np.ones(k), size=200)
        points.append(rp.epsilon + (total - k * rp.epsilon) * interior)
    pts = np.vstack(points)
    dens = np.log(pts) @ rp.beta - rp.b
    if dens.max() > -1e-12 and dens.min() < 1e-12:
        raise IndefiniteRatioError("ratio denominator changes sign on the feasible set")


def _descend(rp: RatioProgram, y0: np.ndarray, grad_tol: float,
             max_iter: int) -> tuple[float, np.ndarray]:
    """Projected-gradient descent from one start, with spectral step sizes
    and nonmonotone Armijo backtracking (plain steepest descent needs
    thousands of iterations on these ratio objectives; Barzilai-Borwein
    steps converge in tens)."""
    lower, total = rp.epsilon, rp.total()
    y = _project_capped_simplex(np.asarray(y0, dtype=float), lower, total)
    val, grad = _ratio_and_grad(rp, y)
    step = 1.0
    history = [val]
    best_val, best_y = val, y
    for _ in range(max_iter):
        moved = _project_capped_simplex(y - grad, lower, total)
        if np.linalg.norm(moved - y) < grad_tol:
            break
        d = _project_capped_simplex(y - step * grad, lower, total) - y
        slope = float(grad @ d)
        if slope >= 0.0:
            break  # numerically stationary
        f_ref = max(history[-10:])
        lam = 1.0
        accepted = False
        while lam > 1e-16:
            trial = y + lam * d
            trial_val = float(rp.value_at(trial))
            if trial_val <= f_ref + 1e-4 * lam * slope:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
        new_val, new_grad = _ratio_and_grad(rp, trial)
        s = trial - y
        g_diff = new_grad - grad
        curvature = float(s @ g_diff)
        step = float(s @ s) / curvature if curvature > 1e-16 else 1e6
        step = min(max(step, 1e-10), 1e6)
        y, val, grad = trial, new_val, new_grad
        history.append(val)
        if val < best_val:
            best_val, best_y = val, y
    return best_val, best_y


def minimize_ratio(
    rp: RatioProgram,
    seed: int = 0,
    n_random_starts: int = 20,
    grad_tol: float = 1e-9,
    max_iter: int = 10_000,
) -> tuple[float, np.ndarray]:
    """Multistart projected-gradient minimum of a RatioProgram.

    Starts from every vertex of the feasible polytope, its barycenter and
    ``n_random_starts`` seeded interior points; each start descends until
    the gradient-projection norm falls below ``grad_tol`` (or ``max_iter``
    steps).  Returns the best (value, optimizer) found; never worse than
    any start point.

    Raises IndefiniteRatioError when the denominator changes sign over the
    feasible set (sampled check); callers treat that as "no dominance".
    """
    rng = np.random.default_rng(seed)
    _check_denominator_sign(rp, rng)
    total = rp.total()
    k = rp.n_feasible

    if k == 1 or total - k * rp.epsilon <= 1e-15:
        y = _project_capped_simplex(np.full(k, total / k), rp.epsilon, total)
        return float(rp.value_at(y)), y

    starts = [rp.vertices()[i] for i in range(k)]
    starts.append(np.full(k, total / k))
    interior = rng.dirichlet(np.ones(k), size=n_random_starts)
    starts.extend(rp.epsilon + (total - k * rp.epsilon) * interior)

    best_val = np.inf
    best_y = starts[0]
    for y0 in starts:
        val, y = _descend(rp, y0, grad_tol, max_iter)
        if val < best_val - 1e-15:
            best_val, best_y = val, y
    return float(best_val), best_y
