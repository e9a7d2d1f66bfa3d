"""Dual-ball support-function norms.

The level-p ball of a coordinate-wise tail family is
``{x : sum_i hat_N_i(x_i) <= p}``; its support function is the norm
``|a|_{X,p} = sup { <a, x> : x in ball }`` and the bilinear variant takes
the supremum of ``x' A y`` over a pair of balls.

The ball is convex only for shape exponents r >= 2: the truncated tail
hat_N drops its slope at the knee |t| = 1 whenever N'(1) < 2, so for
heavier tails the feasible set is star-shaped but not convex and plain
Lagrangian duality overshoots.  ``norm_Xp`` therefore solves the primal
exactly: the linear objective splits per coordinate into a budget
allocation ``max sum_i a_i hat_N^{-1}(b_i), sum b_i = p`` which is concave
once the set of coordinates allowed past the knee is fixed, and a simple
exchange argument shows the optimal "past-the-knee" set consists of the
largest coefficients.  We enumerate that prefix and solve each concave
piece by bisection on the common marginal value.

``norm_Xp_dual`` keeps the Lagrangian route; it returns the support
function of the convex hull, an upper bound that is tight for r >= 2.
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize


_BISECT_ITERS = 60
_ALT_TOL = 1e-9
_ALT_MAX_ITERS = 200


class ConfigurationError(ValueError):
    """Ball or solver configured outside its contract."""


@dataclass(frozen=True)
class DualBall:
    """Level-p dual ball with one tail distribution per coordinate."""

    p: float
    tails: tuple

    def __post_init__(self):
        if self.p < 1.0:
            raise ConfigurationError(f"moment level p = {self.p} < 1")
        if not self.tails:
            raise ConfigurationError("ball needs at least one coordinate")
        if not all(t.normalized for t in self.tails):
            raise ConfigurationError("ball tails must be normalized")

    @property
    def dim(self):
        return len(self.tails)

    @property
    def homogeneous(self):
        return all(t == self.tails[0] for t in self.tails)

    def hat_N_sum(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: {x.shape[-1]} != {self.dim}")
        return sum(
            self.tails[i].hat_N(x[..., i]) for i in range(self.dim)
        )


def ball(d, p, n):
    """Homogeneous ball with n copies of distribution d at level p."""
    return DualBall(float(p), (d,) * n)


@dataclass
class NormResult:
    value: float
    maximizer: np.ndarray
    converged: bool = True
    restarts_used: int = 0


# ---------------------------------------------------------------------------
# 1-D convex conjugate (building block of the Lagrangian dual)
# ---------------------------------------------------------------------------

def conjugate_1d(d, a, lam):
    """sup_x (a x - lam * hat_N(x)) and its maximizer.

    Unbounded for linear-tail families when lam < |a|; signalled with an
    infinite value so the dual search can stay in the finite region.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if a == 0.0:
        return 0.0, 0.0
    sign = 1.0 if a > 0.0 else -1.0
    a = abs(a)
    # quadratic branch on [0, 1]
    xq = min(a / (2.0 * lam), 1.0)
    best_v = a * xq - lam * xq * xq
    best_x = xq
    # tail branch on [1, inf): stationarity a = lam N'(x)
    if d.linear_tail:
        if lam < a:
            return math.inf, math.inf
        # slope a - lam <= 0 beyond the knee; knee already covered above
    else:
        v = a / lam
        if v > float(d.tail_N_prime(1.0)):
            xt = float(d.tail_N_prime_inv(v))
            vt = a * xt - lam * float(d.tail_N(xt))
            if vt > best_v:
                best_v, best_x = vt, xt
    return best_v, sign * best_x


# ---------------------------------------------------------------------------
# Exact support function via budget allocation
# ---------------------------------------------------------------------------

def _allocate(mags, tails, tail_set, p):
    """Maximize sum a_i hat_N_i^{-1}(b_i) over budgets summing to p.

    ``tail_set`` marks coordinates allowed past the knee (b_i >= 1); the
    rest stay on the quadratic branch (b_i <= 1).  Returns (value, x) or
    None when the tail set cannot fit in the budget.

    Linear-tail coordinates (r = 1) have a constant marginal value past
    the knee, so at most one of them takes more than the unit budget and
    its multiplier is pinned at its own coefficient; that case is solved
    exactly rather than by bisection.
    """
    n = len(mags)
    in_tail = np.zeros(n, dtype=bool)
    if len(tail_set):
        in_tail[list(tail_set)] = True
    k = int(in_tail.sum())
    if k > p:
        return None

    quad = ~in_tail
    a_quad = mags[quad]
    tail_idx = np.flatnonzero(in_tail)
    lin_idx = np.array([i for i in tail_idx if tails[i].linear_tail], dtype=int)
    strict_idx = np.array(
        [i for i in tail_idx if not tails[i].linear_tail], dtype=int
    )

    def strict_budget(i, lam):
        d = tails[i]
        v = mags[i] / lam
        if v <= float(d.tail_N_prime(1.0)):
            return 1.0
        return min(float(d.tail_N_at_prime(v)), p)

    # one shared distribution lets the strict budgets vectorize
    strict_shared = (
        tails[strict_idx[0]]
        if len(strict_idx) and all(tails[i] is tails[strict_idx[0]] for i in strict_idx)
        else None
    )
    if strict_shared is not None:
        _shared_prime1 = float(strict_shared.tail_N_prime(1.0))

    def continuous_sum(lam):
        # everything except the single free linear coordinate
        total = float(np.minimum(1.0, (a_quad / (2.0 * lam)) ** 2).sum())
        if strict_shared is not None:
            v = mags[strict_idx] / lam
            over = v > _shared_prime1
            total += float((~over).sum())
            if over.any():
                total += float(
                    np.minimum(strict_shared.tail_N_at_prime(v[over]), p).sum()
                )
            return total
        for i in strict_idx:
            total += strict_budget(i, lam)
        return total

    def finish(lam, b_lin_free):
        b = np.zeros(n)
        b[quad] = np.minimum(1.0, (a_quad / (2.0 * lam)) ** 2)
        for i in strict_idx:
            b[i] = strict_budget(i, lam)
        for i in lin_idx:
            b[i] = 1.0
        if b_lin_free is not None:
            b[b_lin_free[0]] = b_lin_free[1]
        x = np.zeros(n)
        x[quad] = np.sqrt(b[quad])
        for i in tail_idx:
            x[i] = float(tails[i].tail_N_inv(b[i])) if b[i] >= 1.0 else math.sqrt(b[i])
        return float(mags @ x), x

    def bisect(target, lam_floor):
        # continuous_sum is nonincreasing in lam
        lam_hi = max(mags.max() if mags.any() else 1.0, lam_floor, 1e-12)
        while continuous_sum(lam_hi) > target and lam_hi < 1e18:
            lam_hi *= 2.0
        lam_lo = lam_hi
        while continuous_sum(lam_lo) < target and lam_lo > max(lam_floor, 1e-18):
            lam_lo = max(lam_lo / 2.0, lam_floor)
        if continuous_sum(lam_lo) < target:
            return lam_lo, False  # slack even at the floor
        if lam_lo == lam_hi or continuous_sum(lam_hi) > target:
            return lam_hi, True  # budget floor still above the target
        # monotone nonincreasing in lam: root-find in log space
        f = lambda u: continuous_sum(math.exp(u)) - target
        loga, logb = math.log(lam_lo), math.log(lam_hi)
        if f(loga) <= 0.0:  # exp/log round-off: the endpoint is the root
            root = loga
        elif f(logb) >= 0.0:
            root = logb
        else:
            root = optimize.brentq(f, loga, logb, xtol=1e-13, rtol=8.9e-16)
        lam = math.exp(root)
        if continuous_sum(lam) < target:
            lam = lam * (1.0 - 1e-12)  # stay on the feasible side
        return lam, True

    if len(lin_idx):
        free = int(lin_idx[np.argmax(mags[lin_idx])])
        fixed_linear = k - 1  # the other linear coordinates sit at b = 1
        lam_star = mags[free]
        remainder = p - fixed_linear - continuous_sum(lam_star)
        if remainder >= 1.0:
            return finish(lam_star, (free, remainder))
        # the free coordinate is pinned at the knee; rebalance the rest
        lam, tight = bisect(p - k, lam_star)
        if not tight:
            return finish(lam, None)
        value, x = finish(lam, None)
        total = float(sum(tails[i].hat_N(x[i]) for i in range(n)))
        if total > p:
            x *= p / total  # conservative trim; deviation is O(bisection tol)
            value = float(mags @ x)
        return value, x

    lam, tight = bisect(p, 0.0)
    value, x = finish(lam, None)
    if tight:
        total = float(sum(tails[i].hat_N(x[i]) for i in range(n)))
        if total > p and total > 0.0:
            # renormalize budgets exactly onto the boundary
            scale = p / total
            b = np.array(
                [float(tails[i].hat_N(x[i])) * scale for i in range(n)]
            )
            x = np.zeros(n)
            x[quad] = np.sqrt(b[quad])
            for i in tail_idx:
                x[i] = (
                    float(tails[i].tail_N_inv(b[i]))
                    if b[i] >= 1.0
                    else math.sqrt(b[i])
                )
            value = float(mags @ x)
    return value, x


def norm_Xp(a, ball):
    """Support function sup { <a, x> : sum hat_N_i(x_i) <= p }, exact."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        return NormResult(0.0, np.zeros(0))
    if a.size != ball.dim:
        raise ValueError(f"dimension mismatch: {a.size} != {ball.dim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    mags = np.abs(a)
    if not mags.any():
        return NormResult(0.0, np.zeros(a.size))

    p = ball.p
    tails = ball.tails
    n = a.size

    best = (-math.inf, None)
    if ball.homogeneous:
        order = np.argsort(-mags)
        if tails[0].linear_tail:
            k_max = min(n, 1)
        else:
            k_max = min(n, int(math.floor(p + 1e-12)))
        for k in range(k_max + 1):
            tail_set = order[:k]
            out = _allocate(mags, tails, tail_set, p)
            if out is not None and out[0] > best[0]:
                best = out
    else:
        if n > 15:
            raise ConfigurationError(
                "heterogeneous balls are limited to 15 coordinates"
            )
        for k in range(min(n, int(math.floor(p + 1e-12))) + 1):
            for tail_set in itertools.combinations(range(n), k):
                out = _allocate(mags, tails, tail_set, p)
                if out is not None and out[0] > best[0]:
                    best = out

    value, x = best
    witness = np.sign(a) * x
    return NormResult(value, witness)


def norm_Xp_dual(a, ball):
    """Lagrangian dual value inf_{lam>0} lam p + sum conjugates.

    Equals norm_Xp for r >= 2 families (convex ball); otherwise it is the
    support function of the convex hull, an upper bound on the norm.
    """
    a = np.asarray(a, dtype=float).ravel()
    mags = np.abs(a)
    if not mags.any():
        return 0.0
    p = ball.p
    lam_min = 0.0
    for d, ai in zip(ball.tails, mags):
        if d.linear_tail:
            lam_min = max(lam_min, ai)

    def objective(lam):
        total = lam * p
        for d, ai in zip(ball.tails, mags):
            v, _ = conjugate_1d(d, ai, lam)
            if math.isinf(v):
                return math.inf
            total += v
        return total

    lo = max(lam_min, 1e-12)
    hi = max(lo * 2.0, mags.max())
    while objective(hi * 2.0) < objective(hi):
        hi *= 2.0
        if hi > 1e18:
            break
    # golden-section on the convex 1-D dual
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(200):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = objective(x2)
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    return min(objective(lo), objective(hi), objective(lam_min) if lam_min > 0 else math.inf)


# ---------------------------------------------------------------------------
# Membership and boundary parameterization
# ---------------------------------------------------------------------------

def ball_membership(x, ball):
    """(inside, slack) with slack = p - sum hat_N_i(x_i)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (ball.dim,):
        raise ValueError(f"dimension mismatch: {x.shape} != ({ball.dim},)")
    slack = ball.p - float(ball.hat_N_sum(x))
    return slack >= 0.0, slack


def boundary_scale(directions, ball):
    """Radial factors c with sum hat_N_i(c u_i) = p, vectorized."""
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    norms = np.abs(u).max(axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero direction has no boundary point")
    p = ball.p
    hi = np.full(u.shape[0], (p + 1.0) / norms.min() + 1.0)
    while True:
        vals = ball.hat_N_sum(u * hi[:, None])
        if np.all(vals >= p):
            break
        hi = np.where(vals < p, hi * 2.0, hi)
    lo = np.zeros_like(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        vals = ball.hat_N_sum(u * mid[:, None])
        lo = np.where(vals <= p, mid, lo)
        hi = np.where(vals > p, mid, hi)
    return lo


def _angles_to_dirs(dim, grids):
    if dim == 2:
        (theta,) = grids
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    theta, phi = grids
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)],
        axis=-1,
    ).reshape(-1, dim)
    return pts[np.linalg.norm(pts, axis=1) > 1e-12]


def _angle_grids(dim, resolution):
    if dim == 2:
        return (np.arange(0.0, 2.0 * math.pi, resolution),)
    return (
        np.arange(0.0, math.pi + resolution, resolution),
        np.arange(0.0, 2.0 * math.pi, resolution),
    )


@functools.lru_cache(maxsize=256)
def _boundary_cloud(ball, resolution):
    """Boundary points and their angles at the given angular resolution."""
    if ball.dim == 1:
        dirs = np.array([[1.0], [-1.0]])
        angles = None
    else:
        grids = _angle_grids(ball.dim, resolution)
        dirs = _angles_to_dirs(ball.dim, grids)
        if ball.dim == 2:
            angles = dirs  # recomputed locally from atan2 when refining
        else:
            angles = None
    c = boundary_scale(dirs, ball)
    return dirs * c[:, None]


def _local_cloud(ball, center_dir, width, resolution):
    """Boundary patch around a direction, for grid refinement."""
    if ball.dim == 1:
        return None
    if ball.dim == 2:
        t0 = math.atan2(center_dir[1], center_dir[0])
        theta = np.arange(t0 - width, t0 + width, resolution)
        dirs = _angles_to_dirs(2, (theta,))
    else:
        u = center_dir / np.linalg.norm(center_dir)
        t0 = math.acos(np.clip(u[2], -1.0, 1.0))
        p0 = math.atan2(u[1], u[0])
        theta = np.arange(t0 - width, t0 + width, resolution)
        phi = np.arange(p0 - width, p0 + width, resolution)
        dirs = _angles_to_dirs(3, (theta, phi))
        if dirs.size == 0:
            return None
    c = boundary_scale(dirs, ball)
    return dirs * c[:, None]


def brute_norm_Xp(a, ball, resolution=1e-2):
    """Grid oracle for norm_Xp on dimensions <= 3.

    Scans a boundary-dense angular grid, then refines around the best
    direction with a 100x finer local grid; the result stays a feasible
    lower bound of the true support function.
    """
    a = np.asarray(a, dtype=float).ravel()
    if ball.dim > 3:
        raise ValueError("brute oracle refuses dimensions > 3")
    pts = _boundary_cloud(ball, float(resolution))
    vals = pts @ a
    best_i = int(np.argmax(vals))
    best = float(vals[best_i])
    local = _local_cloud(ball, pts[best_i], 2.0 * resolution, resolution / 100.0)
    if local is not None:
        best = max(best, float(np.max(local @ a)))
    return best


def brute_norm_XYp(A2, ballX, ballY, grid_resolution=1e-2):
    """Grid oracle for the bilinear norm on dimensions <= 3."""
    A2 = np.asarray(A2, dtype=float)
    if A2.ndim != 2:
        raise ValueError("A2 must be a matrix")
    if A2.shape[0] > 3 or A2.shape[1] > 3:
        raise ValueError("brute oracle refuses dimensions > 3")
    if not A2.any():
        return 0.0
    X = _boundary_cloud(ballX, float(grid_resolution))
    Y = _boundary_cloud(ballY, float(grid_resolution))

    def scan(Xpts, Ypts):
        M = Xpts @ A2
        best = -math.inf
        best_ij = (0, 0)
        chunk = max(1, int(4e7) // max(1, M.shape[0]))
        for start in range(0, Ypts.shape[0], chunk):
            block = M @ Ypts[start : start + chunk].T
            i, j = np.unravel_index(np.argmax(block), block.shape)
            if block[i, j] > best:
                best = float(block[i, j])
                best_ij = (int(i), start + int(j))
        return best, best_ij

    best, (bi, bj) = scan(X, Y)
    lx = _local_cloud(ballX, X[bi], 2.0 * grid_resolution, grid_resolution / 50.0)
    ly = _local_cloud(ballY, Y[bj], 2.0 * grid_resolution, grid_resolution / 50.0)
    refined, _ = scan(lx if lx is not None else X[bi : bi + 1],
                      ly if ly is not None else Y[bj : bj + 1])
    return max(best, refined)


# ---------------------------------------------------------------------------
# Bilinear norm by alternating maximization
# ---------------------------------------------------------------------------

def _random_boundary_point(rng, ball):
    u = rng.standard_normal(ball.dim)
    nrm = np.linalg.norm(u)
    if nrm == 0.0:
        u[0] = 1.0
        nrm = 1.0
    u /= nrm
    return u * boundary_scale(u[None, :], ball)[0]


def norm_XYp(A2, ballX, ballY, restarts=16, seed=0):
    """sup of x' A2 y over the ball pair, by alternating exact sups.

    Each alternating step is a norm_Xp solve, so the objective is
    nondecreasing and the returned value is a certified lower bound of
    the true bilinear norm.
    """
    from . import rng as rngmod

    A2 = np.asarray(A2, dtype=float)
    if A2.ndim != 2:
        raise ValueError("A2 must be a matrix")
    n1, n2 = A2.shape
    if n1 != ballX.dim or n2 != ballY.dim:
        raise ValueError("ball dimensions do not match the matrix")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if not A2.any():
        return NormResult(0.0, np.zeros(n1 + n2), True, 0)

    # warm start from the top singular pair, plus seeded ball points
    u, _, vt = np.linalg.svd(A2)
    starts = [vt[0]]
    for i in range(restarts - 1):
        gen = rngmod.stream(seed, rngmod.RESTART_STREAM + i)
        starts.append(_random_boundary_point(gen, ballY))

    best = NormResult(-math.inf, np.zeros(n1 + n2), False, 0)
    for ridx, y0 in enumerate(starts):
        y = np.asarray(y0, dtype=float)
        if not y.any():
            y = np.ones(n2)
        value = -math.inf
        converged = False
        for _ in range(_ALT_MAX_ITERS):
            rx = norm_Xp(A2 @ y, ballX)
            x = rx.maximizer
            ry = norm_Xp(A2.T @ x, ballY)
            y = ry.maximizer
            new_value = float(x @ A2 @ y)
            if new_value - value <= _ALT_TOL * max(1.0, abs(new_value)):
                value = max(value, new_value)
                converged = True
                break
            value = new_value
        if value > best.value:
            best = NormResult(value, np.concatenate([x, y]), converged, ridx)
    best.restarts_used = len(starts)
    return best
