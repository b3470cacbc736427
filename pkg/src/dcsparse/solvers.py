"""Sparse recovery solvers.

The flagship routine, dc_gpsr, minimizes

    0.5 * ||y - phi @ x||^2 + rho * (||x||_1 - ||x||_{k,1})

whose penalty is an exact expression of "at most k nonzeros".  The
objective is a difference of convex functions, so each outer step
linearizes the subtracted top-(k,1) norm at the current iterate and
solves the remaining convex piece.  Splitting x into positive and
negative parts turns that subproblem into a nonnegativity-constrained
quadratic program handled matrix-free by projected gradients with
Barzilai-Borwein step sizes (solve_bcqp_gp).

dc_proximal swaps the inner solver for proximal-gradient iterations on
the unsplit subproblem.  gpsr_baseline (plain l1), ista, omp, and a
brute-force cardinality-constrained least-squares oracle round out the
benchmark set.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .metrics import normalized_sq_error
from .sensing import MeasurementMatrix
from .sparsity import soft_threshold, sparsity_gap, top_k1_subgradient

# Inner-solve tolerance schedule of the DC loops: outer step t solves its
# subproblem at max(inner_tol * _TOL_SHRINK**(t-1), _TOL_FLOOR), so early
# subproblems stop at the configured practical tolerance while late ones
# are polished to the floating-point floor.  The floor is expressed on
# the *predicted* per-step decrease, which stays resolvable far below the
# ~1e-16 * |G| resolution of the objective values themselves.
_TOL_SHRINK = 1e-2
_TOL_FLOOR = 1e-26


class NumericalFailure(RuntimeError):
    """Non-finite values encountered inside an iterative solver."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class InstanceTooLarge(ValueError):
    """Exhaustive enumeration would exceed the configured guard."""


@dataclass
class SparseProblem:
    """One recovery instance: measurements, operator, sparsity bound, penalty weight."""

    y: np.ndarray
    phi: MeasurementMatrix
    k: int
    rho: float

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.shape != (self.phi.m,):
            raise ValueError(
                f"y has length {self.y.size} but matrix has {self.phi.m} rows"
            )
        if not 1 <= self.k <= self.phi.n:
            raise ValueError(f"k must lie in [1, {self.phi.n}], got {self.k}")
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")


def default_rho(phi: MeasurementMatrix, y: np.ndarray, sigma: float = 0.0) -> float:
    """Data-driven penalty weight.

    Noiseless part, 5e-4 * ||phi^T y||_inf: small enough that the
    subproblems' shrinkage floor rho / ||phi_j||^2 sits below the weakest
    signal components one typically needs to detect.  When the noise
    standard deviation is known, the weight is raised to half the
    universal threshold, 0.5 * sigma * sqrt(2 log n) * mean ||phi_j||,
    which suppresses pure-noise coordinates while keeping weak signal
    components detectable; the top-k credit leaves the selected support
    unshrunk regardless.  Returns 1.0 for y == 0.
    """
    pm = phi.phi
    v = 5e-4 * float(np.max(np.abs(pm.T @ np.asarray(y, dtype=float))))
    if sigma > 0:
        col_scale = float(np.mean(np.linalg.norm(pm, axis=0)))
        v = max(v, 0.5 * sigma * math.sqrt(2.0 * math.log(phi.n)) * col_scale)
    return v if v > 0 else 1.0


@dataclass
class SolverOptions:
    """Tolerances, iteration caps, and step-size safeguards.

    outer_tol stops the DC loop on ||z_t - z_{t-1}||_2; inner_tol is the
    relative objective-decrease stop of the inner loops.  alpha_min and
    alpha_max clamp Barzilai-Borwein steps.  lipschitz_margin inflates the
    power-method curvature estimate in dc_proximal only.
    """

    outer_tol: float = 1e-14
    outer_max: int = 50
    inner_tol: float = 1e-8
    inner_max: int = 4000
    alpha_min: float = 1e-30
    alpha_max: float = 1e30
    lipschitz_margin: float = 1.1

    def __post_init__(self):
        if not 0 < self.alpha_min < self.alpha_max:
            raise ValueError(
                f"need 0 < alpha_min < alpha_max, got {self.alpha_min}, {self.alpha_max}"
            )
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.outer_max < 1 or self.inner_max < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.lipschitz_margin < 1.0:
            raise ValueError(f"lipschitz_margin must be >= 1, got {self.lipschitz_margin}")


@dataclass
class SolverTrace:
    """Per-iteration history for convergence plots.

    One entry per recorded point: the exact-penalty objective, the l1
    objective, the normalized squared error when ground truth was given
    (else None), the inner iterations attributed to that point, and the
    outer step it belongs to.
    """

    outer_objectives: list = field(default_factory=list)
    l1_objectives: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    inner_counts: list = field(default_factory=list)
    outer_steps: list = field(default_factory=list)


@dataclass
class ReconResult:
    """Recovered vector plus convergence bookkeeping."""

    x_hat: np.ndarray
    trace: SolverTrace
    converged: bool
    outer_iters: int

    @property
    def inner_iters_total(self) -> int:
        return int(sum(self.trace.inner_counts))


def objective_exact(x: np.ndarray, p: SparseProblem) -> float:
    """Least-squares data term plus the exact sparsity penalty rho * (||x||_1 - ||x||_{k,1})."""
    x = _check_signal(x, p)
    r = p.y - p.phi.phi @ x
    return 0.5 * float(r @ r) + p.rho * sparsity_gap(x, p.k)


def objective_l1(x: np.ndarray, p: SparseProblem) -> float:
    """Least-squares data term plus the l1 penalty rho * ||x||_1."""
    x = _check_signal(x, p)
    r = p.y - p.phi.phi @ x
    return 0.5 * float(r @ r) + p.rho * float(np.abs(x).sum())


def _check_signal(x, p: SparseProblem) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.phi.n,):
        raise ValueError(f"x has length {x.size} but matrix has {p.phi.n} columns")
    return x


def _power_lam_max(mat: np.ndarray, iters: int = 100) -> float:
    """Power-method estimate of the largest eigenvalue of mat^T mat."""
    n = mat.shape[1]
    v = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(iters):
        w = mat.T @ (mat @ v)
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return lam


def bcqp_gradient(z: np.ndarray, p: SparseProblem, w_z: np.ndarray) -> np.ndarray:
    """Gradient of the split-form quadratic subproblem at z = [u; v].

    With x = u - v and g = phi^T (phi x - y), the gradient is
    [g; -g] + rho * (1 - w_z), computed with two matrix-vector products
    and never forming the 2n x 2n block quadratic.
    """
    n = p.phi.n
    z = np.asarray(z, dtype=float)
    w_z = np.asarray(w_z, dtype=float)
    if z.shape != (2 * n,) or w_z.shape != (2 * n,):
        raise ValueError(
            f"z and w_z must have length {2 * n}, got {z.size} and {w_z.size}"
        )
    x = z[:n] - z[n:]
    g = p.phi.phi.T @ (p.phi.phi @ x - p.y)
    return np.concatenate([g, -g]) + p.rho * (1.0 - w_z)


def solve_bcqp_gp(p: SparseProblem, w_z: np.ndarray, z0: np.ndarray,
                  opts: SolverOptions | None = None, alpha0: float | None = None,
                  tol: float | None = None, on_iterate=None):
    """Projected-gradient solver for min G(z) = 0.5 z^T B z + c^T z over z >= 0.

    Each step projects a Barzilai-Borwein gradient step onto the
    nonnegative orthant and then moves along the resulting direction with
    the exact minimizing fraction beta in (0, 1], so G never increases.
    The stop is on the (exactly known) predicted decrease of a step
    falling to tol * |G|: immediately when the very first step is already
    negligible (so a warm start at the solution returns the start point
    unchanged), otherwise after three consecutive negligible steps, which
    keeps the nonmonotone Barzilai-Borwein step pattern from triggering a
    premature stop.  Also stops on an exact projected-gradient fixed
    point or at inner_max.

    Returns (z, inner_iterations).  `on_iterate(k, z, G, alpha)` is called
    after every accepted step.  `tol` overrides opts.inner_tol (used by
    the DC outer loop to tighten subproblems as it converges).
    """
    opts = SolverOptions() if opts is None else opts
    tol = opts.inner_tol if tol is None else tol
    phi = p.phi.phi
    n = p.phi.n
    w_z = np.asarray(w_z, dtype=float)
    z = np.asarray(z0, dtype=float).copy()
    if z.shape != (2 * n,) or w_z.shape != (2 * n,):
        raise ValueError(
            f"z0 and w_z must have length {2 * n}, got {z.size} and {w_z.size}"
        )
    if np.any(z < 0):
        raise ValueError("z0 must be elementwise nonnegative")

    pty = phi.T @ p.y
    c = np.concatenate([-pty, pty]) + p.rho * (1.0 - w_z)
    if alpha0 is None:
        lam = _power_lam_max(phi)
        alpha0 = 1.0 / lam if lam > 0 else 1.0
    alpha = float(np.clip(alpha0, opts.alpha_min, opts.alpha_max))

    fx = phi @ (z[:n] - z[n:])
    grad = _assemble_grad(phi, fx, c)
    gval = 0.5 * float(fx @ fx) + float(c @ z)
    if not np.isfinite(gval):
        raise NumericalFailure("non-finite objective at the start point", iteration=0)

    inner = 0
    stall = 0
    for k in range(1, opts.inner_max + 1):
        zh = np.maximum(z - alpha * grad, 0.0)
        d = zh - z
        if not d.any():
            break  # projected-gradient fixed point
        gd = float(grad @ d)
        if gd >= 0.0:
            break  # descent exhausted at floating-point resolution
        dx = d[:n] - d[n:]
        fd = phi @ dx
        dbd = float(fd @ fd)
        beta = 1.0 if dbd <= 0.0 else min(1.0, -gd / dbd)
        predicted = -(beta * gd + 0.5 * beta * beta * dbd)
        if predicted <= tol * max(abs(gval), 1e-12):
            stall += 1
            if k == 1 or stall >= 3:
                break  # negligible progress at this tolerance: stay put
        else:
            stall = 0
        if beta == 1.0:
            z = zh
        else:
            z = np.maximum(z + beta * d, 0.0)
        fx = fx + beta * fd
        if k % 64 == 0:
            fx = phi @ (z[:n] - z[n:])  # refresh incremental product against drift
        grad = _assemble_grad(phi, fx, c)
        gnew = 0.5 * float(fx @ fx) + float(c @ z)
        inner = k
        if not np.isfinite(gnew) or not np.all(np.isfinite(z)):
            raise NumericalFailure("non-finite iterate in gradient projection", iteration=k)
        if on_iterate is not None:
            on_iterate(k, z, gnew, alpha)
        # BB step from the accepted move; beta cancels in the ratio.
        alpha = float(np.clip(float(d @ d) / dbd, opts.alpha_min, opts.alpha_max)) \
            if dbd > 0.0 else opts.alpha_max
        gval = gnew
    return z, inner


def _assemble_grad(phi, fx, c):
    g = phi.T @ fx
    return np.concatenate([g, -g]) + c


def _split_signal(x: np.ndarray) -> np.ndarray:
    return np.concatenate([np.maximum(x, 0.0), np.maximum(-x, 0.0)])


def _record(trace: SolverTrace, p: SparseProblem, x: np.ndarray, inner: int,
            outer_step: int, ground_truth) -> None:
    trace.outer_objectives.append(objective_exact(x, p))
    trace.l1_objectives.append(objective_l1(x, p))
    trace.errors.append(
        None if ground_truth is None else normalized_sq_error(ground_truth, x)
    )
    trace.inner_counts.append(inner)
    trace.outer_steps.append(outer_step)


def dc_gpsr(p: SparseProblem, x0: np.ndarray | None = None,
            opts: SolverOptions | None = None,
            ground_truth: np.ndarray | None = None) -> ReconResult:
    """Exact-sparsity reconstruction by DC programming with a gradient-projection inner solver.

    Outer loop: take the top-(k,1) subgradient at the current x = u - v,
    split it into the nonnegative pair (w_u, w_v), and solve the resulting
    nonnegativity-constrained quadratic with solve_bcqp_gp warm-started at
    the previous iterate.  Terminates when successive split iterates move
    less than outer_tol in l2, or at outer_max.

    A zero iterate contributes the zero subgradient (which lies in the
    subdifferential at the origin), so the first step from a zero start is
    the plain l1 problem rather than one biased toward an arbitrary
    support.  Subproblem tolerances tighten geometrically from inner_tol
    so the final subproblems are solved to the floating-point floor.
    """
    opts = SolverOptions() if opts is None else opts
    n = p.phi.n
    x0 = np.zeros(n) if x0 is None else _check_signal(x0, p)
    z = _split_signal(x0)
    lam = _power_lam_max(p.phi.phi)
    alpha0 = 1.0 / lam if lam > 0 else 1.0

    trace = SolverTrace()
    _record(trace, p, x0, 0, 0, ground_truth)
    converged = False
    outer = 0
    at_floor = False
    for t in range(1, opts.outer_max + 1):
        outer = t
        x_prev = z[:n] - z[n:]
        w_x = top_k1_subgradient(x_prev, p.k).w if x_prev.any() else np.zeros(n)
        w_z = np.concatenate([np.maximum(w_x, 0.0), np.maximum(-w_x, 0.0)])
        tol_t = _TOL_FLOOR if at_floor else max(opts.inner_tol * _TOL_SHRINK ** (t - 1),
                                                _TOL_FLOOR)
        z_new, inner = solve_bcqp_gp(p, w_z, z, opts, alpha0=alpha0, tol=tol_t)
        delta = float(np.linalg.norm(z_new - z))
        z = z_new
        _record(trace, p, z[:n] - z[n:], inner, t, ground_truth)
        if delta <= opts.outer_tol:
            # Accept convergence only from a floor-tightness subproblem
            # solve; otherwise skip the rest of the tolerance schedule and
            # re-solve tight.
            if at_floor or tol_t <= _TOL_FLOOR:
                converged = True
                break
            at_floor = True
    return ReconResult(x_hat=z[:n] - z[n:], trace=trace, converged=converged,
                       outer_iters=outer)


def dc_proximal(p: SparseProblem, x0: np.ndarray | None = None,
                opts: SolverOptions | None = None,
                ground_truth: np.ndarray | None = None) -> ReconResult:
    """Same DC outer loop as dc_gpsr, inner subproblem solved by proximal gradients.

    The linearized subproblem keeps the l1 term and folds the subgradient
    into the smooth part h(x) = 0.5 ||y - phi x||^2 - x^T s, iterating
    x <- soft_threshold(x - grad_h(x) / L, rho / L) with L an inflated
    power-method bound on the curvature of phi^T phi.
    """
    opts = SolverOptions() if opts is None else opts
    n = p.phi.n
    phi = p.phi.phi
    x = np.zeros(n) if x0 is None else _check_signal(x0, p).copy()
    pty = phi.T @ p.y
    lam = _power_lam_max(phi)
    L = max(lam * opts.lipschitz_margin, 1e-12)

    def subobj(x_, s_):
        r = p.y - phi @ x_
        return 0.5 * float(r @ r) + p.rho * float(np.abs(x_).sum()) - float(x_ @ s_)

    trace = SolverTrace()
    _record(trace, p, x, 0, 0, ground_truth)
    converged = False
    outer = 0
    for t in range(1, opts.outer_max + 1):
        outer = t
        w = top_k1_subgradient(x, p.k).w if x.any() else np.zeros(n)
        s = p.rho * w
        x_outer = x
        tol_t = max(opts.inner_tol * _TOL_SHRINK ** (t - 1), 1e-15)
        fcur = subobj(x, s)
        inner = 0
        for j in range(1, opts.inner_max + 1):
            grad_h = phi.T @ (phi @ x) - pty - s
            x_new = soft_threshold(x - grad_h / L, p.rho / L)
            fixed_point = np.array_equal(x_new, x)
            x = x_new
            fnew = subobj(x, s)
            inner = j
            if not np.isfinite(fnew) or not np.all(np.isfinite(x)):
                raise NumericalFailure("non-finite iterate in proximal inner loop", iteration=j)
            done = fixed_point or abs(fcur - fnew) <= tol_t * max(abs(fnew), 1e-12)
            fcur = fnew
            if done:
                break
        delta = float(np.linalg.norm(x - x_outer))
        _record(trace, p, x, inner, t, ground_truth)
        if delta <= opts.outer_tol:
            converged = True
            break
    return ReconResult(x_hat=x, trace=trace, converged=converged, outer_iters=outer)


def gpsr_baseline(p: SparseProblem, x0: np.ndarray | None = None,
                  opts: SolverOptions | None = None,
                  ground_truth: np.ndarray | None = None) -> ReconResult:
    """Plain l1 sparse recovery: one solve_bcqp_gp pass with a zero subgradient.

    Minimizes 0.5 ||y - phi x||^2 + rho ||x||_1; the trace records every
    inner iteration so objective evolutions can be plotted against the
    DC solver's.
    """
    opts = SolverOptions() if opts is None else opts
    n = p.phi.n
    x0 = np.zeros(n) if x0 is None else _check_signal(x0, p)
    trace = SolverTrace()
    _record(trace, p, x0, 0, 0, ground_truth)

    def cb(k, z, gval, alpha):
        _record(trace, p, z[:n] - z[n:], 1, 1, ground_truth)

    z, inner = solve_bcqp_gp(p, np.zeros(2 * n), _split_signal(x0), opts, on_iterate=cb)
    return ReconResult(x_hat=z[:n] - z[n:], trace=trace,
                       converged=inner < opts.inner_max, outer_iters=1)


def ista(p: SparseProblem, x0: np.ndarray | None = None,
         opts: SolverOptions | None = None,
         ground_truth: np.ndarray | None = None) -> ReconResult:
    """Iterative shrinkage-thresholding for the l1 problem.

    Fixed step 1/L with L a power-method estimate of ||phi^T phi||; stops
    when the relative decrease of the l1 objective falls to inner_tol.
    """
    opts = SolverOptions() if opts is None else opts
    phi = p.phi.phi
    x = np.zeros(p.phi.n) if x0 is None else _check_signal(x0, p).copy()
    pty = phi.T @ p.y
    lam = _power_lam_max(phi)
    L = lam if lam > 0 else 1.0

    trace = SolverTrace()
    _record(trace, p, x, 0, 0, ground_truth)
    obj = objective_l1(x, p)
    converged = False
    for k in range(1, opts.inner_max + 1):
        grad = phi.T @ (phi @ x) - pty
        x = soft_threshold(x - grad / L, p.rho / L)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure("non-finite iterate in ista", iteration=k)
        _record(trace, p, x, 1, 1, ground_truth)
        obj_new = trace.l1_objectives[-1]
        done = abs(obj - obj_new) <= opts.inner_tol * max(abs(obj_new), 1e-12)
        obj = obj_new
        if done:
            converged = True
            break
    return ReconResult(x_hat=x, trace=trace, converged=converged, outer_iters=1)


def omp(y: np.ndarray, phi: MeasurementMatrix, k: int) -> ReconResult:
    """Orthogonal matching pursuit: greedy support growth with least-squares refits.

    Each round picks the column most correlated (normalized) with the
    residual, refits on the grown support, and updates the residual; stops
    early once the residual is negligible.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (phi.m,):
        raise ValueError(f"y has length {y.size} but matrix has {phi.m} rows")
    if not 1 <= k <= min(phi.m, phi.n):
        raise ValueError(f"k must lie in [1, {min(phi.m, phi.n)}], got {k}")
    pm = phi.phi
    norms = np.linalg.norm(pm, axis=0)
    safe_norms = np.where(norms > 0, norms, np.inf)

    support: list[int] = []
    coef = np.zeros(0)
    resid = y.copy()
    y_scale = max(1.0, float(np.linalg.norm(y)))
    rounds = 0
    for step in range(1, k + 1):
        if float(np.linalg.norm(resid)) <= 1e-14 * y_scale:
            break
        scores = np.abs(pm.T @ resid) / safe_norms
        scores[support] = -np.inf
        support.append(int(np.argmax(scores)))
        sub = pm[:, support]
        coef, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
        if rank < len(support):
            raise NumericalFailure("rank-deficient selected submatrix", iteration=step)
        resid = y - sub @ coef
        rounds = step
    x_hat = np.zeros(phi.n)
    if support:
        x_hat[support] = coef
    return ReconResult(x_hat=x_hat, trace=SolverTrace(), converged=True,
                       outer_iters=rounds)


def brute_force_l0(y: np.ndarray, phi: MeasurementMatrix, k: int) -> np.ndarray:
    """Exhaustive cardinality-constrained least squares over all supports of size <= k.

    Verification oracle for tiny instances; guarded so the enumeration
    cannot explode.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (phi.m,):
        raise ValueError(f"y has length {y.size} but matrix has {phi.m} rows")
    if not 1 <= k <= phi.n:
        raise ValueError(f"k must lie in [1, {phi.n}], got {k}")
    if math.comb(phi.n, k) > 10**6:
        raise InstanceTooLarge(
            f"C({phi.n}, {k}) = {math.comb(phi.n, k)} supports exceeds the 1e6 guard"
        )
    pm = phi.phi
    best_val = math.inf
    best_support: tuple[int, ...] = ()
    best_coef = np.zeros(0)
    for size in range(1, k + 1):
        for support in combinations(range(phi.n), size):
            sub = pm[:, support]
            coef, _, _, _ = np.linalg.lstsq(sub, y, rcond=None)
            r = y - sub @ coef
            val = float(r @ r)
            if val < best_val:
                best_val = val
                best_support = support
                best_coef = coef
    x = np.zeros(phi.n)
    x[list(best_support)] = best_coef
    return x
