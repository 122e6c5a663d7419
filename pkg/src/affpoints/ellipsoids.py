"""John and Loewner ellipsoids with contact-point certificates.

The enclosing side runs a Khachiyan-style Frank-Wolfe iteration with
Wolfe-Atwood away steps on lifted points; the hot loop lives in a compiled
kernel with a numpy fallback chosen at import.  The inscribed side maximizes
log det through a self-implemented barrier Newton method on the facet program
|B a_i| + <a_i, c> <= b_i, wrapped in a support-based cutting-plane loop for
bodies that only expose an evaluation oracle.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from .bodies import (
    AffineImage,
    AffineMap,
    Ball,
    BodyError,
    ConvexBody,
    Ellipsoid,
    EllipsoidBody,
    PolarBody,
    VPolytope,
    affine_image,
)
from .config import CONFIG
from .sampling import sphere_directions


class SolverError(RuntimeError):
    """An iteration budget ran out before the requested tolerance."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class ContactInfeasibleError(ValueError):
    """The given points cannot certify a John position."""

    def __init__(self, message: str, weights=None, residual: Optional[float] = None):
        super().__init__(message)
        self.weights = weights
        self.residual = residual


def _load_kernels():
    choice = os.environ.get("AFFPOINTS_KERNELS", CONFIG.kernels)
    if choice in ("auto", "compiled"):
        try:
            from . import _kernels as mod
            return mod, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    from . import _kernels_np as mod
    return mod, "python"


_KERNELS, KERNEL_BACKEND = _load_kernels()


def kernel_info() -> dict:
    return {"backend": KERNEL_BACKEND, "module": _KERNELS.__name__}


@dataclass(eq=False)
class ContactSystem:
    """Unit contact points v_i with weights c_i meant to resolve the identity
    sum c_i v_i v_i^T = Id together with sum c_i v_i = 0."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.points.shape[0] != self.weights.shape[0]:
            raise BodyError("one weight per contact point required")

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(eq=False)
class EllipsoidResult:
    ellipsoid: Ellipsoid
    iterations: int
    residual: float
    method: str
    contact_points: Optional[np.ndarray] = None
    contact_weights: Optional[np.ndarray] = None


def verify_contact_system(system: ContactSystem, tol: float = 1e-8):
    """Residuals of the decomposition identity; ok iff all are within tol."""
    v = system.points
    c = system.weights
    d = system.dim
    outer = np.einsum("i,ij,ik->jk", c, v, v) - np.eye(d)
    residuals = {
        "outer": float(np.linalg.norm(outer, "fro")),
        "barycenter": float(np.linalg.norm(c @ v)),
        "unit_norm": float(np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0))),
        "weight_positivity": float(max(0.0, -np.min(c))),
    }
    ok = all(r <= tol for r in residuals.values())
    return ok, residuals


def solve_contact_weights(points, threshold: float = 1e-8,
                          ridge: float = 1e-6) -> Tuple[np.ndarray, float]:
    """Nonnegative weights certifying sum c v v^T = Id, sum c v = 0.

    Least squares through NNLS on the stacked moment equations.  Highly
    symmetric configurations leave the weights underdetermined, so a tiny
    ridge steers NNLS to the minimum-norm solution, which shares every
    symmetry of the point set; the reported residual is measured on the
    unregularized system.  Raises ContactInfeasibleError when it exceeds
    the threshold.
    """
    v = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = v.shape
    rows = []
    rhs = []
    for j in range(d):
        for k in range(j, d):
            scale = 1.0 if j == k else np.sqrt(2.0)
            rows.append(scale * v[:, j] * v[:, k])
            rhs.append(scale if j == k else 0.0)
    for j in range(d):
        rows.append(v[:, j])
        rhs.append(0.0)
    a = np.array(rows)
    b = np.array(rhs)
    a_reg = np.vstack([a, ridge * np.eye(n)])
    b_reg = np.concatenate([b, np.zeros(n)])
    weights, _ = optimize.nnls(a_reg, b_reg)
    residual = float(np.linalg.norm(a @ weights - b))
    if residual > threshold:
        raise ContactInfeasibleError(
            f"contact residual {residual:.3e} exceeds threshold {threshold:.1e}",
            weights=weights, residual=residual)
    return weights, residual


# ---------------------------------------------------------------------------
# minimum volume enclosing ellipsoid of a point cloud


def _mvee_raw(pts: np.ndarray, tol: float, max_iter: int):
    """Khachiyan weights for the normalized cloud; returns (u, iters, eps, ok)."""
    n, d = pts.shape
    m = d + 1
    q = np.ascontiguousarray(np.column_stack([pts, np.ones(n)]))
    u = np.full(n, 1.0 / n)

    def refresh():
        v = (q * u[:, None]).T @ q
        try:
            vinv = np.linalg.inv(v)
        except np.linalg.LinAlgError as exc:
            raise BodyError("points are affinely degenerate") from exc
        if not np.all(np.isfinite(vinv)):
            raise BodyError("points are affinely degenerate")
        w = np.einsum("ij,jk,ik->i", q, vinv, q)
        return np.ascontiguousarray(vinv), w

    vinv, w = refresh()
    if np.max(w) > 1e13:
        raise BodyError("points are affinely degenerate")
    total = 0
    bails = 0
    eps = np.inf
    while total < max_iter:
        budget = min(2000, max_iter - total)
        done, steps, eps = _KERNELS.mvee_step_chunk(q, u, vinv, w, budget, tol)
        total += steps
        vinv, w = refresh()
        if done:
            eps = float(max(np.max(w) / m - 1.0, 1.0 - np.min(w[u > 0.0]) / m))
            if eps < tol * 1.5:
                return u, total, eps, True
        elif steps < budget:
            bails += 1
            if bails >= 3:
                raise SolverError("mvee update became numerically degenerate",
                                  residual=float(eps))
        else:
            bails = 0
    return u, total, float(eps), False


def _ellipsoid_from_weights(pts: np.ndarray, u: np.ndarray,
                            mu: np.ndarray, scale: float) -> Ellipsoid:
    center = u @ pts
    cov = (pts * u[:, None]).T @ pts - np.outer(center, center)
    try:
        cov_inv = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise BodyError("points are affinely degenerate") from exc
    diff = pts - center
    kappa = float(np.max(np.einsum("ij,jk,ik->i", diff, cov_inv, diff)))
    shape = cov_inv / kappa
    return Ellipsoid(mu + scale * center, shape / scale ** 2)


def mvee_points(points, tol: float = 1e-9, max_iter: int = 500_000) -> EllipsoidResult:
    """Minimum volume ellipsoid containing the given points.

    tol is the leverage residual max_i w_i/(d+1) - 1 at the returned weights;
    the volume then sits within roughly (1 + tol (d+1)/2) of optimal.  The
    returned ellipsoid contains every input point exactly because the shape
    is scaled by the realized maximum Mahalanobis radius.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = pts.shape
    if n < d + 1:
        raise BodyError("need at least d + 1 points")
    mu = pts.mean(axis=0)
    scale = max(1.0, float(np.max(np.linalg.norm(pts - mu, axis=1))))
    p = (pts - mu) / scale
    u, total, eps, ok = _mvee_raw(p, tol, max_iter)
    if not ok:
        raise SolverError(
            f"mvee did not reach tol={tol:.1e} after {total} iterations "
            f"(residual {eps:.3e})", residual=eps)
    ell = _ellipsoid_from_weights(p, u, mu, scale)
    mask = u > max(1e-8, 1e-6 * float(np.max(u)))
    return EllipsoidResult(
        ellipsoid=ell, iterations=total, residual=eps, method="khachiyan",
        contact_points=pts[mask], contact_weights=u[mask])


def _mvee_pruned(pts: np.ndarray, coarse: float = 1e-4, tight: float = 1e-9,
                 accept: float = 1e-5):
    """MVEE of a large cloud via active-set pruning, tolerant of flat optima.

    A coarse pass localizes the support of the optimal weights and a tight
    pass runs on that small subset, sweeping the full cloud back in until the
    ellipsoid contains everything.  Boundary samples of smooth bodies contain
    near-duplicate support candidates whose leverages differ by the square of
    their spacing; the weight iteration provably cannot separate them faster
    than that flatness scale, so the tight pass is best effort and any
    residual below `accept` is taken.  The ellipsoid itself is pinned far
    more tightly than the weights are.
    """
    n, d = pts.shape
    mu = pts.mean(axis=0)
    scale = max(1.0, float(np.max(np.linalg.norm(pts - mu, axis=1))))
    p = (pts - mu) / scale
    u, it0, eps0, _ = _mvee_raw(p, coarse, 60_000)
    active = np.flatnonzero(u > max(1e-12, 1e-7 * float(np.max(u))))
    total = it0
    eps_final = eps0
    for _ in range(10):
        if active.size < d + 1:
            extra = np.argsort(u)[::-1][: d + 1 - active.size]
            active = np.union1d(active, extra)
        u_sub, it1, eps1, ok = _mvee_raw(p[active], tight, 200_000)
        total += it1
        if not ok and eps1 > accept:
            raise SolverError(
                f"mvee active-set pass stalled (residual {eps1:.3e})",
                residual=eps1)
        eps_final = eps1
        ell_n = _ellipsoid_from_weights(p[active], u_sub, np.zeros(d), 1.0)
        diff = p - ell_n.center
        quad = np.einsum("ij,jk,ik->i", diff, ell_n.shape, diff)
        out = np.flatnonzero(quad > 1.0 + 1e-8)
        new = np.setdiff1d(out, active)
        if new.size == 0:
            weights = np.zeros(n)
            weights[active] = u_sub
            ell = Ellipsoid(mu + scale * ell_n.center, ell_n.shape / scale ** 2)
            return ell, weights, total, eps_final
        active = np.union1d(active, new)
    raise SolverError("mvee pruning loop failed to absorb all points")


# ---------------------------------------------------------------------------
# maximum volume inscribed ellipsoid: log det barrier on facet constraints


def _sym_basis(d: int):
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    mats = []
    for i, j in pairs:
        e = np.zeros((d, d))
        if i == j:
            e[i, i] = 1.0
        else:
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
        mats.append(e)
    return pairs, np.array(mats)


def _vech(mat: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("aij,ij->a", basis, mat)


def _unvech(vec: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("a,aij->ij", vec, basis)


def _inscribed_ellipsoid(a: np.ndarray, b: np.ndarray, x0: np.ndarray,
                         gap_tol: float = 1e-11) -> Tuple[np.ndarray, np.ndarray, float]:
    """maximize log det B subject to |B a_i| + <a_i, c> <= b_i, B sym PD.

    Newton barrier path following; returns (B, c, duality_gap_estimate).
    Facet normals must be unit rows and x0 strictly feasible for the slab
    constraints (a Chebyshev step repairs it when not).
    """
    m, d = a.shape
    margins = b - a @ x0
    if np.min(margins) <= 0.0:
        # recenter through the Chebyshev LP  max r : a.x + r <= b
        res = optimize.linprog(
            c=np.concatenate([np.zeros(d), [-1.0]]),
            A_ub=np.column_stack([a, np.ones(m)]), b_ub=b,
            bounds=[(None, None)] * d + [(0.0, None)], method="highs")
        if not res.success or res.x[d] <= 0.0:
            raise BodyError("constraint set has empty interior")
        x0 = res.x[:d]
        margins = b - a @ x0

    pairs, basis = _sym_basis(d)
    s_dim = len(pairs)
    # P_i maps vech(H) to H a_i; constant throughout the solve
    p_ops = np.einsum("aij,cj->cia", basis, a)  # (m, d, s_dim)
    ptp = np.einsum("cia,cib->cab", p_ops, p_ops)  # (m, s_dim, s_dim)

    bmat = 0.8 * float(np.min(margins)) * np.eye(d)
    c = x0.astype(float).copy()
    t = 1.0
    mu = 30.0
    n_vars = s_dim + d

    def slacks(bm, cc):
        ba = bm @ a.T  # (d, m)
        nb = np.linalg.norm(ba, axis=0)
        return b - a @ cc - nb, ba, nb

    while True:
        for _ in range(80):
            s, ba, nb = slacks(bmat, c)
            if np.min(s) <= 0.0:
                raise SolverError("barrier lost feasibility")
            binv = np.linalg.inv(bmat)
            grad = np.zeros(n_vars)
            grad[:s_dim] = -t * _vech(binv, basis)
            hess = np.zeros((n_vars, n_vars))
            # t * d^2(-logdet) = t * tr(Binv E_a Binv E_b)
            bi_e = np.einsum("ij,ajk->aik", binv, basis)
            hess[:s_dim, :s_dim] = t * np.einsum("aik,bki->ab", bi_e, bi_e)
            inv_s = 1.0 / s
            # gradient pieces per constraint
            n_vecs = np.einsum("cia,ic->ca", p_ops, ba) / nb[:, None]  # (m, s_dim)
            g_all = np.concatenate([n_vecs, a], axis=1)  # (m, n_vars)
            grad += inv_s @ g_all
            hess += np.einsum("c,ca,cb->ab", inv_s ** 2, g_all, g_all)
            curv = (ptp - np.einsum("ca,cb->cab", n_vecs, n_vecs)) / nb[:, None, None]
            hess[:s_dim, :s_dim] += np.einsum("c,cab->ab", inv_s, curv)

            try:
                step = np.linalg.solve(hess + 1e-13 * np.eye(n_vars), -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
            decrement = float(-grad @ step)
            if decrement <= 2e-11:
                break
            # backtracking line search keeping B positive definite and s > 0
            f0 = -t * np.linalg.slogdet(bmat)[1] - np.sum(np.log(s))
            tau = 1.0
            for _ in range(60):
                bm_new = bmat + tau * _unvech(step[:s_dim], basis)
                c_new = c + tau * step[s_dim:]
                try:
                    np.linalg.cholesky(bm_new)
                except np.linalg.LinAlgError:
                    tau *= 0.5
                    continue
                s_new, _, _ = slacks(bm_new, c_new)
                if np.min(s_new) <= 0.0:
                    tau *= 0.5
                    continue
                f_new = -t * np.linalg.slogdet(bm_new)[1] - np.sum(np.log(s_new))
                if f_new <= f0 - 1e-4 * tau * decrement:
                    break
                tau *= 0.5
            else:
                break
            bmat, c = bm_new, c_new
        if m / t < gap_tol * max(1.0, m):
            break
        t *= mu
    return bmat, c, m / t


def _facet_presentation(body: ConvexBody):
    if isinstance(body, VPolytope):
        return body._facets(), body.interior_point()
    vp = body.as_vpolytope()
    if vp is not None:
        return vp._facets(), vp.interior_point()
    return None, None


def john(body: ConvexBody, tol: Optional[float] = None,
         max_rounds: int = 60, n_dirs: Optional[int] = None) -> EllipsoidResult:
    """Maximum volume inscribed ellipsoid.

    Facet presentations solve one barrier program and are certified on a
    direction net.  Oracle bodies run a cutting-plane loop: solve on the
    current support constraints, search for the direction where the candidate
    pokes out farthest, cut, repeat until the support violation is below tol.
    """
    tol = CONFIG.solver_tol if tol is None else tol
    d = body.dim
    if isinstance(body, EllipsoidBody):
        return EllipsoidResult(body.ellipsoid, 0, 0.0, "closed-form")
    if isinstance(body, Ball) and body.p == 2.0:
        ell = Ellipsoid(body.center, np.eye(d) / body.radius ** 2)
        return EllipsoidResult(ell, 0, 0.0, "closed-form")

    scale = max(1.0, body.circumradius_bound())
    facets, x0 = _facet_presentation(body)
    if facets is not None:
        a, b = facets
        bmat, c, gap = _inscribed_ellipsoid(a, b, x0)
        ell = Ellipsoid(c, np.linalg.inv(bmat @ bmat))
        net = sphere_directions(2048, d, seed=CONFIG.seed + 11)
        viol = float(np.max(ell.support_batch(net) - body.support_batch(net)))
        return EllipsoidResult(ell, 1, max(viol, 0.0), "barrier")

    n0 = n_dirs if n_dirs is not None else max(16 * d, 64)
    dirs = np.vstack([np.eye(d), -np.eye(d), sphere_directions(n0, d, seed=CONFIG.seed)])
    hvals = body.support_batch(dirs)
    anchor = body.interior_point()
    rounds = 0
    viol = np.inf
    clean = 0
    while rounds < max_rounds:
        rounds += 1
        bmat, c, _ = _inscribed_ellipsoid(dirs, hvals, anchor)
        ell = Ellipsoid(c, np.linalg.inv(bmat @ bmat))
        slack = hvals - dirs @ c - np.linalg.norm(bmat @ dirs.T, axis=0)
        hints = dirs[np.argsort(slack)[:20]]
        cand, viol = _max_support_gap(ell, body, sign=+1.0,
                                      seed=CONFIG.seed + rounds, hint_dirs=hints)
        if viol <= tol * scale:
            # the gap search only lower-bounds the true violation, so ask for
            # two consecutive clean rounds (independent nets) before trusting it
            clean += 1
            if clean >= 2:
                break
        else:
            clean = 0
        dirs = np.vstack([dirs, cand])
        hvals = np.concatenate([hvals, body.support_batch(cand)])
        anchor = c
        if dirs.shape[0] > 900:
            slack = hvals - dirs @ c - np.linalg.norm(bmat @ dirs.T, axis=0)
            keep = np.argsort(slack)[:700]
            dirs, hvals = dirs[keep], hvals[keep]
    else:
        raise SolverError(
            f"john cutting-plane stalled at support violation {viol:.3e}",
            residual=float(viol))
    return EllipsoidResult(ell, rounds, float(max(viol, 0.0)), "cutting-plane")


def _max_support_gap(ell: Ellipsoid, body: ConvexBody, sign: float, seed: int,
                     n_net: Optional[int] = None, n_polish: Optional[int] = None,
                     hint_dirs: Optional[np.ndarray] = None):
    """Directions maximizing sign * (h_E - h_C), net search plus local ascent.

    The gap is a difference of support functions, so local maxima sit in
    basins roughly one per contact feature of the pair; a moderate net with
    well separated starts plus two polish stages (projected gradient, then
    Nelder-Mead in a tangent chart) localizes the worst direction far better
    than the net alone can.  Returns (directions worth cutting, best gap).
    """
    d = ell.dim
    if n_net is None:
        n_net = max(6144, 3072 * (d - 2))
    if n_polish is None:
        n_polish = min(32, 8 + 4 * d)
    net = sphere_directions(n_net, d, seed=seed)
    gaps = sign * (ell.support_batch(net) - body.support_batch(net))
    order = np.argsort(gaps)[::-1]
    # greedy angular dedupe of the starts so the polish budget spreads over
    # distinct basins instead of re-climbing the same peak
    starts = []
    for k in order:
        u = net[k]
        if all(float(u @ v) < 0.9 for v in starts):
            starts.append(u.copy())
        if len(starts) >= n_polish:
            break
    best = float(gaps[order[0]])
    binv = ell.inverse_shape
    scale = max(1.0, float(np.max(np.abs(gaps))))

    def gap_of(u):
        return sign * (ell.support(u) - body.support(u))

    polished = []
    for u in starts:
        val = gap_of(u)
        lr = 0.15
        for _ in range(80):
            eu = binv @ u
            grad_e = ell.center + eu / np.sqrt(u @ eu)
            try:
                grad_c = body.support_point(u)
            except BodyError:
                break
            g = sign * (grad_e - grad_c)
            g_t = g - (g @ u) * u
            if np.linalg.norm(g_t) < 1e-14:
                break
            u_new = u + lr * g_t
            u_new /= np.linalg.norm(u_new)
            val_new = gap_of(u_new)
            if val_new > val:
                u, val = u_new, val_new
                lr = min(lr * 1.5, 0.5)
            else:
                lr *= 0.5
                if lr < 1e-6:
                    break
        polished.append((val, u))
    polished.sort(key=lambda t: -t[0])

    # Nelder-Mead in a tangent chart; the gap is nonsmooth across
    # support-feature switches, where gradient ascent zigzags to a halt but
    # simplex search keeps moving.  Seed it both from the ascent winners and
    # from raw net leaders, since a stalled ascent can misrank a good basin.
    # Early cutting rounds have O(1) gaps that need no such precision, so
    # spend the polish budget only once the gap is already small.
    if best < 3e-2 * scale:
        nm_seeds = [u for _, u in polished[:10]] + starts[:6]
        nm_budget = 2500
        # near convergence the worst poke hides between clustered contact
        # directions; jittered copies of caller-supplied hints (active cuts)
        # put a simplex start inside that sliver of the sphere
        if hint_dirs is not None and len(hint_dirs):
            rng = np.random.default_rng(seed)
            hints = hint_dirs[:20]
            jit = hints[:, None, :] + 0.04 * rng.standard_normal(
                (len(hints), 8, d))
            jit = jit.reshape(-1, d)
            jit /= np.linalg.norm(jit, axis=1, keepdims=True)
            cloud = np.vstack([hints, jit])
            cloud_gaps = sign * (ell.support_batch(cloud) - body.support_batch(cloud))
            top = np.argsort(cloud_gaps)[::-1][:6]
            nm_seeds += [cloud[k] for k in top]
    else:
        nm_seeds = [u for _, u in polished[:4]]
        nm_budget = 400
    refined = []
    seen = []
    for u0 in nm_seeds:
        if any(float(u0 @ v) > 1.0 - 1e-9 for v in seen):
            continue
        seen.append(u0)
        q, _ = np.linalg.qr(np.column_stack([u0, np.eye(d)[:, :d - 1]]))
        tang = q[:, 1:]

        def neg_gap(theta, u0=u0, tang=tang):
            v = u0 + tang @ theta
            v /= np.linalg.norm(v)
            return -gap_of(v)

        res = optimize.minimize(neg_gap, np.zeros(d - 1), method="Nelder-Mead",
                                options={"xatol": 1e-11, "fatol": 1e-15,
                                         "maxiter": nm_budget, "maxfev": nm_budget})
        v = u0 + tang @ res.x
        v /= np.linalg.norm(v)
        refined.append((-float(res.fun), v))
    refined.sort(key=lambda t: -t[0])
    best = max(best, refined[0][0])

    keep_at = max(0.0, 0.25 * best)
    chosen = [v for val, v in refined if val >= keep_at]
    chosen += [u for val, u in polished if val >= keep_at]
    uniq = []
    for u in chosen:
        if all(float(u @ v) < 1.0 - 1e-10 for v in uniq):
            uniq.append(u)
        if len(uniq) >= 12:
            break
    extra = [net[k] for k in order[:4]]
    return np.vstack(uniq + extra), best


def loewner(body: ConvexBody, n_samples: Optional[int] = None,
            tol: Optional[float] = None, max_rounds: int = 12) -> EllipsoidResult:
    """Minimum volume enclosing ellipsoid of a body.

    Polytopes reduce to their vertices.  Oracle bodies are sampled at support
    points over a quasi-uniform net, enclosed via mvee_points, then refined by
    adding support points wherever the body still pokes out of the candidate,
    until h_C <= h_E + tol everywhere on the verification search.
    """
    tol = CONFIG.solver_tol if tol is None else tol
    d = body.dim
    if isinstance(body, EllipsoidBody):
        return EllipsoidResult(body.ellipsoid, 0, 0.0, "closed-form")
    if isinstance(body, Ball) and body.p == 2.0:
        ell = Ellipsoid(body.center, np.eye(d) / body.radius ** 2)
        return EllipsoidResult(ell, 0, 0.0, "closed-form")
    scale = max(1.0, body.circumradius_bound())

    vp = body.as_vpolytope()
    if vp is not None:
        res = mvee_points(vp.vertices, tol=min(1e-9, tol))
        net = sphere_directions(2048, d, seed=CONFIG.seed + 13)
        viol = float(np.max(body.support_batch(net) - res.ellipsoid.support_batch(net)))
        res.residual = max(viol, 0.0)
        res.method = "khachiyan-vertices"
        return res

    n0 = n_samples if n_samples is not None else 4096
    dirs = np.vstack([np.eye(d), -np.eye(d), sphere_directions(n0, d, seed=CONFIG.seed)])
    pts = _support_samples(body, dirs)
    total_iter = 0
    viol = np.inf
    ell, weights = None, None
    for round_ in range(max_rounds):
        ell, weights, iters, _ = _mvee_pruned(pts)
        total_iter += iters
        cand, viol = _max_support_gap(ell, body, sign=-1.0, seed=CONFIG.seed + 17 + round_)
        if viol <= tol * scale:
            break
        pts = np.vstack([pts, _support_samples(body, cand)])
        weights = None
    else:
        raise SolverError(
            f"loewner refinement stalled at support violation {viol:.3e}",
            residual=float(viol))
    mask = weights > max(1e-8, 1e-6 * float(np.max(weights)))
    return EllipsoidResult(
        ellipsoid=ell, iterations=total_iter, residual=float(max(viol, 0.0)),
        method="khachiyan-adaptive", contact_points=pts[: mask.size][mask],
        contact_weights=weights[mask])


def _support_samples(body: ConvexBody, dirs: np.ndarray) -> np.ndarray:
    pts = np.empty_like(dirs)
    for i, u in enumerate(dirs):
        try:
            pts[i] = body.support_point(u)
        except BodyError:
            pts[i] = body.boundary_point(u)
    return pts


def john_position_transform(body: ConvexBody, tol: Optional[float] = None,
                            check: bool = True) -> Tuple[AffineMap, ConvexBody]:
    """Affine T with J(T(body)) = unit ball, returned with the image body.

    When check is set the image is certified by re-solving for its inscribed
    ellipsoid and comparing against the unit ball.
    """
    res = john(body, tol=tol)
    e = res.ellipsoid
    t_map = AffineMap(e.sqrt_shape, -e.sqrt_shape @ e.center)
    image = affine_image(t_map, body)
    if check:
        res2 = john(image, tol=tol)
        e2 = res2.ellipsoid
        err = max(float(np.max(np.abs(e2.center))),
                  float(np.max(np.abs(e2.shape - np.eye(body.dim)))))
        limit = 1e-6 * max(1.0, float(np.max(np.abs(e.shape))))
        if err > max(1e-5, limit):
            raise SolverError(
                f"john position check failed, unit ball residual {err:.3e}",
                residual=err)
    return t_map, image
