# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot loop of the minimum volume enclosing ellipsoid solver.

One call runs up to `max_steps` Frank-Wolfe iterations with away steps on the
lifted point set Q (n x m, m = d + 1), updating the weight vector u, the
inverse scatter matrix Vinv = (Q^T diag(u) Q)^{-1} and the leverage vector
w_i = q_i^T Vinv q_i in place through rank-one updates.  The caller is
responsible for periodically recomputing Vinv and w from scratch to shed
floating point drift.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def mvee_step_chunk(double[:, ::1] Q, double[::1] u, double[:, ::1] Vinv,
                    double[::1] w, long max_steps, double tol):
    """Run iterations until the leverage residual drops below tol.

    Returns (converged, steps_done, eps) where eps is the last residual
    max(max_i w_i/m - 1, 1 - min_{u_i>0} w_i/m).
    """
    cdef Py_ssize_t n = Q.shape[0]
    cdef Py_ssize_t m = Q.shape[1]
    cdef Py_ssize_t i, j, k, jp, jm, step
    cdef double wmax, wmin, eps_p, eps_m, eps, lam, lam_star, lam_drop
    cdef double a, denom, si, uj, dm = <double> m
    cdef double[::1] g = np.empty(m)
    cdef double[::1] s = np.empty(n)
    eps = 0.0

    for step in range(max_steps):
        jp = 0
        jm = -1
        wmax = -1.0
        wmin = 0.0
        for i in range(n):
            if w[i] > wmax:
                wmax = w[i]
                jp = i
            if u[i] > 0.0 and (jm < 0 or w[i] < wmin):
                wmin = w[i]
                jm = i
        eps_p = wmax / dm - 1.0
        eps_m = 1.0 - wmin / dm
        eps = eps_p if eps_p > eps_m else eps_m
        if eps < tol:
            return 1, step, eps

        if eps_p >= eps_m:
            j = jp
            lam = (w[j] - dm) / (dm * (w[j] - 1.0))
        else:
            j = jm
            uj = u[j]
            lam_drop = -uj / (1.0 - uj) if uj < 1.0 else -1.0
            if w[j] > 1.0 + 1e-12:
                lam_star = (w[j] - dm) / (dm * (w[j] - 1.0))
                lam = lam_star if lam_star > lam_drop else lam_drop
            else:
                lam = lam_drop

        a = 1.0 - lam
        denom = a + lam * w[j]
        if denom <= 0.0 or a <= 0.0:
            # numerically unusable step; signal the caller to refresh
            return 0, step, eps

        for k in range(m):
            si = 0.0
            for i in range(m):
                si += Vinv[k, i] * Q[j, i]
            g[k] = si
        for i in range(n):
            si = 0.0
            for k in range(m):
                si += Q[i, k] * g[k]
            s[i] = si
        for i in range(n):
            w[i] = (w[i] - lam * s[i] * s[i] / denom) / a
        for k in range(m):
            for i in range(m):
                Vinv[k, i] = (Vinv[k, i] - (lam / denom) * g[k] * g[i]) / a
        for i in range(n):
            u[i] *= a
        u[j] += lam
        if u[j] < 1e-17:
            u[j] = 0.0

    return 0, max_steps, eps
