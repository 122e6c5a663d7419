"""Pure numpy fallback for the compiled MVEE kernel.

Mirrors the signature and in-place semantics of _kernels.mvee_step_chunk so
the two are interchangeable at import time.
"""

from __future__ import annotations

import numpy as np


def mvee_step_chunk(Q, u, Vinv, w, max_steps, tol):
    n, m = Q.shape
    dm = float(m)
    for step in range(max_steps):
        jp = int(np.argmax(w))
        active = u > 0.0
        w_act = np.where(active, w, np.inf)
        jm = int(np.argmin(w_act))
        eps_p = w[jp] / dm - 1.0
        eps_m = 1.0 - w[jm] / dm
        eps = max(eps_p, eps_m)
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
                lam = max((w[j] - dm) / (dm * (w[j] - 1.0)), lam_drop)
            else:
                lam = lam_drop

        a = 1.0 - lam
        denom = a + lam * w[j]
        if denom <= 0.0 or a <= 0.0:
            return 0, step, eps

        g = Vinv @ Q[j]
        s = Q @ g
        w -= lam * s * s / denom
        w /= a
        Vinv -= (lam / denom) * np.outer(g, g)
        Vinv /= a
        u *= a
        u[j] += lam
        if u[j] < 1e-17:
            u[j] = 0.0

    return 0, max_steps, eps
