"""Independent brute-force oracle: damped Newton on the full nonlinear
system A u - rho w u - f(u) = 0 from many starts, keeping every nontrivial
critical point found.  Shares no code with the min-max solver."""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def damped_newton(A, f, df, u0, max_iter=300, tol=1e-12):
    u = np.asarray(u0, dtype=float).copy()
    fails = 0
    for _ in range(max_iter):
        r = A @ u - f(u)
        rn = np.linalg.norm(r)
        if rn <= tol * (1.0 + np.linalg.norm(u)):
            return u
        jac = (A - sp.diags(df(u))).tocsc()
        try:
            delta = spla.splu(jac).solve(-r)
        except RuntimeError:
            return None
        best, best_u = None, None
        for k in range(12):
            u_try = u + (0.5 ** k) * delta
            r_try = np.linalg.norm(A @ u_try - f(u_try))
            if best is None or r_try < best:
                best, best_u = r_try, u_try
            if r_try < rn:
                break
        fails = fails + 1 if best >= rn else 0
        if fails >= 10:
            return None
        u = best_u
    return None


def critical_levels(box, A, p=4.0, n_starts=50, seed=0):
    """Levels of all nontrivial critical points found from mixed starts.

    Starts alternate between broad Gaussian fields at several norms and
    single-site bumps (the critical points of this problem are strongly
    localized, including at corners of the Dirichlet box).
    """
    def f(u):
        return np.abs(u) ** (p - 2.0) * u

    def df(u):
        return (p - 1.0) * np.abs(u) ** (p - 2.0)

    rng = np.random.default_rng(seed)
    starts = []
    corners = [s for s in map(tuple, box.sites)
               if all(abs(c) == box.radius for c in s)]
    anchor_sites = corners + [(0,) * box.dimension]
    for i in range(n_starts):
        if i % 2 == 0:
            values = 0.2 * rng.standard_normal(box.site_count)
            site = anchor_sites[(i // 2) % len(anchor_sites)]
            values[box.index_of(np.array(site))] += rng.choice([-1.5, 1.5])
            starts.append(values)
        else:
            values = rng.standard_normal(box.site_count)
            values *= (1.5, 3.0, 6.0)[(i // 2) % 3] / np.linalg.norm(values)
            starts.append(values)

    levels = []
    for u0 in starts:
        u = damped_newton(A, f, df, u0)
        if u is None or np.linalg.norm(u) < 1e-4:
            continue
        level = 0.5 * float(u @ (A @ u)) - float(np.sum(np.abs(u) ** p)) / p
        levels.append(level)
    return sorted(levels)
