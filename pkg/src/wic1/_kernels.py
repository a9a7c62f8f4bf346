"""Compiled inner loops.

Everything here works on plain floats and numpy arrays so numba can
compile it; the public wrappers live in the domain modules.
"""
import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_EVENT_MISS = 2

EVENT_TOL = 1e-12


@njit(cache=True)
def _rk4_osc(x, v, s, beta, k, h):
    # x'' = 2 beta x' - k (x - s)
    a1x = v
    a1v = 2.0 * beta * v - k * (x - s)
    xm = x + 0.5 * h * a1x
    vm = v + 0.5 * h * a1v
    a2x = vm
    a2v = 2.0 * beta * vm - k * (xm - s)
    xm = x + 0.5 * h * a2x
    vm = v + 0.5 * h * a2v
    a3x = vm
    a3v = 2.0 * beta * vm - k * (xm - s)
    xe = x + h * a3x
    ve = v + h * a3v
    a4x = ve
    a4v = 2.0 * beta * ve - k * (xe - s)
    xn = x + h / 6.0 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x)
    vn = v + h / 6.0 * (a1v + 2.0 * a2v + 2.0 * a3v + a4v)
    return xn, vn


@njit(cache=True)
def _guard(x, s, t, freq, syms, targets):
    """Apply the switching rule at a guard event; returns (x, s, perturbation)."""
    if abs(x) >= 1.0:
        return x, s, 0.0
    if syms.shape[0] == 0:
        if x > 0.0:
            return x, 1.0, 0.0
        if x < 0.0:
            return x, -1.0, 0.0
        return x, s, 0.0
    n = int(np.floor(t * freq + 0.5))
    if n < 0 or n >= syms.shape[0]:
        return x, s, 0.0
    return targets[n], syms[n], abs(targets[n] - x)


@njit(cache=True)
def hybrid_integrate(x0, v0, s0, beta, k, freq, dt, n_steps, syms, targets):
    """Fixed-step RK4 with bisection-refined guard events on x' = 0.

    ``syms``/``targets`` empty means free-running; otherwise at each
    guard event inside period n the symbol is set to syms[n] and x is
    nudged onto targets[n].
    """
    xs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    ss = np.empty(n_steps + 1)
    x = x0
    v = v0
    s = s0
    max_pert = 0.0
    n_events = 0
    if v == 0.0:
        x, s, p = _guard(x, s, 0.0, freq, syms, targets)
        max_pert = max(max_pert, p)
    xs[0] = x
    vs[0] = v
    ss[0] = s
    for i in range(n_steps):
        t = i * dt
        x1, v1 = _rk4_osc(x, v, s, beta, k, dt)
        if not (np.isfinite(x1) and np.isfinite(v1)):
            return xs, vs, ss, STATUS_NONFINITE, i, max_pert, n_events
        crossed = (v > 0.0 and v1 <= 0.0) or (v < 0.0 and v1 >= 0.0)
        if crossed:
            lo = 0.0
            hi = dt
            h = dt
            xe = x1
            ve = v1
            for _ in range(200):
                h = 0.5 * (lo + hi)
                xe, ve = _rk4_osc(x, v, s, beta, k, h)
                if abs(ve) < EVENT_TOL:
                    break
                if (ve > 0.0) == (v > 0.0):
                    lo = h
                else:
                    hi = h
            n_events += 1
            xe, s, p = _guard(xe, s, t + h, freq, syms, targets)
            max_pert = max(max_pert, p)
            acc = 2.0 * beta * ve - k * (xe - s)
            x1, v1 = _rk4_osc(xe, ve, s, beta, k, dt - h)
            # the slope must keep heading the way it left the event
            if abs(v1) > EVENT_TOL and abs(acc) > 0.0 and (v1 > 0.0) != (acc > 0.0):
                return xs, vs, ss, STATUS_EVENT_MISS, i, max_pert, n_events
        x = x1
        v = v1
        xs[i + 1] = x
        vs[i + 1] = v
        ss[i + 1] = s
    return xs, vs, ss, STATUS_OK, n_steps, max_pert, n_events


@njit(cache=True)
def filter_integrate(y0, v0, eta_l, eta_m, eta_r, beta, k, dt):
    """RK4 for y'' + 2 beta y' + k (y - eta(t)) = 0.

    Step i uses eta at its left end, midpoint and right end.
    """
    n = eta_l.shape[0] + 1
    ys = np.empty(n)
    vs = np.empty(n)
    y = y0
    v = v0
    ys[0] = y
    vs[0] = v
    for i in range(n - 1):
        e0 = eta_l[i]
        em = eta_m[i]
        e1 = eta_r[i]
        a1y = v
        a1v = -2.0 * beta * v - k * (y - e0)
        ym = y + 0.5 * dt * a1y
        vm = v + 0.5 * dt * a1v
        a2y = vm
        a2v = -2.0 * beta * vm - k * (ym - em)
        ym = y + 0.5 * dt * a2y
        vm = v + 0.5 * dt * a2v
        a3y = vm
        a3v = -2.0 * beta * vm - k * (ym - em)
        ye = y + dt * a3y
        ve = v + dt * a3v
        a4y = ve
        a4v = -2.0 * beta * ve - k * (ye - e1)
        y = y + dt / 6.0 * (a1y + 2.0 * a2y + 2.0 * a3y + a4y)
        v = v + dt / 6.0 * (a1v + 2.0 * a2v + 2.0 * a3v + a4v)
        if not (np.isfinite(y) and np.isfinite(v)):
            return ys, vs, i
        ys[i + 1] = y
        vs[i + 1] = v
    return ys, vs, -1


@njit(cache=True)
def _mgs(a, q, r):
    """Modified Gram-Schmidt: a = q r with positive diag(r)."""
    d = a.shape[0]
    for j in range(d):
        for i in range(d):
            q[i, j] = a[i, j]
    for j in range(d):
        for p in range(j):
            dot = 0.0
            for i in range(d):
                dot += q[i, p] * q[i, j]
            r[p, j] = dot
            for i in range(d):
                q[i, j] -= dot * q[i, p]
        nrm = 0.0
        for i in range(d):
            nrm += q[i, j] * q[i, j]
        nrm = np.sqrt(nrm)
        r[j, j] = nrm
        if nrm > 0.0:
            for i in range(d):
                q[i, j] /= nrm


@njit(cache=True)
def qr_log_growth(jacobians):
    """Sum of log R-diagonals of the QR-reorthogonalized product.

    Returns (sums, status) where status 1 flags a vanishing R-diagonal.
    """
    n = jacobians.shape[0]
    d = jacobians.shape[1]
    q = np.eye(d)
    qn = np.empty((d, d))
    r = np.zeros((d, d))
    a = np.empty((d, d))
    sums = np.zeros(d)
    for step in range(n):
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for m in range(d):
                    acc += jacobians[step, i, m] * q[m, j]
                a[i, j] = acc
        _mgs(a, qn, r)
        for i in range(d):
            if not (r[i, i] > 0.0) or not np.isfinite(r[i, i]):
                return sums, 1
            sums[i] += np.log(r[i, i])
        for i in range(d):
            for j in range(d):
                q[i, j] = qn[i, j]
    return sums, 0


@njit(cache=True)
def linear_tangent_growth(jac, dt, n_steps, reortho):
    """QR growth sums for d' = J d with constant J, RK4 steps of dt."""
    d = jac.shape[0]
    q = np.eye(d)
    qn = np.empty((d, d))
    r = np.zeros((d, d))
    sums = np.zeros(d)
    k1 = np.empty((d, d))
    k2 = np.empty((d, d))
    k3 = np.empty((d, d))
    k4 = np.empty((d, d))
    tmp = np.empty((d, d))
    for step in range(n_steps):
        _matmul(jac, q, k1)
        for i in range(d):
            for j in range(d):
                tmp[i, j] = q[i, j] + 0.5 * dt * k1[i, j]
        _matmul(jac, tmp, k2)
        for i in range(d):
            for j in range(d):
                tmp[i, j] = q[i, j] + 0.5 * dt * k2[i, j]
        _matmul(jac, tmp, k3)
        for i in range(d):
            for j in range(d):
                tmp[i, j] = q[i, j] + dt * k3[i, j]
        _matmul(jac, tmp, k4)
        for i in range(d):
            for j in range(d):
                q[i, j] += dt / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        if (step + 1) % reortho == 0 or step == n_steps - 1:
            _mgs(q, qn, r)
            for i in range(d):
                sums[i] += np.log(r[i, i])
            for i in range(d):
                for j in range(d):
                    q[i, j] = qn[i, j]
    return sums


@njit(cache=True)
def _matmul(a, b, out):
    d = a.shape[0]
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for m in range(d):
                acc += a[i, m] * b[m, j]
            out[i, j] = acc


@njit(cache=True)
def _rossler_rhs(st, a, b, c, q_scale, out):
    x = st[0]
    y = st[1]
    z = st[2]
    out[0] = q_scale * (-y - z)
    out[1] = q_scale * (x + a * y)
    out[2] = q_scale * (b + z * (x - c))
    # tangent block, row-major 3x3 stored in st[3:12]
    for j in range(3):
        dx = st[3 + j]
        dy = st[6 + j]
        dz = st[9 + j]
        out[3 + j] = q_scale * (-dy - dz)
        out[6 + j] = q_scale * (dx + a * dy)
        out[9 + j] = q_scale * (z * dx + (x - c) * dz)


@njit(cache=True)
def _rossler_step(st, a, b, c, q_scale, dt, k1, k2, k3, k4, tmp):
    _rossler_rhs(st, a, b, c, q_scale, k1)
    for i in range(12):
        tmp[i] = st[i] + 0.5 * dt * k1[i]
    _rossler_rhs(tmp, a, b, c, q_scale, k2)
    for i in range(12):
        tmp[i] = st[i] + 0.5 * dt * k2[i]
    _rossler_rhs(tmp, a, b, c, q_scale, k3)
    for i in range(12):
        tmp[i] = st[i] + dt * k3[i]
    _rossler_rhs(tmp, a, b, c, q_scale, k4)
    for i in range(12):
        st[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def rossler_spectrum(x0, a, b, c, q_scale, dt, n_transient, n_steps, reortho):
    """Benettin/QR spectrum of one (optionally time-scaled) Rossler block.

    Returns (log-growth sums, mean trace of the Jacobian, final state).
    """
    st = np.zeros(12)
    st[0] = x0[0]
    st[1] = x0[1]
    st[2] = x0[2]
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    for _ in range(n_transient):
        _rossler_step(st, a, b, c, q_scale, dt, k1, k2, k3, k4, tmp)
    for i in range(3):
        for j in range(3):
            st[3 + 3 * i + j] = 1.0 if i == j else 0.0
    m = np.empty((3, 3))
    qn = np.empty((3, 3))
    r = np.zeros((3, 3))
    sums = np.zeros(3)
    trace_acc = 0.0
    for step in range(n_steps):
        # trapezoid-free average: trace sampled at step starts
        trace_acc += q_scale * (a + st[0] - c)
        _rossler_step(st, a, b, c, q_scale, dt, k1, k2, k3, k4, tmp)
        if (step + 1) % reortho == 0 or step == n_steps - 1:
            for i in range(3):
                for j in range(3):
                    m[i, j] = st[3 + 3 * i + j]
            _mgs(m, qn, r)
            for i in range(3):
                sums[i] += np.log(r[i, i])
                for j in range(3):
                    st[3 + 3 * i + j] = qn[i, j]
    return sums, trace_acc / n_steps, st[:3].copy()


@njit(cache=True)
def rossler_step_jacobians(x0, a, b, c, q_scale, dt, n_transient, n_steps):
    """Per-step tangent propagators of the RK4-discretised Rossler flow."""
    st = np.zeros(12)
    st[0] = x0[0]
    st[1] = x0[1]
    st[2] = x0[2]
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    for _ in range(n_transient):
        _rossler_step(st, a, b, c, q_scale, dt, k1, k2, k3, k4, tmp)
    out = np.empty((n_steps, 3, 3))
    for step in range(n_steps):
        for i in range(3):
            for j in range(3):
                st[3 + 3 * i + j] = 1.0 if i == j else 0.0
        _rossler_step(st, a, b, c, q_scale, dt, k1, k2, k3, k4, tmp)
        for i in range(3):
            for j in range(3):
                out[step, i, j] = st[3 + 3 * i + j]
    return out
