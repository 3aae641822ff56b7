# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Euler state propagation, cofactor adjugate and
determinant for small dense matrices, delay-extension mixing, and the scalar
gradient-descent recursion.

Mirrors dremnorm._kernels._ref operation for operation (same arithmetic
order), so both backends produce matching trajectories.
"""

import numpy as np

DEF MAX_DIM = 8


cdef double _det(const double* m, int d) noexcept nogil:
    # Laplace expansion along the first row. d is capped at MAX_DIM by the
    # callers, so the per-frame scratch minor fits on the stack.
    cdef double minor[(MAX_DIM - 1) * (MAX_DIM - 1)]
    cdef int i, j, r, c
    cdef double sign, acc
    if d == 1:
        return m[0]
    if d == 2:
        return m[0] * m[3] - m[1] * m[2]
    acc = 0.0
    sign = 1.0
    for j in range(d):
        for r in range(1, d):
            c = 0
            for i in range(d):
                if i != j:
                    minor[(r - 1) * (d - 1) + c] = m[r * d + i]
                    c += 1
        acc = acc + sign * m[j] * _det(minor, d - 1)
        sign = -sign
    return acc


cdef void _adjugate_det(const double* m, int d, double* adj, double* det_out) noexcept nogil:
    cdef double minor[(MAX_DIM - 1) * (MAX_DIM - 1)]
    cdef int i, j, r, c, rr, cc
    cdef double s
    if d == 1:
        adj[0] = 1.0
        det_out[0] = m[0]
        return
    for i in range(d):
        for j in range(d):
            rr = 0
            for r in range(d):
                if r == i:
                    continue
                cc = 0
                for c in range(d):
                    if c == j:
                        continue
                    minor[rr * (d - 1) + cc] = m[r * d + c]
                    cc += 1
                rr += 1
            s = _det(minor, d - 1)
            if (i + j) % 2 == 1:
                s = -s
            # adjugate is the transposed cofactor matrix
            adj[j * d + i] = s
    det_out[0] = _det(m, d)


def adjugate_det(double[:, ::1] M):
    """Adjugate matrix and determinant of a square matrix, dim <= 8."""
    cdef int d = M.shape[0]
    if M.shape[1] != d:
        raise ValueError("matrix must be square")
    if d < 1 or d > MAX_DIM:
        raise ValueError(f"dimension {d} outside supported range 1..{MAX_DIM}")
    adj = np.empty((d, d), dtype=np.float64)
    cdef double[:, ::1] av = adj
    cdef double det = 0.0
    _adjugate_det(&M[0, 0], d, &av[0, 0], &det)
    return adj, det


def lti_euler_states(double[:, ::1] A, double[::1] b, double[::1] u,
                     double[::1] x0, double dt):
    """Forward-Euler state trajectory of x' = A x + b u.

    Returns the (N, n) array of states at the sample times; the state stored
    at row k is advanced with input u[k] afterwards.
    """
    cdef Py_ssize_t N = u.shape[0]
    cdef int n = A.shape[0]
    cdef Py_ssize_t k
    cdef int i, j
    cdef double acc
    if A.shape[1] != n or b.shape[0] != n or x0.shape[0] != n:
        raise ValueError("inconsistent system dimensions")
    out = np.empty((N, n), dtype=np.float64)
    xb = np.array(x0, dtype=np.float64, copy=True)
    dxb = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef double[::1] x = xb
    cdef double[::1] dx = dxb
    for k in range(N):
        for i in range(n):
            ov[k, i] = x[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + A[i, j] * x[j]
            dx[i] = acc + b[i] * u[k]
        for i in range(n):
            x[i] = x[i] + dt * dx[i]
    return out


def drem_mix_series(double[::1] z_bar, double[:, ::1] omega_bar, long long[::1] steps):
    """Delay-extend the regression and mix with the adjugate, per sample.

    Row 0 of the extended matrix is the current (z_bar, omega_bar) pair, row
    i the pair delayed by steps[i-1] samples. Rows whose delayed sample
    predates the series start are zero-filled and flag the sample invalid.
    Returns (omega, z, valid) where omega[k] is the determinant and z[k] the
    adjugate times the stacked z_bar values.
    """
    cdef Py_ssize_t N = z_bar.shape[0]
    cdef int q = omega_bar.shape[1]
    cdef int nd = steps.shape[0]
    cdef Py_ssize_t k
    cdef int i, r, c
    cdef long long s
    cdef bint complete
    cdef double acc, det
    cdef double Mbuf[MAX_DIM * MAX_DIM]
    cdef double adjbuf[MAX_DIM * MAX_DIM]
    cdef double zf[MAX_DIM]
    if omega_bar.shape[0] != N:
        raise ValueError("z_bar and omega_bar lengths differ")
    if nd + 1 != q:
        raise ValueError("need len(steps) + 1 == regression width")
    if q > MAX_DIM:
        raise ValueError(f"extended dimension {q} exceeds supported maximum {MAX_DIM}")
    for i in range(nd):
        if steps[i] <= 0:
            raise ValueError("delay steps must be positive")
    omega = np.zeros(N, dtype=np.float64)
    z = np.zeros((N, q), dtype=np.float64)
    valid = np.zeros(N, dtype=np.uint8)
    cdef double[::1] omv = omega
    cdef double[:, ::1] zv = z
    cdef unsigned char[::1] vv = valid
    for k in range(N):
        for c in range(q):
            Mbuf[c] = omega_bar[k, c]
        zf[0] = z_bar[k]
        complete = True
        for i in range(nd):
            s = steps[i]
            if k - s >= 0:
                for c in range(q):
                    Mbuf[(i + 1) * q + c] = omega_bar[k - s, c]
                zf[i + 1] = z_bar[k - s]
            else:
                for c in range(q):
                    Mbuf[(i + 1) * q + c] = 0.0
                zf[i + 1] = 0.0
                complete = False
        _adjugate_det(Mbuf, q, adjbuf, &det)
        omv[k] = det
        for r in range(q):
            acc = 0.0
            for c in range(q):
                acc = acc + adjbuf[r * q + c] * zf[c]
            zv[k, r] = acc
        vv[k] = 1 if complete else 0
    return omega, z, valid


def gradient_series(double[::1] coeff, double[::1] rho, double[:, ::1] target,
                    unsigned char[::1] active, double gamma, double dt,
                    double[::1] theta0):
    """Euler recursion theta <- theta - dt*gamma*coeff*(theta*rho - target).

    Samples with active[k] == 0 leave the estimate untouched. Returns the
    (N+1, d) trajectory; row k is the estimate at time t_start + k*dt, row 0
    being theta0.
    """
    cdef Py_ssize_t N = coeff.shape[0]
    cdef int d = target.shape[1]
    cdef Py_ssize_t k
    cdef int i
    cdef double s
    if rho.shape[0] != N or target.shape[0] != N or active.shape[0] != N:
        raise ValueError("series lengths differ")
    if theta0.shape[0] != d:
        raise ValueError("theta0 length differs from target width")
    traj = np.empty((N + 1, d), dtype=np.float64)
    thb = np.array(theta0, dtype=np.float64, copy=True)
    cdef double[:, ::1] tv = traj
    cdef double[::1] th = thb
    for i in range(d):
        tv[0, i] = th[i]
    for k in range(N):
        if active[k]:
            s = dt * gamma * coeff[k]
            for i in range(d):
                th[i] = th[i] - s * (th[i] * rho[k] - target[k, i])
        for i in range(d):
            tv[k + 1, i] = th[i]
    return traj
