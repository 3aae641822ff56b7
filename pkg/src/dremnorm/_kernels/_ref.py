"""Pure-Python reference kernels, mirroring the compiled extension.

Kept deliberately close to the Cython code (same arithmetic order) so the
two backends agree within a few ulps; used as the fallback when the
extension is not built and as the baseline in benchmarks.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 8


def _det(m: list[float], d: int) -> float:
    if d == 1:
        return m[0]
    if d == 2:
        return m[0] * m[3] - m[1] * m[2]
    acc = 0.0
    sign = 1.0
    for j in range(d):
        minor = []
        for r in range(1, d):
            row = m[r * d : r * d + d]
            minor.extend(row[:j])
            minor.extend(row[j + 1 :])
        acc = acc + sign * m[j] * _det(minor, d - 1)
        sign = -sign
    return acc


def _adjugate_det_flat(m: list[float], d: int) -> tuple[list[float], float]:
    if d == 1:
        return [1.0], m[0]
    adj = [0.0] * (d * d)
    for i in range(d):
        for j in range(d):
            minor = []
            for r in range(d):
                if r == i:
                    continue
                row = m[r * d : r * d + d]
                minor.extend(row[:j])
                minor.extend(row[j + 1 :])
            s = _det(minor, d - 1)
            if (i + j) % 2 == 1:
                s = -s
            adj[j * d + i] = s
    return adj, _det(m, d)


def adjugate_det(M: np.ndarray) -> tuple[np.ndarray, float]:
    """Adjugate matrix and determinant of a square matrix, dim <= 8."""
    M = np.ascontiguousarray(M, dtype=np.float64)
    d = M.shape[0]
    if M.ndim != 2 or M.shape[1] != d:
        raise ValueError("matrix must be square")
    if d < 1 or d > MAX_DIM:
        raise ValueError(f"dimension {d} outside supported range 1..{MAX_DIM}")
    adj, det = _adjugate_det_flat([float(v) for v in M.ravel()], d)
    return np.array(adj, dtype=np.float64).reshape(d, d), det


def lti_euler_states(A, b, u, x0, dt):
    """Forward-Euler state trajectory of x' = A x + b u (see compiled twin)."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,) or np.shape(x0) != (n,):
        raise ValueError("inconsistent system dimensions")
    N = u.shape[0]
    out = np.empty((N, n), dtype=np.float64)
    x = np.array(x0, dtype=np.float64, copy=True)
    for k in range(N):
        out[k] = x
        x = x + dt * (A @ x + b * u[k])
    return out


def drem_mix_series(z_bar, omega_bar, steps):
    """Delay-extend and mix the regression per sample (see compiled twin)."""
    z_bar = np.asarray(z_bar, dtype=np.float64)
    omega_bar = np.asarray(omega_bar, dtype=np.float64)
    steps = [int(s) for s in steps]
    N = z_bar.shape[0]
    q = omega_bar.shape[1]
    if omega_bar.shape[0] != N:
        raise ValueError("z_bar and omega_bar lengths differ")
    if len(steps) + 1 != q:
        raise ValueError("need len(steps) + 1 == regression width")
    if q > MAX_DIM:
        raise ValueError(f"extended dimension {q} exceeds supported maximum {MAX_DIM}")
    if any(s <= 0 for s in steps):
        raise ValueError("delay steps must be positive")
    omega = np.zeros(N, dtype=np.float64)
    z = np.zeros((N, q), dtype=np.float64)
    valid = np.zeros(N, dtype=np.uint8)
    for k in range(N):
        m = list(omega_bar[k])
        zf = [float(z_bar[k])]
        complete = True
        for s in steps:
            if k - s >= 0:
                m.extend(omega_bar[k - s])
                zf.append(float(z_bar[k - s]))
            else:
                m.extend([0.0] * q)
                zf.append(0.0)
                complete = False
        adj, det = _adjugate_det_flat([float(v) for v in m], q)
        omega[k] = det
        for r in range(q):
            acc = 0.0
            for c in range(q):
                acc = acc + adj[r * q + c] * zf[c]
            z[k, r] = acc
        valid[k] = 1 if complete else 0
    return omega, z, valid


def gradient_series(coeff, rho, target, active, gamma, dt, theta0):
    """Euler gradient recursion (see compiled twin for the update law)."""
    coeff = np.asarray(coeff, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    active = np.asarray(active, dtype=np.uint8)
    N = coeff.shape[0]
    d = target.shape[1]
    if rho.shape[0] != N or target.shape[0] != N or active.shape[0] != N:
        raise ValueError("series lengths differ")
    if np.shape(theta0) != (d,):
        raise ValueError("theta0 length differs from target width")
    traj = np.empty((N + 1, d), dtype=np.float64)
    th = np.array(theta0, dtype=np.float64, copy=True)
    traj[0] = th
    for k in range(N):
        if active[k]:
            s = dt * gamma * coeff[k]
            th = th - s * (th * rho[k] - target[k])
        traj[k + 1] = th
    return traj
