"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same algorithms, same signatures, same return conventions.
"""
import numpy as np

NAME = "python"

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


def _generator(mats, coef, t):
    phi = coef[:, 0] + coef[:, 1] * t + coef[:, 2] * np.exp(-coef[:, 3] * t)
    return np.tensordot(phi, mats, axes=1)


def integrate_linear(mats, coef, y0, t_out, rtol, atol, h_init, max_steps):
    mats = np.asarray(mats, dtype=complex)
    coef = np.asarray(coef, dtype=float)
    t_out = np.asarray(t_out, dtype=float)
    y = np.array(y0, dtype=complex)
    n, m = y.size, t_out.size
    Y = np.zeros((m, n), dtype=complex)
    Y[0] = y
    t, h = float(t_out[0]), float(h_init)
    error_sum, steps, status = 0.0, 0, 0
    K = np.zeros((7, n), dtype=complex)
    K[0] = _generator(mats, coef, t) @ y
    for jout in range(1, m):
        target = t_out[jout]
        rejected = False
        while t < target:
            if steps >= max_steps:
                status = 2
                break
            clipped = h >= target - t
            h_saved = h
            h_used = target - t if clipped else h
            if h_used < 1e-14 * (1.0 + abs(t)):
                status = 1
                break
            for s in range(1, 6):
                ytmp = y + h_used * (np.asarray(A[s]) @ K[:s])
                K[s] = _generator(mats, coef, t + C[s] * h_used) @ ytmp
            ynew = y + h_used * (B @ K[:6])
            K[6] = _generator(mats, coef, t + h_used) @ ynew
            errvec = np.abs(h_used * (E @ K))
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
            err = float(np.max(errvec / scale))
            if err <= 1.0:
                steps += 1
                error_sum += float(errvec.max())
                t = target if clipped else t + h_used
                y = ynew
                K[0] = K[6]
                fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err**-0.2)
                if rejected:
                    fac = min(fac, 1.0)
                h = h_used * fac
                if clipped and h < h_saved and fac >= 1.0:
                    h = h_saved
                rejected = False
            else:
                h = h_used * max(0.2, 0.9 * err**-0.2)
                rejected = True
        if status:
            break
        Y[jout] = y
    return Y, steps, error_sum, status


def volterra_march(local, implicit_inv, effective, kernels, omega, alpha_end, source, rho0, h, nsteps):
    n = rho0.shape[0]
    rho = np.zeros((nsteps + 1, n), dtype=complex)
    rho[0] = rho0
    F = local @ rho0 + source
    for p in range(1, nsteps + 1):
        hist = alpha_end[:, p, None] * rho0[None, :]
        if p > 1:
            hist = hist + omega[:, p - 1:0:-1] @ rho[1:p]
        g = source + np.einsum("jil,jl->i", kernels, hist)
        rho[p] = implicit_inv @ (rho[p - 1] + 0.5 * h * (F + g))
        F = effective @ rho[p] + g
    return rho
