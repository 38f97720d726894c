"""Compiled kernels for qubit games with one Kraus operator per branch.

A game is stored as a (4, 2) complex array ``G`` with orthonormal columns;
rows 0-1 are the winning Kraus operator, rows 2-3 the losing one.  The
long-run value is solved in Bloch coordinates, where a channel is the
affine map ``r -> T r + t`` on R^3, and its gradient comes from one
adjoint solve.  The optimizer works on 16 unconstrained reals per game,
mapped to ``G`` by Gram-Schmidt.
"""

import numpy as np
from numba import njit

DET_FLOOR = 1e-10


@njit(cache=True)
def _transfer(x00, x01, x10, x11, w, out):
    # out[k, l] += w/2 tr(tau_k X tau_l X^dagger), tau = (I, sx, sy, sz)
    c00 = np.conj(x00)
    c01 = np.conj(x01)
    c10 = np.conj(x10)
    c11 = np.conj(x11)
    for l in range(4):
        if l == 0:
            p, q, r, s = x00, x01, x10, x11
        elif l == 1:
            p, q, r, s = x01, x00, x11, x10
        elif l == 2:
            p, q, r, s = 1j * x01, -1j * x00, 1j * x11, -1j * x10
        else:
            p, q, r, s = x00, -x01, x10, -x11
        z00 = p * c00 + q * c01
        z01 = p * c10 + q * c11
        z10 = r * c00 + s * c01
        z11 = r * c10 + s * c11
        out[0, l] += 0.5 * w * (z00 + z11).real
        out[1, l] += 0.5 * w * (z01 + z10).real
        out[2, l] += 0.5 * w * (1j * (z01 - z10)).real
        out[3, l] += 0.5 * w * (z00 - z11).real


@njit(cache=True)
def _inverse3(a, inv):
    inv[0, 0] = a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    inv[0, 1] = a[0, 2] * a[2, 1] - a[0, 1] * a[2, 2]
    inv[0, 2] = a[0, 1] * a[1, 2] - a[0, 2] * a[1, 1]
    inv[1, 0] = a[1, 2] * a[2, 0] - a[1, 0] * a[2, 2]
    inv[1, 1] = a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
    inv[1, 2] = a[0, 2] * a[1, 0] - a[0, 0] * a[1, 2]
    inv[2, 0] = a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]
    inv[2, 1] = a[0, 1] * a[2, 0] - a[0, 0] * a[2, 1]
    inv[2, 2] = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    det = a[0, 0] * inv[0, 0] + a[0, 1] * inv[1, 0] + a[0, 2] * inv[2, 0]
    if det != 0.0:
        for i in range(3):
            for j in range(3):
                inv[i, j] /= det
    return det


@njit(cache=True)
def _apply_right(y00, y01, y10, y11, s00, s01, s10, s11):
    return (y00 * s00 + y01 * s10, y00 * s01 + y01 * s11,
            y10 * s00 + y11 * s10, y10 * s01 + y11 * s11)


@njit(cache=True)
def family_value(gs, weights, want_grad, grads):
    """Long-run win probability of a convex family of games.

    Parameters
    ----------
    gs : (m, 4, 2) complex array
        Each game's stacked Kraus pair.
    weights : (m,) float array
    want_grad : bool
    grads : (m, 4, 2) complex array
        On return holds Z with first-order change ``Re sum(conj(Z) dG)``.

    Returns
    -------
    float
        NaN when the mixed channel has no unique fixed point.
    """
    m = gs.shape[0]
    full = np.zeros((4, 4))
    win = np.zeros((4, 4))
    for g in range(m):
        G = gs[g]
        _transfer(G[0, 0], G[0, 1], G[1, 0], G[1, 1], weights[g], win)
        _transfer(G[2, 0], G[2, 1], G[3, 0], G[3, 1], weights[g], full)
    full += win
    a = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            a[i, j] = (1.0 if i == j else 0.0) - full[i + 1, j + 1]
    inv = np.empty((3, 3))
    det = _inverse3(a, inv)
    if not abs(det) > DET_FLOOR:
        return np.nan
    r = np.zeros(3)
    for i in range(3):
        for j in range(3):
            r[i] += inv[i, j] * full[j + 1, 0]
    value = win[0, 0]
    for k in range(3):
        value += win[0, k + 1] * r[k]
    if not want_grad:
        return value
    mu = np.zeros(3)
    for k in range(3):
        for j in range(3):
            mu[k] += win[0, j + 1] * inv[j, k]
    # sigma = (I + r.tau)/2 and the adjoint Lambda = mu.tau
    s00 = 0.5 * (1.0 + r[2])
    s01 = 0.5 * (r[0] - 1j * r[1])
    s10 = 0.5 * (r[0] + 1j * r[1])
    s11 = 0.5 * (1.0 - r[2])
    l00 = mu[2] + 0j
    l01 = mu[0] - 1j * mu[1]
    l10 = mu[0] + 1j * mu[1]
    l11 = -mu[2] + 0j
    for g in range(m):
        G = gs[g]
        for b in range(2):
            i = 2 * b
            y00 = l00 * G[i, 0] + l01 * G[i + 1, 0]
            y01 = l00 * G[i, 1] + l01 * G[i + 1, 1]
            y10 = l10 * G[i, 0] + l11 * G[i + 1, 0]
            y11 = l10 * G[i, 1] + l11 * G[i + 1, 1]
            if b == 0:
                y00 += G[0, 0]
                y01 += G[0, 1]
                y10 += G[1, 0]
                y11 += G[1, 1]
            z00, z01, z10, z11 = _apply_right(y00, y01, y10, y11,
                                              s00, s01, s10, s11)
            c = 2.0 * weights[g]
            grads[g, i, 0] = c * z00
            grads[g, i, 1] = c * z01
            grads[g, i + 1, 0] = c * z10
            grads[g, i + 1, 1] = c * z11
    return value


@njit(cache=True)
def params_to_game(x, G):
    """Gram-Schmidt 16 reals into a (4, 2) array with orthonormal columns.

    Returns the norms (|z|, |y'|) needed by ``pullback``.
    """
    nz = 0.0
    for i in range(4):
        G[i, 0] = x[i] + 1j * x[4 + i]
        nz += x[i] ** 2 + x[4 + i] ** 2
    nz = np.sqrt(nz)
    ov = 0j
    for i in range(4):
        G[i, 0] /= nz
        ov += np.conj(G[i, 0]) * (x[8 + i] + 1j * x[12 + i])
    ny = 0.0
    for i in range(4):
        G[i, 1] = x[8 + i] + 1j * x[12 + i] - ov * G[i, 0]
        ny += abs(G[i, 1]) ** 2
    ny = np.sqrt(ny)
    for i in range(4):
        G[i, 1] /= ny
    return nz, ny, ov


@njit(cache=True)
def pullback(x, G, nz, ny, ov, Z, out):
    """Chain the game-space gradient Z back to the 16 reals."""
    u = G[:, 0]
    v = G[:, 1]
    # v = y'/|y'|
    rv = 0.0
    for i in range(4):
        rv += (np.conj(v[i]) * Z[i, 1]).real
    ga = (Z[:, 1] - v * rv) / ny
    # y' = y - u (u^dagger y)
    ug = 0j
    for i in range(4):
        ug += np.conj(u[i]) * ga[i]
    gy = ga - u * ug
    y = np.empty(4, np.complex128)
    for i in range(4):
        y[i] = x[8 + i] + 1j * x[12 + i]
    gau = 0j
    for i in range(4):
        gau += np.conj(ga[i]) * u[i]
    zu = Z[:, 0] - ga * np.conj(ov) - y * gau
    ru = 0.0
    for i in range(4):
        ru += (np.conj(u[i]) * zu[i]).real
    gz = (zu - u * ru) / nz
    for i in range(4):
        out[i] = gz[i].real
        out[4 + i] = gz[i].imag
        out[8 + i] = gy[i].real
        out[12 + i] = gy[i].imag


@njit(cache=True)
def _merit(x, p, t1, t2, sign, l1, l2, mu, grad, vals):
    gs = np.empty((2, 4, 2), np.complex128)
    n1 = params_to_game(x[:16], gs[0])
    n2 = params_to_game(x[16:], gs[1])
    z1 = np.empty((1, 4, 2), np.complex128)
    z2 = np.empty((1, 4, 2), np.complex128)
    zc = np.empty((2, 4, 2), np.complex128)
    one = np.ones(1)
    v1 = family_value(gs[0:1], one, True, z1)
    v2 = family_value(gs[1:2], one, True, z2)
    vc = family_value(gs, np.array([p, 1.0 - p]), True, zc)
    vals[0] = v1
    vals[1] = v2
    vals[2] = vc
    c1 = v1 - t1
    c2 = v2 - t2
    phi = sign * vc + l1 * c1 + l2 * c2 + 0.5 * mu * (c1 * c1 + c2 * c2)
    if not np.isfinite(phi):
        return np.inf
    k1 = l1 + mu * c1
    k2 = l2 + mu * c2
    pullback(x[:16], gs[0], n1[0], n1[1], n1[2], sign * zc[0] + k1 * z1[0], grad[:16])
    pullback(x[16:], gs[1], n2[0], n2[1], n2[2], sign * zc[1] + k2 * z2[0], grad[16:])
    return phi


@njit(cache=True)
def _lbfgs(x, p, t1, t2, sign, l1, l2, mu, maxiter, vals):
    n = x.size
    mem = 8
    S = np.zeros((mem, n))
    Y = np.zeros((mem, n))
    rho = np.zeros(mem)
    alpha = np.zeros(mem)
    g = np.empty(n)
    gn = np.empty(n)
    vn = np.empty(3)
    f = _merit(x, p, t1, t2, sign, l1, l2, mu, g, vals)
    if not np.isfinite(f):
        return f
    k = 0
    stall = 0
    for it in range(maxiter):
        # two-loop recursion
        d = -g.copy()
        used = min(k, mem)
        for j in range(used):
            idx = (k - 1 - j) % mem
            alpha[idx] = rho[idx] * np.dot(S[idx], d)
            d -= alpha[idx] * Y[idx]
        if used > 0:
            last = (k - 1) % mem
            d *= np.dot(S[last], Y[last]) / np.dot(Y[last], Y[last])
        else:
            d *= min(1.0, 0.1 / max(np.max(np.abs(g)), 1e-300))
        for j in range(used - 1, -1, -1):
            idx = (k - 1 - j) % mem
            beta = rho[idx] * np.dot(Y[idx], d)
            d += (alpha[idx] - beta) * S[idx]
        slope = np.dot(g, d)
        if slope >= 0.0:
            d = -g
            slope = -np.dot(g, g)
            k = 0
        step = 1.0
        accepted = False
        for _ in range(40):
            xn = x + step * d
            fn = _merit(xn, p, t1, t2, sign, l1, l2, mu, gn, vn)
            if fn <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        s = xn - x
        yv = gn - g
        sy = np.dot(s, yv)
        if sy > 1e-12 * np.sqrt(np.dot(s, s) * np.dot(yv, yv)):
            idx = k % mem
            S[idx] = s
            Y[idx] = yv
            rho[idx] = 1.0 / sy
            k += 1
        if f - fn <= 1e-15 * max(1.0, abs(f)):
            stall += 1
        else:
            stall = 0
        x[:] = xn
        g[:] = gn
        f = fn
        vals[:] = vn
        if stall >= 5 or np.max(np.abs(g)) < 1e-11:
            break
    return f


@njit(cache=True)
def _renormalize(x):
    G = np.empty((4, 2), np.complex128)
    for h in range(2):
        params_to_game(x[16 * h:16 * h + 16], G)
        for i in range(4):
            x[16 * h + i] = G[i, 0].real
            x[16 * h + 4 + i] = G[i, 0].imag
            x[16 * h + 8 + i] = G[i, 1].real
            x[16 * h + 12 + i] = G[i, 1].imag


@njit(cache=True)
def restore(G, target, steps):
    """Newton steps in game space onto ``value == target``; G is modified."""
    one = np.ones(1)
    gs = np.empty((1, 4, 2), np.complex128)
    Z = np.empty((1, 4, 2), np.complex128)
    gs[0] = G
    val = np.nan
    for _ in range(steps):
        val = family_value(gs, one, True, Z)
        if not np.isfinite(val):
            return val
        c = val - target
        if abs(c) < 1e-14:
            break
        # tangent part of Z at G
        A = np.conj(gs[0].T) @ Z[0]
        d = Z[0] - gs[0] @ (0.5 * (A + np.conj(A.T)))
        nrm = np.sum(np.abs(d) ** 2)
        if nrm < 1e-300:
            break
        H = gs[0] - (c / nrm) * d
        x = np.empty(16)
        for i in range(4):
            x[i] = H[i, 0].real
            x[4 + i] = H[i, 0].imag
            x[8 + i] = H[i, 1].real
            x[12 + i] = H[i, 1].imag
        params_to_game(x, gs[0])
    G[:] = gs[0]
    return family_value(gs, one, False, Z)


@njit(cache=True)
def solve_restart(x, p, t1, t2, sign, mus, maxiter, out_games):
    """Augmented-Lagrangian run for one start ``x`` (32 reals).

    Writes the two games into ``out_games`` and returns
    (value1, value2, mixed value).
    """
    vals = np.full(3, np.nan)
    l1 = 0.0
    l2 = 0.0
    for mu in mus:
        f = _lbfgs(x, p, t1, t2, sign, l1, l2, mu, maxiter, vals)
        if not np.isfinite(f):
            return np.nan, np.nan, np.nan
        l1 += mu * (vals[0] - t1)
        l2 += mu * (vals[1] - t2)
        _renormalize(x)
    params_to_game(x[:16], out_games[0])
    params_to_game(x[16:], out_games[1])
    v1 = restore(out_games[0], t1, 60)
    v2 = restore(out_games[1], t2, 60)
    Z = np.empty((2, 4, 2), np.complex128)
    vc = family_value(out_games, np.array([p, 1.0 - p]), False, Z)
    return v1, v2, vc
