# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the lattice scan and the exhaustive reflect-vector search."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, floor, ceil, fabs, INFINITY

cnp.import_array()


cdef inline long lattice_count(double lo, double hi, double step):
    if hi < lo - 1e-9:
        return 0
    return <long>floor((hi - lo) / step + 1e-9) + 1


def inner_scan(double z, s, d, e, bounds, beta1, beta2, double d_far,
               double dsi_max, double did_max, double dsd, double step,
               double alpha_si, double alpha_id, bint anchor_far, bint tie_last):
    cdef double sx = s[0], sy = s[1], sz = s[2]
    cdef double dx0 = d[0], dy0 = d[1], dz = d[2]
    cdef double ex0 = e[0], ey0 = e[1], ez0 = e[2]
    cdef double xlo = bounds[0][0], xhi = bounds[0][1]
    cdef double ylo = bounds[1][0], yhi = bounds[1][1]
    cdef double b10 = beta1[0], b11 = beta1[1], b12 = beta1[2]
    cdef double b20 = beta2[0], b21 = beta2[1], b22 = beta2[2]
    cdef long n_si = lattice_count(d_far, dsi_max, step)
    cdef long k, l, l0, cnt, pairs = 0, cands = 0
    cdef int r, nroots
    cdef double dsi, did, base, lower, rs2, rd2, along, h2, h, mx, my, ox, oy
    cdef double x, y, ex, ey, ez, c7, c8, g, gpair
    cdef double dxs = dx0 - sx, dys = dy0 - sy
    cdef double sep2 = dxs * dxs + dys * dys, sep
    cdef double best = INFINITY, bx = 0.0, by = 0.0
    cdef bint found = False
    if n_si == 0:
        return False, INFINITY, 0.0, 0.0, 0, 0
    sep = sqrt(sep2)
    ez = z - ez0
    for k in range(n_si):
        dsi = d_far + k * step
        lower = fabs(dsd - dsi)
        if lower < d_far:
            lower = d_far
        if anchor_far:
            l0 = <long>ceil((lower - d_far) / step - 1e-9)
            if l0 < 0:
                l0 = 0
            base = d_far
        else:
            l0 = 0
            base = lower
        if did_max < base + l0 * step - 1e-9:
            continue
        cnt = <long>floor((did_max - (base + l0 * step)) / step + 1e-9) + 1
        if cnt <= 0:
            continue
        pairs += cnt
        if sep2 == 0.0:
            continue
        rs2 = dsi * dsi - (z - sz) * (z - sz)
        if rs2 < 0.0:
            continue
        for l in range(l0, l0 + cnt):
            did = base + l * step
            rd2 = did * did - (z - dz) * (z - dz)
            if rd2 < 0.0:
                continue
            along = (rs2 - rd2 + sep2) / (2.0 * sep)
            h2 = rs2 - along * along
            if h2 < 0.0:
                if h2 < -1e-12 * (rs2 if rs2 > 1.0 else 1.0):
                    continue
                h2 = 0.0
            h = sqrt(h2)
            mx = sx + along * dxs / sep
            my = sy + along * dys / sep
            ox = -dys / sep * h
            oy = dxs / sep * h
            nroots = 1 if h <= 0.5e-9 else 2
            cands += nroots
            gpair = pow(dsi, alpha_si) * pow(did, alpha_id)
            for r in range(nroots):
                if nroots == 1:
                    x = mx
                    y = my
                elif r == 0:
                    x = mx + ox
                    y = my + oy
                else:
                    x = mx - ox
                    y = my - oy
                if x < xlo or x > xhi or y < ylo or y > yhi:
                    continue
                ex = x - ex0
                ey = y - ey0
                if ex * ex + ey * ey + ez * ez < d_far * d_far:
                    continue
                c7 = b10 * (x - sx) + b11 * (y - sy) + b12 * (z - sz)
                c8 = b20 * (x - dx0) + b21 * (y - dy0) + b22 * (z - dz)
                if not (c7 > 0.0 and c8 < 0.0):
                    continue
                g = gpair
                if g < best or (tie_last and g == best):
                    best = g
                    bx = x
                    by = y
                    found = True
    if not found:
        return False, INFINITY, 0.0, 0.0, pairs, cands
    return True, best, bx, by, pairs, cands


def enumerate_q(first_vals, vals, int n, h_sid, h_sie, double base, double f2, double f3):
    cdef cnp.complex128_t[::1] v0 = np.ascontiguousarray(first_vals, dtype=np.complex128)
    cdef cnp.complex128_t[::1] v = np.ascontiguousarray(vals, dtype=np.complex128)
    cdef cnp.complex128_t[::1] hd = np.ascontiguousarray(h_sid, dtype=np.complex128)
    cdef cnp.complex128_t[::1] he = np.ascontiguousarray(h_sie, dtype=np.complex128)
    cdef Py_ssize_t L0 = v0.shape[0], L = v.shape[0]
    cdef Py_ssize_t total, flat, best_flat = 0, rem, m
    cdef Py_ssize_t idx[64]
    cdef double complex sd, se, t
    cdef double F, best = -INFINITY, num, den
    if n < 1 or n > 64:
        raise ValueError("enumerate_q supports 1 <= n <= 64")
    total = L0
    for m in range(1, n):
        total *= L
    for flat in range(total):
        rem = flat
        for m in range(n - 1, 0, -1):
            idx[m] = rem % L
            rem //= L
        idx[0] = rem
        sd = v0[idx[0]] * hd[0]
        se = v0[idx[0]] * he[0]
        for m in range(1, n):
            t = v[idx[m]]
            sd = sd + t * hd[m]
            se = se + t * he[m]
        num = base + f2 * (sd.real * sd.real + sd.imag * sd.imag)
        den = base + f3 * (se.real * se.real + se.imag * se.imag)
        F = num / den
        if F > best:
            best = F
            best_flat = flat
    out = []
    rem = best_flat
    for m in range(n - 1, 0, -1):
        out.append(rem % L)
        rem //= L
    out.append(rem)
    return best, tuple(reversed(out))
