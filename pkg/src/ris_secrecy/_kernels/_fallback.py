"""NumPy implementations of the hot loops; used when the compiled module is absent.

Arithmetic follows the compiled kernels operation by operation so that both
backends return the same candidates.
"""
from __future__ import annotations

import math

import numpy as np


def lattice_size(lo: float, hi: float, step: float) -> int:
    """Number of points lo + k*step (k >= 0) not exceeding hi."""
    if hi < lo - 1e-9:
        return 0
    return int(math.floor((hi - lo) / step + 1e-9)) + 1


def first_index_at_least(anchor: float, lower: float, step: float) -> int:
    """Smallest k >= 0 with anchor + k*step >= lower (1e-9 slack)."""
    return max(0, int(math.ceil((lower - anchor) / step - 1e-9)))


def inner_scan(z, s, d, e, bounds, beta1, beta2, d_far, dsi_max, did_max, dsd,
               step, alpha_si, alpha_id, anchor_far, tie_last):
    """Best lattice candidate in the slab at height ``z``.

    Returns ``(found, g, x, y, pairs, candidates)`` where ``g`` is the lattice
    objective dsi**alpha_si * did**alpha_id of the chosen point, ``pairs`` the
    number of (d_SI, d_ID) lattice pairs visited and ``candidates`` the number
    of circle-intersection roots produced.
    """
    n_si = lattice_size(d_far, dsi_max, step)
    if n_si == 0:
        return False, math.inf, 0.0, 0.0, 0, 0
    k = np.arange(n_si)
    dsi = d_far + k * step
    lower = np.maximum(np.abs(dsd - dsi), d_far)
    if anchor_far:
        l0 = np.maximum(0, np.ceil((lower - d_far) / step - 1e-9)).astype(np.int64)
        base = np.full(n_si, d_far)
    else:
        l0 = np.zeros(n_si, dtype=np.int64)
        base = lower
    top = np.floor((did_max - (base + l0 * step)) / step + 1e-9).astype(np.int64)
    counts = np.where(did_max < base + l0 * step - 1e-9, 0, top + 1)
    counts = np.maximum(counts, 0)
    pairs = int(counts.sum())
    if pairs == 0:
        return False, math.inf, 0.0, 0.0, 0, 0

    # flatten the ragged (k, l) lattice in scan order
    kk = np.repeat(k, counts)
    offs = np.arange(pairs) - np.repeat(np.cumsum(counts) - counts, counts)
    ll = np.repeat(l0, counts) + offs
    r_si = dsi[kk]
    r_id = base[kk] + ll * step

    rs2 = r_si * r_si - (z - s[2]) ** 2
    rd2 = r_id * r_id - (z - d[2]) ** 2
    dx, dy = d[0] - s[0], d[1] - s[1]
    sep2 = dx * dx + dy * dy
    if sep2 == 0.0:
        return False, math.inf, 0.0, 0.0, pairs, 0
    sep = math.sqrt(sep2)
    along = (rs2 - rd2 + sep2) / (2.0 * sep)
    h2 = rs2 - along * along
    ok = (rs2 >= 0.0) & (rd2 >= 0.0)
    tiny = h2 < 0.0
    ok &= ~(tiny & (h2 < -1e-12 * np.maximum(rs2, 1.0)))
    h2 = np.where(tiny, 0.0, h2)
    h = np.sqrt(np.where(ok, h2, 0.0))
    mx = s[0] + along * dx / sep
    my = s[1] + along * dy / sep
    ox = -dy / sep * h
    oy = dx / sep * h
    single = h <= 0.5e-9

    # candidate roots in scan order: (+) root then (-) root of each pair
    xs = np.stack([mx + ox, mx - ox], axis=1).reshape(-1)
    ys = np.stack([my + oy, my - oy], axis=1).reshape(-1)
    valid = np.stack([ok, ok & ~single], axis=1).reshape(-1)
    xs = np.where(np.repeat(single, 2), np.repeat(mx, 2), xs)
    ys = np.where(np.repeat(single, 2), np.repeat(my, 2), ys)
    candidates = int(valid.sum())

    feas = valid & (xs >= bounds[0][0]) & (xs <= bounds[0][1])
    feas &= (ys >= bounds[1][0]) & (ys <= bounds[1][1])
    ex, ey, ez = xs - e[0], ys - e[1], z - e[2]
    feas &= ex * ex + ey * ey + ez * ez >= d_far * d_far
    c7 = beta1[0] * (xs - s[0]) + beta1[1] * (ys - s[1]) + beta1[2] * (z - s[2])
    c8 = beta2[0] * (xs - d[0]) + beta2[1] * (ys - d[1]) + beta2[2] * (z - d[2])
    feas &= (c7 > 0.0) & (c8 < 0.0)
    if not feas.any():
        return False, math.inf, 0.0, 0.0, pairs, candidates

    g_pair = np.power(r_si, alpha_si) * np.power(r_id, alpha_id)
    g = np.where(feas, np.repeat(g_pair, 2), np.inf)
    gmin = g.min()
    hits = np.flatnonzero(g == gmin)
    idx = int(hits[-1] if tie_last else hits[0])
    return True, float(gmin), float(xs[idx]), float(ys[idx]), pairs, candidates


def enumerate_q(first_vals, vals, n, h_sid, h_sie, base, f2, f3):
    """Maximise (base + f2|q.h_sid|^2) / (base + f3|q.h_sie|^2) over a finite grid.

    Element 0 takes values in ``first_vals``, every other element in ``vals``.
    Returns ``(F_best, index_tuple)``; ties keep the first index in
    lexicographic order.
    """
    first_vals = np.asarray(first_vals, dtype=complex)
    vals = np.asarray(vals, dtype=complex)
    sd = first_vals * h_sid[0]
    se = first_vals * h_sie[0]
    for m in range(1, n):
        sd = (sd[:, None] + vals[None, :] * h_sid[m]).reshape(-1)
        se = (se[:, None] + vals[None, :] * h_sie[m]).reshape(-1)
    num = base + f2 * (sd.real * sd.real + sd.imag * sd.imag)
    den = base + f3 * (se.real * se.real + se.imag * se.imag)
    F = num / den
    flat = int(np.argmax(F))
    shape = (first_vals.size,) + (vals.size,) * (n - 1)
    return float(F[flat]), tuple(int(i) for i in np.unravel_index(flat, shape))
