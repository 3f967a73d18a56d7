"""Compiled inner loops.

Window sums are indexed by their left cell ``s``: ``W(s)`` integrates the
signal over cells ``s .. s+N-1`` (``N = 2**(k - k_min)``), reading zeros
outside ``0 .. n-1``.  ``W`` only changes where ``s`` or ``s + N`` lies in
``[0, n]``; on the stretches in between it is constant, so every scan walks
"runs" (single active positions or constant stretches) instead of raw
positions.  That keeps all passes O(n) per scale however large ``N`` is.

Offsets are reported in cell units ``a / h``.  On the real line the
breakpoints of the offset-to-sum map sit at half-integers (aligned windows),
with the two interval endpoints ``a = 0`` and ``a = N`` in addition.
"""
import numpy as np
from numba import njit

_CACHE = True


@njit(cache=_CACHE, inline="always")
def _pref(P, n, i):
    if i <= 0:
        return P[0]
    if i >= n:
        return P[n]
    return P[i]


@njit(cache=_CACHE, inline="always")
def wsum(P, n, s, N):
    return _pref(P, n, s + N) - _pref(P, n, s)


@njit(cache=_CACHE, inline="always")
def _run_end(pos, n, N, smax):
    if (0 <= pos <= n) or (-N <= pos <= n - N):
        return pos
    nxt = smax + 1
    if pos < 0 and 0 < nxt:
        nxt = 0
    if pos < -N and -N < nxt:
        nxt = -N
    end = nxt - 1
    return end if end < smax else smax


@njit(cache=_CACHE, inline="always")
def _endpoint_sums(P, n, N, c):
    # a = 0 is halfway between W(c) and W(c+1); a = N between W(c-N+1) and W(c-N)
    e0 = 0.5 * (wsum(P, n, c, N) + wsum(P, n, c + 1, N))
    e1 = 0.5 * (wsum(P, n, c - N + 1, N) + wsum(P, n, c - N, N))
    return e0, e1


@njit(cache=_CACHE, nogil=True)
def extrema_deque(P, n, N, real):
    """Sliding max/min of ``W`` over the offsets admissible at every cell."""
    width = N - 1 if real else N
    smin = -width
    smax = n - 1
    cap = 4 * n + 8
    rs = np.empty(cap, np.int64)
    re = np.empty(cap, np.int64)
    rv = np.empty(cap, np.float64)
    nr = 0
    pos = smin
    while pos <= smax:
        end = _run_end(pos, n, N, smax)
        rs[nr] = pos
        re[nr] = end
        rv[nr] = wsum(P, n, pos, N)
        nr += 1
        pos = end + 1

    qmax = np.empty(nr, np.int64)
    qmin = np.empty(nr, np.int64)
    hmax = 0
    tmax = 0
    hmin = 0
    tmin = 0
    nxt = 0
    vmax = np.empty(n)
    vmin = np.empty(n)
    amax = np.empty(n)
    amin = np.empty(n)
    for c in range(n):
        lo = c - width
        while nxt < nr and rs[nxt] <= c:
            v = rv[nxt]
            while tmax > hmax and rv[qmax[tmax - 1]] <= v:
                tmax -= 1
            qmax[tmax] = nxt
            tmax += 1
            while tmin > hmin and rv[qmin[tmin - 1]] >= v:
                tmin -= 1
            qmin[tmin] = nxt
            tmin += 1
            nxt += 1
        while re[qmax[hmax]] < lo:
            hmax += 1
        while re[qmin[hmin]] < lo:
            hmin += 1
        i = qmax[hmax]
        j = qmin[hmin]
        s_hi = rs[i] if rs[i] > lo else lo
        s_lo = rs[j] if rs[j] > lo else lo
        vmax[c] = rv[i]
        vmin[c] = rv[j]
        if real:
            amax[c] = c - s_hi + 0.5
            amin[c] = c - s_lo + 0.5
            e0, e1 = _endpoint_sums(P, n, N, c)
            if e0 > vmax[c]:
                vmax[c] = e0
                amax[c] = 0.0
            if e1 > vmax[c]:
                vmax[c] = e1
                amax[c] = float(N)
            if e0 < vmin[c]:
                vmin[c] = e0
                amin[c] = 0.0
            if e1 < vmin[c]:
                vmin[c] = e1
                amin[c] = float(N)
        else:
            amax[c] = float(c - s_hi)
            amin[c] = float(c - s_lo)
    return vmax, vmin, amax, amin


@njit(cache=_CACHE, nogil=True)
def extrema_scan(P, n, N, cells, real):
    """Same extrema as :func:`extrema_deque`, by a direct walk per requested cell."""
    width = N - 1 if real else N
    m = cells.size
    vmax = np.empty(m)
    vmin = np.empty(m)
    amax = np.empty(m)
    amin = np.empty(m)
    for t in range(m):
        c = cells[t]
        lo = c - width
        pos = lo
        best_hi = -np.inf
        best_lo = np.inf
        s_hi = lo
        s_lo = lo
        while pos <= c:
            end = _run_end(pos, n, N, c)
            v = wsum(P, n, pos, N)
            if v > best_hi:
                best_hi = v
                s_hi = pos
            if v < best_lo:
                best_lo = v
                s_lo = pos
            pos = end + 1
        vmax[t] = best_hi
        vmin[t] = best_lo
        if real:
            amax[t] = c - s_hi + 0.5
            amin[t] = c - s_lo + 0.5
            e0, e1 = _endpoint_sums(P, n, N, c)
            if e0 > vmax[t]:
                vmax[t] = e0
                amax[t] = 0.0
            if e1 > vmax[t]:
                vmax[t] = e1
                amax[t] = float(N)
            if e0 < vmin[t]:
                vmin[t] = e0
                amin[t] = 0.0
            if e1 < vmin[t]:
                vmin[t] = e1
                amin[t] = float(N)
        else:
            amax[t] = float(c - s_hi)
            amin[t] = float(c - s_lo)
    return vmax, vmin, amax, amin


@njit(cache=_CACHE, nogil=True)
def nearest_scan(P, n, N, cells, targets):
    """Integer line: the admissible window sum closest to each target."""
    m = cells.size
    best = np.empty(m)
    off = np.empty(m)
    for t in range(m):
        c = cells[t]
        lo = c - N
        pos = lo
        dist = np.inf
        while pos <= c:
            end = _run_end(pos, n, N, c)
            v = wsum(P, n, pos, N)
            d = abs(v - targets[t])
            if d < dist:
                dist = d
                best[t] = v
                off[t] = float(c - pos)
            pos = end + 1
    return best, off


@njit(cache=_CACHE, inline="always")
def _breakpoint(P, n, N, c, b, real):
    # (offset in cell units, window sum) of breakpoint b
    if not real:
        return float(b), wsum(P, n, c - b, N)
    if b == 0:
        return 0.0, 0.5 * (wsum(P, n, c, N) + wsum(P, n, c + 1, N))
    if b == N + 1:
        return float(N), 0.5 * (wsum(P, n, c - N + 1, N) + wsum(P, n, c - N, N))
    return b - 0.5, wsum(P, n, c - b + 1, N)


@njit(cache=_CACHE, nogil=True)
def crossing_offsets(P, n, N, cells, targets, b_below, b_above):
    """Real line: an offset whose window sum equals ``targets[t]``.

    ``b_below``/``b_above`` are breakpoint indices with sums on either side of
    the target; bisection on the index finds an adjacent bracketing pair and
    the crossing is solved on that linear piece.
    """
    m = cells.size
    out = np.empty(m)
    for t in range(m):
        c = cells[t]
        y = targets[t]
        lo = b_below[t]
        hi = b_above[t]
        while abs(hi - lo) > 1:
            mid = lo + (hi - lo) // 2
            _, vm = _breakpoint(P, n, N, c, mid, True)
            if vm <= y:
                lo = mid
            else:
                hi = mid
        a0, v0 = _breakpoint(P, n, N, c, lo, True)
        a1, v1 = _breakpoint(P, n, N, c, hi, True)
        if v1 == v0:
            out[t] = a0
        else:
            frac = (y - v0) / (v1 - v0)
            if frac < 0.0:
                frac = 0.0
            elif frac > 1.0:
                frac = 1.0
            out[t] = a0 + frac * (a1 - a0)
    return out


@njit(cache=_CACHE, inline="always")
def _pair_diff(P, n, N, cx, cc, mm):
    return wsum(P, n, cx - mm, N) - wsum(P, n, cc - mm, N)


@njit(cache=_CACHE, nogil=True)
def translation_sup(P, n, N, cc, cxs, real):
    """``sup_a |W_x(a) - W_c(a)|`` for a shared offset ``a``, per point ``x``.

    Both maps are piecewise linear with the same breakpoints, so the
    difference peaks at a breakpoint.  Only breakpoints where one of the two
    sums is active can differ from their neighbours; each constant stretch
    in between contributes one representative.
    """
    mmax = N - 1 if real else N
    out = np.empty(cxs.size)
    for t in range(cxs.size):
        cx = cxs[t]
        best = 0.0
        for base in (cx, cc):
            for r in range(2):
                if r == 0:
                    a = base - n
                    b = base
                else:
                    a = base - n + N
                    b = base + N
                if a < 0:
                    a = 0
                if b > mmax:
                    b = mmax
                if a <= b:
                    for mm in range(a, b + 1):
                        d = abs(_pair_diff(P, n, N, cx, cc, mm))
                        if d > best:
                            best = d
                # representative of the stretch following this range
                rep = b + 1
                if 0 <= rep <= mmax:
                    d = abs(_pair_diff(P, n, N, cx, cc, rep))
                    if d > best:
                        best = d
        d = abs(_pair_diff(P, n, N, cx, cc, 0))
        if d > best:
            best = d
        if real:
            e0x, e1x = _endpoint_sums(P, n, N, cx)
            e0c, e1c = _endpoint_sums(P, n, N, cc)
            if abs(e0x - e0c) > best:
                best = abs(e0x - e0c)
            if abs(e1x - e1c) > best:
                best = abs(e1x - e1c)
        out[t] = best
    return out
