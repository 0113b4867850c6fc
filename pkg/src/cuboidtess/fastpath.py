"""Compiled batch engine for integer-lattice configurations.

Computes, for many configurations at once, the maximal co-spherical cells,
their canonical shape codes and the circumcenter verdict.  Everything is
int64 arithmetic on the lattice form (coordinates up to a few dozen units, so
no determinant comes near overflow; a guard rejects inputs that could).

Cells are built by pivoting across faces: starting from one empty sphere,
each face of a known cell that is not on the hull is crossed by sweeping the
pencil of spheres through the face's circle until the first input point is
met.  The canonical code is the same breadth-first encoding as
:func:`cuboidtess.catalog.canonical_code`, so codes are interchangeable
with the pure-Python path (checked in the test suite).
"""

from __future__ import annotations

import numpy as np
from numba import njit

MAXP = 24  # points per configuration
MAXC = 96  # cells per configuration
MAXF = 40  # faces per cell
MAXD = 160  # darts per cell
CODE_W = 256  # bytes per canonical code

# error flags returned per configuration
OK = 0
ERR_NO_START = 1
ERR_OVERFLOW = 2
ERR_VOLUME = 3
ERR_CAPACITY = 4


@njit(cache=True)
def _orient(P, a, b, c, d):
    ux = P[b, 0] - P[a, 0]
    uy = P[b, 1] - P[a, 1]
    uz = P[b, 2] - P[a, 2]
    vx = P[c, 0] - P[a, 0]
    vy = P[c, 1] - P[a, 1]
    vz = P[c, 2] - P[a, 2]
    wx = P[d, 0] - P[a, 0]
    wy = P[d, 1] - P[a, 1]
    wz = P[d, 2] - P[a, 2]
    det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


@njit(cache=True)
def _vol6(P, a, b, c, d):
    ux = P[b, 0] - P[a, 0]
    uy = P[b, 1] - P[a, 1]
    uz = P[b, 2] - P[a, 2]
    vx = P[c, 0] - P[a, 0]
    vy = P[c, 1] - P[a, 1]
    vz = P[c, 2] - P[a, 2]
    wx = P[d, 0] - P[a, 0]
    wy = P[d, 1] - P[a, 1]
    wz = P[d, 2] - P[a, 2]
    return ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)


@njit(cache=True)
def _insph(P, W, a, b, c, d, e):
    """+1 if e is strictly inside the sphere through a, b, c, d (any orientation)."""
    o = _orient(P, a, b, c, d)
    ex = P[e, 0]
    ey = P[e, 1]
    ez = P[e, 2]
    ax = P[a, 0] - ex
    ay = P[a, 1] - ey
    az = P[a, 2] - ez
    bx = P[b, 0] - ex
    by = P[b, 1] - ey
    bz = P[b, 2] - ez
    cx = P[c, 0] - ex
    cy = P[c, 1] - ey
    cz = P[c, 2] - ez
    dx = P[d, 0] - ex
    dy = P[d, 1] - ey
    dz = P[d, 2] - ez
    ab = ax * by - bx * ay
    bc = bx * cy - cx * by
    cd = cx * dy - dx * cy
    da = dx * ay - ax * dy
    ac = ax * cy - cx * ay
    bd = bx * dy - dx * by
    abc = az * bc - bz * ac + cz * ab
    bcd = bz * cd - cz * bd + dz * bc
    cda = cz * da + dz * ac + az * cd
    dab = dz * ab + az * bd + bz * da
    al = W[0] * ax * ax + W[1] * ay * ay + W[2] * az * az
    bl = W[0] * bx * bx + W[1] * by * by + W[2] * bz * bz
    cl = W[0] * cx * cx + W[1] * cy * cy + W[2] * cz * cz
    dl = W[0] * dx * dx + W[1] * dy * dy + W[2] * dz * dz
    det = (dl * abc - cl * dab) + (bl * cda - al * bcd)
    s = 0
    if det < 0:
        s = 1
    elif det > 0:
        s = -1
    return s * o


@njit(cache=True)
def _less(P, i, j):
    for k in range(3):
        if P[i, k] != P[j, k]:
            return P[i, k] < P[j, k]
    return False


@njit(cache=True)
def _cell_faces(P, verts, nv, fverts, flen):
    """Hull faces of the points ``verts[:nv]`` as CCW cycles seen from outside."""
    nf = 0
    masks = np.zeros(MAXF, dtype=np.int64)
    on = np.zeros(MAXP, dtype=np.int64)
    for i in range(nv):
        for j in range(i + 1, nv):
            for k in range(j + 1, nv):
                a = verts[i]
                b = verts[j]
                c = verts[k]
                pos = 0
                neg = 0
                mask = 0
                behind = -1
                non = 0
                for m in range(nv):
                    q = verts[m]
                    s = _orient(P, a, b, c, q)
                    if s > 0:
                        pos += 1
                        behind = q
                    elif s < 0:
                        neg += 1
                        behind = q
                    else:
                        mask |= 1 << q
                        on[non] = q
                        non += 1
                if (pos > 0 and neg > 0) or (pos == 0 and neg == 0):
                    continue
                dup = False
                for t in range(nf):
                    if masks[t] == mask:
                        dup = True
                        break
                if dup:
                    continue
                if nf >= MAXF:
                    return -1
                masks[nf] = mask
                # gift wrap: q is left of cur -> nxt iff orient(cur, nxt, q, behind) < 0
                start = on[0]
                for t in range(1, non):
                    if _less(P, on[t], start):
                        start = on[t]
                cur = start
                cnt = 0
                while True:
                    fverts[nf, cnt] = cur
                    cnt += 1
                    nxt = -1
                    for t in range(non):
                        q = on[t]
                        if q == cur:
                            continue
                        if nxt < 0:
                            nxt = q
                        elif _orient(P, cur, nxt, q, behind) > 0:
                            nxt = q
                    if nxt == start or cnt > non:
                        break
                    cur = nxt
                flen[nf] = cnt
                nf += 1
    return nf


@njit(cache=True)
def _face_label(P, W, fverts, f, n):
    if n != 4:
        return n if n != 3 else 3
    for i in range(4):
        a = fverts[f, i]
        b = fverts[f, (i + 1) % 4]
        c = fverts[f, (i + 2) % 4]
        d = 0
        for k in range(3):
            d += W[k] * (P[b, k] - P[a, k]) * (P[c, k] - P[b, k])
        if d != 0:
            return 4
    return 1


@njit(cache=True)
def _canonical(P, W, fverts, flen, nf, code):
    """Canonical code into ``code``; returns its length."""
    # local numbering of vertices
    loc = -np.ones(MAXP, dtype=np.int64)
    nv = 0
    for f in range(nf):
        for i in range(flen[f]):
            v = fverts[f, i]
            if loc[v] < 0:
                loc[v] = nv
                nv += 1
    dart = -np.ones((MAXP, MAXP), dtype=np.int64)
    du = np.zeros(MAXD, dtype=np.int64)
    dv = np.zeros(MAXD, dtype=np.int64)
    left = np.zeros(MAXD, dtype=np.int64)
    rot = np.zeros(MAXD, dtype=np.int64)
    inv = np.zeros(MAXD, dtype=np.int64)
    lab = np.zeros(MAXF, dtype=np.int64)
    nd = 0
    for f in range(nf):
        lab[f] = _face_label(P, W, fverts, f, flen[f])
        n = flen[f]
        for i in range(n):
            u = loc[fverts[f, i]]
            v = loc[fverts[f, (i + 1) % n]]
            dart[u, v] = nd
            du[nd] = u
            dv[nd] = v
            left[nd] = f
            nd += 1
    for f in range(nf):
        n = flen[f]
        for i in range(n):
            p = loc[fverts[f, (i - 1) % n]]
            u = loc[fverts[f, i]]
            v = loc[fverts[f, (i + 1) % n]]
            rot[dart[u, v]] = dart[u, p]
    for d in range(nd):
        inv[rot[d]] = d
    best_len = -1
    cur = np.zeros(CODE_W, dtype=np.int64)
    num = np.zeros(MAXP, dtype=np.int64)
    order = np.zeros(MAXP, dtype=np.int64)
    ref = np.zeros(MAXP, dtype=np.int64)
    nbrs = np.zeros(MAXP, dtype=np.int64)
    fl = np.zeros(MAXP, dtype=np.int64)
    for start in range(nd):
        for mirror in range(2):
            for t in range(nv):
                num[t] = -1
            u0 = du[start]
            num[u0] = 0
            order[0] = u0
            ref[u0] = dv[start]
            norder = 1
            pos = 1
            cur[0] = 0  # vertex count, patched at the end (always nv)
            state = 0  # 0: equal to best so far, -1: already smaller
            if best_len >= 0:
                if nv > code[0]:
                    continue
            aborted = False
            i = 0
            while i < norder:
                x = order[i]
                i += 1
                first = dart[x, ref[x]]
                d = first
                deg = 0
                while True:
                    y = dv[d]
                    if num[y] < 0:
                        num[y] = norder
                        order[norder] = y
                        norder += 1
                        ref[y] = x
                    nbrs[deg] = num[y]
                    if mirror == 1:
                        fl[deg] = lab[left[dart[y, x]]]
                    else:
                        fl[deg] = lab[left[d]]
                    deg += 1
                    if mirror == 1:
                        d = inv[d]
                    else:
                        d = rot[d]
                    if d == first:
                        break
                # append chunk [deg] + nbrs + fl with on-the-fly comparison
                for t in range(1 + 2 * deg):
                    if t == 0:
                        val = deg
                    elif t <= deg:
                        val = nbrs[t - 1]
                    else:
                        val = fl[t - 1 - deg]
                    cur[pos] = val
                    if best_len >= 0 and state == 0:
                        if val > code[pos]:
                            aborted = True
                            break
                        if val < code[pos]:
                            state = -1
                    pos += 1
                if aborted:
                    break
            if aborted:
                continue
            cur[0] = norder
            if best_len < 0 or state == -1:
                for t in range(pos):
                    code[t] = cur[t]
                best_len = pos
    return best_len


@njit(cache=True)
def _cells(P, W, n, cell_masks):
    """Maximal empty-sphere cells of the first ``n`` points, as bitmasks."""
    # a first empty sphere
    start = -1
    sa = sb = sc = sd = 0
    for a in range(n):
        if start >= 0:
            break
        for b in range(a + 1, n):
            if start >= 0:
                break
            for c in range(b + 1, n):
                if start >= 0:
                    break
                for d in range(c + 1, n):
                    if _orient(P, a, b, c, d) == 0:
                        continue
                    empty = True
                    for e in range(n):
                        if _insph(P, W, a, b, c, d, e) > 0:
                            empty = False
                            break
                    if empty:
                        start = 0
                        sa, sb, sc, sd = a, b, c, d
                        break
    if start < 0:
        return -ERR_NO_START
    mask = 0
    for e in range(n):
        if _insph(P, W, sa, sb, sc, sd, e) == 0:
            mask |= 1 << e
    cell_masks[0] = mask
    ncell = 1
    verts = np.zeros(MAXP, dtype=np.int64)
    fverts = np.zeros((MAXF, MAXP), dtype=np.int64)
    flen = np.zeros(MAXF, dtype=np.int64)
    ci = 0
    while ci < ncell:
        m = cell_masks[ci]
        nv = 0
        for e in range(n):
            if m >> e & 1:
                verts[nv] = e
                nv += 1
        nf = _cell_faces(P, verts, nv, fverts, flen)
        if nf < 0:
            return -ERR_CAPACITY
        for f in range(nf):
            a = fverts[f, 0]
            b = fverts[f, 1]
            c = fverts[f, 2]
            q = -1
            for r in range(n):
                if _orient(P, a, b, c, r) > 0:
                    if q < 0 or _insph(P, W, a, b, c, q, r) > 0:
                        q = r
            if q < 0:
                continue  # hull face
            nm = 0
            for e in range(n):
                if _insph(P, W, a, b, c, q, e) == 0:
                    nm |= 1 << e
            seen = False
            for t in range(ncell):
                if cell_masks[t] == nm:
                    seen = True
                    break
            if not seen:
                if ncell >= MAXC:
                    return -ERR_CAPACITY
                cell_masks[ncell] = nm
                ncell += 1
        ci += 1
    return ncell


@njit(cache=True)
def _center_inside(P, W, verts, nv, box):
    # any non-degenerate tet of the cell fixes the sphere
    for i in range(nv):
        for j in range(i + 1, nv):
            for k in range(j + 1, nv):
                for m in range(k + 1, nv):
                    a = verts[i]
                    if _orient(P, a, verts[j], verts[k], verts[m]) == 0:
                        continue
                    A = np.zeros((3, 3), dtype=np.int64)
                    rhs = np.zeros(3, dtype=np.int64)
                    qs = (verts[j], verts[k], verts[m])
                    for r in range(3):
                        q = qs[r]
                        s = 0
                        for t in range(3):
                            u = P[q, t] - P[a, t]
                            A[r, t] = 2 * W[t] * u
                            s += W[t] * u * u
                        rhs[r] = s
                    den = _det3(A)
                    for t in range(3):
                        At = A.copy()
                        for r in range(3):
                            At[r, t] = rhs[r]
                        num = _det3(At) + P[a, t] * den
                        # 0 <= num / den <= box[t]
                        if den > 0:
                            if num < 0 or num > box[t] * den:
                                return False
                        else:
                            if num > 0 or num < box[t] * den:
                                return False
                    return True
    return False


@njit(cache=True)
def _det3(m):
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


@njit(cache=True)
def run_batch(points, npts, W, box, codes, code_len, cell_cfg, cell_vmask, fvm_ok, status):
    """Process configurations ``points[i, :npts[i]]``.

    Fills one row of ``codes``/``code_len``/``cell_cfg``/``cell_vmask`` per
    cell and returns the number of cells written (or -1 when out of room).
    """
    ncfg = points.shape[0]
    total = 0
    cm = np.zeros(MAXC, dtype=np.int64)
    verts = np.zeros(MAXP, dtype=np.int64)
    fverts = np.zeros((MAXF, MAXP), dtype=np.int64)
    flen = np.zeros(MAXF, dtype=np.int64)
    code = np.zeros(CODE_W, dtype=np.int64)
    for ic in range(ncfg):
        P = points[ic]
        n = npts[ic]
        status[ic] = OK
        nc = _cells(P, W, n, cm)
        if nc < 0:
            status[ic] = -nc
            continue
        if total + nc > codes.shape[0]:
            return -1
        ok = True
        vol = 0
        for c in range(nc):
            nv = 0
            for e in range(n):
                if cm[c] >> e & 1:
                    verts[nv] = e
                    nv += 1
            nf = _cell_faces(P, verts, nv, fverts, flen)
            if nf < 0:
                status[ic] = ERR_CAPACITY
                break
            # six-fold volume by fanning the outward faces from the first vertex
            apex = verts[0]
            for f in range(nf):
                hit = False
                for i in range(flen[f]):
                    if fverts[f, i] == apex:
                        hit = True
                if hit:
                    continue
                for i in range(1, flen[f] - 1):
                    vol -= _vol6(P, fverts[f, 0], fverts[f, i], fverts[f, i + 1], apex)
            L = _canonical(P, W, fverts, flen, nf, code)
            if L > CODE_W:
                status[ic] = ERR_CAPACITY
                break
            for t in range(L):
                codes[total + c, t] = code[t]
            for t in range(L, CODE_W):
                codes[total + c, t] = 0
            code_len[total + c] = L
            cell_cfg[total + c] = ic
            cell_vmask[total + c] = cm[c]
            if ok and not _center_inside(P, W, verts, nv, box):
                ok = False
        if status[ic] != OK:
            continue
        if vol != 6 * box[0] * box[1] * box[2]:
            status[ic] = ERR_VOLUME
            continue
        fvm_ok[ic] = ok
        total += nc
    return total


# -- Python-side helpers ---------------------------------------------------------


def lattice_points(cfg, grid: int):
    """Grid coordinates of a unit-cube configuration on the ``1/grid`` lattice."""
    from .configs import edge_axis, edge_base

    pts = [tuple(grid * (i >> k & 1) for k in range(3)) for i in range(8)]
    for e, f in enumerate(cfg.steiner):
        if f is None:
            continue
        axis = edge_axis(e)
        base = edge_base(e)
        v = f * grid
        if v.denominator != 1:
            raise ValueError(f"Steiner fraction {f} is not on the 1/{grid} grid")
        pts.append(tuple(int(v) if k == axis else grid * base[k] for k in range(3)))
    return pts


def batch_arrays(cfgs, grid: int):
    m = len(cfgs)
    points = np.zeros((m, MAXP, 3), dtype=np.int64)
    npts = np.zeros(m, dtype=np.int64)
    for i, cfg in enumerate(cfgs):
        pts = lattice_points(cfg, grid)
        points[i, : len(pts)] = pts
        npts[i] = len(pts)
    return points, npts


def process(cfgs, grid: int = 16, weights=(1, 1, 1), box=None):
    """Run the compiled engine on unit-cube configurations.

    Returns ``(codes, code_len, cell_cfg, cell_vmask, fvm_ok)``; raises on any
    per-configuration failure.
    """
    points, npts = batch_arrays(cfgs, grid)
    m = len(cfgs)
    W = np.array(weights, dtype=np.int64)
    box = np.array(box if box is not None else (grid, grid, grid), dtype=np.int64)
    cap = max(64, 40 * m)
    while True:
        codes = np.zeros((cap, CODE_W), dtype=np.uint8)
        code_len = np.zeros(cap, dtype=np.int64)
        cell_cfg = np.zeros(cap, dtype=np.int64)
        cell_vmask = np.zeros(cap, dtype=np.int64)
        fvm_ok = np.zeros(m, dtype=np.bool_)
        status = np.zeros(m, dtype=np.int64)
        total = run_batch(points, npts, W, box, codes, code_len, cell_cfg, cell_vmask, fvm_ok, status)
        if total >= 0:
            break
        cap *= 2
    bad = np.nonzero(status)[0]
    if len(bad):
        i = int(bad[0])
        raise RuntimeError(f"compiled engine failed (status {int(status[i])}) on {cfgs[i].text()}")
    return codes[:total], code_len[:total], cell_cfg[:total], cell_vmask[:total], fvm_ok
