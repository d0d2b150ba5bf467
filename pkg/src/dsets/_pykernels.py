"""Pure-Python kernels; reference semantics for the compiled ones."""

import numpy as np


def ring_square(mul, inv, coeff):
    """Coefficients of ``c * c^(-1)``: entry ``z`` counts weighted pairs
    ``(a, b)`` with ``a * b^-1 == z``."""
    n = len(coeff)
    out = [0] * n
    support = [(a, int(c)) for a, c in enumerate(coeff) if c]
    for a, ca in support:
        row = mul[a]
        for b, cb in support:
            out[int(row[inv[b]])] += ca * cb
    return np.array(out, dtype=np.int64)


def lift_preimages(mul, inv, identity, fibers, counts, cap, t_id, t_off):
    """All distributions of ``counts[f]`` over the elements of ``fibers[f]``
    (each part in ``0..cap``) whose group-ring square never exceeds
    ``t_id`` at the identity or ``t_off`` elsewhere.

    Returns a list of ``bytes`` vectors over the target group.
    """
    mul = [list(map(int, r)) for r in mul]
    inv = [int(x) for x in inv]
    fibers = [list(map(int, f)) for f in fibers]
    counts = [int(c) for c in counts]
    n = len(inv)
    F = len(fibers)
    m = len(fibers[0]) if F else 0
    P = [0] * n
    vec = bytearray(n)
    support: list[tuple[int, int]] = []
    out: list[bytes] = []

    def add(y, t):
        touched = []
        P[identity] += t * t
        ok = P[identity] <= t_id
        ry = mul[y]
        iy = inv[y]
        for a, s in support:
            st = s * t
            z1 = mul[a][iy]
            z2 = ry[inv[a]]
            P[z1] += st
            P[z2] += st
            touched.append((z1, z2, st))
            if P[z1] > t_off or P[z2] > t_off:
                ok = False
                break
        return ok, touched

    def undo(t, touched):
        P[identity] -= t * t
        for z1, z2, st in touched:
            P[z1] -= st
            P[z2] -= st

    def rec(f, j, rem):
        if f == F:
            out.append(bytes(vec))
            return
        if j == m - 1:
            hi = lo = rem
            if rem > cap:
                return
        else:
            hi = min(cap, rem)
            lo = max(0, rem - cap * (m - 1 - j))
        y = fibers[f][j]
        for t in range(hi, lo - 1, -1):
            if t:
                ok, touched = add(y, t)
                if ok:
                    support.append((y, t))
                    vec[y] = t
                    if j == m - 1:
                        rec(f + 1, 0, counts[f + 1] if f + 1 < F else 0)
                    else:
                        rec(f, j + 1, rem - t)
                    vec[y] = 0
                    support.pop()
                undo(t, touched)
            else:
                if j == m - 1:
                    rec(f + 1, 0, counts[f + 1] if f + 1 < F else 0)
                else:
                    rec(f, j + 1, rem)

    if F:
        rec(0, 0, counts[0])
    else:
        out.append(bytes(vec))
    return out
