"""Compiled inner loops for the j1 search and the isogeny walk.

Everything here works on word-sized residues: the Montgomery kernels need
p < 2^31, the polynomial kernels p < 2^32.  Callers check ``usable`` and
keep their pure-Python paths for larger primes or when numba is missing.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, uint32, uint64
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

MONT_LIMIT = 1 << 31
POLY_LIMIT = 1 << 32

# torsion orders with a rational one-parameter family (plus 1 = no torsion)
FAMILIES = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)


def usable_mont(p: int) -> bool:
    return HAVE_NUMBA and 3 < p < MONT_LIMIT


def usable_poly(p: int) -> bool:
    return HAVE_NUMBA and 3 < p < POLY_LIMIT


def bits_of(n: int) -> np.ndarray:
    """Binary digits of n after the leading one."""
    return np.array([c == "1" for c in bin(n)[3:]], dtype=np.bool_)


if HAVE_NUMBA:
    U0, U1, U2, U3, U4 = (np.uint64(k) for k in range(5))

    # ---------------------------------------------------------- Montgomery, R = 2^32

    @njit(inline="always")
    def _mm(x, y, p, pinv):
        t = uint64(x) * uint64(y)
        m = (uint64(uint32(t)) * uint64(pinv)) & uint64(0xFFFFFFFF)
        r = (t + m * uint64(p)) >> uint64(32)
        if r >= uint64(p):
            r -= uint64(p)
        return uint32(r)

    @njit(inline="always")
    def _ad(x, y, p):
        r = x + y
        return r - p if r >= p else r

    @njit(inline="always")
    def _sb(x, y, p):
        return x - y if x >= y else x + p - y

    @njit(cache=True)
    def _to_mont(v, p, pinv, r2):
        out = np.empty(v.shape[0], dtype=np.uint32)
        for i in range(v.shape[0]):
            out[i] = _mm(uint32(v[i] % uint64(p)), r2, p, pinv)
        return out

    @njit(cache=True)
    def _euler_mont(A, B, X0, p, pinv, one, ebits):
        """chi(x0^3 + a x0 + b) per lane as 1, -1 or 0 (inputs in Montgomery form)."""
        n = A.shape[0]
        R = np.empty(n, dtype=np.uint32)
        for i in range(n):
            x = X0[i]
            R[i] = _ad(_ad(_mm(_mm(x, x, p, pinv), x, p, pinv), _mm(A[i], x, p, pinv), p),
                       B[i], p)
        acc = R.copy()
        for k in range(ebits.shape[0]):
            bk = ebits[k]
            for i in range(n):
                v = _mm(acc[i], acc[i], p, pinv)
                acc[i] = _mm(v, R[i], p, pinv) if bk else v
        out = np.empty(n, dtype=np.int8)
        for i in range(n):
            out[i] = 0 if R[i] == 0 else (1 if acc[i] == one else -1)
        return out

    @njit(cache=True)
    def _mpow(x, ebits, p, pinv):
        acc = x
        for k in range(ebits.shape[0]):
            acc = _mm(acc, acc, p, pinv)
            if ebits[k]:
                acc = _mm(acc, x, p, pinv)
        return acc

    @njit(cache=True)
    def _batch_inv(x, p, pinv, one, ebits):
        """Lane-wise inverses (Montgomery form); zero lanes map to zero."""
        n = x.shape[0]
        pref = np.empty(n, dtype=np.uint32)
        acc = one
        for i in range(n):
            pref[i] = acc
            if x[i] != 0:
                acc = _mm(acc, x[i], p, pinv)
        inv = _mpow(acc, ebits, p, pinv)
        out = np.zeros(n, dtype=np.uint32)
        for i in range(n - 1, -1, -1):
            if x[i] != 0:
                out[i] = _mm(inv, pref[i], p, pinv)
                inv = _mm(inv, x[i], p, pinv)
        return out

    @njit(cache=True)
    def _ladder_mont(nbits, A, B, X0, p, pinv, one):
        """[N](x0) == O per lane; Brier-Joye x-only ladder in Montgomery form."""
        n = A.shape[0]
        X1 = X0.copy()
        Z1 = np.full(n, one, dtype=np.uint32)
        X2 = np.empty(n, dtype=np.uint32)
        Z2 = np.empty(n, dtype=np.uint32)
        for i in range(n):
            x = X1[i]
            z = Z1[i]
            a = A[i]
            b = B[i]
            XX = _mm(x, x, p, pinv)
            ZZ = _mm(z, z, p, pinv)
            aZZ = _mm(a, ZZ, p, pinv)
            t = _sb(XX, aZZ, p)
            bZ3 = _mm(b, _mm(ZZ, z, p, pinv), p, pinv)
            e = _mm(bZ3, x, p, pinv)
            e = _ad(e, e, p)
            e = _ad(e, e, p)
            e = _ad(e, e, p)
            X2[i] = _sb(_mm(t, t, p, pinv), e, p)
            w = _ad(_ad(_mm(XX, x, p, pinv), _mm(aZZ, x, p, pinv), p), bZ3, p)
            zz = _mm(z, w, p, pinv)
            zz = _ad(zz, zz, p)
            Z2[i] = _ad(zz, zz, p)
        for k in range(nbits.shape[0]):
            bk = nbits[k]
            for i in range(n):
                x1 = X1[i]
                z1 = Z1[i]
                x2 = X2[i]
                z2 = Z2[i]
                a = A[i]
                b = B[i]
                vx = x2 if bk else x1
                vz = z2 if bk else z1
                # differential addition
                x1x2 = _mm(x1, x2, p, pinv)
                z1z2 = _mm(z1, z2, p, pinv)
                u = _sb(x1x2, _mm(a, z1z2, p, pinv), p)
                c1 = _mm(x1, z2, p, pinv)
                c2 = _mm(x2, z1, p, pinv)
                s = _ad(c1, c2, p)
                f = _mm(_mm(b, z1z2, p, pinv), s, p, pinv)
                f = _ad(f, f, p)
                f = _ad(f, f, p)
                SX = _sb(_mm(u, u, p, pinv), f, p)
                d = _sb(c1, c2, p)
                SZ = _mm(X0[i], _mm(d, d, p, pinv), p, pinv)
                # doubling
                XX = _mm(vx, vx, p, pinv)
                ZZ = _mm(vz, vz, p, pinv)
                aZZ = _mm(a, ZZ, p, pinv)
                t = _sb(XX, aZZ, p)
                bZ3 = _mm(b, _mm(ZZ, vz, p, pinv), p, pinv)
                e = _mm(bZ3, vx, p, pinv)
                e = _ad(e, e, p)
                e = _ad(e, e, p)
                e = _ad(e, e, p)
                DX = _sb(_mm(t, t, p, pinv), e, p)
                w = _ad(_ad(_mm(XX, vx, p, pinv), _mm(aZZ, vx, p, pinv), p), bZ3, p)
                DZ = _mm(vz, w, p, pinv)
                DZ = _ad(DZ, DZ, p)
                DZ = _ad(DZ, DZ, p)
                if bk:
                    X1[i] = SX
                    Z1[i] = SZ
                    X2[i] = DX
                    Z2[i] = DZ
                else:
                    X1[i] = DX
                    Z1[i] = DZ
                    X2[i] = SX
                    Z2[i] = SZ
        return Z1 == 0

    # ---------------------------------------------------------- plain residues, p < 2^32

    @njit(inline="always")
    def _mul(a, b, p):
        return (a * b) % p

    @njit(cache=True)
    def _pow(a, e, p):
        r = uint64(1)
        a = a % p
        while e > U0:
            if e & U1:
                r = _mul(r, a, p)
            a = _mul(a, a, p)
            e >>= U1
        return r

    @njit(inline="always")
    def _inv(a, p):
        return _pow(a, p - uint64(2), p)

    @njit(cache=True)
    def _sqrt(a, p):
        """Tonelli-Shanks; assumes a is a square mod the odd prime p."""
        a = a % p
        if a == U0:
            return U0
        if p % uint64(4) == uint64(3):
            return _pow(a, (p + uint64(1)) // uint64(4), p)
        q = p - uint64(1)
        s = 0
        while q % uint64(2) == U0:
            q //= uint64(2)
            s += 1
        z = uint64(2)
        while _pow(z, (p - uint64(1)) // uint64(2), p) != p - uint64(1):
            z += uint64(1)
        m = s
        c = _pow(z, q, p)
        t = _pow(a, q, p)
        r = _pow(a, (q + uint64(1)) // uint64(2), p)
        while t != U1:
            i = 0
            tt = t
            while tt != U1:
                tt = _mul(tt, tt, p)
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = _mul(b, b, p)
            m = i
            c = _mul(b, b, p)
            t = _mul(t, c, p)
            r = _mul(r, b, p)
        return r

    # ---------------------------------------------------------- torsion families

    @njit(cache=True)
    def _family_mont(N, T, U, p, pinv, one, cs, ebits):
        """Short Weierstrass (a, b) in Montgomery form for curves with an N-torsion point.

        T and U hold random parameters and cs the constants 2, 3, 4, 24, 27,
        36, 54, 216 (all Montgomery form).  Lanes that hit a pole or a
        singular curve come back as a = b = 0, which is singular and so never
        a genuine output.
        """
        n = T.shape[0]
        c2, c3, c4_, c24, c27, c36, c54, c216 = cs[0], cs[1], cs[2], cs[3], cs[4], cs[5], cs[6], cs[7]
        zero = uint32(0)
        # the single denominator each family needs
        den = np.zeros(n, dtype=np.uint32)
        if N == 8:
            den[:] = T
        elif N == 10:
            for i in range(n):
                t = T[i]
                # t - (t - 1)^2 = -(t^2 - 3t + 1)
                den[i] = _sb(zero, _ad(_sb(_mm(t, t, p, pinv), _mm(c3, t, p, pinv), p), one, p), p)
        elif N == 12:
            for i in range(n):
                den[i] = _sb(T[i], one, p)
        inv = _batch_inv(den, p, pinv, one, ebits)
        A = np.zeros(n, dtype=np.uint32)
        B = np.zeros(n, dtype=np.uint32)
        for i in range(n):
            t = T[i]
            a1 = zero
            a2 = zero
            a3 = zero
            a4 = zero
            a6 = zero
            if N == 1:
                a4 = t
                a6 = U[i]
            elif N == 2:
                # y^2 = x^3 + t x^2 + u x, (0, 0) of order 2
                a2 = t
                a4 = U[i]
            elif N == 3:
                # y^2 + t x y + u y = x^3, (0, 0) of order 3
                a1 = t
                a3 = U[i]
            else:
                if (N == 8 or N == 10 or N == 12) and inv[i] == 0:
                    continue
                tt = _mm(t, t, p, pinv)
                bb = zero
                cc = zero
                # Tate normal form y^2 + (1 - c) x y - b y = x^3 - b x^2
                if N == 4:
                    bb = t
                elif N == 5:
                    bb = t
                    cc = t
                elif N == 6:
                    cc = t
                    bb = _ad(t, tt, p)
                elif N == 7:
                    cc = _sb(tt, t, p)
                    bb = _mm(cc, t, p, pinv)
                elif N == 8:
                    bb = _mm(_sb(_mm(c2, t, p, pinv), one, p), _sb(t, one, p), p, pinv)
                    cc = _mm(bb, inv[i], p, pinv)
                elif N == 9:
                    cc = _mm(tt, _sb(t, one, p), p, pinv)
                    bb = _mm(cc, _ad(_sb(tt, t, p), one, p), p, pinv)
                elif N == 10:
                    # f = t, d = t^2 / (t - (t - 1)^2)
                    d = _mm(tt, inv[i], p, pinv)
                    cc = _mm(t, _sb(d, one, p), p, pinv)
                    bb = _mm(cc, d, p, pinv)
                else:
                    # m = (3t - 3t^2 - 1)/(t - 1), f = m/(1 - t), d = m + t
                    num = _sb(_sb(_mm(c3, t, p, pinv), _mm(c3, tt, p, pinv), p), one, p)
                    m = _mm(num, inv[i], p, pinv)
                    f = _sb(zero, _mm(m, inv[i], p, pinv), p)
                    d = _ad(m, t, p)
                    cc = _mm(f, _sb(d, one, p), p, pinv)
                    bb = _mm(cc, d, p, pinv)
                a1 = _sb(one, cc, p)
                a2 = _sb(zero, bb, p)
                a3 = a2
            b2 = _ad(_mm(a1, a1, p, pinv), _mm(c4_, a2, p, pinv), p)
            b4 = _ad(_mm(c2, a4, p, pinv), _mm(a1, a3, p, pinv), p)
            b6 = _ad(_mm(a3, a3, p, pinv), _mm(c4_, a6, p, pinv), p)
            b22 = _mm(b2, b2, p, pinv)
            k4 = _sb(b22, _mm(c24, b4, p, pinv), p)
            k6 = _sb(_mm(c36, _mm(b2, b4, p, pinv), p, pinv),
                     _ad(_mm(b22, b2, p, pinv), _mm(c216, b6, p, pinv), p), p)
            # y^2 = x^3 - 27 c4 x - 54 c6
            aa = _sb(zero, _mm(c27, k4, p, pinv), p)
            bw = _sb(zero, _mm(c54, k6, p, pinv), p)
            disc = _ad(_mm(c4_, _mm(_mm(aa, aa, p, pinv), aa, p, pinv), p, pinv),
                       _mm(c27, _mm(bw, bw, p, pinv), p, pinv), p)
            if disc == 0:
                continue
            A[i] = aa
            B[i] = bw
        return A, B

    # ---------------------------------------------------------- small polynomials

    @njit(cache=True)
    def _specialize(rows, j, p):
        L = rows.shape[0]
        out = np.zeros(L, dtype=np.uint64)
        jp = uint64(1)
        for k in range(L):
            for i in range(L):
                out[i] = (out[i] + _mul(rows[i, k], jp, p)) % p
            jp = _mul(jp, j, p)
        return out

    @njit(cache=True)
    def _deg(f):
        d = f.shape[0] - 1
        while d >= 0 and f[d] == U0:
            d -= 1
        return d

    @njit(cache=True)
    def _x_pow_p_minus_x(g, d, p):
        """(X^p - X) mod g for monic g of degree d >= 1, as d coefficients."""
        r = np.zeros(d, dtype=np.uint64)
        r[0] = U1
        prod = np.zeros(2 * d, dtype=np.uint64)
        nb = 0
        e = p
        while e > U0:
            nb += 1
            e >>= U1
        for k in range(nb - 1, -1, -1):
            # square
            for i in range(2 * d):
                prod[i] = U0
            for i in range(d):
                if r[i] == U0:
                    continue
                for l in range(d):
                    prod[i + l] = (prod[i + l] + _mul(r[i], r[l], p)) % p
            if (p >> uint64(k)) & U1:
                for i in range(2 * d - 1, 0, -1):
                    prod[i] = prod[i - 1]
                prod[0] = U0
            for i in range(2 * d - 1, d - 1, -1):
                c = prod[i]
                if c == U0:
                    continue
                prod[i] = U0
                for l in range(d):
                    prod[i - d + l] = (prod[i - d + l] + p - _mul(c, g[l], p)) % p
            for i in range(d):
                r[i] = prod[i]
        if d >= 2:
            r[1] = (r[1] + p - U1) % p
        else:
            # X = -g[0] mod g
            r[0] = (r[0] + g[0]) % p
        return r

    @njit(cache=True)
    def _gcd(a, b, p):
        """Monic gcd of two polynomials (coefficient arrays, may be padded)."""
        x = a.copy()
        y = b.copy()
        dx = _deg(x)
        dy = _deg(y)
        while dy >= 0:
            inv = _inv(y[dy], p)
            # x <- x mod y
            while dx >= dy:
                c = _mul(x[dx], inv, p)
                if c != U0:
                    for l in range(dy + 1):
                        x[dx - dy + l] = (x[dx - dy + l] + p - _mul(c, y[l], p)) % p
                x[dx] = U0
                dx = _deg(x)
            x, y = y, x
            dx, dy = dy, dx
        if dx < 0:
            return x, dx
        inv = _inv(x[dx], p)
        for l in range(dx + 1):
            x[l] = _mul(x[l], inv, p)
        return x, dx

    @njit(cache=True)
    def _linear_part(f, df, p):
        """gcd(X^p - X, f) for monic f of degree df."""
        g = f[:df + 1].copy()
        r = _x_pow_p_minus_x(g, df, p)
        return _gcd(g, r, p)

    @njit(cache=True)
    def _full_two_torsion(j, p):
        """Whether the curve with invariant j has all of E[2] over F_p (same models as curve_from_j)."""
        c1728 = uint64(1728) % p
        if j == U0:
            a = U0
            b = U1
        elif j == c1728:
            a = U1
            b = U0
        else:
            k = _mul(j, _inv((c1728 + p - j) % p, p), p)
            a = _mul(U3, k, p)
            b = _mul(U2, k, p)
        f = np.zeros(4, dtype=np.uint64)
        f[0] = b
        f[1] = a
        f[3] = U1
        lin, dl = _linear_part(f, 3, p)
        return dl == 3

    @njit(cache=True)
    def _quadratic_roots(lin, p):
        """Both roots of the monic split quadratic lin, smaller first."""
        b = lin[1]
        c = lin[0]
        disc = (_mul(b, b, p) + p - _mul(U4, c, p)) % p
        s = _sqrt(disc, p)
        inv2 = (p + U1) // U2
        r1 = _mul((p - b + s) % p, inv2, p)
        r2 = _mul((p - b + p - s) % p, inv2, p)
        if r1 < r2:
            return r1, r2
        return r2, r1

    @njit(cache=True)
    def walk_cycle_kernel(rows, j, first, steps, p, expected, surface, out):
        """Fill out[0..steps] with j, l j, l^2 j, ...; 0 on success.

        ``first`` is the second entry when the caller already chose it
        (``expected`` < 0), otherwise the smaller root is taken.  With
        ``surface`` set, later steps keep only neighbours with full rational
        2-torsion.  Status 1: the first step had the wrong number of roots;
        status 2: a later step did not have exactly one new neighbour.
        """
        out[0] = j
        if steps == 0:
            return 0
        if expected < 0:
            cur = first
        else:
            f = _specialize(rows, j, p)
            df = _deg(f)
            lin, dl = _linear_part(f, df, p)
            if dl != expected:
                return 1
            if dl == 1:
                cur = (p - lin[0]) % p
            elif dl == 2:
                cur, _ = _quadratic_roots(lin, p)
            else:
                return 1
        prev = j
        out[1] = cur
        for step in range(2, steps + 1):
            f = _specialize(rows, cur, p)
            df = _deg(f)
            # synthetic division by (X - prev)
            g = np.zeros(df, dtype=np.uint64)
            acc = uint64(0)
            for i in range(df, 0, -1):
                acc = (f[i] + _mul(acc, prev, p)) % p
                g[i - 1] = acc
            rem = (f[0] + _mul(acc, prev, p)) % p
            if rem != U0:
                return 2
            lin, dl = _linear_part(g, df - 1, p)
            if dl == 1:
                nxt = (p - lin[0]) % p
                if surface and not _full_two_torsion(nxt, p):
                    return 2
            elif dl == 2 and surface:
                r1, r2 = _quadratic_roots(lin, p)
                s1 = _full_two_torsion(r1, p)
                s2 = _full_two_torsion(r2, p)
                if s1 == s2:
                    return 2
                nxt = r1 if s1 else r2
            else:
                return 2
            prev = cur
            cur = nxt
            out[step] = cur
        return 0


# ------------------------------------------------------------------ Python-facing wrappers

def mont_params(p: int):
    pinv = (-pow(p, -1, 1 << 32)) % (1 << 32)
    return np.uint32(p), np.uint32(pinv), np.uint32((1 << 32) % p), np.uint32(pow(2, 64, p))


_CONSTS = (2, 3, 4, 24, 27, 36, 54, 216)


class MontBatch:
    """Random curves from one torsion family, kept in Montgomery form."""

    def __init__(self, p: int):
        self.p = p
        self.P, self.pinv, self.one, self.r2 = mont_params(p)
        self.Rinv = pow(1 << 32, -1, p)
        self.inv_bits = bits_of(p - 2)
        self.euler_bits = bits_of((p - 1) // 2)
        self.consts = self.to_mont(np.array(_CONSTS, dtype=np.uint64))

    def to_mont(self, v: np.ndarray) -> np.ndarray:
        return _to_mont(v.astype(np.uint64), self.P, self.pinv, self.r2)

    def from_mont(self, x) -> int:
        return int(x) * self.Rinv % self.p

    def family(self, N: int, ts: np.ndarray, us: np.ndarray):
        return _family_mont(N, self.to_mont(ts), self.to_mont(us), self.P, self.pinv,
                            self.one, self.consts, self.inv_bits)

    def hits(self, Na: int, Nb: int, A, B, X) -> np.ndarray:
        """Lanes where x0 lies on the curve with [Na]x0 = O, or on the twist with [Nb]x0 = O."""
        chi = _euler_mont(A, B, X, self.P, self.pinv, self.one, self.euler_bits)
        out = np.zeros(A.shape[0], dtype=np.bool_)
        for side, N in ((1, Na), (-1, Nb)):
            idx = np.nonzero(chi == side)[0]
            if idx.size:
                out[idx] = _ladder_mont(bits_of(N), A[idx], B[idx], X[idx],
                                        self.P, self.pinv, self.one)
        return out


def family_batch(N: int, ts: np.ndarray, us: np.ndarray, p: int):
    """Plain-residue (a, b) arrays for a torsion family."""
    mb = MontBatch(p)
    A, B = mb.family(N, ts, us)
    Rinv = np.uint64(mb.Rinv)
    return (A.astype(np.uint64) * Rinv) % np.uint64(p), (B.astype(np.uint64) * Rinv) % np.uint64(p)


def order_hits(Na: int, Nb: int, a: np.ndarray, b: np.ndarray, x0: np.ndarray, p: int) -> np.ndarray:
    mb = MontBatch(p)
    return mb.hits(Na, Nb, mb.to_mont(a), mb.to_mont(b), mb.to_mont(x0))


def walk_cycle_fast(rows: np.ndarray, j: int, steps: int, p: int, expected: int,
                    first: int | None = None, surface: bool = False):
    """Compiled walk; pass ``first`` to fix the second entry (then ``expected`` is ignored)."""
    out = np.zeros(steps + 1, dtype=np.uint64)
    exp = -1 if first is not None else expected
    status = walk_cycle_kernel(rows, np.uint64(j), np.uint64(first or 0), steps, np.uint64(p),
                               exp, surface, out)
    return int(status), [int(x) for x in out]
