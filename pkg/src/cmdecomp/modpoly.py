"""Classical modular polynomials: generation from q-expansions, text I/O, validation.

Phi_l(X, j) has as roots j(l*tau) and j((tau+k)/l).  Their power sums are
polynomials in j that can be read off from the principal parts of short
q-expansions; Newton's identities then give the coefficients.
"""

from __future__ import annotations

import os
from pathlib import Path

import gmpy2

from .arith import is_prime

DATA_DIR = Path(__file__).with_name("data") / "modpoly"


class FormatError(ValueError):
    """Malformed modular polynomial file."""


class ValidationError(ValueError):
    """A table that cannot be a classical modular polynomial."""


# ---------------------------------------------------------------- integer series

def _zmul(a: list[int], b: list[int], n: int | None = None) -> list[int]:
    """Signed integer polynomial product, optionally truncated to n terms."""
    if not a or not b:
        return []
    if n is not None:
        a, b = a[:n], b[:n]
    la, lb = len(a), len(b)
    out_len = la + lb - 1
    if min(la, lb) < 8:
        out = [0] * out_len
        for i, x in enumerate(a):
            if x:
                for k, y in enumerate(b):
                    out[i + k] += x * y
        return out[:n] if n is not None else out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    bits = (ma * mb * min(la, lb)).bit_length() + 2
    width = (bits + 7) // 8 + 1
    shift = width * 8
    bias = 1 << (shift - 1)
    pa = _pack_signed(a, shift)
    pb = _pack_signed(b, shift)
    prod = pa * pb
    # add the bias to every slot, then read unsigned slots
    biased = prod + _pack_signed([bias] * out_len, shift)
    raw = int(biased).to_bytes(width * out_len + 1, "little")
    out = [int.from_bytes(raw[i * width:(i + 1) * width], "little") - bias
           for i in range(out_len)]
    return out[:n] if n is not None else out


def _pack_signed(a: list[int], shift: int):
    pos = [x if x > 0 else 0 for x in a]
    neg = [-x if x < 0 else 0 for x in a]
    w = shift // 8
    val = gmpy2.mpz(int.from_bytes(b"".join(x.to_bytes(w, "little") for x in pos), "little"))
    if any(neg):
        val -= gmpy2.mpz(int.from_bytes(b"".join(x.to_bytes(w, "little") for x in neg), "little"))
    return val


def _sigma3(n: int) -> list[int]:
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        c = d ** 3
        for k in range(d, n + 1, d):
            s[k] += c
    return s


def _inverse_series(a: list[int], n: int) -> list[int]:
    """1/a mod q^n for an integer series with a[0] = 1."""
    inv = [1]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        e = _zmul(a[:prec], inv, prec)
        e = [-x for x in e]
        e[0] += 2
        inv = _zmul(inv, e, prec)
    return inv


def qj_series(n: int) -> list[int]:
    """First n coefficients of q*j(q) = 1 + 744 q + 196884 q^2 + ..."""
    s3 = _sigma3(n)
    e4 = [1] + [240 * s3[k] for k in range(1, n)]
    # prod (1 - q^k)^24 via Euler's pentagonal series to the 24th power
    eta = [0] * n
    k = 0
    while True:
        done = True
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g < n:
                eta[g] = -1 if k % 2 else 1
                done = False
        if done or k > n:
            break
        k += 1
    eta24 = [1]
    base = eta
    e = 24
    while e:
        if e & 1:
            eta24 = _zmul(eta24, base, n)
        e >>= 1
        if e:
            base = _zmul(base, base, n)
    e4cube = _zmul(_zmul(e4, e4, n), e4, n)
    return _zmul(e4cube, _inverse_series(eta24, n), n)


def generate(ell: int) -> dict[tuple[int, int], int]:
    """Coefficients {(i, k): c} of Phi_ell(X, Y) = sum c X^i Y^k."""
    if not is_prime(ell):
        raise ValueError("level must be prime")
    top = ell * (ell + 1)
    qj = qj_series(top + 2)
    # T[N] = (q j)^N truncated to degree N, i.e. j^N = q^-N T[N] up to q^0
    T = [[1]]
    full = [1]
    for N in range(1, top + 1):
        full = _zmul(full, qj, top + 1)
        T.append(full[:N + 1])

    def to_poly(principal: list[int]) -> list[int]:
        # principal[u] is the coefficient of q^-u, u = 0..M
        f = list(principal)
        M = len(f) - 1
        out = [0] * (M + 1)
        for N in range(M, 0, -1):
            c = f[N]
            if c:
                out[N] = c
                tn = T[N]
                # j^N contributes tn[d] at q^(d - N), i.e. index N - d
                for d in range(1, N + 1):
                    f[N - d] -= c * tn[d]
        out[0] = f[0]
        return out

    sums = []
    for r in range(1, ell + 2):
        tr = T[r]  # (qj)^r to degree r: coefficient of q^(d-r) in j^r is tr[d]
        pr = [0] * (ell * r + 1)
        # j(q^ell)^r: q^(ell(d - r))
        for d in range(r + 1):
            pr[ell * (r - d)] += tr[d]
        # ell * sum of j^r coefficients at exponents divisible by ell, rescaled
        for d in range(r + 1):
            e = d - r
            if e % ell == 0:
                pr[-e // ell] += ell * tr[d]
        sums.append(to_poly(pr))

    # Newton: k e_k = sum_{i=1}^k (-1)^(i-1) e_{k-i} S_i
    es = [[1]]
    for k in range(1, ell + 2):
        acc: list[int] = []
        for i in range(1, k + 1):
            term = _zmul(es[k - i], sums[i - 1])
            if i % 2 == 0:
                term = [-x for x in term]
            acc = _add(acc, term)
        q, rem = zip(*(divmod(x, k) for x in acc)) if acc else ((), ())
        if any(rem):
            raise ArithmeticError("non-integral elementary symmetric function")
        es.append(list(q))

    coeffs: dict[tuple[int, int], int] = {}
    for k, ek in enumerate(es):
        sign = -1 if k % 2 else 1
        for jdeg, c in enumerate(ek):
            if c:
                coeffs[(ell + 1 - k, jdeg)] = sign * c
    return coeffs


def _add(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return out


# ---------------------------------------------------------------- file format

def dumps(ell: int, coeffs: dict[tuple[int, int], int]) -> str:
    lines = [f"level {ell}"]
    for (i, k), c in sorted(coeffs.items(), reverse=True):
        if i >= k and c:
            lines.append(f"[{i},{k}] {c}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[int, dict[tuple[int, int], int]]:
    """Parse the text format into (level, full symmetric coefficient table)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty modular polynomial file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "level":
        raise FormatError(f"bad header {lines[0]!r}")
    try:
        ell = int(head[1])
    except ValueError:
        raise FormatError(f"bad level {head[1]!r}") from None
    coeffs: dict[tuple[int, int], int] = {}
    for ln in lines[1:]:
        try:
            mono, val = ln.split()
            if not (mono.startswith("[") and mono.endswith("]")):
                raise ValueError
            i, k = (int(x) for x in mono[1:-1].split(","))
            c = int(val)
        except ValueError:
            raise FormatError(f"bad monomial line {ln!r}") from None
        for key in {(i, k), (k, i)}:
            if key in coeffs and coeffs[key] != c:
                raise ValidationError(f"asymmetric coefficient at X^{key[0]} Y^{key[1]}")
            coeffs[key] = c
    return ell, coeffs


def validate(ell: int, coeffs: dict[tuple[int, int], int]) -> None:
    """Symmetry, degree, monicity and the Kronecker congruence mod ell."""
    if not is_prime(ell):
        raise ValidationError(f"level {ell} is not prime")
    for (i, k), c in coeffs.items():
        if coeffs.get((k, i), 0) != c:
            raise ValidationError(f"asymmetric coefficient at X^{i} Y^{k}")
        if i > ell + 1 or k > ell + 1:
            raise ValidationError(f"monomial X^{i} Y^{k} exceeds degree {ell + 1}")
    if coeffs.get((ell + 1, 0)) != 1:
        raise ValidationError(f"X^{ell + 1} coefficient is not 1")
    for k in range(1, ell + 2):
        if coeffs.get((ell + 1, k), 0):
            raise ValidationError(f"monomial X^{ell + 1} Y^{k} must vanish")
    # (X^l - Y)(X - Y^l) = X^(l+1) - X^l Y^l - X Y + Y^(l+1)
    expect = {(ell + 1, 0): 1, (0, ell + 1): 1, (ell, ell): -1, (1, 1): -1}
    keys = set(coeffs) | set(expect)
    for key in keys:
        if (coeffs.get(key, 0) - expect.get(key, 0)) % ell:
            raise ValidationError(
                f"Kronecker congruence fails at X^{key[0]} Y^{key[1]}")


def load_modpoly(ell: int, source: str | os.PathLike | None = None) -> dict[tuple[int, int], int]:
    """Read and validate Phi_ell from ``source`` (a file or a directory of phi_<l>.txt)."""
    path = Path(source) if source is not None else DATA_DIR
    if path.is_dir():
        path = path / f"phi_{ell}.txt"
    if not path.exists():
        raise FileNotFoundError(f"no modular polynomial of level {ell} at {path}")
    level, coeffs = loads(path.read_text())
    if level != ell:
        raise FormatError(f"{path} holds level {level}, expected {ell}")
    validate(level, coeffs)
    return coeffs


def available_levels(source: str | os.PathLike | None = None) -> list[int]:
    path = Path(source) if source is not None else DATA_DIR
    out = []
    for f in path.glob("phi_*.txt"):
        try:
            out.append(int(f.stem.split("_")[1]))
        except ValueError:
            continue
    return sorted(out)


def main(argv: list[str] | None = None) -> int:
    import argparse
    ap = argparse.ArgumentParser(description="generate classical modular polynomials")
    ap.add_argument("levels", nargs="+", type=int)
    ap.add_argument("--out", default=str(DATA_DIR))
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for ell in args.levels:
        coeffs = generate(ell)
        validate(ell, coeffs)
        (out / f"phi_{ell}.txt").write_text(dumps(ell, coeffs))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
