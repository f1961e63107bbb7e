"""Exact fixed-precision arithmetic in the completion O_v.

Supported local rings: the unramified case O_v = Z_p (e = f = 1), an
unramified quadratic extension (f = 2, generated by a square root of a
non-residue), a ramified quadratic extension (e = 2, uniformizer pi with
pi^2 = c*p for a unit c), and their compositum (e = f = 2).

Every value carries an absolute precision: it is known modulo pi^prec and
nothing more.  All arithmetic computes the exact output precision; nothing
is ever silently rounded.  Elements are immutable.

Representation: value = pi^shift * mantissa, where the mantissa is stored
as coordinates in the basis {omega^i * pi^j} and is either a unit or
indistinguishable from zero at the stated precision (the canonical form).
Valuations are always counted in pi-units.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    NonUnit,
    NotAResidue,
    NotPrincipal,
    PrecisionExhausted,
    StructureMismatch,
    ZeroInput,
)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any input used here."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _vp(n: int, p: int, cap: int) -> int:
    """p-adic valuation of a nonzero integer, capped at `cap`."""
    v = 0
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class AtLeast:
    """Valuation lower bound: the value is indistinguishable from 0 mod pi^bound."""

    bound: int

    def __repr__(self):
        return f"AT_LEAST({self.bound})"


def smallest_nonresidue(p: int) -> int:
    r = 2
    while pow(r, (p - 1) // 2, p) == 1:
        r += 1
    return r


class LocalRing:
    """Structure constants of O_v: prime p, ramification e, residue degree f.

    Do not instantiate directly; use :func:`local_ring` so that equal
    parameters yield the identical (cached) object.
    """

    def __init__(self, p: int, e: int, f: int, nonresidue: int, uniformizer_unit: int):
        if p < 3 or not is_prime(p):
            raise StructureMismatch(f"p must be an odd prime, got {p}")
        if e not in (1, 2) or f not in (1, 2):
            raise StructureMismatch("only e <= 2 and f <= 2 are supported")
        if e == 2 and uniformizer_unit % p == 0:
            raise StructureMismatch("uniformizer unit must be coprime to p")
        if f == 2 and pow(nonresidue % p, (p - 1) // 2, p) != p - 1:
            raise StructureMismatch(f"{nonresidue} is a square mod {p}")
        self.p = p
        self.e = e
        self.f = f
        self.nonresidue = nonresidue if f == 2 else 0
        self.uniformizer_unit = uniformizer_unit if e == 2 else 0
        self.degree = e * f

    def __repr__(self):
        return f"LocalRing(p={self.p}, e={self.e}, f={self.f})"

    # -- coordinate plumbing -------------------------------------------
    # Flat index of the basis element omega^i pi^j is j*f + i.

    def _coord_modulus_exp(self, m: int, j: int) -> int:
        # pi-precision m on the (i, j) coordinate means p-precision ceil((m-j)/e)
        return max(0, -(-(m - j) // self.e))

    def coord_moduli(self, m: int) -> tuple[int, ...]:
        return tuple(
            self._coord_modulus_exp(m, j) for j in range(self.e) for _ in range(self.f)
        )

    def reduce(self, coords, m: int) -> tuple[int, ...]:
        if m <= 0:
            return (0,) * self.degree
        return tuple(c % self.p ** k if k > 0 else 0 for c, k in zip(coords, self.coord_moduli(m)))

    def val(self, coords, m: int):
        """pi-valuation of reduced coordinates; None when all are 0 (>= m)."""
        best = None
        for k, c in enumerate(coords):
            if c == 0:
                continue
            j = k // self.f
            v = self.e * _vp(c, self.p, m) + j
            if best is None or v < best:
                best = v
        return best

    def mul_raw(self, a, b) -> tuple[int, ...]:
        """Exact product of coordinate vectors (no reduction)."""
        p, f = self.p, self.f
        out = [0] * self.degree
        for k1, c1 in enumerate(a):
            if c1 == 0:
                continue
            i1, j1 = k1 % f, k1 // f
            for k2, c2 in enumerate(b):
                if c2 == 0:
                    continue
                i2, j2 = k2 % f, k2 // f
                c = c1 * c2
                i, j = i1 + i2, j1 + j2
                if i >= 2:
                    i -= 2
                    c *= self.nonresidue
                if j >= 2:
                    j -= 2
                    c *= self.uniformizer_unit * p
                out[j * f + i] += c
        return tuple(out)

    def mul_pi_raw(self, coords) -> tuple[int, ...]:
        """Exact product with the uniformizer."""
        if self.e == 1:
            return tuple(c * self.p for c in coords)
        f = self.f
        low, high = coords[:f], coords[f:]
        return tuple(c * self.uniformizer_unit * self.p for c in high) + low

    def div_pi(self, coords, m: int) -> tuple[int, ...]:
        """Divide canonical coordinates (mod pi^m, valuation >= 1) by pi."""
        p = self.p
        if self.e == 1:
            return self.reduce(tuple(c // p for c in coords), m - 1)
        f = self.f
        low, high = coords[:f], coords[f:]
        cinv = pow(self.uniformizer_unit, -1, p ** max(1, m))
        new_high = tuple((c // p) * cinv for c in low)
        return self.reduce(high + new_high, m - 1)

    # -- residue field ---------------------------------------------------

    def residue_of_coords(self, coords) -> tuple[int, ...]:
        return tuple(c % self.p for c in coords[: self.f])

    def residue_inv(self, res) -> tuple[int, ...]:
        p = self.p
        if self.f == 1:
            return (pow(res[0], -1, p),)
        a, b = res
        norm = (a * a - self.nonresidue * b * b) % p
        ninv = pow(norm, -1, p)
        return (a * ninv % p, -b * ninv % p)

    def inv_coords(self, coords, m: int) -> tuple[int, ...]:
        """Inverse of a unit coordinate vector modulo pi^m (Newton lifting)."""
        res = self.residue_of_coords(coords)
        if all(c == 0 for c in res):
            raise NonUnit("coordinate vector is not a unit")
        y = self.reduce(self.residue_inv(res) + (0,) * (self.degree - self.f), m)
        one = (1,) + (0,) * (self.degree - 1)
        for _ in range(m.bit_length() + 2):
            err = tuple(o - c for o, c in zip(one, self.mul_raw(coords, y)))
            if all(c == 0 for c in self.reduce(err, m)):
                return y
            y = self.reduce(self.mul_raw(y, tuple(o + c for o, c in zip(one, err))), m)
        raise PrecisionExhausted("inverse iteration failed to converge")

    def pack(self, coords, m: int) -> int:
        """Mixed-radix packing of canonical value coordinates mod pi^m."""
        out, scale = 0, 1
        for c, k in zip(coords, self.coord_moduli(m)):
            out += c * scale
            scale *= self.p ** k
        return out

    def unpack(self, packed: int, m: int) -> tuple[int, ...]:
        coords = []
        for k in self.coord_moduli(m):
            md = self.p ** k
            coords.append(packed % md)
            packed //= md
        return tuple(coords)

    # -- constructors ------------------------------------------------------

    def _zero(self, prec: int) -> "PadicNumber":
        return PadicNumber(self, prec, (0,) * self.degree, prec)

    def make(self, shift: int, coords, prec: int) -> "PadicNumber":
        """Canonicalize: reduce, strip pi-powers into the shift."""
        m = prec - shift
        if m <= 0:
            return self._zero(prec)
        coords = self.reduce(coords, m)
        v = self.val(coords, m)
        if v is None:
            return self._zero(prec)
        for _ in range(v):
            coords = self.div_pi(coords, m)
            m -= 1
        return PadicNumber(self, shift + v, coords, prec)

    def from_int(self, n: int, prec: int) -> "PadicNumber":
        if prec < 1:
            raise ValueError("precision must be >= 1")
        return self.make(0, (n,) + (0,) * (self.degree - 1), prec)

    def from_coords(self, coords, prec: int, shift: int = 0) -> "PadicNumber":
        if len(coords) != self.degree:
            raise StructureMismatch("coordinate vector has wrong length")
        return self.make(shift, tuple(coords), prec)

    def from_rational(self, num: int, den: int, prec: int) -> "PadicNumber":
        return self.from_int(num, prec) / self.from_int(den, prec)

    def from_fraction(self, x: Fraction, prec: int) -> "PadicNumber":
        return self.from_rational(x.numerator, x.denominator, prec)

    def zero(self, prec: int) -> "PadicNumber":
        return self._zero(prec)

    def one(self, prec: int) -> "PadicNumber":
        return self.from_int(1, prec)

    def uniformizer(self, prec: int) -> "PadicNumber":
        if self.e == 1:
            return self.from_int(self.p, prec)
        coords = [0] * self.degree
        coords[self.f] = 1
        return self.make(0, tuple(coords), prec)


@lru_cache(maxsize=None)
def _ring_cached(p, e, f, nonresidue, uniformizer_unit):
    return LocalRing(p, e, f, nonresidue, uniformizer_unit)


def local_ring(p: int, e: int = 1, f: int = 1, nonresidue: int | None = None,
               uniformizer_unit: int = 1) -> LocalRing:
    if f == 2 and nonresidue is None:
        nonresidue = smallest_nonresidue(p)
    return _ring_cached(p, e, f, nonresidue if f == 2 else 0,
                        uniformizer_unit if e == 2 else 0)


@dataclass(frozen=True)
class PadicNumber:
    """Element of L_v known modulo pi^prec, in canonical form.

    value = pi^shift * mantissa(coords); the mantissa is a unit (or zero,
    in which case shift == prec and the value is indistinguishable from 0).
    """

    ring: LocalRing
    shift: int
    coords: tuple[int, ...]
    prec: int

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def valuation(self):
        if self.is_zero():
            return AtLeast(self.prec)
        return self.shift

    def is_unit(self) -> bool:
        return not self.is_zero() and self.shift == 0

    def residue(self) -> tuple[int, ...]:
        if self.is_zero() or self.shift > 0:
            return (0,) * self.ring.f
        if self.shift < 0:
            raise NonUnit("negative valuation: no residue")
        return self.ring.residue_of_coords(self.coords)

    def unit_part(self) -> "PadicNumber":
        if self.is_zero():
            raise PrecisionExhausted("no unit part at this precision")
        return PadicNumber(self.ring, 0, self.coords, self.prec - self.shift)

    def value_coords(self) -> tuple[int, ...]:
        """Exact integer coordinates of the canonical representative (shift >= 0)."""
        if self.shift < 0:
            raise NonUnit("negative valuation: not integral")
        coords = self.coords
        for _ in range(self.shift):
            coords = self.ring.mul_pi_raw(coords)
        return self.ring.reduce(coords, self.prec)

    def lift(self) -> int:
        """Canonical packed integer representative modulo pi^prec."""
        return self.ring.pack(self.value_coords(), self.prec)

    def with_precision(self, prec: int) -> "PadicNumber":
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} -> {prec}")
        return self.ring.make(self.shift, self.coords, prec)

    def agrees_with(self, other: "PadicNumber") -> bool:
        """True when self and other are indistinguishable at the common precision."""
        return (self - other).is_zero()

    def __repr__(self):
        if self.is_zero():
            return f"O(pi^{self.prec})"
        return f"pi^{self.shift}*{list(self.coords)} + O(pi^{self.prec})"

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "PadicNumber"):
        if self.ring is not other.ring:
            raise StructureMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "PadicNumber") -> "PadicNumber":
        self._check(other)
        prec = min(self.prec, other.prec)
        s = min(self.shift, other.shift)
        a = self.coords
        for _ in range(self.shift - s):
            a = self.ring.mul_pi_raw(a)
        b = other.coords
        for _ in range(other.shift - s):
            b = self.ring.mul_pi_raw(b)
        return self.ring.make(s, tuple(x + y for x, y in zip(a, b)), prec)

    def __neg__(self) -> "PadicNumber":
        return self.ring.make(self.shift, tuple(-c for c in self.coords), self.prec)

    def __sub__(self, other: "PadicNumber") -> "PadicNumber":
        return self + (-other)

    def __mul__(self, other: "PadicNumber") -> "PadicNumber":
        self._check(other)
        prec = min(self.shift + other.prec, other.shift + self.prec)
        return self.ring.make(self.shift + other.shift,
                              self.ring.mul_raw(self.coords, other.coords), prec)

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise PrecisionExhausted("cannot invert a value indistinguishable from 0")
        m = self.prec - self.shift
        inv = self.ring.inv_coords(self.coords, m)
        return PadicNumber(self.ring, -self.shift, inv, m - self.shift)

    def __truediv__(self, other: "PadicNumber") -> "PadicNumber":
        return self * other.inverse()

    def __pow__(self, n: int) -> "PadicNumber":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one(self.prec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


# --------------------------------------------------------------------------
# module operations


def valuation(x: PadicNumber):
    """v(x) in pi-units when visible at x's precision, else AT_LEAST(prec)."""
    return x.valuation()


def _tonelli_shanks(n: int, p: int) -> int:
    """Square root of a quadratic residue n in F_p, p an odd prime."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    s, q = 0, p - 1
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def hensel_sqrt(a: PadicNumber) -> PadicNumber:
    """Square root of a unit whose residue is a nonzero square mod p.

    Of the two roots, returns the one whose residue lies in {1, ..., (p-1)/2}
    so that downstream Frobenius exponents are reproducible.
    """
    ring = a.ring
    p = ring.p
    if a.valuation() != 0:
        raise ZeroInput("argument must be a unit (exact valuation 0)")
    res = a.residue()
    if any(c != 0 for c in res[1:]):
        raise NotAResidue("residue lies outside the prime field")
    r0 = res[0]
    if pow(r0, (p - 1) // 2, p) != 1:
        raise NotAResidue(f"{r0} is not a square mod {p}")
    x0 = _tonelli_shanks(r0, p)
    x0 = min(x0, p - x0)
    y = ring.from_int(x0, a.prec)
    half = ring.from_int(2, a.prec).inverse()
    for _ in range(a.prec.bit_length() + 4):
        err = y * y - a
        if err.is_zero():
            break
        y = (y + a / y) * half
    else:
        raise PrecisionExhausted("square-root iteration failed to converge")
    if y.residue()[0] > (p - 1) // 2:
        y = -y
    return y


def _log_term_indices(vx: int, M: int, p: int, e: int):
    """Indices k whose series term x^k/k can matter below pi^M, plus the
    documented output precision (the standard loss bound for division by k)."""
    ks = []
    out_prec = M
    k = 0
    while True:
        k += 1
        vk = 0
        kk = k
        while kk % p == 0:
            kk //= p
            vk += 1
        term_val = k * vx - e * vk
        if term_val < M:
            ks.append((k, vk))
        out_prec = min(out_prec, (k - 1) * vx + M - e * vk)
        # conservative stopping rule: once the digit-length lower bound on all
        # later terms clears M (with margin for one more carry dip), stop.
        digits = len_base = 0
        kk = k + 1
        while kk:
            kk //= p
            len_base += 1
        digits = len_base - 1
        if k >= p and (k + 1) * vx - e * digits >= M + 2 * e + 2:
            break
        if k > 64 * (M + 4):
            raise PrecisionExhausted("log series failed to terminate")
    return ks, out_prec


def padic_log(u: PadicNumber) -> PadicNumber:
    """Iwasawa logarithm of a principal unit (u = 1 mod pi).

    The series sum(-1)^(k+1) (u-1)^k / k is evaluated on the exact integer
    representative with rational coefficients, then reduced; the output
    precision accounts for the valuation loss of the divisions by k.
    """
    ring = u.ring
    one = ring.one(u.prec)
    if u.valuation() != 0 or u.residue() != one.residue():
        raise NotPrincipal("argument is not congruent to 1 mod pi")
    x = u - one
    if x.is_zero():
        return ring.zero(x.prec)
    vx = x.valuation()
    M = x.prec
    ks, out_prec = _log_term_indices(vx, M, ring.p, ring.e)
    x_exact = x.value_coords()
    acc = [Fraction(0)] * ring.degree
    power = (1,) + (0,) * (ring.degree - 1)
    prev_k = 0
    for k, _vk in ks:
        for _ in range(k - prev_k):
            power = ring.mul_raw(power, x_exact)
        prev_k = k
        sign = 1 if k % 2 == 1 else -1
        for idx in range(ring.degree):
            acc[idx] += Fraction(sign * power[idx], k)
    coords = []
    headroom = ring.p ** (out_prec + ring.e + 1)
    for q in acc:
        if q.denominator % ring.p == 0:
            raise PrecisionExhausted("log series produced a non-integral value")
        coords.append(q.numerator * pow(q.denominator, -1, headroom) % headroom)
    return ring.from_coords(coords, out_prec)


def teichmuller_part(u: PadicNumber) -> PadicNumber:
    """The (p^f - 1)-th root of unity congruent to u mod pi."""
    if u.valuation() != 0:
        raise NonUnit("Teichmuller part requires a unit")
    q = u.ring.p ** u.ring.f
    t = u
    for _ in range(u.ring.e * u.prec + 8):
        t_next = t ** q
        if t_next.coords == t.coords and t_next.shift == t.shift:
            return t_next
        t = t_next
    raise PrecisionExhausted("Teichmuller iteration failed to converge")
