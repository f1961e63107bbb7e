"""Imaginary quadratic field context: Kronecker symbols, class numbers by
reduced-form enumeration, level factorizations N = N+ * N- and the
generalized Heegner condition on N-."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import BoundExceeded, NotCoprime, NotFundamental, PreconditionFailed
from .padic import LocalRing, PadicNumber, hensel_sqrt, is_prime, local_ring

SPLIT = "SPLIT"
INERT = "INERT"
RAMIFIED = "RAMIFIED"

CLASS_NUMBER_BOUND = 10 ** 6


def _jacobi(a: int, m: int) -> int:
    # m odd positive
    a %= m
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 1, with the standard convention at 2."""
    if n < 1:
        raise ValueError("n must be positive")
    if d == 0:
        raise ValueError("d must be nonzero")
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    return result * _jacobi(d, n)


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    q = 3
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    if d == 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        q = d // 4
        return q % 4 in (2, 3) and _squarefree(q)
    return False


def class_number(d: int, bound: int = CLASS_NUMBER_BOUND) -> int:
    """Number of reduced primitive forms (a, b, c) of discriminant d < 0."""
    if d >= 0 or not is_fundamental_discriminant(d):
        raise NotFundamental(f"{d} is not a negative fundamental discriminant")
    if -d > bound:
        raise BoundExceeded(f"|d| = {-d} exceeds the configured bound {bound}")
    h = 0
    for a in range(1, isqrt(-d // 3) + 1):
        b0 = -a if (a - d) % 2 == 0 else -a + 1
        for b in range(b0, a + 1, 2):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            h += 1
    return h


@dataclass(frozen=True)
class LevelFactorization:
    N: int
    N_plus: int
    N_minus: int
    classification: tuple[tuple[int, int, str], ...]  # (prime, exponent, class)

    def primes(self, which: str | None = None):
        return [q for q, _e, c in self.classification if which is None or c == which]

    def exponent(self, q: int) -> int:
        for prime, e, _c in self.classification:
            if prime == q:
                return e
        return 0

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "N_plus": self.N_plus,
            "N_minus": self.N_minus,
            "primes": [{"q": q, "exp": e, "class": c} for q, e, c in self.classification],
        }


def trial_factor(n: int) -> list[tuple[int, int]]:
    out = []
    for q in [2, 3]:
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
    q = 5
    step = 2
    while q * q <= n:
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
        q += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class QuadFieldContext:
    """Imaginary quadratic field K with a fixed prime above p.

    split_root is the square root of d_K in O_v chosen by hensel_sqrt's
    deterministic branch; it pins down which prime above p is used when
    embedding K.  The conjugate choice only flips Frobenius exponents, which
    leaves every lambda-invariant unchanged.
    """

    disc: int
    p: int
    h: int
    prec: int
    ring: LocalRing
    split_root: PadicNumber

    @classmethod
    def create(cls, disc: int, p: int, prec: int = 12,
               ring: LocalRing | None = None) -> "QuadFieldContext":
        if not is_fundamental_discriminant(disc) or disc >= 0:
            raise NotFundamental(f"{disc} is not a negative fundamental discriminant")
        if p < 3 or not is_prime(p):
            raise PreconditionFailed(f"p = {p} must be an odd prime")
        if kronecker(disc, p) != 1:
            raise PreconditionFailed(f"p = {p} does not split in Q(sqrt({disc}))")
        h = class_number(disc)
        if h % p == 0:
            raise PreconditionFailed(f"class number {h} is divisible by p = {p}")
        if ring is None:
            ring = local_ring(p)
        root = hensel_sqrt(ring.from_int(disc, prec))
        return cls(disc, p, h, prec, ring, root)

    def splitting_of(self, q: int) -> int:
        return kronecker(self.disc, q)

    def to_json_dict(self) -> dict:
        return {"disc": self.disc, "p": self.p, "h": self.h, "prec": self.prec}


def factor_level(N: int, disc: int, p: int | None = None) -> LevelFactorization:
    """Classify the primes of N as split/inert for Q(sqrt(disc)).

    Ramified primes (and p itself when given) violate the standing
    coprimality assumption and are a hard error.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if gcd(N, disc) != 1:
        raise NotCoprime(f"gcd(N, d_K) = {gcd(N, disc)} > 1")
    if p is not None and N % p == 0:
        raise NotCoprime(f"p = {p} divides N = {N}")
    classification = []
    n_plus = n_minus = 1
    for q, e in trial_factor(N):
        s = kronecker(disc, q)
        if s == 1:
            classification.append((q, e, SPLIT))
            n_plus *= q ** e
        elif s == -1:
            classification.append((q, e, INERT))
            n_minus *= q ** e
        else:
            raise NotCoprime(f"q = {q} ramifies in Q(sqrt({disc}))")
    return LevelFactorization(N, n_plus, n_minus, tuple(classification))


def check_ghh(fact: LevelFactorization) -> tuple[bool, str]:
    """N- must be a square-free product of an even number of primes."""
    inert = [(q, e) for q, e, c in fact.classification if c == INERT]
    if any(e > 1 for _q, e in inert):
        return False, f"N- = {fact.N_minus} is not square-free"
    if len(inert) % 2 == 1:
        return False, f"N- = {fact.N_minus} has an odd number of prime factors"
    return True, f"N- = {fact.N_minus} is a square-free product of {len(inert)} primes"
