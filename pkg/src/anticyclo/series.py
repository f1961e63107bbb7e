"""Truncated power-series arithmetic over O_v in T = gamma0 - 1.

An IwasawaElement is a degree-D truncation whose coefficients all carry one
shared absolute precision M.  The mu/lambda extraction implements the
Weierstrass-preparation invariants by the first-minimal-valuation scan; the
explicit division algorithm is kept out of production and lives in the test
suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AllZero, PrecisionExhausted, StructureMismatch
from .padic import AtLeast, LocalRing, PadicNumber

CERTAIN = "CERTAIN"
PRECISION_LIMITED = "PRECISION_LIMITED"


@dataclass(frozen=True)
class Ledger:
    """Precision bookkeeping attached to a series."""

    nominal: int
    exhausted: bool = False
    note: str = ""


@dataclass(frozen=True)
class MuLambda:
    mu: int
    lam: int
    certainty: str

    def as_pair(self) -> tuple[int, int]:
        return (self.mu, self.lam)


@dataclass(frozen=True)
class IwasawaElement:
    ring: LocalRing
    coeffs: tuple[PadicNumber, ...]
    prec: int
    ledger: Ledger

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> PadicNumber:
        return self.coeffs[i]

    def constant_term(self) -> PadicNumber:
        return self.coeffs[0]

    def truncate(self, degree: int) -> "IwasawaElement":
        if degree >= self.degree:
            return self
        return _new(self.ring, self.coeffs[: degree + 1], self.ledger.note)

    def __repr__(self):
        vals = [c.valuation() for c in self.coeffs[: min(8, len(self.coeffs))]]
        return f"IwasawaElement(D={self.degree}, M={self.prec}, v={vals}...)"

    # -- ring operations -------------------------------------------------

    def _check(self, other: "IwasawaElement"):
        if self.ring is not other.ring:
            raise StructureMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "IwasawaElement") -> "IwasawaElement":
        self._check(other)
        d = min(self.degree, other.degree)
        return _new(self.ring,
                    [a + b for a, b in zip(self.coeffs[: d + 1], other.coeffs[: d + 1])])

    def __neg__(self) -> "IwasawaElement":
        return _new(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other: "IwasawaElement") -> "IwasawaElement":
        return self + (-other)

    def __mul__(self, other: "IwasawaElement") -> "IwasawaElement":
        self._check(other)
        d = min(self.degree, other.degree)
        out = [self.ring.zero(min(self.prec, other.prec)) for _ in range(d + 1)]
        for i, a in enumerate(self.coeffs[: d + 1]):
            if a.is_zero():
                continue
            for j in range(0, d + 1 - i):
                b = other.coeffs[j]
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return _new(self.ring, out)

    def scalar_mul(self, s: PadicNumber) -> "IwasawaElement":
        if s.ring is not self.ring:
            raise StructureMismatch("scalar lives in a different ring")
        return _new(self.ring, [c * s for c in self.coeffs])

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "p": self.ring.p,
            "e": self.ring.e,
            "f": self.ring.f,
            "M": self.prec,
            "D": self.degree,
            "coeffs": [str(c.lift()) for c in self.coeffs],
        }


def _new(ring: LocalRing, coeffs, note: str = "") -> IwasawaElement:
    prec = min(c.prec for c in coeffs)
    shared = tuple(c.with_precision(prec) for c in coeffs)
    exhausted = all(c.is_zero() for c in shared)
    return IwasawaElement(ring, shared, prec, Ledger(prec, exhausted, note))


def from_integers(ring: LocalRing, values, prec: int, degree: int | None = None) -> IwasawaElement:
    coeffs = [ring.from_int(v, prec) for v in values]
    if degree is not None:
        coeffs += [ring.zero(prec)] * (degree + 1 - len(coeffs))
    return _new(ring, coeffs)


def from_padic_coeffs(ring: LocalRing, coeffs) -> IwasawaElement:
    return _new(ring, list(coeffs))


def constant(ring: LocalRing, value: PadicNumber, degree: int) -> IwasawaElement:
    return _new(ring, [value] + [ring.zero(value.prec)] * degree)


def one(ring: LocalRing, degree: int, prec: int) -> IwasawaElement:
    return from_integers(ring, [1], prec, degree)


def from_json_dict(data: dict) -> IwasawaElement:
    from .padic import local_ring

    ring = local_ring(int(data["p"]), int(data.get("e", 1)), int(data.get("f", 1)))
    prec = int(data["M"])
    coeffs = [ring.from_coords(ring.unpack(int(s), prec), prec) for s in data["coeffs"]]
    return _new(ring, coeffs)


# ---------------------------------------------------------------------------
# operations


def binomial_max_prec(u: PadicNumber, degree: int) -> int:
    """Largest output precision binomial_series can certify for this exponent."""
    ring = u.ring
    p_digits = ring.coord_moduli(u.prec)[0]
    loss = 0
    k = degree
    while k >= ring.p:
        k //= ring.p
        loss += 1
    return ring.e * (p_digits - loss)


def binomial_series(u: PadicNumber, degree: int, prec: int) -> IwasawaElement:
    """(1+T)^u truncated at `degree`: coefficients C(u, k) computed exactly
    from the canonical representative of u.

    u must lie in Z_p.  Binomial coefficients lose floor(log_p k) digits of
    the exponent's precision; PRECISION_EXHAUSTED is raised when u does not
    carry enough digits to certify the requested precision at this degree.
    """
    ring = u.ring
    if u.shift < 0:
        raise StructureMismatch("exponent must be integral")
    coords = u.value_coords()
    if any(c != 0 for c in coords[1:]):
        raise StructureMismatch("exponent must lie in Z_p")
    u_int = coords[0]
    avail = binomial_max_prec(u, degree)
    if avail < prec:
        raise PrecisionExhausted(
            f"exponent precision supports M={avail} at degree {degree}, need {prec}")
    coeffs = [ring.from_int(math.comb(u_int, k), prec) for k in range(degree + 1)]
    return _new(ring, coeffs, note=f"binomial series, M'={min(prec, avail)}")


def mu_lambda(F: IwasawaElement) -> MuLambda:
    """Weierstrass invariants: mu = min coefficient valuation (in pi-units),
    lambda = first index attaining it.

    CERTAIN requires the minimum to be exactly visible and every earlier
    coefficient to be bounded strictly above it; otherwise the candidate pair
    is reported as PRECISION_LIMITED.  ALL_ZERO is raised when no coefficient
    is distinguishable from 0.
    """
    vals = [c.valuation() for c in F.coeffs]
    exact = [(v, i) for i, v in enumerate(vals) if not isinstance(v, AtLeast)]
    if not exact:
        raise AllZero(f"series indistinguishable from 0 at precision {F.prec}")
    mu = min(v for v, _ in exact)
    lam = min(i for v, i in exact if v == mu)
    certainty = CERTAIN
    for v in vals[:lam]:
        if isinstance(v, AtLeast) and v.bound <= mu:
            certainty = PRECISION_LIMITED
            break
    return MuLambda(mu, lam, certainty)


def substitute(F: IwasawaElement, g: IwasawaElement) -> IwasawaElement:
    """F(g(T)) truncated at deg F; g must have zero constant term."""
    F._check(g)
    if not g.coeffs[0].is_zero():
        raise StructureMismatch("substitution requires g(0) = 0")
    d = F.degree
    g = g.truncate(d)
    out = constant(F.ring, F.coeffs[d], d)
    for i in range(d - 1, -1, -1):
        out = out * g
        out = _new(F.ring, [out.coeffs[0] + F.coeffs[i]] + list(out.coeffs[1:]))
    return out


def doubling_map(F: IwasawaElement) -> IwasawaElement:
    """Image of F under the ring map induced by gamma -> gamma^2,
    i.e. T -> (1+T)^2 - 1 = 2T + T^2."""
    g = from_integers(F.ring, [0, 2, 1], F.prec, degree=F.degree)
    return substitute(F, g)


def inversion_involution(F: IwasawaElement) -> IwasawaElement:
    """Image of F under gamma -> gamma^{-1}, i.e. T -> (1+T)^{-1} - 1."""
    # (1+T)^{-1} - 1 = -T + T^2 - T^3 + ...
    vals = [0] + [(-1) ** k for k in range(1, F.degree + 1)]
    g = from_integers(F.ring, vals, F.prec)
    return substitute(F, g)
