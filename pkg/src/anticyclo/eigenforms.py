"""Weight-2 eigenform coefficient data: ingestion, validation, twisting,
level stabilization, Sturm bounds and coefficient-congruence verdicts.

Coefficient tables arrive from external dumps as JSON.  Entries are exact
integers or, for non-rational eigenvalues, little-endian comma-separated
base-p digit strings of the canonical packed representative at the declared
embedding (the number of digits is the pi-adic precision).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd, lcm
from pathlib import Path

from .errors import (
    DecompositionInvalid,
    DivisibilityViolation,
    EmbeddingMismatch,
    InvariantViolation,
    MissingCoefficient,
    NotCoprime,
    NotDivisible,
    NotFundamental,
    PreconditionFailed,
    SchemaError,
)
from .padic import AtLeast, LocalRing, local_ring
from .quadfield import is_fundamental_discriminant, kronecker, trial_factor

WILES_ORDINARY = "WILES_ORDINARY"
BOTH_NONORDINARY = "BOTH_NONORDINARY"
ORDINARITY_MISMATCH = "ORDINARITY_MISMATCH"
AP_UNAVAILABLE = "AP_UNAVAILABLE"


@dataclass(frozen=True)
class VadicCoefficient:
    """Coefficient image in O_v, known modulo pi^digits."""

    packed: int
    digits: int

    def serialize(self, p: int) -> str:
        out, n = [], self.packed
        for _ in range(self.digits):
            out.append(str(n % p))
            n //= p
        return ",".join(out)

    @classmethod
    def parse(cls, text: str, p: int) -> "VadicCoefficient":
        parts = [s.strip() for s in text.split(",")]
        digits = []
        for s in parts:
            if not s.lstrip("-").isdigit():
                raise SchemaError(f"bad digit {s!r} in coefficient string")
            d = int(s)
            if not 0 <= d < p:
                raise SchemaError(f"digit {d} out of range for p = {p}")
            digits.append(d)
        packed = 0
        for d in reversed(digits):
            packed = packed * p + d
        return cls(packed, len(digits))


Coefficient = int | VadicCoefficient


@dataclass(frozen=True)
class Embedding:
    p: int
    e: int = 1
    f: int = 1

    def ring(self) -> LocalRing:
        return local_ring(self.p, self.e, self.f)


@dataclass(frozen=True)
class EigenformRecord:
    label: str
    level: int
    weight: int
    an: tuple[Coefficient, ...]  # an[k] = a_{k+1}
    embedding: Embedding | None = None
    provenance: str = ""
    tate_valuations: tuple[tuple[int, int], ...] = ()

    @property
    def bound(self) -> int:
        return len(self.an)

    def a(self, n: int) -> Coefficient:
        if not 1 <= n <= self.bound:
            raise MissingCoefficient(f"a_{n} of {self.label} not available (B = {self.bound})")
        return self.an[n - 1]

    def a_padic(self, n: int, ring: LocalRing, prec: int):
        return coeff_to_padic(self.a(n), ring, prec)

    def tate_valuation(self, q: int) -> int | None:
        for prime, v in self.tate_valuations:
            if prime == q:
                return v
        return None

    def to_json_dict(self) -> dict:
        out = {
            "label": self.label,
            "level": self.level,
            "weight": self.weight,
            "an": [c if isinstance(c, int) else c.serialize(self.embedding.p) for c in self.an],
        }
        if self.embedding is not None:
            out["embedding"] = {"p": self.embedding.p, "e": self.embedding.e,
                                "f": self.embedding.f}
        if self.provenance:
            out["provenance"] = self.provenance
        if self.tate_valuations:
            out["tate_valuations"] = {str(q): v for q, v in self.tate_valuations}
        return out


def coeff_to_padic(c: Coefficient, ring: LocalRing, prec: int):
    if isinstance(c, int):
        return ring.from_int(c, prec)
    coords = ring.unpack(c.packed, c.digits)
    return ring.from_coords(coords, min(prec, c.digits))


def coeff_mul(a: Coefficient, b: Coefficient, ring: LocalRing | None) -> Coefficient:
    if isinstance(a, int) and isinstance(b, int):
        return a * b
    if ring is None:
        raise EmbeddingMismatch("non-rational coefficients need an embedding")
    prec = min(x.digits for x in (a, b) if isinstance(x, VadicCoefficient))
    pa = coeff_to_padic(a, ring, prec)
    pb = coeff_to_padic(b, ring, prec)
    prod = pa * pb
    return VadicCoefficient(prod.lift(), prod.prec)


def coeff_times_sign(c: Coefficient, sign: int, ring: LocalRing | None) -> Coefficient:
    if isinstance(c, int):
        return c * sign
    if sign == 0:
        return 0
    if sign == 1:
        return c
    neg = -coeff_to_padic(c, ring, c.digits)
    return VadicCoefficient(neg.lift(), neg.prec)


def _diff_val_at_least(a, b, ring, k):
    """a = b mod pi^k."""
    d = coeff_to_padic(a, ring, k) - coeff_to_padic(b, ring, k)
    v = d.valuation()
    return isinstance(v, AtLeast) or v >= k


# ---------------------------------------------------------------------------
# loading and validation


def _parse_embedding(data) -> Embedding:
    try:
        return Embedding(int(data["p"]), int(data.get("e", 1)), int(data.get("f", 1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad embedding block: {data!r}") from exc


def load_form(source, validate_record: bool = True) -> EigenformRecord:
    """Load and validate an eigenform record from a JSON file or dict."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = source
    if not isinstance(data, dict):
        raise SchemaError("form file must contain a JSON object")
    for key in ("label", "level", "weight", "an"):
        if key not in data:
            raise SchemaError(f"missing required key {key!r}")
    if data["weight"] != 2:
        raise SchemaError(f"weight must be 2, got {data['weight']}")
    level = int(data["level"])
    if level < 1:
        raise SchemaError(f"level must be positive, got {level}")
    embedding = _parse_embedding(data["embedding"]) if "embedding" in data else None
    an = []
    for i, entry in enumerate(data["an"], start=1):
        if isinstance(entry, int):
            an.append(entry)
        elif isinstance(entry, str):
            if embedding is None:
                raise SchemaError(f"a_{i} is a digit string but no embedding is declared")
            an.append(VadicCoefficient.parse(entry, embedding.p))
        else:
            raise SchemaError(f"a_{i} has unsupported type {type(entry).__name__}")
    tate = tuple(sorted((int(q), int(v))
                        for q, v in data.get("tate_valuations", {}).items()))
    record = EigenformRecord(
        label=str(data["label"]),
        level=level,
        weight=2,
        an=tuple(an),
        embedding=embedding,
        provenance=str(data.get("provenance", "")),
        tate_valuations=tate,
    )
    if validate_record:
        problems = validate(record)
        if problems:
            raise InvariantViolation("; ".join(problems))
    return record


def validate(record: EigenformRecord) -> list[str]:
    """Multiplicativity and good-prime Hecke recursion checks.

    Comparisons are exact for integer tables and modulo the available
    pi-precision for embedded ones.
    """
    problems = []
    B = record.bound
    if B < 1 or record.a(1) != 1 and not _is_one(record.a(1), record):
        return [f"a_1 must be 1 (got {record.an[0] if record.an else 'nothing'})"]
    ring = record.embedding.ring() if record.embedding else None
    exclude = {q for q, _ in trial_factor(record.level)}
    if record.embedding:
        exclude.add(record.embedding.p)

    def same(x, y):
        if isinstance(x, int) and isinstance(y, int):
            return x == y
        k = min(c.digits for c in (x, y) if isinstance(c, VadicCoefficient))
        return _diff_val_at_least(x, y, ring, k)

    for m in range(2, B + 1):
        for n in range(m, B // m + 1):
            if gcd(m, n) != 1:
                continue
            if not same(record.a(m * n), coeff_mul(record.a(m), record.a(n), ring)):
                problems.append(f"a_{m}*a_{n} != a_{m * n}")
                if len(problems) > 4:
                    return problems
    for q in primes_up_to(B):
        if q in exclude:
            continue
        k = 1
        # a_{q^{k+1}} = a_q a_{q^k} - q a_{q^{k-1}} at good primes
        while q ** (k + 1) <= B:
            lhs = record.a(q ** (k + 1))
            rhs = _coeff_sub(coeff_mul(record.a(q), record.a(q ** k), ring),
                             coeff_mul(q, record.a(q ** (k - 1)), ring), ring)
            if not same(lhs, rhs):
                problems.append(f"Hecke recursion fails at q={q}, k={k}")
                break
            k += 1
    return problems


def _is_one(c: Coefficient, record: EigenformRecord) -> bool:
    if isinstance(c, int):
        return c == 1
    ring = record.embedding.ring()
    return _diff_val_at_least(c, 1, ring, c.digits)


def _coeff_sub(a: Coefficient, b: Coefficient, ring) -> Coefficient:
    if isinstance(a, int) and isinstance(b, int):
        return a - b
    prec = min(x.digits for x in (a, b) if isinstance(x, VadicCoefficient))
    d = coeff_to_padic(a, ring, prec) - coeff_to_padic(b, ring, prec)
    return VadicCoefficient(d.lift(), d.prec)


def primes_up_to(B: int) -> list[int]:
    flags = bytearray([1]) * (B + 1)
    out = []
    for q in range(2, B + 1):
        if flags[q]:
            out.append(q)
            for m in range(q * q, B + 1, q):
                flags[m] = 0
    return out


# ---------------------------------------------------------------------------
# twisting and stabilization


def twist(record: EigenformRecord, disc: int) -> EigenformRecord:
    """Quadratic twist by the character attached to a fundamental discriminant.

    Requires the discriminant to be coprime to the level (and to p when an
    embedding is declared); the twisted level is N * disc^2.
    """
    if disc == 1:
        return record
    if not is_fundamental_discriminant(disc):
        raise NotFundamental(f"{disc} is not a fundamental discriminant")
    if record.embedding and abs(disc) % record.embedding.p == 0:
        raise NotCoprime(f"disc {disc} not coprime to p = {record.embedding.p}")
    ring = record.embedding.ring() if record.embedding else None
    an = tuple(coeff_times_sign(record.a(n), kronecker(disc, n), ring)
               for n in range(1, record.bound + 1))
    if gcd(disc, record.level) == 1:
        new_level = record.level * disc * disc
    else:
        # upper bound on the twisted level when conductors overlap
        new_level = lcm(record.level, disc * disc)
    return EigenformRecord(
        label=f"{record.label}.twist({disc})",
        level=new_level,
        weight=2,
        an=an,
        embedding=record.embedding,
        provenance=f"quadratic twist of {record.label} by {disc}",
    )


def stabilize_fcheck(record: EigenformRecord, N: int,
                     minus_part: int | None = None) -> EigenformRecord:
    """Level-raised eigenform: zero out a_q at the primes of N / N' and
    rebuild composite coefficients multiplicatively.

    Every q | N/N' must satisfy q^2 | N.  When the inert part of N' is
    supplied and nontrivial, N' must be square-free.
    """
    Np = record.level
    if N % Np:
        raise NotDivisible(f"form level {Np} does not divide target level {N}")
    jump = N // Np
    killed = sorted(q for q, _ in trial_factor(jump))
    for q in killed:
        e = 0
        m = N
        while m % q == 0:
            m //= q
            e += 1
        if e < 2:
            raise DivisibilityViolation(f"q = {q} divides N/N' but q^2 does not divide N")
    if minus_part is not None and minus_part != 1:
        if any(e > 1 for _q, e in trial_factor(Np)):
            raise PreconditionFailed(
                f"N' = {Np} has an inert part but is not square-free")
    if not killed:
        return record
    ring = record.embedding.ring() if record.embedding else None
    killed_set = set(killed)
    B = record.bound
    an: list[Coefficient] = [1] + [0] * (B - 1)
    for n in range(2, B + 1):
        value: Coefficient = 1
        for q, e in trial_factor(n):
            if q in killed_set:
                value = 0
                break
            value = coeff_mul(value, record.a(q ** e), ring)
        an[n - 1] = value
    return EigenformRecord(
        label=f"{record.label}.stab({N})",
        level=N,
        weight=2,
        an=tuple(an),
        embedding=record.embedding,
        provenance=f"stabilization of {record.label} from level {Np} to {N}",
        tate_valuations=record.tate_valuations,
    )


def sturm_bound(N: int) -> int:
    """ceil(k/12 * [SL2(Z) : Gamma0(N)]) with k = 2."""
    if N < 1:
        raise ValueError("level must be positive")
    idx = N
    for q, _e in trial_factor(N):
        idx = idx // q * (q + 1)
    return (idx + 5) // 6


# ---------------------------------------------------------------------------
# congruence verdicts


@dataclass(frozen=True)
class CongruenceVerdict:
    holds: bool | None  # None = UNKNOWN
    prec: int
    common_level: int
    sturm: int
    checked_bound: int
    witnesses: tuple[int, ...]
    excluded: tuple[int, ...]
    ap_rule: str
    notes: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "holds": "UNKNOWN" if self.holds is None else self.holds,
            "prec": self.prec,
            "common_level": self.common_level,
            "sturm_bound": self.sturm,
            "checked_bound": self.checked_bound,
            "witnesses": list(self.witnesses),
            "excluded": list(self.excluded),
            "ap_rule": self.ap_rule,
            "notes": list(self.notes),
        }


def _shared_ring(f1: EigenformRecord, f2: EigenformRecord, p: int) -> LocalRing:
    embs = [f.embedding for f in (f1, f2) if f.embedding is not None]
    for a in embs:
        for b in embs:
            if (a.p, a.e, a.f) != (b.p, b.e, b.f):
                raise EmbeddingMismatch(f"{a} vs {b}")
    if embs:
        if embs[0].p != p:
            raise EmbeddingMismatch(f"records embedded at p = {embs[0].p}, asked for {p}")
        return embs[0].ring()
    return local_ring(p)


def check_congruence(f1: EigenformRecord, f2: EigenformRecord, p: int, k: int = 1,
                     common_level: int | None = None) -> CongruenceVerdict:
    """Coefficientwise congruence a_n(f1) = a_n(f2) mod pi^k up to the Sturm
    bound of (common level) * p, away from the level primes.

    The prime p itself is not blindly excluded: when both forms are
    p-ordinary the unit-root argument tag is recorded (and the congruence is
    checked mod pi); when both are non-ordinary both a_p vanish mod pi and
    the corresponding tag is recorded.  A mixed pair is a witness at p.
    """
    ring = _shared_ring(f1, f2, p)
    if common_level is None:
        common_level = _square_common_level(f1.level, f2.level)
    sturm = sturm_bound(common_level * p)
    excluded = sorted({q for q, _ in trial_factor(f1.level * f2.level)})
    checked = min(f1.bound, f2.bound, sturm)
    witnesses = []
    notes = []
    for n in range(1, checked + 1):
        if any(n % q == 0 for q in excluded) or n % p == 0:
            continue
        if not _diff_val_at_least(f1.a(n), f2.a(n), ring, k):
            witnesses.append(n)
    ap_rule = AP_UNAVAILABLE
    if p <= min(f1.bound, f2.bound) and all(f.level % p for f in (f1, f2)):
        v1 = coeff_to_padic(f1.a(p), ring, max(k, 1)).valuation()
        v2 = coeff_to_padic(f2.a(p), ring, max(k, 1)).valuation()
        ord1 = (not isinstance(v1, AtLeast)) and v1 == 0
        ord2 = (not isinstance(v2, AtLeast)) and v2 == 0
        if ord1 and ord2:
            ap_rule = WILES_ORDINARY
            if not _diff_val_at_least(f1.a(p), f2.a(p), ring, 1):
                witnesses.append(p)
                notes.append("ordinary a_p values disagree mod pi")
        elif not ord1 and not ord2:
            ap_rule = BOTH_NONORDINARY
        else:
            ap_rule = ORDINARITY_MISMATCH
            witnesses.append(p)
            notes.append("one form is p-ordinary and the other is not")
    if k > 1 and ap_rule in (WILES_ORDINARY, BOTH_NONORDINARY):
        notes.append("a_p congruence certified mod pi only")
    if k > 1:
        notes.append("Sturm certification is a mod-pi statement; depth-k "
                     "agreement is verified on the checked range only")
    notes.append("trace congruence certifies the residual isomorphism up to "
                 "semisimplification only")
    if witnesses:
        holds = False
    elif checked >= sturm:
        holds = True
    else:
        holds = None
        notes.append(f"coefficient tables stop at {checked} < Sturm bound {sturm}")
    return CongruenceVerdict(
        holds=holds,
        prec=k,
        common_level=common_level,
        sturm=sturm,
        checked_bound=checked,
        witnesses=tuple(sorted(set(witnesses))),
        excluded=tuple(excluded),
        ap_rule=ap_rule,
        notes=tuple(notes),
    )


def _square_common_level(n1: int, n2: int) -> int:
    from math import lcm

    N = lcm(n1, n2)
    out = 1
    for q, e in trial_factor(N):
        out *= q ** (e + (e % 2))
    return out


def congruence_witness_primes(f1: EigenformRecord, f2: EigenformRecord, p: int) -> list[int]:
    """Level primes where the two coefficient tables disagree mod pi."""
    ring = _shared_ring(f1, f2, p)
    from math import lcm

    out = []
    for q, _e in trial_factor(lcm(f1.level, f2.level)):
        if q > min(f1.bound, f2.bound):
            raise MissingCoefficient(f"a_{q} beyond table bound")
        if not _diff_val_at_least(f1.a(q), f2.a(q), ring, 1):
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# partial Eisenstein descent


@dataclass(frozen=True)
class EisensteinVerdict:
    holds: bool
    decomposition: tuple[int, int, int]
    characters: tuple[int, int]
    checked_primes: int
    witnesses: tuple[tuple[int, str], ...]

    def to_json_dict(self) -> dict:
        return {
            "holds": self.holds,
            "N1": self.decomposition[0],
            "N2": self.decomposition[1],
            "N0": self.decomposition[2],
            "phi_disc": self.characters[0],
            "psi_disc": self.characters[1],
            "checked_primes": self.checked_primes,
            "witnesses": [{"l": q, "family": fam} for q, fam in self.witnesses],
        }


def check_partial_eisenstein(record: EigenformRecord, phi_disc: int, psi_disc: int,
                             n1: int, n2: int, n0: int, p: int,
                             prime_bound: int | None = None) -> EisensteinVerdict:
    """Verify a_l = phi(l) + l psi(l) generically, a_l = phi(l) at l | N1,
    a_l = l psi(l) at l | N2 and a_l = 0 at l | N0, all mod pi.

    phi and psi are the quadratic characters of the given fundamental
    discriminants (1 = trivial).
    """
    for d in (phi_disc, psi_disc):
        if d != 1 and not is_fundamental_discriminant(d):
            raise NotFundamental(f"{d} is not a fundamental discriminant")
    if n1 * n2 * n0 != record.level:
        raise DecompositionInvalid(
            f"N1*N2*N0 = {n1 * n2 * n0} is not the level {record.level}")
    if gcd(n1, n2) != 1 or gcd(n1, n0) != 1 or gcd(n2, n0) != 1:
        raise DecompositionInvalid("decomposition blocks are not pairwise coprime")
    if any(e > 1 for _q, e in trial_factor(n1 * n2)):
        raise DecompositionInvalid(f"N1*N2 = {n1 * n2} is not square-free")
    ring = _shared_ring(record, record, p)
    bound = min(record.bound, prime_bound) if prime_bound else record.bound
    witnesses = []
    checked = 0
    for q in primes_up_to(bound):
        checked += 1
        phi_q = 1 if phi_disc == 1 else kronecker(phi_disc, q)
        psi_q = 1 if psi_disc == 1 else kronecker(psi_disc, q)
        if n1 % q == 0:
            expect, family = phi_q, "N1"
        elif n2 % q == 0:
            expect, family = q * psi_q, "N2"
        elif n0 % q == 0:
            expect, family = 0, "N0"
        else:
            expect, family = phi_q + q * psi_q, "generic"
        if not _diff_val_at_least(record.a(q), expect, ring, 1):
            witnesses.append((q, family))
    return EisensteinVerdict(
        holds=not witnesses,
        decomposition=(n1, n2, n0),
        characters=(phi_disc, psi_disc),
        checked_primes=checked,
        witnesses=tuple(witnesses),
    )
