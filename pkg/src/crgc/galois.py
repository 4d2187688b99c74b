"""Exact arithmetic in finite fields GF(p^m) of prime-power order.

An element is stored as a canonical integer in ``[0, q)`` whose base-p
digits, least significant first, are the coefficients of the reduced
residue polynomial.  For a prime field (``m == 1``) the integer is the
residue itself.  Enumerating elements by this integer gives the
canonical order 0, 1, ..., p-1, x, x+1, ... used for default
evaluation points.

Extension fields reduce modulo a monic irreducible polynomial chosen
deterministically: the lexicographically smallest monic irreducible of
degree m (coefficients compared from the highest degree down), verified
irreducible by trial division against every lower-degree monic
polynomial.  Determinism makes serialized data reproducible across
builds and processes.

The reference arithmetic is table-free schoolbook polynomial algebra.
Fields of order at most 2**16 lazily build log/antilog tables on first
use; the tables are generated with the schoolbook kernel and therefore
agree with it bit for bit.

Wire format: an element packs its coefficient vector highest degree
first, ceil(log2 p) bits per coefficient, into
ceil(m*ceil(log2 p)/8) big-endian bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

MAX_ORDER = 2**64 - 1  # field order must fit an unsigned 64-bit quantity

_TABLE_LIMIT = 1 << 16

# Witness set proving primality for every candidate below 3.3 * 10**24,
# which covers the 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class SymbolRangeError(ValueError):
    """A byte group does not decode to a canonical field element."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
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


def _iroot(n: int, k: int) -> int:
    """Largest x with x**k <= n."""
    if k == 1 or n < 2:
        return n
    x = int(round(n ** (1.0 / k)))
    while x > 1 and x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, m) with q = p**m and p prime, or None."""
    if q < 2:
        return None
    for m in range(1, q.bit_length() + 1):
        p = _iroot(q, m)
        if p**m == q and is_prime(p):
            return p, m
    return None


def _digits(v: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(v % p)
        v //= p
    return out


def _undigits(ds: list[int], p: int) -> int:
    v = 0
    for d in reversed(ds):
        v = v * p + d
    return v


def _poly_rem(f: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of f modulo monic g, dense ascending coefficients."""
    r = list(f)
    dg = len(g) - 1
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i]
        if c:
            for j in range(dg):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % p
            r[i] = 0
    return r[:dg]


def _is_irreducible(p: int, coeffs: tuple[int, ...]) -> bool:
    """Trial division of the monic polynomial x^m + coeffs against every
    monic polynomial of degree 1..m//2."""
    m = len(coeffs)
    f = list(coeffs) + [1]
    for deg in range(1, m // 2 + 1):
        for idx in range(p**deg):
            g = _digits(idx, p, deg) + [1]
            if not any(_poly_rem(f, g, p)):
                return False
    return True


def _pick_irreducible(p: int, m: int) -> tuple[int, ...]:
    # Ascending base-p encoding of the non-leading coefficients sorts by
    # the highest-degree coefficient first, i.e. lexicographically.
    for idx in range(p**m):
        coeffs = tuple(_digits(idx, p, m))
        if _is_irreducible(p, coeffs):
            return coeffs
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^m), with its reduction polynomial for m > 1.

    ``irreducible`` holds the non-leading coefficients (c0, ..., c_{m-1})
    of the monic modulus x^m + c_{m-1} x^{m-1} + ... + c0, ascending; it
    is empty for prime fields.  Passing an empty tuple with m > 1 selects
    the deterministic default.  Instances are immutable and safe to share.
    """

    p: int
    m: int = 1
    irreducible: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"field characteristic {self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be at least 1")
        if self.p**self.m > MAX_ORDER:
            raise ValueError("field order exceeds 64 bits")
        if self.m == 1:
            if self.irreducible:
                raise ValueError("prime fields take no reduction polynomial")
            return
        if not self.irreducible:
            object.__setattr__(self, "irreducible", _pick_irreducible(self.p, self.m))
            return
        if len(self.irreducible) != self.m:
            raise ValueError("reduction polynomial must list exactly m coefficients")
        if any(not (0 <= c < self.p) for c in self.irreducible):
            raise ValueError("reduction polynomial coefficients out of range")
        if not _is_irreducible(self.p, self.irreducible):
            raise ValueError("reduction polynomial is reducible")

    @cached_property
    def order(self) -> int:
        return self.p**self.m

    @cached_property
    def coeff_bits(self) -> int:
        return (self.p - 1).bit_length()

    @cached_property
    def symbol_width(self) -> int:
        """Serialized size of one element, in bytes."""
        return (self.m * self.coeff_bits + 7) // 8

    @cached_property
    def _irr_mask(self) -> int:
        # Characteristic-2 modulus as a bit mask including the leading term.
        bits = 0
        for i, c in enumerate(self.irreducible):
            if c:
                bits |= 1 << i
        return bits | (1 << self.m)

    @cached_property
    def _logexp(self) -> tuple[list[int], list[int]] | None:
        q = self.order
        if q > _TABLE_LIMIT:
            return None
        if q == 2:
            return [1], [0, 0]
        factors = _prime_factors(q - 1)
        gen = 0
        for cand in range(2, q):
            if all(self._pow_schoolbook(cand, (q - 1) // f) != 1 for f in factors):
                gen = cand
                break
        exp = [0] * (q - 1)
        log = [0] * q
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self._mul_schoolbook(v, gen)
        return exp, log

    # -- index arithmetic ------------------------------------------------

    def add_i(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        da = _digits(a, p, self.m)
        db = _digits(b, p, self.m)
        return _undigits([(x + y) % p for x, y in zip(da, db)], p)

    def neg_i(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p = self.p
        return _undigits([(-x) % p for x in _digits(a, p, self.m)], p)

    def sub_i(self, a: int, b: int) -> int:
        return self.add_i(a, self.neg_i(b))

    def _mul_schoolbook(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        if m == 1:
            return a * b % p
        if p == 2:
            red = self._irr_mask
            top = 1 << m
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a & top:
                    a ^= red
            return r
        da = _digits(a, p, m)
        db = _digits(b, p, m)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    if y:
                        prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(2 * m - 2, m - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                base = i - m
                for j, cj in enumerate(self.irreducible):
                    if cj:
                        prod[base + j] = (prod[base + j] - c * cj) % p
        return _undigits(prod[:m], p)

    def _pow_schoolbook(self, a: int, e: int) -> int:
        if self.m == 1:
            return pow(a, e, self.p)
        r = 1
        while e:
            if e & 1:
                r = self._mul_schoolbook(r, a)
            a = self._mul_schoolbook(a, a)
            e >>= 1
        return r

    def mul_i(self, a: int, b: int) -> int:
        tables = self._logexp
        if tables is not None:
            if a == 0 or b == 0:
                return 0
            exp, log = tables
            return exp[(log[a] + log[b]) % (self.order - 1)]
        return self._mul_schoolbook(a, b)

    def inv_i(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        tables = self._logexp
        if tables is not None:
            exp, log = tables
            return exp[(self.order - 1 - log[a]) % (self.order - 1)]
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._pow_schoolbook(a, self.order - 2)

    def pow_i(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("exponent must be non-negative")
        if e == 0:
            return 1
        if a == 0:
            return 0
        tables = self._logexp
        if tables is not None:
            exp, log = tables
            return exp[(log[a] * e) % (self.order - 1)]
        if self.m == 1:
            return pow(a, e, self.p)
        return self._pow_schoolbook(a, e)

    # -- element construction and packing ---------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def from_coeffs(self, coeffs) -> "FieldElement":
        cs = list(coeffs)
        if len(cs) > self.m or any(not (0 <= c < self.p) for c in cs):
            raise ValueError("coefficient vector is not reduced")
        cs += [0] * (self.m - len(cs))
        return FieldElement(self, _undigits(cs, self.p))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self):
        """All field elements in canonical order."""
        for v in range(self.order):
            yield FieldElement(self, v)

    def to_bytes_i(self, idx: int) -> bytes:
        if self.m == 1 or self.p == 2:
            packed = idx
        else:
            b = self.coeff_bits
            packed = 0
            for i, d in enumerate(_digits(idx, self.p, self.m)):
                packed |= d << (b * i)
        return packed.to_bytes(self.symbol_width, "big")

    def from_bytes_i(self, data: bytes, strict: bool = True) -> int:
        if len(data) != self.symbol_width:
            raise ValueError(
                f"expected {self.symbol_width} bytes per symbol, got {len(data)}"
            )
        packed = int.from_bytes(data, "big")
        if self.m == 1:
            if packed >= self.p:
                if strict:
                    raise SymbolRangeError(
                        f"byte group {packed:#x} is not a residue modulo {self.p}"
                    )
                packed %= self.p
            return packed
        b = self.coeff_bits
        if packed >> (b * self.m):
            if strict:
                raise SymbolRangeError("byte group sets bits beyond the coefficient vector")
            packed &= (1 << (b * self.m)) - 1
        if self.p == 2:
            return packed
        mask = (1 << b) - 1
        ds = []
        for i in range(self.m):
            d = (packed >> (b * i)) & mask
            if d >= self.p:
                if strict:
                    raise SymbolRangeError(
                        f"packed coefficient {d} is not a residue modulo {self.p}"
                    )
                d %= self.p
            ds.append(d)
        return _undigits(ds, self.p)

    def from_bytes(self, data: bytes, strict: bool = True) -> "FieldElement":
        return FieldElement(self, self.from_bytes_i(data, strict))

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"


class FieldElement:
    """A fully reduced element of a FieldSpec.  Immutable and hashable."""

    __slots__ = ("spec", "value")

    def __init__(self, spec: FieldSpec, value: int):
        if not (0 <= value < spec.order):
            raise ValueError(f"value {value} outside [0, {spec.order})")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, val):
        raise AttributeError("FieldElement is immutable")

    @property
    def coeffs(self) -> tuple[int, ...]:
        """Residue polynomial coefficients, ascending degree (length m)."""
        return tuple(_digits(self.value, self.spec.p, self.spec.m))

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if self.spec is not other.spec and self.spec != other.spec:
            raise ValueError(f"mixed fields: {self.spec!r} vs {other.spec!r}")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.spec, self.spec.add_i(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.spec, self.spec.sub_i(self.value, other.value))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.spec, self.spec.mul_i(self.value, other.value))

    def __truediv__(self, other):
        self._check(other)
        return FieldElement(self.spec, self.spec.mul_i(self.value, self.spec.inv_i(other.value)))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg_i(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow_i(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv_i(self.value))

    def to_bytes(self) -> bytes:
        return self.spec.to_bytes_i(self.value)

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.value == other.value
            and self.spec == other.spec
        )

    def __hash__(self):
        return hash((self.spec, self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.spec!r}:{self.value}"


def smallest_prime_power_geq(n: int) -> FieldSpec:
    """FieldSpec of the smallest prime-power order q >= n."""
    if n < 2:
        raise ValueError("need n >= 2")
    if n > MAX_ORDER:
        raise ValueError("no 64-bit prime power is >= n")
    q = n
    while True:
        pm = prime_power(q)
        if pm is not None:
            return FieldSpec(pm[0], pm[1])
        q += 1
        if q > MAX_ORDER:
            raise ValueError("no 64-bit prime power is >= n")
