import random

import pytest

from crgc.galois import (
    FieldSpec,
    SymbolRangeError,
    is_prime,
    prime_power,
    smallest_prime_power_geq,
)


# -- independent oracles ------------------------------------------------------

def brute_is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def brute_prime_power(q):
    for p in range(2, q + 1):
        if brute_is_prime(p):
            v, m = p, 1
            while v < q:
                v *= p
                m += 1
            if v == q:
                return p, m
    return None


PRIME_POWERS_LE_64 = [q for q in range(2, 65) if brute_prime_power(q)]


def op_tables(spec):
    q = spec.order
    add = [[spec.add_i(a, b) for b in range(q)] for a in range(q)]
    mul = [[spec.mul_i(a, b) for b in range(q)] for a in range(q)]
    return add, mul


# -- field selection ----------------------------------------------------------

def test_smallest_prime_power_examples():
    s = smallest_prime_power_geq(4)
    assert (s.p, s.m, s.order) == (2, 2, 4)
    s = smallest_prime_power_geq(5)
    assert (s.p, s.m, s.order) == (5, 1, 5)
    s = smallest_prime_power_geq(6)
    assert (s.p, s.m, s.order) == (7, 1, 7)


@pytest.mark.parametrize("n,q", [(2, 2), (9, 9), (10, 11), (26, 27), (28, 29), (128, 128), (257, 257)])
def test_smallest_prime_power_more(n, q):
    assert smallest_prime_power_geq(n).order == q


def test_smallest_prime_power_matches_bruteforce():
    for n in range(2, 200):
        expected = next(q for q in range(n, 2 * n + 2) if brute_prime_power(q))
        assert smallest_prime_power_geq(n).order == expected


def test_prime_power_decomposition_matches_bruteforce():
    for q in range(2, 130):
        assert prime_power(q) == brute_prime_power(q)


def test_is_prime_matches_bruteforce():
    for n in range(150):
        assert is_prime(n) == brute_is_prime(n)
    assert is_prime(2**61 - 1)  # Mersenne prime
    assert not is_prime(2**62 + 1)


def test_field_selection_bounds():
    with pytest.raises(ValueError):
        smallest_prime_power_geq(1)
    with pytest.raises(ValueError):
        smallest_prime_power_geq(2**64)
    with pytest.raises(ValueError):
        FieldSpec(2, 64)  # 2^64 does not fit unsigned 64-bit


# -- spec construction --------------------------------------------------------

def test_deterministic_irreducibles():
    assert FieldSpec(2, 2).irreducible == (1, 1)        # x^2+x+1
    assert FieldSpec(2, 3).irreducible == (1, 1, 0)     # x^3+x+1
    assert FieldSpec(2, 4).irreducible == (1, 1, 0, 0)  # x^4+x+1
    assert FieldSpec(3, 2).irreducible == (1, 0)        # x^2+1
    assert FieldSpec(5, 2).irreducible == (2, 0)        # x^2+2


def test_reducible_polynomial_rejected():
    with pytest.raises(ValueError):
        FieldSpec(2, 2, (1, 0))  # x^2+1 = (x+1)^2
    with pytest.raises(ValueError):
        FieldSpec(3, 2, (0, 0))  # x^2
    with pytest.raises(ValueError):
        FieldSpec(4, 1)  # not prime
    with pytest.raises(ValueError):
        FieldSpec(5, 1, (1,))  # prime field takes no modulus


# -- arithmetic examples ------------------------------------------------------

def test_gf5_examples():
    gf5 = FieldSpec(5)
    assert (gf5.element(2) + gf5.element(3)).value == 0
    assert gf5.element(2).inverse().value == 3
    assert (gf5.element(1) - gf5.element(3)).value == 3


def test_gf4_reduction_oracle():
    # Oracle: over GF(2) with modulus x^2+x+1, x*x = x^2 = x+1.
    gf4 = FieldSpec(2, 2)
    x = gf4.from_coeffs([0, 1])
    assert x.value == 2
    assert (x * x) == gf4.from_coeffs([1, 1])
    assert (x * x).value == 3


def test_coeffs_property():
    gf9 = FieldSpec(3, 2)
    e = gf9.element(5)  # 5 = 2 + 1*3 -> coefficients (2, 1)
    assert e.coeffs == (2, 1)
    assert FieldSpec(7).element(4).coeffs == (4,)


def test_canonical_enumeration_order():
    for spec in (FieldSpec(5), FieldSpec(2, 3), FieldSpec(3, 2)):
        values = [e.value for e in spec.elements()]
        assert values == list(range(spec.order))


# -- axioms -------------------------------------------------------------------

@pytest.mark.parametrize("q", [q for q in PRIME_POWERS_LE_64 if q <= 27])
def test_field_axioms_small(q):
    p, m = brute_prime_power(q)
    spec = FieldSpec(p, m)
    add, mul = op_tables(spec)
    rng = range(q)
    for a in rng:
        assert add[a][0] == a and mul[a][1] == a and mul[a][0] == 0
        for b in rng:
            assert add[a][b] == add[b][a]
            assert mul[a][b] == mul[b][a]
            for c in rng:
                assert mul[mul[a][b]][c] == mul[a][mul[b][c]]
                assert mul[a][add[b][c]] == add[mul[a][b]][mul[a][c]]
    for a in range(1, q):
        assert mul[a][spec.inv_i(a)] == 1


@pytest.mark.parametrize("q", [q for q in PRIME_POWERS_LE_64 if q <= 27])
def test_fermat_exponent_small(q):
    p, m = brute_prime_power(q)
    spec = FieldSpec(p, m)
    for a in range(1, q):
        assert spec.pow_i(a, q - 1) == 1
        assert spec.pow_i(a, 0) == 1


def test_fermat_sampled_large_fields():
    rng = random.Random(7)
    for spec in (FieldSpec(2, 8), FieldSpec(3, 5), FieldSpec(101), FieldSpec(2, 16)):
        q = spec.order
        for _ in range(40):
            a = rng.randrange(1, q)
            assert spec.pow_i(a, q - 1) == 1


def test_add_sub_roundtrip():
    rng = random.Random(11)
    for spec in (FieldSpec(5), FieldSpec(2, 4), FieldSpec(3, 3), FieldSpec(13)):
        q = spec.order
        for _ in range(200):
            a, b = rng.randrange(q), rng.randrange(q)
            assert spec.sub_i(spec.add_i(a, b), b) == a


def test_tables_bit_identical_to_schoolbook():
    for spec in (FieldSpec(2, 4), FieldSpec(5, 2), FieldSpec(3, 3), FieldSpec(61)):
        q = spec.order
        assert spec._logexp is not None
        for a in range(q):
            for b in range(q):
                assert spec.mul_i(a, b) == spec._mul_schoolbook(a, b)


# -- element API --------------------------------------------------------------

def test_mixed_spec_rejected():
    a = FieldSpec(5).element(1)
    b = FieldSpec(7).element(1)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(TypeError):
        a + 1


def test_zero_inverse_rejected():
    with pytest.raises(ZeroDivisionError):
        FieldSpec(5).zero.inverse()
    gf8 = FieldSpec(2, 3)
    with pytest.raises(ZeroDivisionError):
        gf8.element(3) / gf8.zero


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        FieldSpec(5).element(2) ** -1


def test_element_is_immutable_and_hashable():
    e = FieldSpec(5).element(2)
    with pytest.raises(AttributeError):
        e.value = 3
    assert e == FieldSpec(5).element(2)
    assert len({e, FieldSpec(5).element(2)}) == 1


# -- serialization ------------------------------------------------------------

@pytest.mark.parametrize("spec,width", [
    (FieldSpec(5), 1),        # 3 bits
    (FieldSpec(2, 2), 1),
    (FieldSpec(2, 8), 1),
    (FieldSpec(2, 16), 2),
    (FieldSpec(3, 2), 1),     # 2 bits per coefficient, 4 bits
    (FieldSpec(3, 5), 2),     # 10 bits
    (FieldSpec(257), 2),      # 9 bits
])
def test_symbol_width(spec, width):
    assert spec.symbol_width == width


def test_serialization_roundtrip_exhaustive_small():
    for spec in (FieldSpec(5), FieldSpec(2, 2), FieldSpec(3, 2), FieldSpec(2, 8), FieldSpec(5, 2)):
        for e in spec.elements():
            data = e.to_bytes()
            assert len(data) == spec.symbol_width
            assert spec.from_bytes(data) == e


def test_serialization_roundtrip_sampled_large():
    rng = random.Random(3)
    for spec in (FieldSpec(2, 16), FieldSpec(65537), FieldSpec(3, 5)):
        for _ in range(100):
            e = spec.element(rng.randrange(spec.order))
            assert spec.from_bytes(e.to_bytes()) == e


def test_strict_vs_lossy_decoding():
    gf5 = FieldSpec(5)
    with pytest.raises(SymbolRangeError):
        gf5.from_bytes(b"\x07")
    assert gf5.from_bytes(b"\x07", strict=False).value == 2  # 7 mod 5
    gf9 = FieldSpec(3, 2)
    with pytest.raises(SymbolRangeError):
        gf9.from_bytes(b"\x03")  # low coefficient 3 is no residue mod 3
    assert gf9.from_bytes(b"\x03", strict=False).value == 0
    with pytest.raises(SymbolRangeError):
        gf9.from_bytes(b"\x10")  # bits beyond the 4-bit coefficient vector
    with pytest.raises(ValueError):
        gf5.from_bytes(b"\x01\x02")  # wrong width


def test_big_endian_packing():
    gf9 = FieldSpec(3, 2)
    e = gf9.from_coeffs([1, 2])  # 1 + 2x -> packed (2 << 2) | 1 = 0b1001
    assert e.to_bytes() == bytes([0b1001])
    gf65536 = FieldSpec(2, 16)
    assert gf65536.element(0x1234).to_bytes() == b"\x12\x34"
