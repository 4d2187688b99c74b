"""Minimum-storage cooperative regenerating code over GF(q).

A file is striped into r x k message matrices M of field symbols.  Each
stripe is encoded as M * G where G is the k x n Vandermonde generator on
n distinct evaluation points; node j stores column j, i.e. r symbols per
stripe.  Any k node columns recover M by inverting the corresponding
k x k Vandermonde submatrix, which is the MDS property.

Share file format (all integers big-endian):

    magic  "CRGC"                      4 bytes
    version (= 1)                      1 byte
    p                                  8 bytes
    m                                  1 byte
    irreducible coefficients           m bytes   (absent when m == 1)
    n, k, r                            2 bytes each
    node_index (1-based)               2 bytes
    stripe_count                       8 bytes
    original_length (payload bytes)    8 bytes
    evaluation points                  n symbols
    payload, stripe-major, the stored column's symbols in row order
    CRC-32 of everything above         4 bytes

The format is self-describing: repair and reconstruction work from share
files alone.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import lru_cache

from .galois import FieldElement, FieldSpec, SymbolRangeError, smallest_prime_power_geq
from .matrix import Matrix, mat_mul, invert, vandermonde

MAGIC = b"CRGC"
VERSION = 1

# A message matrix is an r x k Matrix holding one stripe's payload symbols.
MessageMatrix = Matrix


class ParameterError(ValueError):
    """Code parameters violate an invariant."""


class ShareFormatError(ValueError):
    """A share file or blob does not parse."""


class ChecksumError(ShareFormatError):
    """Share trailer CRC does not match the share contents."""


FIELD_MODES = ("auto", "gf256", "gf65536")


def field_for_mode(n: int, mode: str = "auto") -> FieldSpec:
    if mode == "auto":
        return smallest_prime_power_geq(n)
    if mode == "gf256":
        spec = FieldSpec(2, 8)
    elif mode == "gf65536":
        spec = FieldSpec(2, 16)
    else:
        raise ParameterError(f"unknown field mode {mode!r}")
    if spec.order < n:
        raise ParameterError(f"field mode {mode} too small for n={n}")
    return spec


@dataclass(frozen=True)
class CodeParams:
    """Dimensions and field of one code instance.

    d is the number of helpers each newcomer contacts during repair; the
    construction requires d == k.  Evaluation points default to the
    first n field elements in canonical order.
    """

    n: int
    k: int
    r: int
    spec: FieldSpec
    points: tuple[FieldElement, ...]
    d: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.r < 1 or self.n < 1:
            raise ParameterError("n, k, r must be positive")
        if self.d != self.k:
            raise ParameterError("construction requires d == k")
        if self.k > self.n - self.r:
            raise ParameterError(f"need k <= n - r, got k={self.k}, n={self.n}, r={self.r}")
        if self.spec.order < self.n:
            raise ParameterError(f"field order {self.spec.order} below n={self.n}")
        if len(self.points) != self.n:
            raise ParameterError("need one evaluation point per node")
        if len({pt.value for pt in self.points}) != self.n:
            raise ParameterError("evaluation points must be distinct")
        for pt in self.points:
            if pt.spec != self.spec:
                raise ParameterError("evaluation point from a different field")

    @property
    def symbol_width(self) -> int:
        return self.spec.symbol_width

    @property
    def stripe_symbols(self) -> int:
        return self.k * self.r


def make_params(n: int, k: int, r: int, field: str | FieldSpec = "auto",
                points=None) -> CodeParams:
    spec = field if isinstance(field, FieldSpec) else field_for_mode(n, field)
    if spec.order < n:
        raise ParameterError(f"field order {spec.order} below n={n}")
    if points is None:
        pts = tuple(FieldElement(spec, v) for v in range(n))
    else:
        pts = tuple(points)
    return CodeParams(n=n, k=k, r=r, spec=spec, points=pts, d=k)


@dataclass(frozen=True)
class StripedFile:
    """A payload cut into r x k message matrices plus padding metadata."""

    stripes: tuple[Matrix, ...]
    original_length: int
    padding: int  # zero symbols appended to fill the last stripe

    @property
    def stripe_count(self) -> int:
        return len(self.stripes)


@dataclass(frozen=True)
class NodeShare:
    """One node's stored data: per stripe, the r symbols of its column."""

    node_index: int  # 1-based
    columns: tuple[tuple[FieldElement, ...], ...]  # [stripe][row]
    original_length: int

    @property
    def stripe_count(self) -> int:
        return len(self.columns)


@lru_cache(maxsize=None)
def generator_matrix(params: CodeParams) -> Matrix:
    return vandermonde(params.k, params.points)


@lru_cache(maxsize=None)
def generator_column(params: CodeParams, node_index: int) -> tuple[FieldElement, ...]:
    return generator_matrix(params).col(node_index - 1)


@lru_cache(maxsize=None)
def subset_inverse(params: CodeParams, node_indices: tuple[int, ...]) -> Matrix:
    """Inverse of [g_{c1} ... g_{ck}] for the given 1-based node indices."""
    sub = generator_matrix(params).columns_submatrix([i - 1 for i in node_indices])
    return invert(sub)


def dot(row, col) -> FieldElement:
    spec = row[0].spec
    acc = 0
    for x, y in zip(row, col):
        acc = spec.add_i(acc, spec.mul_i(x.value, y.value))
    return FieldElement(spec, acc)


def bytes_to_symbols(payload: bytes, spec: FieldSpec, strict: bool = True) -> list[FieldElement]:
    w = spec.symbol_width
    out = []
    for off in range(0, len(payload), w):
        group = payload[off : off + w]
        if len(group) < w:
            group = group + b"\x00" * (w - len(group))
        out.append(spec.from_bytes(group, strict=strict))
    return out


def symbols_to_bytes(symbols) -> bytes:
    return b"".join(s.to_bytes() for s in symbols)


def stripe(payload: bytes, params: CodeParams, strict: bool = True) -> StripedFile:
    """Cut a byte payload into message matrices.

    Bytes are grouped symbol_width at a time, big-endian, then zero-padded
    to a whole number of stripes of k*r symbols.  In strict mode a byte
    group that is not a canonical field element raises SymbolRangeError;
    lossy mode reduces it and is only meant for simulation payloads.
    """
    spec = params.spec
    symbols = bytes_to_symbols(payload, spec, strict=strict)
    per = params.stripe_symbols
    pad = (-len(symbols)) % per if symbols else 0
    symbols += [spec.zero] * pad
    stripes = []
    for off in range(0, len(symbols), per):
        chunk = symbols[off : off + per]
        stripes.append(Matrix(spec, params.r, params.k, tuple(chunk)))
    return StripedFile(tuple(stripes), len(payload), pad)


def unstripe(sf: StripedFile, params: CodeParams) -> bytes:
    symbols = [e for m in sf.stripes for e in m.entries]
    return symbols_to_bytes(symbols)[: sf.original_length]


def encode(sf: StripedFile, params: CodeParams) -> list[NodeShare]:
    """Encode every stripe as M * G and split the columns over the n nodes."""
    gen = generator_matrix(params)
    per_node: list[list[tuple[FieldElement, ...]]] = [[] for _ in range(params.n)]
    for m in sf.stripes:
        coded = mat_mul(m, gen)
        for j in range(params.n):
            per_node[j].append(coded.col(j))
    return [
        NodeShare(j + 1, tuple(per_node[j]), sf.original_length)
        for j in range(params.n)
    ]


def encode_payload(payload: bytes, params: CodeParams, strict: bool = True) -> list[NodeShare]:
    return encode(stripe(payload, params, strict=strict), params)


def reconstruct(shares, params: CodeParams) -> StripedFile:
    """Recover the striped file from exactly k node shares."""
    shares = sorted(shares, key=lambda s: s.node_index)
    if len(shares) != params.k:
        raise ParameterError(f"reconstruction needs exactly k={params.k} shares, got {len(shares)}")
    idx = tuple(s.node_index for s in shares)
    if len(set(idx)) != len(idx):
        raise ParameterError("duplicate node index among shares")
    if any(not (1 <= i <= params.n) for i in idx):
        raise ParameterError("node index outside [1, n]")
    counts = {s.stripe_count for s in shares}
    lengths = {s.original_length for s in shares}
    if len(counts) != 1 or len(lengths) != 1:
        raise ShareFormatError("shares disagree on stripe count or payload length")
    inv = subset_inverse(params, idx)
    stripes = []
    for s_i in range(counts.pop()):
        received = Matrix.from_rows(
            params.spec,
            [[sh.columns[s_i][row] for sh in shares] for row in range(params.r)],
        )
        stripes.append(mat_mul(received, inv))
    original_length = lengths.pop()
    total = len(stripes) * params.stripe_symbols
    used = -(-original_length // params.symbol_width) if original_length else 0
    return StripedFile(tuple(stripes), original_length, total - used)


def decode_payload(shares, params: CodeParams) -> bytes:
    return unstripe(reconstruct(shares, params), params)


# -- share file format -------------------------------------------------------


def params_header(params: CodeParams) -> bytes:
    spec = params.spec
    out = bytearray()
    out += spec.p.to_bytes(8, "big")
    out += spec.m.to_bytes(1, "big")
    if spec.m > 1:
        if spec.p > 256:
            raise ShareFormatError(
                "share header stores one byte per reduction coefficient; p > 256 does not fit"
            )
        out += bytes(spec.irreducible)
    out += params.n.to_bytes(2, "big")
    out += params.k.to_bytes(2, "big")
    out += params.r.to_bytes(2, "big")
    return bytes(out)


def share_to_bytes(share: NodeShare, params: CodeParams) -> bytes:
    if not (1 <= share.node_index <= params.n):
        raise ShareFormatError("node index outside [1, n]")
    out = bytearray()
    out += MAGIC
    out += VERSION.to_bytes(1, "big")
    out += params_header(params)
    out += share.node_index.to_bytes(2, "big")
    out += share.stripe_count.to_bytes(8, "big")
    out += share.original_length.to_bytes(8, "big")
    for pt in params.points:
        out += pt.to_bytes()
    for column in share.columns:
        for sym in column:
            out += sym.to_bytes()
    out += zlib.crc32(bytes(out)).to_bytes(4, "big")
    return bytes(out)


def share_from_bytes(blob: bytes) -> tuple[NodeShare, CodeParams]:
    if len(blob) < 4 + 1 + 4:
        raise ShareFormatError("blob shorter than any valid share")
    if blob[:4] != MAGIC:
        raise ShareFormatError("bad magic")
    if blob[4] != VERSION:
        raise ShareFormatError(f"unsupported version {blob[4]}")
    if zlib.crc32(blob[:-4]) != int.from_bytes(blob[-4:], "big"):
        raise ChecksumError("CRC-32 mismatch")
    body = blob[5:-4]
    pos = 0

    def take(nbytes: int) -> bytes:
        nonlocal pos
        if pos + nbytes > len(body):
            raise ShareFormatError("truncated share")
        chunk = body[pos : pos + nbytes]
        pos += nbytes
        return chunk

    p = int.from_bytes(take(8), "big")
    m = take(1)[0]
    irr = tuple(take(m)) if m > 1 else ()
    try:
        spec = FieldSpec(p, m, irr)
    except ValueError as exc:
        raise ShareFormatError(f"invalid field header: {exc}") from exc
    n = int.from_bytes(take(2), "big")
    k = int.from_bytes(take(2), "big")
    r = int.from_bytes(take(2), "big")
    node_index = int.from_bytes(take(2), "big")
    stripe_count = int.from_bytes(take(8), "big")
    original_length = int.from_bytes(take(8), "big")
    w = spec.symbol_width
    try:
        points = tuple(spec.from_bytes(take(w)) for _ in range(n))
    except SymbolRangeError as exc:
        raise ShareFormatError(f"invalid evaluation point: {exc}") from exc
    try:
        params = CodeParams(n=n, k=k, r=r, spec=spec, points=points, d=k)
    except ParameterError as exc:
        raise ShareFormatError(f"invalid parameters: {exc}") from exc
    if not (1 <= node_index <= n):
        raise ShareFormatError("node index outside [1, n]")
    columns = []
    try:
        for _ in range(stripe_count):
            columns.append(tuple(spec.from_bytes(take(w)) for _ in range(r)))
    except SymbolRangeError as exc:
        raise ShareFormatError(f"invalid payload symbol: {exc}") from exc
    if pos != len(body):
        raise ShareFormatError(f"{len(body) - pos} trailing bytes after payload")
    share = NodeShare(node_index, tuple(columns), original_length)
    return share, params


def read_share(path) -> tuple[NodeShare, CodeParams]:
    with open(path, "rb") as fh:
        return share_from_bytes(fh.read())


def write_share(path, share: NodeShare, params: CodeParams) -> None:
    with open(path, "wb") as fh:
        fh.write(share_to_bytes(share, params))
