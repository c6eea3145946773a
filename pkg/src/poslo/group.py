"""Scalar field Z_q and the prime-order group <alpha>.

The group is the prime-order subgroup of edwards25519.  Scalars are plain
Python ints kept in ``[0, q)``; group elements are :class:`GroupElement`
instances with a 32-byte canonical encoding.  Scalar multiplication runs in
libsodium; point addition is done here in extended twisted-Edwards
coordinates, which avoids decompressing on every aggregation step.

Every operation can be observed through :func:`count_ops`, which is how the
signer-side cost claims (no exponentiation when signing, one double
exponentiation per batch check) are asserted.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

import gmpy2
from nacl import bindings as _sodium

from .errors import FormatError, LengthError

P = 2**255 - 19
Q = 2**252 + 27742317777372353535851937790883648493
_D = -121665 * pow(121666, P - 2, P) % P
_D2 = 2 * _D % P
_SQRT_M1 = pow(2, (P - 1) // 4, P)

SCALAR_BYTES = 32
ELEMENT_BYTES = 32
_IDENTITY_ENC = b"\x01" + bytes(31)


# ---------------------------------------------------------------------------
# operation counters
# ---------------------------------------------------------------------------

@dataclass
class OpCounts:
    exp: int = 0
    double_exp: int = 0
    combine: int = 0


_active: list[OpCounts] = []
_lock = threading.Lock()


@contextmanager
def count_ops() -> Iterator[OpCounts]:
    """Record group operations performed inside the ``with`` block."""
    c = OpCounts()
    with _lock:
        _active.append(c)
    try:
        yield c
    finally:
        with _lock:
            _active.remove(c)


def _tick(name: str) -> None:
    if _active:
        for c in _active:
            setattr(c, name, getattr(c, name) + 1)


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def scalar_reduce_wide(data: bytes) -> int:
    if len(data) != 64:
        raise LengthError(f"wide reduction takes 64 bytes, got {len(data)}")
    return int.from_bytes(data, "big") % Q


def scalar_to_bytes(s: int) -> bytes:
    return (s % Q).to_bytes(SCALAR_BYTES, "big")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_BYTES:
        raise LengthError(f"scalar encoding is {SCALAR_BYTES} bytes, got {len(data)}")
    s = int.from_bytes(data, "big")
    if s >= Q:
        raise FormatError("scalar encoding is not reduced mod q")
    return s


def _le(s: int) -> bytes:
    return (s % Q).to_bytes(32, "little")


# ---------------------------------------------------------------------------
# extended-coordinate point arithmetic
# ---------------------------------------------------------------------------

def _ext_add(a, b):
    x1, y1, z1, t1 = a
    x2, y2, z2, t2 = b
    A = (y1 - x1) * (y2 - x2) % P
    B = (y1 + x1) * (y2 + x2) % P
    C = t1 * _D2 * t2 % P
    D = 2 * z1 * z2 % P
    E, F, G, H = B - A, D - C, D + C, B + A
    return (E * F % P, G * H % P, F * G % P, E * H % P)


def _compress(ext) -> bytes:
    x, y, z, _ = ext
    zi = int(gmpy2.invert(z, P))
    x = x * zi % P
    y = y * zi % P
    return (y | ((x & 1) << 255)).to_bytes(32, "little")


def _decompress(enc: bytes):
    v = int.from_bytes(enc, "little")
    sign = v >> 255
    y = v & ((1 << 255) - 1)
    if y >= P:
        raise FormatError("non-canonical point encoding")
    u = (y * y - 1) % P
    w = (_D * y * y + 1) % P
    # x = u w^3 (u w^7)^((p-5)/8), then fix up by sqrt(-1) if needed
    w3 = w * w * w % P
    x = u * w3 * int(gmpy2.powmod(u * w3 * w3 * w % P, (P - 5) // 8, P)) % P
    wx2 = w * x * x % P
    if wx2 == (-u) % P:
        x = x * _SQRT_M1 % P
    elif wx2 != u:
        raise FormatError("point is not on the curve")
    if x == 0 and sign:
        raise FormatError("non-canonical point encoding")
    if (x & 1) != sign:
        x = P - x
    return (x, y, 1, x * y % P)


class GroupElement:
    """Immutable element of the prime-order group.

    Holds the canonical encoding, the extended coordinates, or both; the
    missing form is derived on first use.
    """

    __slots__ = ("_enc", "_ext")

    def __init__(self, enc: bytes | None = None, ext=None):
        self._enc = enc
        self._ext = ext

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupElement":
        """Decode and validate subgroup membership."""
        data = bytes(data)
        if len(data) != ELEMENT_BYTES:
            raise LengthError(f"group element encoding is 32 bytes, got {len(data)}")
        if data == _IDENTITY_ENC:
            return IDENTITY
        if not _sodium.crypto_core_ed25519_is_valid_point(data):
            raise FormatError("encoding is not a canonical prime-order group element")
        return cls(enc=data)

    def to_bytes(self) -> bytes:
        if self._enc is None:
            self._enc = _compress(self._ext)
        return self._enc

    def _coords(self):
        if self._ext is None:
            self._ext = _decompress(self._enc)
        return self._ext

    def is_identity(self) -> bool:
        return self.to_bytes() == _IDENTITY_ENC

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self._enc is not None and other._enc is not None:
            return self._enc == other._enc
        x1, y1, z1, _ = self._coords()
        x2, y2, z2, _ = other._coords()
        return (x1 * z2 - x2 * z1) % P == 0 and (y1 * z2 - y2 * z1) % P == 0

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"GroupElement({self.to_bytes().hex()[:16]}...)"

    def __reduce__(self):
        return (GroupElement, (self.to_bytes(),))


IDENTITY = GroupElement(enc=_IDENTITY_ENC, ext=(0, 1, 1, 0))
GENERATOR = GroupElement(enc=_sodium.crypto_scalarmult_ed25519_base_noclamp(_le(1)))


def group_combine(a: GroupElement, b: GroupElement) -> GroupElement:
    _tick("combine")
    return GroupElement(ext=_ext_add(a._coords(), b._coords()))


def combine_all(elements: Iterable[GroupElement]) -> GroupElement:
    """Fold of the group operation, starting from the identity."""
    return reduce(group_combine, elements, IDENTITY)


def negate(a: GroupElement) -> GroupElement:
    x, y, z, t = a._coords()
    return GroupElement(ext=(-x % P, y, z, -t % P))


def _base_mul(s: int) -> GroupElement:
    s %= Q
    if s == 0:
        return IDENTITY
    return GroupElement(enc=_sodium.crypto_scalarmult_ed25519_base_noclamp(_le(s)))


def _mul(s: int, a: GroupElement) -> GroupElement:
    s %= Q
    if s == 0 or a.is_identity():
        return IDENTITY
    return GroupElement(enc=_sodium.crypto_scalarmult_ed25519_noclamp(_le(s), a.to_bytes()))


def exp_base(s: int) -> GroupElement:
    """alpha^s."""
    _tick("exp")
    return _base_mul(s)


def scalar_mul(s: int, a: GroupElement) -> GroupElement:
    """a^s."""
    _tick("exp")
    return _mul(s, a)


def commit_check(Y: GroupElement, e: int, s: int) -> GroupElement:
    """Y^e * alpha^s, counted as one double exponentiation."""
    _tick("double_exp")
    a, b = _mul(e, Y), _base_mul(s)
    if a.is_identity():
        return b
    if b.is_identity():
        return a
    return GroupElement(enc=_sodium.crypto_core_ed25519_add(a.to_bytes(), b.to_bytes()))
