"""Exact truncated power-series arithmetic over the integers.

Polynomials with arbitrary-precision integer coefficients are multiplied by
Kronecker substitution: each coefficient occupies a fixed-width byte slot of
one huge integer, the two integers are multiplied with GMP, and the slots of
the product are read back.  Between multiplications the coefficients stay in
a two's-complement slot matrix (``uint8`` of shape ``(n, width)``) so that
re-packing at a different width is a numpy operation rather than a Python
loop over a million integers.
"""

from __future__ import annotations

from collections.abc import Sequence

import gmpy2
import numpy as np


class Slots:
    """Coefficients c_0..c_{n-1} stored as little-endian two's-complement bytes."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        if data.dtype != np.uint8 or data.ndim != 2:
            raise TypeError("slot matrix must be 2-d uint8")
        self.data = data

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_ints(cls, coeffs: Sequence[int]) -> Slots:
        arr = np.asarray(coeffs, dtype=object) if not isinstance(coeffs, np.ndarray) else coeffs
        if arr.dtype != object:
            return cls.from_int64(arr.astype(np.int64))
        if len(arr) == 0:
            return cls(np.zeros((0, 1), dtype=np.uint8))
        bits = max(int(abs(c)).bit_length() for c in arr) + 1
        width = max(1, (bits + 7) // 8)
        raw = b"".join(int(c).to_bytes(width, "little", signed=True) for c in arr)
        return cls(np.frombuffer(raw, dtype=np.uint8).reshape(len(arr), width).copy())

    @classmethod
    def from_int64(cls, coeffs: np.ndarray) -> Slots:
        coeffs = np.ascontiguousarray(coeffs, dtype="<i8")
        return cls(coeffs.view(np.uint8).reshape(len(coeffs), 8).copy())

    def _sign_bytes(self) -> np.ndarray:
        return np.where(self.data[:, -1] >= 0x80, 0xFF, 0x00).astype(np.uint8)

    def significant_width(self) -> int:
        """Smallest byte width that still represents every coefficient."""
        if self.length == 0:
            return 1
        ext = self._sign_bytes()
        width = self.width
        while width > 1:
            if np.any(self.data[:, width - 1] != ext):
                break
            width -= 1
        # the surviving top byte must carry the right sign bit
        if np.any((self.data[:, width - 1] >= 0x80) != (ext == 0xFF)):
            width += 1
        return width

    def resized(self, width: int) -> Slots:
        if width == self.width:
            return self
        if width < self.width:
            return Slots(np.ascontiguousarray(self.data[:, :width]))
        out = np.empty((self.length, width), dtype=np.uint8)
        out[:, : self.width] = self.data
        out[:, self.width :] = self._sign_bytes()[:, None]
        return Slots(out)

    def truncated(self, n: int) -> Slots:
        return Slots(np.ascontiguousarray(self.data[:n]))

    def pack(self) -> gmpy2.mpz:
        """Evaluate the polynomial at 2**(8*width) as a signed big integer."""
        positive = gmpy2.mpz(int.from_bytes(self.data.tobytes(), "little"))
        negative_rows = self.data[:, -1] >= 0x80
        if not negative_rows.any():
            return positive
        marks = np.zeros_like(self.data)
        marks[negative_rows, 0] = 1
        borrow = gmpy2.mpz(int.from_bytes(marks.tobytes(), "little"))
        return positive - (borrow << (8 * self.width))

    @classmethod
    def unpack(cls, value: gmpy2.mpz, n: int, width: int) -> Slots:
        """Read the low ``n`` signed digits of ``value`` in base 2**(8*width).

        Each digit must lie in [-2**(8*width-1), 2**(8*width-1)).
        """
        bits = 8 * width
        top = np.zeros((n, width), dtype=np.uint8)
        top[:, -1] = 0x80
        offset = gmpy2.mpz(int.from_bytes(top.tobytes(), "little"))
        shifted = gmpy2.f_mod_2exp(value + offset, bits * n)
        raw = int(shifted).to_bytes(width * n, "little")
        data = np.frombuffer(raw, dtype=np.uint8).reshape(n, width).copy()
        data[:, -1] ^= 0x80
        return cls(data)

    def to_ints(self) -> list[int]:
        width = self.significant_width()
        if width <= 8:
            return [int(v) for v in self.resized(8).data.view("<i8").ravel()]
        data = self.resized(width).data
        raw = data.tobytes()
        return [int.from_bytes(raw[i * width : (i + 1) * width], "little", signed=True) for i in range(self.length)]


def mul_truncated(a: Slots, b: Slots, n: int) -> Slots:
    """Product of two series modulo q**n."""
    a = a.truncated(n)
    b = b.truncated(n)
    wa, wb = a.significant_width(), b.significant_width()
    terms = min(a.length, b.length)
    # each product coefficient is a sum of at most `terms` products
    bits = 8 * wa + 8 * wb + terms.bit_length() + 1
    width = (bits + 7) // 8
    product = a.resized(width).pack() * b.resized(width).pack()
    return Slots.unpack(product, n, width)


def pow_truncated(a: Slots, e: int, n: int) -> Slots:
    """``a**e`` modulo q**n by binary powering."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = None
    base = a.truncated(n)
    while e:
        if e & 1:
            result = base if result is None else mul_truncated(result, base, n)
        e >>= 1
        if e:
            base = mul_truncated(base, base, n)
    if result is None:
        one = np.zeros(n, dtype=np.int64)
        if n:
            one[0] = 1
        return Slots.from_int64(one)
    return result


def euler_function(n: int) -> np.ndarray:
    """Coefficients of prod_{k>=1} (1 - q^k) modulo q**n via pentagonal numbers."""
    c = np.zeros(n, dtype=np.int64)
    k = 0
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n:
            break
        sign = -1 if k % 2 else 1
        c[g1] = sign
        if k and g2 < n:
            c[g2] = sign
        k += 1
    return c


def naive_mul_truncated(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Schoolbook product modulo q**n; reference path for small inputs."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out
