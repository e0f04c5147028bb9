"""Arithmetic over binary extension fields GF(2^q).

Field elements are integers in [0, 2^q) whose bit i is the coefficient of
alpha^i in the polynomial basis.  Multiplication and inversion go through
log/antilog tables indexed by powers of the primitive element alpha, so every
field operation is O(1) after an O(2^q) table build.  The degree is capped at
20, which keeps the two tables around 8 MB.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Primitive polynomial per extension degree.  Bit i is the coefficient of x^i,
# with the leading x^q bit included.  These are the familiar minimum-weight
# entries from standard coding tables; the table build below verifies that
# alpha = x really has full multiplicative order, so a bad entry cannot pass
# silently.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
    17: 0b100000000000001001,
    18: 0b1000000000010000001,
    19: 0b10000000000000100111,
    20: 0b100000000000000001001,
}

MIN_DEGREE = 2
MAX_DEGREE = 20


class FieldContext:
    """GF(2^q) together with its log and antilog tables.

    Attributes
    ----------
    q : int
        Extension degree.
    primitive_poly : int
        Defining polynomial as a bit mask.
    order : int
        Size of the multiplicative group, 2^q - 1.
    antilog : ndarray
        antilog[i] = alpha^i for 0 <= i < order.
    log : ndarray
        log[x] = discrete log of x for 1 <= x < 2^q, and -1 at index 0.
    """

    def __init__(self, q: int, primitive_poly: int):
        if not MIN_DEGREE <= q <= MAX_DEGREE:
            raise ValueError(f"extension degree {q} outside [{MIN_DEGREE}, {MAX_DEGREE}]")
        if primitive_poly >> q != 1:
            raise ValueError(f"polynomial 0x{primitive_poly:x} does not have degree {q}")
        self.q = q
        self.primitive_poly = primitive_poly
        self.order = (1 << q) - 1

        antilog = np.zeros(self.order, dtype=np.int64)
        log = np.full(1 << q, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            antilog[i] = x
            log[x] = i
            x <<= 1
            if x >> q & 1:
                x ^= primitive_poly
        if x != 1 or (log[1:] < 0).any():
            raise ValueError(f"polynomial 0x{primitive_poly:x} is not primitive over GF(2)")
        self.antilog = antilog
        self.log = log
        self._as_basis = None  # lazily built solver for z^2 + z = c

    def alpha_pow(self, e: int) -> int:
        """alpha^e with the exponent reduced mod 2^q - 1."""
        return int(self.antilog[e % self.order])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % self.order])

    def sqr(self, a: int) -> int:
        if a == 0:
            return 0
        return int(self.antilog[(2 * self.log[a]) % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^q)")
        return int(self.antilog[(self.order - self.log[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by 0 in GF(2^q)")
        if a == 0:
            return 0
        return int(self.antilog[(self.log[a] - self.log[b]) % self.order])

    def trace(self, a: int) -> int:
        acc = a
        x = a
        for _ in range(self.q - 1):
            x = self.sqr(x)
            acc ^= x
        return acc

    def solve_quadratic(self, c: int):
        """One solution z of z^2 + z = c, or None when no solution exists.

        The map z -> z^2 + z is GF(2)-linear with kernel {0, 1}, so a basis of
        its image with preimage witnesses (built once per field) answers any
        instance in O(q^2) bit operations.  The second solution is z ^ 1.
        """
        if c == 0:
            return 0
        if self._as_basis is None:
            basis = {}  # leading bit -> (image vector, preimage)
            for j in range(self.q):
                v = self.sqr(1 << j) ^ (1 << j)
                x = 1 << j
                for lead in sorted(basis, reverse=True):
                    if v >> lead & 1:
                        pv, px = basis[lead]
                        v ^= pv
                        x ^= px
                if v:
                    basis[v.bit_length() - 1] = (v, x)
            self._as_basis = basis
        y = c
        z = 0
        for lead in sorted(self._as_basis, reverse=True):
            if y >> lead & 1:
                pv, px = self._as_basis[lead]
                y ^= pv
                z ^= px
        if y:
            return None
        return z


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldContext:
    """Build (and cache) the GF(2^q) context for 2 <= q <= 20."""
    if q not in PRIMITIVE_POLYS:
        raise ValueError(f"no primitive polynomial on file for degree {q}")
    return FieldContext(q, PRIMITIVE_POLYS[q])
