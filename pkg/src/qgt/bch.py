"""Parity-check matrices of binary t-error-correcting BCH codes and syndrome
decoding of low-weight error patterns.

The matrix for correction capability t over GF(2^q) has t row blocks of q rows
each.  Column i of block k holds the bit expansion of alpha^((2k+1) * i), bit j
in row k*q + j.  Keeping only the first r columns of the length-(2^q - 1) code
shortens it without losing minimum distance, but a decode may then land on an
out-of-range locator; such events surface as DecodeFailure, never as a wrong
answer.

Decoding recovers the error-locator polynomial from the power-sum syndromes
(Peterson-Gorenstein-Zierler, expected weight known in advance), then extracts
its roots in closed form for weights 1 and 2 or by an evaluation sweep over the
first r positions for weights 3 and 4.  Every candidate position set is
re-verified against the full syndrome before it is returned, which turns any
miscorrection into an explicit failure.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .gf2m import FieldContext, make_field

MAX_CORRECTION = 4


class DecodeFailure(Exception):
    """Syndrome does not correspond to a unique in-range error pattern."""


class ParityCheckMatrix:
    """Shortened BCH parity-check matrix, stored implicitly via the field tables.

    Attributes
    ----------
    t : int
        Correction capability, 1 <= t <= 4.
    q : int
        Field degree, ceil(log2(r + 1)).
    n : int
        Full code length 2^q - 1.
    r : int
        Number of retained columns, 3 <= r <= n.
    """

    def __init__(self, field: FieldContext, t: int, r: int):
        self.field = field
        self.t = t
        self.q = field.q
        self.n = field.order
        self.r = r

    @property
    def num_rows(self) -> int:
        return self.t * self.q

    @cached_property
    def rows(self) -> np.ndarray:
        """Dense 0/1 matrix of shape (t*q, r); built on demand."""
        idx = np.arange(self.r, dtype=np.int64)
        out = np.empty((self.num_rows, self.r), dtype=np.uint8)
        for k in range(self.t):
            vals = self.field.antilog[((2 * k + 1) * idx) % self.n]
            for j in range(self.q):
                out[k * self.q + j] = (vals >> j) & 1
        return out

    def block_syndromes(self, positions) -> list[int]:
        """Power-sum syndromes S_{2k+1} of an error pattern, one per row block."""
        f = self.field
        out = []
        for k in range(self.t):
            acc = 0
            for p in positions:
                acc ^= f.alpha_pow((2 * k + 1) * p)
            out.append(acc)
        return out

    def syndrome_of(self, positions) -> np.ndarray:
        """Binary syndrome (length t*q) of the given column positions."""
        bits = np.zeros(self.num_rows, dtype=np.uint8)
        for k, s in enumerate(self.block_syndromes(positions)):
            for j in range(self.q):
                bits[k * self.q + j] = (s >> j) & 1
        return bits


def build_parity_check(t: int, r: int) -> ParityCheckMatrix:
    """Parity-check matrix of the t-error-correcting BCH code, first r columns."""
    if not 1 <= t <= MAX_CORRECTION:
        raise ValueError(f"correction capability t={t} outside [1, {MAX_CORRECTION}]")
    if r < 3:
        raise ValueError(f"need at least 3 columns, got r={r}")
    q = r.bit_length()  # ceil(log2(r + 1))
    field = make_field(q)
    return ParityCheckMatrix(field, t, r)


def _pack_blocks(pcm: ParityCheckMatrix, bits: np.ndarray) -> list[int]:
    q = pcm.q
    weights = 1 << np.arange(q, dtype=np.int64)
    return [int(bits[k * q : (k + 1) * q].astype(np.int64) @ weights) for k in range(pcm.t)]


def _pgz_sigma(field: FieldContext, S: list[int], w: int) -> list[int]:
    """Solve the w x w power-sum system for sigma_1..sigma_w.

    Rows follow Newton's identities: sum_j sigma_j * S[k + w - j] = S[k + w]
    for k = 1..w.  A singular system means no weight-w pattern exists.
    """
    A = [[S[k + w - j] for j in range(1, w + 1)] for k in range(1, w + 1)]
    b = [S[k + w] for k in range(1, w + 1)]
    for col in range(w):
        piv = next((i for i in range(col, w) if A[i][col] != 0), None)
        if piv is None:
            raise DecodeFailure("singular locator system")
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            b[col], b[piv] = b[piv], b[col]
        inv = field.inv(A[col][col])
        A[col] = [field.mul(inv, a) for a in A[col]]
        b[col] = field.mul(inv, b[col])
        for i in range(w):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [a ^ field.mul(f, p) for a, p in zip(A[i], A[col])]
                b[i] ^= field.mul(f, b[col])
    return b


def _roots_quadratic(field: FieldContext, s1: int, s2: int) -> list[int]:
    # X^2 + s1*X + s2 with two distinct nonzero roots, else failure.
    if s1 == 0 or s2 == 0:
        raise DecodeFailure("degenerate quadratic locator")
    z = field.solve_quadratic(field.div(s2, field.sqr(s1)))
    if z is None:
        raise DecodeFailure("quadratic locator has no roots")
    x1 = field.mul(s1, z)
    x2 = x1 ^ s1
    if x1 == 0 or x2 == 0:
        raise DecodeFailure("zero locator root")
    return [x1, x2]


def _roots_sweep(pcm: ParityCheckMatrix, sigma: list[int], w: int) -> list[int]:
    # Evaluate X^w + sigma_1 X^(w-1) + ... + sigma_w at X = alpha^i over the
    # first r positions only; out-of-range roots are simply never found.
    f = pcm.field
    if sigma[-1] == 0:
        raise DecodeFailure("zero locator root")
    idx = np.arange(pcm.r, dtype=np.int64)
    acc = np.zeros(pcm.r, dtype=np.int64)
    coeffs = [1] + sigma  # coefficient of X^(w-u) at index u
    for u, a in enumerate(coeffs):
        if a == 0:
            continue
        exps = (f.log[a] + (w - u) * idx) % f.order
        acc ^= f.antilog[exps]
    return np.flatnonzero(acc == 0).tolist()


def syndrome_decode(pcm: ParityCheckMatrix, syndrome, expected_weight: int) -> list[int]:
    """Column positions (sorted, 0-based) whose XOR equals the syndrome.

    Parameters
    ----------
    pcm : ParityCheckMatrix
    syndrome : sequence of 0/1 of length t*q, block k in rows k*q..(k+1)*q-1
        with the bit-j-in-row-j convention of the matrix.
    expected_weight : int
        Exact number of error positions, 0 <= expected_weight <= t.

    Raises
    ------
    DecodeFailure
        When no in-range position set of the expected weight reproduces the
        syndrome.  For shortened matrices this includes locators beyond r.
    """
    bits = np.asarray(syndrome, dtype=np.int64) & 1
    if bits.shape != (pcm.num_rows,):
        raise ValueError(f"syndrome length {bits.shape} does not match {pcm.num_rows} rows")
    w = expected_weight
    if not 0 <= w <= pcm.t:
        raise ValueError(f"expected weight {w} outside [0, {pcm.t}]")
    blocks = _pack_blocks(pcm, bits)
    if w == 0:
        if any(blocks):
            raise DecodeFailure("nonzero syndrome for an empty pattern")
        return []

    f = pcm.field
    # Power sums S_1..S_2w; odd ones are measured, even ones follow by squaring.
    S = [0] * (2 * w + 1)
    for k in range(w):
        S[2 * k + 1] = blocks[k]
    for i in range(1, w + 1):
        S[2 * i] = f.sqr(S[i])

    if w == 1:
        if S[1] == 0:
            raise DecodeFailure("zero syndrome for a weight-1 pattern")
        positions = [int(f.log[S[1]])]
    else:
        sigma = _pgz_sigma(f, S, w)
        if w == 2:
            roots = _roots_quadratic(f, sigma[0], sigma[1])
            positions = [int(f.log[x]) for x in roots]
        else:
            positions = _roots_sweep(pcm, sigma, w)

    if len(set(positions)) != w or any(p >= pcm.r for p in positions):
        raise DecodeFailure("locator roots not a weight-matched in-range set")
    if pcm.block_syndromes(positions) != blocks:
        raise DecodeFailure("candidate positions do not reproduce the syndrome")
    return sorted(positions)
