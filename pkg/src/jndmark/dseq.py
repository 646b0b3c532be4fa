"""Binary decimal sequences (d-sequences) used as the spreading carrier.

For an odd prime ``q`` the binary expansion of ``1/q`` has digits

    a_i = (2**(i + 1) mod q) mod 2,    i = 0, 1, 2, ...

and is periodic with period ``ord_q(2)``, the multiplicative order of 2
modulo ``q``. Chips are the bipolar map ``w_i = 2 a_i - 1`` (0 -> -1, 1 -> +1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime
from sympy.ntheory import n_order

from .errors import NotPrime, QisTwo, ValidationError
from .imaging import BlockIndex


class ShortPeriodWarning(UserWarning):
    """The key's period is shorter than the number of chips requested."""


def check_prime(q) -> int:
    try:
        q_int = int(q)
    except (TypeError, ValueError):
        raise NotPrime(f"key {q!r} is not an integer") from None
    if q_int != q:
        raise NotPrime(f"key {q!r} is not an integer")
    if q_int == 2:
        raise QisTwo("q = 2 gives a terminating expansion; use an odd prime")
    if not isprime(q_int):
        raise NotPrime(f"{q_int} is not prime")
    return q_int


def period_of(q: int) -> int:
    """Period of the binary expansion of 1/q, i.e. the order of 2 mod q."""
    return int(n_order(2, check_prime(q)))


def _one_period(q: int, period: int) -> np.ndarray:
    bits = np.empty(period, dtype=np.int8)
    r = 1
    for i in range(period):
        r = (r << 1) % q
        bits[i] = r & 1
    return bits


@dataclass(frozen=True)
class DSequence:
    """Keyed bipolar sequence; ``values`` holds exactly one period of chips."""

    prime_q: int
    period: int
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_prime(cls, q) -> "DSequence":
        q = check_prime(q)
        period = period_of(q)
        chips = 2 * _one_period(q, period) - 1
        chips.flags.writeable = False
        return cls(q, period, chips)

    def bits(self, length: int, start: int = 0) -> np.ndarray:
        """Raw binary digits ``a_start .. a_{start+length-1}``."""
        return ((self.chips(length, start) + 1) // 2).astype(np.int8)

    def chips(self, length: int, start: int = 0) -> np.ndarray:
        if length < 0 or start < 0:
            raise ValidationError("length and start must be non-negative")
        idx = (start + np.arange(length)) % self.period
        return self.values[idx]

    def __getitem__(self, i: int) -> int:
        return int(self.values[i % self.period])


def generate(q, length: int, warn: bool = True) -> np.ndarray:
    """First `length` bipolar chips of the d-sequence keyed by prime `q`."""
    seq = DSequence.from_prime(q)
    if warn and seq.period < length:
        warnings.warn(
            f"d-sequence for q={seq.prime_q} has period {seq.period} < {length} chips; "
            "the carrier repeats",
            ShortPeriodWarning,
            stacklevel=2,
        )
    return seq.chips(length)


def segment_for_block(seq: DSequence, block: BlockIndex | int, band_size: int) -> np.ndarray:
    """Chips ``b*band_size .. (b+1)*band_size - 1`` for block ``b`` (row-major linear index)."""
    if band_size < 1:
        raise ValidationError("band_size must be at least 1")
    b = block.linear if isinstance(block, BlockIndex) else int(block)
    return seq.chips(band_size, start=b * band_size)


def block_chips(seq: DSequence, n_blocks: int, band_size: int) -> np.ndarray:
    """All block segments at once as an ``(n_blocks, band_size)`` array."""
    return seq.chips(n_blocks * band_size).reshape(n_blocks, band_size)
