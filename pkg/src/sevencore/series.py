"""Truncated formal power series in q with exact integer coefficients.

A ``QSeries`` of order N is the polynomial truncation c_0 + c_1 q + ... +
c_N q^N of a formal power series, with arbitrary-precision integer
coefficients.  Every identity checked by this package reduces to equality
of two such objects.

Truncation policy: binary operations never extend precision; the result
order is the minimum of the operand orders.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence


class NonUnitConstantTerm(ValueError):
    """Raised when inverting a series whose constant term is not +1 or -1."""


def _schoolbook_convolve(a: Sequence[int], b: Sequence[int], n_out: int) -> list[int]:
    """Plain O(len(a)*len(b)) convolution, truncated to n_out terms."""
    out = [0] * n_out
    for i, ai in enumerate(a):
        if ai == 0 or i >= n_out:
            continue
        top = min(len(b), n_out - i)
        for j in range(top):
            out[i + j] += ai * b[j]
    return out


def _kronecker_convolve(a: Sequence[int], b: Sequence[int], n_out: int) -> list[int]:
    """Exact truncated convolution via Kronecker substitution.

    Both factors are packed into big integers with fixed-width slots, so a
    single big-integer multiplication performs the whole convolution in C.
    Negative coefficients are handled by packing positive and negative
    parts separately; unpacking adds a half-slot bias so that every base
    2**k digit of the product is non-negative and can be read back with
    ``int.to_bytes``.  The slot width is chosen from an a-priori bound on
    the largest product coefficient, so the result is exact.
    """
    la = min(len(a), n_out)
    lb = min(len(b), n_out)
    a = a[:la]
    b = b[:lb]
    max_a = max(map(abs, a))
    max_b = max(map(abs, b))
    if max_a == 0 or max_b == 0:
        return [0] * n_out
    bound = min(la, lb) * max_a * max_b
    slot_bits = ((bound.bit_length() + 1 + 7) // 8) * 8
    slot = slot_bits // 8
    half = 1 << (slot_bits - 1)

    def pack(cs: Sequence[int]) -> int:
        length = len(cs)
        pos = bytearray(length * slot)
        neg = bytearray(length * slot)
        has_neg = False
        for i, c in enumerate(cs):
            if c > 0:
                off = (length - 1 - i) * slot
                pos[off:off + slot] = c.to_bytes(slot, "big")
            elif c < 0:
                off = (length - 1 - i) * slot
                neg[off:off + slot] = (-c).to_bytes(slot, "big")
                has_neg = True
        packed = int.from_bytes(pos, "big")
        if has_neg:
            packed -= int.from_bytes(neg, "big")
        return packed

    prod = pack(a) * pack(b)
    n_slots = la + lb - 1
    bias = int.from_bytes(half.to_bytes(slot, "big") * n_slots, "big")
    raw = (prod + bias).to_bytes(n_slots * slot, "big")
    out = []
    for i in range(min(n_out, n_slots)):
        off = (n_slots - 1 - i) * slot
        out.append(int.from_bytes(raw[off:off + slot], "big") - half)
    out.extend([0] * (n_out - n_slots))
    return out


def _convolve(a: Sequence[int], b: Sequence[int], n_out: int) -> list[int]:
    if min(len(a), n_out) * min(len(b), n_out) <= 1024:
        return _schoolbook_convolve(a[:n_out], b[:n_out], n_out)
    return _kronecker_convolve(a, b, n_out)


class QSeries:
    """Immutable truncated power series with exact integer coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence[int]):
        if len(coeffs) == 0:
            raise ValueError("a QSeries needs at least the constant coefficient")
        self._coeffs = tuple(int(c) for c in coeffs)

    @classmethod
    def _make(cls, coeffs: tuple[int, ...]) -> "QSeries":
        obj = object.__new__(cls)
        obj._coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls._make((0,) * (order + 1))

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls._make((1,) + (0,) * order)

    @classmethod
    def from_terms(cls, order: int, terms: Mapping[int, int]) -> "QSeries":
        """Series with the given exponent -> coefficient map, rest zero."""
        coeffs = [0] * (order + 1)
        for e, c in terms.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e <= order:
                coeffs[e] += c
        return cls._make(tuple(coeffs))

    @property
    def order(self) -> int:
        """Largest exponent the series is known through."""
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._coeffs

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.order:
            raise IndexError(f"coefficient {n} outside known order {self.order}")
        return self._coeffs[n]

    def __iter__(self) -> Iterator[int]:
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        terms = []
        for e, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if e == 0:
                terms.append(str(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                sign = "-" if c < 0 else ("+" if terms else "")
                var = "q" if e == 1 else f"q^{e}"
                terms.append(f"{sign}{mag}{var}" if sign != "+" else f"+ {mag}{var}")
            if len(terms) >= 8:
                terms.append("...")
                break
        body = " ".join(terms) if terms else "0"
        return f"QSeries(order={self.order}: {body})"

    # -- arithmetic -------------------------------------------------------

    def add(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        a, b = self._coeffs, other._coeffs
        return QSeries._make(tuple(a[i] + b[i] for i in range(n + 1)))

    def sub(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        a, b = self._coeffs, other._coeffs
        return QSeries._make(tuple(a[i] - b[i] for i in range(n + 1)))

    def neg(self) -> "QSeries":
        return QSeries._make(tuple(-c for c in self._coeffs))

    def scale(self, k: int) -> "QSeries":
        """Multiply every coefficient by the integer k; order unchanged."""
        return QSeries._make(tuple(k * c for c in self._coeffs))

    def mul(self, other: "QSeries") -> "QSeries":
        n_out = min(self.order, other.order) + 1
        return QSeries._make(tuple(_convolve(self._coeffs, other._coeffs, n_out)))

    def pow(self, m: int) -> "QSeries":
        """m-th power by binary exponentiation, same order."""
        if m < 0:
            raise ValueError("negative power; use invert() first")
        result = QSeries.one(self.order)
        base = self
        while m:
            if m & 1:
                result = result.mul(base)
            base = base.mul(base) if m > 1 else base
            m >>= 1
        return result

    def invert(self) -> "QSeries":
        """Multiplicative inverse through the same order.

        Requires constant term +1 or -1, which keeps every coefficient of
        the inverse an integer.  Uses Newton iteration: if b is correct
        through m terms then b*(2 - a*b) is correct through 2m terms.
        """
        c0 = self._coeffs[0]
        if c0 not in (1, -1):
            raise NonUnitConstantTerm(
                f"constant term must be +1 or -1 to invert, got {c0}"
            )
        n = self.order
        a = self._coeffs
        inv = [c0]
        known = 1
        while known <= n:
            known = min(2 * known, n + 1)
            t = _convolve(a[:known], inv, known)
            err = [-c for c in t]
            err[0] += 2
            inv = _convolve(inv, err, known)
        return QSeries._make(tuple(inv))

    def substitute_power(self, k: int) -> "QSeries":
        """Replace q by q^k; exponents beyond the order are dropped."""
        if k < 1:
            raise ValueError("substitution power must be >= 1")
        if k == 1:
            return self
        coeffs = [0] * (self.order + 1)
        for m in range(self.order // k + 1):
            coeffs[k * m] = self._coeffs[m]
        return QSeries._make(tuple(coeffs))

    def negate_argument(self) -> "QSeries":
        """Replace q by -q: coefficient n picks up the sign (-1)^n."""
        return QSeries._make(
            tuple(-c if e & 1 else c for e, c in enumerate(self._coeffs))
        )

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k; terms pushed past the order are lost."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        if k == 0:
            return self
        n = self.order
        coeffs = (0,) * min(k, n + 1) + self._coeffs[: max(0, n + 1 - k)]
        return QSeries._make(coeffs)

    def truncate(self, order: int) -> "QSeries":
        """Restriction to a smaller (or equal) order."""
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} to {order}")
        return QSeries._make(self._coeffs[: order + 1])

    # operator sugar

    def __add__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.add(other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.sub(other)

    def __neg__(self) -> "QSeries":
        return self.neg()

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return self.mul(other)
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, m: int) -> "QSeries":
        return self.pow(m)


def first_mismatch(a: QSeries, b: QSeries) -> int | None:
    """Smallest exponent where the two series differ, through the shared
    order; None if they agree everywhere both are known."""
    n = min(a.order, b.order)
    ca, cb = a.coeffs, b.coeffs
    for i in range(n + 1):
        if ca[i] != cb[i]:
            return i
    return None
