# exact_sequences.py
# exact counts for the 2-by-n grid: T_n (all spanning trees), S_n (balanced ones),
# their ratio, and the limit constants, all in exact arithmetic
import logging
import threading
from collections import namedtuple
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from typing import Dict, List, Union

from ..errors import ComputationError, InvalidArgumentError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


# ---------------------------------------------------------
# Q[sqrt 3]
# ---------------------------------------------------------
@dataclass(frozen=True)
class Quadratic:
    """
    exact number p + q*sqrt(3) with rational p, q.
    every comparison is decided with rational arithmetic only
    """

    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))

    @staticmethod
    def of(value) -> "Quadratic":
        if isinstance(value, Quadratic):
            return value
        if isinstance(value, (int, Fraction)):
            return Quadratic(Fraction(value), Fraction(0))
        return NotImplemented

    def conjugate(self) -> "Quadratic":
        return Quadratic(self.p, -self.q)

    def norm(self) -> Fraction:
        # (p + q√3)(p - q√3)
        return self.p * self.p - 3 * self.q * self.q

    def __add__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return Quadratic(self.p + other.p, self.q + other.q)

    __radd__ = __add__

    def __neg__(self):
        return Quadratic(-self.p, -self.q)

    def __sub__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return Quadratic(self.p - other.p, self.q - other.q)

    def __rsub__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return Quadratic(
            self.p * other.p + 3 * self.q * other.q,
            self.p * other.q + other.p * self.q,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.norm()
        if n == 0:
            # norm is zero only for 0 itself, sqrt(3) is irrational
            raise ZeroDivisionError("division by zero in Q[sqrt 3]")
        num = self * other.conjugate()
        return Quadratic(num.p / n, num.q / n)

    def __rtruediv__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Quadratic(1) / (self ** -k)
        result = Quadratic(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: whichever of |p| and |q|√3 is larger wins
        return sp if self.p * self.p > 3 * self.q * self.q else sq

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __eq__(self, other):
        other = Quadratic.of(other)
        if other is NotImplemented:
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    def to_decimal(self, places: int = 6) -> Decimal:
        # irrational values never sit exactly on a rounding tie, so 60 digits is plenty
        with localcontext() as ctx:
            ctx.prec = 60
            value = (Decimal(self.p.numerator) / Decimal(self.p.denominator)
                     + Decimal(self.q.numerator) / Decimal(self.q.denominator) * Decimal(3).sqrt())
            return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)

    def exact_text(self) -> str:
        if self.q == 0:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt(3)"

    def __repr__(self):
        return f"Quadratic({self.exact_text()})"


SQRT3 = Quadratic(0, 1)
R = Quadratic(2, 1)                      # r = 2 + √3
R_INV = Quadratic(2, -1)                 # 1/r = 2 - √3
A = Quadratic(0, Fraction(1, 6))         # a = 1/(2√3) = √3/6
X = Quadratic(7, -4)                     # x = r^-2 = 7 - 4√3


# ---------------------------------------------------------
# decimal rendering
# ---------------------------------------------------------
def format_fraction(value: Rational, places: int = 6) -> str:
    """exact round-half-even to `places` decimals, e.g. 11/14 -> '0.785714'"""
    rounded = round(Fraction(value), places)
    with localcontext() as ctx:
        ctx.prec = 1000
        dec = Decimal(rounded.numerator) / Decimal(rounded.denominator)
    return f"{dec:.{places}f}"


# ---------------------------------------------------------
# T_n
# ---------------------------------------------------------
_tree_counts: List[int] = [1, 1, 4]  # T_0 = 1 by convention
_tree_lock = threading.Lock()


def tree_count(n: int) -> int:
    """T_n via T_{n+2} = 4 T_{n+1} - T_n, memoized"""
    if not isinstance(n, int) or n < 0:
        raise InvalidArgumentError(f"n must be a nonnegative integer, got {n!r}")
    if n < len(_tree_counts):
        return _tree_counts[n]
    with _tree_lock:
        # another thread may have extended the table while we waited
        while len(_tree_counts) <= n:
            _tree_counts.append(4 * _tree_counts[-1] - _tree_counts[-2])
        logger.debug("tree_count table extended to n=%d", n)
        return _tree_counts[n]


def tree_count_closed(n: int) -> int:
    """T_n = a (r^n - r^-n), evaluated in Q[sqrt 3]"""
    if not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    value = A * (R ** n - R_INV ** n)
    if value.q != 0 or value.p.denominator != 1:
        raise ComputationError(f"closed form for T_{n} is not an integer: {value.exact_text()}")
    return value.p.numerator


def generating_coefficients(k: int) -> List[int]:
    """first k coefficients of x / (1 - 4x + x^2), starting at x^1"""
    if not isinstance(k, int) or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k!r}")
    # series division: (1 - 4x + x^2) * sum c_j x^j = x
    coeffs = [1, 4][:k]
    while len(coeffs) < k:
        coeffs.append(4 * coeffs[-1] - coeffs[-2])
    return coeffs


# ---------------------------------------------------------
# S_n
# ---------------------------------------------------------
BalancedTerm = namedtuple("BalancedTerm", ["multiplier", "length", "square"])


def _check_positive(n):
    if not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")


def balanced_count(n: int) -> int:
    """
    S_n, number of balanced spanning trees of the 2-by-n grid, m = n // 2:
      odd  n: S_n = n + sum_{i=0}^{m-1} (6+4i) T_{m-i}^2
      even n: S_n = n + 2 T_m^2 + sum_{i=1}^{m-1} (4+4i) T_{m-i}^2
    n = 1 gives 1 (the single edge splits 1|1)
    """
    _check_positive(n)
    if n == 1:
        return 1
    m = n // 2
    if n % 2:
        return n + sum((6 + 4 * i) * tree_count(m - i) ** 2 for i in range(m))
    return n + 2 * tree_count(m) ** 2 + sum((4 + 4 * i) * tree_count(m - i) ** 2 for i in range(1, m))


def balanced_terms(n: int) -> List[BalancedTerm]:
    """
    the m+1 summands b_i * length_i * T_{m-i}^2 behind balanced_count.
    length_i is the number of places the balanced cut edge can sit for the i-th
    family of splits, b_i is 2 when the family is not symmetric top/bottom
    """
    if not isinstance(n, int) or n < 2:
        raise InvalidArgumentError(f"balanced_terms needs n >= 2, got {n!r}")
    m = n // 2
    odd = n % 2 == 1
    terms = []
    for i in range(m):
        if odd:
            terms.append(BalancedTerm(2, 2 * i + 3, tree_count(m - i) ** 2))
        else:
            b = 1 if i == 0 else 2
            terms.append(BalancedTerm(b, 2 * i + 2, tree_count(m - i) ** 2))
    # i = m: top row | bottom row, cut edge is any of the n verticals
    terms.append(BalancedTerm(1, n, 1))
    return terms


def cut_channel_count(n: int) -> int:
    """number of distinct balanced vertex splits a spanning tree can realise (equals n)"""
    _check_positive(n)
    if n == 1:
        return 1
    return sum(t.multiplier for t in balanced_terms(n))


def ust_balance_probability(n: int) -> Fraction:
    _check_positive(n)
    return Fraction(balanced_count(n), tree_count(n))


# ---------------------------------------------------------
# limits
# ---------------------------------------------------------
def _parity(parity) -> str:
    if isinstance(parity, int) and not isinstance(parity, bool):
        return "odd" if parity % 2 else "even"
    p = str(parity).strip().lower()
    if p not in ("odd", "even"):
        raise InvalidArgumentError(f"parity must be 'odd' or 'even', got {parity!r}")
    return p


def limit_constant(parity) -> Quadratic:
    """
    limit of S_n / T_n along one parity
      odd:  (3 + √3)/9          = 1/3 + (1/9)√3
      even: (1 + 4√3)/(6√3)     = 2/3 + (1/18)√3
    """
    if _parity(parity) == "odd":
        return Quadratic(Fraction(1, 3), Fraction(1, 9))
    return Quadratic(Fraction(2, 3), Fraction(1, 18))


def term_limit(parity, i: int) -> Quadratic:
    """limit of T_{m-i}^2 / T_n as m grows: a / r^(2i+1) for odd n, a * x^i for even n"""
    if not isinstance(i, int) or i < 0:
        raise InvalidArgumentError(f"i must be a nonnegative integer, got {i!r}")
    if _parity(parity) == "odd":
        return A * R_INV ** (2 * i + 1)
    return A * X ** i


def limit_gap(n: int) -> Quadratic:
    """|S_n/T_n - limit| for the parity of n, exact"""
    return abs(Quadratic.of(ust_balance_probability(n)) - limit_constant(n))


def series_identity_checks() -> Dict[str, bool]:
    one_minus_x = 1 - X
    first = 6 / one_minus_x
    second = 4 * X / one_minus_x ** 2
    total = first + second
    return {
        "r_times_r_inverse": R * R_INV == 1,
        "x_is_r_to_minus_2": X == R ** -2,
        "one_minus_x": one_minus_x == Quadratic(-6, 4),
        "six_over_one_minus_x": first == Quadratic(3, 2),
        "four_x_over_one_minus_x_squared": second == Quadratic(Fraction(1, 3)),
        "series_sum": total == Quadratic(Fraction(10, 3), 2),
        "odd_limit": (A / R) * total == limit_constant("odd"),
        "even_limit": 2 * A + A * (4 * X / one_minus_x + second) == limit_constant("even"),
        "even_constant_rationalized": Quadratic(1, 4) / (6 * SQRT3) == limit_constant("even"),
        "odd_constant_rationalized": Quadratic(3, 1) / 9 == limit_constant("odd"),
    }


def series_identity_check() -> bool:
    return all(series_identity_checks().values())


# ---------------------------------------------------------
# export
# ---------------------------------------------------------
def exact_values(n: int) -> Dict[str, object]:
    """json-ready exact values for one n"""
    t = tree_count(n)
    s = balanced_count(n)
    ratio = Fraction(s, t)
    return {
        "n": n,
        "T": str(t),
        "S": str(s),
        "ratio_num": str(ratio.numerator),
        "ratio_den": str(ratio.denominator),
        "ratio_6dp": format_fraction(ratio, 6),
    }
