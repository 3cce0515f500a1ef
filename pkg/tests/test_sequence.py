import random
from fractions import Fraction

import pytest

from negafib.balls import RBall
from negafib.sequence import (
    UnsupportedCaseError,
    WindowTooLargeError,
    binet_eval,
    dominance_residual,
    kfib,
    kfib_window,
)

# backward recursion F_n = F_{n+4} - F_{n+3} - F_{n+2} - F_{n+1} unrolled by
# hand from the initial block 0, 0, 0, 1
K4_BACKWARD = {
    0: 0, -1: 0, -2: 0, -3: 1, -4: -1, -5: 0, -6: 0, -7: 2, -8: -3, -9: 1,
    -10: 0, -11: 4, -12: -8, -13: 5, -14: -1, -15: 8, -16: -20, -17: 18,
    -18: -7, -19: 17, -20: -48, -21: 56,
}


def test_point_values():
    assert kfib(4, 8) == 56
    assert kfib(4, 1) == 1
    assert kfib(2, -5) == 5
    assert kfib(4, -12) == -8
    for n, v in K4_BACKWARD.items():
        assert kfib(4, n) == v


def test_windows():
    assert kfib_window(4, -5, -1).values == (0, -1, 1, 0, 0)
    assert kfib_window(4, 1, 8).values == (1, 1, 2, 4, 8, 15, 29, 56)
    assert kfib_window(2, 0, 5).values == (0, 1, 1, 2, 3, 5)


@pytest.mark.parametrize("k", range(2, 11))
def test_recursion_exactness(k):
    win = kfib_window(k, -300, 300)
    win.validate()


def test_negation_identity_order2():
    # the two-sided Fibonacci identity: F_{-n} = (-1)^(n+1) F_n
    for n in range(0, 501):
        assert kfib(2, -n) == (-1) ** (n + 1) * kfib(2, n)


def test_window_point_agreement():
    rng = random.Random(7)
    for _ in range(25):
        k = rng.randint(2, 8)
        lo = rng.randint(-200, 0)
        hi = lo + rng.randint(0, 50)
        win = kfib_window(k, lo, hi)
        i = rng.randint(0, hi - lo)
        assert win.values[i] == kfib(k, lo + i)


def test_window_validates_args():
    with pytest.raises(ValueError):
        kfib_window(4, 5, 1)
    with pytest.raises(WindowTooLargeError):
        kfib_window(4, 0, 3_000_000)
    with pytest.raises(ValueError):
        kfib(1, 5)


def test_binet_matches_exact_values():
    b = binet_eval(4, 8, 256)
    assert b.contains(56)
    assert b.rad() < Fraction(1, 10**10)
    assert binet_eval(2, 10, 256).contains(55)
    assert binet_eval(4, -12, 256).contains(-8)


def test_binet_pins_a_unique_integer():
    b = binet_eval(6, -37, 384)
    lo, hi = b.lower(), b.upper()
    assert hi - lo < 1
    import math
    assert math.ceil(lo) == math.floor(hi) == kfib(6, -37)


def test_dominance_examples():
    half = Fraction(1, 2)
    assert dominance_residual(4, 10, 256).upper() < half
    assert dominance_residual(2, 0, 256).upper() < half
    # negative side against the printed envelope 0.92 |alpha_4|^(0.786 n)
    from negafib.charpoly import compute_roots
    a4_abs = abs(compute_roots(4, 256).smallest_root())
    envelope = RBall.from_decimal("0.92", 256) * a4_abs.pow(Fraction("-23.58"))
    assert dominance_residual(4, -30, 256).upper() < envelope.lower()


def test_dominance_rejects_odd_negative():
    with pytest.raises(UnsupportedCaseError):
        dominance_residual(3, -5, 256)
    # nonnegative indices stay fine for odd order
    assert dominance_residual(3, 5, 256).upper() < Fraction(1, 2)


def test_binet_raises_when_integer_not_pinned():
    # at 64 bits the cancellation at k = 10, n = 300 leaves a huge radius
    from negafib.balls import PrecisionError
    with pytest.raises(PrecisionError):
        binet_eval(10, 300, 64)
