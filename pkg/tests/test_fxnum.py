import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypcordic.fxnum import (
    FxError,
    FxFormat,
    FxValue,
    RoundingMode,
    add,
    mul,
    quantize,
    shift_left,
    shift_right_arith,
    sub,
    to_real,
)
from oracles import floor_shift, wrap

F24_8 = FxFormat(24, 8)
TRUNC, NEAR = RoundingMode.TRUNCATE, RoundingMode.NEAREST_AWAY


def fx(raw, fmt=F24_8):
    return FxValue(raw, fmt)


class TestFormat:
    def test_table_maxima(self):
        # maximum value column of the format table
        for (b, fw), expected in [((24, 8), 3.277e4), ((28, 8), 5.243e5), ((32, 12), 5.243e5),
                                  ((56, 32), 8.388e6), ((64, 32), 2.147e9), ((68, 32), 3.436e10),
                                  ((72, 32), 5.497e11), ((76, 32), 8.796e12)]:
            assert float(FxFormat(b, fw).max_value) == pytest.approx(expected, rel=1e-3)

    def test_resolution_and_range(self):
        f = FxFormat(52, 32)
        assert f.int_bits == 20
        assert f.resolution == Fraction(1, 2 ** 32)
        assert f.min_value == -(2 ** 19)
        assert f.dynamic_range_db == pytest.approx(307.1, abs=0.05)

    @pytest.mark.parametrize("b, fw", [(1, 0), (129, 8), (24, 24), (24, -1)])
    def test_invalid(self, b, fw):
        with pytest.raises(FxError):
            FxFormat(b, fw)

    def test_value_range_enforced(self):
        with pytest.raises(FxError):
            FxValue(1 << 23, F24_8)


class TestQuantize:
    def test_zero(self):
        for mode in RoundingMode:
            assert quantize(0.0, F24_8, mode).raw == 0

    def test_nearest(self):
        q = quantize(0.1, F24_8, NEAR)
        assert q.raw == round(0.1 * 256) == 26
        assert to_real(q) == 0.1015625

    def test_truncate_is_floor(self):
        assert quantize(0.1, F24_8, TRUNC).raw == 25
        assert quantize(-0.1, F24_8, TRUNC).raw == -26

    def test_ties_away(self):
        assert quantize(0.5 / 256, F24_8, NEAR).raw == 1
        assert quantize(-0.5 / 256, F24_8, NEAR).raw == -1

    def test_saturates(self):
        f = FxFormat(68, 32)
        q = quantize(6.6e10, f, TRUNC)
        assert q.raw == f.raw_max
        assert to_real(q) == pytest.approx(2 ** 35 - 2 ** -32)
        assert to_real(q) == pytest.approx(3.436e10, rel=1e-3)
        assert quantize(-1e300, f, NEAR).raw == f.raw_min

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf, mpmath.inf])
    def test_non_finite(self, bad):
        with pytest.raises(FxError):
            quantize(bad, F24_8)

    def test_mpf_exact(self):
        with mpmath.workprec(200):
            v = mpmath.atanh(mpmath.mpf(1) / 2)
            expected = int(mpmath.floor(v * 2 ** 100 + 0.5))
        assert quantize(v, FxFormat(120, 100), NEAR).raw == expected

    @given(st.integers(2, 128).flatmap(
        lambda b: st.tuples(st.just(b), st.integers(0, b - 1),
                            st.integers(-(1 << (b - 1)), (1 << (b - 1)) - 1))),
        st.sampled_from(list(RoundingMode)))
    def test_round_trip(self, spec, mode):
        b, fw, raw = spec
        f = FxFormat(b, fw)
        assert quantize(Fraction(raw, 1 << fw), f, mode).raw == raw

    @given(st.floats(-3.0e4, 3.0e4, allow_nan=False), st.sampled_from(list(RoundingMode)))
    def test_error_bound(self, v, mode):
        err = abs(Fraction(quantize(v, F24_8, mode).raw, 256) - Fraction(v))
        limit = Fraction(1, 256) if mode is TRUNC else Fraction(1, 512)
        assert err <= limit


class TestToReal:
    def test_examples(self):
        assert to_real(fx(0, FxFormat(32, 12))) == 0.0
        assert to_real(fx(2 ** 31 - 1, FxFormat(32, 12))) == pytest.approx(524287.99975586)
        assert to_real(fx(-(2 ** 23))) == -32768.0


class TestArithmetic:
    def test_add_examples(self):
        one = quantize(1.0, F24_8)
        assert to_real(add(one, quantize(-1.0, F24_8))) == 0.0
        top = fx(F24_8.raw_max)
        assert add(top, fx(1)).raw == wrap(2 ** 23 - 1 + 1, 24) == -(2 ** 23)
        assert to_real(add(top, fx(1))) == -(2 ** 15)

    def test_sub_negation_overflow(self):
        lo = fx(F24_8.raw_min)
        assert sub(fx(0), lo) == lo

    def test_format_mismatch(self):
        with pytest.raises(FxError):
            add(fx(1), FxValue(1, FxFormat(28, 8)))
        with pytest.raises(FxError):
            mul(fx(1), FxValue(1, FxFormat(24, 9)))

    def test_shift_examples(self):
        assert shift_right_arith(fx(5), 1).raw == 2
        assert shift_right_arith(fx(-5), 1).raw == -3
        v = fx(3 * 2 ** 21)
        assert shift_left(v, 1).raw < 0
        assert shift_left(v, 1).raw == wrap(3 * 2 ** 22, 24)

    @pytest.mark.parametrize("k", [-1, 24])
    def test_shift_range(self, k):
        with pytest.raises(FxError):
            shift_right_arith(fx(1), k)
        with pytest.raises(FxError):
            shift_left(fx(1), k)

    def test_mul_examples(self):
        half = quantize(0.5, F24_8)
        assert to_real(mul(half, half)) == 0.25
        a, b = fx(-26), quantize(3.0, F24_8)
        assert mul(a, b).raw == (-26 * 768) // 256 == -78
        assert to_real(mul(a, b)) == -0.3046875

    @given(st.integers(-(2 ** 23), 2 ** 23 - 1))
    def test_mul_identity(self, raw):
        assert mul(quantize(1.0, F24_8), fx(raw)).raw == raw


raws = st.integers(2, 128).flatmap(
    lambda b: st.tuples(
        st.just(b), st.integers(0, b - 1),
        st.integers(-(1 << (b - 1)), (1 << (b - 1)) - 1),
        st.integers(-(1 << (b - 1)), (1 << (b - 1)) - 1),
        st.integers(0, b - 1),
    ))


@settings(max_examples=300)
@given(raws)
def test_against_widening_oracle(case):
    b, fw, ra, rb, k = case
    f = FxFormat(b, fw)
    a, c = FxValue(ra, f), FxValue(rb, f)
    assert add(a, c).raw == wrap(ra + rb, b)
    assert sub(a, c).raw == wrap(ra - rb, b)
    assert mul(a, c).raw == wrap(floor_shift(ra * rb, fw), b)
    assert shift_right_arith(a, k).raw == floor_shift(ra, k)
    assert shift_left(a, k).raw == wrap(ra * 2 ** k, b)
