import math
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stl_activation import stl_value
from stl_activation.fast_log import (
    POLY_MAX_ABS_ERROR,
    Binary32Parts,
    FastLogError,
    audit_log2_lut,
    audit_log2_poly,
    beta_constant,
    build_lut,
    decompose_binary32,
    decompose_binary32_array,
    fast_log2,
    fast_log2_array,
    fast_stl,
    fast_stl_array,
    log2_poly,
    reassemble_binary32_array,
    to_float32,
)

normal32 = st.floats(width=32, allow_nan=False, allow_infinity=False,
                     allow_subnormal=False).filter(lambda v: v != 0.0)


class TestDecompose:
    @pytest.mark.parametrize(
        "x, parts",
        [
            (1.0, (0, 127, 0.0)),
            (-1.5, (1, 127, 0.5)),
            (8.0, (0, 130, 0.0)),
            (0.375, (0, 125, 0.5)),
            (3.4028234663852886e38, (0, 254, 1.0 - 2.0**-23)),
            (2.0**-126, (0, 1, 0.0)),
        ],
    )
    def test_examples(self, x, parts):
        p = decompose_binary32(x)
        assert (p.s, p.E, p.V) == parts

    @pytest.mark.parametrize(
        "x, what",
        [(0.0, "zero"), (-0.0, "zero"), (1e-40, "denormal"), (math.inf, "infinite"),
         (-math.inf, "infinite"), (math.nan, "NaN"), (1e39, "infinite")],
    )
    def test_rejects(self, x, what):
        with pytest.raises(FastLogError, match=what):
            decompose_binary32(x)

    @given(normal32)
    def test_round_trip(self, x):
        p = decompose_binary32(x)
        assert 0 <= p.V < 1 and 1 <= p.E <= 254
        assert p.value() == x

    @given(normal32)
    def test_agrees_with_bit_pattern(self, x):
        bits = struct.unpack("<I", struct.pack("<f", x))[0]
        p = decompose_binary32(x)
        assert bits == (p.s << 31) | (p.E << 23) | int(p.V * 2**23)

    def test_array_round_trip(self):
        rng = np.random.default_rng(0)
        x = (rng.standard_normal(10000) * 10.0 ** rng.uniform(-30, 30, 10000)).astype(np.float32)
        s, E, V = decompose_binary32_array(x)
        np.testing.assert_array_equal(reassemble_binary32_array(s, E, V), x)
        for i in range(0, 10000, 997):
            p = decompose_binary32(float(x[i]))
            assert (p.s, p.E, p.V) == (s[i], E[i], V[i])

    def test_array_rejects_with_index(self):
        with pytest.raises(FastLogError, match="denormal.*index 2"):
            decompose_binary32_array(np.array([1.0, 2.0, 1e-40], dtype=np.float32))


class TestPolynomial:
    def test_value(self):
        # (-0.344845 * 1.5 + 2.024658) * 1.5 - 1.674873
        assert log2_poly(1.5) == pytest.approx(0.58621275, abs=1e-12)

    def test_ends(self):
        assert log2_poly(1.0) == pytest.approx(0.00494, abs=1e-12)
        audit = audit_log2_poly(1000)
        assert audit["at_2"] == pytest.approx(0.995063, abs=1e-12)

    def test_domain(self):
        for m in (0.999, 2.0, math.nan):
            with pytest.raises(FastLogError):
                log2_poly(m)

    def test_audit_bound(self):
        a = audit_log2_poly(100_000)
        assert a["max_abs_err"] <= POLY_MAX_ABS_ERROR
        assert a["max_abs_err"] == pytest.approx(0.004941, abs=2e-6)
        assert 1.7 < a["argmax"] < 1.74


class TestLut:
    def test_small_table(self):
        lut = build_lut(4)
        np.testing.assert_allclose(lut.entries, [0.0, math.log2(1.25), math.log2(1.5), math.log2(1.75)])
        np.testing.assert_allclose(lut.entries, [0.0, 0.321928, 0.584963, 0.807355], atol=1e-6)

    def test_entries_are_exact_at_nodes(self):
        lut = build_lut(64)
        v = np.arange(64) / 64
        np.testing.assert_array_equal(lut.lookup(v), lut.entries)

    def test_interpolation_past_last_entry(self):
        lut = build_lut(4)
        mid = lut.lookup(0.875)
        assert mid == pytest.approx((math.log2(1.75) + 1.0) / 2)

    @pytest.mark.parametrize("size", [0, 1, 3, 100, 2.0, True])
    def test_bad_size(self, size):
        with pytest.raises(FastLogError):
            build_lut(size)

    def test_immutable(self):
        lut = build_lut(8)
        with pytest.raises(ValueError):
            lut.entries[0] = 1.0

    @pytest.mark.parametrize("size", [16, 64, 256, 1024])
    def test_error_bound(self, size):
        a = audit_log2_lut(size, 200_000)
        assert a["max_abs_err"] <= a["bound"]
        assert a["bound"] == pytest.approx(1 / (8 * math.log(2) * size**2), rel=1e-4)


class TestFastLog2:
    def test_power_of_two(self):
        assert fast_log2(8.0) == pytest.approx(3.00494, abs=1e-12)
        assert fast_log2(8.0, "lut") == 3.0

    @pytest.mark.parametrize("x", [1.0, 0.5, -3.0, math.nan])
    def test_domain(self, x):
        with pytest.raises(FastLogError):
            fast_log2(x)

    def test_unknown_mode(self):
        with pytest.raises(FastLogError, match="mode"):
            fast_log2(3.0, "cubic")

    def test_array_matches_scalar(self):
        xs = np.float32(np.geomspace(1.0001, 1e30, 999))
        for mode in ("polynomial", "lut"):
            got = fast_log2_array(xs, mode)
            ref = [fast_log2(float(x), mode) for x in xs]
            np.testing.assert_array_equal(got, ref)

    def test_error_against_log2(self):
        xs = np.float32(np.geomspace(1.0001, 1e30, 20000))
        err = np.abs(fast_log2_array(xs) - np.log2(xs.astype(np.float64)))
        assert err.max() <= POLY_MAX_ABS_ERROR


class TestFastStl:
    def test_beta(self):
        assert beta_constant(5.0, 2.0) == pytest.approx(2 * math.log(2))
        assert beta_constant(-5.0, 2.0) == pytest.approx(-2 * math.log(2))
        assert beta_constant(0.0, 2.0) == 0.0

    def test_linear_branch_exact(self):
        for x in (0.0, 0.25, -0.75, 1.0, -1.0):
            assert fast_stl(x, 0.5) == 0.5 * x

    def test_example(self):
        # -(ln2 * (3 + 0.00494) + 1)
        assert fast_stl(-8.0) == pytest.approx(-(math.log(2) * 3.00494 + 1), abs=1e-12)
        assert abs(fast_stl(-8.0) - stl_value(-8.0)) <= 0.0042

    @given(st.floats(min_value=1.0, max_value=1e4, exclude_min=True), st.booleans(),
           st.sampled_from(["polynomial", "lut"]))
    def test_odd_and_close(self, x, neg, mode):
        x = to_float32(-x if neg else x)
        assert fast_stl(x, mode=mode) == -fast_stl(-x, mode=mode)
        assert abs(fast_stl(x, mode=mode) - stl_value(x)) <= 0.0042

    def test_alpha_scales_bound(self):
        xs = np.float32(np.geomspace(1.01, 1e4, 5000))
        for a in (0.1, 2.0):
            err = np.abs(fast_stl_array(xs, a) - a * (np.log(xs.astype(np.float64)) + 1))
            assert err.max() <= a * 0.0042

    @pytest.mark.parametrize("x", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, x):
        with pytest.raises(FastLogError):
            fast_stl(x)
        with pytest.raises(FastLogError):
            fast_stl_array([x])

    def test_bad_alpha(self):
        with pytest.raises(FastLogError):
            fast_stl(2.0, 0.0)

    def test_array_matches_scalar(self):
        rng = np.random.default_rng(4)
        xs = np.float32(rng.uniform(-50, 50, 2000))
        for mode in ("polynomial", "lut"):
            np.testing.assert_allclose(
                fast_stl_array(xs, 1.5, mode), [fast_stl(float(x), 1.5, mode) for x in xs],
                rtol=1e-15, atol=0,
            )


def test_binary32_parts_value():
    assert Binary32Parts(1, 130, 0.25).value() == -10.0
