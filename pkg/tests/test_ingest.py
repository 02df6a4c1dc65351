import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropyrisk import (DataError, FormatError, InsufficientDataError, PriceSeries,
                         ReturnSeries, describe, load_prices, log_returns)
from entropyrisk.ingest import align, detect_format, write_prices_wide


def write(tmp_path, text, name="p.csv"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8"))
    return path


class TestLoadPrices:
    def test_wide_three_rows(self, tmp_path):
        p = write(tmp_path, "date,A,B\n2020-01-01,1,2\n2020-01-02,1.5,2.5\n2020-01-03,2,3\n")
        out = load_prices(p, "wide", min_rows=3)
        assert [s.ticker for s in out] == ["A", "B"]
        assert all(len(s) == 3 for s in out)
        np.testing.assert_array_equal(out[1].prices, [2, 2.5, 3])

    def test_default_min_rows(self, tmp_path):
        p = write(tmp_path, "date,A\n2020-01-01,1\n2020-01-02,2\n")
        with pytest.raises(InsufficientDataError):
            load_prices(p, "wide")

    def test_zero_price(self, tmp_path):
        p = write(tmp_path, "date,A\n2020-01-01,1\n2020-01-02,0.0\n")
        with pytest.raises(DataError, match="A.*2020-01-02"):
            load_prices(p, "wide", min_rows=1)

    def test_bad_number_reports_line(self, tmp_path):
        p = write(tmp_path, "date,A\n2020-01-01,1\n2020-01-02,abc\n")
        with pytest.raises(FormatError) as exc:
            load_prices(p, "wide", min_rows=1)
        assert exc.value.line == 3

    def test_bad_date(self, tmp_path):
        p = write(tmp_path, "date,A\n01/02/2020,1\n")
        with pytest.raises(FormatError, match="line 2"):
            load_prices(p, "wide", min_rows=1)

    def test_missing_cells_dropped_per_ticker(self, tmp_path):
        p = write(tmp_path, "date,A,B\r\n2020-01-01,1,\r\n2020-01-02,2,5\r\n2020-01-03,,6\r\n")
        a, b = load_prices(p, "wide", min_rows=2)
        assert a.dates == ("2020-01-01", "2020-01-02")
        assert b.dates == ("2020-01-02", "2020-01-03")

    def test_long_format_matches_reference_parser(self, tmp_path):
        text = ("date,ticker,close\n"
                "2020-01-03,B,10.5\n2020-01-01,A,1.0\n2020-01-02,B,10.0\n"
                "2020-01-03,A,1.2\n2020-01-01,B,9.5\n2020-01-02,A,1.1\n"
                "2020-01-05,A,1.3\n2020-01-04,B,11.0\n2020-01-04,A,1.25\n2020-01-05,B,10.8\n")
        p = write(tmp_path, text)
        # independent line-by-line reference
        ref = {}
        for line in text.splitlines()[1:]:
            d, t, c = line.split(",")
            ref.setdefault(t, []).append((d, float(c)))
        got = load_prices(p, "long", min_rows=5)
        assert [s.ticker for s in got] == sorted(ref)
        for s in got:
            rows = sorted(ref[s.ticker])
            assert s.dates == tuple(d for d, _ in rows)
            assert s.prices.tolist() == [c for _, c in rows]
        assert detect_format(p) == "long"

    def test_long_header_checked(self, tmp_path):
        p = write(tmp_path, "day,ticker,close\n2020-01-01,A,1\n")
        with pytest.raises(FormatError):
            load_prices(p, "long", min_rows=1)

    def test_roundtrip_wide(self, tmp_path):
        s = PriceSeries("Q", ("2020-01-01", "2020-01-02"), np.array([1.0 / 3, 2.0 / 7]))
        path = tmp_path / "w.csv"
        write_prices_wide(path, [s])
        (back,) = load_prices(path, "auto", min_rows=2)
        np.testing.assert_array_equal(back.prices, s.prices)


class TestLogReturns:
    def test_e(self):
        r = log_returns(PriceSeries("A", ("a", "b", "c"), [1, math.e, math.e]))
        np.testing.assert_allclose(r.values, [1.0, 0.0], atol=1e-15)
        assert r.dates == ("b", "c")

    def test_constant(self):
        r = log_returns(PriceSeries("A", tuple("abcd"), [5, 5, 5, 5]))
        assert r.values.tolist() == [0, 0, 0]

    def test_hand_values(self):
        r = log_returns(PriceSeries("A", tuple("abc"), [100, 102, 99]))
        np.testing.assert_allclose(r.values, [0.019803, -0.029853], atol=5e-7)

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            log_returns(PriceSeries("A", ("a",), [1.0]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 1e4), min_size=2, max_size=60))
    def test_telescoping(self, prices):
        p = PriceSeries("A", tuple(f"d{i:03d}" for i in range(len(prices))), prices)
        total = np.exp(log_returns(p).values.sum())
        assert total == pytest.approx(prices[-1] / prices[0], rel=1e-9)


class TestDescribe:
    def test_two_points(self):
        s = describe([-1.0, 1.0])
        assert (s.mean, s.variance, s.skewness) == (0.0, 1.0, 0.0)

    def test_sample_variance_flag(self):
        assert describe([-1.0, 1.0], ddof=1).variance == 2.0

    def test_constant_is_undefined(self):
        s = describe([0.1, 0.1, 0.1])
        assert s.variance == 0 and s.skewness is None and s.excess_kurtosis is None

    def test_normal_kurtosis(self, rng):
        s = describe(rng.standard_normal(10_000))
        assert abs(s.excess_kurtosis) < 0.15  # 3 * sqrt(24 / n)

    def test_std_is_sqrt_variance(self, rng):
        s = describe(rng.standard_normal(100))
        assert s.std_dev == pytest.approx(math.sqrt(s.variance), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=5, max_size=40).filter(lambda v: np.ptp(v) > 1e-3),
           st.floats(-5, 5), st.floats(0.1, 10), st.booleans())
    def test_affine(self, values, shift, scale, flip):
        x = np.array(values)
        base = describe(x)
        moved = describe(x + shift)
        assert moved.variance == pytest.approx(base.variance, rel=1e-9, abs=1e-12)
        assert moved.skewness == pytest.approx(base.skewness, abs=1e-7)
        c = -scale if flip else scale
        scaled = describe(c * x)
        assert scaled.variance == pytest.approx(c * c * base.variance, rel=1e-12)
        assert scaled.skewness == pytest.approx(math.copysign(1, c) * base.skewness, abs=1e-9)


def test_align_intersects_dates():
    a = ReturnSeries("A", ("1", "2", "3"), [1.0, 2.0, 3.0])
    b = ReturnSeries("B", ("2", "3", "4"), [5.0, 6.0, 7.0])
    a2, b2 = align([a, b])
    assert a2.dates == b2.dates == ("2", "3")
    assert a2.values.tolist() == [2.0, 3.0]
