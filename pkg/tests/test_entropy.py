import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropyrisk import (DegenerateError, DomainError, HistogramSpec, InsufficientDataError,
                         conditional_entropy, differential_entropy, entropy_discrete,
                         joint_entropy, normal_entropy)
from entropyrisk.entropy import JointGrid, default_bins, freedman_diaconis_bins
from entropyrisk.errors import AlignmentError
from entropyrisk.synth import UniformStream

from conftest import gen

H_STD_NORMAL = 0.5 * math.log(2 * math.pi * math.e)  # 1.418939


class TestDiscrete:
    def test_uniform4(self):
        assert entropy_discrete([0.25] * 4) == pytest.approx(math.log(4), abs=1e-12)

    def test_degenerate(self):
        assert entropy_discrete([1.0, 0, 0]) == 0.0

    def test_hand_sum(self):
        assert entropy_discrete([0.5, 0.25, 0.25]) == pytest.approx(1.5 * math.log(2), abs=1e-12)

    @pytest.mark.parametrize("p", [[0.5, 0.6], [-0.1, 1.1], []])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            entropy_discrete(p)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda v: sum(v) > 0))
    def test_bounds(self, w):
        p = np.array(w) / sum(w)
        h = entropy_discrete(p)
        assert -1e-15 <= h <= math.log(len(p)) + 1e-12


class TestDifferential:
    def test_uniform(self):
        u = UniformStream(7).uniform(50_000)
        est = differential_entropy(u, HistogramSpec("equidistant", 32))
        assert abs(est.value) < 0.02
        assert est.estimator == "plug_in_equidistant" and est.bins_used == 32

    def test_normal_equidistant(self, gauss50k):
        h = differential_entropy(gauss50k, HistogramSpec("equidistant", 32)).value
        assert h == pytest.approx(H_STD_NORMAL, abs=0.03)

    def test_normal_equiprobable_agrees(self, gauss50k):
        a = differential_entropy(gauss50k, HistogramSpec("equidistant", 32)).value
        b = differential_entropy(gauss50k, HistogramSpec("equiprobable", 32)).value
        assert abs(a - b) < 0.05

    def test_default_rule(self, gauss50k):
        h = differential_entropy(gauss50k).value
        assert h == pytest.approx(H_STD_NORMAL, abs=0.03)

    def test_translation_invariance(self, gauss50k):
        spec = HistogramSpec("equidistant", 40)
        a = differential_entropy(gauss50k, spec).value
        b = differential_entropy(gauss50k.values + 3.0, spec).value
        assert abs(a - b) < 1e-9

    def test_scale_shifts_by_log(self, gauss50k):
        spec = HistogramSpec("equiprobable", 30)
        a = differential_entropy(gauss50k, spec).value
        b = differential_entropy(gauss50k.values * 0.01, spec).value
        assert b - a == pytest.approx(math.log(0.01), abs=1e-9)

    def test_student_t_below_normal(self):
        x = gen("student_t", 50_000, 3, nu=4.0, standardize=True)[0].values
        assert differential_entropy(x).value < normal_entropy(x.std()) + 0.02

    def test_miller_madow_adds_bias_term(self, gauss50k):
        spec = HistogramSpec("equidistant", 32)
        plain = differential_entropy(gauss50k, spec)
        corrected = differential_entropy(gauss50k, spec, miller_madow=True)
        assert 0 < corrected.value - plain.value <= 31 / (2 * 50_000) + 1e-15

    def test_constant_input(self):
        with pytest.raises(DegenerateError):
            differential_entropy(np.ones(100), HistogramSpec(bins=4))

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            differential_entropy(np.arange(10.0), HistogramSpec(bins=4))

    def test_bad_spec(self):
        with pytest.raises(DomainError):
            HistogramSpec("kernel")
        with pytest.raises(DomainError):
            HistogramSpec(bins=1)


def test_bin_rules():
    assert default_bins(50_000) == 37
    assert default_bins(1858, dims=2) == 7
    assert default_bins(1000) == 10
    u = UniformStream(1).uniform(50_000)
    assert freedman_diaconis_bins(u) == pytest.approx(37, abs=1)


def test_ties_go_to_lower_cell():
    x = np.array([0.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    from entropyrisk.entropy import bin_edges, bin_index
    edges = bin_edges(x, 2, "equidistant")  # [0, 2.5, 5]
    assert bin_index(np.array([2.5, 0.0, 5.0]), edges).tolist() == [0, 0, 1]


class TestNormalEntropy:
    @pytest.mark.parametrize("sigma, expected", [
        (1.0, 1.418939), (math.e, 2.418939), (0.01, -3.186231)])
    def test_closed_form(self, sigma, expected):
        assert normal_entropy(sigma) == pytest.approx(expected, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            normal_entropy(0.0)


class TestJoint:
    SPEC = HistogramSpec("equidistant", 16)

    def test_identical(self, gauss50k):
        hxy = joint_entropy(gauss50k, gauss50k, self.SPEC).value
        hx = differential_entropy(gauss50k, self.SPEC).value
        assert hxy <= 2 * hx
        # on the diagonal H(X,X) = H(X) + mean log width
        grid = JointGrid.build(gauss50k, gauss50k, 16, "equidistant")
        assert grid.joint() - grid.marginal_x() == pytest.approx(math.log(np.diff(grid.x_edges)[0]))

    def test_independent(self, indep50k):
        x, y = indep50k
        assert joint_entropy(x, y, self.SPEC).value == pytest.approx(2 * H_STD_NORMAL, abs=0.05)

    def test_correlated(self, bvn06):
        x, y = bvn06
        expected = 2 * H_STD_NORMAL + 0.5 * math.log(1 - 0.36)  # 2.614768
        assert joint_entropy(x, y, self.SPEC).value == pytest.approx(expected, abs=0.05)

    def test_length_mismatch(self):
        with pytest.raises(AlignmentError):
            joint_entropy(np.zeros(10), np.zeros(11))


class TestConditional:
    SPEC = HistogramSpec("equidistant", 16)

    def test_independent(self, indep50k):
        x, y = indep50k
        hx = differential_entropy(x, HistogramSpec("equidistant", 16)).value
        assert conditional_entropy(x, y, self.SPEC).value == pytest.approx(hx, abs=0.05)

    def test_functional(self, gauss50k):
        h_cond = conditional_entropy(gauss50k, gauss50k, self.SPEC).value
        assert h_cond <= 0.1 * H_STD_NORMAL

    @pytest.mark.parametrize("scheme", ["equidistant", "equiprobable"])
    def test_shared_grid_properties(self, bvn06, indep50k, scheme):
        for x, y in (bvn06, indep50k):
            g = JointGrid.build(x, y, 12, scheme)
            hx, hy, hxy = g.marginal_x(), g.marginal_y(), g.joint()
            assert hxy - hy <= hx + 1e-9            # H(X|Y) <= H(X)
            assert hxy <= hx + hy + 1e-9            # subadditivity
            cond = conditional_entropy(x, y, HistogramSpec(scheme, 12)).value
            assert abs(hxy - (hy + cond)) < 1e-12   # chain rule
