from __future__ import annotations

import math

import numpy as np
import pytest

from helpers import (
    antitree_with_chords,
    dirichlet_generator,
    expm_heat,
    lopsided_tree,
    path3,
    random_graph,
    symmetric_fixtures,
)
from wsgraph import (
    GrowthRule,
    HeatKernelAt,
    Lambda0,
    MassAt,
    SymmetricProfile,
    commutation_defect,
    decompose,
    detect_weak_symmetry,
    exhaust,
    heat_apply,
    heat_kernel,
    layer,
    make_antitree,
    mass_function,
    reduced_operator,
    restrict,
)
from wsgraph.errors import DimensionMismatch, IndexOutOfRange, RadiusOutOfRange, SizeCapExceeded
from wsgraph.generators import half_line
from wsgraph.semigroup import heat_kernel_row, heat_operator, log_heat_kernel


class TestRestrict:
    def test_path_keeps_full_degree(self):
        g = path3()
        ball = restrict(g, layer(g), 1)
        np.testing.assert_array_equal(ball.matrix, [[1.0, -1.0], [-1.0, 2.0]])

    def test_whole_graph(self):
        rng = np.random.default_rng(4)
        g = random_graph(rng, 25)
        lay = layer(g)
        ball = restrict(g, lay, lay.R)
        gen = dirichlet_generator(g, ball.vertices)
        s = np.sqrt(ball.measure)
        np.testing.assert_allclose(ball.matrix, s[:, None] * gen / s[None, :], rtol=1e-12, atol=1e-12)

    def test_unit_measure_is_plain_matrix(self):
        g, _ = make_antitree(2, 3)
        lay = layer(g)
        ball = restrict(g, lay, 2)
        np.testing.assert_array_equal(ball.matrix, dirichlet_generator(g, ball.vertices))

    def test_errors(self):
        g = path3()
        with pytest.raises(RadiusOutOfRange):
            restrict(g, layer(g), 3)
        big, _ = make_antitree(2, 6)
        with pytest.raises(SizeCapExceeded):
            restrict(big, layer(big), 6, cap=50)

    def test_order_by_radius_then_id(self):
        g = path3().with_root(1)
        ball = restrict(g, layer(g), 1)
        assert ball.vertices.tolist() == [1, 0, 2]


class TestDecompose:
    def test_one_by_one(self):
        p = SymmetricProfile.from_rule(GrowthRule.antitree(2), 3)
        op = reduced_operator(p, 0)
        d = decompose(op)
        assert d.eigenvalues.tolist() == [op.diagonal[0]]
        assert abs(d.eigenvectors[0, 0]) == 1.0

    def test_path_spectrum(self):
        g = path3()
        d = decompose(restrict(g, layer(g), 2))
        np.testing.assert_allclose(d.eigenvalues, [0, 1, 3], atol=1e-12)

    def test_dirichlet_pair(self):
        g = path3()
        d = decompose(restrict(g, layer(g), 1))
        np.testing.assert_allclose(d.eigenvalues, [(3 - 5**0.5) / 2, (3 + 5**0.5) / 2], rtol=1e-13)

    def test_deterministic(self):
        g = random_graph(np.random.default_rng(9), 40)
        lay = layer(g)
        a, b = decompose(restrict(g, lay, lay.R)), decompose(restrict(g, lay, lay.R))
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_non_negative(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            g = random_graph(rng, int(rng.integers(2, 50)))
            lay = layer(g)
            assert decompose(restrict(g, lay, lay.R)).eigenvalues[0] >= 0.0


class TestHeatKernel:
    def test_t_zero(self):
        g = random_graph(np.random.default_rng(12), 10)
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        for x in range(3):
            for y in range(3):
                expect = 1.0 / g.measure[x] if x == y else 0.0
                assert heat_kernel(d, 0.0, x, y) == pytest.approx(expect, abs=1e-12)

    def test_path_closed_form(self):
        g = path3()
        d = decompose(restrict(g, layer(g), 2))
        # eigenpairs 0: (1,1,1)/√3, 1: (1,0,-1)/√2, 3: (1,-2,1)/√6
        expect = 1 / 3 + math.exp(-1) / 2 + math.exp(-3) / 6
        assert heat_kernel(d, 1.0, 0, 0) == pytest.approx(expect, rel=1e-13)
        expect01 = 1 / 3 - 2 * math.exp(-3) / 6
        assert heat_kernel(d, 1.0, 0, 1) == pytest.approx(expect01, rel=1e-13)

    def test_symmetric_and_markov(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            g = random_graph(rng, 30)
            lay = layer(g)
            d = decompose(restrict(g, lay, max(lay.R - 1, 0)))
            for t in (0.1, 1.0, 5.0):
                K = np.array([heat_kernel_row(d, t, int(x)) for x in d.labels])
                np.testing.assert_allclose(K, K.T, rtol=1e-10, atol=1e-14)
                assert K.min() > -1e-14
                assert np.max(K @ d.weights) <= 1 + 1e-12

    def test_matches_expm(self):
        rng = np.random.default_rng(14)
        g = random_graph(rng, 35)
        lay = layer(g)
        ball = restrict(g, lay, max(lay.R - 1, 1))
        d = decompose(ball)
        gen = dirichlet_generator(g, ball.vertices)
        x = int(ball.vertices[0])
        e = np.zeros(d.size)
        e[0] = 1.0 / g.measure[x]
        np.testing.assert_allclose(heat_kernel_row(d, 0.7, x), expm_heat(gen, 0.7, e), rtol=1e-10, atol=1e-14)

    def test_log_domain_survives_underflow(self):
        p = SymmetricProfile.from_rule(GrowthRule.antitree(3), 10)
        d = decompose(reduced_operator(p, 8))
        lp = log_heat_kernel(d, 2000.0, 0, 0)
        assert math.isfinite(lp) and lp < math.log(1e-300)
        assert heat_kernel(d, 2000.0, 0, 0) == 0.0

    def test_unknown_label(self):
        d = decompose(restrict(path3(), layer(path3()), 1))
        with pytest.raises(IndexOutOfRange):
            heat_kernel(d, 1.0, 0, 2)


class TestHeatApply:
    def test_t_zero_exact(self):
        d = decompose(restrict(path3(), layer(path3()), 2))
        f = np.array([0.3, -1.0, 2.0])
        assert np.array_equal(heat_apply(d, 0.0, f), f)

    def test_eigenfunction(self):
        g = random_graph(np.random.default_rng(15), 20)
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        k = 3
        f = d.eigenvectors[:, k] / np.sqrt(d.weights)
        np.testing.assert_allclose(heat_apply(d, 0.8, f), math.exp(-0.8 * d.eigenvalues[k]) * f,
                                   rtol=1e-9, atol=1e-12)

    def test_decays_to_zero(self):
        g, _ = half_line(6)
        d = decompose(restrict(g, layer(g), 4))
        assert np.max(np.abs(heat_apply(d, 500.0, np.ones(5)))) < 1e-10

    def test_semigroup(self):
        rng = np.random.default_rng(16)
        g = random_graph(rng, 30)
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        f = rng.normal(size=d.size)
        np.testing.assert_allclose(heat_apply(d, 0.4, heat_apply(d, 1.1, f)), heat_apply(d, 1.5, f),
                                   rtol=1e-10, atol=1e-10)

    def test_dimension(self):
        d = decompose(restrict(path3(), layer(path3()), 2))
        with pytest.raises(DimensionMismatch):
            heat_apply(d, 1.0, np.ones(2))

    def test_operator_matches_apply(self):
        g = random_graph(np.random.default_rng(17), 15)
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        f = np.arange(d.size, dtype=float)
        np.testing.assert_allclose(heat_operator(d, 0.5) @ f, heat_apply(d, 0.5, f), rtol=1e-12, atol=1e-12)


class TestMass:
    def test_finite_graph_conserves(self):
        g = random_graph(np.random.default_rng(18), 30, potential=False)
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        np.testing.assert_allclose(mass_function(d, 3.0), 1.0, atol=1e-10)

    def test_t_zero(self):
        g = random_graph(np.random.default_rng(19), 20)
        lay = layer(g)
        d = decompose(restrict(g, lay, max(lay.R - 1, 0)))
        np.testing.assert_allclose(mass_function(d, 0.0), 1.0, atol=1e-12)

    def test_half_line_increasing(self):
        p = SymmetricProfile.from_rule(GrowthRule.tree(0, 1), 10)
        m3 = mass_function(decompose(reduced_operator(p, 3)), 5.0, 0)
        m6 = mass_function(decompose(reduced_operator(p, 6)), 5.0, 0)
        m30 = mass_function(decompose(reduced_operator(p, 30)), 5.0, 0)
        assert 0 < m3 < m6 < m30 <= 1 + 1e-12

    def test_trapezoid_oracle(self):
        # M_t = e^{-tL}1 + ∫ e^{-sL} q ds, with both terms from scipy's expm
        rng = np.random.default_rng(20)
        for _ in range(3):
            g = random_graph(rng, 20)
            lay = layer(g)
            ball = restrict(g, lay, max(lay.R - 1, 1))
            d = decompose(ball)
            gen = dirichlet_generator(g, ball.vertices)
            q = ball.potential
            t, N = 1.5, 2000
            s = np.linspace(0, t, N + 1)
            vals = np.array([expm_heat(gen, si, q) for si in s])
            integral = (vals[0] + vals[-1]) * 0.5 + vals[1:-1].sum(axis=0)
            expect = expm_heat(gen, t, np.ones(d.size)) + integral * (t / N)
            np.testing.assert_allclose(mass_function(d, t), expect, atol=1e-6)

    def test_bounds(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            g = random_graph(rng, 25)
            lay = layer(g)
            for i in range(lay.R + 1):
                M = mass_function(decompose(restrict(g, lay, i)), 1.0)
                assert M.min() >= -1e-12 and M.max() <= 1 + 1e-9


class TestCommutation:
    def test_symmetric_small(self):
        d = decompose(restrict(antitree_with_chords(), layer(antitree_with_chords()), 4))
        assert commutation_defect(d, 1.0) <= 1e-10

    def test_lopsided(self):
        g = lopsided_tree()
        lay = layer(g)
        d = decompose(restrict(g, lay, lay.R))
        assert commutation_defect(d, 1.0) > 1e-3

    def test_t_zero(self):
        g = lopsided_tree()
        d = decompose(restrict(g, layer(g), 2))
        assert commutation_defect(d, 0.0) == 0.0

    def test_dimension(self):
        d = decompose(restrict(path3(), layer(path3()), 2))
        with pytest.raises(DimensionMismatch):
            commutation_defect(d, 1.0, np.zeros(2, dtype=int))


class TestProfileFaithfulness:
    @pytest.mark.parametrize("name,graph", symmetric_fixtures())
    def test_kernel_matches_reduction(self, name, graph):
        v, p = detect_weak_symmetry(graph)
        assert v.positive
        lay = layer(graph)
        i = lay.R - 1
        d = decompose(restrict(graph, lay, i))
        d_red = decompose(reduced_operator(p, i))
        for t in (0.5, 1.0, 2.0):
            row = heat_kernel_row(d, t, lay.root)
            red = heat_kernel_row(d_red, t, 0)
            np.testing.assert_allclose(row, red[lay.radius_of[d.labels]], rtol=1e-9, atol=1e-11)
        assert abs(d.eigenvalues[0] - d_red.eigenvalues[0]) <= 1e-10


class TestExhaust:
    def test_heat_kernel_half_line(self):
        p = SymmetricProfile.from_rule(GrowthRule.tree(0, 1), 10)
        res = exhaust(p, HeatKernelAt(1.0, 0, 0), tol=1e-8, r_max=200)
        assert res.converged and res.radii[-1] < 200 and res.bound == "lower"
        assert np.all(np.diff(res.values) >= -1e-12)

    def test_lambda0_regular_tree(self):
        p = SymmetricProfile.from_rule(GrowthRule.regular_tree(3), 10)
        res = exhaust(p, Lambda0(), r_max=40)
        assert res.bound == "upper"
        assert np.all(np.diff(res.values) <= 1e-12)

    def test_mass_bounded(self):
        p = SymmetricProfile.from_rule(GrowthRule.antitree(3), 10)
        res = exhaust(p, MassAt(1.0, 0), r_max=60)
        assert res.values.max() <= 1 + 1e-9
        assert np.all(np.diff(res.values) >= -1e-12)

    def test_graph_supplier(self):
        res = exhaust(lambda i: half_line(i + 1)[0], HeatKernelAt(1.0, 0, 0), r_max=30)
        ref = exhaust(SymmetricProfile.from_rule(GrowthRule.tree(0, 1), 40), HeatKernelAt(1.0, 0, 0), r_max=30)
        np.testing.assert_allclose(res.values, ref.values, rtol=1e-10)

    def test_size_cap_stops_gracefully(self):
        g, _ = make_antitree(2, 8)
        res = exhaust(g, Lambda0(), cap=50)
        assert not res.converged and "cap" in res.note

    def test_overflow_stops_gracefully(self):
        p = SymmetricProfile.from_rule(GrowthRule.tree(3, 1), 10)
        res = exhaust(p, MassAt(1.0, 0), tol=1e-12, r_max=200)
        assert not res.converged and "floating-point" in res.note
        assert res.radii[-1] < 70

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            exhaust(path3(), Lambda0(), tol=0)
