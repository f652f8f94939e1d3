import math

import numpy as np
import pytest

from gcshelm import gaussian_states as gs
from gcshelm import quadrature as quad


def test_constant_integral_exact():
    rule = quad.build_rule((0.0, 1.0), 20, 20)
    assert abs(np.sum(rule.weights) - 1.0) < 1e-14
    val = quad.inner_product(lambda x: np.ones_like(x), lambda x: np.ones_like(x), rule)
    assert abs(val - 1.0) < 1e-14


def test_oscillatory_closed_form():
    k = 100.0
    rule = quad.build_rule((-1.0, 1.0), k, 20)
    val = quad.inner_product(lambda x: np.exp(1j * k * x), lambda x: np.ones_like(x), rule)
    assert abs(val - 2.0 * math.sin(k) / k) < 1e-10


def test_gaussian_normalization_high_k():
    hbar = 1.0 / 400.0
    s = gs.CoherentState(hbar, 0.0, 1.0)
    rule = quad.build_rule(quad.support_window([s]), 400, 20)
    val = quad.inner_product(lambda x: gs.eval_state(s, x), lambda x: gs.eval_state(s, x), rule)
    assert abs(val - 1.0) < 1e-12


def test_weights_sum_and_node_ordering():
    rule = quad.build_rule((-2.5, 3.5), 50, 26)
    assert abs(np.sum(rule.weights) - 6.0) < 1e-13 * 6.0
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.nodes[0] > -2.5 and rule.nodes[-1] < 3.5
    assert np.all(rule.weights > 0)


def test_inner_product_axioms():
    rule = quad.build_rule((-1.0, 1.0), 30, 20)

    def f(x):
        return np.exp(1j * 30 * x) * np.cos(x)

    def g(x):
        return np.exp(-(x**2)) * (1.0 + 2j * x)

    ff = quad.inner_product(f, f, rule)
    assert abs(ff.imag) < 1e-14 * abs(ff)
    assert ff.real >= 0.0
    fg = quad.inner_product(f, g, rule)
    gf = quad.inner_product(g, f, rule)
    assert abs(fg - np.conj(gf)) < 1e-14


def test_inner_product_matches_overlap():
    hbar = 1.0 / 50.0
    s1 = gs.CoherentState(hbar, 0.1, 0.8)
    s2 = gs.CoherentState(hbar, -0.2, 1.1)
    rule = quad.build_rule(quad.support_window([s1, s2]), 50, 60)
    val = quad.inner_product(lambda x: gs.eval_state(s1, x), lambda x: gs.eval_state(s2, x), rule)
    assert abs(val - gs.overlap(s1, s2)) < 1e-10


def test_support_window_single_and_hull():
    hbar = 0.01
    s = gs.CoherentState(hbar, 0.5, 0.0)
    lo, hi = quad.support_window([s])
    assert abs(lo - (0.5 - 12 * math.sqrt(hbar))) < 1e-12
    assert abs(hi - (0.5 + 12 * math.sqrt(hbar))) < 1e-12
    s2 = gs.CoherentState(hbar, 5.0, 0.0)
    lo2, hi2 = quad.support_window([s, s2])
    assert lo2 == lo and abs(hi2 - (5.0 + 12 * math.sqrt(hbar))) < 1e-12


def test_support_window_covers_pml_states():
    from gcshelm.assembly_solver import states_from_index_set
    from gcshelm.phase_space import LatticeSpec, build_symbol_set
    from gcshelm.problem_model import ProblemCase

    case = ProblemCase.homogeneous(20)
    iset = build_symbol_set(LatticeSpec(1.0 / 20.0), case.symbol, 2.0)
    lo, hi = quad.support_window(states_from_index_set(iset))
    assert lo < -3.2 and hi > 3.2


def test_refinement_stability_of_gram_entries():
    # doubling the density moves assembled Gram entries by <= 1e-10 relative
    from gcshelm.assembly_solver import assemble, states_from_index_set
    from gcshelm.phase_space import LatticeSpec, build_symbol_set
    from gcshelm.problem_model import ProblemCase

    k = 50.0
    case = ProblemCase.homogeneous(k)
    iset = build_symbol_set(LatticeSpec(1.0 / k), case.symbol, 0.5)
    states = states_from_index_set(iset)
    lo, hi = quad.support_window(states)
    window = (min(lo, -1.0), max(hi, 1.0))
    grams = []
    for density in (64, 128):
        rule = quad.build_rule(window, k, density)
        system = assemble(iset, case, rule)
        grams.append(system.matrix.conj().T @ system.matrix)
    scale = np.abs(grams[1]).max()
    assert np.abs(grams[0] - grams[1]).max() <= 1e-10 * scale


def test_invalid_inputs():
    with pytest.raises(ValueError):
        quad.build_rule((1.0, 1.0), 20)
    with pytest.raises(ValueError):
        quad.build_rule((0.0, 1.0), 20, nodes_per_wavelength=5)
    with pytest.raises(ValueError):
        quad.support_window([])
