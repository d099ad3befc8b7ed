import math

import numpy as np
import pytest

from meandim.groups import GroupModel, box, folner_boxes
from meandim.infotheory import Pmf, binary_entropy
from meandim.ratedist import (
    DistortionSpec,
    EmpiricalFamily,
    MarkovMeasure,
    ProductMeasure,
    default_codebook,
    distortion_matrix,
    empirical_measure,
    linf_alpha_path,
    markov_family,
    minimize_rate,
    ordering_suite,
    partition_map,
    product_family,
    rd_normalized,
    rd_window,
    rd_window_linf,
)
from meandim.spaces import SystemModel
from oracles import binary_rd_closed_form, rd_grid_oracle

STRICT = 1 - 1e-9


def binary_model(n=3):
    g = GroupModel.integers()
    return SystemModel(alphabet=(0.0, 1.0), metric=1.0 - np.eye(2), group=g, window=box(g, n))


def grid_model(m, n=2):
    g = GroupModel.integers()
    alphabet = tuple(k / m for k in range(m + 1))
    arr = np.asarray(alphabet)
    return SystemModel(
        alphabet=alphabet,
        metric=np.abs(arr[:, None] - arr[None, :]),
        group=g,
        window=box(g, n),
    )


def bernoulli_half(model):
    F1 = box(model.group, 1)
    return Pmf.uniform(list(model.configurations(F1)))


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.3])
def test_rd_window_matches_closed_form(eps):
    model = binary_model()
    res = rd_window(bernoulli_half(model), model, DistortionSpec("l1"), eps)
    expect = binary_rd_closed_form(eps * STRICT)
    assert res.converged and res.feasible
    assert res.rate == pytest.approx(expect, abs=1e-6)
    assert res.distortion < eps  # strict, per the distortion condition


@pytest.mark.parametrize("eps", [0.1, 0.25])
def test_rd_window_agrees_with_grid_oracle_2x2(eps):
    model = binary_model()
    mu = bernoulli_half(model)
    res = rd_window(mu, model, DistortionSpec("l1"), eps)
    rho = distortion_matrix(model, mu.outcomes, mu.outcomes, DistortionSpec("l1"))
    oracle = rd_grid_oracle(mu.probs, rho, eps * STRICT, steps=50, levels=3)
    assert res.rate == pytest.approx(oracle, abs=1e-4)


def test_minimize_rate_agrees_with_grid_oracle_3x2():
    mu = np.array([0.5, 0.3, 0.2])
    rho = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.6]])
    for target in (0.15, 0.25):
        rate, dist, *_ = minimize_rate(mu, rho, target * STRICT, s_max=50 / target)
        oracle = rd_grid_oracle(mu, rho, target * STRICT, steps=50, levels=3)
        assert rate == pytest.approx(oracle, abs=1e-4)


def test_rd_window_zero_rate_above_diameter():
    model = binary_model()
    res = rd_window(bernoulli_half(model), model, DistortionSpec("l1"), eps=1.5)
    assert res.rate == 0.0
    assert res.note == "zero-rate"


def test_rd_window_point_mass_zero():
    model = binary_model()
    F1 = box(model.group, 1)
    mu = Pmf.point_mass(list(model.configurations(F1)), 0)
    for eps in (0.01, 0.2, 0.9):
        res = rd_window(mu, model, DistortionSpec("l1"), eps)
        assert res.rate == 0.0


def test_rd_window_infeasible_flagged():
    model = binary_model()
    mu = bernoulli_half(model)
    # restrict the codebook to a single word: minimum achievable E d is 1/2
    res = rd_window(mu, model, DistortionSpec("l1"), eps=0.3, Y=[(0,)])
    assert not res.feasible
    assert res.note == "infeasible"
    assert res.distortion >= 0.3


def test_rd_window_lp_binary_reduces_to_hamming():
    # 0/1 distances are p-th power invariant, so R_p(eps) = R_1(eps^p)
    model = binary_model()
    mu = bernoulli_half(model)
    for p, eps in ((2.0, 0.4), (4.0, 0.6)):
        res = rd_window(mu, model, DistortionSpec("lp", p=p), eps)
        expect = binary_rd_closed_form(eps**p * STRICT)
        assert res.rate == pytest.approx(expect, abs=1e-6)


def test_rd_window_linf_binary_reduces_to_hamming():
    model = binary_model()
    mu = bernoulli_half(model)
    res = rd_window_linf(mu, model, eps=0.5, alpha=0.1)
    expect = binary_rd_closed_form(0.1 * STRICT)
    assert res.rate == pytest.approx(expect, abs=1e-6)
    assert res.alpha == 0.1


def test_rd_window_linf_threshold_above_diameter():
    model = binary_model()
    mu = bernoulli_half(model)
    res = rd_window_linf(mu, model, eps=1.5, alpha=0.1)
    assert res.rate == 0.0  # no pair is ever eps-far, identity already feasible


def test_rd_window_linf_alpha_validation():
    model = binary_model()
    mu = bernoulli_half(model)
    with pytest.raises(ValueError):
        rd_window_linf(mu, model, eps=0.5, alpha=0.7)


def test_rd_rate_monotone_in_eps():
    model = grid_model(8)
    F1 = box(model.group, 1)
    measure = ProductMeasure(np.full(9, 1 / 9))
    mu = measure.window_marginal(model, F1)
    rates = []
    for eps in (0.05, 0.1, 0.2, 0.4):
        rates.append(rd_window(mu, model, DistortionSpec("l1"), eps).rate)
    assert all(a >= b - 1e-9 for a, b in zip(rates, rates[1:]))


def test_rd_normalized_product_measure_constant_in_n():
    model = binary_model()
    measure = ProductMeasure([0.5, 0.5], name="bern")
    rows = rd_normalized(
        measure, model, DistortionSpec("l1"), folner_boxes(model.group), [1, 2, 3], eps=0.1
    ).rows
    expect = binary_rd_closed_form(0.1 * STRICT)
    for row in rows:
        assert row["rate_per_symbol"] == pytest.approx(expect, abs=1e-4)


def test_rd_normalized_point_mass_zero():
    model = binary_model()
    measure = ProductMeasure([1.0, 0.0], name="point")
    rows = rd_normalized(
        measure, model, DistortionSpec("l1"), folner_boxes(model.group), [1, 2], eps=0.1
    ).rows
    assert all(row["rate"] == 0.0 for row in rows)


def test_rd_normalized_budget_truncation():
    model = grid_model(16)
    measure = ProductMeasure(np.full(17, 1 / 17))
    result = rd_normalized(
        measure,
        model,
        DistortionSpec("l1"),
        folner_boxes(model.group),
        [1, 2],
        eps=0.1,
        budget_cells=500,
    )
    assert result.truncated_at == 2
    assert len(result.rows) == 1


def test_linf_alpha_path_monotone():
    model = binary_model()
    measure = ProductMeasure([0.5, 0.5])
    rows = linf_alpha_path(
        measure, model, folner_boxes(model.group), n=2, eps=0.5, alphas=[0.4, 0.2, 0.1]
    )
    rates = [r["rate"] for r in rows]
    assert all(a <= b + 1e-9 for a, b in zip(rates, rates[1:]))  # smaller alpha, higher rate


def test_empirical_measure_point_mass():
    model = binary_model(2)
    W = box(model.group, 2)
    m = empirical_measure([(0, 0)], W, model)
    marg = m.window_marginal(model, W)
    assert marg.outcomes == ((0, 0),)
    assert marg.probs[0] == 1.0


def test_empirical_measure_full_set_uniform():
    model = binary_model(2)
    W = box(model.group, 2)
    m = empirical_measure(list(model.configurations(W)), W, model)
    marg = m.window_marginal(model, W)
    assert np.allclose(marg.probs, 0.25)


def test_empirical_measure_two_atoms_hand_enumeration():
    # S = {(0,1), (1,1)} on the window {0,1}: shift by 1 swaps coordinates,
    # so the atoms are (0,1), (1,1), (1,0), (1,1) with weight 1/4 each.
    model = binary_model(2)
    W = box(model.group, 2)
    m = empirical_measure([(0, 1), (1, 1)], W, model)
    marg = m.window_marginal(model, W)
    lookup = dict(zip(marg.outcomes, marg.probs))
    assert lookup == {(0, 1): 0.25, (1, 0): 0.25, (1, 1): 0.5}
    sub = m.window_marginal(model, box(model.group, 1))
    sub_lookup = dict(zip(sub.outcomes, sub.probs))
    assert sub_lookup == {(0,): 0.25, (1,): 0.75}


def test_partition_map_grid_cells():
    model = grid_model(8, n=1)
    quant = partition_map(model, eps=2 / 8)
    assert all(len(c) <= 2 for c in quant.cells)
    for i in range(9):
        cell = quant.cells[quant.cell_of[i]]
        assert i in cell
        rep = quant.reps[quant.cell_of[i]]
        assert model.metric[i, rep] < 2 / 8


def test_partition_map_single_cell_above_diameter():
    model = grid_model(8, n=1)
    quant = partition_map(model, eps=2.0)
    assert len(quant.cells) == 1


def test_partition_map_idempotent():
    model = grid_model(10, n=2)
    quant = partition_map(model, eps=0.17)
    for x in model.configurations():
        once = quant.quantize_config(x)
        assert quant.quantize_config(once) == once


def test_markov_measure_marginal_consistency():
    model = binary_model()
    markov = markov_family(model)[0]
    g = model.group
    m3 = markov.window_marginal(model, box(g, 3))
    m2 = markov.window_marginal(model, box(g, 2))
    # marginalizing out the last coordinate of the length-3 law gives the length-2 law
    acc = {}
    for cfg, p in zip(m3.outcomes, m3.probs):
        acc[cfg[:2]] = acc.get(cfg[:2], 0.0) + p
    for cfg, p in zip(m2.outcomes, m2.probs):
        assert acc[cfg] == pytest.approx(p, abs=1e-12)


def test_markov_measure_validation():
    with pytest.raises(ValueError):
        MarkovMeasure(np.array([[0.9, 0.1], [0.1, 0.9]]), np.array([0.9, 0.1]))


def test_product_family_small_alphabet_grid():
    model = binary_model()
    fam = product_family(model, simplex_steps=4)
    assert len(fam) == 3  # p in {1/4, 1/2, 3/4}
    for m in fam:
        assert abs(m.site.sum() - 1.0) < 1e-12


def test_product_family_large_alphabet_fixed():
    model = grid_model(16)
    fam = product_family(model)
    assert [m.name for m in fam] == ["product[uniform]", "product[ramp-up]", "product[ramp-down]"]


def test_empirical_family_marginal_valid():
    model = binary_model(2)
    fam = EmpiricalFamily(sep_factor=2.0, metric_kind="avg")
    marg = fam.window_marginal(model, box(model.group, 2), eps=0.1)
    assert marg.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_ordering_suite_binary():
    model = binary_model()
    measure = ProductMeasure([0.5, 0.5], name="bern")
    rows = ordering_suite(model, measure, box(model.group, 2), eps=0.1, ps=(1, 2, 4), alphas=(0.1, 0.01))
    assert all(row["ok"] for row in rows)


def test_ordering_suite_grid():
    model = grid_model(8)
    measure = ProductMeasure(np.full(9, 1 / 9))
    rows = ordering_suite(model, measure, box(model.group, 2), eps=0.15, ps=(1, 2), alphas=(0.1,))
    assert all(row["ok"] for row in rows)


def test_default_codebook_contains_support_and_reps():
    model = grid_model(8)
    F1 = box(model.group, 1)
    mu = ProductMeasure(np.full(9, 1 / 9)).window_marginal(model, F1)
    ys = default_codebook(model, mu, eps=0.3, window_size=1)
    assert set(mu.outcomes) <= set(ys)


def test_solver_gap_certificate_nonnegative():
    model = binary_model()
    res = rd_window(bernoulli_half(model), model, DistortionSpec("l1"), 0.12)
    assert res.gap >= -1e-12
    assert res.gap < 1e-8
