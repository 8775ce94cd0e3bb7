import math

import numpy as np
import pytest

from powerlawst.crosstalk import (
    closed_form_budget,
    colors_required,
    crosstalk_norm,
    eps_level,
    lattice_sum_constant,
    level_schedule,
    pair_interaction_bound,
    pulse_count,
    total_crosstalk,
)


def test_pair_bound_examples():
    assert pair_interaction_bound(1, 1.0, 3.0, 2) == 1.0
    assert pair_interaction_bound(2, 4.0, 3.0, 2) == pytest.approx(0.25, rel=1e-15)
    # L=3 blocks in 3D at the sqrt(n)*L spacing of a 4-color pattern
    assert pair_interaction_bound(3, 6.0, 6.0, 3) == pytest.approx(0.5**6, rel=1e-14)
    with pytest.raises(ValueError):
        pair_interaction_bound(2, 1.0, 3.0, 2)  # blocks would overlap


def test_offset_sum_constant_1d_zeta():
    # two-sided 1D sum of |k|^-2 converges to 2*zeta(2) = pi^2/3
    assert lattice_sum_constant(2.0, 1) == pytest.approx(math.pi**2 / 3.0, rel=1e-12)


def test_norm_first_shell_matches_pair_bound():
    # r just above R: one same-color neighbor per side in 1D
    norm = crosstalk_norm(1, 2.0, 2.5, 3.0, 1)
    assert norm.exact == pytest.approx(2.0 * pair_interaction_bound(1, 2.0, 3.0, 1), rel=1e-14)
    assert not norm.divergent


def test_norm_ratio_to_closed_form_stays_bounded():
    ratios = []
    for r in (10.0, 100.0, 1000.0, 10000.0):
        norm = crosstalk_norm(2, 4.0, r, 3.0, 2)
        ratios.append(norm.exact / norm.bound)
    # exact sum approaches (and never exceeds) the converged-constant bound
    assert all(rat <= 1.0 + 1e-12 for rat in ratios)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1.0, rel=1e-3)


def test_norm_divergence_flag():
    norm = crosstalk_norm(1, 2.0, 100.0, 2.0, 2)  # alpha = d: log-divergent
    assert norm.divergent
    assert math.isinf(norm.bound)
    assert norm.exact > 0.0
    with pytest.raises(ValueError):
        crosstalk_norm(2, 1.0, 10.0, 3.0, 2)  # R < L
    with pytest.raises(ValueError):
        crosstalk_norm(1, 4.0, 2.0, 3.0, 2)  # r < R


def test_eps_level_convention_ratio_is_exactly_n():
    for n in (2, 4, 9):
        pub = eps_level(2, n, 1000.0, 3.0, 2, "published")
        dra = eps_level(2, n, 1000.0, 3.0, 2, "draft")
        assert pub == n * dra  # bitwise: published is defined as n * draft


def test_eps_level_zero_beyond_system():
    # same-color spacing exceeds the system: no same-color pair exists
    assert eps_level(10, 9, 25.0, 3.0, 2, "published") == 0.0


def test_level_schedule_regimes():
    lam = 4.0 / 3.0
    ladder = level_schedule(1e4, 2.0, 3.0, 2, "published")
    for a, b in zip(ladder, ladder[1:-1]):
        assert b == pytest.approx(a**lam, rel=1e-12)
    assert ladder[-1] == 1e4
    geo = level_schedule(100.0, 2.0, 4.0, 2, "published")
    assert geo[:4] == [2.0, 4.0, 8.0, 16.0]
    geo3 = level_schedule(100.0, 2.0, 4.0, 2, "published", m_prime=3.0)
    assert geo3[:4] == [2.0, 6.0, 18.0, 54.0]
    pub5 = level_schedule(100.0, 2.0, 5.0, 2, "published")
    assert pub5[:4] == [2.0, 4.0, 8.0, 16.0]
    dra5 = level_schedule(100.0, 2.0, 5.0, 2, "draft")
    assert dra5[:3] == [2.0, 4.0, 16.0]  # squaring ladder
    with pytest.raises(ValueError):
        level_schedule(100.0, 1.0, 3.0, 2)
    with pytest.raises(ValueError):
        level_schedule(100.0, 2.0, 1.5, 2)  # alpha <= d


def test_level_count_tracks_direct_iteration():
    # i_max equals the directly iterated ladder length (+1 for the top cap)
    for r in (1e3, 1e4, 1e6):
        budget = total_crosstalk(r, 2, 4, 3.0, 2, "published")
        count, L = 0, 2.0
        while L < r:
            count += 1
            L = L ** (4.0 / 3.0)
        assert abs(budget.i_max - count) <= 1


def test_total_monotone_decreasing_in_n():
    totals = [total_crosstalk(1e4, 2, n, 3.0, 2, "published").total for n in (1, 2, 3, 4, 5, 6)]
    assert all(b < a for a, b in zip(totals, totals[1:]))


def test_total_monotone_increasing_in_r():
    totals = [total_crosstalk(r, 2, 4, 3.0, 2, "published").total for r in (1e3, 3e3, 1e4)]
    assert all(b > a for a, b in zip(totals, totals[1:]))


def test_total_vanishes_as_n_grows_unbounded():
    assert total_crosstalk(1e4, 2, 10**12, 3.0, 2, "published").total == 0.0


def test_total_convention_bridge_per_level():
    pub = total_crosstalk(1e3, 2, 4, 3.0, 2, "published")
    dra = total_crosstalk(1e3, 2, 4, 3.0, 2, "draft")
    assert [L for L, _ in pub.per_level] == [L for L, _ in dra.per_level]
    for (_, ep), (_, ed) in zip(pub.per_level, dra.per_level):
        assert ep == 4 * ed


def test_closed_form_budget_exponents():
    # d < alpha < 2d: pure power r^{2d-alpha}
    lo, hi = closed_form_budget(1e3, 4, 3.0, 2), closed_form_budget(1e6, 4, 3.0, 2)
    assert math.log(hi / lo) / math.log(1e3) == pytest.approx(1.0, rel=1e-12)
    # alpha > 2d: logarithmic growth
    for r in (1e3, 1e6):
        assert closed_form_budget(r, 4, 5.0, 2) == pytest.approx(
            math.log(r) / 4.0**1.5, rel=1e-12
        )
    # alpha = 2d published: stretched-exponential form
    gamma = 3.0 * math.sqrt(2.0)
    assert closed_form_budget(1e4, 4, 4.0, 2, "published") == pytest.approx(
        math.exp(gamma * math.sqrt(math.log(1e4))) / 4.0, rel=1e-12
    )
    # alpha = 2d draft: r^{2d-alpha+1}/n^{alpha/d}
    assert closed_form_budget(1e4, 4, 4.0, 2, "draft") == pytest.approx(
        1e4 / 4.0**2, rel=1e-12
    )


def test_colors_required_bracketing_exact_objective():
    res = colors_required(100.0, 2, 0.5, 3.0, 2, objective="exact")
    total_at = lambda n: total_crosstalk(100.0, 2, n, 3.0, 2, "published").total
    assert total_at(res.n) <= 0.5
    if res.n > 1:
        assert total_at(res.n - 1) > 0.5


def test_colors_required_regime_fields():
    pub = colors_required(1e4, 2, 0.01, 3.0, 2, "published")
    assert pub.regime == "power"
    assert pub.r_exponent == pytest.approx(2.0, rel=1e-12)
    dra = colors_required(1e4, 2, 0.01, 3.0, 2, "draft")
    assert dra.r_exponent == pytest.approx(2.0 / 3.0, rel=1e-12)
    far = colors_required(1e4, 2, 0.01, 5.0, 2, "published")
    assert far.regime == "polylog"
    assert far.log_r_exponent == pytest.approx(2.0 / 3.0, rel=1e-12)
    with pytest.raises(ValueError):
        colors_required(1e4, 2, 0.0, 3.0, 2)


def test_colors_required_slope_published():
    rs = np.array([1e3, 1e4, 1e5, 1e6])
    ns = np.array([colors_required(r, 2, 0.01, 3.0, 2, "published").n for r in rs])
    slope = np.polyfit(np.log(rs), np.log(ns.astype(float)), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_colors_required_slope_draft():
    rs = np.array([1e3, 1e4, 1e5, 1e6])
    ns = np.array([colors_required(r, 2, 0.01, 3.0, 2, "draft").n for r in rs])
    slope = np.polyfit(np.log(rs), np.log(ns.astype(float)), 1)[0]
    assert slope == pytest.approx(2.0 / 3.0, abs=0.1)


def test_pulse_count_values():
    assert pulse_count(1) == ([0], 0)
    assert pulse_count(2) == ([0, 2], 2)
    per5, total5 = pulse_count(5)
    assert per5 == [0, 2, 4, 8, 16]
    assert total5 == 16
    assert pulse_count(13)[1] == 4096  # 2^{n-1}; the rounding-adjacent 2896-scale case
    assert pulse_count(25)[1] == 2**24
    for n in range(2, 26):
        per, total = pulse_count(n)
        assert total == 2 ** (n - 1)
        # colors share pulse times: the per-color tally overshoots the total
        assert sum(per) == 2**n - 2
    with pytest.raises(ValueError):
        pulse_count(0)
