"""Tests for mean first-exit times and the splitting probability.

Expected values were frozen from an 80-digit arbitrary-precision oracle
that evaluates the defining backward-equation integral representations
by nested quadrature; every frozen number was confirmed by a second,
structurally different oracle route (brute-force double integral of the
integrating-factor form, and a ground-rate spectral bound for the
radial case), with at least 40 matching digits.

The deep-trap escape formulas are leading-order only.  At the moderate
trap strengths probed here, four of their tabulated agreement targets
are tighter than the formulas' true deviation, which a correct solver
cannot meet (only a broken one could).  Those assertions are kept at
the tabulated tolerance but marked xfail(strict=True); companion tests
pin the measured deviation from the oracle so regressions in either
direction stay visible.
"""

import math

import pytest

from ouexit._quad import tanh_sinh
from ouexit.mean_exit import (
    MeanExitRequest,
    _marginal_constant,
    _met_interval_erf_form,
    _met_interval_erfc_form,
    mean_exit_time,
    met_exterior_1d_forced,
    met_interval,
    met_interval_asymptotic,
    met_radial_exterior,
    met_radial_interior,
    splitting_probability,
)
from ouexit.ou_model import Geometry

# ---------------------------------------------------------------------------
# Frozen oracle values (dimensionless times, units L**2/D).

INTERVAL_ORACLE = {
    (1.0, 0.0, 0.0): 0.72262280669417361,
    (2.0, 0.5, 0.3): 0.58903282915405114,
    (30.0, 0.5, 0.2): 21.235033082426636,
    (4.0, 0.0, 0.0): 3.4290923940624713,
    (12.0, 0.0, 0.0): 1819.0136303576826,
    (10.0, 2.0, 0.0): 0.033795423021370187,
}

RADIAL_INTERIOR_ORACLE = {
    (3, 2.0, 0.4): 0.2419875229610314,
    (2, 1.5, 0.5): 0.3175499518000942,
    (5, 3.0, 0.0): 0.1739298759966628,
    (3, 12.0, 0.0): 84.147333931218748,
}

RADIAL_EXTERIOR_ORACLE = {
    (3, 1.0, 2.0): 0.42365699869269221,
    (4, 1.0, 2.0): 0.53407359027997265,
    (5, 0.8, 1.5): 0.69169221521580997,
    (1, 1.0, 3.0): 0.47946534692633391,
    (3, 0.01, 2.0): 225.53498354439988,
}

EXTERIOR_1D_ORACLE = {
    (2.0, 0.5, 1.8): 0.18779514533557609,
    (3.0, 2.2, 1.5): 11.32620178733285,
    (15.0, 0.5, 2.0): 0.034961607535577648,
    (15.0, 1.5, 2.0): 1.5818216655760346,
}

SPLITTING_ORACLE = {
    (1.0, 0.5, 0.0): 0.76346565106589342,
    (3.0, 0.2, 0.4): 0.88715404523896523,
    (2.0, 1.3, -0.5): 0.97782954450581116,
}

# Limit constant of the marginal-pull escape time (also frozen from the
# oracle); its published rounded value is 0.375.
MARGINAL_CONSTANT = 0.3746530006367393


def rel(got, want):
    return abs(got - want) / abs(want)


# ---------------------------------------------------------------------------
# Frozen-value agreement.

@pytest.mark.parametrize("args,want", sorted(INTERVAL_ORACLE.items()))
def test_interval_matches_oracle(args, want):
    assert rel(met_interval(*args), want) < 1e-12


@pytest.mark.parametrize("args,want", sorted(RADIAL_INTERIOR_ORACLE.items()))
def test_radial_interior_matches_oracle(args, want):
    assert rel(met_radial_interior(*args), want) < 1e-12


@pytest.mark.parametrize("args,want", sorted(RADIAL_EXTERIOR_ORACLE.items()))
def test_radial_exterior_matches_oracle(args, want):
    assert rel(met_radial_exterior(*args), want) < 1e-12


@pytest.mark.parametrize("args,want", sorted(EXTERIOR_1D_ORACLE.items()))
def test_exterior_1d_matches_oracle(args, want):
    assert rel(met_exterior_1d_forced(*args), want) < 1e-12


@pytest.mark.parametrize("args,want", sorted(SPLITTING_ORACLE.items()))
def test_splitting_matches_oracle(args, want):
    assert rel(splitting_probability(*args), want) < 1e-13


def test_two_dimensional_exterior_is_a_pure_logarithm():
    # d = 2 collapses to ln(z0)/(2 kappa); at z0 = e, kappa = 1 -> 1/2.
    assert abs(met_radial_exterior(2, 1.0, math.e) - 0.5) < 1e-14
    assert rel(met_radial_exterior(2, 3.0, 1.7), math.log(1.7) / 6.0) < 1e-14


# ---------------------------------------------------------------------------
# Exact boundary and limit behaviour.

def test_boundary_start_exits_immediately():
    assert met_interval(3.0, 0.5, 1.0) == 0.0
    assert met_interval(3.0, 0.5, -1.0) == 0.0
    assert met_radial_interior(3, 2.0, 1.0) == 0.0
    assert met_radial_exterior(3, 2.0, 1.0) == 0.0
    assert met_exterior_1d_forced(3.0, 0.5, 1.0) == 0.0


def test_vanishing_trap_interval_is_classical_parabola():
    for z0 in (0.0, 0.3, -0.8):
        assert rel(met_interval(0.0, 0.0, z0), 0.5 * (1.0 - z0 * z0)) < 1e-14


def test_vanishing_trap_radial_interior_is_classical():
    for d in (1, 2, 3, 5):
        for z0 in (0.0, 0.2, 0.7):
            want = (1.0 - z0 * z0) / (2.0 * d)
            assert rel(met_radial_interior(d, 0.0, z0), want) < 1e-14


def test_vanishing_trap_exterior_mean_is_infinite():
    assert met_radial_exterior(3, 0.0, 2.0) == math.inf
    assert met_exterior_1d_forced(0.0, 0.0, 2.0) == math.inf


def test_drift_diffusion_limit_matches_closed_form():
    # kappa -> 0 at fixed eta = 2 kappa varphi: pure drift-diffusion.
    kappa, eta, z0 = 1e-9, 0.5, 0.3
    got = met_interval(kappa, eta / (2.0 * kappa), z0)
    want = (1.0 - z0 - 2.0 * (math.exp(-eta * z0) - math.exp(-eta))
            / (math.exp(eta) - math.exp(-eta))) / eta
    assert rel(got, want) < 1e-9


def test_drift_diffusion_series_is_continuous_in_eta():
    # The tiny-eta series and the exponential form must agree across
    # their switch (eta = 1e-5).
    z0 = 0.4
    lo = met_interval(1e-9, 0.99e-5 / 2e-9, z0)
    hi = met_interval(1e-9, 1.01e-5 / 2e-9, z0)
    assert rel(lo, hi) < 1e-6


def test_brownian_route_is_continuous_at_its_threshold():
    below = met_interval(0.99e-8, 0.0, 0.3)
    above = met_interval(1.01e-8, 0.0, 0.3)
    assert rel(below, above) < 1e-7
    below_r = met_radial_interior(3, 0.99e-8, 0.3)
    above_r = met_radial_interior(3, 1.01e-8, 0.3)
    assert rel(below_r, above_r) < 1e-7


def test_small_kappa_expansion_with_second_order_term():
    kappa, varphi, z0 = 0.05, 0.2, 0.3
    expansion = (0.5 * (1.0 - z0 * z0)
                 * (1.0 + kappa * (1.0 - 2.0 * varphi * z0 + z0 * z0) / 3.0)
                 + 2.0 * kappa**2 / 45.0)
    assert rel(met_interval(kappa, varphi, z0), expansion) < 1e-3


# ---------------------------------------------------------------------------
# Deep-trap asymptotics.

def test_symmetric_escape_formula_at_kappa_12():
    met = met_interval(12.0, 0.0, 0.0)
    asym = met_interval_asymptotic(12.0, 0.0, 0.0, "symmetric")
    assert rel(asym, met) < 0.05


@pytest.mark.xfail(
    strict=True,
    reason="the drift-dominated escape formula ln((varphi - z0)/(varphi - 1))"
           "/(2 kappa) is 2.5% off at kappa=10, varphi=2 (oracle-verified); "
           "a 2% match is not attainable there")
def test_supercritical_escape_formula_at_kappa_10_within_2pct():
    met = met_interval(10.0, 2.0, 0.0)
    asym = met_interval_asymptotic(10.0, 2.0, 0.0, "supercritical")
    assert rel(asym, met) < 0.02


def test_supercritical_escape_formula_measured_deviation():
    met = met_interval(10.0, 2.0, 0.0)
    asym = met_interval_asymptotic(10.0, 2.0, 0.0, "supercritical")
    assert abs(asym - math.log(2.0) / 20.0) < 1e-15
    assert 0.02 < rel(asym, met) < 0.03   # 2.55% measured


def test_supercritical_escape_formula_converges():
    devs = [rel(met_interval_asymptotic(k, 2.0, 0.0, "supercritical"),
                met_interval(k, 2.0, 0.0)) for k in (10.0, 20.0, 40.0)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.01


def test_subcritical_escape_formula_converges():
    devs = [rel(met_interval_asymptotic(k, 0.5, 0.0, "subcritical"),
                met_interval(k, 0.5, 0.0)) for k in (18.0, 30.0, 60.0)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.04


def test_marginal_constant_value():
    c = _marginal_constant()
    assert rel(c, MARGINAL_CONSTANT) < 1e-8
    assert abs(c - 0.375) < 1e-3


def test_marginal_escape_formula_at_large_kappa():
    met = met_interval(50.0, 1.0, 0.0)
    asym = met_interval_asymptotic(50.0, 1.0, 0.0, "marginal")
    assert rel(asym, met) < 0.01   # 0.17% measured


def test_auto_regime_picks_the_matching_branch():
    assert (met_interval_asymptotic(12.0, 0.0, 0.0)
            == met_interval_asymptotic(12.0, 0.0, 0.0, "symmetric"))
    assert (met_interval_asymptotic(12.0, 0.5, 0.0)
            == met_interval_asymptotic(12.0, 0.5, 0.0, "subcritical"))
    assert (met_interval_asymptotic(12.0, 1.0, 0.2)
            == met_interval_asymptotic(12.0, 1.0, 0.2, "marginal"))
    assert (met_interval_asymptotic(12.0, 2.0, 0.0)
            == met_interval_asymptotic(12.0, 2.0, 0.0, "supercritical"))


@pytest.mark.xfail(
    strict=True,
    reason="Gamma(d/2) e^kappa / (4 kappa^(1+d/2)) is 14% off the oracle at "
           "d=3, kappa=12 (it needs kappa ~ 40 for 5%); a 5% match is not "
           "attainable there")
def test_radial_interior_escape_formula_at_kappa_12_within_5pct():
    met = met_radial_interior(3, 12.0, 0.0)
    lead = math.gamma(1.5) * math.exp(12.0) / (4.0 * 12.0**2.5)
    assert rel(lead, met) < 0.05


def test_radial_interior_escape_formula_measured_deviation():
    met = met_radial_interior(3, 12.0, 0.0)
    lead = math.gamma(1.5) * math.exp(12.0) / (4.0 * 12.0**2.5)
    assert 0.13 < rel(lead, met) < 0.15   # 14.1% measured


def test_radial_interior_escape_formula_converges():
    devs = []
    for kappa in (12.0, 16.0, 20.0):
        met = met_radial_interior(3, kappa, 0.0)
        lead = math.gamma(1.5) * math.exp(kappa) / (4.0 * kappa**2.5)
        devs.append(rel(lead, met))
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.10


def test_radial_exterior_small_trap_law():
    got = met_radial_exterior(3, 0.01, 2.0)
    law = 0.5 * math.gamma(1.5) * (1.0 - 1.0 / 2.0) * 0.01**-1.5
    assert rel(law, got) < 0.05   # 1.8% measured


@pytest.mark.xfail(
    strict=True,
    reason="the logarithmic capture-time formula ln((z0-varphi)/(1-varphi))"
           "/(2 kappa) is 4.7% off at kappa=15, varphi=0.5, z0=2 "
           "(oracle-verified); a 3% match is not attainable there")
def test_forced_capture_log_formula_at_kappa_15_within_3pct():
    met = met_exterior_1d_forced(15.0, 0.5, 2.0)
    law = math.log(1.5 / 0.5) / 30.0
    assert rel(law, met) < 0.03


def test_forced_capture_log_formula_measured_deviation():
    met = met_exterior_1d_forced(15.0, 0.5, 2.0)
    law = math.log(1.5 / 0.5) / 30.0
    assert 0.04 < rel(law, met) < 0.055   # 4.7% measured


@pytest.mark.xfail(
    strict=True,
    reason="the uphill-capture formula sqrt(pi) e^(kappa (varphi-1)^2)"
           "/(2 kappa^1.5 (varphi-1)) is 18% off at kappa=15, varphi=1.5 "
           "(oracle-verified); a 10% match is not attainable there")
def test_forced_capture_exponential_formula_at_kappa_15_within_10pct():
    met = met_exterior_1d_forced(15.0, 1.5, 2.0)
    law = (math.sqrt(math.pi) * math.exp(15.0 * 0.25)
           / (2.0 * 15.0**1.5 * 0.5))
    assert rel(law, met) < 0.10


def test_forced_capture_exponential_formula_measured_deviation():
    met = met_exterior_1d_forced(15.0, 1.5, 2.0)
    law = (math.sqrt(math.pi) * math.exp(15.0 * 0.25)
           / (2.0 * 15.0**1.5 * 0.5))
    assert 0.15 < rel(law, met) < 0.25    # 18% measured
    met30 = met_exterior_1d_forced(30.0, 1.5, 2.0)
    law30 = (math.sqrt(math.pi) * math.exp(30.0 * 0.25)
             / (2.0 * 30.0**1.5 * 0.5))
    assert rel(law30, met30) < 0.10       # 8.3% measured: converging


# ---------------------------------------------------------------------------
# Structural properties.

def test_interval_positive_inside_and_even_without_pull():
    for z0 in (-0.9, -0.4, 0.0, 0.4, 0.9):
        t = met_interval(2.0, 0.0, z0)
        assert t > 0.0
        assert rel(t, met_interval(2.0, 0.0, -z0)) < 1e-12


def test_interval_mirror_symmetry_in_pull():
    for kappa, varphi, z0 in ((2.0, 0.7, 0.3), (9.0, 1.4, -0.5)):
        assert (met_interval(kappa, -varphi, -z0)
                == met_interval(kappa, varphi, z0))


def test_interval_increases_with_trap_strength():
    times = [met_interval(k, 0.0, 0.0)
             for k in (0.0, 0.5, 1.0, 2.0, 4.0, 7.0, 10.0)]
    assert all(a < b for a, b in zip(times, times[1:]))


def test_interval_decreases_with_pull():
    times = [met_interval(2.0, phi, 0.0)
             for phi in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)]
    assert all(a > b for a, b in zip(times, times[1:]))


def test_both_interval_forms_agree_near_the_switch():
    # The exp(z^2)erf form and the erfcx/Dawson rewrite are evaluated on
    # either side of kappa (1+varphi)^2 = 25; they must agree everywhere
    # both are finite-friendly, including the delicate varphi = 1 case.
    for kappa, varphi, z0 in ((24.9, 0.0, 0.3), (6.0, 1.0, 0.2),
                              (11.0, 0.5, -0.4), (25.0, 0.0, 0.0)):
        a = _met_interval_erf_form(kappa, varphi, z0)
        b = _met_interval_erfc_form(kappa, varphi, z0)
        assert rel(a, b) < 1e-11


def test_interval_backward_equation_residual():
    kappa, varphi, h = 2.0, 0.5, 1e-3
    for z in (-0.5, 0.1, 0.6):
        tm = met_interval(kappa, varphi, z - h)
        t0 = met_interval(kappa, varphi, z)
        tp = met_interval(kappa, varphi, z + h)
        d1 = (tp - tm) / (2.0 * h)
        d2 = (tp - 2.0 * t0 + tm) / (h * h)
        residual = d2 - 2.0 * kappa * (z - varphi) * d1
        assert abs(residual + 1.0) < 1e-4


def test_radial_backward_equation_residual():
    d, kappa, h = 3, 2.0, 1e-3
    for r in (0.3, 0.7):
        tm = met_radial_interior(d, kappa, r - h)
        t0 = met_radial_interior(d, kappa, r)
        tp = met_radial_interior(d, kappa, r + h)
        d1 = (tp - tm) / (2.0 * h)
        d2 = (tp - 2.0 * t0 + tm) / (h * h)
        residual = d2 + ((d - 1) / r - 2.0 * kappa * r) * d1
        assert abs(residual + 1.0) < 1e-4


def test_exterior_backward_equation_residual():
    kappa, varphi, h = 2.0, 0.5, 1e-3
    for z in (1.5, 2.5):
        tm = met_exterior_1d_forced(kappa, varphi, z - h)
        t0 = met_exterior_1d_forced(kappa, varphi, z)
        tp = met_exterior_1d_forced(kappa, varphi, z + h)
        d1 = (tp - tm) / (2.0 * h)
        d2 = (tp - 2.0 * t0 + tm) / (h * h)
        residual = d2 - 2.0 * kappa * (z - varphi) * d1
        assert abs(residual + 1.0) < 1e-4


def test_one_dimensional_radial_equals_interval():
    for kappa in (0.5, 2.0):
        for z0 in (0.0, 0.4):
            a = met_radial_interior(1, kappa, z0)
            b = met_interval(kappa, 0.0, z0)
            assert rel(a, b) < 1e-8


def test_one_dimensional_exterior_routes_agree():
    # d=1 exterior capture equals the unforced half-line formula.
    a = met_radial_exterior(1, 1.0, 3.0)
    b = met_exterior_1d_forced(1.0, 0.0, 3.0)
    assert rel(a, b) < 1e-10


def _exterior_double_quadrature(d, kappa, z0):
    """Integrating-factor form, evaluated blind: tau(z0) =
    int_1^z0 dy y^(1-d) e^(kappa y^2) int_y^inf dx x^(d-1) e^(-kappa x^2)."""
    cut = z0 + 30.0 / math.sqrt(kappa)

    def outer(y):
        inner, _ = tanh_sinh(
            lambda x: x ** (d - 1) * math.exp(-kappa * (x * x - y * y)),
            y, cut, 1e-13)
        return y ** (1 - d) * inner

    value, err = tanh_sinh(outer, 1.0, z0, 1e-11)
    assert err < 1e-9 * value
    return value


def test_even_d_closed_form_equals_double_quadrature():
    for d, kappa, z0 in ((2, 1.3, 2.1), (4, 0.8, 1.9)):
        a = met_radial_exterior(d, kappa, z0)
        b = _exterior_double_quadrature(d, kappa, z0)
        assert rel(a, b) < 1e-8


# ---------------------------------------------------------------------------
# Splitting probability.

def test_splitting_boundary_and_symmetry():
    assert splitting_probability(2.0, 0.7, 1.0) == 1.0
    assert splitting_probability(2.0, 0.7, -1.0) == 0.0
    assert splitting_probability(5.0, 0.0, 0.0) == 0.5
    for z0 in (0.2, 0.6, -0.4):
        total = (splitting_probability(3.0, 0.0, z0)
                 + splitting_probability(3.0, 0.0, -z0))
        assert abs(total - 1.0) < 1e-12


def test_splitting_monotone_in_start_and_bounded():
    grid = [i / 10.0 for i in range(-10, 11)]
    values = [splitting_probability(3.0, 0.7, z0) for z0 in grid]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))


def test_splitting_vanishing_trap_is_linear():
    for z0 in (-0.5, 0.0, 0.8):
        got = splitting_probability(0.0, 0.3, z0)
        # eta = 2 kappa varphi = 0 here, so the classical linear law.
        assert abs(got - 0.5 * (1.0 + z0)) < 1e-14


def test_splitting_mirror_for_negative_pull():
    got = splitting_probability(2.0, -1.3, 0.5)
    want = 1.0 - splitting_probability(2.0, 1.3, -0.5)
    assert abs(got - want) < 1e-15


# ---------------------------------------------------------------------------
# Request plumbing and validation.

def test_request_dispatch_and_timescale():
    req = MeanExitRequest(geometry="interval", kappa=1.0, z0=0.0,
                          timescale=2.0)
    assert req.geometry is Geometry.INTERVAL
    want = 2.0 * INTERVAL_ORACLE[(1.0, 0.0, 0.0)]
    assert rel(mean_exit_time(req), want) < 1e-12

    req = MeanExitRequest(geometry=Geometry.RADIAL_INTERIOR, kappa=2.0,
                          z0=0.4, d=3)
    assert rel(mean_exit_time(req), RADIAL_INTERIOR_ORACLE[(3, 2.0, 0.4)]) \
        < 1e-12

    req = MeanExitRequest(geometry=Geometry.RADIAL_EXTERIOR, kappa=0.0,
                          z0=2.0, d=3)
    assert mean_exit_time(req) == math.inf

    req = MeanExitRequest(geometry=Geometry.EXTERIOR_LINE, kappa=2.0,
                          z0=1.8, varphi=0.5)
    assert rel(mean_exit_time(req), EXTERIOR_1D_ORACLE[(2.0, 0.5, 1.8)]) \
        < 1e-12


def test_request_rejects_broken_inputs():
    with pytest.raises(ValueError):
        MeanExitRequest(geometry="interval", kappa=1.0, z0=0.0, timescale=0.0)
    with pytest.raises(ValueError):
        MeanExitRequest(geometry=Geometry.RADIAL_INTERIOR, kappa=1.0,
                        z0=0.5, varphi=0.3)
    with pytest.raises(ValueError):
        MeanExitRequest(geometry="no-such-layout", kappa=1.0, z0=0.0)


def test_operations_reject_out_of_domain_points():
    with pytest.raises(ValueError):
        met_interval(2.0, 0.0, 1.5)
    with pytest.raises(ValueError):
        met_interval(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        met_radial_interior(0, 1.0, 0.5)
    with pytest.raises(ValueError):
        met_radial_interior(3, 1.0, -0.1)
    with pytest.raises(ValueError):
        met_radial_exterior(3, 1.0, 0.9)
    with pytest.raises(ValueError):
        met_exterior_1d_forced(1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        met_interval_asymptotic(10.0, 0.0, 0.0, "no-such-regime")
    with pytest.raises(ValueError):
        met_interval_asymptotic(10.0, 0.0, 0.0, "subcritical")
    with pytest.raises(ValueError):
        met_interval_asymptotic(10.0, 2.0, 0.0, "marginal")
