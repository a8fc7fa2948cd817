"""Mean first-exit times for the trapped, pulled particle.

Every operation here returns a dimensionless time in units of L**2/D;
`mean_exit_time` applies a caller-supplied timescale for physical
answers.  The closed forms reduce to one-dimensional integrals of
exp(z^2) erf(z) or exp(z^2) erfc(z), which are two rewritings of the
same expression with opposite numerical failure modes: the erf form is
exact but its integrand reaches exp(kappa (1+varphi)^2), while the
erfc/Dawson form keeps every factor bounded at the price of more
bookkeeping.  We evaluate the erf form while
kappa (1+varphi)^2 <= 25 (the integrand then stays below ~1e11, leaving
relative accuracy intact) and switch to the erfc form beyond; both are
kept callable so the crossover can be cross-checked rather than trusted.

Weak traps (kappa below `BROWNIAN_KAPPA`) route to the drift-diffusion
closed form in eta = 2 kappa varphi, the radial interior problem
integrates an exact inner Gaussian moment under one outer quadrature,
and the radial exterior problem uses the finite-sum forms (logarithmic
in even dimension, erfc-weighted in odd).  A vanishing trap makes the
exterior mean infinite; that is reported as math.inf, not an exception,
so callers can print it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._quad import tanh_sinh
from .ou_model import BROWNIAN_KAPPA, Geometry, canonical_orientation
from .specfun import dawson, erfcx, gamma_fn

__all__ = [
    "MeanExitRequest",
    "mean_exit_time",
    "met_interval",
    "met_interval_asymptotic",
    "met_radial_interior",
    "met_radial_exterior",
    "met_exterior_1d_forced",
    "splitting_probability",
    "ASYMPTOTIC_REGIMES",
]

_SQRTPI = math.sqrt(math.pi)

# The erf-form integrand exp(z^2) erf(z) is taken only while its peak
# exp(kappa (1+varphi)^2) stays below ~1e11.
_ERF_FORM_LIMIT = 25.0

# Quadratures run at this tolerance (absolute for O(1) values, relative
# beyond); a result whose error estimate lands above _QUAD_ACCEPT of the
# value is reported as a failure rather than returned silently.
_QUAD_TOL = 1e-12
_QUAD_ACCEPT = 1e-8


class QuadratureError(RuntimeError):
    """A quadrature did not reach the accepted tolerance."""


def _check_quad(value: float, err: float, what: str) -> float:
    if err > _QUAD_ACCEPT * max(1.0, abs(value)):
        raise QuadratureError(
            f"{what}: quadrature achieved {err:.3e} "
            f"(relative {err / max(abs(value), 1e-300):.3e}), "
            f"wanted {_QUAD_ACCEPT:.1e}")
    return value


def _f_exp_erf(x: float) -> float:
    """F(x) = integral of exp(z^2) erf(z) from 0 to |x| (F is even)."""
    x = abs(x)
    if x == 0.0:
        return 0.0
    value, err = tanh_sinh(lambda z: math.exp(z * z) * math.erf(z), 0.0, x,
                           _QUAD_TOL)
    return _check_quad(value, err, "exp(z^2) erf(z) integral")


def _int_erfcx0(x: float) -> float:
    """Integral of erfcx over [0, x] for x >= 0.

    erfcx decays like 1/(sqrt(pi) z), so beyond z = 10 the integral is
    done in log coordinates where the integrand is nearly constant.
    """
    if x <= 0.0:
        return 0.0
    if x <= 10.0:
        value, err = tanh_sinh(erfcx, 0.0, x, _QUAD_TOL)
        return _check_quad(value, err, "erfcx integral")
    head, err_h = tanh_sinh(erfcx, 0.0, 10.0, _QUAD_TOL)
    tail, err_t = tanh_sinh(lambda u: erfcx(math.exp(u)) * math.exp(u),
                            math.log(10.0), math.log(x), _QUAD_TOL)
    return _check_quad(head + tail, err_h + err_t, "erfcx integral")


def _ic0(x: float) -> float:
    """Integral of exp(z^2) erfc(z) from 0 to x, any sign of x.

    For x < 0 the identity erfc(z) = 2 - erfc(-z) splits the integral
    into 2 exp(x^2) Daw(|x|) minus the bounded erfcx piece; the
    exponential factor is the genuinely large part of the answer and may
    overflow to inf for x^2 > ~709.
    """
    if x >= 0.0:
        return _int_erfcx0(x)
    ax = -x
    return -2.0 * math.exp(x * x) * dawson(ax) + _int_erfcx0(ax)


def _splitting_pair(kappa: float, varphi: float,
                    z0: float) -> tuple[float, float]:
    """(P(exit at +1), P(exit at -1)) for canonical varphi >= 0.

    The complement is computed from its own Dawson arrangement rather
    than as 1 - h: near varphi = 1 the left-exit probability is
    exponentially small, and the erf-form mean time multiplies it by an
    exponentially large integral, so it needs full relative accuracy.
    All exponents below are <= 0 because |z0 - varphi| and |1 - varphi|
    are bounded by 1 + varphi.
    """
    if z0 >= 1.0:
        return 1.0, 0.0
    if z0 <= -1.0:
        return 0.0, 1.0
    if kappa == 0.0:
        return 0.5 * (1.0 + z0), 0.5 * (1.0 - z0)
    sk = math.sqrt(kappa)
    d_start = dawson(sk * (z0 - varphi))
    d_plus = dawson(sk * (1.0 + varphi))
    d_minus = dawson(sk * (1.0 - varphi))
    e_start = math.exp(kappa * ((z0 - varphi) ** 2 - (1.0 + varphi) ** 2))
    e_far = math.exp(-4.0 * kappa * varphi)
    den = e_far * d_minus + d_plus
    return ((e_start * d_start + d_plus) / den,
            (e_far * d_minus - e_start * d_start) / den)


def _splitting(kappa: float, varphi: float, z0: float) -> float:
    """Probability of leaving through +1 rather than -1; assumes the
    canonical orientation varphi >= 0 and |z0| <= 1."""
    return _splitting_pair(kappa, varphi, z0)[0]


def splitting_probability(kappa: float, varphi: float, z0: float) -> float:
    """Probability that the first exit from [-1, 1] happens at +1.

    Exact at the boundaries (1.0 at z0 = 1, 0.0 at z0 = -1) and equal to
    (1 + z0)/2 for a vanishing trap.  A negative pull is handled through
    the mirror relation H(varphi, z0) = 1 - H(-varphi, -z0).
    """
    kappa, varphi, z0 = float(kappa), float(varphi), float(z0)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    if not -1.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [-1, 1], got {z0!r}")
    if z0 == 1.0:
        return 1.0
    if z0 == -1.0:
        return 0.0
    if varphi < 0.0:
        return 1.0 - _splitting(kappa, -varphi, -z0)
    return _splitting(kappa, varphi, z0)


def _met_brownian(eta: float, z0: float) -> float:
    """Vanishing-trap limit: drift-diffusion exit from [-1, 1] with
    Peclet number eta = 2 kappa varphi >= 0."""
    if eta < 1e-5:
        # second order in eta; the eta^2 coefficient is below 1/12
        return 0.5 * (1.0 - z0 * z0) * (1.0 - eta * z0 / 3.0)
    # exponent-negative rewrite: every exp argument is <= 0
    a = math.exp(-eta * (1.0 + z0))
    b = math.exp(-2.0 * eta)
    return ((1.0 - z0) - 2.0 * (a - b) / (-math.expm1(-2.0 * eta))) / eta


def _met_interval_erf_form(kappa: float, varphi: float, z0: float) -> float:
    h, h_left = _splitting_pair(kappa, varphi, z0)
    sk = math.sqrt(kappa)
    f_in = _f_exp_erf(sk * (1.0 - varphi))
    f_out = _f_exp_erf(sk * (1.0 + varphi))
    f_start = _f_exp_erf(sk * (z0 - varphi))
    return 0.5 * _SQRTPI / kappa * (h * f_in - f_start + f_out * h_left)


def _met_interval_erfc_form(kappa: float, varphi: float, z0: float) -> float:
    h = _splitting(kappa, varphi, z0)
    sk = math.sqrt(kappa)
    top = _ic0(sk * (1.0 + varphi))
    j_full = top - _ic0(sk * (varphi - 1.0))
    j_start = top - _ic0(sk * (varphi - z0))
    return 0.5 * _SQRTPI / kappa * (h * j_full - j_start)


def met_interval(kappa: float, varphi: float, z0: float) -> float:
    """Mean first-exit time from the interval [-1, 1], units L**2/D.

    Starting point z0 in [-1, 1]; exact zero on the boundary.  The pull
    may have either sign (mirror symmetry folds it to varphi >= 0).
    """
    kappa = float(kappa)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    varphi, z0 = canonical_orientation(float(varphi), float(z0))
    if not -1.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [-1, 1], got {z0!r}")
    if abs(z0) == 1.0:
        return 0.0
    if kappa < BROWNIAN_KAPPA:
        return _met_brownian(2.0 * kappa * varphi, z0)
    if kappa * (1.0 + varphi) ** 2 <= _ERF_FORM_LIMIT:
        return _met_interval_erf_form(kappa, varphi, z0)
    return _met_interval_erfc_form(kappa, varphi, z0)


ASYMPTOTIC_REGIMES = ("auto", "symmetric", "subcritical", "marginal",
                      "supercritical")

_marginal_constant_cache: float | None = None


def _marginal_constant() -> float:
    """The constant c = lim z exp(-sqrt(pi) * integral_0^z erfcx), which
    fixes the additive offset of the marginal-pull escape time.

    The erfcx integral beyond z = 50 is summed from its 1/z asymptotic
    series (next omitted term is O(z^-6)), so the limit is evaluated at
    z = 1e6 with error ~1e-13.
    """
    global _marginal_constant_cache
    if _marginal_constant_cache is None:
        a, z = 50.0, 1e6
        head = _int_erfcx0(a)
        tail = (math.log(z / a) + 0.25 * (z**-2 - a**-2)
                - 0.1875 * (z**-4 - a**-4)) / _SQRTPI
        _marginal_constant_cache = math.exp(
            math.log(z) - _SQRTPI * (head + tail))
    return _marginal_constant_cache


def met_interval_asymptotic(kappa: float, varphi: float, z0: float = 0.0,
                            regime: str = "auto") -> float:
    """Deep-trap (large kappa) leading behaviour of `met_interval`.

    Four branches: "symmetric" (varphi = 0), "subcritical"
    (0 < varphi < 1, Arrhenius escape over the residual barrier),
    "marginal" (varphi = 1, logarithmic) and "supercritical"
    (varphi > 1, deterministic drift time).  With regime="auto" the
    branch is picked from varphi.
    """
    kappa = float(kappa)
    varphi, z0 = canonical_orientation(float(varphi), float(z0))
    if kappa <= 0.0 or not math.isfinite(kappa):
        raise ValueError(f"kappa must be positive and finite, got {kappa!r}")
    if regime not in ASYMPTOTIC_REGIMES:
        raise ValueError(f"regime must be one of {ASYMPTOTIC_REGIMES}")
    if regime == "auto":
        if varphi == 0.0:
            regime = "symmetric"
        elif varphi < 1.0:
            regime = "subcritical"
        elif varphi == 1.0:
            regime = "marginal"
        else:
            regime = "supercritical"
    if regime == "symmetric":
        if varphi != 0.0:
            raise ValueError("symmetric regime needs varphi = 0")
        return 0.25 * _SQRTPI * math.exp(kappa) / kappa**1.5
    if regime == "subcritical":
        if not 0.0 < varphi < 1.0:
            raise ValueError("subcritical regime needs 0 < varphi < 1")
        return (0.5 * _SQRTPI * math.exp(kappa * (1.0 - varphi) ** 2)
                / (kappa**1.5 * (1.0 - varphi)))
    if regime == "marginal":
        if varphi != 1.0:
            raise ValueError("marginal regime needs varphi = 1")
        if z0 >= 1.0:
            raise ValueError("marginal regime needs z0 < 1")
        return math.log(math.sqrt(kappa) * (1.0 - z0)
                        / _marginal_constant()) / (2.0 * kappa)
    if varphi <= 1.0:
        raise ValueError("supercritical regime needs varphi > 1")
    return math.log((varphi - z0) / (varphi - 1.0)) / (2.0 * kappa)


def _lower_gauss_moment(d: int, r: float) -> float:
    """Integral of s^(d-1) exp(-s^2) over [0, r]."""
    if d == 1:
        return 0.5 * _SQRTPI * math.erf(r)
    if d == 2:
        return -0.5 * math.expm1(-r * r)
    return (0.5 * (d - 2) * _lower_gauss_moment(d - 2, r)
            - 0.5 * r ** (d - 2) * math.exp(-r * r))


def _interior_ratio(d: int, r: float) -> float:
    """`_lower_gauss_moment(d, r) / r**(d-1)`, stable down to r = 0."""
    if r < 0.5:
        # term_j = (-1)^j r^(2j+1) / (j! (d + 2j)); 14 terms reach 1e-17
        total = 0.0
        term = r / d
        j = 0
        while abs(term) > 1e-18 * max(abs(total), 1e-30) and j < 30:
            total += term
            j += 1
            term *= -r * r / j
            term *= (d + 2 * j - 2) / (d + 2 * j)
        return total
    return _lower_gauss_moment(d, r) / r ** (d - 1)


def _validate_dimension(d: int) -> int:
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    return d


def met_radial_interior(d: int, kappa: float, z0: float) -> float:
    """Mean first-exit time from the d-ball of radius 1 with the trap at
    its centre, starting from radius z0 in [0, 1].  Units L**2/D."""
    d = _validate_dimension(d)
    kappa, z0 = float(kappa), float(z0)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [0, 1], got {z0!r}")
    if z0 == 1.0:
        return 0.0
    if kappa < BROWNIAN_KAPPA:
        return (1.0 - z0 * z0) / (2.0 * d)
    sk = math.sqrt(kappa)
    value, err = tanh_sinh(
        lambda r: math.exp(r * r) * _interior_ratio(d, r),
        sk * z0, sk, _QUAD_TOL)
    return _check_quad(value, err, "interior radial integral") / kappa


def met_radial_exterior(d: int, kappa: float, z0: float) -> float:
    """Mean time to reach the d-ball of radius 1 from outside (z0 >= 1)
    with the trap at the centre.  Units L**2/D.

    For kappa = 0 the mean is infinite (free diffusion never guarantees
    capture in finite mean time); that is returned as math.inf.
    """
    d = _validate_dimension(d)
    kappa, z0 = float(kappa), float(z0)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    if z0 < 1.0:
        raise ValueError(f"z0 must be >= 1, got {z0!r}")
    if z0 == 1.0:
        return 0.0
    if kappa == 0.0:
        return math.inf
    half_d = 0.5 * d
    if d % 2 == 0:
        total = 2.0 * math.log(z0)
        for j in range(1, d // 2):
            total += (gamma_fn(half_d) / (j * gamma_fn(half_d - j))
                      * kappa**-j * (1.0 - z0 ** (-2 * j)))
        return total / (4.0 * kappa)
    sk = math.sqrt(kappa)
    total = 2.0 * _SQRTPI * (_int_erfcx0(sk * z0) - _int_erfcx0(sk))
    for j in range(1, (d - 1) // 2):
        total += ((gamma_fn(half_d) / gamma_fn(half_d - j)
                   - gamma_fn(j + 0.5) / _SQRTPI)
                  * (1.0 - z0 ** (-2 * j)) / (j * kappa**j))
    s_near = sum(gamma_fn(half_d - j) * kappa ** (j - half_d)
                 for j in range(1, (d + 1) // 2))
    s_far = sum(gamma_fn(half_d - j) * (kappa * z0 * z0) ** (j - half_d)
                for j in range(1, (d + 1) // 2))
    total += erfcx(sk) * s_near - erfcx(sk * z0) * s_far
    return total / (4.0 * kappa)


def met_exterior_1d_forced(kappa: float, varphi: float, z0: float) -> float:
    """Mean time to reach x = 1 from z0 >= 1 on the line, with the trap
    at the origin and a pull of either sign.  Units L**2/D; kappa = 0
    gives an infinite mean, returned as math.inf."""
    kappa, varphi, z0 = float(kappa), float(varphi), float(z0)
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    if not math.isfinite(varphi):
        raise ValueError("varphi must be finite")
    if z0 < 1.0:
        raise ValueError(f"z0 must be >= 1, got {z0!r}")
    if z0 == 1.0:
        return 0.0
    if kappa == 0.0:
        return math.inf
    sk = math.sqrt(kappa)
    return (0.5 * _SQRTPI / kappa
            * (_ic0(sk * (z0 - varphi)) - _ic0(sk * (1.0 - varphi))))


@dataclass(frozen=True)
class MeanExitRequest:
    """One mean-exit evaluation: layout, trap strength, pull, start.

    ``timescale`` (seconds per L**2/D, default 1) converts the
    dimensionless answer; pass `OUProblem.timescale` for SI output.
    """

    geometry: Geometry
    kappa: float
    z0: float
    varphi: float = 0.0
    d: int = 1
    timescale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        if self.timescale <= 0.0 or not math.isfinite(self.timescale):
            raise ValueError("timescale must be positive and finite")
        if self.geometry in (Geometry.RADIAL_INTERIOR,
                             Geometry.RADIAL_EXTERIOR) and self.varphi != 0.0:
            raise ValueError(
                "a constant pull breaks radial symmetry; varphi must be 0 "
                f"for {self.geometry.value}")


def mean_exit_time(request: MeanExitRequest) -> float:
    """Dispatch a `MeanExitRequest`; returns timescale * dimensionless
    mean (math.inf propagates untouched)."""
    g = request.geometry
    if g is Geometry.INTERVAL:
        t = met_interval(request.kappa, request.varphi, request.z0)
    elif g is Geometry.RADIAL_INTERIOR:
        t = met_radial_interior(request.d, request.kappa, request.z0)
    elif g is Geometry.RADIAL_EXTERIOR:
        t = met_radial_exterior(request.d, request.kappa, request.z0)
    else:
        t = met_exterior_1d_forced(request.kappa, request.varphi, request.z0)
    return t * request.timescale
