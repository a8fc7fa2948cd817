"""Absorbing-boundary eigenbases and spectral exit-time observables.

`build_basis` finds the Dirichlet spectrum of the trapped-diffusion
generator for three layouts -- the pulled interval, the interior of a
ball, and the exterior of a ball -- and packages eigenvalues, boundary
coefficients, normalizations, and survival weights into an immutable
`SpectralBasis`.  `survival`, `fet_density`, and `mgf` evaluate the
observable sums.  Everything is dimensionless: lengths in units of the
escape radius L, times in units of L**2/D, so mode n decays like
exp(-alphas[n]**2 * t).

The interval eigenfunctions combine the even and odd confluent
solutions m1(z) = M(-nu, 1/2, kappa z^2) and m2(z) = z M(1/2 - nu,
3/2, kappa z^2) about the trap centre z = varphi, with nu =
alpha^2/(4 kappa); the radial problems use the single solution regular
at the origin (Kummer M) or decaying at infinity (Tricomi U).
Eigenvalues are bracketed by an adaptive scan whose step follows the
local level spacing -- pi/2-scaled where the spectrum is
diffusion-like, nu-spacing-scaled where the trap dominates -- with a
logarithmic sweep below that grid because the slowest rate collapses
exponentially in kappa.  Brackets are refined in parallel by bisection
plus a secant polish to |d alpha| < 1e-12, each root is re-verified
against its bracket-scale residual, and suspiciously wide gaps trigger
a fine rescan before being accepted.

Every mode weight is computed twice, by independent routes: as a
residue of the closed-form generating function (no quadrature), and
through the boundary-flux/normalization route (one quadrature per
mode).  `weights_crosscheck` reports their per-mode agreement, which is
the designed alarm for a wrong root, coefficient, or derivative
anywhere in the build.  Below `BROWNIAN_KAPPA` the basis switches to
its closed-form free-diffusion limit (cosines on the interval, Bessel
modes in the ball); the exterior problem keeps no discrete spectrum in
that limit and raises instead.  Magnitudes inside the determinant grow
like exp(kappa (1 + |varphi|)^2), which keeps the build inside float
range for trap strengths up to a few hundred in those units.
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from ._quad import integrate_to_cutoff, tanh_sinh
from .mean_exit import QuadratureError
from .ou_model import BROWNIAN_KAPPA, Geometry
from .specfun import (bessel_j, gamma_fn, kummer_m, kummer_m_da, tricomi_u,
                      tricomi_u_da)

__all__ = [
    "SpectralBasis",
    "SpectralValue",
    "CurveTable",
    "WeightsReport",
    "WeightRoute",
    "RootSearchError",
    "build_basis",
    "survival",
    "fet_density",
    "mode_term",
    "mgf",
    "weights_crosscheck",
    "basis_to_json",
    "basis_from_json",
]

# Root refinement stops when the bracket width falls below this.
_ALPHA_TOL = 1e-12

# A refined root must sink the condition function below this fraction
# of its magnitude at the detection-bracket endpoints.
_RESIDUAL_TOL = 1e-10

# Normalization quadratures run at this relative tolerance.
_BETA_TOL = 1e-10

# Spectral sums stop once a term drops below this fraction of the
# accumulated sum, but never before this many nonzero terms.
_TERM_STOP = 1e-12
_MIN_TERMS = 5

# The reliability horizon t_min is where the last kept mode has decayed
# to this size; raw survival values may overshoot [0, 1] by _CLAMP_SLACK
# before the truncation warning fires.
_TMIN_TERM = 1e-8
_CLAMP_SLACK = 0.01

# The generating-function denominator is treated as sitting on a pole
# when it falls below this fraction of its term scale.
_POLE_TOL = 1e-8

# Consecutive eigenvalues never sit further apart than one nu-period
# (trap-dominated end) or one free-diffusion gap (weak-trap end); a gap
# beyond 1.3x both bounds is audited with a fine rescan.
_GAP_SLACK = 1.3


class RootSearchError(RuntimeError):
    """Eigenvalue bracketing failed or left an unexplained gap."""


class WeightRoute(str, enum.Enum):
    """Which of the two weight computations a basis carries."""

    INTEGRAL = "integral"
    RESIDUE = "residue"
    BOTH = "both"


class SpectralValue(float):
    """Float result of a truncated spectral sum, plus diagnostics.

    Instances behave as ordinary floats holding the clamped value.
    `raw` is the sum before clamping; `warning` is True when the raw
    value left its admissible window or when t sits below the basis
    reliability horizon `t_min`, where the truncated tail is no longer
    negligible.
    """

    __slots__ = ("raw", "warning")

    raw: float
    warning: bool

    def __new__(cls, value: float, raw: float, warning: bool):
        obj = super().__new__(cls, value)
        obj.raw = raw
        obj.warning = bool(warning)
        return obj


@dataclass(frozen=True)
class CurveTable:
    """Sampled curve plus the labels and provenance a writer needs.

    `samples` holds (x, y) pairs with a strictly increasing, finite
    abscissa and finite ordinates; `metadata` carries the problem
    parameters and truncation diagnostics the curve was produced under.
    """

    x_label: str
    x_unit: str
    samples: tuple[tuple[float, float], ...]
    metadata: dict

    def __post_init__(self):
        samples = tuple((float(x), float(y)) for x, y in self.samples)
        object.__setattr__(self, "samples", samples)
        for (x0, _), (x1, _) in zip(samples, samples[1:]):
            if not x1 > x0:
                raise ValueError(
                    f"abscissa must increase strictly, got {x0!r} then {x1!r}")
        for x, y in samples:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"non-finite sample ({x!r}, {y!r})")


@dataclass(frozen=True)
class SpectralBasis:
    """Dirichlet eigenbasis of the trapped-diffusion generator.

    All entries are dimensionless (lengths in L, rates in D/L**2): mode
    n has decay rate alphas[n]**2.  `coeff_pairs` holds the per-mode
    boundary coefficients (c1, c2) multiplying the even and odd
    interval solutions; the single-solution radial layouts store
    (1.0, 0.0).  `weights` come from the residue route, and
    `weights_integral` are the same numbers from the flux/normalization
    route; `weight_route` records which are populated (`build_basis`
    always fills both).  `betas` are the eigenfunction normalization
    constants.  `brownian` marks a closed-form free-diffusion basis
    whose mode functions are trigonometric or Bessel rather than
    confluent.
    """

    geometry: Geometry
    kappa: float
    varphi: float
    d: int
    alphas: tuple[float, ...]
    coeff_pairs: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]
    weights_integral: tuple[float, ...]
    betas: tuple[float, ...]
    weight_route: WeightRoute
    brownian: bool = False

    @property
    def n_modes(self) -> int:
        return len(self.alphas)

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        """Decay rates alphas[n]**2, in units of D/L**2."""
        return tuple(a * a for a in self.alphas)

    @property
    def t_min(self) -> float:
        """Reliability horizon of the truncated sums.

        The time where the last kept contributing mode has decayed to
        1e-8; below it the omitted tail is of the same order as that
        term and the evaluators flag their output.
        """
        for n in reversed(range(self.n_modes)):
            w = self.weights[n]
            if w != 0.0:
                return max(0.0, math.log(abs(w) / _TMIN_TERM)
                           / (self.alphas[n] ** 2))
        return 0.0


@dataclass(frozen=True)
class WeightsReport:
    """Per-mode agreement of the two weight routes.

    Each row is (n, alpha_n, weight_residue, weight_integral,
    relative discrepancy); `max_discrepancy` is the worst row.
    """

    rows: tuple[tuple[int, float, float, float, float], ...]
    max_discrepancy: float


# ----------------------------------------------------------------------
# confluent building blocks
# ----------------------------------------------------------------------

def _m1(a: float, kappa: float, z: float) -> float:
    """Even interval solution M(a, 1/2, kappa z^2) with a = -nu."""
    return kummer_m(a, 0.5, kappa * z * z).value


def _m2(a: float, kappa: float, z: float) -> float:
    """Odd interval solution z * M(a + 1/2, 3/2, kappa z^2)."""
    return z * kummer_m(a + 0.5, 1.5, kappa * z * z).value


def _m1_da(a: float, kappa: float, z: float) -> float:
    return kummer_m_da(a, 0.5, kappa * z * z).value


def _m2_da(a: float, kappa: float, z: float) -> float:
    return z * kummer_m_da(a + 0.5, 1.5, kappa * z * z).value


def _dm1_dz(a: float, kappa: float, z: float) -> float:
    """d/dz of the even solution: 4 kappa a z M(a+1, 3/2, kappa z^2)."""
    return 4.0 * kappa * a * z * kummer_m(a + 1.0, 1.5, kappa * z * z).value


def _dm2_dz(a: float, kappa: float, z: float) -> float:
    """d/dz of the odd solution via the raised-parameter identity."""
    zz = kappa * z * z
    return (kummer_m(a + 0.5, 1.5, zz).value
            + (4.0 * kappa * z * z / 3.0) * (a + 0.5)
            * kummer_m(a + 1.5, 2.5, zz).value)


def _interval_det(kappa: float, varphi: float) -> Callable[[float], float]:
    """Boundary determinant whose zeros are the interval eigenvalues."""
    zr = 1.0 - varphi
    zl = -1.0 - varphi

    def det(alpha: float) -> float:
        a = -alpha * alpha / (4.0 * kappa)
        return (_m1(a, kappa, zl) * _m2(a, kappa, zr)
                - _m2(a, kappa, zl) * _m1(a, kappa, zr))

    return det


def _interval_det_da(kappa: float, varphi: float, alpha: float) -> float:
    """d/da of the boundary determinant at a = -alpha^2/(4 kappa)."""
    zr = 1.0 - varphi
    zl = -1.0 - varphi
    a = -alpha * alpha / (4.0 * kappa)
    return (_m1_da(a, kappa, zl) * _m2(a, kappa, zr)
            + _m1(a, kappa, zl) * _m2_da(a, kappa, zr)
            - _m2_da(a, kappa, zl) * _m1(a, kappa, zr)
            - _m2(a, kappa, zl) * _m1_da(a, kappa, zr))


# ----------------------------------------------------------------------
# root scanning and refinement
# ----------------------------------------------------------------------

def _local_step(alpha: float, kappa: float, dnu: float,
                brownian_gap: float) -> float:
    """Conservative fraction of the local eigenvalue spacing at alpha.

    Trap-dominated levels sit dnu apart in nu = alpha^2/(4 kappa),
    i.e. 2 kappa dnu / alpha apart in alpha; weak-trap levels sit a
    free-diffusion gap apart.  The scan resolves whichever law rules
    locally (the diffusion gap takes over once alpha outruns the trap
    scale ~2.5 kappa; layouts without a free-diffusion family pass
    brownian_gap = 0 and stay on the nu law).
    """
    deep = 2.0 * kappa * dnu / max(alpha, math.sqrt(4.0 * kappa * dnu))
    if brownian_gap > 0.0:
        if alpha > 2.5 * kappa:
            return 0.4 * brownian_gap
        return 0.4 * min(deep, brownian_gap)
    return 0.4 * deep


def _scan_brackets(fn: Callable[[float], float], kappa: float, dnu: float,
                   brownian_gap: float, n_roots: int, cap: float):
    """First n_roots sign-change brackets of fn along alpha > 0.

    Returns (a, b, fa, fb) tuples in ascending order.  A logarithmic
    sweep over [1e-12, sqrt(4 kappa dnu)] precedes the adaptive linear
    scan because the first root collapses exponentially with kappa.
    """
    brackets = []
    prev_a = 1e-12
    prev_f = fn(prev_a)
    alpha_lin = math.sqrt(4.0 * kappa * dnu)
    if alpha_lin > 4.0 * prev_a:
        n_log = 64
        ratio = (alpha_lin / prev_a) ** (1.0 / n_log)
        a = prev_a
        for _ in range(n_log):
            a *= ratio
            f = fn(a)
            if (f < 0.0) != (prev_f < 0.0):
                brackets.append((prev_a, a, prev_f, f))
            prev_a, prev_f = a, f
    while len(brackets) < n_roots:
        a = prev_a + _local_step(prev_a, kappa, dnu, brownian_gap)
        if a > cap:
            raise RootSearchError(
                f"found {len(brackets)} of {n_roots} eigenvalue brackets "
                f"before alpha = {cap:.6g}; last bracket scanned was "
                f"({prev_a:.17g}, {a:.17g})")
        f = fn(a)
        if (f < 0.0) != (prev_f < 0.0):
            brackets.append((prev_a, a, prev_f, f))
        prev_a, prev_f = a, f
    return brackets[:n_roots]


def _refine_root(fn: Callable[[float], float], bracket) -> float:
    """Polish one sign-change bracket to |d alpha| < _ALPHA_TOL.

    Bisection shrinks the bracket three decades below its width, then
    secant steps (clipped to the live bracket, falling back to its
    midpoint) finish superlinearly.  The result must beat the residual
    tolerance relative to the detection-bracket endpoint magnitudes.
    """
    a, b, fa, fb = bracket
    scale = max(abs(fa), abs(fb), 1e-300)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    for _ in range(64):
        if b - a <= 1e-3 * (bracket[1] - bracket[0]) + 64.0 * _ALPHA_TOL:
            break
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    x0, f0 = a, fa
    x1, f1 = b, fb
    root = 0.5 * (a + b)
    for _ in range(80):
        if f1 == f0:
            root = 0.5 * (a + b)
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not a < x2 < b:
            x2 = 0.5 * (a + b)
        f2 = fn(x2)
        if f2 == 0.0:
            root = x2
            break
        if (f2 < 0.0) == (fa < 0.0):
            a, fa = x2, f2
        else:
            b, fb = x2, f2
        moved = abs(x2 - x1)
        x0, f0 = x1, f1
        x1, f1 = x2, f2
        root = x2
        if moved < _ALPHA_TOL or (b - a) < _ALPHA_TOL:
            break
    if abs(fn(root)) > _RESIDUAL_TOL * scale:
        raise RootSearchError(
            f"root at alpha = {root!r} kept residual "
            f"{abs(fn(root)):.3e} against bracket scale {scale:.3e} "
            f"(bracket ({bracket[0]!r}, {bracket[1]!r}))")
    return root


def _find_roots(fn: Callable[[float], float], kappa: float, dnu: float,
                brownian_gap: float, n_roots: int, cap: float,
                smooth_gaps: bool) -> list[float]:
    """Scan, refine in parallel, and gap-audit one root family."""
    brackets = _scan_brackets(fn, kappa, dnu, brownian_gap, n_roots, cap)
    with ThreadPoolExecutor(max_workers=min(8, len(brackets))) as pool:
        roots = list(pool.map(lambda br: _refine_root(fn, br), brackets))
    for _ in range(2):
        extras = _audit_gaps(fn, roots, kappa, brownian_gap, smooth_gaps)
        if not extras:
            break
        roots = sorted(roots + extras)[:n_roots]
    return roots


def _suspect_gaps(roots: list[float], kappa: float, brownian_gap: float,
                  smooth_gaps: bool) -> list[int]:
    """Indices i whose gap (roots[i], roots[i+1]) looks like a missed root.

    Families with a hard spacing law are held to it directly: at most
    _GAP_SLACK nu-periods or _GAP_SLACK free-diffusion gaps.  Exterior
    spectra have no such bound (their spacing grows like sqrt(kappa)
    near the bottom) but decay smoothly mode to mode, so there a gap is
    suspect when it exceeds 1.5x its smallest neighbour gap -- a miss
    doubles one gap while legitimate neighbours stay within ~1.2x.
    """
    gaps = [hi - lo for lo, hi in zip(roots, roots[1:])]
    if not gaps:
        return []
    out = []
    if smooth_gaps:
        if len(gaps) == 1:
            return []
        for i, g in enumerate(gaps):
            neighbours = [gaps[j] for j in (i - 1, i + 1)
                          if 0 <= j < len(gaps)]
            if g > 1.5 * min(neighbours) and g > _GAP_SLACK * (
                    4.0 * kappa) / (roots[i] + roots[i + 1]):
                out.append(i)
        return out
    for i, g in enumerate(gaps):
        nu_gap = (roots[i + 1] ** 2 - roots[i] ** 2) / (4.0 * kappa)
        if nu_gap > _GAP_SLACK and (brownian_gap == 0.0
                                    or g > _GAP_SLACK * brownian_gap):
            out.append(i)
    return out


def _audit_gaps(fn, roots: list[float], kappa: float, brownian_gap: float,
                smooth_gaps: bool) -> list[float]:
    """Rescan any neighbour gap wider than the family's spacing law.

    Returns newly found refined roots.  A missed sign change is always
    a close root pair (the spectrum is simple), so the 96x finer rescan
    recovers it; an empty rescan certifies the wide gap as genuine --
    interval problems with the trap centre outside the domain produce
    legitimately stretched spacings in the drift-dominated band.
    """
    extras = []
    for i in _suspect_gaps(roots, kappa, brownian_gap, smooth_gaps):
        lo, hi = roots[i], roots[i + 1]
        pad = 1e-9 * (hi - lo)
        grid = [lo + pad + (hi - lo - 2.0 * pad) * k / 96.0
                for k in range(97)]
        vals = [fn(x) for x in grid]
        for (xa, va), (xb, vb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
            if (va < 0.0) != (vb < 0.0):
                extras.append(_refine_root(fn, (xa, xb, va, vb)))
    return extras


# ----------------------------------------------------------------------
# per-mode data (coefficients, weights, normalization)
# ----------------------------------------------------------------------

def _quad_beta(integrand, lo: float, hi: float) -> float:
    value, err = tanh_sinh(integrand, lo, hi, tol=_BETA_TOL)
    if err > 1e-7 * max(1.0, abs(value)):
        raise QuadratureError(
            f"normalization integral reached {err:.3e} "
            f"on value {value:.6e}, wanted {_BETA_TOL:.1e}")
    return value


def _interval_mode(kappa: float, varphi: float, alpha: float, tag: str):
    """Coefficients, both weights, and beta for one interval mode.

    The residue weight divides by whichever boundary coefficient is
    better conditioned; the two groupings agree through the eigenvalue
    identity c1 A2 = -c2 A1, and at a symmetry-silenced mode (odd
    eigenfunction at varphi = 0, where the generating function's pole
    is removable) the surviving grouping returns an exact zero.
    """
    a = -alpha * alpha / (4.0 * kappa)
    zr = 1.0 - varphi
    zl = -1.0 - varphi
    if tag == "symmetric":
        c1, c2 = _m2(a, kappa, zr), 0.0
    elif tag == "antisymmetric":
        c1, c2 = 0.0, _m1(a, kappa, zr)
    else:
        c1, c2 = _m2(a, kappa, zr), _m1(a, kappa, zr)

    p = _m1(a, kappa, zl)
    q = _m2(a, kappa, zl)
    det_da = _interval_det_da(kappa, varphi, alpha)
    if abs(c1) >= abs(c2):
        w_res = 4.0 * kappa * (c1 - q) / (alpha * alpha * det_da * c1)
    else:
        w_res = -4.0 * kappa * (p - c2) / (alpha * alpha * det_da * c2)

    def density(z: float) -> float:
        u = c1 * _m1(a, kappa, z) - c2 * _m2(a, kappa, z)
        return math.exp(-kappa * z * z) * u * u

    beta2 = 1.0 / _quad_beta(density, zl, zr)

    def flux(z: float) -> float:
        return math.exp(2.0 * kappa * varphi * z) * (
            c1 * _dm1_dz(a, kappa, z - varphi)
            - c2 * _dm2_dz(a, kappa, z - varphi))

    # The boundary weight is exp(-kappa (z - varphi)^2) at z = +/-1,
    # split as exp(-kappa (1 + varphi^2)) * exp(2 kappa varphi z).
    w_int = (beta2 * math.exp(-kappa * (1.0 + varphi * varphi))
             / (alpha * alpha) * (flux(-1.0) - flux(1.0)))
    return (c1, c2), w_res, w_int, math.sqrt(beta2)


def _radial_interior_mode(kappa: float, b: float, d: int, alpha: float):
    nu = alpha * alpha / (4.0 * kappa)
    w_res = 4.0 * kappa / (alpha * alpha
                           * kummer_m_da(-nu, b, kappa).value)

    def density(z: float) -> float:
        m = kummer_m(-nu, b, kappa * z * z).value
        return z ** (d - 1) * math.exp(-kappa * z * z) * m * m

    beta2 = 1.0 / _quad_beta(density, 0.0, 1.0)
    w_int = (beta2 * math.exp(-kappa) / (2.0 * kappa)
             * kummer_m(-nu + 1.0, b, kappa).value)
    return (1.0, 0.0), w_res, w_int, math.sqrt(beta2)


def _radial_exterior_mode(kappa: float, b: float, d: int, alpha: float):
    nu = alpha * alpha / (4.0 * kappa)
    w_res = 4.0 * kappa / (alpha * alpha
                           * tricomi_u_da(-nu, b, kappa).value)

    # The weighted mode mass ~ exp(-y) y^(2 nu + b) in y = kappa z^2
    # peaks at y* = 2 nu + b.  Beyond 3 y* + 260 the integrand is below
    # exp(-170) of that peak, so it is cut to zero there -- which also
    # keeps the U evaluation away from arguments whose exp(y) internals
    # overflow (the hard 700 cap; the margin stays > exp(-140) for any
    # basis below ~150 modes).
    y_star = 2.0 * nu + b
    y_cap = min(3.0 * y_star + 260.0, 700.0)

    def density(z: float) -> float:
        y = kappa * z * z
        if y > y_cap:
            return 0.0
        u = tricomi_u(-nu, b, y).value
        return z ** (d - 1) * math.exp(-y) * u * u

    value, err = integrate_to_cutoff(density, 1.0, tol=_BETA_TOL)
    if err > 1e-7 * max(1.0, abs(value)):
        raise QuadratureError(
            f"exterior normalization reached {err:.3e} on {value:.6e}")
    beta2 = 1.0 / value
    # int_1^inf z^(d-1) e^(-kappa z^2) U(-nu, b, kappa z^2) dz
    #   = exp(-kappa)/2 * U(-nu+1, b+1, kappa)  at an eigenvalue,
    # from integrating the self-adjoint form against the decaying mode.
    w_int = (beta2 * math.exp(-kappa) / 2.0
             * tricomi_u(-nu + 1.0, b + 1.0, kappa).value)
    return (1.0, 0.0), w_res, w_int, math.sqrt(beta2)


# ----------------------------------------------------------------------
# free-diffusion (Brownian) closed forms
# ----------------------------------------------------------------------

def _bessel_zero(order: float, k: int) -> float:
    """k-th positive zero of J_order (k = 1, 2, ...)."""
    guess = (k + 0.5 * order - 0.25) * math.pi
    lo, hi = guess - 0.8, guess + 0.8
    flo, fhi = bessel_j(order, lo), bessel_j(order, hi)
    if (flo < 0.0) == (fhi < 0.0):
        raise RootSearchError(
            f"Bessel zero {k} of order {order} escaped ({lo:.6g}, {hi:.6g})")
    return _refine_root(lambda x: bessel_j(order, x), (lo, hi, flo, fhi))


def _brownian_basis(geometry: Geometry, kappa: float, varphi: float,
                    d: int, n_modes: int) -> SpectralBasis:
    """Closed-form basis in the free-diffusion limit kappa -> 0.

    Interval modes are cosines/sines about the centre (the odd family
    carries zero survival weight by symmetry); ball modes are Bessel
    functions with the classical zeros.  Both weight routes coincide
    with the closed forms, so the crosscheck is trivially exact.
    """
    alphas, pairs, weights, betas = [], [], [], []
    if geometry is Geometry.INTERVAL:
        for n in range(n_modes):
            alpha = 0.5 * math.pi * (n + 1)
            if n % 2 == 0:
                sign = -1.0 if (n // 2) % 2 else 1.0  # sin(pi (n+1)/2)
                pairs.append((sign / alpha, 0.0))
                weights.append(2.0)
            else:
                sign = -1.0 if ((n + 1) // 2) % 2 else 1.0  # cos(pi (n+1)/2)
                pairs.append((0.0, sign))
                weights.append(0.0)
            alphas.append(alpha)
            betas.append(alpha)
    else:
        b = 0.5 * d
        for n in range(n_modes):
            if d == 1:
                alpha = math.pi * (n + 0.5)
            elif d == 3:
                alpha = math.pi * (n + 1.0)
            else:
                alpha = _bessel_zero(b - 1.0, n + 1)
            jb = bessel_j(b, alpha)
            scale = (0.5 * alpha) ** (b - 1.0)
            alphas.append(alpha)
            pairs.append((1.0, 0.0))
            weights.append(2.0 * scale / (alpha * gamma_fn(b) * jb))
            betas.append(scale * math.sqrt(2.0) / (gamma_fn(b) * abs(jb)))
    return SpectralBasis(
        geometry=geometry, kappa=kappa, varphi=varphi, d=d,
        alphas=tuple(alphas), coeff_pairs=tuple(pairs),
        weights=tuple(weights), weights_integral=tuple(weights),
        betas=tuple(betas), weight_route=WeightRoute.BOTH, brownian=True)


# ----------------------------------------------------------------------
# basis construction
# ----------------------------------------------------------------------

def _validate_problem(geometry, kappa: float, varphi: float, d: int,
                      n_modes: int) -> Geometry:
    geometry = Geometry(geometry)
    if geometry is Geometry.EXTERIOR_LINE:
        raise ValueError(
            "the forced half-line problem has no discrete eigenbasis; "
            "use its generating function via the extensions module")
    if not isinstance(n_modes, int) or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and nonnegative, got {kappa!r}")
    if not math.isfinite(varphi):
        raise ValueError(f"varphi must be finite, got {varphi!r}")
    if geometry is Geometry.INTERVAL:
        if d != 1:
            raise ValueError("the interval layout is one-dimensional; d must be 1")
    else:
        if d not in (1, 2, 3, 4):
            raise ValueError(f"supported dimensions are 1..4, got {d!r}")
        if varphi != 0.0:
            raise ValueError(
                "a constant pull breaks radial symmetry; varphi must be 0 "
                f"for {geometry.value}")
    return geometry


def build_basis(geometry, kappa: float, varphi: float = 0.0, d: int = 1,
                n_modes: int = 12) -> SpectralBasis:
    """Find the first n_modes eigenvalues and their expansion data.

    Both weight routes are evaluated and stored (weight_route BOTH) so
    `weights_crosscheck` can audit the build.  At varphi = 0 the even
    and odd interval families are scanned separately and merged; the
    generic determinant covers every other pull, including varphi = 1
    where it degenerates to the odd-solution condition on its own.
    kappa below BROWNIAN_KAPPA returns the closed-form free-diffusion
    basis (the exterior problem has none and raises).
    """
    geometry = _validate_problem(geometry, kappa, varphi, d, n_modes)
    if kappa < BROWNIAN_KAPPA:
        if geometry is Geometry.RADIAL_EXTERIOR:
            raise ValueError(
                "free diffusion outside a ball has no discrete exit "
                "spectrum; kappa must be at least BROWNIAN_KAPPA")
        if kappa * abs(varphi) > 1e-8:
            raise ValueError(
                "the weak-trap limit assumes the pull kappa*varphi "
                "vanishes with kappa; got kappa*varphi = "
                f"{kappa * varphi!r}")
        return _brownian_basis(geometry, kappa, varphi, d, n_modes)

    smooth_gaps = False
    if geometry is Geometry.INTERVAL:
        if varphi == 0.0:
            families = [
                (lambda al: kummer_m(-al * al / (4.0 * kappa), 0.5,
                                     kappa).value, "symmetric", 1.0),
                (lambda al: kummer_m(0.5 - al * al / (4.0 * kappa), 1.5,
                                     kappa).value, "antisymmetric", 1.0),
            ]
        else:
            families = [(_interval_det(kappa, varphi), "", 0.5)]
        brownian_gap = math.pi if varphi == 0.0 else 0.5 * math.pi
    elif geometry is Geometry.RADIAL_INTERIOR:
        b = 0.5 * d
        families = [(lambda al: kummer_m(-al * al / (4.0 * kappa), b,
                                         kappa).value, "", 1.0)]
        brownian_gap = math.pi
    else:
        b = 0.5 * d
        families = [(lambda al: tricomi_u(-al * al / (4.0 * kappa), b,
                                          kappa).value, "", 1.0)]
        brownian_gap = 0.0
        smooth_gaps = True

    if geometry is Geometry.RADIAL_EXTERIOR:
        # The exterior bottom level sits at nu0 <~ kappa/2 + 1.5 with
        # spacings up to ~0.6 sqrt(kappa) before relaxing toward 1.
        nu_cap = (0.5 * kappa + 2.0
                  + (n_modes + 2.0) * (1.0 + 0.6 * math.sqrt(kappa)))
        cap = math.sqrt(4.0 * kappa * nu_cap)
    else:
        cap = 2.0 * max(math.sqrt(4.0 * kappa) * math.sqrt(n_modes + 2.0),
                        brownian_gap * (n_modes + 2.0)) + 1.0

    tagged: list[tuple[float, str]] = []
    for fn, tag, dnu in families:
        for root in _find_roots(fn, kappa, dnu, brownian_gap, n_modes,
                                cap, smooth_gaps):
            tagged.append((root, tag))
    tagged.sort()
    tagged = tagged[:n_modes]
    if geometry is Geometry.INTERVAL and varphi == 0.0:
        for (_, t0), (_, t1) in zip(tagged, tagged[1:]):
            if t0 == t1:
                raise RootSearchError(
                    "even and odd interval families stopped alternating; "
                    "a root was missed in the "
                    f"{'odd' if t0 == 'symmetric' else 'even'} family")

    pairs, w_res, w_int, betas = [], [], [], []
    for alpha, tag in tagged:
        if geometry is Geometry.INTERVAL:
            pair, wr, wi, beta = _interval_mode(kappa, varphi, alpha, tag)
        elif geometry is Geometry.RADIAL_INTERIOR:
            pair, wr, wi, beta = _radial_interior_mode(kappa, 0.5 * d, d, alpha)
        else:
            pair, wr, wi, beta = _radial_exterior_mode(kappa, 0.5 * d, d, alpha)
        pairs.append(pair)
        w_res.append(wr)
        w_int.append(wi)
        betas.append(beta)

    return SpectralBasis(
        geometry=geometry, kappa=float(kappa), varphi=float(varphi), d=d,
        alphas=tuple(alpha for alpha, _ in tagged),
        coeff_pairs=tuple(pairs), weights=tuple(w_res),
        weights_integral=tuple(w_int), betas=tuple(betas),
        weight_route=WeightRoute.BOTH, brownian=False)


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------

def _check_start(basis: SpectralBasis, z0: float) -> None:
    g = basis.geometry
    if g is Geometry.INTERVAL:
        if not -1.0 <= z0 <= 1.0:
            raise ValueError(f"interval start must lie in [-1, 1], got {z0!r}")
    elif g is Geometry.RADIAL_INTERIOR:
        if not 0.0 <= z0 <= 1.0:
            raise ValueError(f"interior start must lie in [0, 1], got {z0!r}")
    else:
        if z0 < 1.0:
            raise ValueError(f"exterior start must satisfy z0 >= 1, got {z0!r}")


def mode_term(basis: SpectralBasis, n: int, z0: float) -> float:
    """Spatial factor of mode n in the survival series at start z0.

    This is the unnormalized combination the weights pair with;
    multiply by betas[n] for the orthonormal eigenfunction value.
    """
    alpha = basis.alphas[n]
    kappa = basis.kappa
    if basis.brownian:
        if basis.geometry is Geometry.INTERVAL:
            c1, c2 = basis.coeff_pairs[n]
            return c1 * math.cos(alpha * z0) - c2 * math.sin(alpha * z0) / alpha
        b = 0.5 * basis.d
        if z0 == 0.0:
            return 1.0
        x = alpha * z0
        if basis.d == 1:
            return math.cos(x)
        if basis.d == 3:
            return math.sin(x) / x
        return gamma_fn(b) * bessel_j(b - 1.0, x) / (0.5 * x) ** (b - 1.0)
    a = -alpha * alpha / (4.0 * kappa)
    if basis.geometry is Geometry.INTERVAL:
        c1, c2 = basis.coeff_pairs[n]
        z = z0 - basis.varphi
        return c1 * _m1(a, kappa, z) - c2 * _m2(a, kappa, z)
    if basis.geometry is Geometry.RADIAL_INTERIOR:
        return kummer_m(a, 0.5 * basis.d, kappa * z0 * z0).value
    return tricomi_u(a, 0.5 * basis.d, kappa * z0 * z0).value


def _spectral_sum(basis: SpectralBasis, z0: float, t: float,
                  rate_weighted: bool):
    """Truncated mode sum; the last flag reports whether the final kept
    term was already negligible (False means the basis ran out of modes
    while terms still mattered)."""
    acc = 0.0
    abs_acc = 0.0
    kept = 0
    term = 0.0
    for n in range(basis.n_modes):
        w = basis.weights[n]
        if w == 0.0:
            continue
        lam = basis.alphas[n] ** 2
        term = w * math.exp(-lam * t) * mode_term(basis, n, z0)
        if rate_weighted:
            term *= lam
        acc += term
        abs_acc += abs(term)
        kept += 1
        if kept >= _MIN_TERMS and abs(term) < _TERM_STOP * abs(acc):
            return acc, abs_acc, True
    converged = abs(term) < _TMIN_TERM * max(1.0, abs(acc))
    return acc, abs_acc, converged


def survival(basis: SpectralBasis, z0: float, t: float) -> SpectralValue:
    """Probability of not having exited by time t (units L**2/D).

    The truncated sum is clamped to [0, 1]; the result's `warning`
    flag marks raw values outside [-0.01, 1.01] and any t below the
    basis reliability horizon `t_min`.
    """
    _check_start(basis, z0)
    if not t >= 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    raw, _, converged = _spectral_sum(basis, z0, t, rate_weighted=False)
    warning = (raw < -_CLAMP_SLACK or raw > 1.0 + _CLAMP_SLACK
               or t < basis.t_min or not converged)
    return SpectralValue(min(1.0, max(0.0, raw)), raw, warning)


def fet_density(basis: SpectralBasis, z0: float, t: float) -> SpectralValue:
    """First-exit-time density at t (units D/L**2), -dS/dt term by term.

    Negative truncation noise is clamped to zero; the `warning` flag
    marks raw values below -1% of the term mass and any t below t_min.
    """
    _check_start(basis, z0)
    if not t >= 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    raw, abs_acc, converged = _spectral_sum(basis, z0, t, rate_weighted=True)
    warning = (raw < -_CLAMP_SLACK * abs_acc or t < basis.t_min
               or not converged)
    return SpectralValue(max(0.0, raw), raw, warning)


def mgf(geometry, kappa: float, varphi: float = 0.0, d: int = 1,
        z0: float = 0.0, s: float = 0.0) -> float:
    """Exit-time moment generating function E[exp(-s tau)], s in D/L**2.

    Evaluated directly from the closed hypergeometric ratio, with no
    eigen-decomposition; derivatives in s at 0 give the exit-time
    moments.  Negative s is accepted until the first spectral pole,
    where the denominator vanishes and a ValueError is raised.
    """
    geometry = _validate_problem(geometry, kappa, varphi, d, 1)
    if not math.isfinite(s):
        raise ValueError(f"s must be finite, got {s!r}")
    if kappa < BROWNIAN_KAPPA:
        raise ValueError(
            "the closed ratio needs kappa >= BROWNIAN_KAPPA; the "
            "free-diffusion limit has no trapped generating function")
    if geometry is Geometry.INTERVAL:
        if not -1.0 <= z0 <= 1.0:
            raise ValueError(f"interval start must lie in [-1, 1], got {z0!r}")
        if abs(z0) == 1.0:
            return 1.0
        a = s / (4.0 * kappa)
        zr = 1.0 - varphi
        zl = -1.0 - varphi
        c1 = _m2(a, kappa, zr)
        c2 = _m1(a, kappa, zr)
        p = _m1(a, kappa, zl)
        q = _m2(a, kappa, zl)
        den = p * c1 - q * c2
        if s < 0.0 and abs(den) < _POLE_TOL * (abs(p * c1) + abs(q * c2)):
            raise ValueError(
                f"s = {s!r} sits on a spectral pole of the interval problem")
        z = z0 - varphi
        num = ((c1 - q) * _m1(a, kappa, z) + (p - c2) * _m2(a, kappa, z))
        return num / den
    if geometry is Geometry.RADIAL_INTERIOR:
        if not 0.0 <= z0 <= 1.0:
            raise ValueError(f"interior start must lie in [0, 1], got {z0!r}")
        if z0 == 1.0:
            return 1.0
        a = s / (4.0 * kappa)
        num = kummer_m(a, 0.5 * d, kappa * z0 * z0).value
        den = kummer_m(a, 0.5 * d, kappa).value
        if s < 0.0 and abs(den) < _POLE_TOL * max(1.0, abs(num)):
            raise ValueError(
                f"s = {s!r} sits on a spectral pole of the interior problem")
        return num / den
    if z0 < 1.0:
        raise ValueError(f"exterior start must satisfy z0 >= 1, got {z0!r}")
    if z0 == 1.0:
        return 1.0
    a = s / (4.0 * kappa)
    num = tricomi_u(a, 0.5 * d, kappa * z0 * z0).value
    den = tricomi_u(a, 0.5 * d, kappa).value
    if s < 0.0 and abs(den) < _POLE_TOL * max(1.0, abs(num)):
        raise ValueError(
            f"s = {s!r} sits on a spectral pole of the exterior problem")
    return num / den


def weights_crosscheck(basis: SpectralBasis) -> WeightsReport:
    """Per-mode relative discrepancy between the two weight routes.

    Modes silenced by symmetry carry an exact zero on both routes and
    report zero discrepancy.
    """
    if basis.weight_route is not WeightRoute.BOTH:
        raise ValueError("crosscheck needs a basis built with both routes")
    rows = []
    worst = 0.0
    for n, alpha in enumerate(basis.alphas):
        wr = basis.weights[n]
        wi = basis.weights_integral[n]
        if wr == 0.0 and wi == 0.0:
            disc = 0.0
        else:
            disc = abs(wr - wi) / max(abs(wr), abs(wi))
        worst = max(worst, disc)
        rows.append((n, alpha, wr, wi, disc))
    return WeightsReport(rows=tuple(rows), max_discrepancy=worst)


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def basis_to_json(basis: SpectralBasis) -> str:
    """Full-precision JSON image of every basis field."""
    payload = {
        "geometry": basis.geometry.value,
        "kappa": basis.kappa,
        "varphi": basis.varphi,
        "d": basis.d,
        "n_modes": basis.n_modes,
        "alphas": list(basis.alphas),
        "coeff_pairs": [list(pair) for pair in basis.coeff_pairs],
        "weights": list(basis.weights),
        "weights_integral": list(basis.weights_integral),
        "betas": list(basis.betas),
        "weight_route": basis.weight_route.value,
        "brownian": basis.brownian,
    }
    return json.dumps(payload, indent=2)


def basis_from_json(text: str) -> SpectralBasis:
    """Rebuild a basis serialized by `basis_to_json`."""
    payload = json.loads(text)
    basis = SpectralBasis(
        geometry=Geometry(payload["geometry"]),
        kappa=float(payload["kappa"]),
        varphi=float(payload["varphi"]),
        d=int(payload["d"]),
        alphas=tuple(float(a) for a in payload["alphas"]),
        coeff_pairs=tuple((float(c1), float(c2))
                          for c1, c2 in payload["coeff_pairs"]),
        weights=tuple(float(w) for w in payload["weights"]),
        weights_integral=tuple(float(w)
                               for w in payload["weights_integral"]),
        betas=tuple(float(b) for b in payload["betas"]),
        weight_route=WeightRoute(payload["weight_route"]),
        brownian=bool(payload["brownian"]),
    )
    if basis.n_modes != int(payload["n_modes"]):
        raise ValueError("serialized n_modes disagrees with alphas length")
    return basis
