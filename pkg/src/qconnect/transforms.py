"""Analytic q-Borel-Laplace machinery.

Two resummation pipelines live here.  The second kind pairs the coefficient
reweight a_n -> a_n q^(-n(n-1)/2) with a contour integral against the theta
kernel on a small circle,

    (L_q^- g)(t) = (1/2 pi i) oint_{|tau|=r} g(tau) theta_q(t/tau) dtau/tau,

evaluated by the uniform N-node circle rule with node doubling (the rule is
exact on Laurent polynomials of degree < N, and the integrand's Laurent tail
decays like q^(n^2/2), so doubling converges geometrically).  The first kind
pairs a_n -> a_n q^(+n(n-1)/2) with a bilateral sum over a q-spiral,

    (L_q^+ phi)(x) = sum_{n in Z} phi(lambda q^n) / theta_q(lambda q^n / x).

The kernel values are generated from a single theta evaluation through the
exact shift law, which keeps the superexponential weights well scaled on both
tails.  The covering transformation t^2 = x with base sqrt(q) rounds out the
toolkit.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

from .errors import (
    NoConvergence,
    PoleOnContour,
    SpiralProximity,
    TruncationExceeded,
    ZeroArgument,
)
from .qcore import (
    DEFAULT_PROXIMITY,
    QModulus,
    Spiral,
    Truncation,
    as_modulus,
    theta,
    _trunc,
)
from .series import QDEOperator

__all__ = [
    "qlaplace_minus",
    "qlaplace_plus",
    "covering_transform",
    "contour_residue",
]


_ULP = 2.2e-16


def _circle_mean(
    sample: Callable[[float], complex],
    eps: float,
    start_nodes: int,
    max_nodes: int,
    noise_factor: float = 0.0,
) -> complex:
    """Mean of sample(angle) over uniform circle nodes, doubling until two
    successive rules agree to eps.

    Agreement is relative to max(|mean|, mean|sample|): once the rules match
    to within the roundoff of summing samples of that magnitude, more nodes
    cannot improve the value (the residual is cancellation noise, not
    discretization error).  With ``noise_factor`` set, a mean smaller than
    noise_factor * ulp * mean|sample| is refused: such a value would carry no
    significant digits, only the cancellation noise of the samples.
    """
    n = start_nodes
    total = 0 + 0j
    abs_total = 0.0
    for j in range(n):
        v = sample(2.0 * math.pi * j / n)
        total += v
        abs_total += abs(v)
    mean = total / n
    while 2 * n <= max_nodes:
        for j in range(n):
            v = sample(2.0 * math.pi * (2 * j + 1) / (2 * n))
            total += v
            abs_total += abs(v)
        n *= 2
        new_mean = total / n
        if abs(new_mean - mean) <= eps * max(abs(new_mean), abs_total / n):
            if noise_factor and abs(new_mean) < noise_factor * _ULP * (abs_total / n):
                raise NoConvergence(
                    "quadrature value sits below the cancellation noise floor "
                    f"(|mean| = {abs(new_mean):.3e} vs samples of size "
                    f"{abs_total / n:.3e}); no significant digits survive in "
                    "double precision"
                )
            return new_mean
        mean = new_mean
    raise NoConvergence(
        f"circle rule did not stabilize to eps={eps} within {max_nodes} nodes"
    )


def qlaplace_minus(
    g: Callable[[complex], complex],
    q: QModulus | complex,
    t: complex,
    r: float | None = None,
    trunc: Truncation | None = None,
    start_nodes: int = 64,
    max_nodes: int = 4096,
) -> complex:
    """Second-kind q-Laplace transform of g at t by circle quadrature.

    g must be analytic on the closed disk |tau| <= r with 0 < r < 1/|q|^2;
    the default radius min(1, 0.5/|q|^2) stays inside that bound and away
    from the nearest admissible pole circle.  Failures inside g become
    :class:`PoleOnContour`; a non-stabilizing rule raises
    :class:`NoConvergence`.

    Conditioning: the achievable relative accuracy is limited by
    max|g * theta| on the contour over the result.  Borel images of
    q-Gevrey-decaying coefficient sequences (a_n ~ q^(n(n-1)/2), the class
    this transform resums) stay bounded and evaluate to full precision;
    feeding the Borel image of an O(1)-coefficient polynomial of high degree
    inflates the contour values by q^(-n(n-1)/2) and the lost digits are
    irrecoverable in doubles.
    """
    if t == 0:
        raise ZeroArgument("q-Laplace transform target t must be nonzero")
    tr = _trunc(trunc)
    qm = as_modulus(q)
    r_max = 1.0 / abs(qm.q) ** 2
    if r is None:
        r = min(1.0, 0.5 * r_max)
    if not 0.0 < r < r_max:
        raise ValueError(f"contour radius must satisfy 0 < r < 1/|q|^2 = {r_max}")

    def sample(angle: float) -> complex:
        tau = r * cmath.exp(1j * angle)
        try:
            gv = g(tau)
        except Exception as exc:
            raise PoleOnContour(
                f"integrand failed on |tau| = {r} at angle {angle:.6f}: {exc}"
            ) from exc
        return gv * theta(qm, t / tau, tr)

    return _circle_mean(sample, tr.eps, start_nodes, max_nodes, noise_factor=100.0)


def contour_residue(
    f: Callable[[complex], complex],
    center: complex,
    radius: float,
    trunc: Truncation | None = None,
    start_nodes: int = 64,
    max_nodes: int = 4096,
) -> complex:
    """Residue of f at ``center`` by quadrature on a small surrounding circle.

    The circle must separate ``center`` from all other singularities of f.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    tr = _trunc(trunc)

    def sample(angle: float) -> complex:
        w = radius * cmath.exp(1j * angle)
        try:
            return f(center + w) * w
        except Exception as exc:
            raise PoleOnContour(
                f"integrand failed on the residue circle at angle {angle:.6f}: {exc}"
            ) from exc

    return _circle_mean(sample, tr.eps, start_nodes, max_nodes)


def qlaplace_plus(
    phi: Callable[[complex], complex],
    q: QModulus | complex,
    lam: complex,
    x: complex,
    trunc: Truncation | None = None,
    delta: float = DEFAULT_PROXIMITY,
) -> complex:
    """First-kind q-Laplace transform of phi along the spiral [lambda; q].

    Requires x off the spiral [-lambda; q], where the kernel theta vanishes.
    The bilateral sum is truncated symmetrically once five consecutive terms
    on a tail fall below the tolerance; successive term ratios are
    lambda q^n / x upward and superexponential downward, via the theta shift
    law.  phi must be evaluable on the whole spiral (use pole-aware product
    forms, not series, for functions continued past their disc).
    """
    if lam == 0:
        raise ZeroArgument("the spiral anchor lambda must be nonzero")
    if x == 0:
        raise ZeroArgument("x must be nonzero")
    tr = _trunc(trunc)
    qm = as_modulus(q)
    if Spiral(-lam, qm, delta).contains(x):
        raise SpiralProximity(
            f"x={x!r} lies within {delta} of the exclusion spiral [-lambda;q] "
            f"(lambda={lam!r}, q={qm.q!r})"
        )
    qc = qm.q
    ratio = lam / x
    th = theta(qm, ratio, tr)
    streak_req = max(5, tr.streak)

    def term(weight: complex, n: int) -> complex:
        return phi(lam * qc**n) * weight / th

    total = term(1 + 0j, 0)
    scale = max(abs(total), 1e-300)
    count = 1

    # upward tail: w_{n+1} = w_n * q^n * (lambda/x)
    w = 1 + 0j
    qn = 1 + 0j
    small = 0
    n = 0
    while small < streak_req:
        w *= qn * ratio
        qn *= qc
        n += 1
        tv = term(w, n)
        total += tv
        count += 1
        scale = max(scale, abs(total), abs(tv))
        small = small + 1 if abs(tv) <= tr.eps * scale else 0
        if n > tr.n_max:
            raise TruncationExceeded("spiral sum upper tail exceeded n_max")

    # downward tail: w_{n-1} = w_n * q^(1-n) * (x/lambda)
    w = 1 + 0j
    small = 0
    n = 0
    while small < streak_req:
        w *= qc ** (1 - n) / ratio
        n -= 1
        tv = term(w, n)
        total += tv
        count += 1
        scale = max(scale, abs(total), abs(tv))
        small = small + 1 if abs(tv) <= tr.eps * scale else 0
        if -n > tr.n_max:
            raise TruncationExceeded("spiral sum lower tail exceeded n_max")

    tr.note(count)
    return total


def covering_transform(op: QDEOperator) -> QDEOperator:
    """Covering transformation of a q-difference operator.

    Under t^2 = x, v(t) = u(t^2) and p = sqrt(q), a term c x^m sigma_q^l
    acting on u corresponds to c t^(2m) sigma_p^l acting on v: the shift
    sigma_p^l v(t) = u(p^(2l) t^2) = u(q^l x) reproduces sigma_q^l, while
    monomial degrees double.  The returned operator is meant to act on series
    in t at the base sqrt(q) of the input's base.
    """
    return QDEOperator(tuple((2 * m, c, l) for m, c, l in op.terms))
