"""The named q-special functions and their resummed representations.

The two q-analogues of the Airy function both solve second order linear
q-difference equations:

* the entire series A_q(x) = sum q^(n^2) (-x)^n / (q;q)_n solves
  q x u(q^2 x) - u(qx) + u(x) = 0;
* the entire series Ai_q(x) = 1phi1(0; -q; q, -x) solves
  u(q^2 x) + x u(qx) - u(x) = 0.

Around infinity the second equation is solved by z(t) = E(t) f(t) with
t = 1/x, gauge E(t) = 1/theta_q(-q^2 t) and f(t) = A_{q^2}(-q^3 t^2); the
module exposes f both as that series and as the residue-sum closed form that
the second-kind Borel-Laplace pipeline produces, so the two can be checked
against each other and against direct contour quadrature.

For the divergent series 2phi0(0,0;-;q,-x/q), :func:`two_f_zero` returns the
first-kind Borel-Laplace resummation along the spiral [lambda; q] and
:func:`two_f_zero_closed` the theta-weighted closed form it must equal for
x off [-lambda; q].
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    PoleHit,
    SpiralProximity,
    ThetaZero,
    TruncationExceeded,
    ZeroArgument,
)
from .qcore import (
    DEFAULT_PROXIMITY,
    QModulus,
    Spiral,
    Truncation,
    as_modulus,
    e_exp,
    qpochhammer_inf,
    rphis,
    rphis_with_condition,
    theta,
    _trunc,
)
from .series import QDEOperator
from .transforms import qlaplace_plus

__all__ = [
    "ramanujan_Aq",
    "ramanujan_Aq_with_condition",
    "qairy_Ai",
    "qairy_Ai_with_condition",
    "g_borel_image",
    "f_via_residues",
    "two_f_zero",
    "two_f_zero_closed",
    "SolutionAtInfinity",
    "ramanujan_operator",
    "qairy_operator",
]

# denominator theta values below this magnitude are treated as exact zeros
_THETA_FLOOR = 1e-250


def ramanujan_Aq_with_condition(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> tuple[complex, float]:
    """:func:`ramanujan_Aq` plus the internal condition sum|term|/|value|."""
    tr = _trunc(trunc)
    qm = as_modulus(q)
    qc = qm.q
    total = 0 + 0j
    abs_sum = 0.0
    t = 1 + 0j
    qn = 1 + 0j  # q^n
    q2n1 = qc  # q^(2n+1)
    scale = 1.0
    small = 0
    n = 0
    while True:
        total += t
        abs_sum += abs(t)
        scale = max(scale, abs(total), abs(t))
        small = small + 1 if abs(t) <= tr.eps * scale else 0
        if small >= tr.streak:
            break
        if n >= tr.n_max:
            raise TruncationExceeded("A_q series exceeded n_max")
        qn *= qc
        t *= q2n1 * (-x) / (1 - qn)
        q2n1 *= qc * qc
        n += 1
    tr.note(n + 1)
    cond = abs_sum / abs(total) if total != 0 else float("inf")
    return total, max(cond, 1.0)


def ramanujan_Aq(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> complex:
    """Entire q-Airy analogue A_q(x) = sum_{n>=0} q^(n^2) (-x)^n / (q;q)_n.

    Also used at base q^2 for the solution at infinity.
    """
    return ramanujan_Aq_with_condition(q, x, trunc)[0]


def qairy_Ai(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> complex:
    """The q-Airy function Ai_q(x) = 1phi1(0; -q; q, -x), entire in x."""
    qm = as_modulus(q)
    return rphis((0j,), (-qm.q,), qm, -x, trunc)


def qairy_Ai_with_condition(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> tuple[complex, float]:
    """:func:`qairy_Ai` plus the internal condition of its defining series."""
    qm = as_modulus(q)
    return rphis_with_condition((0j,), (-qm.q,), qm, -x, trunc)


def g_borel_image(
    q: QModulus | complex,
    tau: complex,
    trunc: Truncation | None = None,
    delta: float = DEFAULT_PROXIMITY,
) -> complex:
    """Second-kind Borel image g(tau) = 1 / ((-q^2 tau; q)_inf (q^2 tau; q)_inf).

    g solves g(q tau) = (1 + q^2 tau)(1 - q^2 tau) g(tau) with g(0) = 1 and
    has simple poles exactly at tau = +-q^(-2-k), k >= 0.
    """
    qm = as_modulus(q)
    if tau != 0:
        anchor = qm.q**-2
        for sgn in (1, -1):
            k, dist = Spiral(sgn * anchor, qm, delta).nearest(tau)
            if dist < delta and k <= 0:
                raise PoleHit(
                    f"tau={tau!r} lies within {delta} of the pole "
                    f"{sgn}*q^({-2 + k}) of the Borel image"
                )
    q2t = qm.q2 * tau
    return 1 / qpochhammer_inf((-q2t, q2t), qm, trunc)


def f_via_residues(
    q: QModulus | complex, t: complex, trunc: Truncation | None = None
) -> complex:
    """Residue-sum closed form of the series factor at infinity,

        f(t) = [theta(q^2 t) 1phi1(0;-q;q,1/t) + theta(-q^2 t) 1phi1(0;-q;q,-1/t)]
               / (q, -1; q)_inf,

    which must agree with A_{q^2}(-q^3 t^2) and with the contour-quadrature
    value of the second-kind q-Laplace transform of the Borel image.
    """
    if t == 0:
        raise ZeroArgument("f is evaluated at nonzero t")
    tr = _trunc(trunc)
    qm = as_modulus(q)
    qc = qm.q
    q2t = qm.q2 * t
    num = theta(qm, q2t, tr) * rphis((0j,), (-qc,), qm, 1 / t, tr) + theta(
        qm, -q2t, tr
    ) * rphis((0j,), (-qc,), qm, -1 / t, tr)
    return num / qpochhammer_inf((qc, -1 + 0j), qm, tr)


def two_f_zero(
    q: QModulus | complex,
    lam: complex,
    x: complex,
    trunc: Truncation | None = None,
    delta: float = DEFAULT_PROXIMITY,
) -> complex:
    """Resummation of the divergent series 2phi0(0,0;-;q,-x/q) along [lambda;q].

    This is the first-kind Laplace transform of the first-kind Borel image
    phi(xi) = e_q(xi/q), with phi evaluated in product form only (the spiral
    reaches far outside the series' disc).  Requires lambda off q^Z (else phi
    hits poles and the closed form degenerates) and x off [-lambda; q].
    """
    tr = _trunc(trunc)
    qm = as_modulus(q)
    if Spiral(1 + 0j, qm, delta).contains(lam):
        raise SpiralProximity(
            f"lambda={lam!r} lies within {delta} of the spiral q^Z (q={qm.q!r})"
        )

    def phi(xi: complex) -> complex:
        return e_exp(qm, xi / qm.q, tr, mode="product", delta=delta)

    return qlaplace_plus(phi, qm, lam, x, tr, delta)


def _two_f_zero_closed_parts(
    qm: QModulus,
    lam: complex,
    x: complex,
    tr: Truncation,
    delta: float,
    drop_one_minus_q: bool,
) -> tuple[complex, complex]:
    qc = qm.q
    if Spiral(1 + 0j, qm, delta).contains(lam):
        raise SpiralProximity(
            f"lambda={lam!r} lies within {delta} of the spiral q^Z, where "
            f"theta_q(-lambda/q) vanishes (q={qc!r})"
        )
    if Spiral(-lam, qm, delta).contains(x):
        raise SpiralProximity(
            f"x={x!r} lies within {delta} of the exclusion spiral [-lambda;q] "
            f"(lambda={lam!r}, q={qc!r})"
        )
    th_lam = theta(qm, -lam / qc, tr)
    th_lx = theta(qm, lam / x, tr)
    if abs(th_lam) < _THETA_FLOOR or abs(th_lx) < _THETA_FLOOR:
        raise ThetaZero("a denominator theta value is numerically zero")
    q2m = qm.squared()
    pref = qpochhammer_inf(qc, qm, tr) / (th_lam * th_lx)
    even = (
        pref
        * theta(q2m, -lam * lam / (qc * x), tr)
        * rphis((0j,), (qc,), q2m, qm.q2 / x, tr)
    )
    odd = (
        pref
        * (lam / x)
        * theta(q2m, -lam * lam / x, tr)
        * rphis((0j,), (qc**3,), q2m, qc**3 / x, tr)
    )
    if not drop_one_minus_q:
        odd /= 1 - qc
    return even, odd


def two_f_zero_closed(
    q: QModulus | complex,
    lam: complex,
    x: complex,
    trunc: Truncation | None = None,
    delta: float = DEFAULT_PROXIMITY,
    with_theta_factor: bool = False,
    _drop_one_minus_q: bool = False,
) -> complex:
    """Closed form of the resummed 2f0(0,0;-;q,-x/q) along [lambda; q]:

        (q;q)_inf / (theta_q(-lambda/q) theta_q(lambda/x)) *
        [ theta_{q^2}(-lambda^2/(q x)) 1phi1(0;q;q^2,q^2/x)
          + (lambda/x)/(1-q) theta_{q^2}(-lambda^2/x) 1phi1(0;q^3;q^2,q^3/x) ].

    ``with_theta_factor=True`` multiplies by theta_q(x), matching the form in
    which the identity appears as a solution of the Ramanujan equation.  The
    private ``_drop_one_minus_q`` switch deliberately corrupts the second
    term; it exists so the verification harness can prove it detects wrong
    formulas.
    """
    tr = _trunc(trunc)
    qm = as_modulus(q)
    even, odd = _two_f_zero_closed_parts(qm, lam, x, tr, delta, _drop_one_minus_q)
    val = even + odd
    if with_theta_factor:
        val *= theta(qm, x, tr)
    return val


def ramanujan_operator(K: complex) -> QDEOperator:
    """The operator K x sigma_q^2 - sigma_q + 1 (Ramanujan equation at K = q)."""
    return QDEOperator(((1, complex(K), 2), (0, -1 + 0j, 1), (0, 1 + 0j, 0)))


def qairy_operator() -> QDEOperator:
    """The operator sigma_q^2 + x sigma_q - 1 annihilating Ai_q."""
    return QDEOperator(((0, 1 + 0j, 2), (1, 1 + 0j, 1), (0, -1 + 0j, 0)))


@dataclass(frozen=True)
class SolutionAtInfinity:
    """Solution z(t) = E(t) f(t) of the q-Airy equation around infinity.

    t = 1/x; the gauge E(t) = 1/theta_q(-q^2 t) satisfies
    E(qt) = -q^2 t E(t) and E(q^2 t) = q^5 t^2 E(t), and the series factor is
    f(t) = A_{q^2}(-q^3 t^2).  Defined for t off the spiral q^Z (zeros of the
    gauge denominator scaled by q^2).
    """

    q: QModulus
    t: complex
    delta: float = DEFAULT_PROXIMITY

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", as_modulus(self.q))
        if self.t == 0:
            raise ZeroArgument("t must be nonzero")
        if Spiral(1 + 0j, self.q, self.delta).contains(self.t):
            raise SpiralProximity(
                f"t={self.t!r} lies within {self.delta} of the zero spiral of "
                f"theta_q(-q^2 t) (t in q^Z)"
            )

    def prefactor(self, trunc: Truncation | None = None) -> complex:
        return 1 / theta(self.q, -self.q.q2 * self.t, trunc)

    def series_factor(self, trunc: Truncation | None = None) -> complex:
        return ramanujan_Aq(self.q.squared(), -self.q.q**3 * self.t**2, trunc)

    def value(self, trunc: Truncation | None = None) -> complex:
        return self.prefactor(trunc) * self.series_factor(trunc)
