"""Scalar building blocks for q-series numerics.

Everything here works with ordinary double-precision ``complex`` values and a
base q with 0 < |q| < 1.  The module provides q-shifted factorials (finite and
infinite), the bilateral theta function with its triple-product evaluator, the
generalized basic hypergeometric series, and the two q-exponentials.  All
infinite sums and products are truncated under an explicit :class:`Truncation`
policy; nothing is ever cut silently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    BadLowerParameter,
    DivergentSeries,
    OutsideRadius,
    PoleHit,
    SpiralProximity,
    TruncationExceeded,
    ZeroArgument,
)

__all__ = [
    "QModulus",
    "Truncation",
    "TermLog",
    "Spiral",
    "DEFAULT_TRUNCATION",
    "as_modulus",
    "qpochhammer_n",
    "qpochhammer_inf",
    "qpochhammer_inf_shifted_pole",
    "theta",
    "theta_sum",
    "theta_sum_with_condition",
    "theta_product",
    "rphis",
    "rphis_with_condition",
    "e_exp",
    "E_exp",
]

#: relative distance below which a point counts as sitting on a spiral/pole
DEFAULT_PROXIMITY = 1e-6

#: near-exact relative distance used to recognize terminating series parameters
_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class QModulus:
    """The base q of all q-series here, constrained to 0 < |q| < 1.

    Derived bases used throughout: ``q2`` (= q^2, for even/odd splits) and the
    principal square root ``p`` (for the covering transformation).  Use
    :meth:`squared` / :meth:`sqrt` when a :class:`QModulus` at the derived base
    is needed.
    """

    q: complex

    def __post_init__(self) -> None:
        qc = complex(self.q)
        object.__setattr__(self, "q", qc)
        if not 0.0 < abs(qc) < 1.0:
            raise ValueError(f"base must satisfy 0 < |q| < 1, got |q| = {abs(qc)!r}")

    @property
    def q2(self) -> complex:
        return self.q * self.q

    @property
    def p(self) -> complex:
        """Principal square root of q."""
        return cmath.sqrt(self.q)

    def squared(self) -> "QModulus":
        return QModulus(self.q * self.q)

    def sqrt(self) -> "QModulus":
        return QModulus(cmath.sqrt(self.q))


def as_modulus(q: "QModulus | complex | float") -> QModulus:
    """Coerce a bare number into a validated :class:`QModulus`."""
    if isinstance(q, QModulus):
        return q
    return QModulus(complex(q))


@dataclass
class TermLog:
    """Optional sink counting the terms/factors a computation consumed."""

    terms: int = 0

    def note(self, n: int) -> None:
        self.terms += n


@dataclass(frozen=True)
class Truncation:
    """Tail-tolerance policy for every infinite sum and product.

    A tail is accepted once ``streak`` consecutive terms fall below
    ``eps`` relative to the running scale (the largest of the partial sum and
    the largest term seen; the guard keeps bilateral sums terminating at theta
    zeros, where the partial sum itself cancels to ~0).  Reaching ``n_max``
    first raises :class:`~qconnect.errors.TruncationExceeded`.
    """

    eps: float = 1e-15
    n_max: int = 10000
    streak: int = 3
    log: TermLog | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.streak < 1:
            raise ValueError("streak must be at least 1")

    def note(self, n: int) -> None:
        if self.log is not None:
            self.log.note(n)


DEFAULT_TRUNCATION = Truncation()


def _trunc(trunc: Truncation | None) -> Truncation:
    return DEFAULT_TRUNCATION if trunc is None else trunc


@dataclass(frozen=True)
class Spiral:
    """The discrete q-spiral [anchor; q] = {anchor * q^k : k in Z}.

    Used as the exclusion locus of theorems (theta zeros, e_q poles).  The
    membership test is a relative-distance test against the nearest spiral
    point, with k running over both signs; points closer than ``delta`` are
    rejected by callers rather than extrapolated.
    """

    anchor: complex
    base: QModulus
    delta: float = DEFAULT_PROXIMITY

    def __post_init__(self) -> None:
        if self.anchor == 0:
            raise ValueError("spiral anchor must be nonzero")

    def nearest(self, x: complex) -> tuple[int, float]:
        """Return (k, relative distance) of the spiral point nearest to x.

        Since |anchor * q^k| is monotone in k, candidate exponents live near
        log(|x|/|anchor|)/log|q|; a short scan around that value suffices.
        """
        ax = abs(x)
        if ax == 0.0:
            return 0, math.inf
        q = self.base.q
        k0 = math.log(ax / abs(self.anchor)) / math.log(abs(q))
        # |q|^k must stay representable; spiral points beyond that are moot
        k_cap = int(290 / abs(math.log10(abs(q)))) + 1
        best_k, best_d = 0, math.inf
        for k in range(math.floor(k0) - 2, math.ceil(k0) + 3):
            if abs(k) > k_cap:
                continue
            s = self.anchor * q**k
            d = abs(x - s) / max(abs(s), ax)
            if d < best_d:
                best_k, best_d = k, d
        return best_k, best_d

    def distance(self, x: complex) -> float:
        return self.nearest(x)[1]

    def contains(self, x: complex) -> bool:
        return self.distance(x) < self.delta


def qpochhammer_n(a: complex, q: QModulus | complex, n: int) -> complex:
    """Finite q-shifted factorial (a; q)_n = prod_{j<n} (1 - a q^j).

    The empty product (n = 0) is 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    qc = as_modulus(q).q
    prod = 1 + 0j
    qj = 1 + 0j
    for _ in range(n):
        prod *= 1 - a * qj
        qj *= qc
    return prod


def qpochhammer_inf(
    a: complex | Sequence[complex],
    q: QModulus | complex,
    trunc: Truncation | None = None,
) -> complex:
    """Infinite q-shifted factorial (a; q)_inf, or the multi-argument product
    (a_1, ..., a_m; q)_inf when ``a`` is a sequence.

    Factors are accumulated until |a q^n| stays below ``trunc.eps`` for
    ``trunc.streak`` consecutive n; the product converges absolutely for any
    a since |q| < 1.
    """
    tr = _trunc(trunc)
    qm = as_modulus(q)
    avals: tuple[complex, ...]
    if isinstance(a, (list, tuple)):
        avals = tuple(complex(v) for v in a)
    else:
        avals = (complex(a),)
    if not avals:
        return 1 + 0j
    prod = 1 + 0j
    qn = 1 + 0j
    small = 0
    n = 0
    while small < tr.streak:
        mag = 0.0
        for av in avals:
            f = av * qn
            prod *= 1 - f
            mag = max(mag, abs(f))
        small = small + 1 if mag < tr.eps else 0
        qn *= qm.q
        n += 1
        if n > tr.n_max:
            raise TruncationExceeded(
                f"(a;q)_inf tail not below eps={tr.eps} after n_max={tr.n_max} factors"
            )
    tr.note(n * len(avals))
    return prod


def qpochhammer_inf_shifted_pole(
    lam: complex,
    q: QModulus | complex,
    k: int,
    trunc: Truncation | None = None,
    delta: float = DEFAULT_PROXIMITY,
) -> complex:
    """Evaluate 1 / (lam * q^(-k); q)_inf through its pole-free closed form

        1/(lam q^{-k}; q)_inf = (-lam)^{-k} q^{k(k+1)/2} / ((lam; q)_inf (q/lam; q)_k),

    valid for lam outside the spiral q^Z.  This continues the reciprocal of
    the defining product past the unit disc without ever forming the nearly
    singular leading factors.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    qm = as_modulus(q)
    spiral = Spiral(1 + 0j, qm, delta)
    if spiral.contains(lam):
        raise SpiralProximity(
            f"lambda={lam!r} lies within {delta} of the spiral q^Z (q={qm.q!r})"
        )
    qk = qm.q ** (k * (k + 1) // 2)
    num = (-lam) ** (-k) * qk
    den = qpochhammer_inf(lam, qm, trunc) * qpochhammer_n(qm.q / lam, qm, k)
    return num / den


def theta_sum_with_condition(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> tuple[complex, float]:
    """Bilateral theta sum together with its internal condition number.

    The condition is sum|term| / |result|; it grows without bound near the
    zero spiral -q^Z (and generally as |q| -> 1, where the zeros crowd
    together), which is exactly the loss factor of the sum evaluation.
    """
    if x == 0:
        raise ZeroArgument("theta is undefined at x = 0")
    tr = _trunc(trunc)
    qm = as_modulus(q)
    qc = qm.q
    total = 1 + 0j
    abs_sum = 1.0
    scale = 1.0
    count = 1

    # n > 0 tail: term ratio q^n x
    t = 1 + 0j
    qn = 1 + 0j
    small = 0
    n = 0
    while small < tr.streak:
        t *= qn * x
        qn *= qc
        total += t
        abs_sum += abs(t)
        n += 1
        count += 1
        scale = max(scale, abs(total), abs(t))
        small = small + 1 if abs(t) <= tr.eps * scale else 0
        if n > tr.n_max:
            raise TruncationExceeded("theta upper tail exceeded n_max")

    # n < 0 tail: term(-m) ratio q^m / x
    u = 1 + 0j
    qn = qc
    small = 0
    m = 0
    while small < tr.streak:
        u *= qn / x
        qn *= qc
        total += u
        abs_sum += abs(u)
        m += 1
        count += 1
        scale = max(scale, abs(total), abs(u))
        small = small + 1 if abs(u) <= tr.eps * scale else 0
        if m > tr.n_max:
            raise TruncationExceeded("theta lower tail exceeded n_max")

    tr.note(count)
    cond = abs_sum / abs(total) if total != 0 else math.inf
    return total, max(cond, 1.0)


def theta_sum(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> complex:
    """Bilateral theta series theta_q(x) = sum_{n in Z} q^(n(n-1)/2) x^n.

    Both tails are truncated independently under ``trunc``; the sum converges
    for every x != 0 because of the q^(n(n-1)/2) decay on each side.  Near
    the zero spiral the sum cancels catastrophically; prefer :func:`theta`
    (product form) when full relative accuracy matters.
    """
    return theta_sum_with_condition(q, x, trunc)[0]


def theta_product(
    q: QModulus | complex, x: complex, trunc: Truncation | None = None
) -> complex:
    """Theta via the triple product theta_q(x) = (q, -x, -q/x; q)_inf.

    Exact zeros on the spiral -q^Z come out as exact zero factors here,
    which the bilateral sum can only approach through cancellation.
    """
    if x == 0:
        raise ZeroArgument("theta is undefined at x = 0")
    qm = as_modulus(q)
    return qpochhammer_inf((qm.q, -x, -qm.q / x), qm, trunc)


def theta(
    q: QModulus | complex,
    x: complex,
    trunc: Truncation | None = None,
    method: str = "auto",
) -> complex:
    """Jacobi theta function theta_q(x), x != 0.

    ``method="auto"`` evaluates the cancellation-free triple product, after
    renormalizing |x| outside [0.2, 5] into that annulus with the shift law
    theta_q(x) = q^(k(k-1)/2) x^k theta_q(q^k x).  The bilateral sum
    (``method="sum"``) cancels catastrophically near the zero spiral (badly
    so for |q| close to 1, where the zeros crowd in modulus), so the product
    is the default everywhere; the two evaluators cross-check each other in
    the test suite.
    """
    if x == 0:
        raise ZeroArgument("theta is undefined at x = 0")
    if method == "sum":
        return theta_sum(q, x, trunc)
    if method == "product":
        return theta_product(q, x, trunc)
    if method != "auto":
        raise ValueError(f"unknown theta method {method!r}")
    qm = as_modulus(q)
    ax = abs(x)
    if 0.2 <= ax <= 5.0:
        return theta_product(qm, x, trunc)
    k = round(-math.log(ax) / math.log(abs(qm.q)))
    x0 = qm.q**k * x
    return qm.q ** (k * (k - 1) // 2) * x**k * theta_product(qm, x0, trunc)


def _terminating_degree(upper: Sequence[complex], qm: QModulus) -> int | None:
    """Degree at which an upper parameter a = q^(-m), m >= 0 kills the series."""
    spiral = Spiral(1 + 0j, qm, _EXACT_TOL)
    best: int | None = None
    for a in upper:
        if a == 0:
            continue
        k, d = spiral.nearest(a)
        if d < _EXACT_TOL and k <= 0:
            m = -k
            best = m if best is None else min(best, m)
    return best


def rphis_with_condition(
    upper: Sequence[complex],
    lower: Sequence[complex],
    q: QModulus | complex,
    x: complex,
    trunc: Truncation | None = None,
) -> tuple[complex, float]:
    """:func:`rphis` together with the internal condition sum|term|/|value|.

    Entire series evaluated far from the origin cancel large terms down to a
    small value; the condition is the factor by which double precision loses
    accuracy there.
    """
    tr = _trunc(trunc)
    qm = as_modulus(q)
    ups = tuple(complex(a) for a in upper)
    lows = tuple(complex(b) for b in lower)
    r, s = len(ups), len(lows)
    d = 1 + s - r

    pole_spiral = Spiral(1 + 0j, qm, DEFAULT_PROXIMITY)
    for b in lows:
        if b == 0:
            continue
        k, dist = pole_spiral.nearest(b)
        if dist < DEFAULT_PROXIMITY and k <= 0:
            raise BadLowerParameter(
                f"lower parameter {b!r} lies within {DEFAULT_PROXIMITY} of q^(-N) "
                f"(q={qm.q!r}); the series has a vanishing denominator"
            )

    if x == 0:
        return 1 + 0j, 1.0

    term_deg = _terminating_degree(ups, qm)
    if d < 0 and term_deg is None:
        raise DivergentSeries(
            f"r-s = {r - s} > 1 with nonterminating upper parameters: "
            "radius of convergence is zero"
        )
    if d == 0 and abs(x) >= 1 and term_deg is None:
        raise OutsideRadius(
            f"|x| = {abs(x)} >= 1 outside the radius of convergence of a "
            f"{r}phi{s} series"
        )

    qc = qm.q
    total = 0 + 0j
    abs_sum = 0.0
    t = 1 + 0j
    qn = 1 + 0j
    scale = 1.0
    small = 0
    n = 0
    while True:
        total += t
        abs_sum += abs(t)
        scale = max(scale, abs(total), abs(t))
        if term_deg is not None and n >= term_deg:
            n += 1
            break
        small = small + 1 if abs(t) <= tr.eps * scale else 0
        if small >= tr.streak:
            n += 1
            break
        if n >= tr.n_max:
            raise TruncationExceeded(
                f"series tail not below eps={tr.eps} after n_max={tr.n_max} terms"
            )
        num = 1 + 0j
        for a in ups:
            num *= 1 - a * qn
        den = 1 + 0j
        for b in lows:
            den *= 1 - b * qn
        den *= 1 - qn * qc
        if den == 0:
            raise BadLowerParameter("vanishing denominator factor in series term")
        t *= num / den * x
        if d:
            t *= (-qn) ** d
        qn *= qc
        n += 1
    tr.note(n)
    cond = abs_sum / abs(total) if total != 0 else math.inf
    return total, max(cond, 1.0)


def rphis(
    upper: Sequence[complex],
    lower: Sequence[complex],
    q: QModulus | complex,
    x: complex,
    trunc: Truncation | None = None,
) -> complex:
    """Generalized basic hypergeometric series r_phi_s at base q.

    .. math::

        {}_r\\varphi_s(a_1..a_r; b_1..b_s; q, x) = \\sum_{n\\ge 0}
        \\frac{(a_1,..,a_r;q)_n}{(b_1,..,b_s;q)_n (q;q)_n}
        \\left\\{(-1)^n q^{n(n-1)/2}\\right\\}^{1+s-r} x^n

    The radius of convergence is infinite, 1 or 0 according to r-s < 1,
    r-s = 1 or r-s > 1.  Nonterminating divergent input raises
    :class:`DivergentSeries`; r-s = 1 with |x| >= 1 raises
    :class:`OutsideRadius`; a lower parameter in q^(-N) raises
    :class:`BadLowerParameter`.

    The base may be any :class:`QModulus` (q, q^2, sqrt(q), ...), which is how
    the even/odd split identities at base q^2 are evaluated.
    """
    return rphis_with_condition(upper, lower, q, x, trunc)[0]


def e_exp(
    q: QModulus | complex,
    x: complex,
    trunc: Truncation | None = None,
    mode: str = "auto",
    delta: float = DEFAULT_PROXIMITY,
) -> complex:
    """q-exponential e_q(x) = 1phi0(0; -; q, x) = sum x^n/(q;q)_n.

    The defining series converges only for |x| < 1; the product form
    e_q(x) = 1/(x; q)_inf continues it to all x off the pole half-spiral
    {q^(-k) : k >= 0}.  ``mode`` selects "series", "product" or "auto"
    (series inside the unit disc, product outside).  Product mode raises
    :class:`PoleHit` within ``delta`` of a pole.
    """
    qm = as_modulus(q)
    if mode == "auto":
        mode = "series" if abs(x) < 1 else "product"
    if mode == "series":
        return rphis((0j,), (), qm, x, trunc)
    if mode != "product":
        raise ValueError(f"unknown e_exp mode {mode!r}")
    if x != 0:
        k, dist = Spiral(1 + 0j, qm, delta).nearest(x)
        if dist < delta and k <= 0:
            raise PoleHit(
                f"x={x!r} lies within {delta} of the e_q pole q^{k} "
                f"(half-spiral of [1;q], q={qm.q!r})"
            )
    return 1 / qpochhammer_inf(x, qm, trunc)


def E_exp(
    q: QModulus | complex,
    x: complex,
    trunc: Truncation | None = None,
    mode: str = "auto",
) -> complex:
    """q-exponential E_q(x) = 0phi0(-; -; q, -x) = sum q^(n(n-1)/2) x^n/(q;q)_n.

    Entire in x, with product form E_q(x) = (-x; q)_inf.  "auto" uses the
    series inside the closed unit disc and the (cancellation-free) product
    outside.
    """
    qm = as_modulus(q)
    if mode == "auto":
        mode = "series" if abs(x) <= 1 else "product"
    if mode == "series":
        return rphis((), (), qm, -x, trunc)
    if mode != "product":
        raise ValueError(f"unknown E_exp mode {mode!r}")
    return qpochhammer_inf(-x, qm, trunc)
