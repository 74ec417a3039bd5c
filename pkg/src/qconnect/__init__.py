"""q-special functions, q-Borel-Laplace resummation, and identity checks.

The library is organized in five layers:

* :mod:`qconnect.qcore` - q-Pochhammer symbols, theta, basic hypergeometric
  series, q-exponentials, truncation control;
* :mod:`qconnect.series` - truncated formal power series and q-difference
  operators, with the formal (first and second kind) Borel transforms;
* :mod:`qconnect.transforms` - the analytic q-Laplace transforms (contour
  quadrature and spiral sums) and the covering transformation;
* :mod:`qconnect.special` - the Ramanujan function, the q-Airy function and
  their resummed representations at the origin and at infinity;
* :mod:`qconnect.verify` - every connection formula as a numerical check over
  a complex grid, with JSON/CSV reports (CLI in :mod:`qconnect.cli`).
"""

from .errors import (
    BadLowerParameter,
    BaseMismatch,
    DivergentSeries,
    DomainError,
    EmptyGrid,
    NoConvergence,
    OutsideRadius,
    PoleHit,
    PoleOnContour,
    QConnectError,
    SpiralProximity,
    ThetaZero,
    TruncationExceeded,
    ZeroArgument,
)
from .qcore import (
    DEFAULT_TRUNCATION,
    E_exp,
    QModulus,
    Spiral,
    TermLog,
    Truncation,
    as_modulus,
    e_exp,
    qpochhammer_inf,
    qpochhammer_inf_shifted_pole,
    qpochhammer_n,
    rphis,
    rphis_with_condition,
    theta,
    theta_product,
    theta_sum,
    theta_sum_with_condition,
)
from .series import (
    FormalSeries,
    QDEOperator,
    apply_operator,
    borel_minus_operator_image,
    qborel_minus,
    qborel_plus,
)
from .special import (
    SolutionAtInfinity,
    f_via_residues,
    g_borel_image,
    qairy_Ai,
    qairy_Ai_with_condition,
    qairy_operator,
    ramanujan_Aq,
    ramanujan_Aq_with_condition,
    ramanujan_operator,
    two_f_zero,
    two_f_zero_closed,
)
from .transforms import (
    contour_residue,
    covering_transform,
    qlaplace_minus,
    qlaplace_plus,
)
from .verify import (
    IDENTITY_IDS,
    IdentityCheck,
    IdentityReport,
    PointRecord,
    check,
    default_grid,
    default_suite,
    run_suite,
)

__version__ = "0.1.0"
