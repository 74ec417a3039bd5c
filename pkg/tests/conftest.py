import random

import pytest

from qconnect import FormalSeries, QModulus, as_modulus


def rel_err(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def random_series(base: QModulus, order: int, seed: int) -> FormalSeries:
    rng = random.Random(seed)
    return FormalSeries(
        base,
        tuple(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(order + 1)),
    )


def ramanujan_coeffs(qm: QModulus, order: int) -> tuple[complex, ...]:
    """Maclaurin coefficients of A_q: c_n = q^(n^2) (-1)^n / (q;q)_n."""
    q = qm.q
    out = []
    poch = 1 + 0j
    for n in range(order + 1):
        out.append(q ** (n * n) * (-1) ** n / poch)
        poch *= 1 - q ** (n + 1)
    return tuple(out)


@pytest.fixture(params=[0.3, 0.5, 0.8], ids=lambda q: f"q={q}")
def qmod(request) -> QModulus:
    return as_modulus(request.param)
