"""The chaotic maps used by the cipher and their integer quantizers.

Everything here is scalar binary64 arithmetic; orbits are inherently
sequential so there is nothing to vectorize.
"""

from __future__ import annotations

import math

from chaoscpa.errors import InvalidParameterError

R_MIN = 3.5699  # exclusive
R_MAX = 4.0


def check_mu(mu: float) -> None:
    # mu = 0 or 1 divides by zero in one branch
    if not 0.0 < mu < 1.0:
        raise InvalidParameterError(f"Baker parameter mu must lie in (0, 1), got {mu}")


def baker_step(x: float, y: float, mu: float) -> tuple[float, float]:
    """One Baker map step. ``x = 0`` is sent through the first branch."""
    check_mu(mu)
    if x <= mu:
        return x / mu, mu * y
    mu_star = 1.0 - mu
    return (x - mu) / mu_star, mu_star * y + mu


def baker_iterate(x0: float, y0: float, mu: float, n: int) -> tuple[float, float]:
    check_mu(mu)
    if n < 1:
        raise InvalidParameterError(f"iteration count must be >= 1, got {n}")
    x, y = x0, y0
    mu_star = 1.0 - mu
    for _ in range(n):
        if x <= mu:
            x, y = x / mu, mu * y
        else:
            x, y = (x - mu) / mu_star, mu_star * y + mu
    return x, y


def arnold_map(i: int, j: int, a: int, b: int, n: int) -> tuple[int, int]:
    """Cat-map position of pixel ``(i, j)``: ``[[1, b], [a, ab+1]] @ (i, j) mod n``."""
    return (i + b * j) % n, (a * i + (a * b + 1) * j) % n


def logistic_real_step(x: float, r: float) -> float:
    return r * x * (1.0 - x)


def logistic_int_step(x: float) -> float:
    """Logistic map rescaled to the interval [0, 256]."""
    return 4.0 * x * (256.0 - x) / 256.0


def quantize_h1(x: float) -> int:
    return math.floor(x * 10**6) % 256


def quantize_h2(x: float) -> int:
    return math.floor(x * 10**5) % 256
