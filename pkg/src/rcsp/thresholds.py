"""Degree thresholds from the free-energy functional at the BP fixed point.

phi(d, x) evaluates the replica-symmetric free-energy expression; its value
at the solved fixed point, phi_star(d), changes sign once inside the
supported degree window, and d_star(k) is that zero.  d_first_moment(k) is
the first-moment degree where the expected solution count crosses 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bp import (
    BracketError,
    DegreeWindow,
    ModelParams,
    degree_window,
    solve_fixed_point,
)

__all__ = [
    "ThresholdReport",
    "phi",
    "phi_star",
    "d_star",
    "d_first_moment",
    "asymptotic_gap",
    "table_rows",
    "degree_window",
]

SCAN_STEPS = 1000


@dataclass(frozen=True)
class ThresholdReport:
    """d_star solve for one clause size.

    bracket is the final bisection interval (phi_star > 0 at the low end,
    < 0 at the high end).  sign_changes lists every grid interval of the
    downward scan where phi_star changed sign, as (d_low, d_high) pairs;
    a single entry is the expected situation and anything more is left
    visible as a diagnostic.
    """

    k: int
    d_star: float
    d_first_moment: float
    window: DegreeWindow
    tol: float
    ceil_d_star: int
    ceil_d1: int
    bracket: tuple[float, float]
    sign_changes: tuple[tuple[float, float], ...]


def phi(params: ModelParams, x) -> float:
    """Free-energy expression at message weight x.

    phi = -ln(1-x) - d(1 - 1/k - 1/d) ln(1 - 2 x^k) + (d-1) ln(1 - x^(k-1))

    Requires every log argument positive; x in [0, 1/2] always is.
    """
    k, d = params.k, params.d
    a1 = 1 - x
    a2 = 1 - 2 * x**k
    a3 = 1 - x ** (k - 1)
    if not (a1 > 0 and a2 > 0 and a3 > 0):
        raise ValueError(f"phi undefined at x={x}: a log argument is <= 0")
    return (
        -math.log(a1)
        - d * (1 - 1 / k - 1 / d) * math.log(a2)
        + (d - 1) * math.log(a3)
    )


def phi_star(params: ModelParams, tol: float = 1e-12, *, certify: bool = False) -> float:
    """phi evaluated at the solved BP fixed point.

    certify=False (the default) runs bare bisection, which dense degree
    scans rely on; certify=True keeps the uniqueness witness and the
    derivative grid of solve_fixed_point.
    """
    if certify:
        fp = solve_fixed_point(params, tol)
    else:
        fp = solve_fixed_point(params, tol, witness=False, derivative_grid=0)
    return phi(params, fp.x)


def d_first_moment(k: int) -> float:
    """Degree where the expected solution count crosses 1: k ln2 / -ln(1 - 2^(1-k))."""
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    return k * math.log(2) / (-math.log1p(-(2.0 ** (1 - k))))


def d_star(k: int, tol: float = 1e-9) -> ThresholdReport:
    """Largest zero of phi_star inside the degree window for clause size k.

    Scans SCAN_STEPS degrees downward from the window's upper end, records
    every sign change of phi_star, brackets the first one encountered
    (negative above, positive below), and bisects it to tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    window = degree_window(k)
    lo, hi = window.d_lbd, window.d_ubd
    step = (hi - lo) / SCAN_STEPS

    def f(d: float) -> float:
        return phi_star(ModelParams(k, d))

    ds = [hi - i * step for i in range(SCAN_STEPS + 1)]
    vals = [f(d) for d in ds]
    if not vals[0] < 0:
        raise BracketError(f"phi_star({hi}) = {vals[0]:.3e}; expected < 0 for k={k}")
    if not vals[-1] > 0:
        raise BracketError(f"phi_star({lo}) = {vals[-1]:.3e}; expected > 0 for k={k}")

    sign_changes = []
    for i in range(SCAN_STEPS):
        if vals[i] < 0 <= vals[i + 1] or vals[i] >= 0 > vals[i + 1]:
            sign_changes.append((ds[i + 1], ds[i]))

    d_neg, d_pos = sign_changes[0][1], sign_changes[0][0]
    while d_neg - d_pos > tol:
        mid = 0.5 * (d_pos + d_neg)
        if f(mid) > 0:
            d_pos = mid
        else:
            d_neg = mid
    root = 0.5 * (d_pos + d_neg)

    d1 = d_first_moment(k)
    return ThresholdReport(
        k=k,
        d_star=root,
        d_first_moment=d1,
        window=window,
        tol=tol,
        ceil_d_star=math.ceil(root),
        ceil_d1=math.ceil(d1),
        bracket=(d_pos, d_neg),
        sign_changes=tuple(sign_changes),
    )


def asymptotic_gap(k: int, tol: float = 1e-9) -> float:
    """d_star(k)/k minus the large-k prediction (2^(k-1) - 1/2 - 1/(4 ln2)) ln2."""
    pred = (2 ** (k - 1) - 0.5 - 1 / (4 * math.log(2))) * math.log(2)
    return d_star(k, tol).d_star / k - pred


def table_rows(k_min: int = 3, k_max: int = 15, tol: float = 1e-9) -> list[ThresholdReport]:
    """ThresholdReport for each k in [k_min, k_max]."""
    if k_min < 3 or k_max < k_min:
        raise ValueError("need 3 <= k_min <= k_max")
    return [d_star(k, tol) for k in range(k_min, k_max + 1)]
