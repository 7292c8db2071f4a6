"""Steering: nudge f so that late reciprocal approximants hit a boundary target.

Given f with f(0) != 0, a nonvanishing polynomial target g on a finite
boundary set E, and eps, produce F close to f in norm together with an
order m whose approximant Q_m of 1/F lands within eps of g on E.  The
construction factors f into inner and outer parts, steers the zero-free
outer quotient h with the zero-free approximation pipeline toward 1/g on
E, and reattaches the inner factor.  The returned approximant is computed
from the zero-free part P alone; multiplying back the inner factor times
its normalizing scalar leaves the approximant unchanged, which is the
identity the tests check coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import blaschke_series, polynomial_inner_outer
from .boundary import BoundarySet
from .errors import (
    ApproximationBudgetError,
    InvalidInputError,
    InvalidParameterError,
)
from .opa import opa_solve
from .series import CoeffSeries, evaluate, multiply
from .spaces import AlphaWeight, norm_alpha
from .zerofree import _padded_sum, _space_alpha, simultaneous_zero_free

M_SEARCH_CAP = 16384
TOEPLITZ_PROBE_MIN = 512
DELTA_ROUNDS = 6
F_TRUNCATION = 512


@dataclass(frozen=True, eq=False)
class StructuredProduct:
    unimodular_scalar: complex
    inner_zeros: tuple
    P: CoeffSeries


@dataclass(frozen=True)
class AchievedErrors:
    norm_error: float
    boundary_error: float


@dataclass(frozen=True, eq=False)
class SteerResult:
    F_structured: StructuredProduct
    F_coeffs: CoeffSeries
    m: int
    Q_m: CoeffSeries
    achieved: AchievedErrors


def _reference_values(target, E: BoundarySet, zs: np.ndarray) -> np.ndarray:
    if isinstance(target, CoeffSeries):
        return np.asarray([evaluate(target, z) for z in zs])
    if isinstance(target, dict):
        out = np.empty(len(zs), dtype=np.complex128)
        keys = [(float(t), complex(v)) for t, v in target.items()]
        for i, p in enumerate(E.points):
            hit = [v for t, v in keys if abs((t - p + np.pi) % (2 * np.pi) - np.pi) < 1e-9]
            if len(hit) != 1:
                raise InvalidInputError("target must assign exactly one value per point of E")
            out[i] = hit[0]
        return out
    return np.asarray(target, dtype=np.complex128)


def opa_search_m(P: CoeffSeries, target, E: BoundarySet, tol: float, w: AlphaWeight) -> int:
    """Smallest probed m with sup over E of |Q_m - target| below tol.

    Doubling until the first success, then bisecting against the last
    failure; convergence of the probed sup is not assumed monotone, so the
    result is minimal only among probed orders.
    """
    if tol <= 0.0:
        raise InvalidParameterError("tol must be positive")
    if not E.points:
        raise InvalidInputError("m search needs a nonempty point set E")
    zs = np.exp(1j * np.asarray(E.points))
    refs = _reference_values(target, E, zs)

    def probe(m: int) -> bool:
        solver = "toeplitz" if w.alpha == 0.0 and m > TOEPLITZ_PROBE_MIN else "dense"
        Q = opa_solve(P, m, w, solver=solver).Q
        sup = float(np.max(np.abs(np.asarray([evaluate(Q, z) for z in zs]) - refs)))
        return sup < tol

    if probe(0):
        return 0
    lo, hi = 0, 1
    while not probe(hi):
        lo = hi
        hi *= 2
        if hi > M_SEARCH_CAP:
            raise ApproximationBudgetError(
                "approximant order search exceeded its cap",
                {"cap": M_SEARCH_CAP, "tol": tol},
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return hi


def steer(
    f: CoeffSeries,
    g: CoeffSeries,
    E: BoundarySet,
    eps: float,
    space: str = "hardy",
) -> SteerResult:
    """Produce F near f whose order-m reciprocal approximant tracks g on E.

    The pointwise tolerance passed to the zero-free stage starts at
    0.9*(eps/2)*min|1/g|^2, the linearization of |g - 1/P| <= eps/2 around
    P = 1/g, and halves until the measured sup on E is under eps/2.
    """
    w = _space_alpha(space)
    if eps <= 0.0:
        raise InvalidParameterError("eps must be positive")
    if E.positive_measure or not E.points:
        raise InvalidInputError("steering needs a finite nonempty point set E")
    for series, name in ((f, "f"), (g, "g")):
        if series.tail_bound != 0.0:
            raise InvalidInputError(name + " must be an exact polynomial")
        if not np.any(series.coeffs):
            raise InvalidInputError(name + " must not be the zero polynomial")
    if f.coeffs[0] == 0.0:
        raise InvalidInputError("f(0) must be nonzero; divide out the z-power first")
    zs = np.exp(1j * np.asarray(E.points))
    g_vals = np.asarray([evaluate(g, z) for z in zs])
    if np.min(np.abs(g_vals)) < 1e-14:
        raise InvalidInputError("g must be nonzero at every point of E")

    factorization = polynomial_inner_outer(f)
    inner_zeros = factorization.inner_zeros
    if inner_zeros and space == "dirichlet":
        raise InvalidParameterError(
            "dirichlet steering is only defined for f with no zeros in the disc"
        )
    if inner_zeros:
        blaschke_probe = blaschke_series(inner_zeros, 64)
        sigma = complex(np.conj(blaschke_probe.coeffs[0]))
    else:
        sigma = 1.0 + 0.0j
    h = (1.0 / sigma) * factorization.outer

    inv_g = 1.0 / g_vals
    eps_space = 0.9 * eps / max(abs(sigma), 1e-12)
    delta = 0.9 * (eps / 2.0) * float(np.min(np.abs(inv_g))) ** 2
    zf = None
    for _ in range(DELTA_ROUNDS):
        zf = simultaneous_zero_free(
            h, inv_g, E, eps_space, space, boundary_eps=delta
        )
        circle_gap_sup = float(
            np.max(np.abs(g_vals - 1.0 / np.asarray([evaluate(zf.P, z) for z in zs])))
        )
        if circle_gap_sup < eps / 2.0:
            break
        delta /= 2.0
    else:
        raise ApproximationBudgetError(
            "pointwise tolerance refinement failed to bring 1/P within eps/2 of g",
            {"last_sup": circle_gap_sup, "delta": delta},
        )
    P = zf.P

    inv_P = {float(t): 1.0 / evaluate(P, z) for t, z in zip(E.points, zs)}
    m = opa_search_m(P, inv_P, E, eps / 2.0, w)
    solver = "toeplitz" if w.alpha == 0.0 and m > TOEPLITZ_PROBE_MIN else "dense"
    Q_m = opa_solve(P, m, w, solver=solver).Q

    deg_P = len(P.coeffs) - 1
    if inner_zeros:
        n_trunc = max(F_TRUNCATION, deg_P + 128, m + 128)
        B = blaschke_series(inner_zeros, n_trunc)
        F_coeffs = sigma * multiply(B, P, max_degree=n_trunc)
    else:
        F_coeffs = CoeffSeries(P.coeffs, 0.0)

    norm_error = norm_alpha(_padded_sum(F_coeffs, -f), w) + F_coeffs.tail_bound
    boundary_error = float(
        np.max(np.abs(np.asarray([evaluate(Q_m, z) for z in zs]) - g_vals))
    )
    return SteerResult(
        StructuredProduct(sigma, inner_zeros, P),
        F_coeffs,
        m,
        Q_m,
        AchievedErrors(norm_error, boundary_error),
    )
