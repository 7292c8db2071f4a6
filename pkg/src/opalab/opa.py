"""Least-squares polynomial approximants of reciprocals on the disc.

For a coefficient series f and order n, the degree-n polynomial Q
minimizing ||Q f - 1|| in the alpha-weighted norm solves a Hermitian
positive-definite Gram system.  This module assembles that system, solves
it (dense Cholesky by default, a Toeplitz fast path at alpha = 0), and
reports convergence diagnostics on the circle and inside the disc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import IllConditionedError, InvalidInputError, InvalidParameterError
from .series import CoeffSeries, evaluate, multiply
from .spaces import AlphaWeight, inner_product_alpha, norm_alpha

GRAM_TAIL_MARGIN = 128
PIVOT_RTOL = 1e-13
COND_DENSE_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Normal equations of the reciprocal least-squares problem.

    M[j, k] = <z^j f, z^k f> in the alpha weight; C = (conj(f(0)), 0, ..., 0).
    The row vector A of approximant coefficients solves A M = C.
    """

    M: np.ndarray
    C: np.ndarray
    n: int
    alpha: AlphaWeight
    entry_error_bound: float


@dataclass(frozen=True, eq=False)
class OpaResult:
    Q: CoeffSeries
    residual: float
    condition_estimate: float
    n: int


def _validate_f(f: CoeffSeries, n: int) -> None:
    if n < 0:
        raise InvalidParameterError("order n must be nonnegative")
    if not np.any(f.coeffs):
        raise InvalidInputError("f must not be identically zero")
    if f.tail_bound > 0.0 and f.truncation_degree < n + GRAM_TAIL_MARGIN:
        raise InvalidParameterError(
            "truncated f needs truncation_degree >= n + %d for a reliable Gram system"
            % GRAM_TAIL_MARGIN
        )


def _autocorrelation(c: np.ndarray, n: int) -> np.ndarray:
    """r_d = sum_t c_{t+d} conj(c_t) for d = 0..n (zero past the degree)."""
    r = np.zeros(n + 1, dtype=np.complex128)
    top = min(n, len(c) - 1)
    for d in range(top + 1):
        m = len(c) - d
        r[d] = np.vdot(c[:m], c[d:])
    return r


def gram_matrix(f: CoeffSeries, n: int, w: AlphaWeight) -> GramSystem:
    """Assemble the (n+1) x (n+1) Gram system for f in the given weight."""
    _validate_f(f, n)
    c = f.coeffs
    size = n + 1
    M = np.zeros((size, size), dtype=np.complex128)

    if w.alpha == 0.0:
        r = _autocorrelation(c, n)
        M = scipy.linalg.toeplitz(np.conj(r), r)
    elif w.alpha == 1.0:
        # (t + k + 1) = (t + 1) + k splits each entry into two correlations.
        r = _autocorrelation(c, n)
        a = np.zeros(n + 1, dtype=np.complex128)
        top = min(n, len(c) - 1)
        for d in range(top + 1):
            m = len(c) - d
            a[d] = np.vdot(np.arange(1, m + 1) * c[:m], c[d:])
        for j in range(size):
            for k in range(j, size):
                M[j, k] = a[k - j] + k * r[k - j]
                M[k, j] = np.conj(M[j, k])
    else:
        for d in range(size):
            m = len(c) - d
            if m <= 0:
                continue
            x = c[d:] * np.conj(c[: len(c) - d])
            js = np.arange(size - d)
            weights = (np.arange(m)[None, :] + (js + d + 1)[:, None]) ** w.alpha
            vals = weights @ x
            for j in range(size - d):
                M[j, j + d] = vals[j]
                M[j + d, j] = np.conj(vals[j])

    C = np.zeros(size, dtype=np.complex128)
    C[0] = np.conj(c[0])

    tails = 2.0 * f.h2_norm() * f.tail_bound + f.tail_bound**2
    if w.alpha > 0.0 and tails > 0.0:
        tails *= float((f.truncation_degree + n + 2) ** (w.alpha / 2.0))
    return GramSystem(M, C, n, w, tails)


def _condition_estimate(M: np.ndarray, pivots2: np.ndarray | None = None) -> float:
    if len(M) <= COND_DENSE_LIMIT:
        try:
            return float(np.linalg.cond(M))
        except np.linalg.LinAlgError:
            return float("inf")
    if pivots2 is not None and pivots2.min() > 0.0:
        return float(pivots2.max() / pivots2.min())
    return float("inf")


def _cholesky_solve(gram: GramSystem, rhs: np.ndarray):
    M = gram.M
    try:
        low = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise IllConditionedError(
            "Gram matrix is not numerically positive definite",
            condition_estimate=_condition_estimate(M),
            diagnostics={"n": gram.n, "alpha": gram.alpha.alpha},
        )
    pivots2 = np.diag(low).real ** 2
    trace = float(np.trace(M).real)
    if pivots2.min() < PIVOT_RTOL * trace:
        raise IllConditionedError(
            "Gram pivot below the conditioning threshold",
            condition_estimate=_condition_estimate(M, pivots2),
            diagnostics={"n": gram.n, "pivot_ratio": float(pivots2.min() / max(trace, 1e-300))},
        )
    x = scipy.linalg.cho_solve((low, True), rhs)
    return x, _condition_estimate(M, pivots2)


def opa_solve(f: CoeffSeries, n: int, w: AlphaWeight, solver: str = "dense") -> OpaResult:
    """Solve for the order-n reciprocal approximant of f.

    ``solver`` is "dense" (authoritative Cholesky path) or "toeplitz", a
    Levinson-style fast path valid only at alpha = 0; the fast path skips
    the conditioning check and reports condition_estimate = nan.
    The residual ||Q f - 1|| is measured directly from the product and is
    cross-checkable against the projection identity 1 - Re(a_0 f(0)).
    """
    gram = gram_matrix(f, n, w)
    rhs = np.conj(gram.C)
    if solver == "toeplitz":
        if w.alpha != 0.0:
            raise InvalidParameterError("the Toeplitz fast path requires alpha = 0")
        x = scipy.linalg.solve_toeplitz((gram.M[:, 0], gram.M[0, :]), rhs)
        cond = float("nan")
    elif solver == "dense":
        x, cond = _cholesky_solve(gram, rhs)
    else:
        raise InvalidParameterError("unknown solver %r" % solver)
    coeffs = np.conj(x)
    Q = CoeffSeries(coeffs, 0.0)
    prod = multiply(Q, f, max_degree=n + f.truncation_degree)
    diff = prod - CoeffSeries([1.0])
    residual = norm_alpha(diff, w)
    return OpaResult(Q, residual, cond, n)


def residual_projection(result: OpaResult, f: CoeffSeries) -> float:
    """Residual via the projection identity sqrt(1 - Re(a_0 f(0)))."""
    val = 1.0 - (result.Q.coeffs[0] * f.coeffs[0]).real
    return float(np.sqrt(min(max(val, 0.0), 1.0)))


def convergence_profile(
    f: CoeffSeries,
    n_max: int,
    w: AlphaWeight,
    probes,
    disc_probes,
) -> list:
    """Residual and pointwise reciprocal errors for each order up to n_max.

    ``probes`` is a BoundarySet sampled on the circle; ``disc_probes`` is a
    list of interior points.  Returns one dict per order with keys
    n, residual, sup_circle, max_interior (CSV-ready).  Probe points where
    f vanishes produce inf entries rather than errors.
    """
    if n_max < 0:
        raise InvalidParameterError("n_max must be nonnegative")
    circle_z = np.exp(1j * probes.samples())
    f_circle = evaluate(f, circle_z)
    disc_z = np.asarray(list(disc_probes), dtype=np.complex128)
    f_disc = evaluate(f, disc_z) if disc_z.size else disc_z

    with np.errstate(divide="ignore", invalid="ignore"):
        inv_circle = np.where(np.abs(f_circle) > 0, 1.0 / f_circle, np.inf)
        inv_disc = np.where(np.abs(f_disc) > 0, 1.0 / f_disc, np.inf) if disc_z.size else f_disc

    rows = []
    for n in range(n_max + 1):
        res = opa_solve(f, n, w)
        qc = evaluate(res.Q, circle_z)
        sup_circle = float(np.max(np.abs(qc - inv_circle)))
        if disc_z.size:
            qd = evaluate(res.Q, disc_z)
            max_interior = float(np.max(np.abs(qd - inv_disc)))
        else:
            max_interior = 0.0
        rows.append(
            {
                "n": n,
                "residual": res.residual,
                "sup_circle": sup_circle,
                "max_interior": max_interior,
            }
        )
    return rows
