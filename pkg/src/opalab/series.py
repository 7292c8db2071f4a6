"""Truncated complex power series and polynomial arithmetic on the unit disc.

The central value type is :class:`CoeffSeries`, an immutable vector of Taylor
coefficients a_0..a_N together with a certified bound on the H^2 mass of
whatever was discarded past the truncation degree.  Exact polynomials carry
``tail_bound = 0``.  Arithmetic lives in module-level functions so the value
type stays dumb and hashable-by-identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

DEFAULT_PRODUCT_DEGREE = 256

WINDING_GRID_LOG2 = 14
WINDING_GRID_CAP_LOG2 = 20


def _as_coeff_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    arr = np.atleast_1d(arr)
    if arr.ndim != 1:
        raise InvalidInputError("coefficients must form a one-dimensional vector")
    if arr.size == 0:
        raise InvalidInputError("coefficient vector must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("coefficients must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """Taylor coefficients plus a certified H^2 bound on the discarded tail.

    Attributes
    ----------
    coeffs:
        Complex vector; index k holds the coefficient of z**k.
    tail_bound:
        Nonnegative real.  Zero marks an exact polynomial; a positive value
        upper-bounds the H^2 norm of everything past the stored range.
    """

    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        arr = _as_coeff_array(self.coeffs)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        tb = float(self.tail_bound)
        if not np.isfinite(tb) or tb < 0.0:
            raise InvalidParameterError("tail_bound must be finite and nonnegative")
        object.__setattr__(self, "tail_bound", tb)

    @property
    def truncation_degree(self) -> int:
        return len(self.coeffs) - 1

    def is_exact_polynomial(self) -> bool:
        return self.tail_bound == 0.0

    def h2_norm(self) -> float:
        """l2 norm of the stored coefficients; the tail is not included."""
        return float(np.linalg.norm(self.coeffs))

    def pad(self, degree: int) -> "CoeffSeries":
        """Extend with zero coefficients up to ``degree`` (no-op if shorter)."""
        if degree <= self.truncation_degree:
            return self
        out = np.zeros(degree + 1, dtype=np.complex128)
        out[: len(self.coeffs)] = self.coeffs
        return CoeffSeries(out, self.tail_bound)

    def truncate(self, degree: int) -> "CoeffSeries":
        """Drop coefficients beyond ``degree``; their mass moves into the tail bound."""
        if degree < 0:
            raise InvalidParameterError("degree must be nonnegative")
        if degree >= self.truncation_degree:
            return self
        dropped = float(np.linalg.norm(self.coeffs[degree + 1 :]))
        return CoeffSeries(self.coeffs[: degree + 1], self.tail_bound + dropped)

    def __add__(self, other: "CoeffSeries") -> "CoeffSeries":
        if not isinstance(other, CoeffSeries):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n, dtype=np.complex128)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return CoeffSeries(out, self.tail_bound + other.tail_bound)

    def __sub__(self, other: "CoeffSeries") -> "CoeffSeries":
        if not isinstance(other, CoeffSeries):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "CoeffSeries":
        return CoeffSeries(-self.coeffs, self.tail_bound)

    def __mul__(self, scalar) -> "CoeffSeries":
        if isinstance(scalar, CoeffSeries):
            raise TypeError("use multiply() for series products")
        c = complex(scalar)
        return CoeffSeries(self.coeffs * c, self.tail_bound * abs(c))

    __rmul__ = __mul__


@dataclass(frozen=True)
class ZeroFreeReport:
    """Outcome of the argument-principle certificate on the closed disc.

    ``indeterminate`` marks the case where the Lipschitz margin never
    resolved at the grid cap; it is distinct from a certified ``False``.
    """

    zero_free: bool
    winding_number: int
    min_modulus_on_circle: float
    grid_size: int
    indeterminate: bool = False


def multiply(a: CoeffSeries, b: CoeffSeries, max_degree: int | None = None) -> CoeffSeries:
    """Cauchy product, truncated at ``max_degree``.

    The default policy degree is min(deg a + deg b, DEFAULT_PRODUCT_DEGREE).
    Tail bounds propagate as ||a|| tail(b) + ||b|| tail(a) + tail(a) tail(b)
    in H^2 norms, plus the l2 mass of any truncated product coefficients.
    """
    full = np.convolve(a.coeffs, b.coeffs)
    if max_degree is None:
        max_degree = min(len(full) - 1, DEFAULT_PRODUCT_DEGREE)
    if max_degree < 0:
        raise InvalidParameterError("max_degree must be nonnegative")
    tail = (
        a.h2_norm() * b.tail_bound
        + b.h2_norm() * a.tail_bound
        + a.tail_bound * b.tail_bound
    )
    if len(full) - 1 > max_degree:
        tail += float(np.linalg.norm(full[max_degree + 1 :]))
        full = full[: max_degree + 1]
    return CoeffSeries(full, tail)


def exp_series(a: CoeffSeries, N: int | None = None) -> CoeffSeries:
    """Taylor coefficients of exp(a), truncated at degree ``N``.

    Uses the derivative recurrence n b_n = sum_{k=1..n} k a_k b_{n-k} with
    b_0 = exp(a_0).  ``N`` defaults to the truncation degree of ``a``; pad
    the input first when more output terms are wanted.  The result is
    returned as a plain polynomial: only the stored coefficients of ``a``
    enter, and no tail bound is claimed for the discarded remainder of the
    exponential (downstream users certify their objects on grids).
    """
    if N is None:
        N = a.truncation_degree
    if N < 0:
        raise InvalidParameterError("N must be nonnegative")
    c = a.coeffs
    b = np.zeros(N + 1, dtype=np.complex128)
    b[0] = np.exp(c[0])
    if N == 0:
        return CoeffSeries(b, 0.0)
    ka = np.arange(len(c)) * c
    for n in range(1, N + 1):
        m = min(n, len(c) - 1)
        if m >= 1:
            b[n] = np.dot(ka[1 : m + 1], b[n - 1 : n - m - 1 : -1] if n - m - 1 >= 0 else b[n - 1 :: -1]) / n
    return CoeffSeries(b, 0.0)


def evaluate(a: CoeffSeries, z):
    """Horner evaluation of the stored polynomial part at ``z``.

    ``z`` may be a scalar or an ndarray; the tail bound controls the
    committed error only on the closed unit disc.
    """
    zz = np.asarray(z, dtype=np.complex128)
    scalar = zz.ndim == 0
    acc = np.full(zz.shape, a.coeffs[-1], dtype=np.complex128)
    for c in a.coeffs[-2::-1]:
        acc = acc * zz + c
    if scalar:
        return complex(acc)
    return acc


def dilate(a: CoeffSeries, r: float) -> CoeffSeries:
    """Replace a(z) by a(r z) for 0 < r <= 1."""
    r = float(r)
    if not (0.0 < r <= 1.0):
        raise InvalidParameterError("dilation radius must lie in (0, 1]")
    if r == 1.0:
        return a
    powers = np.power(r, np.arange(len(a.coeffs)))
    return CoeffSeries(a.coeffs * powers, a.tail_bound * r ** (a.truncation_degree + 1))


def eval_on_circle_grid(a: CoeffSeries, grid_log2: int) -> np.ndarray:
    """Values of the stored polynomial at the G = 2**grid_log2 roots of unity.

    Exact up to rounding even when the degree exceeds G, because the
    coefficients are folded mod G before the transform (z**G = 1 there).
    """
    G = 1 << grid_log2
    c = a.coeffs
    folded = np.zeros(G, dtype=np.complex128)
    for start in range(0, len(c), G):
        chunk = c[start : start + G]
        folded[: len(chunk)] += chunk
    return np.fft.ifft(folded) * G


def _discrete_winding(vals: np.ndarray) -> int:
    nz = vals[vals != 0]
    if len(nz) < 2:
        return 0
    total = float(np.sum(np.angle(np.roll(nz, -1) / nz)))
    return int(round(total / (2.0 * np.pi)))


def zero_free_on_closed_disc(
    p: CoeffSeries,
    grid_log2: int = WINDING_GRID_LOG2,
    cap_log2: int = WINDING_GRID_CAP_LOG2,
) -> ZeroFreeReport:
    """Certify that an exact polynomial has no zeros in the closed unit disc.

    The certificate combines the argument winding along the circle with a
    Lipschitz margin: with L = sum k |p_k| and grid spacing dtheta, a
    minimum sampled modulus above L * dtheta rules out circle zeros, and
    winding 0 then rules out interior zeros by the argument principle.
    The grid doubles from 2**grid_log2 until the margin resolves or the
    cap is hit, in which case the report is marked indeterminate.
    """
    if not p.is_exact_polynomial():
        raise InvalidInputError("zero-freeness certification needs an exact polynomial")
    c = p.coeffs
    if not np.any(c):
        raise InvalidInputError("the zero polynomial has no zero-free certificate")
    L = float(np.sum(np.arange(len(c)) * np.abs(c)))
    q = max(grid_log2, int(4 * len(c) - 1).bit_length())
    cap = max(cap_log2, q)
    while True:
        G = 1 << q
        vals = eval_on_circle_grid(p, q)
        mods = np.abs(vals)
        m = float(mods.min())
        dtheta = 2.0 * np.pi / G
        if m == 0.0:
            return ZeroFreeReport(False, _discrete_winding(vals), 0.0, G, False)
        if m > L * dtheta:
            w = _discrete_winding(vals)
            return ZeroFreeReport(w == 0, w, m, G, False)
        if q >= cap:
            return ZeroFreeReport(False, _discrete_winding(vals), m, G, True)
        q += 1
