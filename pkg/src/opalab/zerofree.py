"""Simultaneous zero-free approximation: match g in norm and targets on E.

Given a zero-free g, boundary targets on a finite set E, and a budget eps,
the pipeline produces an exact polynomial P, certified zero-free on the
closed disc, with ||P - g|| < eps in the chosen space and |P - target| < eps
at every point of E.  The multiplier is Phi = exp(F) where F collects one
analytic needle per point, each with damped boundary peak exactly 1, so
P = g_r * Phi hits target_j = g_r(zeta_j) * exp(v_j) while moving g_r very
little in norm.

Each needle is fitted, not fixed.  Closed-form profiles (Gaussian, tent,
Poisson, outer-kernel quotients) all waste norm through the same channel:
the harmonic conjugate of whatever carries the phase spills order-one values
onto the shoulders, the conjugate of the modulus profile tilts the phase,
and under exp these couplings stack multiplicatively in the same angular
zone.  Tight budgets need the log-modulus and phase boundary profiles tuned
jointly, so each needle starts from a tent/Gaussian guess on a graded node
ladder and is refined by a quasi-Newton pass on the actual mismatch energy
weight * |exp(F) - 1|^2, with the analytic completion and the band limit
inside the objective: the fit sees exactly the polynomial that ships, fine
structure the degree cannot resolve buys nothing.  Two penalties keep the
fit honest: a floor on Re F (a needle that digs |Phi| toward zero would
leave the winding certificate no margin) and the point condition F = v at
the needle's center, enforced exactly afterwards by rescaling.  The band
limit stays at half the multiplier degree so exp has spectral headroom;
truncation is the only step that can create disc zeros, so the final
polynomial is always pushed through the certificate and retried on failure.

phi_builder follows the peak-function composition contract directly (peak
functions per piece at tolerance 1/level); the pipeline instead uses the
raw needles, because composed peak functions either need degrees far above
the certificate's resolving power or carry peak-amplified mass that breaks
the norm budget at the capped degree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .boundary import (
    BoundarySet,
    PiecewisePartition,
    circle_gap,
    piecewise_partition,
)
from .errors import (
    ApproximationBudgetError,
    InvalidInputError,
    InvalidParameterError,
)
from .rudin import dirichlet_rudin, hardy_rudin
from .series import (
    CoeffSeries,
    ZeroFreeReport,
    dilate,
    eval_on_circle_grid,
    evaluate,
    exp_series,
    multiply,
    zero_free_on_closed_disc,
)
from .spaces import AlphaWeight, norm_alpha

LEVEL_CAP = 512
DEGREE_CAP = 8192
LEVEL_START = 8
DEGREE_START = 128
DILATION_SCHEDULE = tuple(1.0 - 10.0 ** (-k) for k in range(1, 8))
PHI_PEAK_DEFAULT = 12.0
EXP_SERIES_LIMIT = 2048
TRIVIAL_RATIO_TOL = 1e-12
NEEDLE_GRID_LOG2 = 14
NODE_LADDER = (0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48)
LADDER_SCALE = 8.0
BAND_DAMP = 3.2
RE_FLOOR = 1.25
FLOOR_PENALTY = 500.0
POINT_PENALTY = 1.0
NEEDLE_MAXITER = 300
POLISH_ROUNDS = 8

_G = 1 << NEEDLE_GRID_LOG2
_ANG = 2.0 * np.pi * np.arange(_G) / _G
_KF = np.fft.fftfreq(_G, d=1.0 / _G)


@dataclass(frozen=True)
class ZeroFreeTrace:
    dilation: float
    level: int
    degree: int


@dataclass(frozen=True, eq=False)
class ZeroFreeApproxResult:
    P: CoeffSeries
    report: ZeroFreeReport
    space_error: float
    boundary_error: float
    trace: ZeroFreeTrace


def _space_alpha(space: str) -> AlphaWeight:
    if space == "hardy":
        return AlphaWeight(0.0)
    if space == "dirichlet":
        return AlphaWeight(1.0)
    raise InvalidParameterError("space must be 'hardy' or 'dirichlet'")


def _grid_exp_pos(F: CoeffSeries, n_out: int) -> CoeffSeries:
    """exp(F) truncated at n_out via a circle grid large enough to resolve it."""
    q = max(14, int(2 * n_out + 2).bit_length())
    G = 1 << q
    vals = np.exp(eval_on_circle_grid(F, q))
    spec = np.fft.fft(vals) / G
    tail = float(np.linalg.norm(spec[n_out + 1 : G // 2])) if n_out + 1 < G // 2 else 0.0
    return CoeffSeries(spec[: n_out + 1], tail)


def phi_builder(partition: PiecewisePartition, space: str, level: int) -> CoeffSeries:
    """Boundary-value multiplier exp(sum v_j h_j) from per-piece peak functions.

    Each piece gets a certified peak function at tolerance 1/level on a
    1/level-neighborhood of its points; pieces whose neighborhoods overlap
    at this level are rejected.  The uniform bound exp(2m max|v_j|) holds
    because every |h_j| is at most 2.
    """
    _space_alpha(space)
    if level < 2:
        raise InvalidParameterError("level must be at least 2")
    width = 1.0 / level
    points = [(p, v) for piece, v in partition.pieces for p in piece.points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if circle_gap(points[i][0], points[j][0]) <= 2.0 * width:
                raise InvalidParameterError(
                    "1/level neighborhoods overlap; raise the level past %d" % level
                )
    total = None
    for piece, v in partition.pieces:
        if abs(v) <= TRIVIAL_RATIO_TOL:
            continue
        U = BoundarySet(arcs=tuple((p, width) for p in piece.points))
        if space == "hardy":
            rf = hardy_rudin(piece, U, eps=width, peak=PHI_PEAK_DEFAULT)
        else:
            rf = dirichlet_rudin(piece, U, eps=width)
        term = v * rf.h
        total = term if total is None else _padded_sum(total, term)
    if total is None:
        return CoeffSeries([1.0])
    deg = len(total.coeffs) - 1
    if deg <= EXP_SERIES_LIMIT:
        return exp_series(total, max(512, 2 * deg))
    return _grid_exp_pos(total, deg)


def _padded_sum(a: CoeffSeries, b: CoeffSeries) -> CoeffSeries:
    n = max(len(a.coeffs), len(b.coeffs))
    return a.pad(n - 1) + b.pad(n - 1)


def _analytic_mask(band: int) -> np.ndarray:
    """Fourier multiplier taking a complex boundary profile u + i*psi to the
    boundary values of its band-limited analytic completion.

    Positive frequencies are doubled (completion of a real profile is
    coefficient-doubling), negatives dropped, and everything rides a Gaussian
    roll-off that is negligible at the band edge, so hard truncation at the
    band adds no ringing.
    """
    keep = (_KF >= 1) & (_KF <= band)
    am = np.zeros(_G, dtype=np.complex128)
    am[keep] = 2.0 * np.exp(-((BAND_DAMP * _KF[keep] / band) ** 2))
    am[0] = 1.0
    return am


def _hat_basis(theta: float, base_width: float) -> np.ndarray:
    """Piecewise-linear hats on a graded node ladder around theta.

    Nodes cluster at the needle center (spacing base_width / LADDER_SCALE)
    and stretch to 6 base widths, so one ladder resolves both a narrow peak
    and its wide shoulders; profiles are even in the local angle.
    """
    t = np.abs(np.angle(np.exp(1j * (_ANG - theta))))
    nodes = np.asarray(NODE_LADDER, dtype=float) * (base_width / LADDER_SCALE)
    hats = np.zeros((len(nodes), _G))
    for p in range(len(nodes)):
        if p > 0:
            lo = nodes[p - 1]
            m = (t >= lo) & (t <= nodes[p])
            hats[p][m] = (t[m] - lo) / (nodes[p] - lo)
        else:
            m = t <= nodes[1]
            hats[p][m] = (nodes[1] - t[m]) / nodes[1]
        if 0 < p < len(nodes) - 1:
            hi = nodes[p + 1]
            m = (t > nodes[p]) & (t <= hi)
            hats[p][m] = (hi - t[m]) / (hi - nodes[p])
    return hats


def _refined_needle(
    theta: float, v: complex, base_width: float, w2: np.ndarray, band: int
) -> np.ndarray:
    """Coefficients of one needle F with F(e^{i theta}) = v exactly.

    Minimizes mean(w2 |exp(F)-1|^2) over nodal phase/log-modulus profiles,
    plus a stiff penalty under Re F = -RE_FLOOR (certificate margin) and a
    soft anchor on the point value (kept exact by the final rescale; the
    anchor only stops the fit from trading the point for energy).  Gradients
    are exact: the completion, band limit and Hilbert transform are Fourier
    multipliers, so the adjoint is one more FFT sandwich.
    """
    hats = _hat_basis(theta, base_width)
    nn = len(hats)
    am = _analytic_mask(band)
    point_row = (np.fft.fft(hats, axis=1) * am) @ np.exp(1j * np.arange(_G) * theta) / _G

    def cost_grad(p: np.ndarray):
        prof = p[nn:] @ hats + 1j * (p[:nn] @ hats)
        F = np.fft.ifft(np.fft.fft(prof) * am)
        B = np.exp(F.real + 1j * F.imag)
        D = B - 1.0
        viol = np.maximum(0.0, -F.real - RE_FLOOR)
        dv = complex((p[nn:] + 1j * p[:nn]) @ point_row) - v
        E = (
            float(np.mean(w2 * np.abs(D) ** 2))
            + FLOOR_PENALTY * float(np.mean(viol**2))
            + POINT_PENALTY * abs(dv) ** 2
        )
        gr_re = (2.0 * w2 * np.real(np.conj(D) * B) - 2.0 * FLOOR_PENALTY * viol) / _G
        gr_im = -2.0 * w2 * np.imag(np.conj(D) * B) / _G
        pull = np.fft.ifft(np.fft.fft(gr_re + 1j * gr_im) * np.conj(am))
        gpsi = hats @ pull.imag + 2.0 * POINT_PENALTY * np.real(np.conj(dv) * 1j * point_row)
        gu = hats @ pull.real + 2.0 * POINT_PENALTY * np.real(np.conj(dv) * point_row)
        return E, np.concatenate([gpsi, gu])

    nodes = np.asarray(NODE_LADDER, dtype=float) * (base_width / LADDER_SCALE)
    start = np.concatenate([
        v.imag * np.maximum(0.0, 1.0 - nodes / base_width),
        v.real * np.exp(-((nodes / (base_width / 3.0)) ** 2)),
    ])
    fit = minimize(
        cost_grad,
        start,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": NEEDLE_MAXITER, "ftol": 1e-15, "gtol": 1e-13},
    )
    p = fit.x
    prof = p[nn:] @ hats + 1j * (p[:nn] @ hats)
    spec = np.fft.fft(prof) / _G
    c = np.zeros(band + 1, dtype=np.complex128)
    c[0] = spec[0]
    c[1:] = 2.0 * spec[1 : band + 1]
    c *= np.exp(-((BAND_DAMP * np.arange(band + 1) / band) ** 2))
    val = complex(np.polyval(c[::-1], np.exp(1j * theta)))
    return c * (v / val)


def _normalize_targets(target, E: BoundarySet) -> np.ndarray:
    if not E.points or E.positive_measure:
        raise InvalidInputError(
            "zero-free approximation needs a finite nonempty point set E"
        )
    pts = np.asarray(E.points)
    if isinstance(target, dict):
        out = np.empty(len(pts), dtype=np.complex128)
        keys = [(float(t), complex(v)) for t, v in target.items()]
        for i, p in enumerate(pts):
            hit = [v for t, v in keys if abs((t - p + np.pi) % (2 * np.pi) - np.pi) < 1e-9]
            if len(hit) != 1:
                raise InvalidInputError("target must assign exactly one value per point of E")
            out[i] = hit[0]
    else:
        out = np.asarray(target, dtype=np.complex128)
        if out.shape != pts.shape:
            raise InvalidInputError("target values must align with the points of E")
    if np.any(np.abs(out) == 0.0):
        raise InvalidInputError("targets must be nonzero everywhere on E")
    return out


def _select_dilation(g: CoeffSeries, eps: float, w: AlphaWeight):
    for r in DILATION_SCHEDULE:
        g_r = dilate(g, r)
        if norm_alpha(_padded_sum(g_r, -g), w) >= eps / 4.0:
            continue
        report = zero_free_on_closed_disc(g_r)
        if report.zero_free and not report.indeterminate:
            return r, g_r
    raise ApproximationBudgetError(
        "no dilation radius gives a certified zero-free g_r within eps/4",
        {"schedule": DILATION_SCHEDULE},
    )


def _dirichlet_point_bound_abort(g, targets, zs, eps, gate, g_degree):
    """Abort early when the Dirichlet norm budget provably cannot reach a target.

    Point evaluations are controlled by |u(z)| <= ||u||_D * sqrt(sum 1/(k+1))
    over the representable degrees, so a target too far from g at a point of
    E is out of reach at any degree the budget allows.
    """
    max_deg = DEGREE_CAP + g_degree
    const = float(np.sqrt(np.sum(1.0 / np.arange(1.0, max_deg + 2.0))))
    reachable = eps * const + gate
    deviation = float(np.max(np.abs(targets - np.asarray([evaluate(g, z) for z in zs]))))
    if deviation > reachable:
        raise ApproximationBudgetError(
            "Dirichlet norm budget cannot move g far enough at a point of E",
            {
                "required_boundary_deviation": deviation,
                "coefficient_budget": eps * const,
                "point_bound_constant": const,
                "max_degree": max_deg,
            },
        )


def simultaneous_zero_free(
    g: CoeffSeries,
    target,
    E: BoundarySet,
    eps: float,
    space: str = "hardy",
    boundary_eps: float | None = None,
) -> ZeroFreeApproxResult:
    """Produce certified zero-free P with ||P-g|| < eps and |P-target| < eps on E.

    ``boundary_eps`` tightens only the pointwise gate (used by the steering
    construction, which needs boundary accuracy finer than the norm budget).
    The retry schedule doubles needle level and multiplier degree in step up
    to the caps, then re-walks the degree cap with wider needles; exhaustion
    raises a budget error carrying the best errors achieved.
    """
    w = _space_alpha(space)
    if eps <= 0.0:
        raise InvalidParameterError("eps must be positive")
    gate = boundary_eps if boundary_eps is not None else eps
    if gate <= 0.0:
        raise InvalidParameterError("boundary_eps must be positive")
    targets = _normalize_targets(target, E)
    zs = np.exp(1j * np.asarray(E.points))

    probe = zero_free_on_closed_disc(dilate(g, 1.0 - 1e-6))
    if not probe.zero_free or probe.indeterminate:
        raise InvalidInputError(
            "g must be zero-free on the open unit disc (winding certificate failed)"
        )

    r, g_r = _select_dilation(g, eps, w)
    g_r_vals = np.asarray([evaluate(g_r, z) for z in zs])
    sup_g_r = float(np.max(np.abs(eval_on_circle_grid(g_r, 12))))
    ratios = targets / g_r_vals
    partition = piecewise_partition(
        {float(t): ratios[i] for i, t in enumerate(E.points)},
        E,
        eps / (4.0 * max(sup_g_r, 1e-30)),
    )

    point_vs = []
    for piece, v in partition.pieces:
        for p in piece.points:
            point_vs.append((float(p), complex(v)))

    if all(abs(v) <= TRIVIAL_RATIO_TOL for _, v in point_vs):
        P = CoeffSeries(g_r.coeffs, 0.0)
        report = zero_free_on_closed_disc(P)
        space_error = norm_alpha(_padded_sum(P, -g), w) + g.tail_bound
        boundary_error = float(np.max(np.abs([evaluate(P, z) for z in zs] - targets)))
        trace = ZeroFreeTrace(r, 0, len(P.coeffs) - 1)
        if report.zero_free and space_error < eps and boundary_error < gate:
            return ZeroFreeApproxResult(P, report, space_error, boundary_error, trace)
        raise ApproximationBudgetError(
            "trivial path failed its own gates",
            {"space_error": space_error, "boundary_error": boundary_error},
        )

    if space == "dirichlet":
        _dirichlet_point_bound_abort(g, targets, zs, eps, gate, len(g.coeffs) - 1)

    attempts = []
    dg = DEGREE_START
    while dg < DEGREE_CAP:
        for lv in (dg * LEVEL_START // DEGREE_START, dg * 2 * LEVEL_START // DEGREE_START):
            attempts.append((min(lv, LEVEL_CAP), dg))
        dg *= 2
    for lv in (LEVEL_CAP, LEVEL_CAP // 2, LEVEL_CAP // 4, LEVEL_CAP // 8):
        attempts.append((lv, DEGREE_CAP))
    attempts = list(dict.fromkeys(attempts))

    w2 = np.abs(eval_on_circle_grid(g_r, NEEDLE_GRID_LOG2)) ** 2
    best = {"space_error": np.inf, "boundary_error": np.inf, "level": 0, "degree": 0}
    for level, degree in attempts:
        band = degree // 2
        needles = [
            (p, v, _refined_needle(p, v, 1.0 / level, w2, band))
            for p, v in point_vs
            if abs(v) > TRIVIAL_RATIO_TOL
        ]
        F = np.zeros(band + 1, dtype=np.complex128)
        for _, _, c in needles:
            F += c

        def assemble(F_arr):
            phi = exp_series(CoeffSeries(F_arr, 0.0), degree)
            prod = multiply(g_r, phi, max_degree=len(g_r.coeffs) + len(phi.coeffs) - 2)
            return CoeffSeries(prod.coeffs, 0.0)

        P = assemble(F)
        for _ in range(POLISH_ROUNDS):
            P_vals = np.asarray([evaluate(P, z) for z in zs])
            if float(np.max(np.abs(P_vals - targets))) < gate:
                break
            # downstream truncation moved the point values; re-add the missing
            # log-ratio on the needles already fitted for this attempt
            shift = {}
            for i, p in enumerate(E.points):
                ratio = targets[i] / P_vals[i]
                shift[float(p)] = complex(np.log(np.abs(ratio)) + 1j * np.angle(ratio))
            F = F + sum(
                (shift[p] / v) * c for p, v, c in needles if float(p) in shift
            )
            P = assemble(F)
        space_error = norm_alpha(_padded_sum(P, -g), w) + g.tail_bound
        boundary_error = float(
            np.max(np.abs(np.asarray([evaluate(P, z) for z in zs]) - targets))
        )
        if space_error + boundary_error < best["space_error"] + best["boundary_error"]:
            best = {
                "space_error": space_error,
                "boundary_error": boundary_error,
                "level": level,
                "degree": degree,
            }
        if space_error < eps and boundary_error < gate:
            report = zero_free_on_closed_disc(P)
            if report.zero_free and not report.indeterminate:
                trace = ZeroFreeTrace(r, level, degree)
                return ZeroFreeApproxResult(
                    P, report, space_error, boundary_error, trace
                )
    raise ApproximationBudgetError(
        "needle level and degree budgets exhausted", dict(best)
    )
