"""Associated function, Poisson transform, and outer-function modulus checks.

The associated function of a weight sequence is the log-domain envelope
omega_M(t) = sup_p (p log t - log M_p). Feeding its doubled-argument,
factorial-shifted variant through the upper half-plane Poisson kernel yields
the harmonic function whose exponential is the modulus of an outer function G
with decay e^(-omega) along the shifted half-plane: log |G(z)| = -4 P(z + i).
Only the modulus is ever needed downstream, so the harmonic conjugate is
deliberately not computed.

Quadrature is adaptive around the kernel peak with doubling shells outward;
tails are truncated once the extrapolated remainder drops below the requested
tolerance, and a remainder that refuses to shrink raises QuadratureError.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from . import numerics
from .conditions import DEFAULT_POLICY, CheckPolicy, check_condition
from .errors import EvaluationError, QuadratureError, ValidationError
from .sequences import BIG_INDEX_LIMIT, WeightSequence, derive

# brute-force envelope maximization scans every index up to the cap; refuse
# caps that would allocate absurd scan tables
BRUTE_CAP_LIMIT = 2**22


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point x + iy of the (possibly shifted) upper half-plane."""

    x: float
    y: float

    def __post_init__(self):
        for field_name in ("x", "y"):
            v = getattr(self, field_name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"HalfPlanePoint: field {field_name!r} must be a finite number")

    @property
    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    def __abs__(self) -> float:
        return math.hypot(self.x, self.y)


def as_half_plane_point(z, min_y: float, where: str, strict: bool = True) -> HalfPlanePoint:
    """Coerce a complex number or HalfPlanePoint, enforcing Im z > min_y
    (or >= min_y when strict is False)."""
    if isinstance(z, HalfPlanePoint):
        pt = z
    elif isinstance(z, complex):
        pt = HalfPlanePoint(z.real, z.imag)
    elif isinstance(z, (int, float)) and not isinstance(z, bool):
        pt = HalfPlanePoint(float(z), 0.0)
    else:
        raise ValidationError(f"{where}: expected a point of the half-plane, got {z!r}")
    ok = pt.y > min_y if strict else pt.y >= min_y
    if not ok:
        cmp = ">" if strict else ">="
        raise ValidationError(f"{where}: requires Im z {cmp} {min_y:g}, got Im z = {pt.y:g}")
    return pt


# ---------------------------------------------------------------------------
# associated function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssocFnQuery:
    """An envelope evaluation request: sup over 0 <= p <= p_cap."""

    seq: WeightSequence
    t: float
    p_cap: int

    def __post_init__(self):
        if isinstance(self.t, bool) or not isinstance(self.t, (int, float)):
            raise ValidationError("AssocFnQuery: field 't' must be a number")
        if not (self.t >= 0) or not math.isfinite(self.t):
            raise ValidationError("AssocFnQuery: field 't' must be finite and >= 0")
        if not isinstance(self.p_cap, int) or isinstance(self.p_cap, bool) or self.p_cap < 2:
            raise ValidationError("AssocFnQuery: field 'p_cap' must be an integer >= 2")


def _crossover(seq: WeightSequence, log_t: float, p_cap: int) -> int:
    """Smallest p in [0, p_cap] with log m_p >= log t.

    For log-convex sequences the quotients are nondecreasing, so the
    predicate is monotone and the envelope's increments p -> p+1, equal to
    log t - log m_p, change sign exactly once: the crossover is the argmax.
    Quotients are probed through the closed-form fast path; the +-2 window
    around the result absorbs any rounding disagreement with the prefix.
    """
    if seq.log_m_fast(0) >= log_t:
        return 0
    if seq.log_m_fast(p_cap) < log_t:
        return p_cap
    lo, hi = 0, p_cap  # predicate false at lo, true at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.log_m_fast(mid) >= log_t:
            hi = mid
        else:
            lo = mid
    return hi


def associated_function_argmax(seq: WeightSequence, t: float, p_cap: int = 100_000) -> tuple[float, int]:
    """(omega_M(t), argmax p) with the sup restricted to 0 <= p <= p_cap.

    Log-convex sequences are handled by binary search on the quotient
    crossover (with a small safety window); everything else falls back to a
    brute-force scan. An argmax pinned at p_cap means the cap truncated the
    sup and is an error.
    """
    query = AssocFnQuery(seq, float(t), int(p_cap))
    if query.t == 0.0:
        return 0.0, 0
    log_t = math.log(query.t)
    if seq.certifies("lc"):
        pivot = _crossover(seq, log_t, query.p_cap)
        best_v, best_p = -math.inf, 0
        for p in range(max(0, pivot - 2), min(query.p_cap, pivot + 2) + 1):
            v = p * log_t - seq.log_M_extended(p)
            if v > best_v:
                best_v, best_p = v, p
    else:
        if query.p_cap > BRUTE_CAP_LIMIT:
            raise ValidationError(
                f"associated_function: p_cap {query.p_cap} exceeds the brute-force "
                f"limit {BRUTE_CAP_LIMIT} for a sequence without certified log-convexity"
            )
        logM = seq.log_M_array(query.p_cap)
        f = np.arange(query.p_cap + 1, dtype=float) * log_t - logM
        best_p = int(np.argmax(f))
        best_v = float(f[best_p])
    if best_p >= query.p_cap:
        raise ValidationError(
            f"associated_function: argmax at p_cap = {query.p_cap} for t = {query.t:g}; "
            "p_cap too small"
        )
    return max(best_v, 0.0), best_p


def associated_function(seq: WeightSequence, t: float, p_cap: int = 100_000) -> float:
    """omega_M(t) = max over 0 <= p <= p_cap of (p log t - log M_p), with
    omega_M(0) = 0."""
    return associated_function_argmax(seq, t, p_cap)[0]


def omega_evaluator(
    seq: WeightSequence, scale: float = 1.0, p_cap: int = 4096
) -> Callable[[float], float]:
    """Memoized even evaluator t -> omega_seq(scale * |t|).

    Non-log-convex sequences go through associated_function with a search cap
    that grows on demand. Log-convex sequences use a gallop search for the
    quotient crossover seeded by the previous call's argmax; quadrature nodes
    arrive clustered, so the crossover rarely moves far between calls. The
    reachable index range ends where closed forms do: sequences without a
    closed-form log M stop at the cumulative evaluation limit, making the
    Poisson tail handler treat that point as the truncation boundary.
    """
    if not (scale > 0) or not math.isfinite(scale):
        raise ValidationError("omega_evaluator: scale must be a finite number > 0")
    cache: dict[float, float] = {}
    cap_limit = 2**60 if seq._big_M_fn is not None else BIG_INDEX_LIMIT - 1
    convex = seq.certifies("lc")
    hint = 1

    def envelope_at(p: int, log_u: float) -> float:
        return p * log_u - seq.log_M_extended(p)

    def convex_value(u: float) -> float:
        nonlocal hint
        log_u = math.log(u)
        # gallop from the previous crossover to bracket the quotient sign change
        lo, hi = 0, None
        if seq.log_m_fast(hint) >= log_u:
            step, h = 1, hint
            while h > 0:
                nxt = max(h - step, 0)
                if seq.log_m_fast(nxt) < log_u:
                    lo, hi = nxt, h
                    break
                h = nxt
                step *= 2
            else:
                lo, hi = 0, 0
        else:
            step, h = 1, hint
            while True:
                nxt = min(h + step, cap_limit)
                if seq.log_m_fast(nxt) >= log_u:
                    lo, hi = h, nxt
                    break
                if nxt >= cap_limit:
                    raise EvaluationError(
                        f"associated function argmax beyond index {cap_limit} at t = {u:g}"
                    )
                h = nxt
                step *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if seq.log_m_fast(mid) >= log_u:
                hi = mid
            else:
                lo = mid
        hint = hi
        best = 0.0
        for p in range(max(0, hi - 2), hi + 3):
            best = max(best, envelope_at(p, log_u))
        return best

    def omega(t: float) -> float:
        nonlocal cache
        u = scale * abs(t)
        hit = cache.get(u)
        if hit is not None:
            return hit
        if u == 0.0:
            return 0.0
        if convex:
            value = convex_value(u)
        else:
            cap = p_cap
            while True:
                try:
                    value = associated_function(seq, u, cap)
                    break
                except ValidationError:
                    if cap >= cap_limit:
                        raise EvaluationError(
                            f"associated function argmax beyond index {cap_limit} at t = {u:g}"
                        )
                    cap = min(cap * 4, cap_limit)
        if len(cache) > 400_000:
            cache = {}
        cache[u] = value
        return value

    return omega


# ---------------------------------------------------------------------------
# Poisson transform
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoissonResult:
    """Value of (y/pi) * integral of omega(t) / ((t-x)^2 + y^2) with an
    absolute error estimate (quadrature error plus truncated-tail bound)."""

    value: float
    abs_error: float
    radius: float
    shells: int

    def to_json(self) -> dict:
        return numerics.jsonable(
            {
                "value": self.value,
                "abs_error": self.abs_error,
                "radius": self.radius,
                "shells": self.shells,
            }
        )


def _quad(f, a: float, b: float) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, e = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-10, limit=100)
    return float(v), float(e)


def poisson_transform(
    omega: Callable[[float], float], z, tol: float = 1e-8, max_shells: int = 60
) -> PoissonResult:
    """Poisson integral of an even nonnegative weight at a point of H.

    A center panel around the kernel peak t = x is followed by doubling
    shells on both sides. Shell contributions of an admissible weight decay
    geometrically, so the remaining tail is extrapolated from the ratio of
    the last two shells; integration stops once that bound falls below
    0.25 * tol * |value|. Exhausting max_shells, or the weight becoming
    unevaluable, with the bound still above tol * |value| raises.
    """
    pt = as_half_plane_point(z, 0.0, "poisson_transform")
    if not (tol > 0):
        raise ValidationError("poisson_transform: tol must be > 0")
    x, y = pt.x, pt.y
    y_over_pi = y / math.pi

    def f(t: float) -> float:
        d = t - x
        return y_over_pi * omega(t) / (d * d + y * y)

    r = max(4.0 * y, 4.0)
    total, err = _quad(f, x - r, x + r)
    prev_shell: Optional[float] = None
    tail_bound = math.inf
    shells = 0
    truncated = False
    while shells < max_shells:
        try:
            right, e1 = _quad(f, x + r, x + 2.0 * r)
            left, e2 = _quad(f, x - 2.0 * r, x - r)
        except EvaluationError:
            truncated = True
            break
        shell = left + right
        total += shell
        err += e1 + e2
        r *= 2.0
        shells += 1
        if prev_shell is not None and prev_shell > 0 and shell >= 0:
            ratio = shell / prev_shell
            if ratio < 0.95:
                tail_bound = shell * ratio / (1.0 - ratio)
        elif shell <= 0:
            tail_bound = 0.0
        prev_shell = shell
        scale = max(abs(total), 1e-12)
        if tail_bound <= 0.25 * tol * scale:
            return PoissonResult(total, err + tail_bound, r, shells)
    scale = max(abs(total), 1e-12)
    if not math.isfinite(tail_bound) or tail_bound > tol * scale:
        reason = "weight unevaluable past the truncation radius" if truncated else "shell budget exhausted"
        raise QuadratureError(
            f"poisson_transform: tail bound {tail_bound:.3g} still above "
            f"tolerance {tol:g} * {scale:.3g} at radius {r:.3g} ({reason})"
        )
    return PoissonResult(total, err + tail_bound, r, shells)


# ---------------------------------------------------------------------------
# outer-function modulus
# ---------------------------------------------------------------------------


def require_admissible(A: WeightSequence, horizon: int = 256, policy: CheckPolicy = DEFAULT_POLICY) -> None:
    """The auxiliary sequence must satisfy (wlc) and (nq); anything less
    leaves the Poisson majorant undefined and is rejected."""
    for cond in ("wlc", "nq"):
        verdict = check_condition(A, cond, horizon=horizon, policy=policy)
        if not verdict.affirmative:
            raise ValidationError(
                f"auxiliary sequence {A.name} must satisfy ({cond}); "
                f"check returned {verdict.status.value}"
            )


def _log_modulus(omega: Callable[[float], float], pt: HalfPlanePoint, tol: float) -> float:
    shifted = HalfPlanePoint(pt.x, pt.y + 1.0)
    return -4.0 * poisson_transform(omega, shifted, tol=tol).value


def g_log_modulus(A: WeightSequence, z, tol: float = 1e-8) -> float:
    """log |G(z)| = -4 P(z + i) on Im z > -1, where P is the Poisson
    integral of t -> omega_{hat A}(2 |t|).

    The auxiliary sequence A must satisfy (wlc) and (nq).
    """
    require_admissible(A)
    pt = as_half_plane_point(z, -1.0, "g_log_modulus")
    omega = omega_evaluator(derive(A, "hat"), scale=2.0)
    return _log_modulus(omega, pt, tol)


@dataclass(frozen=True)
class GridCheckReport:
    """Outcome of a pointwise bound check over a grid.

    rows hold (x, y, measured, allowance, slack) per point with
    slack = allowance - measured, so ok means min slack >= -tol.
    """

    name: str
    ok: bool
    sup: float
    bound: float
    tol: float
    rows: tuple[tuple[float, float, float, float, float], ...]
    note: str = ""

    def to_json(self) -> dict:
        return numerics.jsonable(
            {
                "name": self.name,
                "ok": self.ok,
                "sup": self.sup,
                "bound": self.bound,
                "tol": self.tol,
                "note": self.note,
                "rows": [list(r) for r in self.rows],
            }
        )


def verify_g_decay(
    A: WeightSequence,
    grid: Sequence,
    tol: float = 1e-4,
    quad_tol: float = 1e-8,
) -> GridCheckReport:
    """Check sup over the grid of log |G(z)| + omega_{hat A}(|z|) <= omega_{hat A}(2) + tol.

    A failed bound produces a failed report, not an exception.
    """
    require_admissible(A)
    points = [as_half_plane_point(z, -1.0, "verify_g_decay") for z in grid]
    if not points:
        raise ValidationError("verify_g_decay: grid must be nonempty")
    A_hat = derive(A, "hat")
    omega_doubled = omega_evaluator(A_hat, scale=2.0)
    omega_plain = omega_evaluator(A_hat, scale=1.0)
    bound = omega_plain(2.0)
    rows = []
    sup = -math.inf
    for pt in points:
        lg = _log_modulus(omega_doubled, pt, quad_tol)
        measured = lg + omega_plain(abs(pt))
        sup = max(sup, measured)
        rows.append((pt.x, pt.y, measured, bound, bound - measured))
    ok = sup <= bound + tol
    note = "" if ok else "decay bound violated beyond tolerance"
    return GridCheckReport("g_decay", ok, sup, bound, tol, tuple(rows), note)


def verify_poisson_lower_bound(
    omega: Callable[[float], float],
    grid: Sequence,
    tol: float = 1e-6,
    quad_tol: float = 1e-8,
) -> GridCheckReport:
    """Check P_omega(z) >= omega(|z|) / 4 over a grid of upper half-plane
    points: the Poisson kernel keeps at least a quarter of its mass where
    |t| >= |z|, and the weight is even and nondecreasing there."""
    points = [as_half_plane_point(z, 0.0, "verify_poisson_lower_bound") for z in grid]
    if not points:
        raise ValidationError("verify_poisson_lower_bound: grid must be nonempty")
    rows = []
    worst = math.inf
    for pt in points:
        value = poisson_transform(omega, pt, tol=quad_tol).value
        floor = omega(abs(pt)) / 4.0
        slack = value - floor
        worst = min(worst, slack)
        rows.append((pt.x, pt.y, value, floor, slack))
    ok = worst >= -tol
    note = "" if ok else "kernel mass lower bound violated beyond tolerance"
    return GridCheckReport("poisson_lower_bound", ok, -worst, 0.0, tol, tuple(rows), note)


def verify_g_window_bound(
    A: WeightSequence,
    xs: Sequence[float],
    tol: float = 1e-6,
    quad_tol: float = 1e-8,
    n_circle: int = 24,
) -> GridCheckReport:
    """Check max over |z - x| = 1/2 of log |G(z)| <= omega_{hat A}(2) - omega_{hat A}(|x|/2)
    for real |x| >= 1.

    This window max is the quantity that controls difference quotients of G
    by the Cauchy integral over the circle; |G| is analytic-modulus, so the
    boundary max dominates the disc.
    """
    require_admissible(A)
    xs = [float(x) for x in xs]
    if not xs:
        raise ValidationError("verify_g_window_bound: xs must be nonempty")
    if any(abs(x) < 1.0 for x in xs):
        raise ValidationError("verify_g_window_bound: window centers need |x| >= 1")
    A_hat = derive(A, "hat")
    omega_doubled = omega_evaluator(A_hat, scale=2.0)
    omega_plain = omega_evaluator(A_hat, scale=1.0)
    log_C = omega_plain(2.0)
    rows = []
    worst = math.inf
    for x in xs:
        angles = [2.0 * math.pi * k / n_circle for k in range(n_circle)]
        m = max(
            _log_modulus(
                omega_doubled,
                HalfPlanePoint(x + 0.5 * math.cos(a), 0.5 * math.sin(a)),
                quad_tol,
            )
            for a in angles
        )
        allowance = log_C - omega_plain(abs(x) / 2.0)
        slack = allowance - m
        worst = min(worst, slack)
        rows.append((x, 0.0, m, allowance, slack))
    ok = worst >= -tol
    note = "" if ok else "window bound violated beyond tolerance"
    return GridCheckReport("g_window_bound", ok, -worst, log_C, tol, tuple(rows), note)
