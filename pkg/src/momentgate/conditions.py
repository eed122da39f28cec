"""Growth-condition checks for weight sequences.

Six conditions are checked: (lc) log-convexity, (wlc) log-convexity of the
factorial-shifted sequence, (dc) derivation closedness m_p <= C0*H^(p+1),
(mg) moderate growth M_{p+q} <= C0*H^(p+q)*M_p*M_q, (nq) convergence of
sum 1/((p+1)*m_p), and (snq) sup_p m_p * sum_{q>=p} 1/((q+1)*m_q) < infinity.
A parametric strengthening of (snq) is exposed as check_gamma_beta: the
condition sum_{q>=p} m_q^(-1/beta) <= C*(p+1)*m_p^(-1/beta).

Asymptotic conditions are only semidecidable from finitely many terms, so
verdicts are explicit about their horizon and admit an inconclusive outcome.
exact_holds is claimed only when constructor metadata supplies an analytic
certificate; the numeric check still runs and a contradiction between the two
raises InternalInvariantError.

Series tails are classified by fitting the composite exponent of the summand
denominator against log p over the last quartile of the horizon (two
half-windows must agree). Sequences derived from the delta-block family are
classified blockwise instead: per-block sums are evaluated in closed form at
doubly exponential indices where termwise summation is impossible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import numerics
from .errors import InternalInvariantError, ValidationError
from .sequences import EX38_K, EX38_Q, BlockProfile, WeightSequence

CONDITIONS = ("lc", "wlc", "dc", "mg", "nq", "snq")

# direct termwise summation below this index; closed-form block integrals above
BLOCK_DIRECT_CAP = 4096


class Status(Enum):
    EXACT_HOLDS = "exact_holds"
    HOLDS_AT_HORIZON = "holds_at_horizon"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"
    CONDITIONAL = "conditional"


@dataclass(frozen=True)
class Verdict:
    condition: str
    status: Status
    horizon: int
    constants: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def affirmative(self) -> bool:
        return self.status in (Status.EXACT_HOLDS, Status.HOLDS_AT_HORIZON)

    @property
    def definite(self) -> bool:
        return self.status in (Status.EXACT_HOLDS, Status.HOLDS_AT_HORIZON, Status.FAILS)

    def to_json(self) -> dict:
        out = {
            "condition": self.condition,
            "status": self.status.value,
            "horizon": self.horizon,
            "constants": numerics.jsonable(self.constants),
            "diagnostics": numerics.jsonable(self.diagnostics),
        }
        if self.witness is not None:
            out["witness"] = numerics.jsonable(self.witness)
        return out


@dataclass(frozen=True)
class CheckPolicy:
    """Tuning constants shared by every checker.

    stab_rtol: running sup at the start of the last quartile must be within
    this relative distance of the final sup to count as stabilized.
    growth_factor: monotone last-quartile increase by more than this factor
    counts as sustained growth (failure).
    """

    stab_rtol: float = 0.01
    growth_factor: float = 2.0
    mg_rise_rtol: float = 0.10
    series_window_rtol: float = 0.02
    series_margin: float = 1e-9
    pointwise_tol: float = 1e-9
    # windows that disagree but both sit above this multiple of the divergence
    # threshold still count as convergent (super-power-law decay)
    clear_margin: float = 1.5


DEFAULT_POLICY = CheckPolicy()


# ---------------------------------------------------------------------------
# series classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesReport:
    """Outcome of classifying sum_p (p+1)^(-alpha) * m_p^(-1/beta).

    kind: convergent | divergent | inconclusive.
    exponent: fitted composite slope of theta*alpha*log(p+1) + log m_p against
    log(p+1); divergence threshold is exponent <= theta.
    log_total: log of partial sum plus tail estimate (convergent case only).
    """

    kind: str
    theta: float
    exponent: float
    windows: tuple[float, float]
    log_partial: float
    log_total: float
    trace: tuple[tuple[int, float], ...]
    method: str = "tail_fit"
    block_sums: tuple[float, ...] = ()

    @property
    def divergent(self) -> bool:
        return self.kind == "divergent"

    def to_json(self) -> dict:
        return numerics.jsonable(
            {
                "kind": self.kind,
                "theta": self.theta,
                "exponent": self.exponent,
                "windows": list(self.windows),
                "log_partial": self.log_partial,
                "log_total": self.log_total,
                "method": self.method,
                "partial_sum_trace": [list(t) for t in self.trace],
                "block_sums": list(self.block_sums),
            }
        )


def classify_series(
    log_denominators: np.ndarray, theta: float, policy: CheckPolicy = DEFAULT_POLICY
) -> SeriesReport:
    """Classify sum_p exp(-D_p/theta) from the first len(D) terms.

    The composite slope c of D against log(p+1) is fitted on the two halves
    of the last quartile; agreement within series_window_rtol makes the fit
    stable. Stable fits compare c against theta; unstable fits still decide
    the clear cases (both slopes far above threshold, or both below).
    """
    D = np.asarray(log_denominators, dtype=float)
    n = len(D)
    logt = -D / theta
    lp = np.logaddexp.accumulate(logt)
    trace = tuple(
        (int(i), float(lp[i - 1])) for i in numerics.geometric_indices(n, 24)
    )
    if n < 16:
        return SeriesReport(
            "inconclusive", theta, math.nan, (math.nan, math.nan),
            float(lp[-1]), math.nan, trace,
        )
    x = np.log(np.arange(1, n + 1, dtype=float))
    w1, w2 = numerics.last_quartile_windows(n)
    c1, _ = numerics.fit_line(x[w1], D[w1])
    c2, _ = numerics.fit_line(x[w2], D[w2])
    stable = numerics.slopes_stable(c1, c2, policy.series_window_rtol)
    q = slice((3 * n) // 4, n)
    c_fit, b_fit = numerics.fit_line(x[q], D[q])

    if stable:
        c = 0.5 * (c1 + c2)
        kind = "divergent" if c / theta <= 1.0 + policy.series_margin else "convergent"
    elif min(c1, c2) / theta >= policy.clear_margin:
        c = min(c1, c2)
        kind = "convergent"
    elif max(c1, c2) / theta <= 1.0 + policy.series_margin:
        c = max(c1, c2)
        kind = "divergent"
    else:
        return SeriesReport(
            "inconclusive", theta, math.nan, (c1, c2), float(lp[-1]), math.nan, trace
        )

    log_total = math.nan
    if kind == "convergent":
        e_t = c_fit / theta
        if e_t <= 1.0 + policy.series_margin:
            e_t = c / theta
        if e_t > 1.0 + policy.series_margin:
            log_tail = (
                -b_fit / theta - (e_t - 1.0) * math.log(n + 1) - math.log(e_t - 1.0)
            )
            log_total = float(np.logaddexp(lp[-1], log_tail))
        else:
            log_total = float(lp[-1])
    return SeriesReport(kind, theta, c, (c1, c2), float(lp[-1]), log_total, trace)


# ---------------------------------------------------------------------------
# blockwise series machinery
# ---------------------------------------------------------------------------


def _segment_log_sum(
    seq: WeightSequence,
    profile: BlockProfile,
    left: int,
    right: int,
    delta: int,
    alpha: float,
    beta: float,
) -> float:
    """log sum_{n=left}^{right} (n+1)^(-alpha) m_n^(-1/beta) within one block.

    Inside a delta-block the quotients follow log m_n ~ log m_left +
    slope*(log n - log left), so the sum collapses to a power integral with an
    exact left-endpoint prefactor. Endpoints may be astronomically large.
    """
    lm = seq.log_m(left)
    if left >= right:
        # degenerate one-term segment: keep the exact term
        return -alpha * math.log(left + 1) - lm / beta
    sigma = profile.slope(delta)
    e = alpha + sigma / beta
    ln_l = math.log(left)
    ln_r = math.log(right)
    return (-lm / beta + (sigma / beta) * ln_l) + numerics.log_integral_power(
        ln_l, ln_r, e
    )


def _block_parts(
    seq: WeightSequence,
    profile: BlockProfile,
    alpha: float,
    beta: float,
    cap: int,
) -> tuple[np.ndarray, list[tuple[int, float]]]:
    """Direct log-terms below `cap` plus per-segment log-sums beyond it."""
    logm = seq.log_m_array(cap - 1)
    p = np.arange(cap, dtype=float)
    direct = -alpha * np.log(p + 1.0) - logm[: cap] / beta
    seg_sums: list[tuple[int, float]] = []
    for a, b, delta in profile.segments():
        if b < cap:
            continue
        left = max(a, cap)
        if left > b:
            continue
        seg_sums.append(
            (left, _segment_log_sum(seq, profile, left, b, delta, alpha, beta))
        )
    return direct, seg_sums


def classify_block_series(
    seq: WeightSequence,
    profile: BlockProfile,
    alpha: float,
    beta: float,
    policy: CheckPolicy = DEFAULT_POLICY,
) -> SeriesReport:
    """Blockwise classification of sum (p+1)^(-alpha) m_p^(-1/beta).

    Per-segment sums alternate between the two block slopes; growth across
    same-type segments at the far end of the table decides divergence. The
    doubly exponential segment lengths make the growth signal sharp.
    """
    direct, seg_sums = _block_parts(seq, profile, alpha, beta, BLOCK_DIRECT_CAP)
    log_partial = float(np.logaddexp.reduce(direct))
    LS = [s for (_, s) in seg_sums]
    divergent = False
    for i in range(max(0, len(LS) - 6), len(LS) - 2):
        if LS[i + 2] > LS[i]:
            divergent = True
    trace = ((BLOCK_DIRECT_CAP - 1, log_partial),)
    if divergent:
        return SeriesReport(
            "divergent", beta, math.nan, (math.nan, math.nan),
            log_partial, math.nan, trace, method="block", block_sums=tuple(LS),
        )
    log_total = float(np.logaddexp.reduce(np.array([log_partial] + LS)))
    return SeriesReport(
        "convergent", beta, math.nan, (math.nan, math.nan),
        log_partial, log_total, trace, method="block", block_sums=tuple(LS),
    )


def classify_power_series(
    seq: WeightSequence,
    horizon: int,
    alpha: float,
    beta: float,
    policy: CheckPolicy = DEFAULT_POLICY,
) -> SeriesReport:
    """Classify sum_p (p+1)^(-alpha) m_p^(-1/beta), choosing the blockwise
    route for delta-block families and the tail-fit route otherwise."""
    profile = seq.block_profile()
    if profile is not None:
        return classify_block_series(seq, profile, alpha, beta, policy)
    logm = seq.log_m_array(horizon)
    x = np.log(np.arange(1, horizon + 2, dtype=float))
    D = beta * alpha * x + logm
    return classify_series(D, beta, policy)


# ---------------------------------------------------------------------------
# pointwise checks
# ---------------------------------------------------------------------------


def _check_convexity(seq: WeightSequence, horizon: int, policy: CheckPolicy, shifted: bool):
    logm = seq.log_m_array(horizon)
    d = np.diff(logm)
    if shifted:
        d = d + np.log1p(1.0 / np.arange(1, horizon + 1, dtype=float))
    i = int(np.argmin(d))
    diagnostics = {"min_second_difference": float(d[i]), "argmin": i + 1}
    if d[i] < -policy.pointwise_tol:
        witness = {"p": i + 1, "second_difference": float(d[i])}
        return Status.FAILS, {}, witness, diagnostics
    return Status.HOLDS_AT_HORIZON, {}, None, diagnostics


def _check_dc(seq: WeightSequence, horizon: int, policy: CheckPolicy):
    logm = seq.log_m_array(horizon)
    r = logm / np.arange(1, horizon + 2, dtype=float)
    stable, sup = numerics.running_sup_stabilized(r, policy.stab_rtol)
    constants = {"C0": 1.0, "H": math.exp(max(sup, 0.0))}
    diagnostics = {
        "sup_trace": [(int(i), float(np.max(r[:i]))) for i in numerics.geometric_indices(len(r), 16)],
    }
    if stable:
        return Status.HOLDS_AT_HORIZON, constants, None, diagnostics
    return Status.INCONCLUSIVE, constants, None, diagnostics


def _check_mg(seq: WeightSequence, horizon: int, policy: CheckPolicy):
    logM = seq.log_M_array(horizon)
    n = np.arange(2, horizon + 1)
    d = logM[n] - logM[n // 2] - logM[(n + 1) // 2]
    r = d / n
    stable, sup = numerics.running_sup_stabilized(r, policy.stab_rtol)
    diagnostics = {
        "split_trace": [
            (int(n[i]), float(r[i])) for i in numerics.geometric_indices(len(r), 16) - 1
        ],
    }
    if stable:
        log_H = max(sup, 0.0)
        constants = {
            "C0": 1.0,
            "H": math.exp(log_H) if log_H < 700.0 else math.inf,
            "log_H": log_H,
        }
        return Status.HOLDS_AT_HORIZON, constants, None, diagnostics
    # sustained relative rise of the per-index excess over the last quartile
    tail = r[(3 * len(r)) // 4 :]
    monotone = bool(np.all(np.diff(tail) >= -1e-12))
    rise = float(tail[-1] - tail[0])
    scale = max(abs(float(tail[0])), 1e-9)
    if monotone and rise > policy.mg_rise_rtol * scale:
        half = r[: len(r) // 2]
        log_H = max(float(np.max(half)), 0.0)
        excess = d - n * log_H
        j = int(np.argmax(excess))
        if excess[j] > 0:
            witness = {
                "p": int(n[j] // 2),
                "q": int((n[j] + 1) // 2),
                "excess": float(excess[j]),
            }
            constants = {
                "C0": 1.0,
                "H": math.exp(log_H) if log_H < 700.0 else math.inf,
                "log_H": log_H,
            }
            return Status.FAILS, constants, witness, diagnostics
    return Status.INCONCLUSIVE, {}, None, diagnostics


# ---------------------------------------------------------------------------
# series-based checks
# ---------------------------------------------------------------------------


def _check_nq(seq: WeightSequence, horizon: int, policy: CheckPolicy):
    report = classify_power_series(seq, horizon, 1.0, 1.0, policy)
    diagnostics = {"series": report.to_json()}
    if report.kind == "convergent":
        return Status.HOLDS_AT_HORIZON, {"sum": float(np.exp(report.log_total))}, None, diagnostics
    if report.kind == "divergent":
        return Status.FAILS, {}, None, diagnostics
    return Status.INCONCLUSIVE, {}, None, diagnostics


def _sup_decision(
    values: list[float], policy: CheckPolicy, window: Optional[int] = None
) -> tuple[str, float]:
    """Trichotomy on the running sup of a log-domain trace.

    The sup gap between the comparison point and the end decides: within
    log(1+stab_rtol) it has stabilized (the sup is monotone by construction,
    so this is the literal last-quartile criterion); beyond log(growth_factor)
    it exhibits sustained growth; in between, undecided.

    The comparison point is the start of the last quartile, or `window` steps
    from the end when given. Block-boundary probe lists pass window=2 so the
    comparison spans the last doubly exponential stage (one slope-3 and one
    slope-2 boundary) rather than a quartile of the (mostly small-index)
    list; sup growth in failing cases is at least log 3 per stage, while
    stabilizing corrections die off doubly exponentially.
    """
    arr = np.asarray(values, dtype=float)
    run = np.maximum.accumulate(arr)
    final = float(run[-1])
    if window is None:
        i0 = max((3 * len(arr)) // 4 - 1, 0)
    else:
        i0 = max(len(arr) - 1 - window, 0)
    gap = final - float(run[i0])
    if gap <= math.log1p(policy.stab_rtol):
        return "stable", final
    if gap > math.log(policy.growth_factor):
        return "grew", final
    return "undecided", final


def _sup_series_generic(
    seq: WeightSequence, horizon: int, policy: CheckPolicy, mode: str, beta: float
):
    """Shared engine for (snq) and the beta-parametric condition.

    mode 'snq':  R(p) = m_p * sum_{q>=p} 1/((q+1) m_q)
    mode 'gamma': R(p) = m_p^(1/beta)/(p+1) * sum_{q>=p} m_q^(-1/beta)

    The suffix sums take the computed terms up to the horizon plus a fitted
    integral tail; the sup runs over p <= horizon/2.
    """
    logm = seq.log_m_array(horizon)
    x = np.log(np.arange(1, horizon + 2, dtype=float))
    if mode == "snq":
        D = x + logm
        theta = 1.0
    else:
        D = logm
        theta = beta
    report = classify_series(D, theta, policy)
    diagnostics = {"series": report.to_json()}
    if report.kind == "divergent":
        return Status.FAILS, {}, None, diagnostics
    if report.kind == "inconclusive":
        return Status.INCONCLUSIVE, {}, None, diagnostics
    logt = -D / theta
    suffix = numerics.logsumexp_suffix(logt)
    # log_total aggregates from p=0; recover the beyond-horizon tail piece
    tail_piece = numerics.log_sub_exp(report.log_total, report.log_partial)
    T = np.logaddexp(suffix, tail_piece)
    half = horizon // 2 + 1
    if mode == "snq":
        lR = logm[:half] + T[:half]
    else:
        lR = logm[:half] / beta - x[:half] + T[:half]
    probes = [(int(i - 1), float(lR[i - 1])) for i in numerics.geometric_indices(half, 24)]
    diagnostics["sup_trace"] = probes
    outcome, log_sup = _sup_decision(list(lR), policy)
    if outcome == "stable":
        return Status.HOLDS_AT_HORIZON, {"C": float(np.exp(log_sup))}, None, diagnostics
    if outcome == "grew":
        return Status.FAILS, {"sup_so_far": float(np.exp(log_sup))}, None, diagnostics
    return Status.INCONCLUSIVE, {}, None, diagnostics


def _sup_series_block(
    seq: WeightSequence,
    profile: BlockProfile,
    policy: CheckPolicy,
    mode: str,
    beta: float,
):
    """Blockwise (snq)/(gamma_beta) engine for delta-block families.

    R is probed at dyadic indices plus the block boundaries, with suffix sums
    assembled from exact direct terms below the cap and closed-form segment
    integrals above it.
    """
    alpha, b = (1.0, 1.0) if mode == "snq" else (0.0, beta)
    cap = BLOCK_DIRECT_CAP
    series = classify_block_series(seq, profile, alpha, b, policy)
    if series.divergent:
        return Status.FAILS, {}, None, {"series": series.to_json()}
    direct, seg_sums = _block_parts(seq, profile, alpha, b, cap)
    suffix = numerics.logsumexp_suffix(direct)
    beyond = [s for (_, s) in seg_sums]
    log_beyond = (
        float(np.logaddexp.reduce(np.array(beyond))) if beyond else -math.inf
    )

    segments = profile.segments()

    def log_T(p: int) -> float:
        if p < cap:
            return float(np.logaddexp(suffix[p], log_beyond))
        parts = []
        for a, bb, delta in segments:
            if bb < p:
                continue
            left = max(a, p, cap)
            if left > bb:
                continue
            parts.append(_segment_log_sum(seq, profile, left, bb, delta, alpha, b))
        if not parts:
            return -math.inf
        return float(np.logaddexp.reduce(np.array(parts)))

    probe_list: list[int] = [0, 1, 2]
    v = 4
    while v < cap:
        probe_list.append(v)
        v *= 4
    for j in range(9):
        for boundary in (EX38_K[j], EX38_Q[j]):
            if boundary >= cap:
                probe_list.append(boundary)
    probe_list = sorted(set(probe_list))

    lR: list[float] = []
    for p in probe_list:
        lm = seq.log_m(p)
        if mode == "snq":
            lR.append(lm + log_T(p))
        else:
            lR.append(lm / b - math.log(p + 1) + log_T(p))
    diagnostics = {
        "sup_trace": [(numerics.index_label(p), r) for p, r in zip(probe_list, lR)],
        "method": "block",
        "series": series.to_json(),
    }
    outcome, log_sup = _sup_decision(lR, policy, window=2)
    if outcome == "stable":
        return Status.HOLDS_AT_HORIZON, {"C": float(np.exp(log_sup))}, None, diagnostics
    if outcome == "grew":
        return Status.FAILS, {"sup_so_far": float(np.exp(log_sup))}, None, diagnostics
    return Status.INCONCLUSIVE, {}, None, diagnostics


def _check_snq(seq: WeightSequence, horizon: int, policy: CheckPolicy):
    profile = seq.block_profile()
    if profile is not None:
        return _sup_series_block(seq, profile, policy, "snq", 1.0)
    return _sup_series_generic(seq, horizon, policy, "snq", 1.0)


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

_CHECKERS = {
    "lc": lambda seq, h, pol: _check_convexity(seq, h, pol, shifted=False),
    "wlc": lambda seq, h, pol: _check_convexity(seq, h, pol, shifted=True),
    "dc": _check_dc,
    "mg": _check_mg,
    "nq": _check_nq,
    "snq": _check_snq,
}


def _degenerate_warning(seq: WeightSequence, horizon: int) -> Optional[str]:
    # weight sequences need m_p -> infinity; a flat or falling quotient trend
    # still parses but deserves a flag
    logm = seq.log_m_array(min(horizon, 512))
    n = len(logm)
    head = float(np.max(logm[: max(n // 4, 1)]))
    tail = float(np.max(logm[(3 * n) // 4 :]))
    if tail <= head + 1e-9:
        return "quotients m_p do not trend upward at this horizon; not a weight sequence"
    return None


def check_condition(
    seq: WeightSequence,
    cond: str,
    horizon: int = 4096,
    policy: CheckPolicy = DEFAULT_POLICY,
    trust_metadata: bool = True,
) -> Verdict:
    """Check one growth condition up to the horizon.

    Metadata certainty upgrades a numeric pass to exact_holds; a numeric
    failure under a metadata certificate is an internal contradiction and
    raises. A metadata refutation without a numeric witness is reported
    inconclusive with the analytic note in the diagnostics.
    """
    if cond not in CONDITIONS:
        raise ValidationError(f"check_condition: unknown condition {cond!r}")
    if horizon < 8:
        raise ValidationError("check_condition: horizon must be >= 8")
    status, constants, witness, diagnostics = _CHECKERS[cond](seq, horizon, policy)
    warning = _degenerate_warning(seq, horizon)
    if warning:
        diagnostics = {**diagnostics, "warning": warning}
    verdict = Verdict(cond, status, horizon, constants, witness, diagnostics)
    if not trust_metadata:
        return verdict
    if seq.certifies(cond):
        if status == Status.FAILS:
            raise InternalInvariantError(
                f"{seq.name}: metadata certifies ({cond}) but the numeric check "
                f"found witness {witness}"
            )
        return replace(
            verdict,
            status=Status.EXACT_HOLDS,
            diagnostics={**diagnostics, "certificate": "constructor metadata"},
        )
    if seq.refutes(cond):
        if status == Status.FAILS:
            return replace(
                verdict,
                diagnostics={**diagnostics, "certificate": "refuted by construction"},
            )
        return replace(
            verdict,
            status=Status.INCONCLUSIVE,
            diagnostics={
                **diagnostics,
                "certificate": "refuted by construction; no finite witness at this horizon",
            },
        )
    return verdict


def check_gamma_beta(
    seq: WeightSequence,
    beta: float,
    horizon: int = 4096,
    policy: CheckPolicy = DEFAULT_POLICY,
) -> Verdict:
    """Check sum_{q>=p} m_q^(-1/beta) <= C*(p+1)*m_p^(-1/beta) up to the horizon.

    Reports holds_at_horizon with C = sup R(p) when the running sup of
    R(p) = m_p^(1/beta) * sum_{q>=p} m_q^(-1/beta) / (p+1) stabilizes, fails
    on divergence of the series or sustained growth of R, else inconclusive.
    """
    if not (beta > 0) or not math.isfinite(beta):
        raise ValidationError("check_gamma_beta: beta must be a finite number > 0")
    if horizon < 64:
        raise ValidationError("check_gamma_beta: horizon must be >= 64")
    profile = seq.block_profile()
    if profile is not None:
        status, constants, witness, diagnostics = _sup_series_block(
            seq, profile, policy, "gamma", beta
        )
    else:
        status, constants, witness, diagnostics = _sup_series_generic(
            seq, horizon, policy, "gamma", beta
        )
    diagnostics = {**diagnostics, "beta": beta}
    return Verdict(f"gamma_{beta:g}", status, horizon, constants, witness, diagnostics)
