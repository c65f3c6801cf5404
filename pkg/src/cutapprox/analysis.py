"""How good is the Pareto approximation of the cell under test, and when.

The distance between two distribution functions is their Kolmogorov
(sup-norm) distance over a grid of quantiles of the effective Pareto law,
so both tails are resolved whatever the scale.  The largest grid
probability is 0.999, so mass beyond the grid can hide at most about 0.001
of distance.

Pass/fail thresholds are conventions of this package, not derived values:
a sweep row is VALID when its exact-vs-Pareto distance is below
:data:`VALID_DISTANCE`, and the infeasibility check asks whether every VALID
row has a signal-to-clutter ratio below :data:`WEAK_TARGET_SCR_DB`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _io
from ._parallel import ordered_map
from .approximation import (
    GContext,
    approx_cdf_exp,
    approx_cdf_pareto,
    effective_pareto,
    limit_cdf,
    validity_ratio,
)
from .distributions import Scenario, pareto_quantile
from .errors import DomainError, InfiniteClutterMeanError, QuadratureError
from .exact_cut import CurveKind, QuadratureConfig, exact_cdf
from .monte_carlo import EmpiricalCdf, sample_cut, ks_distance

__all__ = [
    "VALID_DISTANCE",
    "WEAK_TARGET_SCR_DB",
    "DEFAULT_RATIOS",
    "SweepRow",
    "ValidityReport",
    "comparison_quantiles",
    "comparison_grid",
    "cdf_values",
    "sup_distance",
    "scr_db",
    "sweep",
    "compare",
    "CDF_COLUMNS",
    "cdf_table",
]

VALID_DISTANCE = 0.01
WEAK_TARGET_SCR_DB = -10.0
DEFAULT_RATIOS = (0.1, 1.0, 10.0, 100.0, 1000.0)

ROW_FIELDS = (
    "lambda_over_mu",
    "scr_db",
    "validity_ratio",
    "sup_dist_exp",
    "sup_dist_pareto",
    "sup_dist_limit",
)

METRIC_NOTE = (
    "Kolmogorov (sup-norm) distance between distribution functions on a grid of "
    "effective-Pareto quantiles; threshold-relevant for detection and independent "
    "of the intensity units."
)


def comparison_quantiles() -> np.ndarray:
    """Probabilities 0.001, 0.005, 0.01, 0.015, ..., 0.99, 0.995, 0.999 (201 points)."""
    mid = np.round(np.linspace(0.01, 0.99, 197), 12)
    return np.concatenate([[0.001, 0.005], mid, [0.995, 0.999]])


def comparison_grid(s: Scenario) -> np.ndarray:
    """Effective-Pareto quantiles at :func:`comparison_quantiles`."""
    return np.asarray(pareto_quantile(comparison_quantiles(), effective_pareto(s)), dtype=float)


GRID_DESCRIPTION = "effective-pareto quantiles at q in {0.001, 0.005, 0.01:0.99 step 0.005, 0.995, 0.999} (201 points)"


def cdf_values(kind, t, s: Scenario, cfg: QuadratureConfig | None = None, workers=None):
    """Evaluate the distribution function named by ``kind`` at ``t``."""
    kind = CurveKind(kind)
    if kind is CurveKind.EXACT:
        return exact_cdf(t, s, cfg, workers).value
    if kind is CurveKind.APPROX_EXP:
        return approx_cdf_exp(t, s)
    if kind is CurveKind.APPROX_PARETO:
        return approx_cdf_pareto(t, s)
    if kind is CurveKind.LIMIT:
        return limit_cdf(t, s)
    raise DomainError(f"no analytic evaluator for kind {kind.value!r}")


def sup_distance(s: Scenario, kind_a, kind_b, grid=None, cfg: QuadratureConfig | None = None, workers=None) -> float:
    """``max |F_a(t) - F_b(t)|`` over ``grid`` (default :func:`comparison_grid`)."""
    t = comparison_grid(s) if grid is None else np.asarray(grid, dtype=float)
    a = np.asarray(cdf_values(kind_a, t, s, cfg, workers))
    if CurveKind(kind_a) == CurveKind(kind_b):
        return 0.0
    b = np.asarray(cdf_values(kind_b, t, s, cfg, workers))
    return float(np.max(np.abs(a - b)))


def scr_db(s: Scenario) -> float:
    """Signal-to-clutter ratio ``10 log10((alpha - 1) mu / (lam beta))`` in dB.

    Signal power is ``1/lam``; mean clutter power is ``beta / ((alpha - 1) mu)``.
    """
    if s.alpha <= 1:
        raise InfiniteClutterMeanError(f"clutter mean power is infinite for alpha={s.alpha!r} <= 1")
    return 10.0 * math.log10((s.alpha - 1.0) * s.mu / (s.lam * s.beta))


@dataclass
class SweepRow:
    lambda_over_mu: float
    scr_db: float | None
    validity_ratio: float
    sup_dist_exp: float | None = None
    sup_dist_pareto: float | None = None
    sup_dist_limit: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def valid(self) -> bool:
        return self.ok and self.sup_dist_pareto < VALID_DISTANCE

    def verdict(self) -> str:
        scr = "n/a" if self.scr_db is None else f"{self.scr_db:.2f} dB"
        if not self.ok:
            return f"lambda/mu={self.lambda_over_mu:g}: FAILED ({self.error}) scr={scr}"
        word = "VALID" if self.valid else "INVALID"
        return f"lambda/mu={self.lambda_over_mu:g}: {word} sup_dist_pareto={self.sup_dist_pareto:.3e} scr={scr}"


@dataclass
class ValidityReport:
    base: Scenario
    rows: list
    config: QuadratureConfig
    grid_spec: str = GRID_DESCRIPTION

    @property
    def succeeded(self) -> int:
        return sum(row.ok for row in self.rows)

    def infeasibility_holds(self) -> bool:
        """Every VALID row has ``scr_db`` below the weak-target threshold."""
        return all(row.scr_db is not None and row.scr_db < WEAK_TARGET_SCR_DB for row in self.rows if row.valid)

    def meta(self) -> dict:
        return {
            "alpha": self.base.alpha,
            "beta": self.base.beta,
            "mu": self.base.mu,
            "grid": self.grid_spec,
            "grid_truncation_note": "largest grid probability is 0.999; mass beyond it bounds the missed distance by about 0.001",
            "metric": METRIC_NOTE,
            "quadrature": asdict(self.config),
            "thresholds": {
                "valid_sup_dist_pareto_below": VALID_DISTANCE,
                "weak_target_scr_db_below": WEAK_TARGET_SCR_DB,
                "note": "package conventions for pass/fail flags, not values derived from the model",
            },
            "errors": [{"lambda_over_mu": r.lambda_over_mu, "message": r.error} for r in self.rows if not r.ok],
        }

    def to_dict(self) -> dict:
        return {"meta": self.meta(), "rows": [{k: getattr(r, k) for k in ROW_FIELDS} for r in self.rows]}

    def to_json(self) -> str:
        return _io.dumps(self.to_dict())

    def to_csv(self) -> str:
        return _io.csv_text(ROW_FIELDS, [[getattr(r, k) for k in ROW_FIELDS] for r in self.rows])


def _row(base: Scenario, ratio: float, cfg: QuadratureConfig) -> SweepRow:
    s = base.with_lambda(ratio * base.mu)
    try:
        scr = scr_db(s)
    except InfiniteClutterMeanError:
        scr = None
    row = SweepRow(float(ratio), scr, validity_ratio(GContext.from_scenario(s)))
    try:
        t = comparison_grid(s)
        exact = np.asarray(exact_cdf(t, s, cfg, workers=1).value)
        row.sup_dist_exp = float(np.max(np.abs(exact - approx_cdf_exp(t, s))))
        row.sup_dist_pareto = float(np.max(np.abs(exact - approx_cdf_pareto(t, s))))
        row.sup_dist_limit = float(np.max(np.abs(exact - limit_cdf(t, s))))
    except (QuadratureError, DomainError, FloatingPointError) as exc:
        row.error = str(exc)
    return row


def sweep(base: Scenario, lambda_over_mu_values, cfg: QuadratureConfig | None = None, workers=None) -> ValidityReport:
    """One row per ratio, with ``mu`` fixed and ``lam = ratio * mu``.

    Rows are computed independently (possibly concurrently) and reported
    sorted by ratio.  A failing row records its error and the sweep goes on.
    """
    cfg = cfg or QuadratureConfig()
    ratios = [float(r) for r in lambda_over_mu_values]
    if not ratios:
        raise DomainError("at least one lambda/mu ratio is required")
    for r in ratios:
        if not (math.isfinite(r) and r > 0):
            raise DomainError(f"lambda/mu ratios must be positive, got {r!r}")
    ratios = sorted(ratios)
    rows = ordered_map(lambda r: _row(base, r, cfg), ratios, workers)
    return ValidityReport(base, rows, cfg)


def compare(s: Scenario, seed: int, n: int, cfg: QuadratureConfig | None = None, workers=None) -> dict:
    """Exact CDF against a Monte Carlo sample and against the approximations."""
    cfg = cfg or QuadratureConfig()
    batch = sample_cut(s, seed, n, workers)
    ecdf = EmpiricalCdf.from_samples(batch.values)
    ks = ks_distance(ecdf, lambda x: exact_cdf(x, s, cfg, workers).value)
    try:
        scr = scr_db(s)
    except InfiniteClutterMeanError:
        scr = None
    return {
        "ks_emp_vs_exact": ks,
        "sup_exact_vs_pareto": sup_distance(s, "exact", "approx_pareto", cfg=cfg, workers=workers),
        "sup_exact_vs_exp": sup_distance(s, "exact", "approx_exp", cfg=cfg, workers=workers),
        "validity_ratio": validity_ratio(GContext.from_scenario(s)),
        "scr_db": scr,
        "n": int(n),
        "seed": int(seed),
    }


CDF_COLUMNS = ("t", "exact", "approx_exp", "approx_pareto", "limit", "exact_error_estimate")


def cdf_table(s: Scenario, t, cfg: QuadratureConfig | None = None, workers=None):
    """Exact and approximate CDF columns on ``t``.

    Returns ``(columns, failed)``.  If the quadrature fails, points are
    retried one at a time; those that still fail are NaN and flagged in the
    boolean ``failed`` array.
    """
    cfg = cfg or QuadratureConfig()
    t = np.asarray(t, dtype=float)
    failed = np.zeros(t.shape, dtype=bool)
    try:
        est = exact_cdf(t, s, cfg, workers)
        exact, err = np.asarray(est.value), np.asarray(est.error)
    except QuadratureError:
        exact = np.full_like(t, np.nan)
        err = np.full_like(t, np.nan)
        for i, ti in enumerate(t):
            try:
                exact[i], err[i] = exact_cdf(float(ti), s, cfg, 1)
            except QuadratureError:
                failed[i] = True
    columns = {
        "t": t,
        "exact": exact,
        "approx_exp": np.asarray(approx_cdf_exp(t, s)),
        "approx_pareto": np.asarray(approx_cdf_pareto(t, s)),
        "limit": np.asarray(limit_cdf(t, s)),
        "exact_error_estimate": err,
    }
    return columns, failed
