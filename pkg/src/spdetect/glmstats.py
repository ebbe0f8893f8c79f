"""Binomial logistic models for evaluating whether social evidence helps.

Two nested models are fit on decided pairs by iteratively reweighted least
squares: the baseline uses content similarity alone, the full model adds the
Facebook/Twitter follow indicators and the raw search hit count. The models
are compared by their deviance difference against a chi-square reference,
checked for overdispersion via the Pearson statistic, and screened with
hat values, studentized residuals and Cook's distance.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import linalg as sla
from scipy import stats

from .ranking import NOT_CHECKED, CONFIRMED, PairAssessment
from .socialgraph import SocialAction, actions_by_pair, has_follow_link

MAX_ITER = 50
DEVIANCE_RTOL = 1e-10
MIN_DECIDED_PAIRS = 10

NESTED_FORMULA = "woSocio"
FULL_FORMULA = "wSocio"

_MU_EPS = 1e-12


class CollinearityError(ValueError):
    """The design matrix is rank deficient; message names the columns."""


@dataclass(frozen=True)
class FeatureRow:
    pair_id: str
    match_cs: float
    match_fb: bool
    match_tw: bool
    se_hits: int
    cheat_confirmed: bool


@dataclass(frozen=True)
class GlmModel:
    formula: str
    coefficients: tuple[float, ...]  # intercept first
    standard_errors: tuple[float, ...]
    residual_deviance: float
    null_deviance: float
    df_residual: int
    converged: bool
    iterations: int
    predictor_names: tuple[str, ...]  # includes the intercept
    n_obs: int


@dataclass(frozen=True)
class LrtResult:
    deviance_diff: float
    df: int
    p_value: float


@dataclass(frozen=True)
class DispersionResult:
    dispersion: float
    p_value: float


@dataclass(frozen=True)
class Diagnostics:
    hat_values: tuple[float, ...]
    studentized_residuals: tuple[float, ...]
    cooks_d: tuple[float, ...]
    dispersion: float
    overdispersion_p: float
    high_leverage: tuple[int, ...]  # hat > 2 p / n
    high_influence: tuple[int, ...]  # Cook's D > 4 / n


@dataclass(frozen=True)
class ModelComparison:
    nested: GlmModel
    full: GlmModel
    lrt: LrtResult
    dispersion_nested: DispersionResult
    dispersion_full: DispersionResult
    diagnostics_nested: Diagnostics
    diagnostics_full: Diagnostics


def build_features(
    assessments: Iterable[PairAssessment], actions: Iterable[SocialAction]
) -> list[FeatureRow]:
    """One row per decided pair; not_checked pairs never enter the fit."""
    grouped = actions_by_pair(actions)
    rows = []
    for a in assessments:
        if a.status == NOT_CHECKED:
            continue
        pair_actions = grouped.get(tuple(sorted((a.p_i, a.p_j))), ())
        rows.append(
            FeatureRow(
                pair_id=a.pair_id,
                match_cs=a.cs,
                match_fb=has_follow_link(pair_actions, "FB"),
                match_tw=has_follow_link(pair_actions, "TW"),
                se_hits=a.se_hits,
                cheat_confirmed=a.status == CONFIRMED,
            )
        )
    return rows


def design_matrices(rows: Sequence[FeatureRow]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(X_nested, X_full, y) with intercept columns, booleans as 0/1."""
    cs = np.array([r.match_cs for r in rows], dtype=float)
    fb = np.array([float(r.match_fb) for r in rows])
    tw = np.array([float(r.match_tw) for r in rows])
    hits = np.array([float(r.se_hits) for r in rows])
    y = np.array([float(r.cheat_confirmed) for r in rows])
    ones = np.ones(len(rows))
    x_nested = np.column_stack([ones, cs])
    x_full = np.column_stack([ones, cs, fb, tw, hits])
    return x_nested, x_full, y


NESTED_NAMES = ("intercept", "match_cs")
FULL_NAMES = ("intercept", "match_cs", "match_fb", "match_tw", "se_hits")


def binomial_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    """-2 log-likelihood against the saturated model (zero for binary y)."""
    mu = np.clip(mu, _MU_EPS, 1.0 - _MU_EPS)
    return float(-2.0 * np.sum(y * np.log(mu) + (1.0 - y) * np.log(1.0 - mu)))


def _check_design(X: np.ndarray, names: Sequence[str]) -> None:
    if not np.all(np.isfinite(X)):
        raise ValueError("design matrix contains non-finite values")
    n, p = X.shape
    if n < p:
        raise ValueError(f"need at least as many rows ({n}) as columns ({p})")
    rank = np.linalg.matrix_rank(X)
    if rank < p:
        # pivoted QR: the trailing pivots are the dependent columns
        _, _, piv = sla.qr(X, mode="economic", pivoting=True)
        dependent = sorted(piv[rank:])
        labels = ", ".join(names[i] for i in dependent)
        raise CollinearityError(f"design matrix is rank deficient; collinear columns: {labels}")


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    formula: str = "custom",
    names: Optional[Sequence[str]] = None,
) -> GlmModel:
    """Fit a binomial logit model by IRLS.

    Convergence is a relative residual-deviance change below 1e-10 within 50
    iterations; separation or one-class responses surface as converged=False
    with a warning, never as a crash.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d design matrix (with intercept column)")
    if y.shape != (X.shape[0],):
        raise ValueError("y length must match the number of rows of X")
    if not np.all(np.isfinite(y)):
        raise ValueError("response contains non-finite values")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("response must be binary (0/1 or booleans)")
    n, p = X.shape
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(p))
    if len(names) != p:
        raise ValueError("one name per design column required")
    _check_design(X, names)

    one_class = y.min() == y.max()
    beta = np.zeros(p)
    eta = X @ beta
    mu = _sigmoid(eta)
    dev = binomial_deviance(y, mu)
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        w = np.clip(mu * (1.0 - mu), 1e-10, None)
        z = eta + (y - mu) / w
        try:
            beta = np.linalg.solve(X.T @ (X * w[:, None]), X.T @ (w * z))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"weighted cross-product became singular: {exc}") from exc
        eta = X @ beta
        mu = _sigmoid(eta)
        new_dev = binomial_deviance(y, mu)
        if abs(new_dev - dev) / (abs(new_dev) + 0.1) < DEVIANCE_RTOL:
            dev = new_dev
            converged = True
            break
        dev = new_dev
    if not converged or one_class:
        converged = False
        warnings.warn(
            f"logistic fit for {formula!r} did not converge "
            "(separated or one-class data); coefficients are boundary estimates",
            RuntimeWarning,
            stacklevel=2,
        )

    w_final = np.clip(mu * (1.0 - mu), 1e-10, None)
    try:
        cov = np.linalg.inv(X.T @ (X * w_final[:, None]))
        ses = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        ses = np.full(p, np.nan)

    mu0 = np.clip(np.full(n, y.mean()), _MU_EPS, 1.0 - _MU_EPS)
    return GlmModel(
        formula=formula,
        coefficients=tuple(float(b) for b in beta),
        standard_errors=tuple(float(s) for s in ses),
        residual_deviance=dev,
        null_deviance=binomial_deviance(y, mu0),
        df_residual=n - p,
        converged=converged,
        iterations=iterations,
        predictor_names=names,
        n_obs=n,
    )


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.clip(1.0 / (1.0 + np.exp(-eta)), _MU_EPS, 1.0 - _MU_EPS)


def predict_proba(model: GlmModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return _sigmoid(X @ np.asarray(model.coefficients))


def lrt(nested: GlmModel, full: GlmModel) -> LrtResult:
    """Likelihood-ratio test of the nested model against the full one."""
    if nested.n_obs != full.n_obs:
        raise ValueError("models were fit on different numbers of observations")
    extra = len(full.coefficients) - len(nested.coefficients)
    if extra < 0:
        raise ValueError("nested model has more parameters than the full model")
    if not set(nested.predictor_names) <= set(full.predictor_names):
        raise ValueError(
            f"models are not nested: {nested.predictor_names} vs {full.predictor_names}"
        )
    return lrt_from_deviances(nested.residual_deviance, full.residual_deviance, extra)


def lrt_from_deviances(rd_nested: float, rd_full: float, df: int) -> LrtResult:
    """Deviance-difference test; usable directly on reported deviances."""
    if df < 0:
        raise ValueError("df must be >= 0")
    diff = max(0.0, rd_nested - rd_full)
    p = 1.0 if df == 0 else float(stats.chi2.sf(diff, df))
    return LrtResult(deviance_diff=diff, df=df, p_value=p)


def dispersion_test(model: GlmModel, X: np.ndarray, y: np.ndarray) -> DispersionResult:
    """Pearson dispersion against the binomial assumption.

    The statistic is the Pearson chi-square at the fit; its upper-tail
    chi-square probability on the residual degrees of freedom is the p-value,
    so dispersion near (or below) 1 is not significant.
    """
    if model.df_residual <= 0:
        raise ValueError("dispersion test needs positive residual degrees of freedom")
    y = np.asarray(y, dtype=float)
    mu = predict_proba(model, X)
    pearson = float(np.sum((y - mu) ** 2 / (mu * (1.0 - mu))))
    phi = pearson / model.df_residual
    p = float(stats.chi2.sf(pearson, model.df_residual))
    return DispersionResult(dispersion=phi, p_value=p)


def influence_diagnostics(model: GlmModel, X: np.ndarray, y: np.ndarray) -> Diagnostics:
    """Hat values, studentized residuals and Cook's D at the IRLS solution."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    mu = predict_proba(model, X)
    w = mu * (1.0 - mu)
    xtwx = X.T @ (X * w[:, None])
    try:
        cov = np.linalg.inv(xtwx)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"weighted cross-product is singular: {exc}") from exc
    sw_x = X * np.sqrt(w)[:, None]
    hat = np.einsum("ij,jk,ik->i", sw_x, cov, sw_x)
    hat = np.clip(hat, 0.0, 1.0)

    pearson = (y - mu) / np.sqrt(w)
    with np.errstate(invalid="ignore"):
        dev_sq = -2.0 * (
            y * np.log(np.clip(mu, _MU_EPS, None))
            + (1.0 - y) * np.log(np.clip(1.0 - mu, _MU_EPS, None))
        )
    dev_res = np.sign(y - mu) * np.sqrt(np.clip(dev_sq, 0.0, None))
    denom = np.clip(1.0 - hat, 1e-12, None)
    studentized = np.sign(y - mu) * np.sqrt(
        np.clip(dev_res**2 + hat * pearson**2 / denom, 0.0, None)
    )
    cooks = pearson**2 * hat / (p * denom**2)

    disp = dispersion_test(model, X, y)
    return Diagnostics(
        hat_values=tuple(float(h) for h in hat),
        studentized_residuals=tuple(float(r) for r in studentized),
        cooks_d=tuple(float(c) for c in cooks),
        dispersion=disp.dispersion,
        overdispersion_p=disp.p_value,
        high_leverage=tuple(int(i) for i in np.nonzero(hat > 2.0 * p / n)[0]),
        high_influence=tuple(int(i) for i in np.nonzero(cooks > 4.0 / n)[0]),
    )


def compare_models(rows: Sequence[FeatureRow]) -> ModelComparison:
    """Fit both evaluation models on identical rows and compare them."""
    if len(rows) < MIN_DECIDED_PAIRS:
        raise ValueError(
            f"model comparison needs at least {MIN_DECIDED_PAIRS} decided pairs, got {len(rows)}"
        )
    labels = {r.cheat_confirmed for r in rows}
    if len(labels) < 2:
        raise ValueError("model comparison needs both confirmed and rejected pairs")
    x_nested, x_full, y = design_matrices(rows)
    nested = fit_logistic(x_nested, y, formula=NESTED_FORMULA, names=NESTED_NAMES)
    full = fit_logistic(x_full, y, formula=FULL_FORMULA, names=FULL_NAMES)
    return ModelComparison(
        nested=nested,
        full=full,
        lrt=lrt(nested, full),
        dispersion_nested=dispersion_test(nested, x_nested, y),
        dispersion_full=dispersion_test(full, x_full, y),
        diagnostics_nested=influence_diagnostics(nested, x_nested, y),
        diagnostics_full=influence_diagnostics(full, x_full, y),
    )


def comparison_report(c: ModelComparison) -> dict:
    """JSON-able summary of a model comparison."""

    def model_dict(m: GlmModel) -> dict:
        return {
            "formula": m.formula,
            "predictors": list(m.predictor_names),
            "coefficients": [round(v, 10) for v in m.coefficients],
            "standard_errors": [round(v, 10) for v in m.standard_errors],
            "residual_deviance": round(m.residual_deviance, 10),
            "null_deviance": round(m.null_deviance, 10),
            "df_residual": m.df_residual,
            "converged": m.converged,
            "iterations": m.iterations,
            "n_obs": m.n_obs,
        }

    def diag_dict(d: Diagnostics) -> dict:
        return {
            "dispersion": round(d.dispersion, 10),
            "overdispersion_p": round(d.overdispersion_p, 10),
            "high_leverage": list(d.high_leverage),
            "high_influence": list(d.high_influence),
        }

    return {
        "models": {
            "woSocio": model_dict(c.nested),
            "wSocio": model_dict(c.full),
        },
        "lrt": {
            "deviance_diff": round(c.lrt.deviance_diff, 10),
            "df": c.lrt.df,
            "p_value": float(f"{c.lrt.p_value:.6e}"),
        },
        "dispersion": {
            "woSocio": {
                "dispersion": round(c.dispersion_nested.dispersion, 10),
                "p_value": round(c.dispersion_nested.p_value, 10),
            },
            "wSocio": {
                "dispersion": round(c.dispersion_full.dispersion, 10),
                "p_value": round(c.dispersion_full.p_value, 10),
            },
        },
        "diagnostics": {
            "woSocio": diag_dict(c.diagnostics_nested),
            "wSocio": diag_dict(c.diagnostics_full),
        },
    }


def features_csv(rows: Iterable[FeatureRow]) -> str:
    lines = ["pair_id,match_cs,match_fb,match_tw,se_hits,cheat_confirmed"]
    for r in rows:
        lines.append(
            f"{r.pair_id},{r.match_cs:.6f},{str(r.match_fb).lower()},"
            f"{str(r.match_tw).lower()},{r.se_hits},{str(r.cheat_confirmed).lower()}"
        )
    return "\n".join(lines) + "\n"


def parse_features_csv(text: str) -> list[FeatureRow]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    header = ["pair_id", "match_cs", "match_fb", "match_tw", "se_hits", "cheat_confirmed"]
    if not rows or [c.strip() for c in rows[0]] != header:
        raise ValueError(f"line 1: expected header {','.join(header)!r}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 6:
            raise ValueError(f"line {lineno}: expected 6 fields, got {len(row)}")
        pid, cs, fb, tw, hits, cheat = (c.strip() for c in row)
        try:
            out.append(
                FeatureRow(
                    pair_id=pid,
                    match_cs=float(cs),
                    match_fb=_parse_bool(fb),
                    match_tw=_parse_bool(tw),
                    se_hits=int(hits),
                    cheat_confirmed=_parse_bool(cheat),
                )
            )
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return out


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1"):
        return True
    if low in ("false", "0"):
        return False
    raise ValueError(f"bad boolean {raw!r}")
