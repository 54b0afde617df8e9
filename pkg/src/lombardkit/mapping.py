"""Logistic mapping from intelligibility index to word correct rate.

The map is ``wcr(d) = 100 / (1 + exp(a*d + b))`` with slope ``a`` (negative:
higher index, higher score) and offset ``b``. Fitting minimizes squared error
over observed (index, score) pairs with a damped Gauss-Newton scheme and an
analytic Jacobian; no black-box optimizer, so the fit is reproducible to the
last bit and independent of observation order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigError, DegenerateDataError

_MAX_ITER = 200
_COST_RTOL = 1e-10
_LOGIT_CLAMP = (0.5, 99.5)


@dataclass(frozen=True)
class MappingParams:
    """Slope/offset of the logistic map."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ConfigError("mapping parameters must be finite")

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"a": self.a, "b": self.b}, fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "MappingParams":
        with open(path) as fh:
            data = json.load(fh)
        try:
            return cls(float(data["a"]), float(data["b"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad mapping file {path}: {exc}") from exc


#: Parameters fitted on a 4400-sentence listening corpus; the default map.
PUBLISHED_2024 = MappingParams(a=-10.88, b=6.12)


@dataclass(frozen=True)
class ObservationPair:
    """One (intelligibility index, word correct rate %) observation."""

    stoi: float
    wcr: float

    def __post_init__(self):
        if not math.isfinite(self.stoi):
            raise ConfigError("index value must be finite")
        if not 0.0 <= self.wcr <= 100.0:
            raise ConfigError(f"word correct rate {self.wcr} outside [0, 100]")


@dataclass(frozen=True)
class FitReport:
    """Outcome of a mapping fit."""

    params: MappingParams
    rmse: float
    pearson_r: float
    n_obs: int
    n_iter: int
    converged: bool


def map_stoi_to_wcr(d, params: MappingParams = PUBLISHED_2024):
    """Predicted word correct rate (%) for index value(s) ``d``."""
    d = np.asarray(d, dtype=np.float64)
    out = 100.0 * expit(-(params.a * d + params.b))
    return float(out) if out.ndim == 0 else out


def _canonical(pairs: list[ObservationPair]) -> tuple[np.ndarray, np.ndarray]:
    d = np.array([p.stoi for p in pairs])
    w = np.array([p.wcr for p in pairs])
    order = np.lexsort((w, d))  # fixed summation order regardless of input order
    return d[order], w[order]


def _residuals_jacobian(d, w, a, b):
    pred = 100.0 * expit(-(a * d + b))
    r = pred - w
    dfdu = -pred * (1.0 - pred / 100.0)  # d pred / d (a*d + b)
    jac = np.column_stack([dfdu * d, dfdu])
    return r, jac


def fit_mapping(pairs: list[ObservationPair]) -> FitReport:
    """Least-squares fit of the logistic map to observed pairs.

    Starting values come from ordinary least squares on the logit transform
    ``log(100/wcr - 1) = a*d + b`` (scores clamped away from 0 and 100), then
    Levenberg-Marquardt iterations refine them until the relative cost change
    drops below 1e-10 or 200 iterations pass.
    """
    if len(pairs) < 3:
        raise DegenerateDataError(f"need at least 3 observations, got {len(pairs)}")
    d, w = _canonical(pairs)
    if np.unique(d).size < 2:
        raise DegenerateDataError("observations share a single index value")

    w_clamped = np.clip(w, *_LOGIT_CLAMP)
    y = np.log(100.0 / w_clamped - 1.0)
    design = np.column_stack([d, np.ones_like(d)])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)

    r, jac = _residuals_jacobian(d, w, a, b)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, _MAX_ITER + 1):
        jtj = jac.T @ jac
        jtr = jac.T @ r
        try:
            step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)), -jtr)
        except np.linalg.LinAlgError:
            step = np.linalg.solve(jtj + lam * np.eye(2), -jtr)
        a_new, b_new = a + step[0], b + step[1]
        r_new, jac_new = _residuals_jacobian(d, w, a_new, b_new)
        cost_new = float(r_new @ r_new)
        if cost_new < cost:
            improved = cost - cost_new
            a, b, r, jac, cost = a_new, b_new, r_new, jac_new, cost_new
            lam = max(lam / 10.0, 1e-12)
            if improved <= _COST_RTOL * max(cost, 1e-30):
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                converged = True  # stalled in a flat basin; accept current point
                break

    params = MappingParams(float(a), float(b))
    rmse, rho = evaluate_fit(params, pairs)
    return FitReport(params=params, rmse=rmse, pearson_r=rho,
                     n_obs=len(pairs), n_iter=it, converged=converged)


def evaluate_fit(params: MappingParams,
                 pairs: list[ObservationPair]) -> tuple[float, float]:
    """RMSE and Pearson correlation of predictions against observed scores."""
    if not pairs:
        raise DegenerateDataError("no observations to evaluate")
    d, w = _canonical(pairs)
    pred = map_stoi_to_wcr(d, params)
    rmse = float(np.sqrt(np.mean((pred - w) ** 2)))
    if np.ptp(pred) == 0.0 or np.ptp(w) == 0.0:
        rho = float("nan")
    else:
        rho = float(np.corrcoef(pred, w)[0, 1])
    return rmse, rho


def save_observations(pairs: list[ObservationPair], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stoi", "wcr"])
        for p in pairs:
            writer.writerow([repr(p.stoi), repr(p.wcr)])


def load_observations(path) -> list[ObservationPair]:
    pairs = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "stoi":
                continue
            pairs.append(ObservationPair(float(row[0]), float(row[1])))
    if not pairs:
        raise ConfigError(f"no observations in {path}")
    return pairs
