"""Model parameters (p, q, N) and every closed-form constant derived from them.

The equation under study is

    du/dt - div(|grad u|^(p-2) grad u) + |grad u|^q = 0

with slow diffusion (p > 2) and superlinear gradient absorption (q > 1).
Everything downstream (regime classification, barrier amplitudes, decay
exponents, critical thresholds) is a closed form in (p, q, N) and lives here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["Params", "DerivedConstants", "Regime", "Classification", "derive", "classify"]


@dataclass(frozen=True)
class Params:
    """The exponent pair and space dimension.

    p: diffusion exponent, must be > 2 (degenerate "slow" diffusion).
    q: absorption exponent, must be > 1 (locally Lipschitz nonlinearity).
    dim: space dimension N >= 1.

    Validity of the localized-decay regime additionally needs q < p - 1;
    that is reported by :func:`classify`, not enforced here.
    """

    p: float
    q: float
    dim: int

    def __post_init__(self):
        if not (self.p > 2.0):
            raise ValidationError(f"p must be > 2 (got p={self.p})")
        if not (self.q > 1.0):
            raise ValidationError(f"q must be > 1 (got q={self.q})")
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise ValidationError(f"dim must be an integer >= 1 (got {self.dim})")

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "dim": self.dim}

    @staticmethod
    def from_json(obj: dict) -> "Params":
        try:
            return Params(p=float(obj["p"]), q=float(obj["q"]), dim=int(obj["dim"]))
        except KeyError as exc:
            raise ValidationError(f"params config missing key {exc}") from exc


@dataclass(frozen=True)
class DerivedConstants:
    """Closed-form constants attached to a parameter triple.

    q1:        p - 1, upper edge of the absorption-dominated range.
    q_star:    p - N/(N+1), above which diffusion alone sets the long-time shape.
    q2:        min(p - 2N/(N+1), p/2), strict threshold for guaranteed support
               motion under steep-enough data.
    xi:        1/(q(N+1) - N), smoothing exponent of the sup-norm estimate.
    eta:       1/(N(p-2) + p), scaling exponent of the diffusion-only equation.
    a0:        amplitude of the stationary power barrier a0*|x - x0|^wait_exp;
               the largest edge coefficient below which the support never moves.
               NaN when q >= p - 1 (no such barrier).
    decay_exp: 1/(q - 1), the sup-norm decay rate exponent.
    wait_exp:  (p - q)/(p - 1 - q), the critical edge-flatness power.
               NaN when q >= p - 1.
    """

    q1: float
    q_star: float
    q2: float
    xi: float
    eta: float
    a0: float
    decay_exp: float
    wait_exp: float


class Regime(enum.Enum):
    """Large-time behaviour classes over the (p, q) plane."""

    SUBCRITICAL_LOCALIZED = "subcritical-localized"  # 1 < q < p-1
    CRITICAL_Q1 = "critical-q1"                      # q = p-1
    INTERMEDIATE = "intermediate"                    # p-1 < q < q_star
    SUPERCRITICAL = "supercritical"                  # q >= q_star


@dataclass(frozen=True)
class Classification:
    regime: Regime
    below_q2: bool  # strict q < q2: support is guaranteed to move for steep data


def derive(params: Params) -> DerivedConstants:
    """Compute every derived constant from closed forms.

    Total and deterministic for any valid Params; constants that only make
    sense for q < p - 1 (a0, wait_exp) degrade to NaN outside that range.
    """
    p, q, n = params.p, params.q, float(params.dim)
    q1 = p - 1.0
    q_star = p - n / (n + 1.0)
    q2 = min(p - 2.0 * n / (n + 1.0), p / 2.0)
    xi = 1.0 / (q * (n + 1.0) - n)
    eta = 1.0 / (n * (p - 2.0) + p)
    decay_exp = 1.0 / (q - 1.0)
    if q < q1:
        wait_exp = (p - q) / (p - 1.0 - q)
        a0 = ((p - 1.0 - q) / (p - q)) * (n - 1.0 + (p - 1.0) / (p - 1.0 - q)) ** (
            -1.0 / (p - 1.0 - q)
        )
    else:
        wait_exp = math.nan
        a0 = math.nan
    return DerivedConstants(
        q1=q1, q_star=q_star, q2=q2, xi=xi, eta=eta, a0=a0,
        decay_exp=decay_exp, wait_exp=wait_exp,
    )


def classify(params: Params) -> Classification:
    """Place (p, q) in its large-time regime.

    Boundaries use exact comparisons on the user-supplied values: regimes are
    a modelling choice, not a measurement, so no epsilon is appropriate.
    The below_q2 flag is strict; q == q2 reports False.
    """
    d = derive(params)
    q = params.q
    if q < d.q1:
        regime = Regime.SUBCRITICAL_LOCALIZED
    elif q == d.q1:
        regime = Regime.CRITICAL_Q1
    elif q < d.q_star:
        regime = Regime.INTERMEDIATE
    else:
        regime = Regime.SUPERCRITICAL
    return Classification(regime=regime, below_q2=q < d.q2)
