"""Pseudo-static pile models: fixed-base cantilever and partially fixed pile.

Sign convention: a positive lateral load gives positive displacement and
negative rotations. Rotations are in radians, lengths in meters.

Two different quantities are called lambda in the literature this follows;
here the length ratio m/h is ``lambda_len`` and never touches the FIR
regularization factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, MissingGeometryError, ModelViolationError
from .series import TimeSeries, check_aligned

FIXITY_EPS = 1e-9
FULLY_FIXED = float("inf")


def _invalid(msg):
    return InvalidArgumentError(msg, "pseudostatic-model")


@dataclass(frozen=True)
class PileGeometry:
    """``m`` above ground, ``h`` embedded, ``L`` the 1DOF cantilever length (defaults to ``m``)."""

    m: float
    h: float | None = None
    L: float | None = None

    def __post_init__(self):
        if not self.m > 0:
            raise _invalid(f"above-ground length m must be positive, got {self.m}")
        if self.h is not None and not self.h > 0:
            raise _invalid(f"below-ground length h must be positive, got {self.h}")
        if self.L is None:
            object.__setattr__(self, "L", float(self.m))
        elif not self.L > 0:
            raise _invalid(f"cantilever length L must be positive, got {self.L}")

    @property
    def lambda_len(self) -> float:
        if self.h is None:
            raise MissingGeometryError("length ratio needs the embedded length h", "pseudostatic-model")
        return self.m / self.h


@dataclass(frozen=True)
class BeamSection:
    E: float
    I: float
    P: float = 1.0

    def __post_init__(self):
        if not self.E > 0:
            raise _invalid(f"Young's modulus must be positive, got {self.E}")
        if not self.I > 0:
            raise _invalid(f"second moment of area must be positive, got {self.I}")

    @property
    def EI(self) -> float:
        return self.E * self.I


def _series_apply(fn, *args):
    """Evaluate ``fn`` on raw values, rewrapping if any argument is a TimeSeries."""
    series = [a for a in args if isinstance(a, TimeSeries)]
    if not series:
        return fn(*args)
    check_aligned(*series, module="pseudostatic-model")
    raw = [a.values if isinstance(a, TimeSeries) else a for a in args]
    warmup = max(s.warmup for s in series)
    return series[0].with_values(fn(*raw), unit="m", warmup=warmup)


def delta_1dof(theta1, L: float):
    """Top displacement of a fixed-base cantilever from its top rotation."""
    if not L > 0:
        raise _invalid(f"cantilever length must be positive, got {L}")
    return _series_apply(lambda t1: -(2.0 / 3.0) * t1 * L, theta1)


def delta_2dof(theta1, theta2, m: float):
    """Top displacement from top and ground-level rotations.

    Needs only the above-ground length: load, stiffness and embedment
    cancel out.
    """
    if not m > 0:
        raise _invalid(f"above-ground length must be positive, got {m}")
    return _series_apply(lambda t1, t2: -(2.0 / 3.0) * t1 * m - (1.0 / 3.0) * t2 * m, theta1, theta2)


def forward_cantilever(section: BeamSection, L: float):
    """Return ``(delta_p, theta1)`` for a tip load on a fixed-base cantilever."""
    if not L > 0:
        raise _invalid(f"cantilever length must be positive, got {L}")
    P, EI = section.P, section.EI
    return P * L**3 / (3.0 * EI), -P * L**2 / (2.0 * EI)


def forward_pile(section: BeamSection, geom: PileGeometry):
    """Return ``(delta_p, theta1, theta2)`` for a partially fixed pile under tip load."""
    if geom.h is None:
        raise MissingGeometryError(
            "forward pile model needs the embedded length h", "pseudostatic-model"
        )
    P, EI, m, h = section.P, section.EI, geom.m, geom.h
    lam = m / h
    delta_p = P * m**2 * h * (1.0 + lam) / (3.0 * EI)
    theta1 = -P * m * h * (2.0 + 3.0 * lam) / (6.0 * EI)
    theta2 = -P * m * h / (3.0 * EI)
    return delta_p, theta1, theta2


def fixity_ratio(theta1: float, theta2: float) -> float:
    """Length ratio m/h implied by the two rotations.

    Returns ``FULLY_FIXED`` (infinity) when the ground rotation is negligible.
    Raises ModelViolationError for opposite-sign rotations, which no single
    tip load on the pile can produce.
    """
    if theta1 == 0 and theta2 == 0:
        raise _invalid("both rotations are zero; fixity undefined")
    if abs(theta2) < FIXITY_EPS * abs(theta1):
        return FULLY_FIXED
    if theta1 * theta2 < 0:
        raise ModelViolationError(
            f"rotations of opposite sign (theta1={theta1}, theta2={theta2})", "pseudostatic-model"
        )
    return (2.0 / 3.0) * (theta1 / theta2 - 1.0)


def opposite_sign_samples(theta1: TimeSeries, theta2: TimeSeries) -> np.ndarray:
    """Indices where the two rotations disagree in sign (outside the model's regime)."""
    check_aligned(theta1, theta2, module="pseudostatic-model")
    return np.flatnonzero(theta1.values * theta2.values < 0)


def one_dof_bias(theta1: float, theta2: float) -> float:
    """Relative error of the cantilever estimate (L = m) on a partially fixed pile."""
    return abs(theta2) / abs(2.0 * theta1 + theta2)
