"""Large-scale path loss and Shannon-rate link model.

Rates are spectral efficiencies (bits/s per unit bandwidth per resource
block); no absolute RB bandwidth is modelled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_PS = 0.2
DEFAULT_NOISE_POWER = 1e-13
DEFAULT_D_MIN = 1.0


class DegenerateDistanceError(ValueError):
    """Raised for a non-positive transmitter-receiver distance."""


@dataclass(frozen=True)
class RadioProfile:
    """Log-distance path-loss constants plus power and RB pool of one radio.

    ``F`` is the attenuation in dB at the reference distance ``d0`` and
    ``alpha`` the path-loss exponent. Distances below ``d_min`` are evaluated
    at ``d_min``.
    """

    F: float
    d0: float
    alpha: float
    Ps: float = DEFAULT_PS
    noise_power: float = DEFAULT_NOISE_POWER
    rb_pool: int = 1
    d_min: float = DEFAULT_D_MIN

    def __post_init__(self):
        if self.alpha < 2:
            raise ValueError(f"path-loss exponent must be >= 2, got {self.alpha}")
        if not (self.d0 > 0 and self.Ps > 0 and self.noise_power > 0 and self.d_min > 0):
            raise ValueError("d0, Ps, noise_power and d_min must all be positive")
        if int(self.rb_pool) != self.rb_pool or self.rb_pool < 1:
            raise ValueError(f"rb_pool must be a positive integer, got {self.rb_pool}")

    def with_(self, **changes) -> "RadioProfile":
        return replace(self, **changes)


LTE = RadioProfile(F=128.1, d0=1000.0, alpha=3.76, rb_pool=100)
DSRC = RadioProfile(F=43.9, d0=1.0, alpha=2.75, rb_pool=50)


class LinkTech(enum.Enum):
    V2I_LTE = "lte"
    V2V_DSRC = "dsrc"

    @property
    def default_profile(self) -> RadioProfile:
        return LTE if self is LinkTech.V2I_LTE else DSRC


def _clamped(profile: RadioProfile, d):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0) or np.any(np.isnan(d)):
        raise DegenerateDistanceError(f"distance must be positive, got {d}")
    return np.maximum(d, profile.d_min)


def path_loss_db(profile: RadioProfile, d):
    """F + 10*alpha*log10(d/d0), for scalar or array ``d``."""
    d = _clamped(profile, d)
    out = profile.F + 10.0 * profile.alpha * np.log10(d / profile.d0)
    return float(out) if out.ndim == 0 else out


def received_power(profile: RadioProfile, d):
    return profile.Ps / 10.0 ** (np.asarray(path_loss_db(profile, d)) / 10.0)


def received_snr(profile: RadioProfile, d):
    out = received_power(profile, d) / profile.noise_power
    return float(out) if np.ndim(out) == 0 else out


def air_per_rb(profile: RadioProfile, d):
    """Shannon spectral efficiency log2(1 + SNR) of a single RB."""
    out = np.log2(1.0 + np.asarray(received_snr(profile, d)))
    return float(out) if out.ndim == 0 else out


def air_link(profile: RadioProfile, d, rb_count: int):
    if rb_count < 0:
        raise ValueError(f"rb_count must be nonnegative, got {rb_count}")
    return rb_count * air_per_rb(profile, d)


def rb_share(pool: int, users: int) -> int:
    """Fair floor share of ``pool`` RBs among ``users``; remainders are dropped."""
    if users <= 0:
        return 0
    return pool // users
