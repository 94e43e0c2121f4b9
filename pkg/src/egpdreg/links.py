"""Monotone, twice-differentiable links between predictors and parameters.

Four kinds: identity, log, shifted log (``eta = log(theta - shift)``) and
logit.  Inverse links clamp the predictor at ``ETA_MAX`` (minus the log of
machine epsilon) before exponentiating, and their derivatives are floored
at machine epsilon, so any finite predictor maps to an admissible value.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

_EPS = np.finfo(float).eps
ETA_MAX = -np.log(_EPS)

_KINDS = ("identity", "log", "shifted-log", "logit")


@dataclass(frozen=True)
class LinkFunction:
    kind: str
    shift: float = 0.0001  # shifted-log only

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown link kind {self.kind!r}")

    @property
    def name(self):
        if self.kind == "shifted-log":
            return f"shifted-log:{self.shift:g}"
        return self.kind


IDENTITY = LinkFunction("identity")
LOG = LinkFunction("log")
LOGIT = LinkFunction("logit")


def parse_link(name: str) -> LinkFunction:
    """Parse the serialized form: identity, log, logit, shifted-log:<shift>."""
    if name.startswith("shifted-log"):
        _, _, rest = name.partition(":")
        return LinkFunction("shifted-log", float(rest) if rest else 0.0001)
    return LinkFunction(name)


def _clamp(eta):
    return np.clip(np.asarray(eta, dtype=float), -ETA_MAX, ETA_MAX)


def linkfun(theta, link: LinkFunction):
    """Map a parameter value to its predictor eta."""
    theta = np.asarray(theta, dtype=float)
    if link.kind == "identity":
        out = theta
    elif link.kind == "log":
        if np.any(theta <= 0):
            raise DomainError("log link requires theta > 0")
        out = np.log(theta)
    elif link.kind == "shifted-log":
        if np.any(theta <= link.shift):
            raise DomainError(f"shifted-log link requires theta > {link.shift}")
        out = np.log(theta - link.shift)
    else:  # logit
        if np.any((theta <= 0) | (theta >= 1)):
            raise DomainError("logit link requires theta in (0, 1)")
        out = np.log(theta / (1.0 - theta))
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def linkinv(eta, link: LinkFunction):
    """Map a predictor back to the parameter scale (eta clamped first)."""
    eta = _clamp(eta)
    if link.kind == "identity":
        out = eta
    elif link.kind == "log":
        out = np.exp(eta)
    elif link.kind == "shifted-log":
        out = np.exp(eta) + link.shift
    else:  # logit
        out = 1.0 / (1.0 + np.exp(-eta))
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def dinvlink_deta(eta, link: LinkFunction):
    """Derivative of linkinv at eta, floored at machine epsilon."""
    eta = _clamp(eta)
    if link.kind == "identity":
        out = np.ones_like(eta)
    elif link.kind in ("log", "shifted-log"):
        out = np.maximum(np.exp(eta), _EPS)
    else:  # logit
        p = 1.0 / (1.0 + np.exp(-eta))
        out = np.maximum(p * (1.0 - p), _EPS)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)
