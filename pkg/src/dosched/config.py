"""Immutable configuration objects: link-distance laws, threshold policies,
scheduler kinds and the network configuration itself."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

__all__ = [
    "DistanceLaw",
    "ConstantDistance",
    "UniformDistance",
    "DiscreteDistance",
    "ThresholdPolicy",
    "Scheme",
    "SchedulerKind",
    "NetworkConfig",
    "DIAS_LAWS",
]

# Gauss-Legendre order for expectations under continuous distance laws.
_GL_ORDER = 64

DIAS_LAWS = ("reciprocal", "exact")


class DistanceLaw:
    """Law of the link distance D (meters).

    Subclasses provide ``sample`` and ``nodes``; everything else is built on
    those two.  Support must lie in [1, inf).
    """

    lo = 1.0
    hi = 1.0

    def sample(self, rng, n):
        raise NotImplementedError

    def nodes(self):
        """Return ``(d, w)``: support nodes and weights with ``E[f(D)] ~ sum w f(d)``."""
        raise NotImplementedError

    def expect(self, fn):
        """Return E[fn(D)] for a vectorised ``fn``.

        ``fn`` receives the node array with shape ``(k, 1)`` and may return
        shape ``(k, m)``; the result then has shape ``(m,)``.  A 1-D return of
        shape ``(k,)`` gives a float.
        """
        d, w = self.nodes()
        vals = np.asarray(fn(d[:, None]), dtype=float)
        if vals.ndim == 2 and vals.shape[1] == 1:
            return float(np.dot(w, vals[:, 0]))
        return np.tensordot(w, vals, axes=(0, 0))

    def moment(self, k):
        return self.expect(lambda d: d ** k)

    @property
    def is_constant(self):
        return False

    def mean(self):
        return self.moment(1.0)

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def from_dict(data):
        """Build a law from ``{"kind": ..., ...}``."""
        if isinstance(data, (int, float)):
            return ConstantDistance(float(data))
        kind = data.get("kind")
        if kind == "constant":
            return ConstantDistance(float(data["d"]))
        if kind == "uniform":
            return UniformDistance(float(data["lo"]), float(data["hi"]))
        if kind == "discrete":
            return DiscreteDistance(data["values"], data["probs"])
        raise ParameterError(f"unknown distance law kind {kind!r}")

    def _check_support(self):
        if not (self.lo >= 1.0):
            raise ParameterError(f"link distances must be >= 1 m, support starts at {self.lo}")
        if not (math.isfinite(self.hi) and self.hi >= self.lo):
            raise ParameterError("distance law support must be a finite interval")


@dataclass(frozen=True)
class ConstantDistance(DistanceLaw):
    """Degenerate law D = d.  Draws consume no randomness."""

    d: float

    def __post_init__(self):
        self._check_support()

    @property
    def lo(self):
        return self.d

    @property
    def hi(self):
        return self.d

    @property
    def is_constant(self):
        return True

    def sample(self, rng, n):
        return np.full(n, self.d, dtype=float)

    def nodes(self):
        return np.array([self.d]), np.array([1.0])

    def moment(self, k):
        return self.d ** k

    def to_dict(self):
        return {"kind": "constant", "d": self.d}


@dataclass(frozen=True)
class UniformDistance(DistanceLaw):
    """D uniform on [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        self._check_support()
        if self.hi <= self.lo:
            raise ParameterError("uniform distance law needs hi > lo")

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    def nodes(self):
        x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
        d = 0.5 * (self.hi - self.lo) * x + 0.5 * (self.hi + self.lo)
        return d, 0.5 * w

    def to_dict(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class DiscreteDistance(DistanceLaw):
    """D takes ``values[k]`` with probability ``probs[k]``."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        p = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)
        if len(v) == 0 or len(v) != len(p):
            raise ParameterError("discrete law needs matching nonempty values/probs")
        if any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-12:
            raise ParameterError("discrete law probabilities must be >= 0 and sum to 1")
        self._check_support()

    @property
    def lo(self):
        return min(self.values)

    @property
    def hi(self):
        return max(self.values)

    def sample(self, rng, n):
        return rng.choice(np.asarray(self.values), size=n, p=np.asarray(self.probs))

    def nodes(self):
        return np.asarray(self.values), np.asarray(self.probs)

    def to_dict(self):
        return {"kind": "discrete", "values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class ThresholdPolicy:
    """Threshold function ``Delta(lam) = rho * lam**exponent``.

    ``rho = 0`` disables a channel test and ``rho = inf`` disables an
    interferer test.
    """

    rho: float
    exponent: float = 0.0

    def __post_init__(self):
        if not (self.rho >= 0):
            raise ParameterError(f"threshold rho must be >= 0, got {self.rho}")
        if not math.isfinite(self.exponent):
            raise ParameterError("threshold exponent must be finite")

    def __call__(self, lam):
        lam = float(lam)
        if self.rho == 0.0 or math.isinf(self.rho) or self.exponent == 0.0:
            return float(self.rho)
        if lam <= 0.0:
            return 0.0 if self.exponent > 0 else math.inf
        return float(self.rho * lam ** self.exponent)

    @property
    def is_fixed(self):
        return self.exponent == 0.0 or self.rho == 0.0 or math.isinf(self.rho)

    def to_dict(self):
        return {"rho": self.rho, "exponent": self.exponent}


class Scheme(str, enum.Enum):
    NONE = "none"
    DCAS = "dcas"
    DIAS = "dias"
    DICAS = "dicas"


@dataclass(frozen=True)
class SchedulerKind:
    """A scheduling rule together with its threshold policies."""

    tag: Scheme
    channel_policy: ThresholdPolicy | None = None
    interferer_policy: ThresholdPolicy | None = None

    def __post_init__(self):
        tag = Scheme(self.tag)
        object.__setattr__(self, "tag", tag)
        need_c = tag in (Scheme.DCAS, Scheme.DICAS)
        need_i = tag in (Scheme.DIAS, Scheme.DICAS)
        if need_c != (self.channel_policy is not None):
            raise ParameterError(f"{tag.value} {'requires' if need_c else 'takes no'} channel_policy")
        if need_i != (self.interferer_policy is not None):
            raise ParameterError(f"{tag.value} {'requires' if need_i else 'takes no'} interferer_policy")

    @classmethod
    def none(cls):
        return cls(Scheme.NONE)

    @classmethod
    def dcas(cls, rho, gamma):
        return cls(Scheme.DCAS, channel_policy=ThresholdPolicy(rho, gamma))

    @classmethod
    def dias(cls, rho, delta):
        return cls(Scheme.DIAS, interferer_policy=ThresholdPolicy(rho, delta))

    @classmethod
    def dicas(cls, rho_c, gamma, rho_i, delta):
        return cls(Scheme.DICAS, ThresholdPolicy(rho_c, gamma), ThresholdPolicy(rho_i, delta))

    @property
    def uses_channel(self):
        return self.channel_policy is not None

    @property
    def uses_interferer(self):
        return self.interferer_policy is not None

    def label(self):
        parts = []
        if self.channel_policy is not None:
            parts.append(f"rho_c={self.channel_policy.rho:g},gamma={self.channel_policy.exponent:g}")
        if self.interferer_policy is not None:
            parts.append(f"rho_i={self.interferer_policy.rho:g},delta={self.interferer_policy.exponent:g}")
        if not parts:
            return self.tag.value
        return f"{self.tag.value}[{';'.join(parts)}]"

    def to_dict(self):
        out = {"tag": self.tag.value}
        if self.channel_policy is not None:
            out["channel"] = self.channel_policy.to_dict()
        if self.interferer_policy is not None:
            out["interferer"] = self.interferer_policy.to_dict()
        return out


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and statistical parameters of the network.

    Parameters
    ----------
    alpha : float
        Path-loss exponent, > 2.
    beta : float
        SIR threshold, > 0.
    lambda_t : float
        Density of all transmitter/receiver pairs (per m^2).
    distance_law : DistanceLaw
        Law of the link distance, support in [1, inf).
    epsilon : float
        Outage constraint in (0, 1).
    rate_b : float
        Per-link rate used in the transmission capacity.
    dias_law : {"reciprocal", "exact"}
        Which nearest-receiver law drives the DIAS transmission probability.
        ``"reciprocal"`` puts the exponent 2/alpha on the scaled nearest
        distance in the implicit equation for p_i; ``"exact"`` uses alpha/2,
        the law implied by the nearest-neighbour CDF.
    """

    alpha: float = 4.0
    beta: float = 2.0
    lambda_t: float = 1e-4
    distance_law: DistanceLaw = field(default_factory=lambda: ConstantDistance(8.0))
    epsilon: float = 0.1
    rate_b: float = 1.0
    dias_law: str = "reciprocal"

    def __post_init__(self):
        if isinstance(self.distance_law, (int, float)):
            object.__setattr__(self, "distance_law", ConstantDistance(float(self.distance_law)))
        if not (self.alpha > 2.0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be > 2, got {self.alpha}")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        if not (self.lambda_t >= 0.0 and math.isfinite(self.lambda_t)):
            raise ParameterError(f"lambda_t must be >= 0, got {self.lambda_t}")
        if not (0.0 < self.epsilon < 1.0):
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (self.rate_b > 0.0):
            raise ParameterError("rate_b must be > 0")
        if self.dias_law not in DIAS_LAWS:
            raise ParameterError(f"dias_law must be one of {DIAS_LAWS}")
        if not isinstance(self.distance_law, DistanceLaw):
            raise ParameterError("distance_law must be a DistanceLaw")

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda_t": self.lambda_t,
            "distance": self.distance_law.to_dict(),
            "epsilon": self.epsilon,
            "rate_b": self.rate_b,
            "dias_law": self.dias_law,
        }
