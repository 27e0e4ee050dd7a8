"""Smooth bump weights used to integrate spot estimates against."""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.integrate import trapezoid

from ..models import TWO_PI
from ..models.schemas import WeightSpec

# quadrature nodes for c_k(h); resolves frequencies far beyond any max_k we allow
_COEFF_NODES = 16384


@dataclass(frozen=True)
class TestFunction:
    """h(t) = scale · exp(-1/(1-u²)) for |u| < 1, u = (t - center)/half_width; zero elsewhere.

    Smooth with compact support strictly inside (0, 2π), hence Lipschitz of
    every order up to 1.
    """
    __test__ = False  # not a pytest class

    center: float = math.pi
    half_width: float = 0.75 * math.pi
    scale: float = 1.0
    max_k: int = 256

    @classmethod
    def from_spec(cls, spec: Union[WeightSpec, dict]) -> "TestFunction":
        s = spec if isinstance(spec, WeightSpec) else WeightSpec.model_validate(spec)
        return cls(center=s.center, half_width=s.half_width, scale=s.scale, max_k=s.max_k)

    def __call__(self, t) -> np.ndarray:
        u = (np.asarray(t, dtype=np.float64) - self.center) / self.half_width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return self.scale * out

    def coefficients(self, max_k: int) -> np.ndarray:
        """c_k(h) = (1/2π) ∫ h(t) e^{-ikt} dt for k = -max_k..max_k."""
        return _bump_coefficients(self.center, self.half_width, int(max_k)) * self.scale

    def smoothed(self, n_freq: int, t) -> np.ndarray:
        """Fejér mean h_N(t) = Σ_{|k|<=N} (1 - |k|/N) c_k(h) e^{ikt}."""
        c = self.coefficients(n_freq)
        k = np.arange(-n_freq, n_freq + 1)
        w = 1.0 - np.abs(k) / n_freq
        tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
        return (np.exp(1j * np.outer(tt, k)) @ (w * c)).real


@lru_cache(maxsize=32)
def _bump_coefficients(center: float, half_width: float, max_k: int) -> np.ndarray:
    nodes = np.linspace(center - half_width, center + half_width, _COEFF_NODES + 1)
    unit = TestFunction(center=center, half_width=half_width)(nodes)
    k = np.arange(-max_k, max_k + 1)
    coeffs = np.empty(k.shape[0], dtype=np.complex128)
    for lo in range(0, k.shape[0], 64):
        block = k[lo:lo + 64]
        coeffs[lo:lo + 64] = trapezoid(unit * np.exp(-1j * np.outer(block, nodes)), nodes, axis=1)
    coeffs /= TWO_PI
    coeffs.setflags(write=False)
    return coeffs
