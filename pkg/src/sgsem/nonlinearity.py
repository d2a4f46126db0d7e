"""Pointwise nonlinearities f(u) with their derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np


class NonlinearityError(ValueError):
    pass


def _cube(u):
    return u**3


def _cube_prime(u):
    return 3.0 * u**2


def _ksin(kappa, u):
    return kappa * np.sin(u)


def _kcos(kappa, u):
    return kappa * np.cos(u)


def _zero(u):
    return np.zeros_like(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class Nonlinearity:
    """Right-hand side ``f`` of ``-Laplace u = f(u)``.

    ``parameter`` is the scalar that :meth:`with_parameter` varies along a
    continuation path (kappa for sine-Gordon); it is ``None`` when the
    family has no parameter.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    f_prime: Callable[[np.ndarray], np.ndarray]
    parameter: float | None = None

    def with_parameter(self, value: float) -> "Nonlinearity":
        if self.parameter is None:
            raise NonlinearityError(f"nonlinearity {self.name!r} has no parameter")
        return make_nonlinearity(self.name, value)

    def validate(self, samples: int = 100, seed: int = 0) -> None:
        """Check ``f(0) = 0`` and that ``f_prime`` matches central differences."""
        f0 = float(np.asarray(self.f(np.zeros(1)))[0])
        if f0 != 0.0:
            raise NonlinearityError(f"{self.name}: f(0) = {f0}, must vanish")
        rng = np.random.default_rng(seed)
        u = rng.uniform(-3.0, 3.0, samples)
        h = 1e-6 * (1.0 + np.abs(u))
        fd = (self.f(u + h) - self.f(u - h)) / (2 * h)
        exact = self.f_prime(u)
        err = np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))
        if np.max(err) > 1e-6:
            raise NonlinearityError(f"{self.name}: f_prime disagrees with finite differences")

    def describe(self) -> dict:
        return {"name": self.name, "parameter": self.parameter}


def cubic() -> Nonlinearity:
    return Nonlinearity("cubic", _cube, _cube_prime)


def sine_gordon(kappa: float) -> Nonlinearity:
    kappa = float(kappa)
    return Nonlinearity("sine-gordon", partial(_ksin, kappa), partial(_kcos, kappa), kappa)


def zero() -> Nonlinearity:
    return Nonlinearity("zero", _zero, _zero)


def make_nonlinearity(name: str, parameter: float | None = None) -> Nonlinearity:
    key = name.lower().replace("_", "-")
    if key == "cubic":
        return cubic()
    if key in ("sine-gordon", "sin", "sine"):
        if parameter is None:
            raise NonlinearityError("sine-gordon needs a kappa parameter")
        return sine_gordon(parameter)
    if key == "zero":
        return zero()
    raise NonlinearityError(f"unknown nonlinearity {name!r}")
