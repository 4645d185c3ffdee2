"""
Flux Models Module
Scalar flux functions, their wave speeds and the sign-based flux splitting
used by the upwind equilibria and the well-balanced source models
"""

import logging
import math
from typing import Callable, Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from ..utils.error_handler import ErrorCodes, ConfigurationError, FluxDomainError

logger = logging.getLogger(__name__)

ORIGIN_TOLERANCE = 1e-12
QUADRATURE_TOLERANCE = 1e-12
SPLIT_TOLERANCE = 1e-12

# Sign convention used throughout the package:
#   dG+ = max(dG, 0), dG- = max(-dG, 0)  (ties at dG = 0 fall in the "<= 0" branch)
#   G+(U) = int_0^U dG+,  G-(U) = int_0^U dG-,  so  G+ - G- = G  and both primitives
#   are non-decreasing in U. Burgers: G+(-0.5) = 0, G-(-0.5) = -0.125.

Array = np.ndarray


def _as_float(value):
    """Return a Python float for 0-d input, an ndarray otherwise"""
    arr = np.asarray(value, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


class ScalarFlux:
    """Scalar flux G^d(U) for one spatial direction"""

    def __init__(self, name: str,
                 flux_fn: Callable[[Array], Array],
                 jacobian_fn: Callable[[Array], Array],
                 split_fn: Optional[Callable[[Array], Tuple[Array, Array]]] = None,
                 split_jacobian_fn: Optional[Callable[[Array], Tuple[Array, Array]]] = None,
                 admissible_range: Tuple[float, float] = (-math.inf, math.inf)):
        self.name = name
        self._flux_fn = flux_fn
        self._jacobian_fn = jacobian_fn
        self._split_fn = split_fn
        self._split_jacobian_fn = split_jacobian_fn
        self.admissible_range = (float(admissible_range[0]), float(admissible_range[1]))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    def eval(self, U):
        """Evaluate G(U)"""
        return self._flux_fn(np.asarray(U, dtype=float))

    def jacobian(self, U):
        """Evaluate the wave speed dG/dU"""
        return self._jacobian_fn(np.asarray(U, dtype=float))

    def split(self, U):
        """Return (G+, G-); a user split takes precedence over the sign split"""
        if self._split_fn is not None:
            U = np.asarray(U, dtype=float)
            self.check_range(U)
            G_plus, G_minus = self._split_fn(U)
            return _as_float(G_plus), _as_float(G_minus)
        return split_by_sign(self, U)

    def split_jacobian(self, U):
        """Return (dG+/dU, dG-/dU) under the package sign convention"""
        U = np.asarray(U, dtype=float)
        if self._split_jacobian_fn is not None:
            return self._split_jacobian_fn(U)
        dG = np.asarray(self.jacobian(U), dtype=float)
        return np.where(dG > 0.0, dG, 0.0), np.where(dG > 0.0, 0.0, -dG) + 0.0

    def check_range(self, U):
        """Raise when any value lies outside the admissible interval"""
        low, high = self.admissible_range
        U = np.asarray(U, dtype=float)
        if U.size and (np.min(U) < low or np.max(U) > high):
            raise FluxDomainError(
                ErrorCodes.VALUE_OUT_OF_RANGE,
                f"U outside admissible range [{low}, {high}] of flux {self.name}",
                context={'min_U': float(np.min(U)), 'max_U': float(np.max(U))}
            )

    def _sign_split(self, U: Array) -> Tuple[Array, Array]:
        """Primitives of the sign-split wave speed by adaptive quadrature"""
        flat = np.atleast_1d(U).ravel()
        G_plus = np.empty_like(flat)
        G_minus = np.empty_like(flat)

        def positive(s):
            return max(float(self.jacobian(s)), 0.0)

        def negative(s):
            return max(-float(self.jacobian(s)), 0.0)

        for j, value in enumerate(flat):
            G_plus[j] = quad(positive, 0.0, value, epsabs=QUADRATURE_TOLERANCE,
                             epsrel=QUADRATURE_TOLERANCE, limit=200)[0]
            G_minus[j] = quad(negative, 0.0, value, epsabs=QUADRATURE_TOLERANCE,
                              epsrel=QUADRATURE_TOLERANCE, limit=200)[0]
        return G_plus.reshape(np.shape(U)), G_minus.reshape(np.shape(U))


class LinearFlux(ScalarFlux):
    """Linear advection G = aU"""

    def __init__(self, speed: float, name: Optional[str] = None):
        self.speed = float(speed)
        super().__init__(
            name or f"linear(a={self.speed!r})",
            lambda U: self.speed * U,
            lambda U: np.full(np.shape(U), self.speed)
        )

    def _sign_split(self, U: Array) -> Tuple[Array, Array]:
        return max(self.speed, 0.0) * U, max(-self.speed, 0.0) * U

    def split_jacobian(self, U):
        shape = np.shape(U)
        return np.full(shape, max(self.speed, 0.0)), np.full(shape, max(-self.speed, 0.0))


class BurgersFlux(ScalarFlux):
    """Inviscid Burgers flux G = U^2/2"""

    def __init__(self):
        super().__init__("burgers", lambda U: 0.5 * U * U, lambda U: U.copy())

    def _sign_split(self, U: Array) -> Tuple[Array, Array]:
        return np.where(U > 0.0, 0.5 * U * U, 0.0), np.where(U < 0.0, -0.5 * U * U, 0.0)

    def split_jacobian(self, U):
        U = np.asarray(U, dtype=float)
        return np.where(U > 0.0, U, 0.0), np.where(U > 0.0, 0.0, -U) + 0.0


class ScaledFlux(ScalarFlux):
    """c·G for a base flux G; the sign split swaps parts when c < 0"""

    def __init__(self, base: ScalarFlux, factor: float):
        self.base = base
        self.factor = float(factor)
        super().__init__(
            f"{self.factor!r}*{base.name}",
            lambda U: self.factor * base.eval(U),
            lambda U: self.factor * base.jacobian(U),
            admissible_range=base.admissible_range
        )

    def _sign_split(self, U: Array) -> Tuple[Array, Array]:
        G_plus, G_minus = self.base.split(U)
        c = abs(self.factor)
        if self.factor >= 0.0:
            return c * np.asarray(G_plus), c * np.asarray(G_minus)
        return c * np.asarray(G_minus), c * np.asarray(G_plus)

    def split_jacobian(self, U):
        dG_plus, dG_minus = self.base.split_jacobian(U)
        c = abs(self.factor)
        if self.factor >= 0.0:
            return c * dG_plus, c * dG_minus
        return c * dG_minus, c * dG_plus


def split_by_sign(flux: ScalarFlux, U):
    """
    Sign-based split (G+, G-) of a flux at U.
    Requires G(0) = 0; returns floats for scalar input.
    """
    origin = float(np.asarray(flux.eval(0.0), dtype=float))
    if abs(origin) > ORIGIN_TOLERANCE:
        raise ConfigurationError(
            ErrorCodes.FLUX_NOT_ZERO_AT_ORIGIN,
            f"Flux {flux.name} has G(0) = {origin!r}; the sign split needs G(0) = 0",
            context={'flux': flux.name, 'G0': origin}
        )

    U = np.asarray(U, dtype=float)
    flux.check_range(U)
    G_plus, G_minus = flux._sign_split(U)
    return _as_float(G_plus), _as_float(G_minus)


def verify_split_consistency(flux: ScalarFlux, samples: Sequence[float],
                             tolerance: float = SPLIT_TOLERANCE) -> Dict[str, Any]:
    """Report the largest |G+ - G- - G| over the samples"""
    values = np.asarray(samples, dtype=float)
    G_plus, G_minus = flux.split(values)
    defect = np.abs(np.asarray(G_plus) - np.asarray(G_minus) - np.asarray(flux.eval(values)))
    defect = np.atleast_1d(defect)
    worst = int(np.argmax(defect)) if defect.size else 0
    max_defect = float(defect[worst]) if defect.size else 0.0

    report = {
        'flux': flux.name,
        'samples': int(values.size),
        'max_defect': max_defect,
        'worst_sample': float(np.atleast_1d(values)[worst]) if values.size else None,
        'tolerance': tolerance,
        'passed': max_defect <= tolerance
    }
    if not report['passed']:
        logger.warning(f"Flux split of {flux.name} inconsistent: defect {max_defect:.3e}")
    return report


def combine_fluxes(fluxes: Sequence[ScalarFlux], coefficients: Sequence[float],
                   name: Optional[str] = None) -> ScalarFlux:
    """Linear combination sum_j c_j G_j as a flux with its own sign split"""
    terms = [(flux, float(c)) for flux, c in zip(fluxes, coefficients) if c != 0.0]

    if not terms:
        return LinearFlux(0.0, name=name)
    if all(isinstance(flux, LinearFlux) for flux, _ in terms):
        return LinearFlux(sum(c * flux.speed for flux, c in terms), name=name)
    if len(terms) == 1:
        flux, c = terms[0]
        return flux if c == 1.0 else ScaledFlux(flux, c)

    low = max(flux.admissible_range[0] for flux, _ in terms)
    high = min(flux.admissible_range[1] for flux, _ in terms)
    return ScalarFlux(
        name or " + ".join(f"{c!r}*{flux.name}" for flux, c in terms),
        lambda U: sum(c * flux.eval(U) for flux, c in terms),
        lambda U: sum(c * flux.jacobian(U) for flux, c in terms),
        admissible_range=(low, high)
    )


def oblique_coefficients(theta: float) -> Tuple[float, float]:
    """(cos θ, sin θ) with exact zeros at the axis limits and a = b on the diagonal"""
    a, b = math.cos(theta), math.sin(theta)
    if abs(a) < 1e-12:
        a = 0.0
    if abs(b) < 1e-12:
        b = 0.0
    if abs(a - b) < 1e-15:
        b = a
    return a, b


class FluxLibraryEntry:
    """Named flux family: one ScalarFlux per spatial direction"""

    def __init__(self, name: str, fluxes: Sequence[ScalarFlux],
                 admissible_range: Tuple[float, float] = (-math.inf, math.inf),
                 parameters: Optional[Dict[str, Any]] = None):
        self.name = name
        self.fluxes = list(fluxes)
        self.admissible_range = admissible_range
        self.parameters = parameters or {}

    @property
    def dimension(self) -> int:
        return len(self.fluxes)


def build_flux(name: str, dimension: int = 1, a: float = 1.0, theta: Optional[float] = None,
               fluxes: Optional[Sequence[ScalarFlux]] = None) -> FluxLibraryEntry:
    """Look up a built-in flux family by name"""
    if name == 'linear':
        return FluxLibraryEntry(name, [LinearFlux(a)], parameters={'a': a})
    if name == 'uniform':
        if dimension not in (1, 2, 3):
            raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                     f"uniform advection needs dimension 1-3, got {dimension}")
        return FluxLibraryEntry(name, [LinearFlux(1.0) for _ in range(dimension)])
    if name == 'oblique':
        if theta is None:
            raise ConfigurationError(ErrorCodes.MISSING_REQUIRED_FIELD,
                                     "oblique advection needs theta")
        cos_theta, sin_theta = oblique_coefficients(theta)
        return FluxLibraryEntry(name, [LinearFlux(cos_theta), LinearFlux(sin_theta)],
                                parameters={'theta': theta})
    if name == 'burgers':
        return FluxLibraryEntry(name, [BurgersFlux()])
    if name == 'custom':
        if not fluxes:
            raise ConfigurationError(ErrorCodes.MISSING_REQUIRED_FIELD,
                                     "custom flux family needs at least one flux")
        return FluxLibraryEntry(name, fluxes)

    raise ConfigurationError(ErrorCodes.INVALID_VALUE, f"Unknown flux family: {name}",
                             context={'available': list_fluxes()})


def list_fluxes() -> List[str]:
    """Names accepted by build_flux"""
    return ['linear', 'uniform', 'oblique', 'burgers', 'custom']
