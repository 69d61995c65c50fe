"""Margin losses and their even/odd decomposition.

A margin loss ``l`` penalizes a prediction through the margin ``y * <theta, x>``.
Every such loss splits uniquely into an even and an odd part,

    l(x) = l_e(x) + l_o(x),   l_e(x) = (l(x) + l(-x)) / 2,   l_o(x) = (l(x) - l(-x)) / 2.

Losses whose odd part is exactly a line, ``l_o(x) = a * x``, are called
linear-odd here.  For them the empirical risk factors into a label-free term
plus ``a * <theta, mu>`` where ``mu`` is the mean operator (see
:mod:`meanop.risks`).  The slope convention is always ``a = (l(x) - l(-x)) / (2x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

__all__ = [
    "LossSpec",
    "AffineBound",
    "catalog",
    "get_loss",
    "odd_part",
    "even_part",
    "lol_slope_check",
    "craft_lol",
    "affine_odd_bound",
    "logistic",
    "square",
    "matsushita",
    "unhinged",
    "perceptron",
    "double_hinge",
    "rho_loss",
    "zero_one",
    "hinge",
    "exponential",
    "huber",
    "DEFAULT_LOL_GRID",
]

# Grid used for linear-odd detection and symmetry checks.  It straddles zero
# and mixes small and large magnitudes so piecewise losses cannot masquerade
# as linear-odd by hitting only one linear piece.
DEFAULT_LOL_GRID = np.array(
    [-10.0, -5.0, -2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
)


@dataclass(frozen=True)
class LossSpec:
    """A margin loss with its decomposition metadata.

    ``eval`` and ``subgrad`` are vectorized maps (scalars or ndarrays in,
    same shape out).  ``subgrad`` returns one element of the subdifferential;
    at kinks the right derivative is used so runs are deterministic.
    ``odd_slope`` is present iff the loss is linear-odd.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    subgrad: Callable[[np.ndarray], np.ndarray]
    odd_slope: Optional[float] = None
    lipschitz: Optional[float] = None
    strong_convexity: Optional[float] = None
    convex: bool = True

    @property
    def is_linear_odd(self) -> bool:
        return self.odd_slope is not None

    def __repr__(self) -> str:  # avoid dumping callables
        return f"LossSpec({self.name!r}, odd_slope={self.odd_slope})"


@dataclass(frozen=True)
class AffineBound:
    """Affine majorant ``l_o(x) <= slope * x + intercept`` of an odd part.

    ``exact`` marks an analytically derived bound; otherwise slope and
    intercept come from numeric asymptote estimation and a grid supremum.
    """

    slope: float
    intercept: float
    exact: bool


class NoAffineOddBoundError(ValueError):
    """The loss has no finite asymptotes, so no affine odd bound exists."""


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("loss argument must be finite")
    return x


# ---------------------------------------------------------------------------
# catalog losses


def logistic() -> LossSpec:
    """log(1 + exp(-x)); linear-odd with slope -1/2."""
    return LossSpec(
        name="logistic",
        eval=lambda x: np.logaddexp(0.0, -np.asarray(x, dtype=float)),
        subgrad=lambda x: -expit(-np.asarray(x, dtype=float)),
        odd_slope=-0.5,
        lipschitz=1.0,
        convex=True,
    )


def square() -> LossSpec:
    """(1 - x)^2; linear-odd with slope -2, 2-strongly convex."""
    return LossSpec(
        name="square",
        eval=lambda x: (1.0 - np.asarray(x, dtype=float)) ** 2,
        subgrad=lambda x: 2.0 * (np.asarray(x, dtype=float) - 1.0),
        odd_slope=-2.0,
        strong_convexity=2.0,
        convex=True,
    )


def matsushita() -> LossSpec:
    """sqrt(1 + x^2) - x; linear-odd with slope -1."""
    return LossSpec(
        name="matsushita",
        eval=lambda x: np.hypot(1.0, np.asarray(x, dtype=float))
        - np.asarray(x, dtype=float),
        subgrad=lambda x: np.asarray(x, dtype=float)
        / np.hypot(1.0, np.asarray(x, dtype=float))
        - 1.0,
        odd_slope=-1.0,
        lipschitz=2.0,
        convex=True,
    )


def unhinged() -> LossSpec:
    """1 - x; the linear loss, slope -1."""
    return LossSpec(
        name="unhinged",
        eval=lambda x: 1.0 - np.asarray(x, dtype=float),
        subgrad=lambda x: np.full_like(np.asarray(x, dtype=float), -1.0),
        odd_slope=-1.0,
        lipschitz=1.0,
        convex=True,
    )


def perceptron() -> LossSpec:
    """max(0, -x); linear-odd with slope -1/2."""
    x_arr = lambda x: np.asarray(x, dtype=float)
    return LossSpec(
        name="perceptron",
        eval=lambda x: np.maximum(0.0, -x_arr(x)),
        subgrad=lambda x: np.where(x_arr(x) < 0.0, -1.0, 0.0),
        odd_slope=-0.5,
        lipschitz=1.0,
        convex=True,
    )


def double_hinge() -> LossSpec:
    """max(-x, max(0, 1 - x) / 2); linear-odd with slope -1/2."""
    x_arr = lambda x: np.asarray(x, dtype=float)
    return LossSpec(
        name="double_hinge",
        eval=lambda x: np.maximum(-x_arr(x), 0.5 * np.maximum(0.0, 1.0 - x_arr(x))),
        subgrad=lambda x: np.where(x_arr(x) < -1.0, -1.0, np.where(x_arr(x) < 1.0, -0.5, 0.0)),
        odd_slope=-0.5,
        lipschitz=1.0,
        convex=True,
    )


def rho_loss(rho: float = 1.0) -> LossSpec:
    """rho*|x| - rho*x + 1; linear-odd with slope -rho.

    Upper-bounds the 0/1 loss and meets it at l(0) = 1 for any rho > 0.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    x_arr = lambda x: np.asarray(x, dtype=float)
    return LossSpec(
        name=f"rho:{rho:g}",
        eval=lambda x: rho * np.abs(x_arr(x)) - rho * x_arr(x) + 1.0,
        subgrad=lambda x: np.where(x_arr(x) < 0.0, -2.0 * rho, 0.0),
        odd_slope=-rho,
        lipschitz=2.0 * rho,
        convex=True,
    )


def zero_one() -> LossSpec:
    """1{x <= 0}; the step convention gives the decomposition
    l_e(0) = 1, l_o(0) = 0 with l_o(x) = -sign(x)/2 elsewhere."""
    x_arr = lambda x: np.asarray(x, dtype=float)
    return LossSpec(
        name="zero_one",
        eval=lambda x: np.where(x_arr(x) <= 0.0, 1.0, 0.0),
        subgrad=lambda x: np.zeros_like(x_arr(x)),
        odd_slope=None,
        lipschitz=None,
        convex=False,
    )


def hinge() -> LossSpec:
    """max(0, 1 - x); not linear-odd."""
    x_arr = lambda x: np.asarray(x, dtype=float)
    return LossSpec(
        name="hinge",
        eval=lambda x: np.maximum(0.0, 1.0 - x_arr(x)),
        subgrad=lambda x: np.where(x_arr(x) < 1.0, -1.0, 0.0),
        odd_slope=None,
        lipschitz=1.0,
        convex=True,
    )


def exponential() -> LossSpec:
    """exp(-x); odd part -sinh(x) has no affine majorant."""
    return LossSpec(
        name="exponential",
        eval=lambda x: np.exp(-np.asarray(x, dtype=float)),
        subgrad=lambda x: -np.exp(-np.asarray(x, dtype=float)),
        odd_slope=None,
        lipschitz=None,
        convex=True,
    )


def huber(delta: float = 1.0) -> LossSpec:
    """Huber function applied to the margin gap 1 - x.

    Quadratic for |1 - x| <= delta, linear beyond.  Continuous with finite
    asymptote slopes -delta and +delta, hence its (nonlinear) odd part admits
    an affine bound.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")

    def _eval(x):
        t = 1.0 - np.asarray(x, dtype=float)
        return np.where(
            np.abs(t) <= delta, 0.5 * t * t, delta * (np.abs(t) - 0.5 * delta)
        )

    def _subgrad(x):
        t = 1.0 - np.asarray(x, dtype=float)
        return np.where(np.abs(t) <= delta, -t, -delta * np.sign(t))

    return LossSpec(
        name=f"huber:{delta:g}",
        eval=_eval,
        subgrad=_subgrad,
        odd_slope=None,
        lipschitz=delta,
        convex=True,
    )


def catalog() -> list[LossSpec]:
    """All named losses; the linear-odd members carry their odd slope."""
    return [
        logistic(),
        square(),
        matsushita(),
        unhinged(),
        perceptron(),
        double_hinge(),
        rho_loss(1.0),
        zero_one(),
        hinge(),
        exponential(),
    ]


def get_loss(name: str) -> LossSpec:
    """Resolve a stable lowercase identifier to a LossSpec.

    Parameterized families use ``family:value``, e.g. "rho:0.5" or "huber:2".
    """
    base, _, arg = name.partition(":")
    if base == "rho":
        return rho_loss(float(arg) if arg else 1.0)
    if base == "huber":
        return huber(float(arg) if arg else 1.0)
    simple = {
        "logistic": logistic,
        "square": square,
        "matsushita": matsushita,
        "unhinged": unhinged,
        "perceptron": perceptron,
        "double_hinge": double_hinge,
        "zero_one": zero_one,
        "hinge": hinge,
        "exponential": exponential,
    }
    if base in simple and not arg:
        return simple[base]()
    raise ValueError(f"unknown loss name: {name!r}")


# ---------------------------------------------------------------------------
# decomposition and crafting


def odd_part(loss: LossSpec, x) -> np.ndarray:
    """(l(x) - l(-x)) / 2, the odd component of the loss."""
    x = _check_finite(x)
    return (loss.eval(x) - loss.eval(-x)) / 2.0


def even_part(loss: LossSpec, x) -> np.ndarray:
    """(l(x) + l(-x)) / 2, the even component of the loss."""
    x = _check_finite(x)
    return (loss.eval(x) + loss.eval(-x)) / 2.0


def lol_slope_check(
    loss: LossSpec, grid: Sequence[float] | np.ndarray = DEFAULT_LOL_GRID, rtol: float = 1e-9
) -> Optional[float]:
    """Detect whether the odd part is a line on the grid.

    Returns the slope a when odd_part(x) / x is constant to relative
    tolerance ``rtol`` across all nonzero grid points, otherwise None.
    The grid must contain at least 8 nonzero points on both sides of zero.
    """
    grid = np.asarray(grid, dtype=float)
    nz = grid[grid != 0.0]
    if nz.size < 8 or not (nz.min() < 0.0 < nz.max()):
        raise ValueError("grid needs >= 8 nonzero points spanning a sign change")
    ratios = odd_part(loss, nz) / nz
    a = float(np.median(ratios))
    if np.all(np.abs(ratios - a) <= rtol * (1.0 + abs(a))):
        return a
    return None


def craft_lol(
    even_fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    name: str = "crafted",
    even_subgrad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    grid: Sequence[float] | np.ndarray = DEFAULT_LOL_GRID,
) -> LossSpec:
    """Build the linear-odd loss l(x) = even_fn(x) + a*x.

    Any even function yields a valid linear-odd loss; symmetry of
    ``even_fn`` is verified on the grid before construction.  When no
    subgradient for the even part is supplied, a central difference is used
    (at a kink of an even function this lands inside the subdifferential).
    """
    grid = np.asarray(grid, dtype=float)
    fe = np.asarray(even_fn(grid), dtype=float)
    fe_neg = np.asarray(even_fn(-grid), dtype=float)
    if not np.allclose(fe, fe_neg, rtol=0.0, atol=1e-12 * (1.0 + np.abs(fe).max())):
        raise ValueError("even_fn fails the symmetry check on the grid")

    if even_subgrad is None:
        h = 1e-7

        def even_subgrad(x):  # noqa: E731 - closure over even_fn
            x = np.asarray(x, dtype=float)
            return (np.asarray(even_fn(x + h)) - np.asarray(even_fn(x - h))) / (2.0 * h)

    return LossSpec(
        name=name,
        eval=lambda x: np.asarray(even_fn(np.asarray(x, dtype=float)), dtype=float)
        + a * np.asarray(x, dtype=float),
        subgrad=lambda x: np.asarray(even_subgrad(np.asarray(x, dtype=float)), dtype=float) + a,
        odd_slope=float(a),
        convex=True,
    )


def _asymptote_slope(loss: LossSpec, sign: float) -> float:
    """Chord-based slope estimate of l at sign * infinity.

    Slopes are estimated on {1e3, 5e3, 1e4} scaled by ``sign``; disagreeing
    chords or non-finite values mean there is no asymptote.
    """
    x1, x2, x3 = sign * 1e3, sign * 5e3, sign * 1e4
    with np.errstate(over="ignore"):
        v1, v2, v3 = (float(loss.eval(x)) for x in (x1, x2, x3))
    if not all(map(math.isfinite, (v1, v2, v3))):
        raise NoAffineOddBoundError(f"no affine odd bound: {loss.name}")
    c_full = (v3 - v1) / (x3 - x1)
    c_half = (v3 - v2) / (x3 - x2)
    if abs(c_full - c_half) > 1e-6 * (1.0 + abs(c_full)):
        raise NoAffineOddBoundError(f"no affine odd bound: {loss.name}")
    return c_full


def affine_odd_bound(
    loss: LossSpec,
    grid: Optional[np.ndarray] = None,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
) -> AffineBound:
    """Affine majorant of the odd part for losses with two finite asymptotes.

    slope = (c1 + c2) / 2 where c1, c2 are the asymptote slopes at +inf and
    -inf (supplied, or estimated from chords at the grid extremes); the
    intercept is the supremum of odd_part(x) - slope*x over the grid.  Only
    the hinge gets the closed-form pair (-1/2, 1/2).
    """
    if loss.name == "hinge":
        return AffineBound(slope=-0.5, intercept=0.5, exact=True)
    if grid is None:
        grid = np.linspace(-50.0, 50.0, 2001)
    if c1 is None:
        c1 = _asymptote_slope(loss, +1.0)
    if c2 is None:
        c2 = _asymptote_slope(loss, -1.0)
    slope = 0.5 * (c1 + c2)
    intercept = float(np.max(odd_part(loss, grid) - slope * grid))
    return AffineBound(slope=float(slope), intercept=intercept, exact=False)
