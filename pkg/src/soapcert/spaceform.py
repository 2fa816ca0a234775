"""Constant-curvature model geometries and their radial comparison functions.

Three models are supported:

* flat: points are vectors in R^n,
* hyperbolic of sectional curvature -kappa^2: the upper sheet of the
  hyperboloid <x, x> = -1/kappa^2 in R^{n+1} with the Minkowski form
  <x, y> = -x_0 y_0 + x_1 y_1 + ... (time coordinate first),
* spherical of sectional curvature +b^2: the radius-1/b sphere in R^{n+1}.

A point is any ``(..., d)`` float array in the embedding space; all kernel
operations broadcast over leading axes and are pure functions of their
arguments, safe for concurrent use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConjugatePointError,
    DiameterBoundError,
    NumericalError,
    ValidationError,
)

# Arccos/acosh arguments may leave their domain by at most this much before
# the violation is treated as real invalid input rather than roundoff.
DOMAIN_SLACK = 1e-9

# Spherical pairs closer than this (in angle b*d) to antipodal are rejected.
ANTIPODAL_SLACK = 1e-7


class Model(enum.Enum):
    FLAT = "flat"
    HYPERBOLIC = "hyperbolic"
    SPHERICAL = "spherical"


@dataclass(eq=False)
class TangentVector:
    """A tangent vector `vec` attached to the manifold point `base`.

    For the curved models tangency means the ambient bilinear form of base
    and vec vanishes; this is checked where vectors enter computations, not
    on construction.
    """

    base: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        self.base = np.asarray(self.base, float)
        self.vec = np.asarray(self.vec, float)


class ComparisonFns(NamedTuple):
    f: float | np.ndarray
    fprime: float | np.ndarray
    F: float | np.ndarray


@dataclass(frozen=True)
class SpaceForm:
    """Ambient model geometry: model kind, manifold dimension, curvature scale.

    ``curv`` is kappa > 0 for the hyperbolic model (sectional curvature
    -kappa^2), b > 0 for the spherical model (+b^2), and ignored for flat.
    """

    model: Model
    dim: int
    curv: float = 0.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError(f"manifold dimension must be >= 2, got {self.dim}")
        if self.model is Model.FLAT:
            object.__setattr__(self, "curv", 0.0)
        elif not self.curv > 0.0:
            raise ValidationError(
                f"{self.model.value} model needs a positive curvature scale")

    # -- basic structure ---------------------------------------------------

    @property
    def embedding_dim(self) -> int:
        return self.dim if self.model is Model.FLAT else self.dim + 1

    @property
    def sectional_curvature(self) -> float:
        """Signed constant sectional curvature: -kappa^2, 0 or +b^2."""
        if self.model is Model.HYPERBOLIC:
            return -self.curv ** 2
        if self.model is Model.SPHERICAL:
            return self.curv ** 2
        return 0.0

    @property
    def max_radius(self) -> float:
        """Largest admissible radial distance (pi/b spherically, else inf)."""
        if self.model is Model.SPHERICAL:
            return math.pi / self.curv
        return math.inf

    def base_point(self) -> np.ndarray:
        """A canonical point: the origin, or the embedding "pole"."""
        p = np.zeros(self.embedding_dim)
        if self.model is not Model.FLAT:
            p[0] = 1.0 / self.curv
        return p

    # -- ambient bilinear form and projections -----------------------------

    def mdot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Ambient bilinear form along the last axis (Minkowski for the
        hyperbolic model, Euclidean otherwise).  Restricted to a tangent
        space this is the Riemannian metric."""
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        out = np.sum(u * v, axis=-1)
        if self.model is Model.HYPERBOLIC:
            out = out - 2.0 * u[..., 0] * v[..., 0]
        return out

    def norm(self, v: np.ndarray) -> np.ndarray:
        """Length of tangent vectors under the model metric."""
        sq = self.mdot(v, v)
        return np.sqrt(np.maximum(sq, 0.0))

    def manifold_residual(self, x: np.ndarray) -> np.ndarray:
        """|<x, x> - target| of the defining quadric equation."""
        if self.model is Model.FLAT:
            return np.zeros(np.shape(x)[:-1])
        target = -1.0 / self.curv ** 2 if self.model is Model.HYPERBOLIC \
            else 1.0 / self.curv ** 2
        return np.abs(self.mdot(x, x) - target)

    def project_point(self, x: np.ndarray) -> np.ndarray:
        """Radially project ambient coordinates onto the model manifold."""
        x = np.asarray(x, float)
        if x.shape[-1] != self.embedding_dim:
            raise ValidationError(
                f"expected {self.embedding_dim} coordinates, got {x.shape[-1]}")
        if self.model is Model.FLAT:
            return x
        if self.model is Model.SPHERICAL:
            n = np.linalg.norm(x, axis=-1, keepdims=True)
            if np.any(n < 1e-12):
                raise ValidationError("cannot project the origin onto the sphere")
            return x / (self.curv * n)
        if np.any(x[..., 0] <= 0.0):
            raise ValidationError("hyperbolic points need a positive time coordinate")
        m = -self.mdot(x, x)
        if np.any(m <= 0.0):
            raise ValidationError("coordinates are not timelike; cannot project")
        return x / (self.curv * np.sqrt(m))[..., None]

    def tangent_project(self, p: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Project an ambient vector w onto the tangent space at p."""
        if self.model is Model.FLAT:
            return np.asarray(w, float)
        coef = self.mdot(w, p) * self.curv ** 2
        if self.model is Model.HYPERBOLIC:
            return w + coef[..., None] * p
        return w - coef[..., None] * p

    def tangency_residual(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.model is Model.FLAT:
            return np.zeros(np.broadcast(
                np.asarray(p)[..., 0], np.asarray(v)[..., 0]).shape)
        return np.abs(self.mdot(p, v)) * self.curv

    # -- distances, geodesics ----------------------------------------------

    def dist(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Geodesic distance.  Uses chord-based formulas, which are exact
        for coincident points and stable for nearby ones."""
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        if self.model is Model.FLAT:
            return np.linalg.norm(q - p, axis=-1)
        k = self.curv
        if self.model is Model.HYPERBOLIC:
            chord_sq = np.maximum(self.mdot(q - p, q - p), 0.0)
            return 2.0 / k * np.arcsinh(0.5 * k * np.sqrt(chord_sq))
        half = 0.5 * k * np.linalg.norm(q - p, axis=-1)
        if np.any(half > 1.0 + DOMAIN_SLACK):
            raise NumericalError("spherical chord exceeds the embedded diameter")
        d = 2.0 / k * np.arcsin(np.minimum(half, 1.0))
        if np.any(k * d >= math.pi - ANTIPODAL_SLACK):
            raise DiameterBoundError("diameter bound violated: antipodal pair")
        return d

    def exp(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Point reached from p after unit time along the geodesic with
        initial velocity v (v tangent at p)."""
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        if self.model is Model.FLAT:
            return p + v
        k = self.curv
        t = self.norm(v)
        if self.model is Model.SPHERICAL and np.any(k * t >= math.pi):
            raise ConjugatePointError(
                "geodesic step reaches the conjugate radius pi/b")
        kt = k * t
        if self.model is Model.HYPERBOLIC:
            c = np.cosh(kt)
            s = np.where(kt < 1e-8, 1.0 + kt ** 2 / 6.0,
                         np.sinh(np.maximum(kt, 1e-300)) / np.maximum(kt, 1e-300))
        else:
            c = np.cos(kt)
            s = np.sinc(kt / math.pi)
        out = c[..., None] * p + s[..., None] * v
        # renormalize to kill accumulated drift off the quadric
        return self.project_point(out)

    def log(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Initial velocity of the geodesic from p reaching q at unit time."""
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        if self.model is Model.FLAT:
            return q - p
        d = self.dist(p, q)
        if np.any(d < 1e-13):
            raise NumericalError("log map of (nearly) coincident points")
        w = self.tangent_project(p, q - p)
        wn = self.norm(w)
        if np.any(wn < 1e-300):
            raise NumericalError("log map direction is degenerate")
        return (d / wn)[..., None] * w

    def geodesic_point(self, p: np.ndarray, q: np.ndarray, t) -> np.ndarray:
        """Point at parameter t in [0, 1] on the geodesic from p to q."""
        if self.model is Model.FLAT:
            t = np.asarray(t, float)
            return p + t[..., None] * (q - p) if t.ndim else p + t * (q - p)
        v = self.log(p, q)
        t = np.asarray(t, float)
        return self.exp(p, t[..., None] * v if t.ndim else t * v)

    def angle_between(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Angle in [0, pi] between tangent vectors at a common base."""
        nu = self.norm(u)
        nv = self.norm(v)
        if np.any(nu < 1e-14) or np.any(nv < 1e-14):
            raise ValidationError("angle of a zero vector is undefined")
        c = self.mdot(u, v) / (nu * nv)
        return np.arccos(np.clip(c, -1.0, 1.0))

    def tangent_basis(self, p: np.ndarray) -> np.ndarray:
        """Rows form an orthonormal basis of the tangent space at p
        (orthonormal in the model metric)."""
        d = self.embedding_dim
        if self.model is Model.FLAT:
            return np.eye(d)
        basis = []
        for i in range(d):
            v = self.tangent_project(p, np.eye(d)[i])
            for _ in range(2):  # re-orthogonalize to absorb cancellation
                for b in basis:
                    v = v - self.mdot(v, b) * b
            n = self.norm(v)
            if n > 1e-8:
                basis.append(v / n)
            if len(basis) == self.dim:
                break
        if len(basis) != self.dim:
            raise NumericalError("failed to build a tangent basis")
        return np.stack(basis)

    # -- radial comparison functions ----------------------------------------

    def comparison(self, r) -> ComparisonFns:
        """The radial profile f with f'' + K f = 0, f(0)=0, f'(0)=1, together
        with f' and the primitive F(r) = integral_0^r f.

        f/fprime give the geodesic-circle curvature f'/f; F is the area
        density of geodesic sectors.
        """
        r = np.asarray(r, float)
        if np.any(r < 0.0):
            raise ValidationError("radial argument must be nonnegative")
        k = self.curv
        if self.model is Model.FLAT:
            return ComparisonFns(r + 0.0, np.ones_like(r), r ** 2 / 2.0)
        if self.model is Model.HYPERBOLIC:
            return ComparisonFns(np.sinh(k * r) / k, np.cosh(k * r),
                                 (np.cosh(k * r) - 1.0) / k ** 2)
        if np.any(k * r >= math.pi):
            raise ConjugatePointError("conjugate point reached")
        return ComparisonFns(np.sin(k * r) / k, np.cos(k * r),
                             (1.0 - np.cos(k * r)) / k ** 2)

    def circle_curvature(self, r) -> np.ndarray:
        """Geodesic curvature f'(r)/f(r) of the distance circle of radius r."""
        f, fp, _ = self.comparison(r)
        return fp / f


# ---------------------------------------------------------------------------
# Operation-style wrappers working with explicit tangent vectors.

def _check_same_base(space: SpaceForm, u: TangentVector, v: TangentVector):
    if float(space.dist(u.base, v.base)) >= 1e-9:
        raise ValidationError("tangent vectors have mismatched base points")


def inner(space: SpaceForm, u: TangentVector, v: TangentVector) -> float:
    """Riemannian inner product of two tangent vectors at a common base."""
    _check_same_base(space, u, v)
    return float(space.mdot(u.vec, v.vec))


def angle(space: SpaceForm, u: TangentVector, v: TangentVector) -> float:
    """Angle in [0, pi] between two nonzero tangent vectors at a common base."""
    _check_same_base(space, u, v)
    return float(space.angle_between(u.vec, v.vec))


def dist(space: SpaceForm, p: np.ndarray, q: np.ndarray) -> float:
    return float(space.dist(p, q))


def exp_map(space: SpaceForm, p: np.ndarray, v: TangentVector) -> np.ndarray:
    """Geodesic endpoint from p with initial velocity v; v must be tangent."""
    if not np.allclose(v.base, p, atol=1e-9):
        raise ValidationError("vector is not based at the given point")
    scale = max(1.0, float(space.norm(v.vec)))
    if float(space.tangency_residual(p, v.vec)) > 1e-9 * scale:
        raise ValidationError("vector is not tangent to the manifold at p")
    return space.exp(p, v.vec)


def log_map(space: SpaceForm, p: np.ndarray, q: np.ndarray) -> TangentVector:
    """Initial velocity of the geodesic segment from p to q."""
    return TangentVector(base=np.asarray(p, float), vec=space.log(p, q))


def comparison_fns(space: SpaceForm, r: float) -> ComparisonFns:
    f, fp, big_f = space.comparison(float(r))
    return ComparisonFns(float(f), float(fp), float(big_f))
