"""Geodesic cones over a graph and their constant-curvature developments.

The cone over a graph from an apex p is the union of the geodesic segments
from p to every graph point.  Unrolling it while preserving the distance
from the apex and the boundary arclength produces a 2-D cone in the model
plane of the same curvature; in polar coordinates the unrolled metric is
dr^2 + f(r)^2 dtheta^2, so the swept angle obeys

    dtheta/ds = sqrt(max(0, 1 - (dr/ds)^2)) / f(r).

Apex densities, areas, boundary conormal curvatures and the closed-cone
angle-balance residual are all computed from this data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _num
from .errors import ApexOnGraphError, ConjugatePointError, NumericalError
from .graph import EdgeCurve, EmbeddedGraph, edge_unit_tangents, vertex_star
from .spaceform import Model, SpaceForm

# Distances from apex to the graph below this are treated as a collision.
APEX_CLEARANCE = 1e-6

# |dr/ds| may exceed 1 by at most this much before sampling is deemed bad.
RADIAL_SPEED_SLACK = 1e-6


@dataclass(eq=False)
class RadialProfile:
    """Per-sample apex distances r, radial speeds dr/ds, and unit radial
    directions u (pointing away from the apex) along one edge."""

    s: np.ndarray
    r: np.ndarray
    rprime: np.ndarray
    u: np.ndarray


@dataclass(eq=False)
class EdgeDevelopment:
    edge_id: object
    s: np.ndarray
    r: np.ndarray
    rprime: np.ndarray
    theta: np.ndarray
    khat_nu: np.ndarray


@dataclass(eq=False)
class ConeDevelopment:
    apex: np.ndarray
    per_edge: list[EdgeDevelopment]
    hat_density: float
    hat_area: float
    plane: SpaceForm
    plane_apex: np.ndarray


def _check_apex(space: SpaceForm, apex: np.ndarray, samples: np.ndarray):
    r = space.dist(apex, samples)
    if np.any(r <= APEX_CLEARANCE):
        raise ApexOnGraphError("apex lies on the graph")
    if space.model is Model.SPHERICAL and np.any(r >= space.max_radius - 1e-6):
        raise ConjugatePointError(
            "apex sees a graph point at or beyond the conjugate radius pi/b")
    return r


def radial_profile(space: SpaceForm, apex: np.ndarray,
                   edge: EdgeCurve) -> RadialProfile:
    """Distances to the apex, their arclength derivative, and the outward
    radial directions along an edge.  rprime is the inner product of the
    radial direction with the unit curve tangent, which equals dr/ds."""
    apex = np.asarray(apex, float)
    r = _check_apex(space, apex, edge.samples)
    to_apex = space.log(edge.samples, np.broadcast_to(apex, edge.samples.shape))
    u = -to_apex / space.norm(to_apex)[:, None]
    t = edge_unit_tangents(space, edge)
    rprime = space.mdot(u, t)
    return RadialProfile(s=edge.s.copy(), r=r, rprime=rprime, u=u)


def _clamped_radial_speed(rprime: np.ndarray) -> np.ndarray:
    over = np.abs(rprime) - 1.0
    if np.any(over > RADIAL_SPEED_SLACK):
        raise NumericalError(
            "arclength inconsistency: |dr/ds| exceeds 1 beyond tolerance")
    return np.clip(rprime, -1.0, 1.0)


def development_plane(space: SpaceForm) -> tuple[SpaceForm, np.ndarray]:
    """The 2-D model space of the same curvature, with its base point as the
    unrolled apex."""
    plane = SpaceForm(model=space.model, dim=2, curv=space.curv)
    return plane, plane.base_point()


def developed_points(plane: SpaceForm, r: np.ndarray,
                     theta: np.ndarray) -> np.ndarray:
    """Embed polar development coordinates (r, theta) about the base point
    of the 2-D model plane."""
    if plane.model is Model.FLAT:
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    k = plane.curv
    if plane.model is Model.HYPERBOLIC:
        return np.stack([np.cosh(k * r) / k,
                         np.sinh(k * r) * np.cos(theta) / k,
                         np.sinh(k * r) * np.sin(theta) / k], axis=-1)
    return np.stack([np.cos(k * r) / k,
                     np.sin(k * r) * np.cos(theta) / k,
                     np.sin(k * r) * np.sin(theta) / k], axis=-1)


def cone_conormal_curvature(space: SpaceForm, apex: np.ndarray,
                            edge: EdgeCurve) -> np.ndarray:
    """Curvature vector of the edge dotted with the cone's outward conormal
    (tangent to the cone, orthogonal to the curve, pointing away from the
    apex), at interior samples.  NaN marks samples where the curve runs
    radially and the conormal is undefined."""
    from .curvature import edge_curvature

    prof = radial_profile(space, apex, edge)
    ec = edge_curvature(space, edge)
    t = edge_unit_tangents(space, edge)
    nu = prof.u - prof.rprime[:, None] * t
    nu = nu[1:-1]
    norms = space.norm(nu)
    out = np.full(len(norms), np.nan)
    ok = norms >= 1e-8
    out[ok] = space.mdot(ec.kvec[ok], nu[ok] / norms[ok][:, None])
    return out


def _extend_interior(values: np.ndarray) -> np.ndarray:
    """Pad interior-sample values to full length by repeating the nearest
    interior value at the two endpoint samples."""
    full = np.empty(len(values) + 2)
    full[1:-1] = values
    full[0] = values[0] if len(values) else np.nan
    full[-1] = values[-1] if len(values) else np.nan
    return full


def develop_cone(space: SpaceForm, apex: np.ndarray,
                 graph: EmbeddedGraph) -> ConeDevelopment:
    """Unroll the cone edge by edge.  The swept angle starts at zero on each
    edge and accumulates the polar development rate; the developed curve is
    re-embedded in the 2-D model plane and its conormal curvature is
    measured with the same stencils as on the ambient side."""
    apex = np.asarray(apex, float)
    plane, plane_apex = development_plane(space)
    per_edge = []
    total_angle = 0.0
    hat_area = 0.0
    for edge in graph.edges:
        prof = radial_profile(space, apex, edge)
        rp = _clamped_radial_speed(prof.rprime)
        f, _, big_f = space.comparison(prof.r)
        theta_prime = np.sqrt(np.maximum(1.0 - rp ** 2, 0.0)) / f
        theta = _num.cumulative_quadratic(edge.s, theta_prime, nonnegative=True)
        dev_samples = developed_points(plane, prof.r, theta)
        dev_edge = EdgeCurve(id=edge.id, endpoints=edge.endpoints,
                             samples=dev_samples, s=edge.s.copy())
        khat = _extend_interior(
            cone_conormal_curvature(plane, plane_apex, dev_edge))
        per_edge.append(EdgeDevelopment(
            edge_id=edge.id, s=edge.s.copy(), r=prof.r, rprime=rp,
            theta=theta, khat_nu=khat))
        total_angle += float(theta[-1])
        hat_area += _num.trapezoid(big_f * theta_prime, edge.s)
    return ConeDevelopment(apex=apex, per_edge=per_edge,
                           hat_density=total_angle / (2.0 * math.pi),
                           hat_area=hat_area, plane=plane,
                           plane_apex=plane_apex)


def ambient_cone_density(space: SpaceForm, apex: np.ndarray,
                         graph: EmbeddedGraph) -> float:
    """Apex density of the ambient cone: total length of the spherical image
    s -> (unit initial direction of the geodesic apex -> curve point) on the
    unit tangent sphere at the apex, divided by 2 pi.  Computed as the sum of
    angles between consecutive image directions."""
    apex = np.asarray(apex, float)
    total = 0.0
    for edge in graph.edges:
        _check_apex(space, apex, edge.samples)
        w = space.log(np.broadcast_to(apex, edge.samples.shape), edge.samples)
        w = w / space.norm(w)[:, None]
        c = np.clip(space.mdot(w[:-1], w[1:]), -1.0, 1.0)
        total += float(np.sum(np.arccos(c)))
    return total / (2.0 * math.pi)


def _radial_tangents(space: SpaceForm, apex: np.ndarray, u0: np.ndarray,
                     t: np.ndarray) -> np.ndarray:
    """Unit tangents of the geodesics exp_apex(t * u0) at radial parameter t;
    u0 has shape (..., d), t broadcasts against its leading axes."""
    if space.model is Model.FLAT:
        return np.broadcast_to(u0, np.broadcast(t[..., None], u0).shape).copy()
    k = space.curv
    if space.model is Model.HYPERBOLIC:
        return k * np.sinh(k * t)[..., None] * apex + np.cosh(k * t)[..., None] * u0
    return -k * np.sin(k * t)[..., None] * apex + np.cos(k * t)[..., None] * u0


def ambient_cone_area(space: SpaceForm, apex: np.ndarray,
                      graph: EmbeddedGraph, radial_intervals: int = 32) -> float:
    """Area (with multiplicity) of the ruled cone surface, one edge at a
    time.  The radial direction is sampled on a composite-Simpson grid; the
    transverse stretch is the component of the s-derivative of the ruling
    orthogonal to the unit radial tangent."""
    apex = np.asarray(apex, float)
    tau = np.linspace(0.0, 1.0, radial_intervals + 1)
    w_tau = _num.composite_simpson_weights(tau)
    total = 0.0
    for edge in graph.edges:
        prof = radial_profile(space, apex, edge)
        to_pt = space.log(np.broadcast_to(apex, edge.samples.shape), edge.samples)
        u0 = to_pt / space.norm(to_pt)[:, None]
        t_grid = prof.r[:, None] * tau[None, :]                # (N, m)
        points = space.exp(np.broadcast_to(apex, (*t_grid.shape, apex.shape[0])),
                           t_grid[..., None] * u0[:, None, :])  # (N, m, d)
        dpoints = _num.curve_first_derivative(edge.s, points)   # d/ds at fixed tau
        dpoints = space.tangent_project(points, dpoints)
        radial = _radial_tangents(space, apex, u0[:, None, :], t_grid)
        perp = dpoints - space.mdot(dpoints, radial)[..., None] * radial
        integrand = space.norm(perp) @ w_tau * prof.r           # (N,)
        total += _num.trapezoid(integrand, edge.s)
    return total


def gauss_bonnet_residual(space: SpaceForm, apex: np.ndarray,
                          graph: EmbeddedGraph,
                          dev: ConeDevelopment | None = None) -> float:
    """Absolute defect of the developed cone's angle balance,

        2 pi Theta_hat - K Area_hat + sum_edges int khat.nu ds
            - sum_vertices sum_ends (pi/2 - angle(T_end, toward apex)),

    with K the model's sectional curvature.  Zero in exact arithmetic; the
    numerical value shrinks at second order under sample refinement.
    """
    apex = np.asarray(apex, float)
    if dev is None:
        dev = develop_cone(space, apex, graph)
    k_ambient = space.sectional_curvature
    total = 2.0 * math.pi * dev.hat_density - k_ambient * dev.hat_area
    for ed in dev.per_edge:
        vals = np.nan_to_num(ed.khat_nu, nan=0.0)
        total += _num.trapezoid(vals, ed.s)
    for vertex in graph.vertices:
        q = vertex.point
        toward_apex = space.log(q, apex)
        for tv in vertex_star(graph, vertex.id):
            ang = float(space.angle_between(tv.vec, toward_apex))
            total -= math.pi / 2.0 - ang
    return abs(total)
