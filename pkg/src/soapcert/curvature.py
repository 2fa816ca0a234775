"""Cone total curvature: geodesic-curvature integrals over edge interiors
plus the vertex contributions obtained by maximizing over unit tangent
directions.

The vertex contribution at q is

    sup over unit e in T_q of  sum_k (pi/2 - angle(T_k, e)),

with T_k the unit tangents pointing into the incident edge-ends.  For a
valence-2 vertex this is the exterior angle of the curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _num
from .errors import ValidationError
from .graph import EdgeCurve, EmbeddedGraph, edge_unit_tangents, vertex_star
from .spaceform import SpaceForm, TangentVector

GRID_ORACLE_MAX_DIM = 4


@dataclass(eq=False)
class EdgeCurvatureSamples:
    """Curvature estimates at the interior samples of one edge."""

    s: np.ndarray
    kvec: np.ndarray
    kmag: np.ndarray


@dataclass(eq=False)
class EdgeTC:
    edge_id: object
    integral: float


@dataclass(eq=False)
class VertexTC:
    vertex_id: object
    tc: float
    argmax_dir: TangentVector


@dataclass(eq=False)
class TCReport:
    per_edge: list[EdgeTC]
    per_vertex: list[VertexTC]
    total: float


def edge_curvature(space: SpaceForm, edge: EdgeCurve) -> EdgeCurvatureSamples:
    """Geodesic-curvature vector of the curve in the model space at interior
    samples: the second difference of the embedding, projected to the tangent
    space, with its component along the unit tangent removed."""
    if len(edge.s) < 3:
        raise ValidationError(f"edge {edge.id!r} has fewer than 3 samples")
    acc = _num.curve_second_derivative_interior(edge.s, edge.samples)
    mid = edge.samples[1:-1]
    acc = space.tangent_project(mid, acc)
    t = edge_unit_tangents(space, edge)[1:-1]
    kvec = acc - space.mdot(acc, t)[:, None] * t
    kmag = space.norm(kvec)
    return EdgeCurvatureSamples(s=edge.s[1:-1].copy(), kvec=kvec, kmag=kmag)


def edge_total_curvature(space: SpaceForm, edge: EdgeCurve) -> float:
    """Integral of |curvature vector| ds over the edge, composite trapezoid.

    The one-sided stencils at the two endpoint samples are not trusted (the
    curve is only C^1 there when edges meet); the end subintervals instead
    carry the nearest interior value.
    """
    ec = edge_curvature(space, edge)
    return _num.integrate_with_end_fill(edge.s, ec.kmag)


# ---------------------------------------------------------------------------
# vertex contribution

def _star_objective(tangent_coords: np.ndarray):
    """Build value/gradient callables of g(e) = sum_k (pi/2 - angle(T_k, e))
    for unit e given the star's tangents in orthonormal coordinates."""
    T = tangent_coords

    def value(E: np.ndarray) -> np.ndarray:
        dots = np.clip(E @ T.T, -1.0, 1.0)
        return np.sum(math.pi / 2.0 - np.arccos(dots), axis=-1)

    def gradient(E: np.ndarray) -> np.ndarray:
        # d/de of -arccos(<T, e>); the clamp keeps the slope finite at the
        # nonsmooth directions e = +-T_k.
        dots = np.clip(E @ T.T, -1.0 + 1e-9, 1.0 - 1e-9)
        coef = 1.0 / np.sqrt(1.0 - dots ** 2)
        return coef @ T

    return value, gradient


def _ascent_on_sphere(starts: np.ndarray, value, gradient,
                      max_iter: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Projected-gradient ascent with backtracking, run on all starts in
    lockstep.  Returns (directions, values) after convergence."""
    E = starts / np.linalg.norm(starts, axis=1, keepdims=True)
    g = value(E)
    step = np.full(len(E), 0.25)
    for _ in range(max_iter):
        grad = gradient(E)
        grad = grad - np.sum(grad * E, axis=1, keepdims=True) * E
        cand = E + step[:, None] * grad
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        gc = value(cand)
        better = gc > g
        E[better] = cand[better]
        g[better] = gc[better]
        step[better] *= 1.4
        step[~better] *= 0.5
        if np.all(step < 1e-13):
            break
    return E, g


def _unit_grid(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic, roughly uniform directions on the unit sphere of R^n.
    Structured grids up to R^4; seeded random directions beyond."""
    if n == 2:
        t = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if n == 3:
        i = np.arange(count) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(1.0 - z ** 2, 0.0))
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    if n == 4:
        # spherical cylinder construction over the Fibonacci 2-sphere
        m = max(int(round(count ** (1.0 / 3.0))), 2)
        inner = _unit_grid(3, max(count // m, 2), seed)
        ang = (np.arange(m) + 0.5) * math.pi / m
        pts = np.concatenate([
            np.concatenate([np.cos(a) * np.ones((len(inner), 1)),
                            np.sin(a) * inner], axis=1)
            for a in ang])
        return pts
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _star_coordinates(space: SpaceForm, graph: EmbeddedGraph, vertex_id):
    star = vertex_star(graph, vertex_id)
    q = graph.vertex_point(vertex_id)
    basis = space.tangent_basis(q)
    coords = np.stack([space.mdot(basis, t.vec) for t in star])
    norms = np.linalg.norm(coords, axis=1, keepdims=True)
    return star, q, basis, coords / norms


def vertex_tc(space: SpaceForm, graph: EmbeddedGraph, vertex_id,
              seed: int = 0, n_random: int = 32) -> VertexTC:
    """Vertex contribution by multistart projected-gradient ascent on the
    unit tangent sphere.  Starts: every +-T_k, all normalized pairwise sums,
    and seeded random directions; the nonsmooth candidates e = +-T_k are
    therefore always evaluated exactly."""
    star, q, basis, T = _star_coordinates(space, graph, vertex_id)
    k, n = T.shape
    starts = [T, -T]
    for i in range(k):
        for j in range(i + 1, k):
            v = T[i] + T[j]
            norm = np.linalg.norm(v)
            if norm > 1e-12:
                starts.append((v / norm)[None, :])
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, n))
    starts.append(rand / np.linalg.norm(rand, axis=1, keepdims=True))
    E0 = np.concatenate(starts, axis=0)

    value, gradient = _star_objective(T)
    E, g = _ascent_on_sphere(E0, value, gradient)
    best = int(np.argmax(g))
    direction = E[best] @ basis
    return VertexTC(vertex_id=vertex_id, tc=float(g[best]),
                    argmax_dir=TangentVector(base=q, vec=direction))


def vertex_tc_grid(space: SpaceForm, graph: EmbeddedGraph, vertex_id,
                   n_dirs: int = 1_000_000, seed: int = 0) -> float:
    """Brute-force sup of the star objective over a dense direction grid.
    Independent of the ascent path; used to certify vertex_tc."""
    _, _, _, T = _star_coordinates(space, graph, vertex_id)
    n = T.shape[1]
    if n > GRID_ORACLE_MAX_DIM:
        dirs = _unit_grid(n, n_dirs, seed)
    else:
        dirs = _unit_grid(n, n_dirs)
    value, _ = _star_objective(T)
    best = -math.inf
    block = 262144
    for i in range(0, len(dirs), block):
        best = max(best, float(np.max(value(dirs[i:i + block]))))
    return best


def cone_total_curvature(space: SpaceForm, graph: EmbeddedGraph,
                         seed: int = 0) -> TCReport:
    """Assemble the cone total curvature: per-edge curvature integrals over
    the regular part plus the vertex contributions."""
    per_edge = [EdgeTC(edge_id=e.id, integral=edge_total_curvature(space, e))
                for e in graph.edges]
    per_vertex = [vertex_tc(space, graph, v.id, seed=seed)
                  for v in graph.vertices]
    total = sum(e.integral for e in per_edge) + sum(v.tc for v in per_vertex)
    return TCReport(per_edge=per_edge, per_vertex=per_vertex, total=total)
