"""Embedded graphs: data model, ingestion, resampling, and combinatorics.

A graph is a finite set of vertices (each of valence >= 2) joined by edges;
each edge is stored as a geodesic polyline on the model manifold with an
arclength parameter.  Instances are immutable after construction and all
operations here are read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _num
from .errors import ValidationError
from .spaceform import ANTIPODAL_SLACK, Model, SpaceForm, TangentVector

MIN_EDGE_SAMPLES = 8

# Edge endpoints must land on their vertex point this closely (they are
# snapped to it exactly when they do).
ENDPOINT_TOL = 1e-8


@dataclass(eq=False)
class Vertex:
    id: object
    point: np.ndarray


@dataclass(eq=False)
class EdgeCurve:
    """A sampled edge: points joined by model-space geodesics.

    ``s`` holds cumulative geodesic chord lengths, so consecutive chord
    lengths equal the parameter increments by construction.
    """

    id: object
    endpoints: tuple
    samples: np.ndarray
    s: np.ndarray

    @property
    def length(self) -> float:
        return float(self.s[-1])


@dataclass(eq=False)
class EmbeddedGraph:
    space: SpaceForm
    vertices: list[Vertex]
    edges: list[EdgeCurve]
    _by_id: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {v.id: v for v in self.vertices}

    def vertex_point(self, vertex_id) -> np.ndarray:
        try:
            return self._by_id[vertex_id].point
        except KeyError:
            raise ValidationError(f"unknown vertex id {vertex_id!r}") from None

    def edge_ends_at(self, vertex_id) -> list[tuple[EdgeCurve, int]]:
        """All (edge, end) pairs incident to the vertex; a loop edge
        contributes both of its ends."""
        out = []
        for e in self.edges:
            for end in (0, 1):
                if e.endpoints[end] == vertex_id:
                    out.append((e, end))
        return out

    def valence(self, vertex_id) -> int:
        return len(self.edge_ends_at(vertex_id))

    @property
    def total_length(self) -> float:
        return sum(e.length for e in self.edges)

    def all_samples(self) -> np.ndarray:
        return np.concatenate([e.samples for e in self.edges], axis=0)


# ---------------------------------------------------------------------------
# construction helpers

def arclength_params(space: SpaceForm, samples: np.ndarray) -> np.ndarray:
    chords = space.dist(samples[:-1], samples[1:])
    s = np.empty(len(samples))
    s[0] = 0.0
    np.cumsum(chords, out=s[1:])
    return s


def _subdivide_to_minimum(space: SpaceForm, samples: np.ndarray) -> np.ndarray:
    """Insert geodesic chord midpoints until the minimum sample count holds;
    the polyline's geometry is unchanged."""
    while len(samples) < MIN_EDGE_SAMPLES:
        mids = space.geodesic_point(samples[:-1], samples[1:],
                                    np.full(len(samples) - 1, 0.5))
        merged = np.empty((2 * len(samples) - 1, samples.shape[1]))
        merged[0::2] = samples
        merged[1::2] = mids
        samples = merged
    return samples


def make_edge(space: SpaceForm, edge_id, endpoints, samples) -> EdgeCurve:
    """Validate and build one edge from raw on-manifold samples."""
    samples = np.asarray(samples, float)
    if samples.ndim != 2 or len(samples) < 2:
        raise ValidationError(f"edge {edge_id!r} needs at least two samples")
    chords = space.dist(samples[:-1], samples[1:])
    if np.any(chords < 1e-12):
        raise ValidationError(f"edge {edge_id!r} has coincident consecutive samples")
    samples = _subdivide_to_minimum(space, samples)
    return EdgeCurve(id=edge_id, endpoints=tuple(endpoints), samples=samples,
                     s=arclength_params(space, samples))


def _check_spherical_diameter(space: SpaceForm, points: np.ndarray):
    if space.model is not Model.SPHERICAL:
        return
    limit_chord = 2.0 / space.curv * math.sin(0.5 * (math.pi - ANTIPODAL_SLACK))
    block = 512
    for i in range(0, len(points), block):
        chunk = points[i:i + block]
        d = np.linalg.norm(chunk[:, None, :] - points[None, :, :], axis=-1)
        if np.any(d >= limit_chord):
            raise ValidationError(
                "spherical diameter bound violated: sample pair at distance >= pi/b")


def validate_graph(graph: EmbeddedGraph) -> EmbeddedGraph:
    """Check valence, endpoint coincidence and the spherical diameter bound."""
    if not graph.edges:
        raise ValidationError("a graph needs at least one closed arc")
    counts = {v.id: 0 for v in graph.vertices}
    for e in graph.edges:
        for end in (0, 1):
            vid = e.endpoints[end]
            if vid not in counts:
                raise ValidationError(
                    f"edge {e.id!r} references unknown vertex {vid!r}")
            counts[vid] += 1
            endpoint = e.samples[0] if end == 0 else e.samples[-1]
            gap = float(graph.space.dist(endpoint, graph.vertex_point(vid)))
            if gap > ENDPOINT_TOL:
                raise ValidationError(
                    f"edge {e.id!r} end {end} misses vertex {vid!r} by {gap:.3g}")
    for vid, c in counts.items():
        if c < 2:
            raise ValidationError(
                f"vertex {vid!r} has valence {c} < 2; closed arcs must meet "
                "in at least two edge-ends everywhere")
    _check_spherical_diameter(graph.space, graph.all_samples())
    return graph


def load_graph(document: dict) -> EmbeddedGraph:
    """Build a validated graph from a parsed document (see the file format
    in the CLI module).  Points are projected onto the model manifold; the
    projection must move them less than the document's tolerance."""
    if not isinstance(document, dict):
        raise ValidationError("graph document must be a mapping")
    try:
        space_block = document["space"]
        model = Model(str(space_block["model"]).lower())
        space = SpaceForm(model=model, dim=int(space_block["dim"]),
                          curv=float(space_block.get("curv", 0.0)))
        vertex_blocks = list(document["vertices"])
        edge_blocks = list(document["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed graph document: {exc}") from exc
    tol = float(document.get("tolerance", 1e-6))

    def take_point(coords, what):
        x = np.asarray(coords, float)
        if x.shape != (space.embedding_dim,):
            raise ValidationError(
                f"{what}: expected {space.embedding_dim} coordinates")
        proj = space.project_point(x)
        if float(np.linalg.norm(proj - x)) > tol:
            raise ValidationError(f"{what}: point is off the manifold "
                                  f"beyond tolerance {tol:g}")
        return proj

    vertices = []
    seen = set()
    for vb in vertex_blocks:
        vid = vb["id"]
        if vid in seen:
            raise ValidationError(f"duplicate vertex id {vid!r}")
        seen.add(vid)
        vertices.append(Vertex(id=vid, point=take_point(vb["coords"], f"vertex {vid!r}")))

    vpoints = {v.id: v.point for v in vertices}
    edges = []
    seen = set()
    for eb in edge_blocks:
        eid = eb["id"]
        if eid in seen:
            raise ValidationError(f"duplicate edge id {eid!r}")
        seen.add(eid)
        endpoints = tuple(eb["endpoints"])
        if len(endpoints) != 2:
            raise ValidationError(f"edge {eid!r} needs exactly two endpoints")
        raw = [take_point(c, f"edge {eid!r} sample") for c in eb["samples"]]
        samples = np.asarray(raw, float)
        # snap edge ends onto their vertices when within tolerance
        for end, idx in ((0, 0), (1, -1)):
            vid = endpoints[end]
            if vid in vpoints:
                gap = float(space.dist(samples[idx], vpoints[vid]))
                if gap <= ENDPOINT_TOL:
                    samples[idx] = vpoints[vid]
        edges.append(make_edge(space, eid, endpoints, samples))

    return validate_graph(EmbeddedGraph(space=space, vertices=vertices, edges=edges))


def load_graph_file(path) -> EmbeddedGraph:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"not valid JSON: {exc}") from exc
    return load_graph(document)


# ---------------------------------------------------------------------------
# resampling

def resample_arclength(graph: EmbeddedGraph, h: float) -> EmbeddedGraph:
    """Resample every edge at arclength spacing ~h along its geodesic
    polyline.  Endpoints are kept exactly; each edge keeps at least
    MIN_EDGE_SAMPLES samples even when h is coarse."""
    if not h > 0.0:
        raise ValidationError("resampling step must be positive")
    space = graph.space
    new_edges = []
    for e in graph.edges:
        total = e.length
        if h > total:
            raise ValidationError(
                f"step {h:g} exceeds the length {total:g} of edge {e.id!r}")
        m = max(math.ceil(total / h - 1e-9), MIN_EDGE_SAMPLES - 1)
        targets = np.linspace(0.0, total, m + 1)
        idx = np.clip(np.searchsorted(e.s, targets, side="right") - 1,
                      0, len(e.s) - 2)
        seg = e.s[idx + 1] - e.s[idx]
        lam = np.where(seg > 0, (targets - e.s[idx]) / np.where(seg > 0, seg, 1.0), 0.0)
        pts = space.geodesic_point(e.samples[idx], e.samples[idx + 1],
                                   np.clip(lam, 0.0, 1.0))
        pts[0] = e.samples[0]
        pts[-1] = e.samples[-1]
        new_edges.append(EdgeCurve(id=e.id, endpoints=e.endpoints, samples=pts,
                                   s=arclength_params(space, pts)))
    return EmbeddedGraph(space=space, vertices=graph.vertices, edges=new_edges)


# ---------------------------------------------------------------------------
# tangents

def edge_unit_tangents(space: SpaceForm, edge: EdgeCurve) -> np.ndarray:
    """Unit tangent at every sample: finite differences of the samples
    (one-sided at the ends), projected to the tangent space and normalized.
    Cached on the edge; edges are immutable after construction."""
    cached = getattr(edge, "_unit_tangents", None)
    if cached is not None:
        return cached
    if len(edge.s) < 3:
        raise ValidationError(f"edge {edge.id!r} has fewer than 3 samples")
    d = _num.curve_first_derivative(edge.s, edge.samples)
    t = space.tangent_project(edge.samples, d)
    n = space.norm(t)
    if np.any(n < 1e-12):
        raise ValidationError(f"degenerate tangent on edge {edge.id!r}")
    t = t / n[:, None]
    edge._unit_tangents = t
    return t


def vertex_star(graph: EmbeddedGraph, vertex_id) -> list[TangentVector]:
    """Unit tangents at a vertex pointing into each incident edge-end,
    estimated by one-sided differences of the samples nearest the end."""
    ends = graph.edge_ends_at(vertex_id)
    if not ends:
        raise ValidationError(f"vertex {vertex_id!r} has no incident edges")
    q = graph.vertex_point(vertex_id)
    out = []
    for edge, end in ends:
        if float(graph.space.dist(edge.samples[0], edge.samples[1])) < 1e-12:
            raise ValidationError(f"edge {edge.id!r} is degenerate at {vertex_id!r}")
        tangents = edge_unit_tangents(graph.space, edge)
        vec = tangents[0] if end == 0 else -tangents[-1]
        out.append(TangentVector(base=q, vec=vec))
    return out


# ---------------------------------------------------------------------------
# connectivity and the doubled Euler circuit

def connected_components(graph: EmbeddedGraph) -> list[list]:
    adj = {v.id: set() for v in graph.vertices}
    for e in graph.edges:
        u, w = e.endpoints
        adj[u].add(w)
        adj[w].add(u)
    seen = set()
    components = []
    for v in graph.vertices:
        if v.id in seen:
            continue
        stack = [v.id]
        comp = []
        seen.add(v.id)
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for nxt in sorted(adj[cur], key=repr):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        components.append(comp)
    return components


@dataclass(frozen=True)
class EdgeTraversal:
    edge_id: object
    tail: object
    head: object


def euler_double_circuit(graph: EmbeddedGraph) -> list[EdgeTraversal]:
    """A closed walk through the graph with every edge doubled, so that each
    original edge is traversed exactly twice.  Doubling makes every valence
    even, hence such a circuit always exists on a connected graph
    (Hierholzer's construction)."""
    comps = connected_components(graph)
    if len(comps) != 1:
        raise ValidationError(
            f"graph is disconnected; components: {comps}")
    if not graph.edges:
        raise ValidationError("graph has no edges")

    copies = []
    adj = {v.id: [] for v in graph.vertices}
    for e in graph.edges:
        u, w = e.endpoints
        for _ in range(2):
            k = len(copies)
            copies.append(e)
            adj[u].append((k, w))
            adj[w].append((k, u))
    used = [False] * len(copies)
    ptr = {vid: 0 for vid in adj}

    start = graph.edges[0].endpoints[0]
    stack = [(start, None)]
    rev_vertices = []
    rev_edges = []
    while stack:
        v, k_in = stack[-1]
        lst = adj[v]
        while ptr[v] < len(lst) and used[lst[ptr[v]][0]]:
            ptr[v] += 1
        if ptr[v] < len(lst):
            k, w = lst[ptr[v]]
            used[k] = True
            stack.append((w, k))
        else:
            stack.pop()
            rev_vertices.append(v)
            rev_edges.append(k_in)
    rev_vertices.reverse()
    rev_edges.reverse()
    # rev_edges[i] is the copy entering rev_vertices[i]; index 0 carries None.
    walk = []
    for i in range(1, len(rev_vertices)):
        k = rev_edges[i]
        walk.append(EdgeTraversal(edge_id=copies[k].id,
                                  tail=rev_vertices[i - 1],
                                  head=rev_vertices[i]))
    if len(walk) != 2 * len(graph.edges):
        raise ValidationError("no closed doubled circuit found "
                              "(is the graph connected?)")
    return walk
