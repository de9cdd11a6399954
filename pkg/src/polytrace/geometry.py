"""Polygon data model and the exact set-covariogram.

A polygon is one or more disjoint simple vertex loops: outer boundaries
stored counterclockwise, holes clockwise, so the interior always lies to
the left of the traversal direction.  Interior angles live in
(0, pi) u (pi, 2*pi); straight vertices are rejected at construction.

The covariogram g(z) = |P n (P + z)| is computed exactly: each loop is
ear-clipped into triangles once, and every triangle pair is intersected
by Sutherland-Hodgman clipping (convex clip region, so the result is a
single convex cell).  Holes enter by inclusion-exclusion over signed
loop regions.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CollinearAdjacentEdges,
    DegenerateLoop,
    DomainError,
    SelfIntersection,
    TriangulationFailure,
)

# Rejection threshold for |sin| of the angle between consecutive edge
# directions; straight (gamma = pi) and folded-back (gamma = 0) vertices
# both fail it.
COLLINEAR_TOL = 1e-12

_TWO_PI = 2.0 * math.pi


class CornerKind(enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


@dataclass(frozen=True)
class EdgeFrame:
    """Directed edge with its orientation frame.

    tangent is the unit vector along the traversal direction, normal the
    inward unit normal; (tangent, normal) is positively oriented.
    """

    start: np.ndarray
    end: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    length: float
    loop: int
    start_vertex: int  # global vertex index
    end_vertex: int


@dataclass(frozen=True)
class VertexCorner:
    """Corner of the polygon: position, interior angle and adjacency."""

    position: np.ndarray
    angle: float
    kind: CornerKind
    in_edge: int   # global index of the edge ending here
    out_edge: int  # global index of the edge starting here
    loop: int


@dataclass(frozen=True)
class Triangle:
    """Positively oriented triangle; building block of the covariogram."""

    points: np.ndarray  # (3, 2)

    @property
    def area(self) -> float:
        p = self.points
        return 0.5 * abs(
            (p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1])
            - (p[2, 0] - p[0, 0]) * (p[1, 1] - p[0, 1])
        )


def _signed_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, q1, q2, eps) -> bool:
    """True if the open segments cross or improperly touch."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_segment(a, b, c):
        # c collinear-ish with a-b and inside the bounding box
        if abs(orient(a, b, c)) > eps:
            return False
        return (
            min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps
        )

    return (
        on_segment(q1, q2, p1)
        or on_segment(q1, q2, p2)
        or on_segment(p1, p2, q1)
        or on_segment(p1, p2, q2)
    )


def _point_in_loop(point: np.ndarray, loop: np.ndarray) -> bool:
    """Even-odd ray casting; the point must not lie on the boundary."""
    x, y = point
    inside = False
    n = len(loop)
    for i in range(n):
        x1, y1 = loop[i]
        x2, y2 = loop[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def _interior_angle(prev_pt, pt, next_pt) -> float:
    """Interior angle at pt for a loop traversed with the interior on the left."""
    d1 = pt - prev_pt
    d2 = next_pt - pt
    turn = math.atan2(d1[0] * d2[1] - d1[1] * d2[0], d1[0] * d2[0] + d1[1] * d2[1])
    return math.pi - turn


class Polygon:
    """Immutable polygon with derived edges, corners and triangulation.

    Use build_polygon / regular_ngon / the named constructors below; the
    constructor itself assumes pre-validated, correctly oriented loops.
    """

    def __init__(self, loops: list[np.ndarray], signs: list[int]):
        self.loops = [np.array(lp, dtype=float) for lp in loops]
        for lp in self.loops:
            lp.flags.writeable = False
        self.loop_signs = list(signs)
        self.vertices = np.concatenate(self.loops, axis=0)
        self.vertices.flags.writeable = False

        self.edges: list[EdgeFrame] = []
        self.corners: list[VertexCorner] = []
        offset = 0
        for k, lp in enumerate(self.loops):
            n = len(lp)
            for i in range(n):
                j = (i + 1) % n
                vec = lp[j] - lp[i]
                length = float(np.hypot(*vec))
                tangent = vec / length
                normal = np.array([-tangent[1], tangent[0]])
                tangent.flags.writeable = False
                normal.flags.writeable = False
                self.edges.append(
                    EdgeFrame(
                        start=lp[i],
                        end=lp[j],
                        tangent=tangent,
                        normal=normal,
                        length=length,
                        loop=k,
                        start_vertex=offset + i,
                        end_vertex=offset + j,
                    )
                )
            for i in range(n):
                gamma = _interior_angle(lp[i - 1], lp[i], lp[(i + 1) % n])
                kind = CornerKind.CONVEX if gamma < math.pi else CornerKind.CONCAVE
                self.corners.append(
                    VertexCorner(
                        position=lp[i],
                        angle=gamma,
                        kind=kind,
                        in_edge=offset + (i - 1) % n,
                        out_edge=offset + i,
                        loop=k,
                    )
                )
            offset += n

        self.area = float(sum(s * abs(_signed_area(lp)) for s, lp in zip(signs, self.loops)))
        self.perimeter = float(sum(e.length for e in self.edges))
        self._triangulations: list[list[Triangle]] | None = None

    # -- basic derived quantities -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_angles(self) -> np.ndarray:
        return np.array([c.angle for c in self.corners])

    def diameter(self) -> float:
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    # -- triangulation ------------------------------------------------------------

    def loop_triangulations(self) -> list[list[Triangle]]:
        """Ear-clip each loop independently (as a filled simple polygon)."""
        if self._triangulations is None:
            self._triangulations = [_ear_clip(lp) for lp in self.loops]
        return self._triangulations

    def signed_triangles(self) -> list[tuple[int, np.ndarray]]:
        """(sign, (n,3,2) array) per loop; holes carry sign -1."""
        out = []
        for sign, tris in zip(self.loop_signs, self.loop_triangulations()):
            out.append((sign, np.array([t.points for t in tris])))
        return out

    def to_json(self) -> str:
        return json.dumps({"loops": [lp.tolist() for lp in self.loops]})


# -- construction -----------------------------------------------------------------


def build_polygon(loops) -> Polygon:
    """Validate vertex loops and build a Polygon.

    Outer loops are normalized to counterclockwise and hole loops to
    clockwise orientation (decided by containment depth).  Raises
    DegenerateLoop, CollinearAdjacentEdges or SelfIntersection on bad input.
    """
    arrs = []
    for loop in loops:
        arr = np.asarray(loop, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DegenerateLoop("each loop must be an (n, 2) array of points")
        if len(arr) < 3:
            raise DegenerateLoop(f"loop needs >= 3 vertices, got {len(arr)}")
        if not np.all(np.isfinite(arr)):
            raise DegenerateLoop("non-finite vertex coordinate")
        arrs.append(arr)

    scale = max(float(np.max(np.abs(a))) for a in arrs)
    scale = max(scale, 1.0)
    eps = 1e-12 * scale

    for arr in arrs:
        n = len(arr)
        for i in range(n):
            if np.hypot(*(arr[(i + 1) % n] - arr[i])) <= eps:
                raise DegenerateLoop("zero-length edge (duplicate consecutive vertices)")
        for i in range(n):
            d1 = arr[i] - arr[i - 1]
            d2 = arr[(i + 1) % n] - arr[i]
            cross = d1[0] * d2[1] - d1[1] * d2[0]
            sin_angle = cross / (np.hypot(*d1) * np.hypot(*d2))
            if abs(sin_angle) < COLLINEAR_TOL:
                raise CollinearAdjacentEdges(
                    f"vertex {i} of loop has straight or folded-back angle"
                )
        # simplicity: no two non-adjacent edges may intersect or touch
        for i in range(n):
            p1, p2 = arr[i], arr[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                q1, q2 = arr[j], arr[(j + 1) % n]
                if _segments_properly_intersect(p1, p2, q1, q2, eps * scale):
                    raise SelfIntersection(f"edges {i} and {j} of a loop intersect")
        if abs(_signed_area(arr)) <= eps * eps:
            raise DegenerateLoop("loop has zero area")

    # loops must be pairwise disjoint as curves
    for a in range(len(arrs)):
        for b in range(a + 1, len(arrs)):
            for i in range(len(arrs[a])):
                p1, p2 = arrs[a][i], arrs[a][(i + 1) % len(arrs[a])]
                for j in range(len(arrs[b])):
                    q1, q2 = arrs[b][j], arrs[b][(j + 1) % len(arrs[b])]
                    if _segments_properly_intersect(p1, p2, q1, q2, eps * scale):
                        raise SelfIntersection(f"loops {a} and {b} intersect")

    # containment depth decides outer vs hole; disjointness makes any vertex usable
    depths = []
    for a in range(len(arrs)):
        depth = sum(
            1 for b in range(len(arrs)) if b != a and _point_in_loop(arrs[a][0], arrs[b])
        )
        depths.append(depth)

    oriented = []
    signs = []
    for arr, depth in zip(arrs, depths):
        ccw = _signed_area(arr) > 0
        hole = depth % 2 == 1
        if hole == ccw:  # holes must be CW, outers CCW
            arr = arr[::-1].copy()
        oriented.append(arr)
        signs.append(-1 if hole else 1)

    poly = Polygon(oriented, signs)
    if poly.area <= 0:
        raise DegenerateLoop("polygon has non-positive total area")
    return poly


def polygon_from_json(text: str) -> Polygon:
    """Parse {"loops": [[[x, y], ...], ...]} into a Polygon."""
    obj = json.loads(text)
    if not isinstance(obj, dict) or "loops" not in obj:
        raise DegenerateLoop('polygon JSON must be an object with a "loops" key')
    return build_polygon(obj["loops"])


def regular_ngon(n: int, circumradius: float = 1.0) -> Polygon:
    """Regular n-gon inscribed in a circle around the origin."""
    if n < 3:
        raise DomainError(f"regular polygon needs n >= 3, got {n}")
    if circumradius <= 0:
        raise DomainError("circumradius must be positive")
    theta = _TWO_PI * np.arange(n) / n
    pts = circumradius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return build_polygon([pts])


def unit_square() -> Polygon:
    return build_polygon([[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]])


def rectangle(a: float, b: float) -> Polygon:
    if a <= 0 or b <= 0:
        raise DomainError("rectangle sides must be positive")
    return build_polygon([[(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)]])


def l_shape() -> Polygon:
    """L-shaped hexagon with five right angles and one reflex (3*pi/2) corner."""
    return build_polygon([[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]])


def equilateral_triangle(side: float = 1.0) -> Polygon:
    if side <= 0:
        raise DomainError("side must be positive")
    h = side * math.sqrt(3) / 2
    return build_polygon([[(0.0, 0.0), (side, 0.0), (side / 2, h)]])


# -- per-element queries ----------------------------------------------------------


def interior_angle(p: Polygon, vertex: int) -> float:
    """Interior angle gamma at the given global vertex index, in (0, 2*pi)."""
    return p.corners[vertex].angle


def edge_F(p: Polygon, edge: int) -> float:
    """Edge weight F(E) = -cot(gamma_1) - cot(gamma_2) of the adjacent angles.

    Vanishes exactly when the two edges neighbouring E are parallel.
    """
    e = p.edges[edge]
    g1 = p.corners[e.start_vertex].angle
    g2 = p.corners[e.end_vertex].angle
    return -_cot(g1) - _cot(g2)


def _cot(gamma: float) -> float:
    return math.cos(gamma) / math.sin(gamma)


# Width of the series window around gamma = pi where 1 + (pi-gamma)*cot(gamma)
# loses digits to cancellation.
F_SERIES_WINDOW = 1e-4


def angle_function_f(gamma: float) -> float:
    """Per-vertex angle weight f(gamma) = 1 + (pi - gamma) * cot(gamma).

    Positive on (0, pi) u (pi, 2*pi) and vanishing to second order at pi;
    near pi the cancellation-free series eps^2/3 + eps^4/45 is used.
    """
    if gamma <= 0 or gamma >= _TWO_PI:
        raise DomainError(f"angle must lie in (0, 2*pi), got {gamma}")
    eps = gamma - math.pi
    if abs(eps) < F_SERIES_WINDOW:
        return eps * eps / 3.0 + eps**4 / 45.0
    return 1.0 + (math.pi - gamma) * _cot(gamma)


# -- rigid motions and scaling ----------------------------------------------------


def scale(p: Polygon, L: float) -> Polygon:
    """Scaled polygon L*P; areas scale by L^2, angles are unchanged."""
    if L <= 0:
        raise DomainError(f"scale factor must be positive, got {L}")
    return build_polygon([lp * L for lp in p.loops])


def translate(p: Polygon, shift) -> Polygon:
    shift = np.asarray(shift, dtype=float)
    return build_polygon([lp + shift for lp in p.loops])


def rotate(p: Polygon, angle: float) -> Polygon:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return build_polygon([lp @ rot.T for lp in p.loops])


# -- triangulation ----------------------------------------------------------------


def _ear_clip(loop: np.ndarray) -> list[Triangle]:
    """Ear-clipping triangulation of one simple loop (any input orientation)."""
    pts = loop if _signed_area(loop) > 0 else loop[::-1]
    n = len(pts)
    if n == 3:
        return [Triangle(points=np.array(pts))]

    scale2 = float(np.max(np.abs(pts))) ** 2
    eps = 1e-14 * max(scale2, 1.0)
    idx = list(range(n))
    tris: list[Triangle] = []

    def cross_at(i_prev, i_cur, i_next):
        a, b, c = pts[i_prev], pts[i_cur], pts[i_next]
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def contains(i_prev, i_cur, i_next, j):
        a, b, c = pts[i_prev], pts[i_cur], pts[i_next]
        p = pts[j]
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        return d1 >= -eps and d2 >= -eps and d3 >= -eps

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 2 * n * n:
            raise TriangulationFailure("ear clipping did not terminate")
        clipped = False
        m = len(idx)
        for k in range(m):
            i_prev, i_cur, i_next = idx[k - 1], idx[k], idx[(k + 1) % m]
            if cross_at(i_prev, i_cur, i_next) <= eps:
                continue  # reflex or straight corner, not an ear
            if any(
                contains(i_prev, i_cur, i_next, j)
                for j in idx
                if j not in (i_prev, i_cur, i_next)
            ):
                continue
            tris.append(Triangle(points=np.array([pts[i_prev], pts[i_cur], pts[i_next]])))
            del idx[k]
            clipped = True
            break
        if not clipped:
            raise TriangulationFailure("no ear found; polygon may be invalid")
    tris.append(Triangle(points=np.array([pts[idx[0]], pts[idx[1]], pts[idx[2]]])))
    return tris


def triangulate(p: Polygon) -> list[Triangle]:
    """Partition a single-loop polygon into triangles.

    Multi-loop polygons (holes) are not partitionable without bridge cuts;
    the covariogram handles them via signed per-loop triangulations instead.
    """
    if len(p.loops) != 1:
        raise TriangulationFailure(
            "partition triangulation supports single-loop polygons only"
        )
    return p.loop_triangulations()[0]


# -- covariogram ------------------------------------------------------------------

_CLIP_BUF = 12  # max vertices of triangle-triangle clip is 6; padded for safety


def _clip_pass_batch(P: np.ndarray, C: np.ndarray, a: np.ndarray, b: np.ndarray):
    """One Sutherland-Hodgman pass over a batch of convex polygons.

    P: (B, K, 2) padded vertex buffers, C: (B,) vertex counts.
    Clips every polygon against the half-plane left of the directed line a->b.
    """
    B, K, _ = P.shape
    slot = np.arange(K)
    valid = slot[None, :] < C[:, None]

    ab = b - a
    d = ab[0] * (P[:, :, 1] - a[1]) - ab[1] * (P[:, :, 0] - a[0])

    nxt = slot[None, :] + 1
    nxt = np.where(nxt >= C[:, None], 0, nxt)
    P_next = np.take_along_axis(P, nxt[:, :, None], axis=1)
    d_next = np.take_along_axis(d, nxt, axis=1)

    inside = d >= 0.0
    inside_next = d_next >= 0.0
    emit_v = valid & inside
    emit_x = valid & (inside != inside_next)

    denom = d - d_next
    t = np.where(emit_x, d / np.where(denom == 0.0, 1.0, denom), 0.0)
    X = P + t[:, :, None] * (P_next - P)

    counts = emit_v.astype(np.int64) + emit_x.astype(np.int64)
    new_C = counts.sum(axis=1)
    offs = np.cumsum(counts, axis=1) - counts  # exclusive prefix per row

    out = np.zeros_like(P)
    rows = np.repeat(np.arange(B), K).reshape(B, K)
    flat = out.reshape(B * K, 2)
    pos_v = (rows * K + offs)[emit_v]
    flat[pos_v] = P[emit_v]
    pos_x = (rows * K + offs + emit_v)[emit_x]
    flat[pos_x] = X[emit_x]
    return out, new_C


def _poly_area_batch(P: np.ndarray, C: np.ndarray) -> np.ndarray:
    K = P.shape[1]
    slot = np.arange(K)
    valid = slot[None, :] < C[:, None]
    nxt = slot[None, :] + 1
    nxt = np.where(nxt >= C[:, None], 0, nxt)
    P_next = np.take_along_axis(P, nxt[:, :, None], axis=1)
    terms = P[:, :, 0] * P_next[:, :, 1] - P_next[:, :, 0] * P[:, :, 1]
    return 0.5 * np.abs(np.where(valid, terms, 0.0).sum(axis=1))


def convex_clip_areas(subject: np.ndarray, clip: np.ndarray, offsets) -> np.ndarray:
    """|(subject + z) n clip| for every offset z; both polygons convex.

    subject is an (m, 2) convex polygon translated by each row of offsets;
    clip is a fixed convex polygon (normalized to CCW internally).
    """
    subject = np.asarray(subject, dtype=float)
    clip = np.asarray(clip, dtype=float)
    if _signed_area(clip) < 0:
        clip = clip[::-1]
    Z = np.atleast_2d(np.asarray(offsets, dtype=float))
    B, m, k = len(Z), len(subject), len(clip)
    if m + k > _CLIP_BUF:
        raise DomainError("clip buffer too small for these polygons")
    P = np.zeros((B, _CLIP_BUF, 2))
    P[:, :m, :] = subject[None, :, :] + Z[:, None, :]
    C = np.full(B, m, dtype=np.int64)
    for i in range(k):
        P, C = _clip_pass_batch(P, C, clip[i], clip[(i + 1) % k])
        if not C.any():
            return np.zeros(B)
    return _poly_area_batch(P, C)


def _ccw_tris(tris: np.ndarray) -> np.ndarray:
    """Ensure CCW orientation of an (n, 3, 2) triangle array."""
    cross = (tris[:, 1, 0] - tris[:, 0, 0]) * (tris[:, 2, 1] - tris[:, 0, 1]) - (
        tris[:, 1, 1] - tris[:, 0, 1]
    ) * (tris[:, 2, 0] - tris[:, 0, 0])
    out = tris.copy()
    flip = cross < 0
    out[flip] = out[flip][:, ::-1, :]
    return out


def covariogram_batch(p: Polygon, Z) -> np.ndarray:
    """g(z) = |P n (P + z)| for every row z of Z, exactly via triangle clipping."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    groups = [(s, _ccw_tris(t)) for s, t in p.signed_triangles()]
    rmax = np.hypot(Z[:, 0], Z[:, 1]).max()
    total = np.zeros(len(Z))
    for s_i, tris_i in groups:
        boxes_i = [(t.min(axis=0), t.max(axis=0)) for t in tris_i]
        for s_j, tris_j in groups:
            boxes_j = [(t.min(axis=0), t.max(axis=0)) for t in tris_j]
            for ti, (lo_i, hi_i) in zip(tris_i, boxes_i):
                for tj, (lo_j, hi_j) in zip(tris_j, boxes_j):
                    # any overlap possible for |z| <= rmax?
                    if np.any(lo_i - (hi_j + rmax) > 0) or np.any(lo_j - (hi_i + rmax) > 0):
                        continue
                    total += s_i * s_j * convex_clip_areas(tj, ti, Z)
    return total


def covariogram(p: Polygon, z) -> float:
    """Area of P n (P + z); symmetric in z, supported on |z| <= diam(P)."""
    return float(covariogram_batch(p, np.asarray(z, dtype=float)[None, :])[0])
