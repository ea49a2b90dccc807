"""Face lattices of polytopes and arrangement substructures.

An IncidenceGraph stores the faces of a bounded polytope (or of a polytope
subdivided by hyperplane cuts) as a layered graph: nodes are faces, edges join
faces whose dimensions differ by one and where the lower face lies in the
boundary of the higher one.  Vertices carry coordinates; every other face
derives its centroid as the mean of the vertices weakly below it.  Faces are
tagged with the hyperplanes that support them, which keeps degenerate cuts
(a hyperplane through an existing face) exact without numeric perturbation.

Operations:

* `insert_hyperplane` - incremental arrangement update: every face crossed by
  the hyperplane is replaced by its two sides plus the section face.
* `restrict_side` / `section` - halfspace intersection and hyperplane slice.
* `sweep_dir(g, k)` - the trace of g sliding toward the coordinate plane
  x_k = 0.  The facet planes of the swept body are known in closed form (the
  e_k-top facets survive; each boundary ridge extrudes to a wall containing
  the sweep direction; the floor is x_k = 0), so the result is rebuilt exactly
  by cutting a bounding box, covering both the dimension-raising case (g in a
  hyperplane not orthogonal to the floor) and the full-dimensional case.
* `cube_of_polytope` - iterated sweep over all axes: the monotone shedding
  region spanned between g and the origin-facing coordinate planes.
* `lp_over_vertices` - maximize a linear functional over the vertex layer.

All inputs are bounded; numeric classification uses EPS_GEO on unit-normal
hyperplane residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EPS_GEO = 1e-7  # point-on-hyperplane classification


class DegenerateCut(ValueError):
    """A cut that only supports existing faces; handled by tagging, raised
    nowhere in the normal pipeline (kept for API completeness)."""


class NegativeCoordinate(ValueError):
    """Sweep input crosses the target coordinate plane."""


class EmptyPolytope(ValueError):
    """Operation on an empty lattice."""


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane {x : normal . x = offset}, |normal| = 1, canonical
    sign: first nonzero normal component positive."""

    normal: tuple
    offset: float

    @staticmethod
    def make(normal, offset) -> "Hyperplane":
        n = np.asarray(normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn < EPS_GEO:
            raise ValueError("zero normal")
        n, offset = n / nn, float(offset) / nn
        for x in n:
            if abs(x) > EPS_GEO:
                if x < 0:
                    n, offset = -n, -offset
                break
        return Hyperplane(tuple(n), offset)

    @staticmethod
    def oriented(normal, offset) -> "Hyperplane":
        """Unit-normalized but keeping the given orientation (e.g. outward)."""
        n = np.asarray(normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn < EPS_GEO:
            raise ValueError("zero normal")
        return Hyperplane(tuple(n / nn), float(offset) / nn)

    def key(self, ndigits=9) -> tuple:
        """Orientation-free identity of the plane (for deduplication)."""
        n = np.asarray(self.normal)
        off = self.offset
        for x in n:
            if abs(x) > EPS_GEO:
                if x < 0:
                    n, off = -n, -off
                break
        return (tuple(np.round(n, ndigits)), round(off, ndigits))

    def value(self, x) -> float:
        return float(np.dot(self.normal, x) - self.offset)

    def side(self, x, eps=EPS_GEO) -> int:
        v = self.value(x)
        return 0 if abs(v) <= eps else (1 if v > 0 else -1)


@dataclass
class Face:
    fid: int
    dim: int
    subfaces: set = field(default_factory=set)
    superfaces: set = field(default_factory=set)
    coords: np.ndarray | None = None  # vertices only
    onhs: set = field(default_factory=set)  # supporting hyperplane ids


class IncidenceGraph:
    """Layered face lattice in ambient dimension `dim`."""

    def __init__(self, dim: int):
        self.dim = dim
        self.faces: dict[int, Face] = {}
        self.hyperplanes: dict[int, Hyperplane] = {}
        self._next = 0

    # -- construction ----------------------------------------------------
    def add_face(self, fdim, coords=None, onhs=()) -> int:
        fid = self._next
        self._next += 1
        self.faces[fid] = Face(
            fid, fdim, coords=None if coords is None else np.asarray(coords, dtype=float),
            onhs=set(onhs),
        )
        return fid

    def link(self, sub, sup):
        self.faces[sub].superfaces.add(sup)
        self.faces[sup].subfaces.add(sub)

    def register_hyperplane(self, h: Hyperplane) -> int:
        hid = len(self.hyperplanes)
        self.hyperplanes[hid] = h
        return hid

    def copy(self) -> "IncidenceGraph":
        g = IncidenceGraph(self.dim)
        g._next = self._next
        g.hyperplanes = dict(self.hyperplanes)
        for fid, f in self.faces.items():
            g.faces[fid] = Face(
                fid, f.dim, set(f.subfaces), set(f.superfaces),
                None if f.coords is None else f.coords.copy(), set(f.onhs),
            )
        return g

    # -- queries ----------------------------------------------------------
    def layer(self, d) -> list:
        return [f.fid for f in self.faces.values() if f.dim == d]

    def layer_counts(self) -> dict:
        out: dict[int, int] = {}
        for f in self.faces.values():
            out[f.dim] = out.get(f.dim, 0) + 1
        return out

    def top_dim(self) -> int:
        if not self.faces:
            raise EmptyPolytope("empty lattice")
        return max(f.dim for f in self.faces.values())

    def top_faces(self) -> list:
        d = self.top_dim()
        return self.layer(d)

    def vertices_below(self, fid) -> list:
        """Ids of the dim-0 faces weakly below fid (BFS down the lattice)."""
        seen, stack, out = {fid}, [fid], []
        while stack:
            g = stack.pop()
            f = self.faces[g]
            if f.dim == 0:
                out.append(g)
                continue
            for s in f.subfaces:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return sorted(out)

    def vertex_coords(self, fid=None) -> np.ndarray:
        """Vertex coordinates below fid (or of the whole lattice)."""
        if fid is None:
            vids = self.layer(0)
        else:
            vids = self.vertices_below(fid)
        if not vids:
            raise EmptyPolytope("no vertices")
        return np.array([self.faces[v].coords for v in sorted(vids)])

    def centroid(self, fid) -> np.ndarray:
        return self.vertex_coords(fid).mean(axis=0)

    def closure_of(self, fid) -> "IncidenceGraph":
        """The sub-lattice of faces weakly below fid, as a standalone polytope."""
        keep, stack = {fid}, [fid]
        while stack:
            g = stack.pop()
            for s in self.faces[g].subfaces:
                if s not in keep:
                    keep.add(s)
                    stack.append(s)
        return self._subgraph(keep)

    def _subgraph(self, keep) -> "IncidenceGraph":
        g = IncidenceGraph(self.dim)
        g.hyperplanes = dict(self.hyperplanes)
        g._next = self._next
        for fid in keep:
            f = self.faces[fid]
            g.faces[fid] = Face(
                fid, f.dim, f.subfaces & keep, f.superfaces & keep,
                None if f.coords is None else f.coords.copy(), set(f.onhs),
            )
        return g

    def affine_span(self, tol=EPS_GEO):
        """(mean, orthonormal direction basis) of the vertex set."""
        V = self.vertex_coords()
        mu = V.mean(axis=0)
        if len(V) == 1:
            return mu, np.zeros((0, self.dim))
        _, svals, vt = np.linalg.svd(V - mu, full_matrices=False)
        scale = max(1.0, float(np.abs(V).max()))
        rank = int(np.sum(svals > 1e-8 * scale))
        return mu, vt[:rank]

    def dump(self) -> str:
        """Plain-text layered listing (face id, dim, subfaces, vertex coords)."""
        lines = []
        for d in sorted(self.layer_counts()):
            lines.append(f"layer {d}:")
            for fid in sorted(self.layer(d)):
                f = self.faces[fid]
                sub = ",".join(str(s) for s in sorted(f.subfaces)) or "-"
                if f.coords is not None:
                    pt = " @ (" + ", ".join(f"{x:.6g}" for x in f.coords) + ")"
                else:
                    pt = ""
                lines.append(f"  f{fid} dim={f.dim} sub=[{sub}]{pt}")
        return "\n".join(lines) + "\n"

    def validate(self):
        """Structural sanity: layered incidences, >=2 subfaces above dim 0."""
        for f in self.faces.values():
            for s in f.subfaces:
                assert self.faces[s].dim == f.dim - 1, "incidence skips a layer"
                assert f.fid in self.faces[s].superfaces
            if f.dim >= 1:
                assert len(f.subfaces) >= 1
            if f.dim == 0:
                assert f.coords is not None


# -- elementary constructions ---------------------------------------------


def polytope_of_point(x) -> IncidenceGraph:
    """Lattice of the 0-dimensional polytope {x}."""
    x = np.asarray(x, dtype=float)
    g = IncidenceGraph(len(x))
    g.add_face(0, coords=x)
    return g


def box_lattice(lows, highs) -> IncidenceGraph:
    """Lattice of the full-dimensional axis box [lows, highs]; one face per
    label in {-1,0,1}^d (-1 = at low end, 1 = at high end, 0 = interior)."""
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    d = len(lows)
    if np.any(highs - lows <= 0):
        raise ValueError("degenerate box")
    g = IncidenceGraph(d)
    ids: dict[tuple, int] = {}

    def rec(prefix):
        if len(prefix) == d:
            fdim = sum(1 for a in prefix if a == 0)
            coords = None
            if fdim == 0:
                coords = np.where(np.array(prefix) < 0, lows, highs)
            ids[prefix] = g.add_face(fdim, coords=coords)
            return
        for a in (-1, 0, 1):
            rec(prefix + (a,))

    rec(())
    for lab, fid in ids.items():
        for i, a in enumerate(lab):
            if a == 0:
                for b in (-1, 1):
                    sub = lab[:i] + (b,) + lab[i + 1:]
                    g.link(ids[sub], fid)
    return g


def hypercube_of(p0) -> IncidenceGraph:
    """Monotone shedding box of a componentwise-nonzero point: the axis box
    spanned between the origin and p0 (3^d faces)."""
    p0 = np.asarray(p0, dtype=float)
    if np.any(np.abs(p0) <= 0):
        raise ValueError("zero coordinate; drop it before building the box")
    return box_lattice(np.minimum(p0, 0.0), np.maximum(p0, 0.0))


# -- incremental hyperplane insertion --------------------------------------


def insert_hyperplane(g: IncidenceGraph, h: Hyperplane, eps=EPS_GEO):
    """Split every face of g crossed by h.

    Returns (g2, sides) where sides maps surviving/created face ids to
    -1 / +1 (strictly on one closed side) or 0 (contained in h).  A split face
    is replaced by its two sides and the section face; a hyperplane that only
    supports existing faces changes nothing beyond tagging (degenerate cut).
    """
    g2 = g.copy()
    hid = g2.register_hyperplane(h)

    vsign: dict[int, int] = {}
    for vid in g2.layer(0):
        vsign[vid] = h.side(g2.faces[vid].coords, eps)

    sides: dict[int, int] = {}
    plus_of: dict[int, int] = {}
    minus_of: dict[int, int] = {}
    zero_of: dict[int, int] = {}
    split: set[int] = set()

    for d in sorted(g2.layer_counts()):
        for fid in sorted(g2.layer(d)):
            f = g2.faces[fid]
            if d == 0:
                sides[fid] = vsign[fid]
                if sides[fid] == 0:
                    f.onhs.add(hid)
                continue
            vs = {vsign[v] for v in g2.vertices_below(fid)}
            if vs <= {0}:
                sides[fid] = 0
                f.onhs.add(hid)
                continue
            if 1 not in vs:
                sides[fid] = -1
                continue
            if -1 not in vs:
                sides[fid] = 1
                continue
            # crossed: replace by plus / minus / section
            split.add(fid)
            fplus = g2.add_face(d, onhs=f.onhs)
            fminus = g2.add_face(d, onhs=f.onhs)
            fzero_coords = None
            if d == 1:
                a, b = (g2.faces[v] for v in g2.vertices_below(fid))
                va, vb = h.value(a.coords), h.value(b.coords)
                t = va / (va - vb)
                fzero_coords = a.coords + t * (b.coords - a.coords)
            fzero = g2.add_face(d - 1, coords=fzero_coords, onhs=f.onhs | {hid})
            plus_of[fid], minus_of[fid], zero_of[fid] = fplus, fminus, fzero
            sides[fplus], sides[fminus], sides[fzero] = 1, -1, 0

            g2.link(fzero, fplus)
            g2.link(fzero, fminus)
            for sub in list(f.subfaces):
                if sub in split:
                    g2.link(plus_of[sub], fplus)
                    g2.link(minus_of[sub], fminus)
                    g2.link(zero_of[sub], fzero)
                elif sides[sub] >= 0:
                    # a (d-1)-subface of a crossed face is never inside h
                    g2.link(sub, fplus)
                else:
                    g2.link(sub, fminus)
            if d >= 2:
                # rim faces: (d-2)-faces below fid lying in h but not produced
                # by a split subface (diagonal cuts through existing faces)
                rim = set()
                for sub in f.subfaces:
                    if sub in split:
                        continue
                    for ss in g2.faces[sub].subfaces:
                        if (
                            g2.faces[ss].dim == d - 2
                            and sides.get(ss) == 0
                            and ss not in zero_of.values()
                        ):
                            rim.add(ss)
                for r in rim:
                    g2.link(r, fzero)

    # detach split faces
    for fid in split:
        f = g2.faces.pop(fid)
        for s in f.subfaces:
            if s in g2.faces:
                g2.faces[s].superfaces.discard(fid)
        for s in f.superfaces:
            if s in g2.faces:
                g2.faces[s].subfaces.discard(fid)
        sides.pop(fid, None)
    return g2, sides


def restrict_side(g: IncidenceGraph, h: Hyperplane, keep: int, eps=EPS_GEO) -> IncidenceGraph:
    """Closed-halfspace intersection: keep faces on the `keep` side or in h."""
    g2, sides = insert_hyperplane(g, h, eps)
    wanted = {fid for fid, s in sides.items() if s == 0 or s == keep}
    return g2._subgraph(wanted)


def section(g: IncidenceGraph, h: Hyperplane, eps=EPS_GEO) -> IncidenceGraph:
    """Slice: the lattice of g intersected with the hyperplane h."""
    g2, sides = insert_hyperplane(g, h, eps)
    wanted = {fid for fid, s in sides.items() if s == 0}
    return g2._subgraph(wanted)


def from_halfspaces(box_lo, box_hi, halfspaces) -> IncidenceGraph:
    """Polytope lattice from halfspace cuts of a bounding box.

    halfspaces: iterable of (Hyperplane, keep_sign).  Returns the closure of
    the single surviving top cell.
    """
    g = box_lattice(box_lo, box_hi)
    for h, keep in halfspaces:
        g = restrict_side(g, h, keep)
        if not g.faces:
            raise EmptyPolytope("halfspaces cut away the box")
    tops = g.top_faces()
    if len(tops) != 1:
        raise EmptyPolytope(f"expected a single cell, found {len(tops)}")
    return g.closure_of(tops[0])


# -- facet recovery ---------------------------------------------------------


def _fit_plane(points, extra_dirs=(), dim=None, tol=1e-9):
    """Unit normal + offset of the hyperplane through `points` containing the
    directions in extra_dirs; requires a one-dimensional nullspace."""
    pts = np.asarray(points, dtype=float)
    dim = pts.shape[1] if dim is None else dim
    mu = pts.mean(axis=0)
    rows = [pts - mu] + [np.asarray(d, dtype=float).reshape(1, -1) for d in extra_dirs]
    M = np.vstack(rows)
    _, _, vt = np.linalg.svd(M, full_matrices=True)
    normal = vt[-1]
    return normal, float(normal @ mu)


def facet_hyperplanes(g: IncidenceGraph):
    """Outward-oriented supporting hyperplanes of the facets of a polytope
    lattice (faces one dimension below the single top face)."""
    tops = g.top_faces()
    if len(tops) != 1:
        raise ValueError("facet recovery requires a single top face")
    td = g.top_dim()
    inner = g.centroid(tops[0])
    out = []
    for fid in sorted(g.layer(td - 1)):
        nrm, off = _fit_plane(g.vertex_coords(fid), dim=g.dim)
        if nrm @ inner - off > 0:
            nrm, off = -nrm, -off
        out.append((fid, Hyperplane.oriented(nrm, off)))
    return out


# -- sweep / projection / shedding cube -------------------------------------


def _carrier_basis(g: IncidenceGraph, k: int):
    """Orthonormal basis of span(directions of g, e_k) with first vector e_k,
    plus an offset point with zero k-coordinate."""
    mu, dirs = g.affine_span()
    ek = np.zeros(g.dim)
    ek[k] = 1.0
    basis = [ek]
    for d in dirs:
        r = d - sum((d @ b) * b for b in basis)
        nr = np.linalg.norm(r)
        if nr > 1e-9:
            basis.append(r / nr)
    B = np.array(basis)  # rows orthonormal
    offset = mu - mu[k] * ek
    return B, offset


def sweep_dir(g: IncidenceGraph, k: int) -> IncidenceGraph:
    """Trace of g sliding toward {x_k = 0}: every point moves by -theta x_k e_k,
    theta in [0,1].  Requires g in the closed halfspace x_k >= 0."""
    V = g.vertex_coords()
    xk = V[:, k]
    if xk.min() < -EPS_GEO:
        raise NegativeCoordinate(f"axis {k}: coordinate {xk.min():.3e} below 0")
    if np.abs(xk).max() <= EPS_GEO:
        return g.copy()  # already inside the floor: sweep = projection = g

    B, offset = _carrier_basis(g, k)
    cdim = B.shape[0]
    Y = (V - offset) @ B.T  # carrier coords; column 0 is x_k
    gc = _relabel_to_coords(g, Y)

    mu, dirs = g.affine_span()
    ek = np.zeros(g.dim)
    ek[k] = 1.0
    in_dir = dirs.shape[0] > 0 and np.linalg.norm(dirs.T @ (dirs @ ek) - ek) < 1e-7

    planes = []  # (Hyperplane in carrier coords, keep side)
    inner = Y.mean(axis=0)
    inner = inner - 0.5 * inner[0] * np.eye(cdim)[0]  # interior of the swept body

    def wall_through(face_pts):
        nrm, off = _fit_plane(face_pts, extra_dirs=[np.eye(cdim)[0]], dim=cdim)
        h = Hyperplane.oriented(nrm, off)
        s = h.side(inner)  # keep the side containing the body
        if s == 0:
            raise ValueError("degenerate wall orientation")
        return h, s

    if not in_dir:
        # g spans a hyperplane of the carrier not orthogonal to the floor:
        # the body is bounded above by aff(g), below by the floor, laterally
        # by walls through each facet of g.
        nrm, off = _fit_plane(Y, dim=cdim)
        h = Hyperplane.oriented(nrm, off)
        planes.append((h, h.side(inner)))
        if gc.top_dim() >= 1:
            for fid in gc.layer(gc.top_dim() - 1):
                h, s = wall_through(gc.vertex_coords(fid))
                planes.append((h, s))
    else:
        # g is full-dimensional in the carrier: keep its top facets, extrude a
        # wall from every boundary ridge off the floor.
        facets = dict(facet_hyperplanes(gc))
        top = {fid for fid, h in facets.items() if h.normal[0] > EPS_GEO}
        for fid in top:
            h = facets[fid]
            planes.append((h, h.side(inner)))
        td = gc.top_dim()
        for rid in gc.layer(td - 2):
            sups = [s for s in gc.faces[rid].superfaces if s in facets]
            in_top = [s for s in sups if s in top]
            if len(in_top) != 1:
                continue  # interior ridge of the top cap, or fully shaded
            rpts = gc.vertex_coords(rid)
            if np.abs(rpts[:, 0]).max() <= EPS_GEO:
                continue  # ridge inside the floor: covered by the floor facet
            h, s = wall_through(rpts)
            planes.append((h, s))

    floor = Hyperplane.oriented(np.eye(cdim)[0], 0.0)
    planes.append((floor, 1))

    # dedup coincident planes (orientation-free identity)
    seen = {}
    for h, s in planes:
        seen.setdefault(h.key(), (h, s))
    planes = list(seen.values())

    lo = Y.min(axis=0)
    hi = Y.max(axis=0)
    margin = 0.25 * float(np.maximum(hi - lo, 1.0).max()) + 0.5
    lo = lo - margin
    hi = hi + margin
    lo[0] = -margin  # the floor must cut the box
    body = from_halfspaces(lo, hi, planes)
    Xamb = body_to_ambient(body, B, offset)
    return Xamb


def _relabel_to_coords(g: IncidenceGraph, Y: np.ndarray) -> IncidenceGraph:
    """Copy of g with vertex coordinates replaced (carrier transfer); Y rows
    follow sorted vertex-id order."""
    g2 = IncidenceGraph(Y.shape[1])
    g2.hyperplanes = {}
    g2._next = g._next
    vids = sorted(g.layer(0))
    ymap = {vid: Y[i] for i, vid in enumerate(vids)}
    for fid, f in g.faces.items():
        g2.faces[fid] = Face(
            fid, f.dim, set(f.subfaces), set(f.superfaces),
            ymap[fid].copy() if f.dim == 0 else None, set(),
        )
    return g2


def body_to_ambient(g: IncidenceGraph, B: np.ndarray, offset: np.ndarray) -> IncidenceGraph:
    """Map a carrier-coordinate lattice back to ambient coordinates."""
    g2 = IncidenceGraph(B.shape[1])
    g2._next = g._next
    for fid, f in g.faces.items():
        coords = None
        if f.coords is not None:
            coords = offset + f.coords @ B
        g2.faces[fid] = Face(fid, f.dim, set(f.subfaces), set(f.superfaces), coords, set())
    return g2


def project_dir(g: IncidenceGraph, k: int) -> IncidenceGraph:
    """Image lattice of the axis-k projection x -> x - x_k e_k."""
    V = g.vertex_coords()
    if np.abs(V[:, k]).max() <= EPS_GEO:
        return g.copy()
    mu, dirs = g.affine_span()
    ek = np.zeros(g.dim)
    ek[k] = 1.0
    in_dir = dirs.shape[0] > 0 and np.linalg.norm(dirs.T @ (dirs @ ek) - ek) < 1e-7
    if not in_dir:
        # affinely isomorphic: zero the k coordinate on every vertex
        g2 = g.copy()
        for vid in g2.layer(0):
            g2.faces[vid].coords = g2.faces[vid].coords.copy()
            g2.faces[vid].coords[k] = 0.0
        return g2
    body = sweep_dir(g, k)
    floor = [
        fid
        for fid in body.layer(body.top_dim() - 1)
        if np.abs(body.vertex_coords(fid)[:, k]).max() <= 1e-6
    ]
    if len(floor) != 1:
        raise ValueError("projection floor not unique")
    return body.closure_of(floor[0])


def cube_of_polytope(g: IncidenceGraph) -> IncidenceGraph:
    """Monotone shedding region of g: iterated sweep over every axis.  g must
    lie in one closed orthant; negative axes are handled by reflection."""
    body = g.copy()
    for k in range(g.dim - 1, -1, -1):
        V = body.vertex_coords()
        mn, mx = V[:, k].min(), V[:, k].max()
        if mn < -EPS_GEO and mx > EPS_GEO:
            raise ValueError(f"axis {k}: polytope leaves the closed orthant")
        flip = mx <= EPS_GEO and mn < -EPS_GEO
        if flip:
            body = _reflect_axis(body, k)
        body = sweep_dir(body, k)
        if flip:
            body = _reflect_axis(body, k)
    return body


def _reflect_axis(g: IncidenceGraph, k: int) -> IncidenceGraph:
    g2 = g.copy()
    for vid in g2.layer(0):
        g2.faces[vid].coords = g2.faces[vid].coords.copy()
        g2.faces[vid].coords[k] *= -1.0
    return g2


def lp_over_vertices(g: IncidenceGraph, objective) -> tuple:
    """Maximize objective . x over the vertex layer; ties resolved toward the
    lexicographically smallest coordinates."""
    c = np.asarray(objective, dtype=float)
    vids = g.layer(0)
    if not vids:
        raise EmptyPolytope("no vertices")
    best_val, best_x = -np.inf, None
    for vid in sorted(vids):
        x = g.faces[vid].coords
        v = float(c @ x)
        if v > best_val + 1e-9 or (
            abs(v - best_val) <= 1e-9 and best_x is not None and _lex_less(x, best_x)
        ):
            best_val, best_x = v, x
    return best_val, best_x.copy()


def _lex_less(a, b, eps=1e-9):
    for x, y in zip(a, b):
        if x < y - eps:
            return True
        if x > y + eps:
            return False
    return False
