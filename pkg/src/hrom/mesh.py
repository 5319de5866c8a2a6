"""Unstructured tetrahedral meshes: representation, validation, HRMESH I/O.

Elements are 4-node (order 1) or 10-node (order 2) tetrahedra. For order 2
the mid-edge nodes follow the local edge order (0,1), (1,2), (0,2), (0,3),
(1,3), (2,3). Boundary facets are 3-node (order 1) or 6-node (order 2)
triangles carrying an integer tag; the Dirichlet tag and the Neumann tags are
configuration, not part of the mesh file format.

Subdomain ids live on elements, are 1-based and must cover 1..n_d; they are
data provided by the ingestion layer (this module never partitions).
"""

import numpy as np

from .errors import ValidationError

#: Local edges of a tetrahedron, in the mid-node order used for 10-node tets.
TET_EDGES = ((0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3))
#: Local vertex triples of the four faces of a tetrahedron.
TET_FACES = ((0, 1, 2), (0, 1, 3), (1, 2, 3), (0, 2, 3))
#: Local edges of a triangle, in the mid-node order used for 6-node facets.
TRI_EDGES = ((0, 1), (1, 2), (0, 2))

_NODES_PER_ORDER = {1: 4, 2: 10}
_FACET_NODES_PER_ORDER = {1: 3, 2: 6}


class Mesh:
    """Tetrahedral mesh with tagged boundary facets and element subdomain ids.

    Parameters
    ----------
    nodes : (n_nodes, 3) float array
        Node coordinates.
    elements : (n_elements, 4 or 10) int array
        Connectivity; the column count must match ``order``.
    order : int
        1 for linear, 2 for quadratic tetrahedra.
    facets : (n_facets, 3 or 6) int array
        Boundary triangle connectivity.
    facet_tags : (n_facets,) int array
        One integer tag per boundary facet.
    subdomains : (n_elements,) int array, optional
        1-based subdomain id per element; defaults to a single subdomain.
    dirichlet_tag : int or None
        Facet tag carrying the zero-displacement condition.
    neumann_tags : sequence of int
        Facet tags where tractions may be applied.
    """

    def __init__(self, nodes, elements, order, facets, facet_tags,
                 subdomains=None, dirichlet_tag=None, neumann_tags=()):
        self.nodes = np.asarray(nodes, dtype=float)
        self.elements = np.asarray(elements, dtype=np.int64)
        self.order = int(order)
        self.facets = np.asarray(facets, dtype=np.int64)
        self.facet_tags = np.asarray(facet_tags, dtype=np.int64)
        if subdomains is None:
            subdomains = np.ones(len(self.elements), dtype=np.int64)
        self.subdomains = np.asarray(subdomains, dtype=np.int64)
        self.dirichlet_tag = dirichlet_tag
        self.neumann_tags = tuple(int(t) for t in neumann_tags)
        self.validate()

    # -- basic sizes ---------------------------------------------------------

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def n_subdomains(self):
        return int(self.subdomains.max()) if self.n_elements else 0

    def elements_of_subdomain(self, l):
        """Element indices belonging to subdomain ``l`` (1-based)."""
        return np.flatnonzero(self.subdomains == l)

    # -- validation ----------------------------------------------------------

    def validate(self):
        if self.order not in _NODES_PER_ORDER:
            raise ValidationError(f"unsupported element order {self.order} (only 1 and 2)")
        nen = _NODES_PER_ORDER[self.order]
        if self.elements.ndim != 2 or self.elements.shape[1] != nen:
            raise ValidationError(
                f"order-{self.order} elements need {nen} nodes, got shape {self.elements.shape}"
            )
        fn = _FACET_NODES_PER_ORDER[self.order]
        if len(self.facets) and self.facets.shape[1] != fn:
            raise ValidationError(
                f"order-{self.order} facets need {fn} nodes, got shape {self.facets.shape}"
            )
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 3:
            raise ValidationError(f"nodes must have shape (n, 3), got {self.nodes.shape}")
        if self.elements.size and (self.elements.min() < 0 or self.elements.max() >= self.n_nodes):
            raise ValidationError("element connectivity references nodes out of range")
        if self.facets.size and (self.facets.min() < 0 or self.facets.max() >= self.n_nodes):
            raise ValidationError("facet connectivity references nodes out of range")
        if len(self.facet_tags) != len(self.facets):
            raise ValidationError("facet_tags length does not match facets")
        if len(self.subdomains) != self.n_elements:
            raise ValidationError("subdomains length does not match element count")
        if self.n_elements:
            ids = np.unique(self.subdomains)
            n_d = ids.max()
            if ids.min() < 1 or not np.array_equal(ids, np.arange(1, n_d + 1)):
                raise ValidationError("subdomain ids must cover 1..n_d with no gaps")
        if self.dirichlet_tag is not None and self.dirichlet_tag in self.neumann_tags:
            raise ValidationError("Dirichlet and Neumann tags must be disjoint")
        self._check_facets_on_boundary()

    def _check_facets_on_boundary(self):
        """Every boundary facet must be a face of exactly one element."""
        if not len(self.facets):
            return
        counts = {}
        for conn in self.elements[:, :4]:
            for face in TET_FACES:
                key = tuple(sorted(conn[list(face)]))
                counts[key] = counts.get(key, 0) + 1
        for i, f in enumerate(self.facets[:, :3]):
            key = tuple(sorted(f))
            owners = counts.get(key, 0)
            if owners != 1:
                raise ValidationError(
                    f"facet {i} (nodes {f.tolist()}) is a face of {owners} elements, expected 1"
                )

    def dirichlet_nodes(self):
        """Sorted node indices carried by Dirichlet-tagged facets."""
        if self.dirichlet_tag is None:
            return np.empty(0, dtype=np.int64)
        mask = self.facet_tags == self.dirichlet_tag
        return np.unique(self.facets[mask])

    def facets_of_tag(self, tag):
        idx = np.flatnonzero(self.facet_tags == tag)
        if idx.size == 0:
            raise ValidationError(f"no boundary facet carries tag {tag}")
        return self.facets[idx]


# -- HRMESH v1 ----------------------------------------------------------------

def save_mesh(mesh, path):
    """Write a mesh in the ASCII HRMESH v1 format."""
    with open(path, "w", encoding="ascii") as f:
        f.write("HRMESH 1\n")
        f.write(f"NODES {mesh.n_nodes}\n")
        for x, y, z in mesh.nodes:
            f.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        f.write(f"ELEMENTS {mesh.n_elements} {mesh.order}\n")
        for conn in mesh.elements:
            f.write(" ".join(str(int(c)) for c in conn) + "\n")
        f.write(f"FACETS {len(mesh.facets)}\n")
        for tag, conn in zip(mesh.facet_tags, mesh.facets):
            f.write(str(int(tag)) + " " + " ".join(str(int(c)) for c in conn) + "\n")
        f.write(f"SUBDOMAINS {mesh.n_subdomains}\n")
        for s in mesh.subdomains:
            f.write(f"{int(s)}\n")


def _tokens(path):
    with open(path, encoding="ascii") as f:
        for raw in f:
            line = raw.split("#", 1)[0]
            for tok in line.split():
                yield tok


def load_mesh(path, dirichlet_tag=None, neumann_tags=()):
    """Read an HRMESH v1 file.

    The Dirichlet/Neumann tag assignment is configuration (supplied by the
    caller), not stored in the file.
    """
    path = str(path)
    it = _tokens(path)

    def need(what):
        try:
            return next(it)
        except StopIteration:
            raise ValidationError(f"{path}: unexpected end of file while reading {what}") from None

    def expect(keyword):
        tok = need(keyword)
        if tok != keyword:
            raise ValidationError(f"{path}: expected '{keyword}', found '{tok}'")

    expect("HRMESH")
    if need("version") != "1":
        raise ValidationError(f"{path}: unsupported HRMESH version")
    expect("NODES")
    n_nodes = int(need("node count"))
    nodes = np.fromiter(
        (float(need("node coordinate")) for _ in range(3 * n_nodes)), dtype=float, count=3 * n_nodes
    ).reshape(n_nodes, 3)
    expect("ELEMENTS")
    n_el = int(need("element count"))
    order = int(need("element order"))
    if order not in _NODES_PER_ORDER:
        raise ValidationError(f"{path}: unsupported element order {order}")
    nen = _NODES_PER_ORDER[order]
    elements = np.fromiter(
        (int(need("element node")) for _ in range(nen * n_el)), dtype=np.int64, count=nen * n_el
    ).reshape(n_el, nen)
    expect("FACETS")
    n_fac = int(need("facet count"))
    fn = _FACET_NODES_PER_ORDER[order]
    facet_tags = np.empty(n_fac, dtype=np.int64)
    facets = np.empty((n_fac, fn), dtype=np.int64)
    for i in range(n_fac):
        facet_tags[i] = int(need("facet tag"))
        for j in range(fn):
            facets[i, j] = int(need("facet node"))
    expect("SUBDOMAINS")
    n_d = int(need("subdomain count"))
    subdomains = np.fromiter(
        (int(need("subdomain id")) for _ in range(n_el)), dtype=np.int64, count=n_el
    )
    if n_el and subdomains.max() != n_d:
        raise ValidationError(f"{path}: SUBDOMAINS header says {n_d}, ids reach {subdomains.max()}")
    return Mesh(nodes, elements, order, facets, facet_tags, subdomains,
                dirichlet_tag=dirichlet_tag, neumann_tags=neumann_tags)


# -- structured box generator --------------------------------------------------

# Freudenthal decomposition of a hexahedral cell into 6 tetrahedra sharing the
# main diagonal (0,7); conforming across a structured grid.
_BOX_TETS = (
    (0, 1, 3, 7), (0, 3, 2, 7), (0, 2, 6, 7),
    (0, 6, 4, 7), (0, 4, 5, 7), (0, 5, 1, 7),
)
#: Tags assigned to the six box faces: x=min, x=max, y=min, y=max, z=min, z=max.
BOX_FACE_TAGS = (1, 2, 3, 4, 5, 6)


def box_mesh(lengths=(1.0, 1.0, 1.0), divisions=(1, 1, 1), order=1,
             dirichlet_tag=None, neumann_tags=()):
    """Structured tetrahedral mesh of an axis-aligned box anchored at the origin.

    Faces are tagged per :data:`BOX_FACE_TAGS`. Each hexahedral cell is split
    into six tetrahedra; for ``order=2`` a node is added at each unique edge
    midpoint.
    """
    lx, ly, lz = (float(v) for v in lengths)
    nx, ny, nz = (int(v) for v in divisions)
    if min(nx, ny, nz) < 1:
        raise ValidationError("box divisions must be >= 1")
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    zs = np.linspace(0.0, lz, nz + 1)
    vid = lambda i, j, k: (i * (ny + 1) + j) * (nz + 1) + k
    verts = np.array([[x, y, z] for x in xs for y in ys for z in zs])

    tets = []
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                corner = [
                    vid(i, j, k), vid(i + 1, j, k), vid(i, j + 1, k), vid(i + 1, j + 1, k),
                    vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i, j + 1, k + 1),
                    vid(i + 1, j + 1, k + 1),
                ]
                for t in _BOX_TETS:
                    conn = [corner[a] for a in t]
                    d = verts[conn[1:]] - verts[conn[0]]
                    if np.linalg.det(d) < 0:
                        conn[1], conn[2] = conn[2], conn[1]
                    tets.append(conn)
    tets = np.asarray(tets, dtype=np.int64)

    # Boundary faces: vertex triples appearing in exactly one tetrahedron.
    counts = {}
    for e, conn in enumerate(tets):
        for face in TET_FACES:
            key = tuple(sorted(conn[list(face)]))
            counts[key] = counts.get(key, 0) + 1
    boundary = [k for k, c in counts.items() if c == 1]

    tol = 1e-12 * max(lx, ly, lz)
    planes = ((0, 0.0, 1), (0, lx, 2), (1, 0.0, 3), (1, ly, 4), (2, 0.0, 5), (2, lz, 6))
    tri_list, tag_list = [], []
    for tri in boundary:
        pts = verts[list(tri)]
        for axis, value, tag in planes:
            if np.all(np.abs(pts[:, axis] - value) <= tol):
                tri_list.append(list(tri))
                tag_list.append(tag)
                break
        else:
            raise ValidationError("boundary face not on any box plane")

    if order == 1:
        return Mesh(verts, tets, 1, np.asarray(tri_list), np.asarray(tag_list),
                    dirichlet_tag=dirichlet_tag, neumann_tags=neumann_tags)

    # Order 2: insert mid-edge nodes.
    midpoint = {}
    nodes = [verts]
    next_id = len(verts)

    def mid(a, b):
        nonlocal next_id
        key = (a, b) if a < b else (b, a)
        if key not in midpoint:
            midpoint[key] = next_id
            nodes.append(0.5 * (verts[a] + verts[b]))
            next_id += 1
        return midpoint[key]

    tets10 = np.empty((len(tets), 10), dtype=np.int64)
    tets10[:, :4] = tets
    for e, conn in enumerate(tets):
        for j, (a, b) in enumerate(TET_EDGES):
            tets10[e, 4 + j] = mid(conn[a], conn[b])
    tris6 = np.empty((len(tri_list), 6), dtype=np.int64)
    for i, tri in enumerate(tri_list):
        tris6[i, :3] = tri
        for j, (a, b) in enumerate(TRI_EDGES):
            tris6[i, 3 + j] = mid(tri[a], tri[b])
    all_nodes = np.vstack([verts, np.asarray(nodes[1:])]) if len(nodes) > 1 else verts
    return Mesh(all_nodes, tets10, 2, tris6, np.asarray(tag_list),
                dirichlet_tag=dirichlet_tag, neumann_tags=neumann_tags)


def single_tet_mesh(order=1, nodes=None, dirichlet_tag=None, neumann_tags=()):
    """One reference-like tetrahedron, handy for hand-checked tests."""
    if nodes is None:
        nodes = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    nodes = np.asarray(nodes, dtype=float)
    if order == 1:
        facets = np.array([[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]])
        return Mesh(nodes, np.array([[0, 1, 2, 3]]), 1, facets, np.array([1, 2, 3, 4]),
                    dirichlet_tag=dirichlet_tag, neumann_tags=neumann_tags)
    mids = np.array([0.5 * (nodes[a] + nodes[b]) for a, b in TET_EDGES])
    all_nodes = np.vstack([nodes, mids])
    conn = np.arange(10)[None, :]
    edge_id = {tuple(sorted(e)): 4 + j for j, e in enumerate(TET_EDGES)}
    facets = []
    for face in TET_FACES:
        row = list(face)
        for a, b in TRI_EDGES:
            row.append(edge_id[tuple(sorted((face[a], face[b])))])
        facets.append(row)
    return Mesh(all_nodes, conn, 2, np.asarray(facets), np.array([1, 2, 3, 4]),
                dirichlet_tag=dirichlet_tag, neumann_tags=neumann_tags)
