"""Finite-element interpolation, quadrature and assembly on tetrahedral meshes.

The volume quadrature attached to :class:`IntegrationPointSet` is the rule of
the whole pipeline (its points are the hyper-reduction candidates): 1 centroid
point for linear tets, a positive-weight 5-point rule for quadratic tets
(centroid weight 4/9 V, four points at barycentric (0.7, 0.1, 0.1, 0.1) with
weight 5/36 V each; degree-2 exact). Global point ordering is element-major
and deterministic.

The L2 Gram matrix uses its own degree-5 conical-product rule so that element
mass matrices are exact for straight elements (the 1-point linear-tet rule
would make the Gram singular).

Strain vectors are engineering Voigt (11, 22, 33, 23, 13, 12) with doubled
shear; the dot product of a stress vector with such a strain vector equals
the tensor double contraction.
"""

import numpy as np
import scipy.sparse as sp
from scipy.special import roots_jacobi, roots_legendre

from .errors import ValidationError
from .mesh import TET_EDGES, TRI_EDGES

# -- reference shape functions -------------------------------------------------

_GRAD_L = np.array([[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def tet_shape(order, points):
    """Shape function values at reference points (xi, eta, zeta); (npts, nen)."""
    pts = np.atleast_2d(points)
    lam = np.column_stack([1.0 - pts.sum(axis=1), pts])
    if order == 1:
        return lam
    if order == 2:
        vertex = lam * (2.0 * lam - 1.0)
        edge = np.column_stack([4.0 * lam[:, a] * lam[:, b] for a, b in TET_EDGES])
        return np.hstack([vertex, edge])
    raise ValidationError(f"unsupported element order {order}")


def tet_shape_grad(order, points):
    """Reference gradients of the shape functions; (npts, nen, 3)."""
    pts = np.atleast_2d(points)
    lam = np.column_stack([1.0 - pts.sum(axis=1), pts])
    npts = pts.shape[0]
    if order == 1:
        return np.broadcast_to(_GRAD_L, (npts, 4, 3)).copy()
    if order == 2:
        g = np.empty((npts, 10, 3))
        for i in range(4):
            g[:, i, :] = (4.0 * lam[:, i] - 1.0)[:, None] * _GRAD_L[i]
        for j, (a, b) in enumerate(TET_EDGES):
            g[:, 4 + j, :] = 4.0 * (lam[:, a][:, None] * _GRAD_L[b] + lam[:, b][:, None] * _GRAD_L[a])
        return g
    raise ValidationError(f"unsupported element order {order}")


def tri_shape(order, points):
    """Triangle shape functions at reference points (xi, eta); (npts, nfn)."""
    pts = np.atleast_2d(points)
    lam = np.column_stack([1.0 - pts.sum(axis=1), pts])
    if order == 1:
        return lam
    vertex = lam * (2.0 * lam - 1.0)
    edge = np.column_stack([4.0 * lam[:, a] * lam[:, b] for a, b in TRI_EDGES])
    return np.hstack([vertex, edge])


def tri_shape_grad(order, points):
    grad_l = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    pts = np.atleast_2d(points)
    lam = np.column_stack([1.0 - pts.sum(axis=1), pts])
    npts = pts.shape[0]
    if order == 1:
        return np.broadcast_to(grad_l, (npts, 3, 2)).copy()
    g = np.empty((npts, 6, 2))
    for i in range(3):
        g[:, i, :] = (4.0 * lam[:, i] - 1.0)[:, None] * grad_l[i]
    for j, (a, b) in enumerate(TRI_EDGES):
        g[:, 3 + j, :] = 4.0 * (lam[:, a][:, None] * grad_l[b] + lam[:, b][:, None] * grad_l[a])
    return g


# -- quadrature rules ----------------------------------------------------------

def tet_rule(order):
    """Pipeline volume rule: (points (p, 3), weights (p,)); weights sum to 1/6."""
    if order == 1:
        return np.array([[0.25, 0.25, 0.25]]), np.array([1.0 / 6.0])
    if order == 2:
        a, b = 0.7, 0.1
        pts = np.array([
            [0.25, 0.25, 0.25],
            [b, b, b],          # lambda_0 = a
            [a, b, b],
            [b, a, b],
            [b, b, a],
        ])
        w = np.array([4.0 / 9.0, 5.0 / 36.0, 5.0 / 36.0, 5.0 / 36.0, 5.0 / 36.0]) / 6.0
        return pts, w
    raise ValidationError(f"unsupported element order {order}")


def tri_rule(order):
    """Surface rule on the reference triangle; weights sum to 1/2."""
    if order == 1:
        return np.array([[1.0 / 3.0, 1.0 / 3.0]]), np.array([0.5])
    pts = np.array([[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]])
    return pts, np.full(3, 1.0 / 6.0)


def tet_conical_rule(n=3):
    """Degree-(2n-1) conical product rule on the reference tet (Duffy transform)."""
    xu, wu = roots_jacobi(n, 2.0, 0.0)
    xv, wv = roots_jacobi(n, 1.0, 0.0)
    xw, ww = roots_legendre(n)
    u, cu = (1.0 + xu) / 2.0, wu / 8.0
    v, cv = (1.0 + xv) / 2.0, wv / 4.0
    w, cw = (1.0 + xw) / 2.0, ww / 2.0
    pts, wts = [], []
    for iu in range(n):
        for iv in range(n):
            for iw in range(n):
                x = u[iu]
                y = v[iv] * (1.0 - u[iu])
                z = w[iw] * (1.0 - u[iu]) * (1.0 - v[iv])
                pts.append((x, y, z))
                wts.append(cu[iu] * cv[iv] * cw[iw])
    return np.array(pts), np.array(wts)


# -- dof bookkeeping -------------------------------------------------------------

class DofMap:
    """Elimination of Dirichlet dofs: free-vector <-> nodal-field conversions.

    All three displacement components are fixed (to zero) at every node of a
    Dirichlet-tagged facet. The free vector interleaves components per node:
    (u_x, u_y, u_z) of the first free node, then the second, and so on.
    """

    def __init__(self, mesh):
        self.mesh = mesh
        fixed = mesh.dirichlet_nodes()
        mask = np.ones(mesh.n_nodes, dtype=bool)
        mask[fixed] = False
        self.free_nodes = np.flatnonzero(mask)
        self.node_to_free = -np.ones(mesh.n_nodes, dtype=np.int64)
        self.node_to_free[self.free_nodes] = np.arange(self.free_nodes.size)
        self.n_dofs = 3 * self.free_nodes.size

        nf = self.node_to_free[mesh.elements]           # (E, nen)
        dofs = 3 * nf[:, :, None] + np.arange(3)[None, None, :]
        dofs[nf < 0] = -1
        self.element_dofs = dofs.reshape(mesh.n_elements, -1)   # (E, 3*nen)

    def expand(self, u):
        """Free vector (N,) to nodal field (n_nodes, 3), zeros at Dirichlet nodes."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_dofs,):
            raise ValidationError(f"displacement vector has shape {u.shape}, expected ({self.n_dofs},)")
        out = np.zeros((self.mesh.n_nodes, 3))
        out[self.free_nodes] = u.reshape(-1, 3)
        return out

    def restrict(self, nodal):
        """Nodal field (n_nodes, 3) to free vector (N,)."""
        nodal = np.asarray(nodal, dtype=float)
        return nodal[self.free_nodes].reshape(-1)


# -- integration points -----------------------------------------------------------

class IntegrationPointSet:
    """All volume integration points of a mesh, element-major.

    Attributes
    ----------
    element : (N_G,) int
        Owner element of each point.
    position : (N_G, 3), weight : (N_G,), subdomain : (N_G,) arrays.
    B : (N_G, 6, 3*nen)
        Strain-displacement operator per point (engineering Voigt).
    shape : (N_G, nen)
        Nodal shape function values per point.
    points_per_element : int
    """

    def __init__(self, element, position, weight, subdomain, B, shape, points_per_element):
        self.element = element
        self.position = position
        self.weight = weight
        self.subdomain = subdomain
        self.B = B
        self.shape = shape
        self.points_per_element = points_per_element

    @property
    def n_points(self):
        return self.weight.shape[0]

    def points_of_subdomain(self, l):
        return np.flatnonzero(self.subdomain == l)


def _element_geometry(mesh, ref_pts):
    """Jacobians at reference points for all elements; returns (detJ, grad_x)."""
    dshp = tet_shape_grad(mesh.order, ref_pts)               # (p, nen, 3)
    coords = mesh.nodes[mesh.elements]                       # (E, nen, 3)
    J = np.einsum("eai,paj->epij", coords, dshp)
    detJ = np.linalg.det(J)
    if np.any(detJ <= 0.0):
        bad = int(np.argwhere(detJ <= 0.0)[0][0])
        raise ValidationError(f"element {bad} has non-positive Jacobian")
    Jinv = np.linalg.inv(J)
    grad_x = np.einsum("paj,epji->epai", dshp, Jinv)         # (E, p, nen, 3)
    return detJ, grad_x


def build_integration_points(mesh):
    """Build the pipeline quadrature (and B operators) for a mesh."""
    ref_pts, ref_w = tet_rule(mesh.order)
    p = ref_pts.shape[0]
    nen = mesh.elements.shape[1]
    E = mesh.n_elements
    detJ, grad_x = _element_geometry(mesh, ref_pts)
    shp = tet_shape(mesh.order, ref_pts)                     # (p, nen)
    coords = mesh.nodes[mesh.elements]

    weight = (ref_w[None, :] * detJ).reshape(-1)
    position = np.einsum("pa,eai->epi", shp, coords).reshape(-1, 3)
    element = np.repeat(np.arange(E), p)
    subdomain = np.repeat(mesh.subdomains, p)
    shape = np.broadcast_to(shp, (E, p, nen)).reshape(-1, nen)

    B = np.zeros((E, p, 6, 3 * nen))
    gx, gy, gz = grad_x[..., 0], grad_x[..., 1], grad_x[..., 2]
    B[:, :, 0, 0::3] = gx
    B[:, :, 1, 1::3] = gy
    B[:, :, 2, 2::3] = gz
    B[:, :, 3, 1::3] = gz     # gamma_23 = du2/dx3 + du3/dx2
    B[:, :, 3, 2::3] = gy
    B[:, :, 4, 0::3] = gz     # gamma_13
    B[:, :, 4, 2::3] = gx
    B[:, :, 5, 0::3] = gy     # gamma_12
    B[:, :, 5, 1::3] = gx
    return IntegrationPointSet(element, position, weight, subdomain,
                               B.reshape(-1, 6, 3 * nen), shape, p)


def element_volumes(mesh):
    """Exact volumes of the (straight) corner tetrahedra."""
    corners = mesh.nodes[mesh.elements[:, :4]]
    d = corners[:, 1:] - corners[:, :1]
    return np.abs(np.linalg.det(d)) / 6.0


def strain_at_points(mesh, ips, u, dofmap=None):
    """Engineering strain of a free-dof displacement vector at all points; (N_G, 6)."""
    dofmap = dofmap or DofMap(mesh)
    nodal = dofmap.expand(u)
    ue = nodal[mesh.elements].reshape(mesh.n_elements, -1)
    p = ips.points_per_element
    Bmat = ips.B.reshape(mesh.n_elements, p, 6, -1)
    return np.einsum("epij,ej->epi", Bmat, ue).reshape(-1, 6)


def interpolate_nodal(mesh, ips, nodal):
    """Interpolate a scalar nodal field to all integration points."""
    nodal = np.asarray(nodal, dtype=float)
    if nodal.shape != (mesh.n_nodes,):
        raise ValidationError(f"nodal field has shape {nodal.shape}, expected ({mesh.n_nodes},)")
    conn = mesh.elements[ips.element]
    return np.einsum("ka,ka->k", ips.shape, nodal[conn])


def scatter_nodal_forces(mesh, point_ids, contrib, n_nodes=None):
    """Accumulate per-point nodal contributions (npts, nen, 3) into a nodal field."""
    out = np.zeros((n_nodes or mesh.n_nodes, 3))
    conn = mesh.elements[point_ids]
    np.add.at(out, conn, contrib)
    return out


def assemble_external_forces(mesh, ips, step, dofmap=None):
    """External force vector of one loading step (volumic + tractions), free dofs.

    Returns the two boundary/volume integrals with positive sign; rows at
    Dirichlet dofs are eliminated. Linear in the loading data.
    """
    dofmap = dofmap or DofMap(mesh)
    F = np.zeros((mesh.n_nodes, 3))

    if step.volumic is not None:
        f_pts = step.volumic.evaluate(ips.position)          # (N_G, 3)
        contrib = ips.weight[:, None, None] * ips.shape[:, :, None] * f_pts[:, None, :]
        np.add.at(F, mesh.elements[ips.element], contrib)

    if step.tractions:
        ref_pts, ref_w = tri_rule(mesh.order)
        shp = tri_shape(mesh.order, ref_pts)                 # (q, fn)
        dshp = tri_shape_grad(mesh.order, ref_pts)           # (q, fn, 2)
        for tag, vec in sorted(step.tractions.items()):
            vec = np.asarray(vec, dtype=float)
            facets = mesh.facets_of_tag(tag)                 # raises on unknown tag
            coords = mesh.nodes[facets]                      # (F, fn, 3)
            tang = np.einsum("fai,qad->fqid", coords, dshp)  # (F, q, 3, 2)
            normal = np.cross(tang[..., 0], tang[..., 1])
            dS = np.linalg.norm(normal, axis=-1) * ref_w[None, :]
            contrib = dS[:, :, None, None] * shp[None, :, :, None] * vec[None, None, None, :]
            np.add.at(F, facets, contrib.sum(axis=1))
    return dofmap.restrict(F)


def scatter_element_matrices(dofmap, element_ids, Ke, n_dofs=None):
    """Assemble dense element matrices (n_el, d, d) into a sparse CSR matrix."""
    gdofs = dofmap.element_dofs[element_ids]                 # (n_el, d)
    d = gdofs.shape[1]
    rows = np.repeat(gdofs[:, :, None], d, axis=2)
    cols = np.repeat(gdofs[:, None, :], d, axis=1)
    keep = (rows >= 0) & (cols >= 0)
    n = n_dofs or dofmap.n_dofs
    mat = sp.coo_matrix(
        (Ke[keep], (rows[keep], cols[keep])), shape=(n, n)
    )
    return mat.tocsr()


def l2_gram_matrix(mesh, ips, dofmap=None, elements=None):
    """Sparse L2(Omega) Gram matrix on free dofs, optionally for an element subset.

    Uses a degree-5 conical rule internally so element mass matrices are exact
    for straight elements; summing the per-subdomain matrices reproduces the
    global one exactly.
    """
    dofmap = dofmap or DofMap(mesh)
    if elements is None:
        elements = np.arange(mesh.n_elements)
    else:
        elements = np.asarray(elements, dtype=np.int64)
    ref_pts, ref_w = tet_conical_rule(3)
    shp = tet_shape(mesh.order, ref_pts)                     # (q, nen)
    dshp = tet_shape_grad(mesh.order, ref_pts)
    coords = mesh.nodes[mesh.elements[elements]]
    J = np.einsum("eai,paj->epij", coords, dshp)
    detJ = np.linalg.det(J)
    Me = np.einsum("q,qa,qb,eq->eab", ref_w, shp, shp, detJ)  # (n_el, nen, nen)
    nen = shp.shape[1]
    Ke = np.einsum("eab,cd->eacbd", Me, np.eye(3)).reshape(len(elements), 3 * nen, 3 * nen)
    return scatter_element_matrices(dofmap, elements, Ke)


def subdomain_gram_matrices(mesh, ips, dofmap=None):
    """One L2 Gram matrix per subdomain; their sum is the global Gram matrix."""
    dofmap = dofmap or DofMap(mesh)
    return [
        l2_gram_matrix(mesh, ips, dofmap, mesh.elements_of_subdomain(l))
        for l in range(1, mesh.n_subdomains + 1)
    ]
