"""Seeded benchmark-instance generators: Sachdeva stars, 3D Poisson grids,
and Chimera graphs.

Every generator is a pure function of its spec (and seed); identical inputs
produce identical matrices, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sparsesym import SparseSym, laplacian_from_edges


# ---------------------------------------------------------------------------
# Sachdeva stars


@dataclass(frozen=True)
class StarSpec:
    """Hub joined to l copies of K_k by unit edges; l defaults to k/2."""

    k: int
    l: int = None

    def __post_init__(self):
        if self.k < 4 or self.k % 2 != 0:
            raise ValueError("clique size k must be even and >= 4")
        if self.l is None:
            object.__setattr__(self, "l", self.k // 2)
        if self.l < 1:
            raise ValueError("leaf count l must be >= 1")

    @property
    def n(self) -> int:
        return 1 + self.l * self.k

    @property
    def edge_count(self) -> int:
        return self.l * (1 + self.k * (self.k - 1) // 2)


def sachdeva_star(spec: StarSpec) -> SparseSym:
    """Adversarial family for single-sample tree elimination; all weights 1."""
    k, l = spec.k, spec.l
    iu, ju = np.triu_indices(k, 1)
    rows = [np.zeros(l, dtype=np.int64)]
    cols = [1 + np.arange(l, dtype=np.int64) * k]  # hub to clique anchors
    for c in range(l):
        base = 1 + c * k
        rows.append(base + iu)
        cols.append(base + ju)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return laplacian_from_edges(spec.n, rows, cols, np.ones(rows.size))


# ---------------------------------------------------------------------------
# 3D Poisson grids


@dataclass(frozen=True)
class Uniform:
    pass


@dataclass(frozen=True)
class Checkerboard:
    k: int
    w: float

    def __post_init__(self):
        if self.k < 1 or self.w <= 0:
            raise ValueError("need k >= 1 and w > 0")


@dataclass(frozen=True)
class AnisotropicWeight:
    w: float

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("need w > 0")


@dataclass(frozen=True)
class AnisotropicStretch:
    eta: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("need eta > 0")


@dataclass(frozen=True)
class GridSpec:
    """7-point stencil grid; n1, n2, n3 count points per axis incl. boundary.

    AnisotropicStretch overrides n1 with max(2, round(eta * n2)).
    """

    n1: int
    n2: int
    n3: int
    coeff: object = field(default_factory=Uniform)

    def __post_init__(self):
        if isinstance(self.coeff, AnisotropicStretch):
            object.__setattr__(
                self, "n1", max(2, int(round(self.coeff.eta * self.n2))))
        if min(self.n1, self.n2, self.n3) < 2:
            raise ValueError("need at least 2 points per axis")
        if isinstance(self.coeff, Checkerboard):
            for npts in (self.n1, self.n2, self.n3):
                if (npts - 1) % self.coeff.k != 0:
                    raise ValueError(
                        "checkerboard regions must align with the grid: "
                        f"(n-1) must be divisible by k, got n={npts}, "
                        f"k={self.coeff.k}")


def _mu(spec: GridSpec, x, y, z, axis):
    c = spec.coeff
    if isinstance(c, Checkerboard):
        par = (np.floor(c.k * x) + np.floor(c.k * y) + np.floor(c.k * z)) % 2
        return np.where(par == 0, 1.0, c.w)
    if isinstance(c, AnisotropicWeight):
        return np.full_like(x, c.w if axis == 0 else 1.0)
    return np.ones_like(x)


def poisson_grid(spec: GridSpec) -> SparseSym:
    """Dirichlet 7-point stencil on the interior points; strictly SDDM.

    Coefficients are the diffusion field sampled at half-grid midpoints;
    faces toward removed boundary points contribute to the diagonal only,
    which is exactly the diagonal excess.
    """
    dims = (spec.n1, spec.n2, spec.n3)
    mi = tuple(d - 2 for d in dims)
    if min(mi) < 1:
        raise ValueError("grid has no interior points")
    n = mi[0] * mi[1] * mi[2]
    strides = (mi[1] * mi[2], mi[2], 1)

    def positions(axis, grid_index):
        return grid_index / (dims[axis] - 1)

    rows, cols, wts = [], [], []
    bd = np.zeros(n)
    for axis in range(3):
        # meshgrid of interior coordinates, faces along `axis`
        g = np.meshgrid(*[np.arange(1, d - 1) for d in dims], indexing="ij")
        self_ids = _grid_ids(g, strides)
        # face between grid point gi and gi+1 along axis, at the midpoint
        for side in (0, 1):  # 0: face below (gi-1,gi); 1: face above (gi,gi+1)
            mids = [positions(a, gg.astype(np.float64)) for a, gg in enumerate(g)]
            mids[axis] = positions(
                axis, g[axis].astype(np.float64) + (0.5 if side else -0.5))
            coef = _mu(spec, mids[0], mids[1], mids[2], axis)
            nb = g[axis] + (1 if side else -1)
            interior = (nb >= 1) & (nb <= dims[axis] - 2)
            # boundary-facing coefficient: diagonal only
            np.add.at(bd, self_ids, np.where(interior, 0.0, coef))
            if side == 1:
                sel = interior
                u = self_ids[sel]
                gg = [x.copy() for x in g]
                gg[axis] = gg[axis] + 1
                v = _grid_ids(gg, strides)[sel]
                rows.append(u.ravel())
                cols.append(v.ravel())
                wts.append(coef[sel].ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    wts = np.concatenate(wts)
    diag = np.zeros(n)
    np.add.at(diag, rows, wts)
    np.add.at(diag, cols, wts)
    diag += bd
    return SparseSym(n, rows, cols, -wts, diag)


def _grid_ids(g, strides):
    return ((g[0] - 1) * strides[0] + (g[1] - 1) * strides[1]
            + (g[2] - 1) * strides[2])


# ---------------------------------------------------------------------------
# Chimeras


@dataclass(frozen=True)
class ChimeraSpec:
    n: int
    seed: int = 1
    weighted: bool = False
    sddm_boundary: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")


def _edges_path(m):
    i = np.arange(m - 1, dtype=np.int64)
    return m, np.stack([i, i + 1], axis=1)


def _edges_ring(m, rng, generalized):
    m = max(m, 3)
    i = np.arange(m, dtype=np.int64)
    e = np.stack([i, (i + 1) % m], axis=1)
    if generalized:
        stride = int(rng.integers(2, max(3, m // 2)))
        e = np.concatenate([e, np.stack([i, (i + stride) % m], axis=1)])
    return m, e


def _edges_tree(m, rng):
    if m < 2:
        return 2, np.array([[0, 1]], dtype=np.int64)
    parents = np.array([rng.integers(0, i) for i in range(1, m)],
                       dtype=np.int64)
    return m, np.stack([parents, np.arange(1, m, dtype=np.int64)], axis=1)


def _edges_grid2d(m, rng):
    a = max(2, int(np.sqrt(m * (0.5 + rng.random()))))
    b = max(2, m // a)
    ids = np.arange(a * b, dtype=np.int64).reshape(a, b)
    e = np.concatenate([
        np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1),
        np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1),
    ])
    return a * b, e


def _edges_er_lcc(m, rng):
    # average degree >= 4 keeps the giant component above ~98% of m
    c = 2.0 + 1.5 * rng.random()
    ne = int(c * m / 2) + 1
    u = rng.integers(0, m, ne)
    v = rng.integers(0, m, ne)
    ok = u != v
    u, v = u[ok], v[ok]
    comp = _component_labels(m, u, v)
    big = np.bincount(comp, minlength=m).argmax()
    keep = np.nonzero(comp == big)[0]
    if keep.size < 2:
        return _edges_path(max(m, 2))
    remap = -np.ones(m, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    sel = comp[u] == big
    return keep.size, np.stack([remap[u[sel]], remap[v[sel]]], axis=1)


def _edges_regularish(m, rng):
    d = int(rng.integers(3, 6))
    stubs = np.repeat(np.arange(m, dtype=np.int64), d)
    rng.shuffle(stubs)
    e = stubs[: 2 * (stubs.size // 2)].reshape(-1, 2)
    return m, e


def _edges_pref_attach(m, rng):
    t = int(rng.integers(1, 4))
    targets = [0]
    edges = []
    for v in range(1, m):
        for _ in range(min(t, v)):
            u = targets[int(rng.integers(0, len(targets)))]
            edges.append((u, v))
            targets.append(u)
        targets.append(v)
    return m, np.array(edges, dtype=np.int64)


def cartesian_product(na, ea, nb, eb):
    """Vertices (a, b); edges inherited along either factor."""
    out = []
    for u, v in ea:
        b = np.arange(nb, dtype=np.int64)
        out.append(np.stack([u * nb + b, v * nb + b], axis=1))
    for u, v in eb:
        a = np.arange(na, dtype=np.int64)
        out.append(np.stack([a * nb + u, a * nb + v], axis=1))
    return na * nb, np.concatenate(out) if out else np.empty((0, 2), np.int64)


def generalized_necklace(na, ea, nb, eb, cross_per_edge, rng):
    """Expand each vertex of A into a copy of B, crossing along A's edges."""
    out = []
    eb = np.asarray(eb, dtype=np.int64).reshape(-1, 2)
    for a in range(na):
        if len(eb):
            out.append(eb + a * nb)
    ea = np.asarray(ea, dtype=np.int64).reshape(-1, 2)
    if len(ea) and cross_per_edge:
        rep = np.repeat(ea, cross_per_edge, axis=0)
        s = rng.integers(0, nb, rep.shape[0])
        t = rng.integers(0, nb, rep.shape[0])
        out.append(np.stack([rep[:, 0] * nb + s, rep[:, 1] * nb + t], axis=1))
    return na * nb, np.concatenate(out) if out else np.empty((0, 2), np.int64)


def two_lift(n, e, rng):
    """Double the vertex set; each edge becomes an internal or crossing pair."""
    e = np.asarray(e, dtype=np.int64)
    cross = rng.random(len(e)) < 0.5
    u, v = e[:, 0], e[:, 1]
    e1 = np.stack([u, np.where(cross, v + n, v)], axis=1)
    e2 = np.stack([u + n, np.where(cross, v, v + n)], axis=1)
    return 2 * n, np.concatenate([e1, e2])


def thicken(n, e, rng, rate=0.1):
    """Add a sampled subset of the current 2-hop paths as new edges.

    Per vertex the sample size is rate * (#2-hop pairs) capped at 3x its
    degree, so thickening stays near-linear even around hubs.
    """
    adj = [[] for _ in range(n)]
    for u, v in np.asarray(e, dtype=np.int64):
        adj[u].append(v)
        adj[v].append(u)
    extra = []
    for v in range(n):
        nb = adj[v]
        deg = len(nb)
        if deg < 2:
            continue
        npairs = deg * (deg - 1) // 2
        want = min(int(npairs * rate) + (1 if rng.random() < rate else 0),
                   3 * deg)
        for _ in range(want):
            i = int(rng.integers(0, deg))
            j = int(rng.integers(0, deg))
            if nb[i] != nb[j]:
                extra.append((nb[i], nb[j]))
    if not extra:
        return n, np.asarray(e, dtype=np.int64)
    return n, np.concatenate([np.asarray(e, dtype=np.int64),
                              np.array(extra, dtype=np.int64)])


def _component_labels(n, u, v):
    parent = np.arange(n, dtype=np.int64)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(u, v):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return np.array([find(x) for x in range(n)], dtype=np.int64)


def _build_chimera(target, rng, depth=0):
    if target <= 2:
        return _edges_path(2)
    if target <= 24 or depth >= 10:
        return _base_at(int(rng.integers(0, 7)), target, rng)
    op = rng.random()
    if op < 0.30:  # base class at full size
        return _base_at(int(rng.integers(0, 7)), target, rng)
    if op < 0.48:  # random edges between two halves
        na, ea = _build_chimera(target // 2, rng, depth + 1)
        nb, eb = _build_chimera(target - target // 2, rng, depth + 1)
        k = 1 + int(rng.integers(0, 4))
        cross = np.stack([rng.integers(0, na, k),
                          na + rng.integers(0, nb, k)], axis=1)
        return na + nb, np.concatenate([ea, eb + na, cross])
    if op < 0.63:  # Cartesian product of two roughly-sqrt factors
        side = max(2, int(np.sqrt(target)))
        na, ea = _build_chimera(side, rng, depth + 1)
        nb, eb = _build_chimera(max(2, target // max(na, 2)), rng, depth + 1)
        return cartesian_product(na, ea, nb, eb)
    if op < 0.78:  # generalized necklace
        na, ea = _build_chimera(max(2, target // 8 + 1), rng, depth + 1)
        nb, eb = _build_chimera(max(2, target // max(na, 2)), rng, depth + 1)
        return generalized_necklace(na, ea, nb, eb,
                                    1 + int(rng.integers(0, 3)), rng)
    if op < 0.90:  # pseudo-random two-lift
        n0, e0 = _build_chimera(max(2, target // 2), rng, depth + 1)
        return two_lift(n0, e0, rng)
    n0, e0 = _build_chimera(target, rng, depth + 1)  # thickening
    return thicken(n0, e0, rng, rate=0.1)


def _base_at(kind, m, rng):
    if kind == 0:
        return _edges_path(m)
    if kind == 1:
        return _edges_tree(m, rng)
    if kind == 2:
        return _edges_grid2d(m, rng)
    if kind == 3:
        return _edges_ring(m, rng, generalized=bool(rng.integers(0, 2)))
    if kind == 4:
        return _edges_er_lcc(m, rng)
    if kind == 5:
        return _edges_regularish(m, rng)
    return _edges_pref_attach(m, rng)


def chimera(spec: ChimeraSpec) -> SparseSym:
    """Seeded pseudo-random combination of standard base graphs.

    Connected, with vertex count within a factor 2 of the target (clamped by
    construction), deterministic per (n, seed).  These follow the published
    recipe in spirit; the sampled distribution over combiners is our own.
    """
    rng = np.random.default_rng(np.random.SeedSequence([spec.n, spec.seed]))
    n, e = _build_chimera(spec.n, rng, 0)
    attempt = 0
    while not (spec.n / 2 <= n <= 2 * spec.n) and attempt < 16:
        # deterministic size clamp: rebuild from a derived stream
        attempt += 1
        rng = np.random.default_rng(
            np.random.SeedSequence([spec.n, spec.seed, attempt]))
        n, e = _build_chimera(spec.n, rng, 0)
    e = np.asarray(e, dtype=np.int64)
    # canonicalize: drop self-loops and duplicates
    u = np.minimum(e[:, 0], e[:, 1])
    v = np.maximum(e[:, 0], e[:, 1])
    keep = u != v
    pairs = np.unique(np.stack([u[keep], v[keep]], axis=1), axis=0)
    u, v = pairs[:, 0], pairs[:, 1]
    # stitch any leftover components together deterministically
    labels = _component_labels(n, u, v)
    reps = np.unique(labels)
    if reps.size > 1:
        firsts = np.sort(np.array(
            [np.nonzero(labels == r)[0][0] for r in reps], dtype=np.int64))
        u = np.concatenate([u, firsts[:-1]])
        v = np.concatenate([v, firsts[1:]])

    if spec.weighted:
        w = _chimera_weights(n, u, v, rng)
    else:
        w = np.ones(u.size)
    m = laplacian_from_edges(n, u, v, w)
    if spec.sddm_boundary:
        s = int(np.ceil(n ** (1.0 / 3.0)))
        diag = m.diag.copy()
        diag[::s] += 1.0
        m = SparseSym(n, m.rows, m.cols, m.vals, diag)
    return m


def _chimera_weights(n, u, v, rng):
    if rng.random() < 0.5:
        w = rng.random(u.size)
    else:
        pot = rng.random(n)
        smooth = int(rng.integers(0, 4))  # 0 = raw potentials
        for _ in range(smooth):
            pot = _lazy_walk(n, u, v, pot)
        w = np.abs(pot[u] - pot[v])
    w = np.maximum(w, 1e-12)
    if rng.random() < 0.5:
        w = 1.0 / w
    return w


def _lazy_walk(n, u, v, x):
    deg = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
    acc = np.zeros(n)
    np.add.at(acc, u, x[v])
    np.add.at(acc, v, x[u])
    return 0.5 * x + 0.5 * acc / np.maximum(deg, 1)


# ---------------------------------------------------------------------------
# right-hand sides


def gaussian_rhs(m: SparseSym, seed: int) -> np.ndarray:
    """b = M g / ||M g||: unit norm and automatically in the image of M."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x52485331]))
    g = rng.standard_normal(m.n)
    b = m.matvec(g)
    nrm = np.linalg.norm(b)
    if nrm == 0.0:
        raise ValueError("matrix maps the sampled Gaussian to zero")
    return b / nrm
