"""Metric Lie algebras: structure constants, catalog of compact families,
Killing form, center, minimal ideals, rank.

Conventions
-----------
A Lie algebra of dimension ``n`` is described by a dense tensor ``c`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k``.  Sparse input uses triples
``(i, j, k) -> c^k_{ij}`` with ``i < j``; the ``i > j`` half is implied by
antisymmetry.  The metric is a symmetric positive definite ``gram`` matrix in
the same frame.  Nothing here assumes the metric is ad-invariant; operations
that need invariance check it numerically.

The catalog realizes the compact classical families su(k), so(k), sp(k) as
real spans of explicit anti-Hermitian matrices, with the metric equal to
``scale * (-Killing)``.  The returned frame is orthonormalized with respect
to that metric by Gram-Schmidt over a fixed, documented generator order, so
catalog output is reproducible bit for bit and its gram matrix is the
identity.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .errors import (
    EmptyList,
    InvalidStructure,
    NonPositiveScale,
    NotCompact,
    UnrecognizedIdeal,
    UnsupportedFamily,
)

JACOBI_TOL = 1e-12
#: default seed for the deterministic pseudo-random choices in ideal/rank code
DEFAULT_SEED = 1729


# ---------------------------------------------------------------------------
# structure constants


class StructureConstants:
    """Antisymmetric structure constants with Jacobi validation.

    Parameters
    ----------
    dim : int
        Dimension of the algebra.
    entries : iterable of (i, j, k, value)
        Sparse triples with ``0 <= i < j < dim``; the transposed half is
        implied.  Alternatively pass ``dense=`` directly.
    dense : ndarray, optional
        Full ``(dim, dim, dim)`` tensor ``c[i, j, k]``.  Must be
        antisymmetric in the first two slots.
    jacobi_tol : float
        Relative Jacobi tolerance checked on construction.
    """

    def __init__(self, dim, entries=None, dense=None, jacobi_tol=JACOBI_TOL):
        self.dim = int(dim)
        if dense is not None:
            dense = np.asarray(dense, dtype=float)
            if dense.shape != (self.dim,) * 3:
                raise InvalidStructure("dense tensor has wrong shape")
        else:
            dense = np.zeros((self.dim,) * 3)
            for i, j, k, val in entries or []:
                if not (0 <= i < j < self.dim) or not (0 <= k < self.dim):
                    raise InvalidStructure(
                        f"bracket entry ({i},{j},{k}) out of range or i >= j"
                    )
                dense[i, j, k] += val
                dense[j, i, k] -= val
        asym = _linalg.max_abs(dense + np.swapaxes(dense, 0, 1))
        scale = max(_linalg.max_abs(dense), 1.0)
        if asym > 1e-14 * scale:
            raise InvalidStructure("structure constants not antisymmetric")
        self.dense = dense
        defect = self.jacobi_defect()
        if defect > jacobi_tol * max(scale * scale, 1.0):
            raise InvalidStructure(f"Jacobi identity fails (defect {defect:.3e})")

    def jacobi_defect(self):
        c = self.dense
        cyc = np.einsum("ijk,klm->ijlm", c, c)
        total = cyc + np.einsum("jlim->ijlm", cyc) + np.einsum("lijm->ijlm", cyc)
        return _linalg.max_abs(total)

    def sparse(self):
        """Sorted list of (i, j, k, value) with i < j and value != 0."""
        out = []
        c = self.dense
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(self.dim):
                    if c[i, j, k] != 0.0:
                        out.append((i, j, k, float(c[i, j, k])))
        return out


@dataclass
class MetricLieAlgebra:
    """A Lie algebra frame together with a positive definite metric."""

    structure: StructureConstants
    gram: np.ndarray
    labels: list | None = None
    _gram_inv: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.gram = np.asarray(self.gram, dtype=float)
        n = self.structure.dim
        if self.gram.shape != (n, n):
            raise InvalidStructure("gram matrix has wrong shape")
        if _linalg.max_abs(self.gram - self.gram.T) > 1e-12 * max(
            _linalg.max_abs(self.gram), 1.0
        ):
            raise InvalidStructure("gram matrix not symmetric")
        eigvals = np.linalg.eigvalsh(self.gram)
        if eigvals[0] <= 0:
            raise InvalidStructure("gram matrix not positive definite")
        self._gram_inv = np.linalg.inv(self.gram)

    @property
    def dim(self):
        return self.structure.dim

    @property
    def c(self):
        return self.structure.dense

    @property
    def gram_inv(self):
        return self._gram_inv

    def bracket(self, x, y):
        return np.einsum("ijk,i,j->k", self.c, x, y)

    def ad_stack(self):
        """Array ``A`` with ``A[i]`` the matrix of ad(e_i), ``A[i] @ x = [e_i, x]``."""
        return np.einsum("ijk->ikj", self.c)

    def ad_of(self, x):
        """Matrix of ad(x) acting on coordinate vectors."""
        return np.einsum("ijk,i->kj", self.c, x)

    def inner(self, x, y):
        return float(x @ self.gram @ y)

    def norm(self, x):
        return float(np.sqrt(max(self.inner(x, x), 0.0)))


def from_dense(c, gram, labels=None, jacobi_tol=JACOBI_TOL):
    return MetricLieAlgebra(
        StructureConstants(c.shape[0], dense=c, jacobi_tol=jacobi_tol),
        gram,
        labels,
    )


# ---------------------------------------------------------------------------
# the simple type table


_EXCEPTIONAL = {"g2": (14, 2), "f4": (52, 4), "e6": (78, 6), "e7": (133, 7), "e8": (248, 8)}


def simple_dim_rank(family, param=None):
    """(dimension, rank) of a compact simple type from the closed formulas."""
    if family == "su":
        if param < 2:
            raise UnsupportedFamily(f"su({param}) is not simple")
        return param * param - 1, param - 1
    if family == "so":
        if param < 5:
            raise UnsupportedFamily(f"so({param}) not in table (need k >= 5)")
        return param * (param - 1) // 2, param // 2
    if family == "sp":
        if param < 2:
            raise UnsupportedFamily(f"sp({param}) not in table (need k >= 2)")
        return param * (2 * param + 1), param
    if family in _EXCEPTIONAL:
        return _EXCEPTIONAL[family]
    raise UnsupportedFamily(f"unknown family {family!r}")


def canonical_type(family, param=None):
    """Collapse the classical low-rank coincidences to a canonical name.

    sp(2) and so(5) are the same algebra, as are so(6) and su(4); the
    canonical spellings here are ("so", 5) and ("su", 4).
    """
    if family == "sp" and param == 2:
        return ("so", 5)
    if family == "so" and param == 6:
        return ("su", 4)
    if family in _EXCEPTIONAL:
        return (family, None)
    return (family, param)


def simple_type_rows(max_dim):
    """All table rows (family, param, dim, rank) with dim <= max_dim.

    Duplicates arising from the classical coincidences are collapsed to
    their canonical spelling, so each abstract algebra appears once.
    """
    rows = []
    seen = set()

    def push(family, param):
        d, r = simple_dim_rank(family, param)
        if d > max_dim:
            return
        key = canonical_type(family, param)
        if key in seen:
            return
        seen.add(key)
        rows.append((key[0], key[1], d, r))

    k = 2
    while k * k - 1 <= max_dim:
        push("su", k)
        k += 1
    k = 5
    while k * (k - 1) // 2 <= max_dim:
        push("so", k)
        k += 1
    k = 2
    while k * (2 * k + 1) <= max_dim:
        push("sp", k)
        k += 1
    for name in _EXCEPTIONAL:
        push(name, None)
    rows.sort(key=lambda row: (row[2], row[3], row[0], row[1] or 0))
    return rows


def display_name(family, param=None):
    """Group-style display name: so(5) -> Spin(5), su(3) -> SU(3), ..."""
    if family == "su":
        return f"SU({param})"
    if family == "so":
        return f"Spin({param})"
    if family == "sp":
        return f"Sp({param})"
    if family in _EXCEPTIONAL:
        return family.upper()
    if family == "abelian":
        return f"R^{param}"
    raise UnsupportedFamily(f"unknown family {family!r}")


def identify_simple(dim, rank, long_root_count=None):
    """Canonical (family, param) of a compact simple algebra from invariants.

    (dim, rank) pins the type except for the so(2r+1) / sp(r) pair with
    r >= 3, which share both numbers; there the count of longest roots
    decides (so(2r+1) has r(r-1) long positive roots, sp(r) has r).
    """
    matches = [
        (fam, par)
        for fam, par, d, r in simple_type_rows(max(dim, 14))
        if d == dim and r == rank
    ]
    # the B/C coincidence is not collapsed by canonical_type for r >= 3
    if len(matches) > 1:
        if long_root_count is None:
            raise UnrecognizedIdeal(
                f"(dim={dim}, rank={rank}) is ambiguous; root length data needed"
            )
        if long_root_count == rank:
            matches = [m for m in matches if m[0] == "sp"]
        elif long_root_count == rank * (rank - 1):
            matches = [m for m in matches if m[0] == "so"]
        else:
            raise UnrecognizedIdeal(
                f"long root count {long_root_count} matches neither so nor sp"
            )
    if not matches:
        raise UnrecognizedIdeal(f"no simple type with (dim={dim}, rank={rank})")
    return canonical_type(*matches[0])


# ---------------------------------------------------------------------------
# catalog of compact algebras


def _su_generators(k):
    gens = []
    for j in range(k):
        for l in range(j + 1, k):
            m = np.zeros((k, k), dtype=complex)
            m[j, l], m[l, j] = 1.0, -1.0
            gens.append(m)
            m = np.zeros((k, k), dtype=complex)
            m[j, l] = m[l, j] = 1.0j
            gens.append(m)
    for j in range(k - 1):
        m = np.zeros((k, k), dtype=complex)
        m[j, j], m[j + 1, j + 1] = 1.0j, -1.0j
        gens.append(m)
    return gens


def _so_generators(k):
    gens = []
    for j in range(k):
        for l in range(j + 1, k):
            m = np.zeros((k, k), dtype=complex)
            m[j, l], m[l, j] = 1.0, -1.0
            gens.append(m)
    return gens


def _sp_generators(k):
    def embed(a, b):
        m = np.zeros((2 * k, 2 * k), dtype=complex)
        m[:k, :k] = a
        m[k:, k:] = a.conj()
        m[:k, k:] = b
        m[k:, :k] = -b.conj()
        return m

    gens = []
    zero = np.zeros((k, k), dtype=complex)
    for j in range(k):
        a = zero.copy()
        a[j, j] = 1.0j
        gens.append(embed(a, zero))
    for j in range(k):
        for l in range(j + 1, k):
            a = zero.copy()
            a[j, l], a[l, j] = 1.0, -1.0
            gens.append(embed(a, zero))
            a = zero.copy()
            a[j, l] = a[l, j] = 1.0j
            gens.append(embed(a, zero))
    for j in range(k):
        b = zero.copy()
        b[j, j] = 1.0
        gens.append(embed(zero, b))
        b = zero.copy()
        b[j, j] = 1.0j
        gens.append(embed(zero, b))
    for j in range(k):
        for l in range(j + 1, k):
            b = zero.copy()
            b[j, l] = b[l, j] = 1.0
            gens.append(embed(zero, b))
            b = zero.copy()
            b[j, l] = b[l, j] = 1.0j
            gens.append(embed(zero, b))
    return gens


_CATALOG_RANGES = {"su": range(2, 7), "so": range(5, 9), "sp": range(2, 4)}
_KILLING_COEF = {"su": lambda k: 2 * k, "so": lambda k: k - 2, "sp": lambda k: 2 * k + 2}


def build_catalog(family, param, scale=1.0):
    """Construct a catalog algebra with metric ``scale * (-Killing)``.

    Supported: su(2..6), so(5..8), sp(2..3) and "abelian" of any
    dimension >= 0 (identity gram).  Exceptional families are recognized but
    not constructed.
    """
    if family == "abelian":
        if param < 0:
            raise UnsupportedFamily("abelian dimension must be >= 0")
        n = int(param)
        return from_dense(np.zeros((n, n, n)), np.eye(n))
    if family in _EXCEPTIONAL:
        raise UnsupportedFamily(f"{family} has no matrix constructor here")
    if family not in _CATALOG_RANGES:
        raise UnsupportedFamily(f"unknown family {family!r}")
    if param not in _CATALOG_RANGES[family]:
        raise UnsupportedFamily(
            f"{family}({param}) outside the constructible range "
            f"{list(_CATALOG_RANGES[family])}"
        )
    if not scale > 0:
        raise NonPositiveScale(f"scale must be > 0, got {scale}")

    gens = {"su": _su_generators, "so": _so_generators, "sp": _sp_generators}[family](param)
    coef = scale * _KILLING_COEF[family](param)

    def ip(x, y):
        # scale * (-Killing) on anti-Hermitian matrices
        return -coef * float(np.real(np.trace(x @ y)))

    basis = []
    for g in gens:
        v = g.copy()
        for u in basis:
            v = v - ip(u, v) * u
        for u in basis:
            v = v - ip(u, v) * u
        nv = np.sqrt(ip(v, v))
        if nv < 1e-10:
            raise InvalidStructure("generator list is degenerate")
        basis.append(v / nv)

    n = len(basis)
    c = np.zeros((n, n, n))
    for a in range(n):
        for b in range(a + 1, n):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            for d in range(n):
                val = ip(comm, basis[d])
                c[a, b, d] = val
                c[b, a, d] = -val
    c[np.abs(c) < 1e-14] = 0.0
    return from_dense(c, np.eye(n))


# ---------------------------------------------------------------------------
# invariants and decompositions


def killing_form(alg):
    """Killing form matrix B[i, j] = tr(ad e_i ad e_j)."""
    ads = alg.ad_stack()
    return np.einsum("ikl,jlk->ij", ads, ads)


def ad_invariance_defect(alg):
    """Max violation of <[x,y],z> + <y,[x,z]> = 0 over frame triples."""
    lowered = np.einsum("ijm,mk->ijk", alg.c, alg.gram)
    return _linalg.max_abs(lowered + np.swapaxes(lowered, 1, 2))


def check_compact(alg, tol=1e-8):
    """Raise :class:`NotCompact` unless the Killing form is <= 0."""
    b = killing_form(alg)
    eigvals = np.linalg.eigvalsh(0.5 * (b + b.T))
    scale = max(_linalg.max_abs(eigvals), 1.0)
    if eigvals[-1] > tol * scale:
        raise NotCompact(
            f"Killing form has positive eigenvalue {eigvals[-1]:.3e}"
        )
    return b


def center(alg, tol=1e-10):
    """Gram-orthonormal basis of the center."""
    n = alg.dim
    mat = alg.c.reshape(n, n * n).T  # rows (j,k), cols i
    ker = _linalg.nullspace(mat, tol)
    return _linalg.gram_orthonormalize(ker, alg.gram, tol)


def derived_subalgebra(alg, tol=1e-10):
    """Gram-orthonormal basis of [g, g], bracket images in lex order."""
    n = alg.dim
    cols = [alg.c[i, j] for i in range(n) for j in range(i + 1, n)]
    if not cols:
        return np.zeros((n, 0))
    return _linalg.gram_orthonormalize(np.array(cols).T, alg.gram, tol)


def _commutant_basis(reps, seed, tol=1e-8):
    """Basis of matrices commuting with every matrix in ``reps``.

    Solving the full stacked Sylvester system is O(len(reps) * k^6); instead
    we intersect kernels for a few generic combinations of the reps and then
    verify the result against every rep, enlarging the combination set if the
    draw was degenerate.
    """
    k = reps[0].shape[0]
    gen = _linalg.rng(seed)
    count = min(3, len(reps))
    scale = max(1.0, max(_linalg.max_abs(r) for r in reps))
    while True:
        combos = [
            sum(w * r for w, r in zip(gen.normal(size=len(reps)), reps))
            for _ in range(count)
        ]
        blocks = [np.kron(np.eye(k), m) - np.kron(m.T, np.eye(k)) for m in combos]
        ker = _linalg.nullspace(np.vstack(blocks), tol)
        basis = [ker[:, a].reshape(k, k) for a in range(ker.shape[1])]
        worst = max(
            (_linalg.max_abs(r @ x - x @ r) for r in reps for x in basis),
            default=0.0,
        )
        if worst <= 1e-7 * scale:
            return basis
        if count >= len(reps):
            raise InvalidStructure("commutant computation did not stabilize")
        count = min(2 * count, len(reps))


def derived_and_ideals(alg, seed=DEFAULT_SEED, tol=1e-8):
    """Derived subalgebra and its minimal ideals.

    Returns ``(derived, ideals)`` where ``derived`` is a gram-orthonormal
    basis of [g, g] and ``ideals`` is a list of gram-orthonormal bases of the
    minimal ideals of the derived part, ordered by their smallest supporting
    frame index.

    The splitting computes the commutant of the adjoint representation on
    [g, g]; for a compact semisimple action the commutant is spanned by the
    projections onto the minimal ideals, so the eigenspaces of a generic
    commutant element are exactly those ideals.  This works for any positive
    metric, ad-invariant or not, because it never uses the metric to split.
    """
    check_compact(alg, tol)
    der = derived_subalgebra(alg)
    k = der.shape[1]
    if k == 0:
        return der, []
    ads = alg.ad_stack()
    reps = [_linalg.restrict_operator(ads[i], der, alg.gram) for i in range(alg.dim)]
    comm = _commutant_basis(reps, seed)
    gen = _linalg.rng(seed)
    weights = gen.normal(size=len(comm))
    m = sum(w * x for w, x in zip(weights, comm))
    eigvals, _ = np.linalg.eig(m)
    eigvals = np.real(eigvals)
    groups = _linalg.cluster_values(eigvals, 1e-6 * max(_linalg.max_abs(eigvals), 1.0))
    if len(groups) != len(comm):
        # retry once with a fresh generic element before giving up
        weights = gen.normal(size=len(comm))
        m = sum(w * x for w, x in zip(weights, comm))
        eigvals = np.real(np.linalg.eig(m)[0])
        groups = _linalg.cluster_values(
            eigvals, 1e-6 * max(_linalg.max_abs(eigvals), 1.0)
        )
        if len(groups) != len(comm):
            raise InvalidStructure("could not separate minimal ideals")
    ideals = []
    for grp in groups:
        lam = float(np.mean(eigvals[grp]))
        ker = _linalg.nullspace(m - lam * np.eye(k), 1e-6)
        vecs = der @ ker
        basis = _linalg.gram_orthonormalize(vecs, alg.gram)
        if basis.shape[1] != len(grp):
            raise InvalidStructure("ideal eigenspace has unexpected dimension")
        ideals.append(basis)
    # every ideal must be ad-invariant; check and order deterministically
    for basis in ideals:
        img = np.concatenate([ads[i] @ basis for i in range(alg.dim)], axis=1)
        if _linalg.contains(basis, img, alg.gram) > tol * max(
            1.0, _linalg.max_abs(img)
        ):
            raise InvalidStructure("candidate ideal is not ad-invariant")

    def first_support(basis):
        weights = np.max(np.abs(basis), axis=1)
        for idx, w in enumerate(weights):
            if w > 1e-8:
                return idx
        return alg.dim

    ideals.sort(key=first_support)
    return der, ideals


def ideal_rank(alg, ideal_basis, seed=DEFAULT_SEED, tol=1e-8):
    """Rank of a (compact) ideal via the centralizer of a generic element."""
    gen = _linalg.rng(seed)
    for _ in range(8):
        z = ideal_basis @ gen.normal(size=ideal_basis.shape[1])
        op = alg.ad_of(z)
        rep = _linalg.restrict_operator(op, ideal_basis, alg.gram)
        ker = _linalg.nullspace(rep, 1e-8)
        cart = ideal_basis @ ker
        dim = cart.shape[1]
        defect = max(
            _linalg.max_abs(alg.bracket(cart[:, a], cart[:, b]))
            for a in range(dim)
            for b in range(dim)
        ) if dim > 1 else 0.0
        if defect <= tol * max(1.0, _linalg.max_abs(alg.c)):
            return dim
    raise UnrecognizedIdeal("generic centralizer failed to be abelian")


def rank(alg, seed=DEFAULT_SEED):
    """Rank = dim of a maximal abelian subalgebra, center included.

    Each minimal ideal of the derived part must match a (dim, rank) row of
    the simple type table, else :class:`UnrecognizedIdeal` is raised.
    """
    z = center(alg)
    _, ideals = derived_and_ideals(alg, seed=seed)
    total = z.shape[1]
    for basis in ideals:
        r = ideal_rank(alg, basis, seed=seed)
        rows = [
            row
            for row in simple_type_rows(max(basis.shape[1], 14))
            if row[2] == basis.shape[1] and row[3] == r
        ]
        if not rows:
            raise UnrecognizedIdeal(
                f"ideal with (dim={basis.shape[1]}, rank={r}) not in the table"
            )
        total += r
    return total


def direct_sum(algs):
    """Direct sum of metric Lie algebras, blocks in the order given."""
    algs = list(algs)
    if not algs:
        raise EmptyList("direct sum of an empty list")
    n = sum(a.dim for a in algs)
    c = np.zeros((n, n, n))
    gram = np.zeros((n, n))
    labels = []
    have_labels = all(a.labels is not None for a in algs)
    offset = 0
    for a in algs:
        d = a.dim
        c[offset : offset + d, offset : offset + d, offset : offset + d] = a.c
        gram[offset : offset + d, offset : offset + d] = a.gram
        if have_labels:
            labels.extend(a.labels)
        offset += d
    return from_dense(c, gram, labels if have_labels else None,
                      jacobi_tol=1e-9)
