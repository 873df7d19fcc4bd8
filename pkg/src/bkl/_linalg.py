"""Gram-aware dense linear algebra helpers.

Subspaces are represented throughout the package as ``(n, k)`` arrays whose
columns form a basis, orthonormal with respect to a symmetric positive
definite ``gram`` matrix.  All routines here are deterministic: any random
choices go through :func:`rng` with an explicit seed.
"""

import numpy as np
import scipy.linalg


def rng(seed):
    return np.random.default_rng(seed)


def max_abs(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def gram_orthonormalize(vectors, gram, tol=1e-12):
    """Modified Gram-Schmidt in the inner product given by ``gram``.

    ``vectors`` is ``(n, k)`` with candidate basis columns, processed left to
    right in the order given (the order is part of the contract: callers rely
    on it for reproducible bases).  Columns that are linearly dependent on
    earlier ones, relative to ``tol`` times the largest input norm, are
    dropped.  Returns ``(n, k')`` with gram-orthonormal columns.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2:
        raise ValueError("expected a 2-d array of column vectors")
    n = vectors.shape[0]
    out = []
    norms0 = [np.sqrt(max(v @ gram @ v, 0.0)) for v in vectors.T]
    scale = max(norms0, default=0.0)
    if scale == 0.0:
        return np.zeros((n, 0))
    for v in vectors.T.copy():
        for u in out:
            v = v - (u @ gram @ v) * u
        # second pass for numerical orthogonality
        for u in out:
            v = v - (u @ gram @ v) * u
        nv = np.sqrt(max(v @ gram @ v, 0.0))
        if nv > tol * scale:
            out.append(v / nv)
    if not out:
        return np.zeros((n, 0))
    return np.array(out).T


def nullspace(mat, tol=1e-10):
    """Euclidean-orthonormal basis of the right null space of ``mat``.

    The cutoff is ``tol * max(s_max, 1)``: relative for well-scaled data,
    absolute for near-zero matrices (whose null space is everything).
    """
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return np.eye(mat.shape[1])
    u, s, vh = np.linalg.svd(mat, full_matrices=True)
    cutoff = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].T


def orthonormal_complement(basis, gram, tol=1e-10):
    """Gram-orthonormal basis of the gram-orthogonal complement of a span."""
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    basis = np.asarray(basis, dtype=float).reshape(n, -1)
    if basis.shape[1] == 0:
        return gram_orthonormalize(np.eye(n), gram, tol)
    # x is in the complement iff basis^T G x = 0
    comp = nullspace(basis.T @ gram, tol)
    return gram_orthonormalize(comp, gram, tol)


def subspace_intersection(a, b, gram, tol=1e-10):
    """Gram-orthonormal basis of span(a) & span(b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    ker = nullspace(np.hstack([a, -b]), tol)
    if ker.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    vecs = a @ ker[: a.shape[1]]
    return gram_orthonormalize(vecs, gram, tol)


def projector(basis, gram):
    """Gram-orthogonal projector onto the span of gram-orthonormal columns."""
    basis = np.asarray(basis, dtype=float)
    return basis @ basis.T @ gram


def restrict_operator(op, basis, gram):
    """Matrix of a linear operator in a gram-orthonormal subspace basis.

    Meaningful when the subspace is (numerically) invariant under ``op``; the
    returned matrix is ``rep[i, j] = <op b_j, b_i>_gram``.
    """
    return basis.T @ gram @ op @ basis


def contains(basis, vectors, gram):
    """Max residual norm of ``vectors`` after projection onto span(basis)."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.size == 0:
        return 0.0
    res = vectors - projector(basis, gram) @ vectors
    norms = np.sqrt(np.maximum(np.einsum("ik,ij,jk->k", res, gram, res), 0.0))
    return float(np.max(norms)) if norms.size else 0.0


def cluster_values(values, tol):
    """Group a 1-d array of reals into clusters of width ``tol``.

    Returns a list of index arrays, one per cluster, ordered by value.
    """
    values = np.asarray(values, dtype=float)
    order = np.argsort(values)
    groups = []
    current = [order[0]] if order.size else []
    for idx in order[1:]:
        if values[idx] - values[current[-1]] <= tol:
            current.append(idx)
        else:
            groups.append(np.array(current))
            current = [idx]
    if current:
        groups.append(np.array(current))
    return groups


def pfaffian(a):
    """Pfaffian of a real antisymmetric matrix of even size.

    Uses an orthogonal reduction to skew tridiagonal form (Hessenberg form of
    a skew matrix is skew tridiagonal), for which the Pfaffian is the product
    of the odd superdiagonal entries, corrected by det of the transform.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if m == 0:
        return 1.0
    if m % 2 == 1:
        return 0.0
    a = 0.5 * (a - a.T)
    if m == 2:
        return float(a[0, 1])
    h, q = scipy.linalg.hessenberg(a, calc_q=True)
    val = float(np.linalg.det(q))
    for i in range(0, m - 1, 2):
        val *= h[i, i + 1]
    return val
