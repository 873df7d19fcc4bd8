"""Builder for the standard pluriclosed parallel-torsion structures.

A standard structure is assembled from three kinds of blocks on an
orthonormal frame:

* ``euclidean_rank`` flat central directions ``W_1, ..., W_l``;
* Sasaki blocks ``(H_i, E_i, F_i)`` with ``[E_i, F_i] = 2 c_i H_i`` and a
  model-dependent transverse action of ``H_i``:

  - ``heisenberg``: ``[H, E] = [H, F] = 0``
  - ``su2-berger``: ``[H, E] = lam F``, ``[H, F] = -lam E``
  - ``sl2r``: ``[H, E] = -lam F``, ``[H, F] = lam E``

  (``lam > 0``, default 2.0; the su2-berger block with ``lam = 2 c`` is the
  round sphere);
* compact group factors from the catalog, re-expressed in a root frame
  (torus columns, then oriented root planes in lexicographic root order).

The complex structure pairs ``E_i`` with ``F_i`` (``J E = -F``), pairs each
root plane (``J X = Y``), and acts on the remaining ``2m`` torus directions
``(W_*, H_*, K-torus)`` by a chosen orthogonal complex structure ``A`` that
commutes with the canonical consecutive pairing.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _linalg, hermitian, liealg, roots
from .errors import (
    NonPositiveC,
    NonUnitaryA,
    SpecInvariantViolated,
    UnsupportedModel,
)

SASAKI_MODELS = ("heisenberg", "su2-berger", "sl2r")
DEFAULT_LAMBDA = 2.0


@dataclass
class SasakiBlockSpec:
    model: str
    c: float
    lam: float = None

    def __post_init__(self):
        if self.model not in SASAKI_MODELS:
            raise UnsupportedModel(
                f"unknown Sasaki model {self.model!r}; choose from "
                f"{SASAKI_MODELS}"
            )
        if not self.c > 0:
            raise NonPositiveC(f"Sasaki c must be > 0, got {self.c}")
        if self.model == "heisenberg":
            if self.lam not in (None, 0.0):
                raise SpecInvariantViolated(
                    "heisenberg blocks have no transverse rotation; "
                    "lam must be omitted"
                )
            self.lam = 0.0
        else:
            if self.lam is None:
                self.lam = DEFAULT_LAMBDA
            if not self.lam > 0:
                raise SpecInvariantViolated(
                    f"lam must be > 0 for model {self.model}, got {self.lam}"
                )


@dataclass
class GroupFactorSpec:
    family: str
    param: int
    scale: float = 1.0


@dataclass
class StandardSpec:
    """Specification of a standard structure.

    ``torus_complex`` is either the string "canonical" or a ``(2m, 2m)``
    matrix acting on the torus directions in frame order (euclidean, Sasaki
    ``H``'s, group torus columns).
    """

    euclidean_rank: int = 0
    sasaki: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    torus_complex: object = "canonical"


def canonical_torus_complex(m):
    """Consecutive pairing: A e_{2k} = e_{2k+1}, A e_{2k+1} = -e_{2k}."""
    a = np.zeros((2 * m, 2 * m))
    for k in range(m):
        a[2 * k + 1, 2 * k] = 1.0
        a[2 * k, 2 * k + 1] = -1.0
    return a


def embed_complex_matrix(m_complex):
    """Real (2m, 2m) matrix of a complex (m, m) matrix, coordinates
    interleaved as (Re z_0, Im z_0, Re z_1, ...)."""
    m = m_complex.shape[0]
    out = np.zeros((2 * m, 2 * m))
    x, y = np.real(m_complex), np.imag(m_complex)
    for k in range(m):
        for j in range(m):
            out[2 * k, 2 * j] = x[k, j]
            out[2 * k + 1, 2 * j] = y[k, j]
            out[2 * k, 2 * j + 1] = -y[k, j]
            out[2 * k + 1, 2 * j + 1] = x[k, j]
    return out


def random_torus_complex(m, seed):
    """A random orthogonal complex structure commuting with the canonical
    pairing: W diag(+-i) W* for Haar-ish unitary W."""
    gen = _linalg.rng(seed)
    z = gen.normal(size=(m, m)) + 1j * gen.normal(size=(m, m))
    w, _ = np.linalg.qr(z)
    signs = np.where(gen.random(m) < 0.5, 1.0j, -1.0j)
    u = w @ np.diag(signs) @ w.conj().T
    return embed_complex_matrix(u)


def _validate_torus_complex(a, m, tol=1e-9):
    a = np.asarray(a, dtype=float)
    if a.shape != (2 * m, 2 * m):
        raise NonUnitaryA(
            f"torus complex structure must be {2 * m}x{2 * m}, got {a.shape}"
        )
    eye = np.eye(2 * m)
    if _linalg.max_abs(a.T @ a - eye) > tol:
        raise NonUnitaryA("torus complex structure is not orthogonal")
    if _linalg.max_abs(a @ a + eye) > tol:
        raise NonUnitaryA("torus complex structure does not square to -1")
    j0 = canonical_torus_complex(m)
    if _linalg.max_abs(a @ j0 - j0 @ a) > tol:
        raise NonUnitaryA(
            "torus complex structure does not commute with the canonical "
            "pairing"
        )
    return a


@dataclass
class StandardStructure:
    """A built standard structure with its frame bookkeeping.

    Index lists refer to columns of the global frame: ``euclidean`` the flat
    directions, ``sasaki_triples`` the (H, E, F) triples, ``group_torus``
    and ``group_planes`` per group factor (planes as (X, Y) pairs), and
    ``torus_indices`` the ``2m`` directions the matrix ``a`` acts on.
    """

    data: hermitian.HermitianData
    spec: StandardSpec
    euclidean: list
    sasaki_triples: list
    group_torus: list
    group_planes: list
    torus_indices: list
    a: np.ndarray


def _sasaki_constants(block):
    c = np.zeros((3, 3, 3))
    # frame (H, E, F) = (0, 1, 2)
    c[1, 2, 0] = 2.0 * block.c
    c[2, 1, 0] = -2.0 * block.c
    if block.model != "heisenberg":
        sign = 1.0 if block.model == "su2-berger" else -1.0
        c[0, 1, 2] = sign * block.lam
        c[1, 0, 2] = -sign * block.lam
        c[0, 2, 1] = -sign * block.lam
        c[2, 0, 1] = sign * block.lam
    return c


def build_standard(spec, seed=liealg.DEFAULT_SEED):
    """Assemble the frame, brackets and complex structure of a standard
    structure.  The metric is the identity on the assembled frame."""
    ell = int(spec.euclidean_rank)
    if ell < 0:
        raise SpecInvariantViolated("euclidean_rank must be >= 0")
    blocks = [
        b if isinstance(b, SasakiBlockSpec) else SasakiBlockSpec(**b)
        for b in spec.sasaki
    ]
    groups = [
        g if isinstance(g, GroupFactorSpec) else GroupFactorSpec(**g)
        for g in spec.groups
    ]
    s = len(blocks)

    factors = []
    for g in groups:
        alg = liealg.build_catalog(g.family, g.param, g.scale)
        datum = roots.root_decompose(alg, seed=seed)
        factors.append((alg, datum))
    group_ranks = [datum.torus.shape[1] for _, datum in factors]
    torus_total = ell + s + sum(group_ranks)
    if torus_total % 2 != 0:
        raise SpecInvariantViolated(
            f"torus directions (euclidean {ell} + blocks {s} + group ranks "
            f"{sum(group_ranks)}) must be even to carry a complex structure"
        )
    m = torus_total // 2
    tc = spec.torus_complex
    if tc is None or (isinstance(tc, str) and tc == "canonical"):
        a = canonical_torus_complex(m)
    elif isinstance(tc, str):
        raise SpecInvariantViolated(
            f"torus_complex must be 'canonical' or a matrix, got {tc!r}"
        )
    else:
        a = _validate_torus_complex(tc, m)

    dim = ell + 3 * s + sum(alg.dim for alg, _ in factors)
    c_global = np.zeros((dim, dim, dim))

    euclidean = list(range(ell))
    sasaki_triples = []
    pos = ell
    for block in blocks:
        tri = (pos, pos + 1, pos + 2)
        sasaki_triples.append(tri)
        cb = _sasaki_constants(block)
        idx = np.array(tri)
        c_global[np.ix_(idx, idx, idx)] = cb
        pos += 3

    ktorus_start = pos
    group_torus = []
    for r in group_ranks:
        group_torus.append(list(range(pos, pos + r)))
        pos += r
    group_planes = []
    for alg, datum in factors:
        p = datum.n_positive
        pairs = [(pos + 2 * a_, pos + 2 * a_ + 1) for a_ in range(p)]
        group_planes.append(pairs)
        pos += 2 * p
    assert pos == dim

    for (alg, datum), tor_idx, pairs in zip(factors, group_torus, group_planes):
        cols = [datum.torus[:, i] for i in range(datum.torus.shape[1])]
        for a_ in range(datum.n_positive):
            cols.append(datum.planes_x[:, a_])
            cols.append(datum.planes_y[:, a_])
        basis = np.array(cols).T
        local = np.einsum("ijm,ip,jq,mr->pqr", alg.c, basis, basis, basis)
        glb = np.array(tor_idx + [i for pair in pairs for i in pair])
        c_global[np.ix_(glb, glb, glb)] = local

    alg_global = liealg.from_dense(c_global, np.eye(dim), jacobi_tol=1e-9)

    torus_indices = (
        euclidean
        + [tri[0] for tri in sasaki_triples]
        + list(range(ktorus_start, ktorus_start + sum(group_ranks)))
    )
    j = np.zeros((dim, dim))
    tau = np.array(torus_indices)
    j[np.ix_(tau, tau)] = a
    for _, e, f in sasaki_triples:
        j[f, e] = -1.0
        j[e, f] = 1.0
    for pairs in group_planes:
        for x, y in pairs:
            j[y, x] = 1.0
            j[x, y] = -1.0

    data = hermitian.HermitianData(alg_global, j)
    return StandardStructure(
        data=data,
        spec=spec,
        euclidean=euclidean,
        sasaki_triples=sasaki_triples,
        group_torus=group_torus,
        group_planes=group_planes,
        torus_indices=torus_indices,
        a=a,
    )


def expected_torsion(structure):
    """Predicted torsion three-form of a standard structure.

    One ``eta ^ d eta`` term per Sasaki block (``eta`` the metric dual of
    ``H_i``) plus ``-g([.,.],.)`` on each group factor.  Independent of the
    connection computation, so it serves as a cross-check against the
    measured Bismut torsion.
    """
    data = structure.data
    alg = data.alg
    n = alg.dim
    t3 = np.zeros((n, n, n))
    for h, _, _ in structure.sasaki_triples:
        eta = alg.gram[:, h].copy()
        d_eta = hermitian.cartan_eilenberg_d(alg, eta)
        term = np.einsum("i,jk->ijk", eta, d_eta)
        t3 += (
            term
            - np.einsum("jik->ijk", term)
            + np.einsum("kij->ijk", term)
        )
    for tor_idx, pairs in zip(structure.group_torus, structure.group_planes):
        glb = np.array(tor_idx + [i for pair in pairs for i in pair])
        lowered = np.einsum("ijm,mk->ijk", alg.c, alg.gram)
        t3[np.ix_(glb, glb, glb)] -= lowered[np.ix_(glb, glb, glb)]
    return t3
