"""Root space decomposition of compact metric Lie algebras.

Pick a maximal torus ``t`` (here: any maximal abelian subalgebra).  Its
orthocomplement splits into 2-dimensional planes, one per pair of opposite
roots, carrying an oriented frame ``(X, Y)`` with

    [t, X] = alpha(t) Y,   [t, Y] = -alpha(t) X

for the positive root ``alpha`` of the plane.  With plane phases fixed as
below, every bracket between plane frames is governed by a single real
coefficient per signed root pair::

    [X_a, X_b] = eta(a,b) X_{a+b} - s * eta(a,-b) X_{|a-b|}
    [X_a, Y_b] = eta(a,b) Y_{a+b} +     eta(a,-b) Y_{|a-b|}
    [Y_a, Y_b] = -eta(a,b) X_{a+b} - s * eta(a,-b) X_{|a-b|}

where ``s = +1`` if ``a - b`` is a positive root and ``-1`` if ``b - a`` is
(terms with a non-root index are absent).  Generic plane phases make the
coefficients complex; a deterministic phase-fixing pass rotates each
non-simple plane so that the coefficient on its first defining pair is real
and positive, which forces all remaining coefficients real.

Everything assumes the metric is ad-invariant (checked numerically); the
catalog algebras and their positive rescalings qualify.
"""

from dataclasses import dataclass

import numpy as np

from . import _linalg, liealg
from .errors import (
    DegenerateRootSpace,
    InvalidStructure,
    IrregularPositivity,
    NotMaximalTorus,
)


@dataclass
class RootDatum:
    """Oriented root decomposition of a compact metric Lie algebra.

    torus : (n, l) gram-orthonormal basis of a maximal abelian subalgebra,
        center columns first.
    center : (n, z) basis of the center (a sub-block of ``torus``).
    alphas : (p, l) positive root values on the torus columns.
    planes_x, planes_y : (n, p) frames of the root planes; column ``a`` holds
        ``X_a`` resp. ``Y_a``.
    eta : dict mapping signed index pairs to real bracket coefficients.
        Signed index ``i < p`` means ``+alpha_i``, ``i >= p`` means
        ``-alpha_{i-p}``.
    """

    torus: np.ndarray
    center: np.ndarray
    alphas: np.ndarray
    planes_x: np.ndarray
    planes_y: np.ndarray
    eta: dict

    @property
    def n_positive(self):
        return self.alphas.shape[0]

    def find_root(self, vec, tol=1e-6):
        """Index of ``vec`` among the positive roots, or None."""
        if self.alphas.shape[0] == 0:
            return None
        diffs = np.max(np.abs(self.alphas - vec[None, :]), axis=1)
        best = int(np.argmin(diffs))
        scale = max(_linalg.max_abs(self.alphas), 1.0)
        return best if diffs[best] <= tol * scale else None


@dataclass
class Sl2Triple:
    """An sl(2) triple (H, X, Y) attached to a root plane.

    [X, Y] = H, [H, X] = bracket_scale * Y, [H, Y] = -bracket_scale * X.
    """

    h: np.ndarray
    x: np.ndarray
    y: np.ndarray
    bracket_scale: float


def _check_invariant_metric(alg, tol=1e-7):
    defect = liealg.ad_invariance_defect(alg)
    scale = max(_linalg.max_abs(alg.c), 1.0) * max(_linalg.max_abs(alg.gram), 1.0)
    if defect > tol * scale:
        raise InvalidStructure(
            f"metric is not ad-invariant (defect {defect:.3e}); root "
            "decomposition needs a bi-invariant metric"
        )


def centralizer(alg, basis, tol=1e-8):
    """Gram-orthonormal basis of the joint centralizer of given elements."""
    mats = [alg.ad_of(basis[:, a]) for a in range(basis.shape[1])]
    if not mats:
        return _linalg.gram_orthonormalize(np.eye(alg.dim), alg.gram)
    ker = _linalg.nullspace(np.vstack(mats), tol)
    return _linalg.gram_orthonormalize(ker, alg.gram, tol)


def cartan_subalgebra(alg, seed=liealg.DEFAULT_SEED, tol=1e-8):
    """Maximal abelian subalgebra (gram-orthonormal, center first)."""
    liealg.check_compact(alg)
    z = liealg.center(alg)
    gen = _linalg.rng(seed)
    cscale = max(_linalg.max_abs(alg.c), 1.0)
    for _ in range(8):
        x = gen.normal(size=alg.dim)
        cand = _linalg.nullspace(alg.ad_of(x), tol)
        worst = 0.0
        for a in range(cand.shape[1]):
            for b in range(a + 1, cand.shape[1]):
                worst = max(
                    worst, _linalg.max_abs(alg.bracket(cand[:, a], cand[:, b]))
                )
        if worst <= tol * cscale:
            merged = np.hstack([z, cand])
            return _linalg.gram_orthonormalize(merged, alg.gram, tol)
    raise NotMaximalTorus("generic centralizer failed to be abelian")


def _validate_torus(alg, torus, tol):
    torus = _linalg.gram_orthonormalize(np.asarray(torus, dtype=float), alg.gram)
    cscale = max(_linalg.max_abs(alg.c), 1.0)
    for a in range(torus.shape[1]):
        for b in range(a + 1, torus.shape[1]):
            if _linalg.max_abs(alg.bracket(torus[:, a], torus[:, b])) > tol * cscale:
                raise NotMaximalTorus("given torus is not abelian")
    cent = centralizer(alg, torus, tol)
    if cent.shape[1] != torus.shape[1]:
        raise NotMaximalTorus(
            f"torus of dimension {torus.shape[1]} has centralizer of "
            f"dimension {cent.shape[1]}; not maximal"
        )
    return torus


def _split_into_planes(alg, torus, seed, tol):
    """Refine the torus orthocomplement into 2-dim root planes."""
    comp = _linalg.orthonormal_complement(torus, alg.gram, tol)
    if comp.shape[1] == 0:
        return []
    blocks = [comp]
    gen = _linalg.rng(seed)
    for _ in range(3):
        w = gen.normal(size=torus.shape[1])
        t = torus @ w
        op = alg.ad_of(t)
        refined = []
        for block in blocks:
            if block.shape[1] <= 2:
                refined.append(block)
                continue
            m = _linalg.restrict_operator(op, block, alg.gram)
            s = 0.5 * (m - m.T)
            eigvals, vecs = np.linalg.eigh(-s @ s)
            groups = _linalg.cluster_values(
                eigvals, 1e-7 * max(_linalg.max_abs(eigvals), 1.0)
            )
            for grp in groups:
                sub = block @ vecs[:, grp]
                refined.append(_linalg.gram_orthonormalize(sub, alg.gram, tol))
        blocks = refined
        if all(b.shape[1] == 2 for b in blocks):
            break
    for b in blocks:
        if b.shape[1] != 2:
            raise DegenerateRootSpace(
                f"root block of dimension {b.shape[1]} would not split"
            )
    return blocks


def _orient_plane(alg, torus, block, positivity, tol):
    """Oriented (u, v, alpha) for a 2-dim block, with alpha positive."""
    u, v = block[:, 0], block[:, 1]
    ell = torus.shape[1]
    alpha = np.array(
        [alg.inner(alg.bracket(torus[:, i], u), v) for i in range(ell)]
    )
    nrm = np.linalg.norm(alpha)
    if nrm <= tol:
        raise NotMaximalTorus("found a zero root outside the torus")
    if positivity is not None:
        w = np.asarray(positivity, dtype=float)
        dot = float(w @ alpha)
        if abs(dot) < tol * nrm * max(np.linalg.norm(w), 1.0):
            raise IrregularPositivity(
                "positivity covector is orthogonal to a root"
            )
        if dot < 0:
            u, v, alpha = v, u, -alpha
    else:
        lead = 0.0
        for val in alpha:
            if abs(val) > tol * nrm:
                lead = val
                break
        if lead < 0:
            u, v, alpha = v, u, -alpha
    return u, v, alpha


def _fix_phases(alg, alphas, xs, ys, tol):
    """Rotate non-simple planes so plane brackets become real.

    Plane ``c`` with root gamma = alpha_a + alpha_b gets rotated so that
    ``[X_a, X_b]`` lies along ``X_c`` with positive coefficient, using the
    lexicographically first pair (a, b) of already-fixed planes.  Simple
    planes (roots that are not sums) keep their phase.
    """
    p = alphas.shape[0]
    scale = max(_linalg.max_abs(alphas), 1.0)

    def find(vec):
        if p == 0:
            return None
        diffs = np.max(np.abs(alphas - vec[None, :]), axis=1)
        best = int(np.argmin(diffs))
        return best if diffs[best] <= 1e-6 * scale else None

    decomposable = set()
    for a in range(p):
        for b in range(a + 1, p):
            c = find(alphas[a] + alphas[b])
            if c is not None:
                decomposable.add(c)
    fixed = {a for a in range(p) if a not in decomposable}
    while len(fixed) < p:
        progress = False
        for c in sorted(decomposable - fixed):
            pair = None
            for a in range(p):
                if a not in fixed or a == c:
                    continue
                for b in range(p):
                    if b not in fixed or b in (a, c) or b < a:
                        continue
                    if find(alphas[a] + alphas[b]) == c:
                        pair = (a, b)
                        break
                if pair:
                    break
            if pair is None:
                continue
            a, b = pair
            w = alg.bracket(xs[:, a], xs[:, b])
            ca = alg.inner(w, xs[:, c])
            cb = alg.inner(w, ys[:, c])
            if np.hypot(ca, cb) <= tol:
                raise DegenerateRootSpace(
                    "defining bracket for a phase fix vanished"
                )
            phi = np.arctan2(cb, ca)
            xc = np.cos(phi) * xs[:, c] + np.sin(phi) * ys[:, c]
            yc = -np.sin(phi) * xs[:, c] + np.cos(phi) * ys[:, c]
            xs[:, c], ys[:, c] = xc, yc
            fixed.add(c)
            progress = True
        if not progress:
            raise DegenerateRootSpace("phase fixing did not terminate")
    return xs, ys


def _measure_eta(alg, alphas, xs, ys):
    """Real bracket coefficients for all signed root pairs."""
    p = alphas.shape[0]
    scale = max(_linalg.max_abs(alphas), 1.0)

    def find(vec):
        if p == 0:
            return None
        diffs = np.max(np.abs(alphas - vec[None, :]), axis=1)
        best = int(np.argmin(diffs))
        return best if diffs[best] <= 1e-6 * scale else None

    eta = {}
    for a in range(p):
        for b in range(p):
            if a == b:
                continue
            c = find(alphas[a] + alphas[b])
            if c is not None:
                val = alg.inner(alg.bracket(xs[:, a], xs[:, b]), xs[:, c])
                eta[(a, b)] = val
                eta[(p + a, p + b)] = -val
            d = find(alphas[a] - alphas[b])
            if d is None:
                d = find(alphas[b] - alphas[a])
            if d is not None:
                val = alg.inner(alg.bracket(xs[:, a], ys[:, b]), ys[:, d])
                eta[(a, p + b)] = val
                eta[(p + a, b)] = -val
    return eta


def root_decompose(alg, torus=None, positivity=None, seed=liealg.DEFAULT_SEED,
                   tol=1e-8):
    """Full oriented root decomposition with fixed phases and eta table."""
    _check_invariant_metric(alg)
    liealg.check_compact(alg)
    if torus is None:
        torus = cartan_subalgebra(alg, seed=seed, tol=tol)
    torus = _validate_torus(alg, torus, tol)
    z = liealg.center(alg)
    if _linalg.contains(torus, z, alg.gram) > 1e-7:
        raise NotMaximalTorus("torus does not contain the center")
    blocks = _split_into_planes(alg, torus, seed, tol)
    oriented = [_orient_plane(alg, torus, b, positivity, tol) for b in blocks]
    oriented.sort(key=lambda t: tuple(np.round(t[2], 6)))
    p = len(oriented)
    n = alg.dim
    xs = np.zeros((n, p))
    ys = np.zeros((n, p))
    alphas = np.zeros((p, torus.shape[1]))
    for idx, (u, v, alpha) in enumerate(oriented):
        xs[:, idx], ys[:, idx], alphas[idx] = u, v, alpha
    xs, ys = _fix_phases(alg, alphas, xs, ys, tol)
    eta = _measure_eta(alg, alphas, xs, ys)
    return RootDatum(torus=torus, center=z, alphas=alphas,
                     planes_x=xs, planes_y=ys, eta=eta)


def sl2_triple(alg, datum, index, tol=1e-8):
    """The sl(2) triple of positive root plane ``index``."""
    x = datum.planes_x[:, index]
    y = datum.planes_y[:, index]
    h_raw = alg.bracket(x, y)
    coords = datum.torus.T @ alg.gram @ h_raw
    h = datum.torus @ coords
    if _linalg.max_abs(h_raw - h) > tol * max(_linalg.max_abs(h_raw), 1.0):
        raise InvalidStructure("[X, Y] is not in the torus")
    scale = float(datum.alphas[index] @ coords)
    if scale <= 0:
        raise InvalidStructure("root pairing alpha(H) is not positive")
    return Sl2Triple(h=h, x=x, y=y, bracket_scale=scale)


def count_longest_roots(datum, tol=1e-6):
    """Number of positive roots of maximal norm."""
    if datum.n_positive == 0:
        return 0
    norms = np.linalg.norm(datum.alphas, axis=1)
    top = float(np.max(norms))
    return int(np.sum(norms >= top * (1.0 - tol)))


def verify_structure_coefficients(alg, datum, tol=1e-8):
    """Check every plane bracket against the eta table.

    Returns a report dict with the max defect per bracket family, the eta
    symmetry defects, and an overall verdict.
    """
    p = datum.n_positive
    alphas = datum.alphas
    xs, ys = datum.planes_x, datum.planes_y
    eta = datum.eta
    find = datum.find_root

    def eta_at(i, j):
        return eta.get((i, j), 0.0)

    fam = {"torus_action": 0.0, "xx": 0.0, "xy": 0.0, "yy": 0.0}
    ell = datum.torus.shape[1]
    for i in range(ell):
        t = datum.torus[:, i]
        for a in range(p):
            r1 = alg.bracket(t, xs[:, a]) - alphas[a, i] * ys[:, a]
            r2 = alg.bracket(t, ys[:, a]) + alphas[a, i] * xs[:, a]
            fam["torus_action"] = max(
                fam["torus_action"], _linalg.max_abs(r1), _linalg.max_abs(r2)
            )
    for a in range(p):
        for b in range(p):
            if a == b:
                continue
            c = find(alphas[a] + alphas[b])
            dplus = find(alphas[a] - alphas[b])
            dminus = find(alphas[b] - alphas[a])
            if dplus is not None:
                sgn, d = 1.0, dplus
            elif dminus is not None:
                sgn, d = -1.0, dminus
            else:
                sgn, d = 1.0, None

            rxx = alg.bracket(xs[:, a], xs[:, b])
            rxy = alg.bracket(xs[:, a], ys[:, b])
            ryy = alg.bracket(ys[:, a], ys[:, b])
            if c is not None:
                rxx = rxx - eta_at(a, b) * xs[:, c]
                rxy = rxy - eta_at(a, b) * ys[:, c]
                ryy = ryy + eta_at(a, b) * xs[:, c]
            if d is not None:
                rxx = rxx + sgn * eta_at(a, p + b) * xs[:, d]
                rxy = rxy - eta_at(a, p + b) * ys[:, d]
                ryy = ryy + sgn * eta_at(a, p + b) * xs[:, d]
            fam["xx"] = max(fam["xx"], _linalg.max_abs(rxx))
            fam["xy"] = max(fam["xy"], _linalg.max_abs(rxy))
            fam["yy"] = max(fam["yy"], _linalg.max_abs(ryy))

    sym = {"antisymmetry": 0.0, "negation": 0.0, "cyclic": 0.0}
    for (i, j), val in eta.items():
        sym["antisymmetry"] = max(sym["antisymmetry"], abs(val + eta_at(j, i)))
        ni = i + p if i < p else i - p
        nj = j + p if j < p else j - p
        sym["negation"] = max(sym["negation"], abs(val + eta_at(ni, nj)))
        # cyclic identity eta(i, j) = eta(j, k) = eta(k, i) for the signed
        # root k with root(i) + root(j) + root(k) = 0
        vi = alphas[i] if i < p else -alphas[i - p]
        vj = alphas[j] if j < p else -alphas[j - p]
        vk = -(vi + vj)
        k = find(vk)
        if k is None:
            k2 = find(-vk)
            k = None if k2 is None else k2 + p
        if k is not None:
            sym["cyclic"] = max(sym["cyclic"], abs(val - eta_at(j, k)),
                                abs(val - eta_at(k, i)))

    cscale = max(_linalg.max_abs(alg.c), 1.0)
    worst = max(max(fam.values()), max(sym.values()))
    return {
        "families": fam,
        "eta_symmetries": sym,
        "max_defect": worst,
        "ok": bool(worst <= tol * cscale),
    }
