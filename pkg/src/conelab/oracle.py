"""Brute-force reference implementations for cone computations.

Everything here is deliberately exponential: projections are found by
enumerating generator subsets and extreme rays by enumerating active
constraint sets.  That keeps the code logically independent of the
closed-form paths it is used to certify, at the price of hard caps on
problem size (at most 12 generators/halfspaces, ambient dimension at
most 16, ray enumeration up to dimension 10).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

MAX_GENERATORS = 12
MAX_DIM = 16
MAX_DD_DIM = 10
MAX_DD_HALFSPACES = 12

# Relative gap below which two candidate distances count as a tie; the
# canonical candidate (smallest face, then lexicographic) wins ties.
_TIE_REL = 1e-12
_RANK_RTOL = 1e-12


def _as_generator_matrix(generators, max_rows=MAX_GENERATORS):
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    if G.ndim != 2 or G.size == 0:
        raise ValueError("generators must be a non-empty list of vectors")
    if not np.all(np.isfinite(G)):
        raise ValueError("generators contain NaN/Inf entries")
    k, m = G.shape
    if k > max_rows:
        raise ValueError(f"at most {max_rows} generators supported, got {k}")
    if m > MAX_DIM:
        raise ValueError(f"dimension cap {MAX_DIM} exceeded, got {m}")
    norms = np.linalg.norm(G, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero generator not allowed")
    return G


@dataclass(frozen=True)
class ProjectionCertificate:
    """Certified nearest point of a finitely generated cone.

    Residuals are relative: ``residual_primal`` bounds the distance of
    ``point`` from the cone (scaled by 1 + |point|), ``residual_polar`` is
    the largest inner product of the error ``x - point`` against a unit
    generator (scaled by 1 + |x|), and ``residual_complementarity`` is
    |<x - point, point>| scaled by 1 + |x|^2.
    """

    point: np.ndarray
    active_face: tuple[int, ...]
    residual_primal: float
    residual_polar: float
    residual_complementarity: float

    def accepted(self, eps: float) -> bool:
        return max(self.residual_primal, self.residual_polar,
                   self.residual_complementarity) <= eps


class FaceTable:
    """Pre-factored least-squares data for every independent generator subset.

    Candidate projections onto ``cone{g_1, ..., g_k}`` are least-squares
    fits over the span of each subset of generators, kept when the fitted
    coefficients are (numerically) nonnegative.  The minimum-distance
    feasible candidate is the exact projection, because the true nearest
    point lies on some face and is itself such a candidate.

    Subsets are ordered by size, then lexicographically; rank-deficient
    subsets are skipped.  The empty subset (candidate 0, the origin) is
    always present.
    """

    def __init__(self, generators):
        G = _as_generator_matrix(generators)
        self.generators = G
        k, m = G.shape
        self.dim = m
        subsets = [()]
        groups = []
        for size in range(1, min(k, m) + 1):
            idx_rows, w_rows, g_rows = [], [], []
            for S in itertools.combinations(range(k), size):
                GS = G[list(S), :].T  # (m, size), columns are generators
                sv = np.linalg.svd(GS, compute_uv=False)
                if sv[-1] <= sv[0] * _RANK_RTOL:
                    continue  # rank-deficient face, covered by a smaller one
                idx_rows.append(S)
                w_rows.append(np.linalg.pinv(GS))
                g_rows.append(GS)
            if idx_rows:
                groups.append((np.array(w_rows), np.array(g_rows)))
                subsets.extend(idx_rows)
        self.subsets = subsets
        self._groups = groups

    def project(self, points):
        """Project a batch of points; returns (projections, winner indices).

        ``points`` has shape (n, dim); winners index into ``self.subsets``.
        """
        X = np.atleast_2d(np.asarray(points, dtype=float))
        n = X.shape[0]
        if X.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {X.shape[1]}")
        best_p = np.zeros_like(X)
        best_d2 = np.einsum("ij,ij->i", X, X)  # empty subset: origin
        best_sub = np.zeros(n, dtype=int)
        max_rows = max((w.shape[0] * w.shape[1] for w, _ in self._groups), default=1)
        chunk = max(64, int(4e6 / max(1, max_rows * self.dim)))
        for lo in range(0, n, chunk):
            hi = min(n, lo + chunk)
            self._project_chunk(X[lo:hi], best_p[lo:hi], best_d2[lo:hi], best_sub[lo:hi])
        return best_p, best_sub

    def _project_chunk(self, X, best_p, best_d2, best_sub):
        XT = X.T
        n = X.shape[0]
        rows = np.arange(n)
        offset = 1
        for W, GS in self._groups:
            C = W @ XT                              # (n_s, size, n)
            scale = 1.0 + np.abs(C).max(axis=1, keepdims=True)
            feasible = (C >= -1e-12 * scale).all(axis=1)
            P = GS @ C                              # (n_s, m, n)
            R = XT[None, :, :] - P
            d2 = np.einsum("smn,smn->sn", R, R)
            d2 = np.where(feasible, d2, np.inf)
            gi = d2.argmin(axis=0)
            gd = d2[gi, rows]
            better = gd < best_d2 - _TIE_REL * (1.0 + best_d2)
            if np.any(better):
                best_d2[better] = gd[better]
                best_sub[better] = offset + gi[better]
                best_p[better] = P[gi, :, rows][better]
            offset += W.shape[0]

    def coefficients(self, subset_index, x):
        """Least-squares coefficients of ``x`` on the given subset."""
        if subset_index == 0:
            return np.zeros(0)
        offset = 1
        for W, _ in self._groups:
            if subset_index < offset + W.shape[0]:
                return W[subset_index - offset] @ x
            offset += W.shape[0]
        raise IndexError(subset_index)


def brute_force_project(generators, x, eps=1e-8):
    """Project ``x`` onto the cone generated by ``generators``, with certificate.

    Enumerates every independent subset of generators, keeps the
    least-squares candidates with nonnegative coefficients, and returns the
    minimum-distance candidate together with its optimality residuals
    (point in the cone, error in the polar, complementarity).  Raises when
    the winning candidate fails certification at ``eps``, which signals
    inconsistent cone data.

    Parameters
    ----------
    generators : array_like, shape (k, m)
        Generator vectors, one per row.  k <= 12, m <= 16.
    x : array_like, shape (m,)
        Point to project.
    eps : float
        Relative acceptance tolerance for the certificate.
    """
    table = generators if isinstance(generators, FaceTable) else FaceTable(generators)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != table.dim:
        raise ValueError(f"x must be a vector of dimension {table.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains NaN/Inf entries")
    P, subs = table.project(x[None, :])
    p = P[0]
    S = table.subsets[subs[0]]
    coeffs = table.coefficients(subs[0], x)

    G = table.generators
    neg = np.minimum(coeffs, 0.0)
    primal = float(np.linalg.norm(neg @ G[list(S), :]) if len(S) else 0.0)
    primal /= 1.0 + float(np.linalg.norm(p))
    ghat = G / np.linalg.norm(G, axis=1, keepdims=True)
    err = x - p
    polar = float(max(0.0, (ghat @ err).max())) / (1.0 + float(np.linalg.norm(x)))
    comp = float(abs(err @ p)) / (1.0 + float(x @ x))
    cert = ProjectionCertificate(point=p, active_face=tuple(S), residual_primal=primal,
                                 residual_polar=polar, residual_complementarity=comp)
    if not cert.accepted(eps):
        raise ValueError("no candidate certifies: inconsistent cone data "
                         f"(residuals {primal:.3e}, {polar:.3e}, {comp:.3e})")
    return cert


def conic_feasibility(generators, x, eps=1e-8):
    """True iff ``x`` is within ``eps*(1+|x|)`` of a nonnegative combination."""
    table = generators if isinstance(generators, FaceTable) else FaceTable(generators)
    x = np.asarray(x, dtype=float)
    P, _ = table.project(x[None, :])
    dist = float(np.linalg.norm(x - P[0]))
    return dist <= eps * (1.0 + float(np.linalg.norm(x)))


def double_description(halfspaces, feas_tol=1e-9):
    """Extreme rays of ``{x : n_j . x >= 0 for all j}`` by active-set enumeration.

    Lineality (the cone is not pointed) is reported as explicit +/- line
    pairs appended after the extreme rays.  All returned directions have
    unit norm.

    Parameters
    ----------
    halfspaces : array_like, shape (k, m)
        Inward normal vectors, one per row.  k <= 12, m <= 10.
    feas_tol : float
        Feasibility slack for candidate directions (normals are
        row-normalized internally, so this is an absolute tolerance).

    Returns
    -------
    list of ndarray
        Unit extreme rays, then +/- pairs spanning the lineality space.
    """
    B = _as_generator_matrix(halfspaces, max_rows=MAX_DD_HALFSPACES)
    k, m = B.shape
    if m > MAX_DD_DIM:
        raise ValueError(f"ray enumeration capped at dimension {MAX_DD_DIM}, got {m}")
    Bn = B / np.linalg.norm(B, axis=1, keepdims=True)

    _, sv, Vt = np.linalg.svd(Bn, full_matrices=True)
    r = int(np.sum(sv > sv[0] * _RANK_RTOL))
    lines = [Vt[i] for i in range(r, m)]
    Q = Vt[:r].T                        # (m, r) row-space basis
    Br = Bn @ Q                         # (k, r), full column rank

    rays_reduced = []

    def _push(d):
        for kept in rays_reduced:
            if np.linalg.norm(kept - d) <= 1e-9:
                return
        rays_reduced.append(d)

    if r == 1:
        for sign in (1.0, -1.0):
            d = np.array([sign])
            if np.all(Br @ d >= -feas_tol):
                _push(d)
    else:
        for S in itertools.combinations(range(k), r - 1):
            A = Br[list(S), :]
            _, sa, Va = np.linalg.svd(A, full_matrices=True)
            rank = int(np.sum(sa > sa[0] * _RANK_RTOL)) if sa.size else 0
            if rank != r - 1:
                continue
            d = Va[-1]
            for sign in (1.0, -1.0):
                cand = sign * d
                if np.all(Br @ cand >= -feas_tol):
                    _push(cand)
    out = [Q @ d for d in rays_reduced]
    out = [v / np.linalg.norm(v) for v in out]
    for line in lines:
        out.append(line.copy())
        out.append(-line)
    return out


# Rows generate the planar cone {(a, b) : |a| <= b}, the two-dimensional
# section of the second-order cone through any axis plane.
_SOC_SECTION = np.array([[1.0, 1.0], [-1.0, 1.0]])


def lorentz_reference_project(x, eps=1e-8):
    """Reference projection onto ``{(xbar, t) : |xbar| <= t}``.

    The second-order cone is invariant under rotations that fix the t-axis,
    and the projection of ``x`` therefore lies in the plane spanned by
    ``(xbar, 0)`` and the t-axis.  Inside that plane the cone is the
    two-dimensional wedge ``|a| <= b``, so the problem reduces to a planar
    polyhedral projection handled by :func:`brute_force_project`.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("second-order cone requires dimension >= 2")
    bar, t = x[:-1], x[-1]
    radius = float(np.linalg.norm(bar))
    if radius == 0.0:
        p = np.zeros_like(x)
        p[-1] = max(t, 0.0)
        return p
    cert = brute_force_project(_SOC_SECTION, np.array([radius, t]), eps=eps)
    a, b = cert.point
    return np.concatenate([(a / radius) * bar, [b]])
