"""Sampled property checkers for retraction pairs, with witness reports.

Each checker draws seeded samples, evaluates residuals, and returns a
:class:`PropertyReport`.  Two residual regimes are used:

* norm identities (e.g. m + n = I) pass iff the relative residual is at
  most ``eps_equal``;
* cone-membership tests use ``eps_membership`` with an indeterminate band:
  residuals inside ``[eps/10, 10*eps]`` make the verdict ``inconclusive``
  instead of flipping between pass and fail at the boundary.

Failures carry replayable witnesses (the original sample, plus a
bisection-shrunk variant for readability).  Checkers are deterministic
functions of (pair, n_samples, seed); witnesses are sorted by norm and
then lexicographically, so reports are schedule-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import DEFAULT_TOL
from .sampling import cone_members, gaussian_points, rng_for

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# Absolute tolerance for identities that hold by exact algebra up to rounding.
ALGEBRA_ABS_TOL = 1e-12

_WITNESS_CAP = 8
_SHRINK_STEPS = 20

# status codes per sample
_OK, _BAND, _BAD = 0, 1, 2


@dataclass
class PropertyReport:
    """Outcome of one sampled property check."""

    property_id: str
    verdict: str
    samples_run: int
    witnesses: list = field(default_factory=list)
    seed: int = 0
    tolerances: object = DEFAULT_TOL

    def to_json_dict(self):
        return {"property": self.property_id,
                "verdict": self.verdict,
                "samples": self.samples_run,
                "seed": self.seed,
                "witnesses": self.witnesses,
                "tolerances": self.tolerances.to_json_dict()}


def _scales(X):
    return 1.0 + np.linalg.norm(X, axis=1)


def _membership_status(res, eps):
    out = np.full(np.shape(res), _OK, dtype=int)
    out[np.asarray(res) >= eps / 10.0] = _BAND
    out[np.asarray(res) > eps * 10.0] = _BAD
    return out


def _norm_status(res, eps):
    out = np.full(np.shape(res), _OK, dtype=int)
    out[np.asarray(res) > eps] = _BAD
    return out


def _shrink(replay, arrays, threshold):
    """Bisect the scale of a failing witness toward the smallest norm that
    still fails; maps are positively homogeneous, so scaling is faithful."""
    lo, hi = 0.0, 1.0
    for _ in range(_SHRINK_STEPS):
        mid = 0.5 * (lo + hi)
        if replay(*(mid * a for a in arrays)) > threshold:
            hi = mid
        else:
            lo = mid
    scaled = [hi * a for a in arrays]
    return scaled, replay(*scaled)


class _Check:
    """Accumulates per-sample statuses and witness candidates."""

    def __init__(self):
        self.any_band = False
        self.any_bad = False
        self.candidates = []

    def add(self, status, inputs, residuals, check, replay, threshold):
        status = np.asarray(status)
        self.any_band = self.any_band or bool((status == _BAND).any())
        bad = np.nonzero(status == _BAD)[0]
        if bad.size == 0:
            return
        self.any_bad = True
        res = np.asarray(residuals, dtype=float)
        for i in bad:
            arrays = [np.atleast_1d(np.asarray(a[i], dtype=float)) for a in inputs.values()]
            self.candidates.append((list(inputs.keys()), arrays, float(res[i]),
                                    check, replay, threshold))

    def finish(self, property_id, n_samples, seed, tol):
        if self.any_bad:
            verdict = FAIL
        elif self.any_band:
            verdict = INCONCLUSIVE
        else:
            verdict = PASS
        witnesses = []
        ordered = sorted(self.candidates,
                         key=lambda c: (float(np.linalg.norm(c[1][0])),
                                        tuple(np.concatenate(c[1]).tolist())))
        for names, arrays, res, check, replay, threshold in ordered[:_WITNESS_CAP]:
            w = {name: arr.tolist() for name, arr in zip(names, arrays)}
            w["residual"] = res
            w["check"] = check
            if replay is not None:
                shrunk, sres = _shrink(replay, arrays, threshold)
                w["shrunk"] = {name: arr.tolist() for name, arr in zip(names, shrunk)}
                w["shrunk"]["residual"] = float(sres)
            witnesses.append(w)
        return PropertyReport(property_id=property_id, verdict=verdict,
                              samples_run=n_samples, witnesses=witnesses,
                              seed=seed, tolerances=tol)


def check_mutual_polarity(pair, n_samples=1000, seed=0):
    """m + n = I and m(n(x)) = n(m(x)) = 0 on Gaussian samples."""
    tol = pair.tol
    rng = rng_for(seed, "polarity")
    X = gaussian_points(rng, n_samples, pair.dim)
    M, N = pair.m(X), pair.n(X)
    s = _scales(X)
    res = np.maximum.reduce([
        np.linalg.norm(M + N - X, axis=1) / s,
        np.linalg.norm(pair.m(N), axis=1) / s,
        np.linalg.norm(pair.n(M), axis=1) / s,
    ])

    def replay(x):
        sx = 1.0 + float(np.linalg.norm(x))
        mx, nx = pair.m(x), pair.n(x)
        return max(float(np.linalg.norm(mx + nx - x)),
                   float(np.linalg.norm(pair.m(nx))),
                   float(np.linalg.norm(pair.n(mx)))) / sx

    chk = _Check()
    chk.add(_norm_status(res, tol.eps_equal), {"x": X}, res,
            "sum-and-cross", replay, tol.eps_equal)
    return chk.finish("polarity", n_samples, seed, tol)


def check_ranges(pair, n_samples=1000, seed=0):
    """Images of m and n land in their declared range cones."""
    tol = pair.tol
    rng = rng_for(seed, "ranges")
    X = gaussian_points(rng, n_samples, pair.dim)
    res_m = pair.cone_m.membership_residual(pair.m(X))
    res_n = pair.cone_n.membership_residual(pair.n(X))
    chk = _Check()
    chk.add(_membership_status(res_m, tol.eps_membership), {"x": X}, res_m,
            "m-image", lambda x: pair.cone_m.membership_residual(pair.m(x)),
            10.0 * tol.eps_membership)
    chk.add(_membership_status(res_n, tol.eps_membership), {"x": X}, res_n,
            "n-image", lambda x: pair.cone_n.membership_residual(pair.n(x)),
            10.0 * tol.eps_membership)
    return chk.finish("ranges", n_samples, seed, tol)


def check_idempotence(pair, n_samples=1000, seed=0):
    """m(m(x)) = m(x) and n(n(x)) = n(x)."""
    tol = pair.tol
    rng = rng_for(seed, "idempotence")
    X = gaussian_points(rng, n_samples, pair.dim)
    M, N = pair.m(X), pair.n(X)
    s = _scales(X)
    res = np.maximum(np.linalg.norm(pair.m(M) - M, axis=1) / s,
                     np.linalg.norm(pair.n(N) - N, axis=1) / s)

    def replay(x):
        sx = 1.0 + float(np.linalg.norm(x))
        mx, nx = pair.m(x), pair.n(x)
        return max(float(np.linalg.norm(pair.m(mx) - mx)),
                   float(np.linalg.norm(pair.n(nx) - nx))) / sx

    chk = _Check()
    chk.add(_norm_status(res, tol.eps_equal), {"x": X}, res,
            "squared", replay, tol.eps_equal)
    return chk.finish("idempotence", n_samples, seed, tol)


def _xor_fail(status_a, status_b):
    """Equivalence of two three-way classifications: clean contradiction
    fails, any band sample is inconclusive."""
    fail = ((status_a == _OK) & (status_b == _BAD)) | ((status_a == _BAD) & (status_b == _OK))
    band = ((status_a == _BAND) | (status_b == _BAND)) & ~fail
    out = np.where(fail, _BAD, np.where(band, _BAND, _OK))
    return out


def check_range_kernel(pair, n_samples=1000, seed=0):
    """Range of m = kernel of n (and symmetrically), both directions.

    Samples mix ambient Gaussians with members of both range cones so each
    implication is actually exercised.
    """
    tol = pair.tol
    rng = rng_for(seed, "range-kernel")
    n_half = max(1, n_samples // 2)
    n_quart = max(1, (n_samples - n_half) // 2)
    X = np.vstack([
        gaussian_points(rng, n_half, pair.dim),
        cone_members(pair.cone_m, rng, n_quart),
        cone_members(pair.cone_n, rng, max(1, n_samples - n_half - n_quart)),
    ])
    s = _scales(X)
    res_in_m = pair.cone_m.membership_residual(X)
    res_ker_n = np.linalg.norm(pair.n(X), axis=1) / s
    res_in_n = pair.cone_n.membership_residual(X)
    res_ker_m = np.linalg.norm(pair.m(X), axis=1) / s
    eps = tol.eps_membership

    def replay_m(x):
        sx = 1.0 + float(np.linalg.norm(x))
        return max(float(pair.cone_m.membership_residual(x)),
                   float(np.linalg.norm(pair.n(x))) / sx)

    def replay_n(x):
        sx = 1.0 + float(np.linalg.norm(x))
        return max(float(pair.cone_n.membership_residual(x)),
                   float(np.linalg.norm(pair.m(x))) / sx)

    chk = _Check()
    chk.add(_xor_fail(_membership_status(res_in_m, eps), _membership_status(res_ker_n, eps)),
            {"x": X}, np.maximum(res_in_m, res_ker_n), "m-side", replay_m, 10.0 * eps)
    chk.add(_xor_fail(_membership_status(res_in_n, eps), _membership_status(res_ker_m, eps)),
            {"x": X}, np.maximum(res_in_n, res_ker_m), "n-side", replay_n, 10.0 * eps)
    return chk.finish("range-kernel", X.shape[0], seed, tol)


def check_range_negation(pair, n_samples=1000, seed=0):
    """The n-range is the negated m-range: images negate across, and
    sampled members of each range cone negate into the other."""
    tol = pair.tol
    eps = tol.eps_membership
    rng = rng_for(seed, "range-negation")
    X = gaussian_points(rng, n_samples, pair.dim)
    res_a = np.maximum(pair.cone_m.membership_residual(-pair.n(X)),
                       pair.cone_n.membership_residual(-pair.m(X)))
    n_mem = max(1, n_samples // 2)
    Mem = cone_members(pair.cone_m, rng, n_mem)
    Nem = cone_members(pair.cone_n, rng, n_mem)
    res_b1 = pair.cone_n.membership_residual(-Mem)
    res_b2 = pair.cone_m.membership_residual(-Nem)

    chk = _Check()
    chk.add(_membership_status(res_a, eps), {"x": X}, res_a, "negated-images",
            lambda x: max(float(pair.cone_m.membership_residual(-pair.n(x))),
                          float(pair.cone_n.membership_residual(-pair.m(x)))),
            10.0 * eps)
    chk.add(_membership_status(res_b1, eps), {"x": Mem}, res_b1, "negated-m-member",
            lambda x: float(pair.cone_n.membership_residual(-x)), 10.0 * eps)
    chk.add(_membership_status(res_b2, eps), {"x": Nem}, res_b2, "negated-n-member",
            lambda x: float(pair.cone_m.membership_residual(-x)), 10.0 * eps)
    return chk.finish("range-negation", n_samples, seed, tol)


def _subadd_data(pair, which):
    if which == "m":
        return pair.m, pair.subadd_cone_m
    if which == "n":
        return pair.n, pair.subadd_cone_n
    raise ValueError("which must be 'm' or 'n'")


def check_subadditive(pair, which="m", n_samples=1000, seed=0):
    """R(x+y) <= R(x) + R(y) in the range order: the defect
    R(x) + R(y) - R(x+y) must be a member of the range cone."""
    tol = pair.tol
    R, cone = _subadd_data(pair, which)
    rng = rng_for(seed, f"subadditive-{which}")
    X = gaussian_points(rng, n_samples, pair.dim)
    Y = gaussian_points(rng, n_samples, pair.dim)
    D = R(X) + R(Y) - R(X + Y)
    res = cone.membership_residual(D)

    def replay(x, y):
        return float(cone.membership_residual(R(x) + R(y) - R(x + y)))

    chk = _Check()
    chk.add(_membership_status(res, tol.eps_membership), {"x": X, "y": Y}, res,
            "defect-membership", replay, 10.0 * tol.eps_membership)
    return chk.finish(f"subadditive-{which}", n_samples, seed, tol)


def check_isotone(pair, which="m", n_samples=1000, seed=0):
    """x <= y implies R(x) <= R(y); comparable pairs are built as
    y = x + k with k a random member of the order cone."""
    tol = pair.tol
    if which == "m":
        R, cone = pair.m, pair.cone_m
    elif which == "n":
        R, cone = pair.n, pair.cone_n
    else:
        raise ValueError("which must be 'm' or 'n'")
    rng = rng_for(seed, f"isotone-{which}")
    X = gaussian_points(rng, n_samples, pair.dim)
    Y = X + cone_members(cone, rng, n_samples)
    res = cone.membership_residual(R(Y) - R(X))

    def replay(x, y):
        return float(cone.membership_residual(R(y) - R(x)))

    chk = _Check()
    chk.add(_membership_status(res, tol.eps_membership), {"x": X, "y": Y}, res,
            "image-order", replay, 10.0 * tol.eps_membership)
    return chk.finish(f"isotone-{which}", n_samples, seed, tol)


def check_subadditivity_defect_sets(pair, n_samples=1000, seed=0):
    """Structure of the subadditivity defects m(x) + m(y) - m(x+y).

    Three parts: (a) every sampled defect lies in the m-range cone;
    (b) every sampled member w of the m-range is realized as a defect via
    w = m(w) + m(v) - m(w+v) with v = -(w + k), k a range member --
    requires v and w + v to land in the n-range, which is verified per
    sample and otherwise reported as inconclusive; (c) the n-defect equals
    the negated m-defect up to absolute rounding (exact algebra).
    """
    tol = pair.tol
    rng = rng_for(seed, "subadditivity-defects")
    X = gaussian_points(rng, n_samples, pair.dim)
    Y = gaussian_points(rng, n_samples, pair.dim)
    Dm = pair.m(X) + pair.m(Y) - pair.m(X + Y)
    Dn = pair.n(X) + pair.n(Y) - pair.n(X + Y)
    res_a = pair.subadd_cone_m.membership_residual(Dm)
    res_c = np.abs(Dn + Dm).max(axis=1)

    W = cone_members(pair.cone_m, rng, n_samples)
    K = cone_members(pair.cone_m, rng, n_samples)
    V = -(W + K)
    pre = np.maximum(pair.cone_n.membership_residual(V),
                     pair.cone_n.membership_residual(W + V))
    eligible = _membership_status(pre, tol.eps_membership) == _OK
    realized = pair.m(W) + pair.m(V) - pair.m(W + V)
    res_b = np.linalg.norm(realized - W, axis=1) / _scales(W)
    status_b = np.where(eligible, _norm_status(res_b, tol.eps_equal), _BAND)

    def replay_a(x, y):
        return float(pair.subadd_cone_m.membership_residual(
            pair.m(x) + pair.m(y) - pair.m(x + y)))

    def replay_b(w, v):
        return float(np.linalg.norm(pair.m(w) + pair.m(v) - pair.m(w + v) - w)
                     / (1.0 + np.linalg.norm(w)))

    def replay_c(x, y):
        dm = pair.m(x) + pair.m(y) - pair.m(x + y)
        dn = pair.n(x) + pair.n(y) - pair.n(x + y)
        return float(np.abs(dn + dm).max())

    chk = _Check()
    chk.add(_membership_status(res_a, tol.eps_membership), {"x": X, "y": Y}, res_a,
            "defect-in-range", replay_a, 10.0 * tol.eps_membership)
    chk.add(status_b, {"x": W, "y": V}, res_b, "member-realized",
            replay_b, tol.eps_equal)
    chk.add(_norm_status(res_c, ALGEBRA_ABS_TOL), {"x": X, "y": Y}, res_c,
            "defect-negation", replay_c, ALGEBRA_ABS_TOL)
    return chk.finish("subadditivity-defects", n_samples, seed, tol)


def check_riesz_identities(pair, n_samples=1000, seed=0):
    """Positive/negative-part identities of a lattice pair.

    Per sample: idempotence, subadditivity, the pointedness separation
    (m(x) = m(-x) = 0 forces x = 0; checked on the samples where the
    antecedent holds, plus the origin), isotonicity, x = m(x) + n(x),
    vanishing cross-compositions, and distribution of m over pairwise
    suprema computed in basis coordinates.
    """
    if pair.family != "lattice":
        raise ValueError("positive-part identities apply to lattice pairs only")
    tol = pair.tol
    eps = tol.eps_membership
    rng = rng_for(seed, "positive-part-identities")
    X = np.vstack([np.zeros((1, pair.dim)), gaussian_points(rng, n_samples, pair.dim)])
    Y = np.vstack([np.zeros((1, pair.dim)), gaussian_points(rng, n_samples, pair.dim)])
    A, invA = pair.basis, pair.basis_inv
    M, N = pair.m(X), pair.n(X)
    s = _scales(X)

    res_idem = np.linalg.norm(pair.m(M) - M, axis=1) / s
    res_sub = pair.cone_m.membership_residual(pair.m(X) + pair.m(Y) - pair.m(X + Y))
    antecedent = (np.linalg.norm(M, axis=1) <= eps * s) & \
                 (np.linalg.norm(pair.m(-X), axis=1) <= eps * s)
    separated = np.linalg.norm(X, axis=1) <= 10.0 * eps * s
    res_sep = np.where(antecedent & ~separated, np.linalg.norm(X, axis=1) / s, 0.0)
    K = cone_members(pair.cone_m, rng, X.shape[0])
    res_iso = pair.cone_m.membership_residual(pair.m(X + K) - M)
    res_dec = np.linalg.norm(M + N - X, axis=1) / s
    res_cross = np.maximum(np.linalg.norm(pair.m(N), axis=1),
                           np.linalg.norm(pair.n(M), axis=1)) / s
    CX, CY = X @ invA.T, Y @ invA.T
    sup_xy = np.maximum(CX, CY) @ A.T
    sup_images = np.maximum(np.clip(CX, 0.0, None), np.clip(CY, 0.0, None)) @ A.T
    res_sup = np.linalg.norm(pair.m(sup_xy) - sup_images, axis=1) / \
        (1.0 + np.maximum(np.linalg.norm(X, axis=1), np.linalg.norm(Y, axis=1)))

    chk = _Check()
    chk.add(_norm_status(res_idem, tol.eps_equal), {"x": X}, res_idem, "idempotent",
            lambda x: float(np.linalg.norm(pair.m(pair.m(x)) - pair.m(x))
                            / (1.0 + np.linalg.norm(x))), tol.eps_equal)
    chk.add(_membership_status(res_sub, eps), {"x": X, "y": Y}, res_sub, "subadditive",
            lambda x, y: float(pair.cone_m.membership_residual(
                pair.m(x) + pair.m(y) - pair.m(x + y))), 10.0 * eps)
    chk.add(_norm_status(res_sep, 10.0 * eps), {"x": X}, res_sep, "pointed-separation",
            lambda x: float(np.linalg.norm(x) / (1.0 + np.linalg.norm(x))), 10.0 * eps)
    chk.add(_membership_status(res_iso, eps), {"x": X, "y": X + K}, res_iso, "isotone",
            lambda x, y: float(pair.cone_m.membership_residual(pair.m(y) - pair.m(x))),
            10.0 * eps)
    chk.add(_norm_status(res_dec, tol.eps_equal), {"x": X}, res_dec, "decomposition",
            lambda x: float(np.linalg.norm(pair.m(x) + pair.n(x) - x)
                            / (1.0 + np.linalg.norm(x))), tol.eps_equal)
    chk.add(_norm_status(res_cross, tol.eps_equal), {"x": X}, res_cross, "cross-null",
            lambda x: float(max(np.linalg.norm(pair.m(pair.n(x))),
                                np.linalg.norm(pair.n(pair.m(x))))
                            / (1.0 + np.linalg.norm(x))), tol.eps_equal)

    def replay_sup(x, y):
        cx, cy = x @ invA.T, y @ invA.T
        lhs = pair.m(np.maximum(cx, cy) @ A.T)
        rhs = np.maximum(np.clip(cx, 0.0, None), np.clip(cy, 0.0, None)) @ A.T
        return float(np.linalg.norm(lhs - rhs)
                     / (1.0 + max(np.linalg.norm(x), np.linalg.norm(y))))

    chk.add(_norm_status(res_sup, tol.eps_equal), {"x": X, "y": Y}, res_sup,
            "sup-distributes", replay_sup, tol.eps_equal)
    return chk.finish("positive-part-identities", X.shape[0], seed, tol)


def _sigma_runner(pair, n_samples, seed):
    from .suprema import finite_sigma_continuity_check
    return finite_sigma_continuity_check(pair, chain_length=8, seed=seed,
                                         n_chains=max(1, n_samples // 8))


# Catalogue of checkers by property id, in report order, with the pair
# families each applies to.  The ids are frozen strings: reports stay
# diffable across runs and releases.
CATALOGUE = (
    ("ranges", ("lattice", "moreau", "minkowski"),
     lambda pair, n, seed: check_ranges(pair, n, seed)),
    ("polarity", ("lattice", "moreau", "minkowski"),
     lambda pair, n, seed: check_mutual_polarity(pair, n, seed)),
    ("idempotence", ("lattice", "moreau", "minkowski"),
     lambda pair, n, seed: check_idempotence(pair, n, seed)),
    ("range-kernel", ("lattice", "moreau"),
     lambda pair, n, seed: check_range_kernel(pair, n, seed)),
    ("range-negation", ("lattice", "moreau"),
     lambda pair, n, seed: check_range_negation(pair, n, seed)),
    ("subadditive-m", ("lattice", "moreau", "minkowski"),
     lambda pair, n, seed: check_subadditive(pair, "m", n, seed)),
    ("subadditive-n", ("lattice", "moreau"),
     lambda pair, n, seed: check_subadditive(pair, "n", n, seed)),
    ("isotone-m", ("lattice", "moreau"),
     lambda pair, n, seed: check_isotone(pair, "m", n, seed)),
    ("isotone-n", ("lattice", "moreau"),
     lambda pair, n, seed: check_isotone(pair, "n", n, seed)),
    ("subadditivity-defects", ("lattice", "moreau"),
     lambda pair, n, seed: check_subadditivity_defect_sets(pair, n, seed)),
    ("positive-part-identities", ("lattice",),
     lambda pair, n, seed: check_riesz_identities(pair, n, seed)),
    ("monotone-sup-commutes", ("lattice",), _sigma_runner),
)


def catalogue_for(family):
    """Property ids applicable to a pair family, in report order."""
    return [key for key, families, _ in CATALOGUE if family in families]


def run_catalogue(pair, n_samples=1000, seed=0):
    """Run every applicable checker; returns reports in catalogue order."""
    reports = []
    for key, families, runner in CATALOGUE:
        if pair.family in families:
            reports.append(runner(pair, n_samples, seed))
    return reports
