"""Rotation-group calculus: hat/vee maps, exponential and logarithm,
geodesic interpolation, tangent (dexp) maps and their derivatives.

All rotations are 3x3 orthonormal matrices with determinant one; axial
vectors live in R^3.  Everything here is a pure function on numpy arrays.
"""

import numpy as np

# branch guard for the principal logarithm
LOG_BRANCH_MARGIN = 1e-6
_SMALL_ANGLE = 1e-4
_SERIES_SWITCH = 1e-2


class BranchError(ValueError):
    """Rotation angle too close to pi for the principal log branch."""


class SkewError(ValueError):
    """Matrix handed to vee() is not skew-symmetric."""


def hat(v):
    """Map an axial vector to its skew-symmetric matrix: hat(v) @ w = v x w."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(S, tol=1e-10):
    """Inverse of hat().  Raises SkewError if the symmetric part exceeds tol."""
    S = np.asarray(S, dtype=float)
    sym = 0.5 * np.abs(S + S.T).max()
    if sym > tol:
        raise SkewError(f"symmetric part {sym:.3e} exceeds {tol:.1e}")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def _vee_unchecked(S):
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def is_rotation(R, tol=1e-12):
    R = np.asarray(R)
    if R.shape != (3, 3):
        return False
    return (np.abs(R.T @ R - np.eye(3)).max() <= tol
            and abs(np.linalg.det(R) - 1.0) <= tol)


def exp_so3(v):
    """Exponential map R^3 -> SO(3), Rodrigues form with small-angle series."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v)
    V = hat(v)
    if theta < _SMALL_ANGLE:
        t = theta * theta
        s = 1.0 - t / 6.0 + t * t / 120.0        # sin(theta)/theta
        c = 0.5 - t / 24.0 + t * t / 720.0       # (1-cos(theta))/theta^2
    else:
        s = np.sin(theta) / theta
        c = (1.0 - np.cos(theta)) / (theta * theta)
    return np.eye(3) + s * V + c * (V @ V)


def log_so3(R):
    """Principal logarithm SO(3) -> R^3.

    The axis comes from the skew part away from pi; in the band
    [pi-1e-3, pi-1e-6) it is extracted from the symmetric part, which
    stays well conditioned as sin(theta) -> 0.  Within 1e-6 of pi a
    BranchError is raised: the caller must refine its load step.
    """
    R = np.asarray(R, dtype=float)
    tr = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(tr)
    if theta >= np.pi - LOG_BRANCH_MARGIN:
        raise BranchError(f"rotation angle {theta:.12f} within "
                          f"{LOG_BRANCH_MARGIN:.0e} of pi")
    if theta < _SMALL_ANGLE:
        # theta/(2 sin theta) ~ 1/2 + theta^2/12
        w = 0.5 * (1.0 + theta * theta / 6.0) * _vee_unchecked(R - R.T)
        return w
    if theta < np.pi - 1e-3:
        return theta / (2.0 * np.sin(theta)) * _vee_unchecked(R - R.T)
    # near pi: axis^2 from the symmetric part, signs from off-diagonals
    c = np.cos(theta)
    u2 = np.clip((np.diag(R) - c) / (1.0 - c), 0.0, None)
    k = int(np.argmax(u2))
    u = np.zeros(3)
    u[k] = np.sqrt(u2[k])
    for j in range(3):
        if j != k:
            u[j] = (R[k, j] + R[j, k]) / (2.0 * (1.0 - c) * u[k])
    u /= np.linalg.norm(u)
    if np.dot(u, _vee_unchecked(R - R.T)) < 0.0:
        u = -u
    return theta * u


def geodesic(R1, R2, t):
    """Geodesic interpolation exp(t * log(R2 R1^t)) R1 on SO(3)."""
    psi = log_so3(np.asarray(R2) @ np.asarray(R1).T)
    return exp_so3(t * psi) @ R1


def so3_metric(U, V):
    """Bi-invariant metric (1/2) Tr(U^t V); equals the dot product of axial vectors."""
    return 0.5 * np.trace(np.asarray(U).T @ np.asarray(V))


# ---------------------------------------------------------------------------
# Tangent maps.  With theta = |psi| and t = theta^2 the coefficients are
#   dexp(psi)    = I + a(t) hat(psi) + b(t) hat(psi)^2
#   dexpinv(psi) = I - (1/2) hat(psi) + e(t) hat(psi)^2
# with a = (1-cos)/th^2, b = (th-sin)/th^3, e = (1 - (th/2)cot(th/2))/th^2.
# Their t-derivatives feed the analytic directional derivatives below.

def _coeff_a(t):
    if t < _SERIES_SWITCH ** 2:
        return 0.5 - t / 24.0 + t * t / 720.0 - t ** 3 / 40320.0
    th = np.sqrt(t)
    return (1.0 - np.cos(th)) / t


def _coeff_b(t):
    if t < _SERIES_SWITCH ** 2:
        return 1.0 / 6.0 - t / 120.0 + t * t / 5040.0 - t ** 3 / 362880.0
    th = np.sqrt(t)
    return (th - np.sin(th)) / (t * th)


def _coeff_e(t):
    if t < _SERIES_SWITCH ** 2:
        return 1.0 / 12.0 + t / 720.0 + t * t / 30240.0 + t ** 3 / 1209600.0
    th = np.sqrt(t)
    return (1.0 - 0.5 * th / np.tan(0.5 * th)) / t


def _dcoeff_a(t):
    if t < _SERIES_SWITCH ** 2:
        return -1.0 / 24.0 + t / 360.0 - t * t / 13440.0
    th = np.sqrt(t)
    da_dth = np.sin(th) / t - 2.0 * (1.0 - np.cos(th)) / (t * th)
    return da_dth / (2.0 * th)


def _dcoeff_b(t):
    if t < _SERIES_SWITCH ** 2:
        return -1.0 / 120.0 + t / 2520.0 - t * t / 120960.0
    th = np.sqrt(t)
    db_dth = (1.0 - np.cos(th)) / (t * th) - 3.0 * (th - np.sin(th)) / (t * t)
    return db_dth / (2.0 * th)


def _dcoeff_e(t):
    if t < _SERIES_SWITCH ** 2:
        return 1.0 / 720.0 + t / 15120.0 + t * t / 403200.0
    th = np.sqrt(t)
    cot = 1.0 / np.tan(0.5 * th)
    f = 0.5 * th * cot
    df_dth = 0.5 * cot - 0.25 * th * (1.0 + cot * cot)
    de_dth = -df_dth / t - 2.0 * (1.0 - f) / (t * th)
    return de_dth / (2.0 * th)


def dexp(psi):
    """Tangent of the exponential: exp(psi + d) ~ exp(dexp(psi) @ d) exp(psi)."""
    psi = np.asarray(psi, dtype=float)
    t = float(psi @ psi)
    P = hat(psi)
    return np.eye(3) + _coeff_a(t) * P + _coeff_b(t) * (P @ P)


def dexpinv(psi):
    """Inverse of dexp(psi), in closed form."""
    psi = np.asarray(psi, dtype=float)
    t = float(psi @ psi)
    P = hat(psi)
    return np.eye(3) - 0.5 * P + _coeff_e(t) * (P @ P)


def ddexp(psi, h):
    """Directional derivative of dexp at psi along h."""
    psi = np.asarray(psi, dtype=float)
    h = np.asarray(h, dtype=float)
    t = float(psi @ psi)
    tdot = 2.0 * float(psi @ h)
    P, H = hat(psi), hat(h)
    return (_dcoeff_a(t) * tdot * P + _coeff_a(t) * H
            + _dcoeff_b(t) * tdot * (P @ P)
            + _coeff_b(t) * (H @ P + P @ H))


def ddexpinv(psi, h):
    """Directional derivative of dexpinv at psi along h."""
    psi = np.asarray(psi, dtype=float)
    h = np.asarray(h, dtype=float)
    t = float(psi @ psi)
    tdot = 2.0 * float(psi @ h)
    P, H = hat(psi), hat(h)
    return (-0.5 * H + _dcoeff_e(t) * tdot * (P @ P)
            + _coeff_e(t) * (H @ P + P @ H))


# ---------------------------------------------------------------------------
# Vectorized variants operating on stacks of rotations/vectors.  These are
# numerically identical to the scalar functions above (same series
# switches) and exist so assembly can evaluate all elements at once.

def _where_coeff(t, series, closed):
    return np.where(t < _SERIES_SWITCH ** 2, series, closed)


def _a_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    closed = (1.0 - np.cos(th)) / ts
    series = 0.5 - t / 24.0 + t * t / 720.0 - t ** 3 / 40320.0
    return _where_coeff(t, series, closed)


def _b_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    closed = (th - np.sin(th)) / (ts * th)
    series = 1.0 / 6.0 - t / 120.0 + t * t / 5040.0 - t ** 3 / 362880.0
    return _where_coeff(t, series, closed)


def _e_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    closed = (1.0 - 0.5 * th / np.tan(0.5 * th)) / ts
    series = 1.0 / 12.0 + t / 720.0 + t * t / 30240.0 + t ** 3 / 1209600.0
    return _where_coeff(t, series, closed)


def _da_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    closed = (np.sin(th) / ts - 2.0 * (1.0 - np.cos(th)) / (ts * th)) / (2.0 * th)
    series = -1.0 / 24.0 + t / 360.0 - t * t / 13440.0
    return _where_coeff(t, series, closed)


def _db_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    closed = ((1.0 - np.cos(th)) / (ts * th)
              - 3.0 * (th - np.sin(th)) / (ts * ts)) / (2.0 * th)
    series = -1.0 / 120.0 + t / 2520.0 - t * t / 120960.0
    return _where_coeff(t, series, closed)


def _de_arr(t):
    ts = np.where(t > 0.0, t, 1.0)
    th = np.sqrt(ts)
    cot = 1.0 / np.tan(0.5 * th)
    f = 0.5 * th * cot
    df = 0.5 * cot - 0.25 * th * (1.0 + cot * cot)
    closed = (-df / ts - 2.0 * (1.0 - f) / (ts * th)) / (2.0 * th)
    series = 1.0 / 720.0 + t / 15120.0 + t * t / 403200.0
    return _where_coeff(t, series, closed)


def hat_many(v):
    """(...,3) -> (...,3,3)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee_many(S):
    return np.stack([S[..., 2, 1], S[..., 0, 2], S[..., 1, 0]], axis=-1)


def exp_many(v):
    """Stacked exponential map, same branches as exp_so3."""
    v = np.asarray(v, dtype=float)
    t = np.einsum("...i,...i->...", v, v)
    th = np.sqrt(t)
    ts = np.where(t > 0.0, t, 1.0)
    ths = np.sqrt(ts)
    s = np.where(th < _SMALL_ANGLE,
                 1.0 - t / 6.0 + t * t / 120.0,
                 np.sin(ths) / ths)
    c = np.where(th < _SMALL_ANGLE,
                 0.5 - t / 24.0 + t * t / 720.0,
                 (1.0 - np.cos(ths)) / ts)
    V = hat_many(v)
    return (np.eye(3) + s[..., None, None] * V
            + c[..., None, None] * (V @ V))


def log_many(R):
    """Stacked principal logarithm; rows with angle in the near-pi band
    fall back to the scalar routine (which may raise BranchError)."""
    R = np.asarray(R, dtype=float)
    tr = np.clip((np.trace(R, axis1=-2, axis2=-1) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(tr)
    skew = vee_many(R - np.swapaxes(R, -1, -2))
    t = theta * theta
    small = 0.5 * (1.0 + t / 6.0)
    thsafe = np.where(theta > 0.0, theta, 1.0)
    mid = thsafe / (2.0 * np.sin(np.where(theta >= _SMALL_ANGLE, thsafe, 1.0)))
    coef = np.where(theta < _SMALL_ANGLE, small, mid)
    out = coef[..., None] * skew
    near = theta >= np.pi - 1e-3
    if np.any(near):
        idx = np.argwhere(near)
        for ix in idx:
            out[tuple(ix)] = log_so3(R[tuple(ix)])
    return out


def dexp_many(psi):
    psi = np.asarray(psi, dtype=float)
    t = np.einsum("...i,...i->...", psi, psi)
    P = hat_many(psi)
    return (np.eye(3) + _a_arr(t)[..., None, None] * P
            + _b_arr(t)[..., None, None] * (P @ P))


def dexpinv_many(psi):
    psi = np.asarray(psi, dtype=float)
    t = np.einsum("...i,...i->...", psi, psi)
    P = hat_many(psi)
    return (np.eye(3) - 0.5 * P + _e_arr(t)[..., None, None] * (P @ P))
