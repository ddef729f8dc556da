"""Lift a closed sphere curve to a periodic SU(2) frame and its NLS invariant.

Pipeline: pointwise eigenvector frame F -> diagonal gauge making the
connection off-diagonal -> period transport (normal holonomy c0, branch
sign) -> periodic frame f~ and periodic invariant q~0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import su2
from .curves import CurveState
from .errors import (
    GaugeResidual,
    NonDiagonalMonodromy,
    NoSafeRotation,
    SingularPoint,
)
from .spectral import TWO_PI, PeriodicGrid

EPS_SINGULAR = 1e-6
SAFE_RADIUS = 0.1
_SINGULAR_DIR = np.array([-1.0, 0.0, 0.0])


@dataclass
class LiftResult:
    """Periodic frame data extracted from a closed curve at t = 0."""

    grid: PeriodicGrid
    frame_tilde: np.ndarray      # (n, 2, 2) SU(2); periodic if branch_sign=+1, antiperiodic if -1
    q0_tilde: np.ndarray         # (n,) complex, periodic invariant samples
    c0: float                    # normal holonomy, projective branch in (-1/2, 1/2]
    branch_sign: int             # +1 periodic frame, -1 antiperiodic
    monodromy: np.ndarray        # (2, 2) period-transport matrix f(0)^-1 f(2*pi)
    rotation: np.ndarray | None = None   # singularity-avoidance rotation applied internally
    gauge_residual: float = 0.0
    roundtrip_error: float = 0.0

    @property
    def lambda0(self) -> float:
        """Spectral parameter of the frame connection: f~^-1 f~_x = a*lambda0 + u(q~0)."""
        return -self.c0


def diagonalizing_frame(points: np.ndarray, eps_singular: float = EPS_SINGULAR) -> np.ndarray:
    """Pointwise SU(2) frame F with F a F^-1 = to_algebra(p).

    Closed-form eigenvector matrix; continuous in p away from r1 = -1,
    where it has no limit.
    """
    p = np.asarray(points, dtype=float)
    r1, r2, r3 = p[..., 0], p[..., 1], p[..., 2]
    if np.any(r1 <= -1.0 + eps_singular):
        worst = float(np.min(r1))
        raise SingularPoint(f"r1 = {worst:.6f} too close to -1 (eps = {eps_singular:.1e})")
    diag = np.sqrt((1.0 + r1) / 2.0)
    off = (1j / np.sqrt(2.0)) * (r2 + 1j * r3) / np.sqrt(1.0 + r1)
    out = np.empty(p.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = diag
    out[..., 0, 1] = off
    out[..., 1, 0] = -np.conj(off)
    out[..., 1, 1] = diag
    return out


def _fibonacci_sphere(m: int) -> np.ndarray:
    i = np.arange(m) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / m)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=1
    )


def avoid_singularity(curve: CurveState, radius: float = SAFE_RADIUS) -> tuple[np.ndarray, CurveState]:
    """Rotate the curve away from (-1, 0, 0) if any sample comes within `radius`.

    Returns (g, rotated curve) where g is the SU(2) rotation applied; g = I
    when the curve is already safe. The direction of the sphere farthest
    from all samples is sent to -x.
    """
    pts = curve.points
    dist = np.linalg.norm(pts - _SINGULAR_DIR, axis=1)
    if float(np.min(dist)) >= radius:
        return su2.IDENTITY.copy(), curve
    candidates = _fibonacci_sphere(4096)
    # min distance from each candidate direction to the sampled curve
    d2 = np.min(np.linalg.norm(candidates[:, None, :] - pts[None, :, :], axis=2), axis=1)
    best = int(np.argmax(d2))
    if d2[best] < radius:
        raise NoSafeRotation(f"curve is {radius}-dense on the sphere (max gap {d2[best]:.3f})")
    g = su2.rotation_taking(candidates[best], _SINGULAR_DIR)
    rotated = su2.from_algebra(su2.conjugate(g, su2.to_algebra(pts)))
    return g, CurveState(curve.grid, rotated, curve.time)


def gauge_offdiagonal(frames: np.ndarray, grid: PeriodicGrid,
                      residual_tol: float = 1e-6):
    """Diagonal gauge f = F k with f^-1 f_x off-diagonal.

    The diagonal part d = diag(i*theta, -i*theta) of F^-1 F_x (spectral
    derivative) is removed by k = exp(-int_0^x d); the integral is the
    spectral antiderivative of the zero-mean part plus the exact linear
    term, so k is exact for resolved data.

    Returns (f, q0, theta_mean, theta_periodic) where q0 are the invariant
    samples and theta_* reconstruct the gauge integral.
    """
    fx = grid.derivative(frames)
    conn = su2.dagger(frames) @ fx
    # traceless skew-Hermitian diagonal: residual measures departure from that
    theta = 0.5 * (conn[:, 0, 0].imag - conn[:, 1, 1].imag)
    residual = max(
        float(np.max(np.abs(conn[:, 0, 0] - 1j * theta))),
        float(np.max(np.abs(conn[:, 1, 1] + 1j * theta))),
    )
    if residual > residual_tol:
        raise GaugeResidual(
            f"diagonal gauge residual {residual:.3e} > {residual_tol:.1e} "
            "(curve under-resolved?)"
        )
    big_theta = grid.antiderivative(theta)
    phase = np.exp(-1j * big_theta)
    f = frames.copy()
    f[:, :, 0] *= phase[:, None]
    f[:, :, 1] *= np.conj(phase)[:, None]
    q0 = conn[:, 0, 1] * np.exp(2j * big_theta)
    theta_mean = float(np.mean(theta))
    theta_periodic = big_theta - theta_mean * grid.x
    return f, q0, theta_mean, theta_periodic, residual


def _branch_from_angle(mu: float) -> tuple[float, int]:
    """Map a monodromy angle (mod 2*pi) to the projective branch c0 in (-1/2, 1/2]."""
    mu = np.angle(np.exp(1j * mu))  # principal (-pi, pi]
    if -np.pi / 2 < mu <= np.pi / 2:
        return mu / np.pi, 1
    c0 = (mu - np.pi) / np.pi if mu > 0 else (mu + np.pi) / np.pi
    return c0, -1


def holonomy(f: np.ndarray, q0: np.ndarray, grid: PeriodicGrid,
             theta_mean: float, theta_periodic: np.ndarray,
             diag_tol: float = 1e-6):
    """Period transport M = f(0)^-1 f(2*pi), branch sign and holonomy c0.

    f(2*pi) is reached by one RK4 step from x_{n-1} through the off-diagonal
    connection (midpoint samples from the gauge data), never by wrapping
    f(0). c0 itself comes from the exact gauge integral over the period,
    which the RK4 transport must reproduce: a non-diagonal or inconsistent
    M flags a non-closed or under-resolved curve.
    """
    n, h = grid.n, grid.dx

    def u_of(q):
        out = np.zeros((2, 2), dtype=complex)
        out[0, 1] = q
        out[1, 0] = -np.conj(q)
        return out

    # q0(x) = A01(x) * exp(2i Theta(x)); A01 and theta_periodic are periodic,
    # so q0 extends past the seam analytically
    a01 = q0 * np.exp(-2j * (theta_periodic + theta_mean * grid.x))
    a01_mid = grid.shift(a01, 0.5 * h)[-1]
    th_mid = grid.shift(theta_periodic, 0.5 * h)[-1]
    x_mid = grid.x[-1] + 0.5 * h
    q_mid = a01_mid * np.exp(2j * (th_mid + theta_mean * x_mid))
    q_end = a01[0] * np.exp(2j * (theta_periodic[0] + theta_mean * TWO_PI))

    e = f[-1]
    k1 = e @ u_of(q0[-1])
    k2 = (e + 0.5 * h * k1) @ u_of(q_mid)
    k3 = (e + 0.5 * h * k2) @ u_of(q_mid)
    k4 = (e + h * k3) @ u_of(q_end)
    f_end = e + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    m = su2.dagger(f[0]) @ f_end
    offdiag = max(abs(m[0, 1]), abs(m[1, 0]))
    if offdiag > diag_tol:
        raise NonDiagonalMonodromy(
            f"period transport off-diagonal {offdiag:.3e} > {diag_tol:.1e}"
        )
    # exact transport from the gauge integral: M = exp(-2*pi*theta_mean * diag(i,-i))
    mu_exact = -TWO_PI * theta_mean
    if abs(np.angle(m[0, 0] * np.exp(-1j * mu_exact))) > diag_tol * 10 + 1e-8:
        raise NonDiagonalMonodromy(
            "RK4 period transport disagrees with the exact gauge integral "
            f"(angles {np.angle(m[0, 0]):.6f} vs {np.angle(np.exp(1j * mu_exact)):.6f})"
        )
    c0, sign = _branch_from_angle(mu_exact)
    return c0, sign, m


def periodic_gauge(f: np.ndarray, q0: np.ndarray, c0: float, branch_sign: int,
                   grid: PeriodicGrid, monodromy: np.ndarray,
                   rotation: np.ndarray | None = None) -> LiftResult:
    """f~ = f exp(-c0 a x), q~0 = q0 exp(i c0 x)."""
    phase = np.exp(-0.5j * c0 * grid.x)
    frame = f.copy()
    frame[:, :, 0] *= phase[:, None]
    frame[:, :, 1] *= np.conj(phase)[:, None]
    q0_tilde = q0 * np.exp(1j * c0 * grid.x)
    return LiftResult(
        grid=grid,
        frame_tilde=frame,
        q0_tilde=q0_tilde,
        c0=c0,
        branch_sign=branch_sign,
        monodromy=monodromy,
        rotation=rotation,
    )


def lift_curve(curve: CurveState, auto_rotate: bool = True) -> LiftResult:
    """Full lift: eigenvector frame, off-diagonal gauge, holonomy, periodic gauge.

    If the curve approaches the frame singularity it is rotated internally
    and the resulting frame is rotated back, so frame_tilde always
    conjugates a onto the *input* curve.
    """
    grid = curve.grid
    if auto_rotate:
        g_rot, work = avoid_singularity(curve)
        rotated = not np.allclose(g_rot, su2.IDENTITY)
    else:
        g_rot, work, rotated = su2.IDENTITY.copy(), curve, False

    frames = diagonalizing_frame(work.points)
    f, q0, theta_mean, theta_periodic, residual = gauge_offdiagonal(frames, grid)
    c0, sign, monodromy = holonomy(f, q0, grid, theta_mean, theta_periodic)
    result = periodic_gauge(f, q0, c0, sign, grid, monodromy,
                            rotation=g_rot if rotated else None)
    if rotated:
        result.frame_tilde = su2.dagger(g_rot) @ result.frame_tilde
    result.gauge_residual = residual

    gamma_back = su2.from_algebra(su2.conjugate(result.frame_tilde, su2.BASIS_A))
    result.roundtrip_error = float(np.max(np.abs(gamma_back - curve.points)))
    if result.roundtrip_error > 1e-8:
        raise GaugeResidual(
            f"frame round trip error {result.roundtrip_error:.3e} > 1e-8"
        )
    return result


def shift_branch(lift: LiftResult, dk: int = 1) -> LiftResult:
    """Move to the holonomy branch (c0 + dk, sign * (-1)^dk).

    Both branches reconstruct the same curve; the projective default keeps
    |lambda0| minimal.
    """
    grid = lift.grid
    phase = np.exp(-0.5j * dk * grid.x)
    frame = lift.frame_tilde.copy()
    frame[:, :, 0] *= phase[:, None]
    frame[:, :, 1] *= np.conj(phase)[:, None]
    return LiftResult(
        grid=grid,
        frame_tilde=frame,
        q0_tilde=lift.q0_tilde * np.exp(1j * dk * grid.x),
        c0=lift.c0 + dk,
        branch_sign=lift.branch_sign * (-1) ** abs(dk),
        monodromy=lift.monodromy,
        rotation=lift.rotation,
        gauge_residual=lift.gauge_residual,
        roundtrip_error=lift.roundtrip_error,
    )
