"""Exact su(2)/SU(2) algebra on batched 2x2 complex arrays.

The identification of R^3 with su(2) uses the basis

    a = [[i/2, 0], [0, -i/2]],  b = [[0, 1/2], [-1/2, 0]],  c = [[0, i/2], [i/2, 0]],

so (r1, r2, r3) <-> r1*a + r2*b + r3*c. Under this basis the commutator is
the cross product ([a,b] = c, [b,c] = a, [c,a] = b) and conjugation by a
group element acts as the corresponding rotation. Algebra elements are
carried as coefficient triples (..., 3); matrices are materialized on
demand. All functions broadcast over leading axes and are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

BASIS_A = np.array([[0.5j, 0.0], [0.0, -0.5j]])
BASIS_B = np.array([[0.0, 0.5], [-0.5, 0.0]])
BASIS_C = np.array([[0.0, 0.5j], [0.5j, 0.0]])
IDENTITY = np.eye(2, dtype=complex)


class NotInAlgebra(NumericalError):
    """Matrix is not traceless skew-Hermitian within tolerance."""


def to_algebra(v: np.ndarray) -> np.ndarray:
    """Map coefficient triples (..., 3) to su(2) matrices (..., 2, 2)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (2, 2), dtype=complex)
    r1, r2, r3 = v[..., 0], v[..., 1], v[..., 2]
    out[..., 0, 0] = 0.5j * r1
    out[..., 0, 1] = 0.5 * (r2 + 1j * r3)
    out[..., 1, 0] = 0.5 * (-r2 + 1j * r3)
    out[..., 1, 1] = -0.5j * r1
    return out


def from_algebra(x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Inverse of to_algebra; raises NotInAlgebra on non-su(2) input."""
    x = np.asarray(x, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)
    trace = np.abs(x[..., 0, 0] + x[..., 1, 1])
    herm = x + np.conj(np.swapaxes(x, -1, -2))
    defect = max(float(np.max(trace)), float(np.max(np.abs(herm))))
    if defect > tol * scale:
        raise NotInAlgebra(f"trace/Hermitian-part defect {defect:.3e} exceeds {tol:.1e}")
    out = np.empty(x.shape[:-2] + (3,), dtype=float)
    out[..., 0] = 2.0 * x[..., 0, 0].imag
    out[..., 1] = 2.0 * x[..., 0, 1].real
    out[..., 2] = 2.0 * x[..., 0, 1].imag
    return out


def skew_part(x: np.ndarray) -> np.ndarray:
    """Traceless skew-Hermitian projection of a 2x2 matrix stack."""
    s = 0.5 * (x - np.conj(np.swapaxes(x, -1, -2)))
    tr = 0.5 * (s[..., 0, 0] + s[..., 1, 1])
    s = s.copy()
    s[..., 0, 0] -= tr
    s[..., 1, 1] -= tr
    return s


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix commutator [x, y] = xy - yx."""
    return x @ y - y @ x


def det2(g: np.ndarray) -> np.ndarray:
    return g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]


def inv2(g: np.ndarray) -> np.ndarray:
    """Closed-form inverse of a 2x2 matrix stack."""
    out = np.empty_like(np.asarray(g, dtype=complex))
    out[..., 0, 0] = g[..., 1, 1]
    out[..., 0, 1] = -g[..., 0, 1]
    out[..., 1, 0] = -g[..., 1, 0]
    out[..., 1, 1] = g[..., 0, 0]
    return out / det2(g)[..., None, None]


def dagger(g: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(g, -1, -2))


def conjugate(g: np.ndarray, x: np.ndarray, unitary: bool = True) -> np.ndarray:
    """g x g^-1 (adjoint action); uses g* for the inverse when unitary."""
    ginv = dagger(g) if unitary else inv2(g)
    return g @ x @ ginv


def exp_algebra(v: np.ndarray) -> np.ndarray:
    """Closed-form exp of the algebra element with coefficients v.

    With theta = |v|: exp = cos(theta/2) I + sinc(theta/2) * to_algebra(v),
    where sinc(y) = sin(y)/y; np.sinc handles the theta -> 0 limit with full
    accuracy, replacing an explicit Taylor branch.
    """
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    cos = np.cos(0.5 * theta)
    sinc = np.sinc(theta / (2.0 * np.pi))  # sin(theta/2)/(theta/2)
    out = sinc[..., None, None] * to_algebra(v)
    out[..., 0, 0] += cos
    out[..., 1, 1] += cos
    return out


def unitary_defect(g: np.ndarray) -> float:
    """max |g* g - I| over the stack."""
    h = dagger(g) @ g
    h[..., 0, 0] -= 1.0
    h[..., 1, 1] -= 1.0
    return float(np.max(np.abs(h)))


def det_defect(g: np.ndarray) -> float:
    return float(np.max(np.abs(det2(g) - 1.0)))


def nearest_su2(g: np.ndarray) -> np.ndarray:
    """Polar projection to the nearest unitary, then det renormalized to 1.

    H = g*g is Hermitian positive definite; sqrt(H) and its inverse come
    from the 2x2 Cayley-Hamilton closed form, so the whole stack projects
    without an eigendecomposition.
    """
    g = np.asarray(g, dtype=complex)
    h = dagger(g) @ g
    tr = (h[..., 0, 0] + h[..., 1, 1]).real
    dt = det2(h).real
    s = np.sqrt(dt)
    tau = np.sqrt(tr + 2.0 * s)
    # H^(-1/2) = ((tr H + s) I - H) / (tau * s)
    inv_sqrt = -h
    inv_sqrt[..., 0, 0] += tr + s
    inv_sqrt[..., 1, 1] += tr + s
    inv_sqrt = inv_sqrt / (tau * s)[..., None, None]
    u = g @ inv_sqrt
    return u / np.sqrt(det2(u))[..., None, None]


def renorm_det(g: np.ndarray) -> np.ndarray:
    """Divide by sqrt(det); keeps SL(2,C) frames on the det = 1 slice."""
    return g / np.sqrt(det2(g))[..., None, None]


def rotation_taking(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """SU(2) element whose adjoint rotation maps unit vector p to unit vector q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    axis = np.cross(p, q)
    norm = np.linalg.norm(axis)
    dot = float(np.clip(np.dot(p, q), -1.0, 1.0))
    if norm < 1e-14:
        if dot > 0.0:
            return IDENTITY.copy()
        # antipodal: rotate by pi about any axis orthogonal to p
        trial = np.array([1.0, 0.0, 0.0])
        if abs(p[0]) > 0.9:
            trial = np.array([0.0, 1.0, 0.0])
        axis = np.cross(p, trial)
        axis /= np.linalg.norm(axis)
        return exp_algebra(np.pi * axis)
    angle = np.arctan2(norm, dot)
    return exp_algebra(angle * axis / norm)


def su2_from_frame(u0: np.ndarray, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """SU(2) element g with g a g^-1, g b g^-1, g c g^-1 mapping to (u0, u1, u2).

    (u0, u1, u2) must be a right-handed orthonormal triple. Determined up to
    sign; conjugation is insensitive to the choice.
    """
    g1 = rotation_taking(np.array([1.0, 0.0, 0.0]), u0)
    n_trial = from_algebra(conjugate(g1, BASIS_B))
    # residual rotation about u0 aligning the normal pair
    psi = np.arctan2(np.dot(u0, np.cross(n_trial, u1)), np.dot(n_trial, u1))
    return exp_algebra(psi * np.asarray(u0, dtype=float)) @ g1


def random_su2(rng: np.random.Generator, size: tuple = ()) -> np.ndarray:
    """Haar-ish random SU(2) elements for tests (exp of a random triple)."""
    v = rng.normal(size=size + (3,)) * np.pi
    return exp_algebra(v)
