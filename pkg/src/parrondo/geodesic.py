"""One-round games along geodesics of projective Hilbert space.

Two unit wavefunctions ``psi`` and ``xi`` are joined by the minimizing
great circle; an effect operator ``eta`` gives the winning probability
``<eta g, g>`` at each point ``g`` of it.  Everything reduces to the 2x2
Hermitian matrix ``B`` of ``eta`` on the span of ``psi`` and the
phase-aligned ``xi``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, random_unitary

__all__ = [
    "BMatrix",
    "as_wavefunction",
    "as_effect",
    "dist_round",
    "dist_trace",
    "phase_align",
    "geodesic_point",
    "build_B",
    "geo_prob",
    "geo_bounds",
    "achieve_extreme",
    "no_paradox_check",
    "random_effect",
    "random_wavefunction",
]

NORM_ATOL = 1e-12
EFFECT_ATOL = 1e-10
ORTHO_FLOOR = 1e-14


def as_wavefunction(psi, atol=NORM_ATOL):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size == 0 or abs(np.linalg.norm(psi) - 1) > atol:
        raise ValidationError("wavefunction must have unit norm")
    return psi


def as_effect(eta, atol=EFFECT_ATOL):
    """Check ``0 <= eta <= I`` through the eigenvalues."""
    eta = np.asarray(eta, dtype=complex)
    if eta.ndim != 2 or eta.shape[0] != eta.shape[1]:
        raise ValidationError("effect must be a square matrix")
    if np.abs(eta - eta.conj().T).max() > atol:
        raise ValidationError("effect must be Hermitian")
    ev = np.linalg.eigvalsh(eta)
    if ev.min() < -atol or ev.max() > 1 + atol:
        raise ValidationError(
            f"effect eigenvalues [{ev.min():.3g}, {ev.max():.3g}] leave [0, 1]")
    return eta


def _overlap(psi, xi):
    return np.vdot(psi, xi)


def dist_round(psi, xi):
    """Angle ``arccos |<psi, xi>|`` in [0, pi/2]."""
    c = abs(_overlap(as_wavefunction(psi), as_wavefunction(xi)))
    return float(np.arccos(min(c, 1.0)))


def dist_trace(psi, xi):
    """Trace-norm distance of the two rank-one projectors."""
    c = abs(_overlap(as_wavefunction(psi), as_wavefunction(xi)))
    return float(2 * np.sqrt(max(0.0, 1 - c * c)))


def phase_align(psi, xi):
    """Representative of ``[xi]`` with real nonnegative overlap with ``psi``.

    Orthogonal pairs (overlap below 1e-14) keep ``xi`` unchanged.
    """
    psi, xi = as_wavefunction(psi), as_wavefunction(xi)
    ov = _overlap(xi, psi)
    if abs(ov) < ORTHO_FLOOR:
        return xi.copy()
    return (ov / abs(ov)) * xi


def geodesic_point(psi, xi, theta):
    """Point at arc length ``theta`` from ``psi`` towards ``[xi]``."""
    psi = as_wavefunction(psi)
    xh = phase_align(psi, xi)
    delta = dist_round(psi, xh)
    if delta < 1e-12:
        raise ValidationError("endpoints are phase-equivalent")
    if not -1e-12 <= theta <= delta + 1e-12:
        raise ValidationError(f"theta={theta} outside [0, {delta}]")
    perp = xh - np.vdot(psi, xh) * psi
    perp /= np.linalg.norm(perp)
    return np.cos(theta) * psi + np.sin(theta) * perp


@dataclass(frozen=True)
class BMatrix:
    """Restriction of an effect to the geodesic plane, with its angle.

    Admissible when ``0 <= B <= [[1, cos delta], [cos delta, 1]]``.
    """

    B: np.ndarray
    delta: float

    def __post_init__(self):
        B = np.asarray(self.B, dtype=complex)
        if B.shape != (2, 2) or np.abs(B - B.conj().T).max() > EFFECT_ATOL:
            raise ValidationError("B must be a Hermitian 2x2 matrix")
        if not -1e-12 <= self.delta <= np.pi / 2 + 1e-12:
            raise ValidationError("delta must lie in [0, pi/2]")
        c = np.cos(self.delta)
        top = np.array([[1, c], [c, 1]])
        if (np.linalg.eigvalsh(B).min() < -EFFECT_ATOL
                or np.linalg.eigvalsh(top - B).min() < -EFFECT_ATOL):
            raise ValidationError("B is outside the admissible order interval")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "delta", float(self.delta))


def build_B(eta, psi, xi):
    """Matrix of ``<eta x_j, x_k>`` over ``x = (psi, phase_align(psi, xi))``."""
    eta = as_effect(eta)
    psi = as_wavefunction(psi)
    xh = phase_align(psi, xi)
    if eta.shape[0] != psi.size or psi.size != xh.size:
        raise ValidationError("dimensions of eta, psi and xi differ")
    X = np.column_stack([psi, xh])
    B = X.T @ eta.T @ X.conj()
    return BMatrix(0.5 * (B + B.conj().T), dist_round(psi, xh))


def geo_prob(B, theta):
    """Winning probability at arc length ``theta`` on the geodesic."""
    if not isinstance(B, BMatrix):
        raise ValidationError("expected a BMatrix")
    d = B.delta
    if d < 1e-12:
        raise ValidationError("geodesic of zero length")
    if not -1e-12 <= theta <= d + 1e-12:
        raise ValidationError(f"theta={theta} outside [0, {d}]")
    s = np.array([np.sin(d - theta), np.sin(theta)])
    return float((s @ B.B @ s).real / np.sin(d) ** 2)


def geo_bounds(P_A, P_Aprime):
    """Closed range of geodesic winning probabilities."""
    for v in (P_A, P_Aprime):
        if not 0 <= v <= 1:
            raise ValidationError("probabilities must lie in [0, 1]")
    return max(0.0, P_A + P_Aprime - 1), min(P_A + P_Aprime, 1.0)


def achieve_extreme(P_A, P_Aprime, which):
    """Admissible ``B``, angle and arc position attaining a bound.

    Parameters
    ----------
    P_A, P_Aprime : float
        Diagonal of ``B``, in the open interval (0, 1).
    which : {"min", "max"}

    Returns
    -------
    B : BMatrix
    delta0, theta0 : float
    """
    b1, b2 = float(P_A), float(P_Aprime)
    if not (0 < b1 < 1 and 0 < b2 < 1):
        raise ValidationError(
            "achieve_extreme needs both probabilities strictly inside (0, 1)")
    if which not in ("min", "max"):
        raise ValidationError("which must be 'min' or 'max'")
    low = b1 + b2 <= 1
    r = np.sqrt(b1 * b2)
    q = np.sqrt((1 - b1) * (1 - b2))
    if which == "max":
        off = r
        if low:
            cd, st = 0.0, np.sqrt(b2 / (b1 + b2))
        else:
            cd, st = r - q, np.sqrt(1 - b1)
    else:
        if low:
            cd, st = q - r, np.sqrt(b1)
        else:
            cd, st = 0.0, np.sqrt((1 - b2) / (2 - b1 - b2))
        off = cd - q
    delta = float(np.arccos(np.clip(cd, 0.0, 1.0)))
    theta = float(np.arcsin(np.clip(st, 0.0, 1.0)))
    return BMatrix(np.array([[b1, off], [off, b2]]), delta), delta, theta


def no_paradox_check(C):
    """True when the trace of the 2x2 effect restriction is at most one,
    which rules out the paradox on that plane."""
    C = as_effect(C)
    if C.shape != (2, 2):
        raise ValidationError("restriction must be 2x2")
    return bool(np.trace(C).real <= 1 + 1e-12)


def random_effect(rng, dim):
    W = random_unitary(rng, dim)
    return (W * rng.random(dim)) @ W.conj().T


def random_wavefunction(rng, dim):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)
