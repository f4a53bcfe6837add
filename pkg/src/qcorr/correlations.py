"""Quantum correlation measures for two qubits.

Three measures, each in a closed X-state form and (for the geometric ones)
a general Bloch form:

* GMOD, the geometric measure of quantum discord: squared Hilbert-Schmidt
  distance to the closest zero-discord state, minimised over measurements on
  qubit A.
* MIN, the measurement-induced nonlocality: the same distance maximised over
  measurements on A that preserve the reduced state of A.
* Concurrence (entanglement), in the standard X-state form.

``min_xstate`` applies the three-way minimum unconditionally, which is the
published X-state variant this package audits.  ``min_general`` follows the
measure's definition and branches on the local Bloch vector: for x != 0 the
A measurement is pinned to the eigenbasis of the reduced state, for x = 0 it
is free and the smallest eigenvalue of T T^t is removed.  The two agree
exactly when x = 0 and can differ otherwise; the claims audit quantifies the
gap.  Enum tag strings double as output column prefixes and are part of the
CSV contract.
"""

from __future__ import annotations

import math
import warnings
from enum import Enum

import numpy as np

from .qstate import XState, bloch_decompose

# Local-Bloch-vector branch threshold for min_general, with a warning window
# just below it where the two branches can differ discontinuously.
BLOCH_BRANCH_EPS = 1e-9
BLOCH_WARN_FLOOR = 1e-12

# Off-diagonal convergence threshold of the Jacobi eigensolver, relative to
# the Frobenius norm of the input.
JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 50


class Measure(str, Enum):
    """Sweepable measure tags.

    The values are stable identifiers used as CSV column prefixes:
    ``min_paper`` is the unconditional X-state MIN variant under audit,
    ``min_general`` the branch-selecting general form.
    """

    GMOD = "gmod"
    GMOD_GENERAL = "gmod_general"
    MIN_PAPER = "min_paper"
    MIN_GENERAL = "min_general"
    CONCURRENCE = "concurrence"


# ---------------------------------------------------------------------------
# Element-level closed forms (vectorised; scalars or equal-shape arrays)
# ---------------------------------------------------------------------------

def gmod_candidates(a, b, c, d, w_abs, z_abs):
    """The three subtraction candidates of the X-state GMOD form, stacked:
    2(a-c)^2 + 2(b-d)^2, 4(|w|-|z|)^2, 4(|w|+|z|)^2 (the largest wins)."""
    first = 2.0 * (a - c) ** 2 + 2.0 * (b - d) ** 2
    return np.stack(
        [
            first + np.zeros_like(np.asarray(w_abs, dtype=float)),
            4.0 * (w_abs - z_abs) ** 2,
            4.0 * (w_abs + z_abs) ** 2,
        ]
    )


def gmod_from_elements(a, b, c, d, w_abs, z_abs):
    """X-state GMOD: (2(a-c)^2 + 2(b-d)^2 + 8(|w|^2+|z|^2) - max) / 4."""
    first = 2.0 * (a - c) ** 2 + 2.0 * (b - d) ** 2
    total = first + 8.0 * (w_abs**2 + z_abs**2)
    biggest = np.maximum(first, 4.0 * (w_abs + z_abs) ** 2)
    biggest = np.maximum(biggest, 4.0 * (w_abs - z_abs) ** 2)
    return 0.25 * (total - biggest)


def min_candidates(a, b, c, d, w_abs, z_abs):
    """The three minimum candidates of the X-state MIN form, stacked:
    (a-b-c+d)^2/4, (|w|-|z|)^2, (|w|+|z|)^2 (the smallest wins)."""
    t33 = a - b - c + d
    return np.stack(
        [
            0.25 * t33**2 + np.zeros_like(np.asarray(w_abs, dtype=float)),
            (w_abs - z_abs) ** 2,
            (w_abs + z_abs) ** 2,
        ]
    )


def min_from_elements(a, b, c, d, w_abs, z_abs):
    """Unconditional X-state MIN:
    ((a-b-c+d)^2 + 8(|w|^2+|z|^2) - 4 min) / 4."""
    t33 = a - b - c + d
    smallest = np.minimum(0.25 * t33**2, (w_abs - z_abs) ** 2)
    smallest = np.minimum(smallest, (w_abs + z_abs) ** 2)
    return 0.25 * (t33**2 + 8.0 * (w_abs**2 + z_abs**2) - 4.0 * smallest)


def concurrence_candidates(a, b, c, d, w_abs, z_abs):
    """Concurrence max candidates, stacked: 0, |w|-sqrt(bc), |z|-sqrt(ad)."""
    bc = np.sqrt(np.maximum(b * c, 0.0))
    ad = np.sqrt(np.maximum(a * d, 0.0))
    return np.stack(
        [np.zeros_like(np.asarray(w_abs, dtype=float)), w_abs - bc, z_abs - ad]
    )


def concurrence_from_elements(a, b, c, d, w_abs, z_abs):
    """X-state concurrence: 2 max(0, |w|-sqrt(bc), |z|-sqrt(ad))."""
    bc = np.sqrt(np.maximum(b * c, 0.0))
    ad = np.sqrt(np.maximum(a * d, 0.0))
    return 2.0 * np.maximum(0.0, np.maximum(w_abs - bc, z_abs - ad))


# ---------------------------------------------------------------------------
# XState wrappers
# ---------------------------------------------------------------------------

def gmod_xstate(state: XState) -> float:
    """Geometric discord of an X state (closed form)."""
    return float(gmod_from_elements(state.a, state.b, state.c, state.d, abs(state.w), abs(state.z)))


def min_xstate(state: XState) -> float:
    """Measurement-induced nonlocality of an X state, applying the three-way
    minimum unconditionally (the audited published variant; equals
    ``min_general`` whenever the local Bloch vector of A vanishes)."""
    return float(min_from_elements(state.a, state.b, state.c, state.d, abs(state.w), abs(state.z)))


def concurrence_xstate(state: XState) -> float:
    """Concurrence of an X state."""
    return float(concurrence_from_elements(state.a, state.b, state.c, state.d, abs(state.w), abs(state.z)))


# ---------------------------------------------------------------------------
# 3x3 symmetric eigensolver (cyclic Jacobi)
# ---------------------------------------------------------------------------

def sym3_eigenvalues(mat) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 matrix, descending.

    Cyclic Jacobi rotations, iterated until every off-diagonal entry falls
    below 1e-14 relative to the Frobenius norm.  Chosen over the closed-form
    trigonometric solution for accuracy near degenerate eigenvalues.
    """
    a = np.asarray(mat, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    if float(np.max(np.abs(a - a.T))) > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(3)
    threshold = JACOBI_TOL * scale
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = max(abs(a[0, 1]), abs(a[0, 2]), abs(a[1, 2]))
        if off <= threshold:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if abs(apq) <= threshold * 1e-2:
                continue
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
            cos = 1.0 / math.sqrt(1.0 + t * t)
            sin = t * cos
            rot = np.eye(3)
            rot[p, p] = cos
            rot[q, q] = cos
            rot[p, q] = sin
            rot[q, p] = -sin
            a = rot.T @ a @ rot
    return np.sort(np.diag(a))[::-1]


# ---------------------------------------------------------------------------
# General Bloch forms
# ---------------------------------------------------------------------------

def gmod_general(rho) -> float:
    """Geometric discord of an arbitrary two-qubit state.

    Bloch form: (||x||^2 + ||T||^2 - k_max) / 4 with k_max the largest
    eigenvalue of x x^t + T T^t.  Agrees with ``gmod_xstate`` on X states
    and vanishes exactly on product states.
    """
    dec = bloch_decompose(rho)
    k = np.outer(dec.x, dec.x) + dec.T @ dec.T.T
    k_max = float(sym3_eigenvalues(k)[0])
    value = 0.25 * (float(dec.x @ dec.x) + float(np.sum(dec.T * dec.T)) - k_max)
    return max(0.0, value)


def min_general(rho) -> float:
    """Measurement-induced nonlocality, general branch-selecting form.

    For ||x|| above 1e-9 the measurement is pinned to the eigenbasis of the
    reduced state of A and the subtracted term is the T T^t component along
    x; for smaller ||x|| the branch with the minimum eigenvalue of T T^t
    applies.  A ||x|| inside [1e-12, 1e-9] triggers a warning because the
    two branches can differ discontinuously there.
    """
    dec = bloch_decompose(rho)
    x = dec.x
    t = dec.T
    norm_x = float(np.linalg.norm(x))
    if BLOCH_WARN_FLOOR <= norm_x <= BLOCH_BRANCH_EPS:
        warnings.warn(
            f"||x||={norm_x:.3e} sits in the branch window "
            f"[{BLOCH_WARN_FLOOR:.0e}, {BLOCH_BRANCH_EPS:.0e}]; the x=0 and "
            f"x!=0 branches of MIN can differ discontinuously here",
            stacklevel=2,
        )
    tt = t @ t.T
    if norm_x > BLOCH_BRANCH_EPS:
        subtract = float(x @ tt @ x) / (norm_x * norm_x)
    else:
        subtract = float(sym3_eigenvalues(tt)[-1])
    value = 0.25 * (float(np.sum(t * t)) - subtract)
    return max(0.0, value)
