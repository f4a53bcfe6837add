"""Two-qubit X states: types, constructors, validation, Bloch decomposition.

Basis convention, fixed here and imported everywhere else: the product basis
is ordered ``|11>, |10>, |01>, |00>``, where the left factor is qubit A and
level ``1`` is the *excited* level.  Index 0 is therefore the doubly excited
state and index 3 the ground state.  Pauli operators follow the same
ordering, so ``sigma_z |1> = +|1>`` and ``sigma_minus`` maps excited to
ground.

An X state is nonzero only on the main and anti diagonal of the 4x4 density
matrix:

    [ a  .  .  w ]
    [ .  b  z  . ]
    [ .  z* c  . ]
    [ w* .  .  d ]

with real populations ``a, b, c, d`` and complex coherences ``w, z``.  The
coherence phases are carried everywhere; only the measures reduce to
``|w|, |z|``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("11", "10", "01", "00")

# Validation tolerances.  They are deliberately loose enough to absorb
# fixed-step RK4 and kron/matmul roundoff, and tight enough to catch any
# genuine modelling mistake.
TRACE_TOL = 1e-12
POPULATION_TOL = 1e-12
COHERENCE_TOL = 1e-12
HERMITICITY_TOL = 1e-12
MIN_EIGENVALUE_TOL = -1e-10
OFF_PATTERN_TOL = 1e-10

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |1><0|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |0><1|

_PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

# Stacked two-qubit Pauli observables used by bloch_decompose.
_SIGMA_A = np.stack([np.kron(s, IDENTITY_2) for s in _PAULIS])
_SIGMA_B = np.stack([np.kron(IDENTITY_2, s) for s in _PAULIS])
_SIGMA_AB = np.stack(
    [np.stack([np.kron(si, sj) for sj in _PAULIS]) for si in _PAULIS]
)

# The eight structurally-zero slots of the X pattern.
_OFF_PATTERN = ((0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2))


class NotXShapedError(ValueError):
    """Raised when a matrix has weight outside the X pattern.

    Carries the offending magnitude in ``max_off_pattern``.
    """

    def __init__(self, max_off_pattern: float):
        self.max_off_pattern = float(max_off_pattern)
        super().__init__(
            f"matrix is not X-shaped: largest off-pattern magnitude "
            f"{self.max_off_pattern:.3e} exceeds {OFF_PATTERN_TOL:.0e}"
        )


@dataclass(frozen=True)
class XState:
    """X-shaped two-qubit state in the |11>,|10>,|01>,|00> basis.

    ``a`` is the doubly excited population, ``d`` the ground population,
    ``w`` the outer coherence <11|rho|00> and ``z`` the inner coherence
    <10|rho|01>.  Construction validates unit population sum, nonnegative
    populations, and the positivity bounds |w|^2 <= a*d and |z|^2 <= b*c,
    each up to the module tolerances.
    """

    a: float
    b: float
    c: float
    d: float
    w: complex = 0j
    z: complex = 0j

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("w", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for name in ("a", "b", "c", "d"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"population {name} is not finite")
        for name in ("w", "z"):
            if not cmath.isfinite(getattr(self, name)):
                raise ValueError(f"coherence {name} is not finite")
        total = self.a + self.b + self.c + self.d
        if abs(total - 1.0) > TRACE_TOL:
            raise ValueError(
                f"population sum {total!r} deviates from 1 by {abs(total - 1.0):.3e}"
            )
        for name in ("a", "b", "c", "d"):
            if getattr(self, name) < -POPULATION_TOL:
                raise ValueError(f"population {name}={getattr(self, name)!r} is negative")
        if abs(self.w) ** 2 > self.a * self.d + COHERENCE_TOL:
            raise ValueError(
                f"|w|^2={abs(self.w) ** 2:.6e} exceeds a*d={self.a * self.d:.6e}"
            )
        if abs(self.z) ** 2 > self.b * self.c + COHERENCE_TOL:
            raise ValueError(
                f"|z|^2={abs(self.z) ** 2:.6e} exceeds b*c={self.b * self.c:.6e}"
            )

    @property
    def populations(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def elements(self) -> tuple[float, float, float, float, complex, complex]:
        """The seven parameters as (a, b, c, d, w, z)."""
        return (self.a, self.b, self.c, self.d, self.w, self.z)


@dataclass(frozen=True)
class ReservoirParams:
    """Local reservoir parameters: decay rate ``gamma`` > 0 and mean thermal
    occupation ``m`` >= 0 (m = 0 is the zero-temperature vacuum)."""

    gamma: float
    m: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "m", float(self.m))
        if not math.isfinite(self.gamma) or self.gamma <= 0.0:
            raise ValueError(f"gamma={self.gamma!r} must be positive and finite")
        if not math.isfinite(self.m) or self.m < 0.0:
            raise ValueError(f"m={self.m!r} must be nonnegative and finite")


@dataclass(frozen=True)
class BlochDecomposition:
    """Bloch form of a two-qubit state: local vectors ``x`` (qubit A),
    ``y`` (qubit B) and the 3x3 correlation matrix ``T`` with
    T[i, j] = Re tr(rho sigma_i x sigma_j)."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray


@dataclass(frozen=True)
class ValidityReport:
    """Density-matrix diagnostics from :func:`validate`."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return (
            self.hermiticity_defect <= HERMITICITY_TOL
            and self.trace_defect <= TRACE_TOL
            and self.min_eigenvalue >= MIN_EIGENVALUE_TOL
        )

    def __bool__(self) -> bool:
        return self.ok


def _as_matrix4(rho) -> np.ndarray:
    out = np.asarray(rho, dtype=complex)
    if out.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {out.shape}")
    return out


def validate(rho) -> ValidityReport:
    """Report Hermiticity defect, trace defect, and minimum eigenvalue.

    Accepts any 4x4 complex array.  ``report.ok`` applies the module
    tolerances (1e-12, 1e-12, and eigenvalues >= -1e-10).
    """
    rho = _as_matrix4(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = float(abs(np.trace(rho) - 1.0))
    hermitized = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(hermitized)[0])
    return ValidityReport(herm, trace, min_eig)


def xstate_to_matrix(state: XState) -> np.ndarray:
    """Embed an XState into its 4x4 density matrix."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = state.a
    rho[1, 1] = state.b
    rho[2, 2] = state.c
    rho[3, 3] = state.d
    rho[0, 3] = state.w
    rho[3, 0] = np.conj(state.w)
    rho[1, 2] = state.z
    rho[2, 1] = np.conj(state.z)
    return rho


def matrix_to_xstate(rho) -> XState:
    """Extract the X parameters from a matrix that is X-shaped.

    Raises NotXShapedError when any structurally-zero entry (or any
    imaginary part on the diagonal) exceeds 1e-10 in magnitude.
    """
    rho = _as_matrix4(rho)
    off = max(abs(rho[i, j]) for i, j in _OFF_PATTERN)
    off = max(off, float(np.max(np.abs(np.imag(np.diag(rho))))))
    if off > OFF_PATTERN_TOL:
        raise NotXShapedError(off)
    return XState(
        a=rho[0, 0].real,
        b=rho[1, 1].real,
        c=rho[2, 2].real,
        d=rho[3, 3].real,
        w=complex(rho[0, 3]),
        z=complex(rho[1, 2]),
    )


def bloch_decompose(rho) -> BlochDecomposition:
    """Local Bloch vectors and correlation matrix of a 4x4 state.

    Every component is a Pauli expectation value: x_i = tr(rho sigma_i x I),
    y_j = tr(rho I x sigma_j), T_ij = tr(rho sigma_i x sigma_j).  For an X
    state x = y = (0, 0, *) with x_3 = a+b-c-d, and T is block diagonal with
    T_33 = a-b-c+d.
    """
    rho = _as_matrix4(rho)
    x = np.real(np.einsum("kij,ji->k", _SIGMA_A, rho))
    y = np.real(np.einsum("kij,ji->k", _SIGMA_B, rho))
    t = np.real(np.einsum("klij,ji->kl", _SIGMA_AB, rho))
    return BlochDecomposition(x=x, y=y, T=t)


def yu_eberly_state(alpha: float) -> XState:
    """One-parameter X-state family with a = alpha/3, b = c = z = 1/3,
    d = (1-alpha)/3 and w = 0, defined for 0 <= alpha <= 1."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha!r} outside [0, 1]")
    third = 1.0 / 3.0
    return XState(a=alpha / 3.0, b=third, c=third, d=(1.0 - alpha) / 3.0, z=third)


def thermal_product_state(m: float) -> XState:
    """Product of two single-qubit thermal states: the unique steady state of
    the damping dynamics.  With p = m/(1+2m) and q = (1+m)/(1+2m) the
    populations are (p^2, p*q, p*q, q^2); both coherences vanish."""
    m = float(m)
    if not math.isfinite(m) or m < 0.0:
        raise ValueError(f"m={m!r} must be nonnegative and finite")
    p = m / (1.0 + 2.0 * m)
    q = (1.0 + m) / (1.0 + 2.0 * m)
    return XState(a=p * p, b=p * q, c=p * q, d=q * q)


def bell_phi_plus() -> XState:
    """Maximally entangled (|11> + |00>)/sqrt(2): a = d = w = 1/2."""
    return XState(a=0.5, b=0.0, c=0.0, d=0.5, w=0.5)


def random_xstate(rng: np.random.Generator) -> XState:
    """Draw a random valid X state: Dirichlet populations, coherence
    magnitudes uniform inside their positivity bounds, uniform phases."""
    a, b, c, d = rng.dirichlet(np.ones(4))
    w = rng.uniform() * math.sqrt(a * d) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    z = rng.uniform() * math.sqrt(b * c) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return XState(a=a, b=b, c=c, d=d, w=w, z=z)
