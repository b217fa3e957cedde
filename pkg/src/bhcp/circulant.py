"""Omega-circulant time-coupling matrices and their FFT diagonalization.

The all-at-once systems stack the states y^0..y^N of N backward Euler steps,
so the time direction has N+1 levels. For the fast-solvable method variants
the time coupling is an omega-circulant matrix C: ones on the diagonal, -1 on
the first subdiagonal, and -omega in the top-right corner. Such matrices
factor explicitly as

    C = V diag(d) V^{-1},   V = Gamma^{-1} F^*,   V^{-1} = F Gamma,

where F is the unitary DFT matrix, Gamma = diag(omega**(j/n)) with the
principal branch of the fractional power, and d_j = 1 - omega**(1/n) *
exp(2i pi j / n). Applying V or V^{-1} costs one FFT plus a diagonal scaling,
which is what makes the solver fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ImaginaryResidueError(ArithmeticError):
    """A nominally real result came back with a non-negligible imaginary part."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform backward Euler partition of [0, horizon] into num_steps steps.

    The carried states are y^0..y^N at times 0, tau, ..., horizon, so there
    are n_levels = num_steps + 1 unknown time levels.
    """

    horizon: float
    num_steps: int

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"time horizon must be positive, got {self.horizon}")
        if self.num_steps < 1:
            raise ValueError(f"need at least one time step, got {self.num_steps}")

    @property
    def tau(self) -> float:
        """Step size horizon / num_steps."""
        return self.horizon / self.num_steps

    @property
    def n_levels(self) -> int:
        """Number of carried time levels, num_steps + 1."""
        return self.num_steps + 1

    @property
    def times(self) -> np.ndarray:
        """All carried time levels 0, tau, ..., horizon, shape (n_levels,)."""
        return self.tau * np.arange(self.n_levels)


def step_matrix(size: int, omega: complex) -> np.ndarray:
    """Dense omega-circulant time coupling matrix, for tests and small cases.

    Unit diagonal, -1 on the first subdiagonal, -omega in the top-right
    corner. For size == 1 the corner and the diagonal coincide and the single
    entry is 1 - omega. omega = 0 is rejected: that degenerates to a plain
    lower bidiagonal Toeplitz matrix with no circulant factorization.
    """
    n = int(size)
    if n < 1:
        raise ValueError(f"matrix size must be at least 1, got {n}")
    if omega == 0:
        raise ValueError("omega must be nonzero")
    if n == 1:
        return np.array([[1.0 - omega]])
    mat = np.eye(n, dtype=np.result_type(omega, float))
    idx = np.arange(n - 1)
    mat[idx + 1, idx] = -1.0
    mat[0, n - 1] = -omega
    return mat


@dataclass(frozen=True)
class CirculantDiagonalization:
    """Eigen-factorization C = V diag(eigenvalues) V^{-1} of a step matrix.

    ``gamma`` holds omega**(j/size) for j = 0..size-1 (principal branch), the
    diagonal of Gamma. V and its inverse are applied with one FFT each and
    are only formed densely in tests. The roundoff of the transform pair is
    amplified by cond(Gamma) = max(|omega|, 1/|omega|)**((size-1)/size), so
    tolerances downstream scale with that factor.
    """

    size: int
    omega: complex
    gamma: np.ndarray
    eigenvalues: np.ndarray

    def apply_inverse_basis(self, values: np.ndarray) -> np.ndarray:
        """Apply V^{-1} = F Gamma along the trailing axis."""
        values = np.asarray(values, dtype=np.complex128)
        if values.shape[-1] != self.size:
            raise ValueError(
                f"expected trailing axis {self.size}, got {values.shape[-1]}"
            )
        return np.fft.ifft(values * self.gamma, axis=-1, norm="ortho")

    def apply_basis(self, coeffs: np.ndarray) -> np.ndarray:
        """Apply V = Gamma^{-1} F^* along the trailing axis."""
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape[-1] != self.size:
            raise ValueError(
                f"expected trailing axis {self.size}, got {coeffs.shape[-1]}"
            )
        return np.fft.fft(coeffs, axis=-1, norm="ortho") / self.gamma

    def basis_matrix(self) -> np.ndarray:
        """Dense V, for verification against the factored applications."""
        return self.apply_basis(np.eye(self.size)).T

    def reconstruct(self) -> np.ndarray:
        """Dense V diag(d) V^{-1}; should reproduce the step matrix."""
        return self.apply_basis(
            self.eigenvalues * self.apply_inverse_basis(np.eye(self.size))
        ).T

    @property
    def condition_gamma(self) -> float:
        """Condition number of Gamma, the roundoff amplification factor."""
        scale = max(abs(self.omega), 1.0 / abs(self.omega))
        return scale ** ((self.size - 1) / self.size)


def diagonalize(size: int, omega: complex) -> CirculantDiagonalization:
    """Factor the size x size omega-circulant step matrix for FFT solves.

    omega may be any nonzero real or complex number; negative reals take the
    principal branch of omega**(1/size), so gamma walks the upper half plane.
    """
    n = int(size)
    if n < 1:
        raise ValueError(f"matrix size must be at least 1, got {n}")
    omega = complex(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    # Principal branch of omega**(j/n) via the principal log; gamma[1] is the
    # principal n-th root that enters the eigenvalue formula.
    gamma = np.exp(np.arange(n) * (np.log(omega) / n))
    root = gamma[1] if n > 1 else omega
    eigenvalues = 1.0 - root * np.exp(2j * np.pi * np.arange(n) / n)
    return CirculantDiagonalization(
        size=n, omega=omega, gamma=gamma, eigenvalues=eigenvalues
    )


def to_eigenspace(
    block: np.ndarray, diag: CirculantDiagonalization
) -> np.ndarray:
    """Map a space-by-time block into the circulant eigenbasis.

    ``block`` has shape (..., n_space, size) with time on the trailing axis;
    the result equals block @ transpose(V^{-1}) and is complex.
    """
    return diag.apply_inverse_basis(block)


def from_eigenspace(
    block: np.ndarray,
    diag: CirculantDiagonalization,
    tol: float = 1e-8,
) -> np.ndarray:
    """Map back from the circulant eigenbasis and strip the imaginary residue.

    Computes block @ transpose(V). The systems and right-hand sides upstream
    are real, so the imaginary part must be roundoff; it is checked against
    tol * norm(result) and discarded.

    Raises:
        ImaginaryResidueError: imaginary norm above tol * result norm, which
            signals an upstream bug or hopeless conditioning, not roundoff.
    """
    out = diag.apply_basis(block)
    scale = np.linalg.norm(out)
    residue = np.linalg.norm(out.imag)
    if residue > tol * max(scale, np.finfo(float).tiny):
        raise ImaginaryResidueError(
            f"imaginary residue {residue:.3e} exceeds {tol:.1e} of the result "
            f"norm {scale:.3e}"
        )
    return np.ascontiguousarray(out.real)
