"""The four regularization methods and their all-at-once space-time systems.

Each method recovers the initial state of a backward heat problem from final
data g by solving one coupled linear system in the stacked states
y = (y^0, ..., y^N). Rows 1..N are always the backward Euler steps
(y^n - y^{n-1})/tau - lap y^n = 0; the methods differ only in row 0, which
encodes the regularized final condition:

    qbvm         alpha y^0 + y^N = g
    mqbvm        -(alpha/tau)(y^1 - y^0) + y^N = g
    pint-qbvm    (I/tau - lap) y^0 + y^N/(tau alpha) = g/(tau alpha)
    pint-mqbvm   (I/tau - lap) y^0 + y^N/alpha = g/alpha

For the two pint kinds row 0 has the same diagonal block as every other row,
so the whole operator is (1/tau) C⊗I - I⊗lap with C an omega-circulant time
coupling (omega = -1/alpha resp. -tau/alpha) and the FFT direct solver
applies. The classic kinds break that structure and only the sparse baseline
can solve them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse

from .circulant import TimeGrid
from .space import LaplacianOperator, SpatialGrid


class MethodKind(enum.Enum):
    """The four regularization methods; values double as CLI tokens."""

    QBVM = "qbvm"
    MQBVM = "mqbvm"
    PINT_QBVM = "pint-qbvm"
    PINT_MQBVM = "pint-mqbvm"

    @property
    def is_circulant(self) -> bool:
        """Whether the time coupling is omega-circulant (fast solver applies)."""
        return self in (MethodKind.PINT_QBVM, MethodKind.PINT_MQBVM)


def alpha_rule(
    kind: MethodKind,
    delta: float,
    tau: float,
    fallback: float = 1e-12,
    e0: Optional[float] = None,
) -> float:
    """Default regularization parameter for a given noise magnitude.

    alpha = delta for qbvm, mqbvm, and pint-qbvm; alpha = tau*delta for
    pint-mqbvm. Passing e0 (an a-priori bound on the initial state norm)
    divides delta by it first, the choice under which the convergence-rate
    bound holds. Noise-free data (delta = 0) falls back to a tiny positive
    value since alpha = 0 would make the problem ill-posed again.
    """
    if delta < 0:
        raise ValueError(f"noise magnitude must be nonnegative, got {delta}")
    if tau <= 0:
        raise ValueError(f"time step must be positive, got {tau}")
    if delta == 0:
        return fallback
    if e0 is not None:
        delta = delta / e0
    return tau * delta if kind is MethodKind.PINT_MQBVM else delta


@dataclass(frozen=True)
class MethodSpec:
    """A method kind plus its regularization parameter."""

    kind: MethodKind
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def condition_divisor(self, tau: float) -> float:
        """Factor the final-condition row is divided by in the stored system.

        The pint kinds store row 0 pre-divided (by tau*alpha resp. alpha) so
        that its diagonal block matches the stepping rows exactly; the
        classic kinds store the condition as written.
        """
        if self.kind is MethodKind.PINT_QBVM:
            return tau * self.alpha
        if self.kind is MethodKind.PINT_MQBVM:
            return self.alpha
        return 1.0

    def omega(self, tau: float) -> Optional[float]:
        """Corner parameter of the circulant time coupling; None for classics.

        Computed as -tau/condition_divisor so that the corner entry it implies,
        -omega/tau, is bit-identical to the stored coefficient 1/divisor. For
        pint-qbvm this equals -1/alpha up to one rounding, for pint-mqbvm
        -tau/alpha.
        """
        if not self.kind.is_circulant:
            return None
        return -tau / self.condition_divisor(tau)


class AllAtOnceSystem:
    """The coupled space-time operator and right-hand side of one method.

    The operator acts on stacked states (y^0, ..., y^N), flat length
    n_levels * n_space or equivalently shape (n_levels, n_space). It is held
    in factored form: a small sparse time-coupling matrix K plus a per-level
    Laplacian switch, so apply() costs O(n_levels * n_space) without ever
    forming the big Kronecker matrix. sparse() builds the explicit form on
    demand (cached) for the LU baseline.
    """

    def __init__(
        self,
        method: MethodSpec,
        grid: SpatialGrid,
        timegrid: TimeGrid,
        data: np.ndarray,
    ):
        data = np.asarray(data, dtype=float)
        if data.shape != (grid.n_interior,):
            raise ValueError(
                f"final data must have shape ({grid.n_interior},), got {data.shape}"
            )
        self.method = method
        self.grid = grid
        self.timegrid = timegrid
        self.data = data
        self.laplacian = LaplacianOperator(grid)
        self.time_coupling, self.lap_levels = _time_coupling(method, timegrid)
        self._sparse = None

    @property
    def n_levels(self) -> int:
        return self.timegrid.n_levels

    @property
    def n_space(self) -> int:
        return self.grid.n_interior

    @property
    def size(self) -> int:
        return self.n_levels * self.n_space

    @property
    def omega(self) -> Optional[float]:
        return self.method.omega(self.timegrid.tau)

    def rhs(self) -> np.ndarray:
        """Stacked right-hand side: scaled data in block 0, zeros elsewhere."""
        out = np.zeros((self.n_levels, self.n_space))
        out[0] = self.data / self.method.condition_divisor(self.timegrid.tau)
        return out.ravel()

    def apply(self, states: np.ndarray) -> np.ndarray:
        """Operator action on stacked states; shape of the input is kept."""
        states = np.asarray(states)
        flat = states.ndim == 1
        mat = states.reshape(self.n_levels, self.n_space)
        out = self.time_coupling @ mat
        out[self.lap_levels] -= self.laplacian.apply(mat[self.lap_levels])
        return out.ravel() if flat else out

    def sparse(self) -> scipy.sparse.csr_matrix:
        """Explicit sparse form kron(K, I) - kron(diag(switch), lap)."""
        if self._sparse is None:
            eye = scipy.sparse.identity(self.n_space, format="csr")
            switch = scipy.sparse.diags(self.lap_levels.astype(float))
            self._sparse = (
                scipy.sparse.kron(self.time_coupling, eye)
                - scipy.sparse.kron(switch, self.laplacian.sparse())
            ).tocsr()
        return self._sparse

    def estimated_nnz(self) -> int:
        """Upper bound on sparse() nonzeros, cheap enough to gate big solves."""
        lap_nnz = self.laplacian.sparse().nnz
        return int(
            self.time_coupling.nnz * self.n_space
            + int(np.count_nonzero(self.lap_levels)) * lap_nnz
        )


def _time_coupling(method: MethodSpec, timegrid: TimeGrid):
    """Small sparse time matrix K and the per-level Laplacian switch."""
    n_levels = timegrid.n_levels
    last = n_levels - 1
    tau = timegrid.tau
    alpha = method.alpha
    rows = list(range(1, n_levels)) * 2
    cols = list(range(1, n_levels)) + list(range(0, last))
    vals = [1.0 / tau] * (n_levels - 1) + [-1.0 / tau] * (n_levels - 1)
    lap_levels = np.ones(n_levels, dtype=bool)

    if method.kind is MethodKind.QBVM:
        rows += [0, 0]
        cols += [0, last]
        vals += [alpha, 1.0]
        lap_levels[0] = False
    elif method.kind is MethodKind.MQBVM:
        rows += [0, 0, 0]
        cols += [0, 1, last]
        vals += [alpha / tau, -alpha / tau, 1.0]
        lap_levels[0] = False
    else:
        corner = 1.0 / method.condition_divisor(tau)
        rows += [0, 0]
        cols += [0, last]
        vals += [1.0 / tau, corner]

    coupling = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(n_levels, n_levels)
    )
    # coo->csr sums duplicate entries, which handles N = 1 where the corner
    # column coincides with a first-row stencil column.
    return coupling, lap_levels


def assemble(
    kind: MethodKind,
    alpha: float,
    grid: SpatialGrid,
    timegrid: TimeGrid,
    data: np.ndarray,
) -> AllAtOnceSystem:
    """Build the all-at-once system of a method for given final data."""
    return AllAtOnceSystem(MethodSpec(kind, alpha), grid, timegrid, data)


def residual(system: AllAtOnceSystem, states: np.ndarray) -> tuple[np.ndarray, float]:
    """Residual vector rhs - A y and its norm relative to the rhs.

    The relative norm is reported in the h**(dim/2)-weighted discrete norm;
    the weight is uniform so it cancels in the ratio.
    """
    rhs = system.rhs()
    vec = rhs - system.apply(np.asarray(states).ravel())
    return vec, float(np.linalg.norm(vec) / np.linalg.norm(rhs))


@dataclass
class SolveResult:
    """Outcome of one all-at-once solve.

    ``trajectory`` has shape (n_levels, n_space); row 0 is the reconstructed
    initial state, the deliverable of the whole computation. ``timings`` maps
    phase names to wall-clock seconds ("total" always present; the fast
    solver adds "step_a"/"step_b"/"step_c"). ``status`` is "ok" for a
    completed solve or "infeasible" when a guarded solver refused the size;
    then trajectory is None and message says why.
    """

    system: AllAtOnceSystem
    trajectory: Optional[np.ndarray]
    solver: str
    timings: dict = field(default_factory=dict)
    status: str = "ok"
    message: str = ""

    @property
    def initial_state(self) -> np.ndarray:
        if self.trajectory is None:
            raise ValueError(f"no solution available (status={self.status!r})")
        return self.trajectory[0]

    @property
    def final_state(self) -> np.ndarray:
        if self.trajectory is None:
            raise ValueError(f"no solution available (status={self.status!r})")
        return self.trajectory[-1]

    def residual_norm(self) -> float:
        """Relative residual of the trajectory, nan for refused solves."""
        if self.trajectory is None:
            return float("nan")
        return residual(self.system, self.trajectory)[1]
