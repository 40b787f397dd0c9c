"""Sequential evaluation of ``log det R`` by the method of perpendiculars.

For ``R = Y @ Y.T`` with unit-norm rows, the determinant factors into the
squared distances of each row to the span of the rows before it.  Taking
logs gives

    log det R = c_n + sum_i log(1 + z[i]),

where ``c_n = sum_{j<p} log(1 - j/n)`` and ``z[i]`` measures how far row
``i`` deviates from its conditional expectation given the earlier rows:
``z[i] = (n * y' P y - (n - i)) / (n - i)`` with ``P`` the orthogonal
projector onto the complement of the span of rows ``0..i-1``.

The projector is never formed densely on the normal path: quadratic forms
are evaluated through an incrementally maintained orthonormal basis, and
the diagonal of the unit-trace projector ``Q = P / (n - i)`` is tracked as
``(1 - load_k) / (n - i)`` where ``load_k`` accumulates squared basis
coordinates.  A debug mode materializes ``Q`` to audit its entry bounds.

Each step statistic splits into a diagonal part driven by fourth-moment
behavior and an off-diagonal bilinear part that carries the asymptotic
variance:

    u = sum_k q_kk (n y_k^2 - 1),    v = sum_{k != l} q_kl n y_k y_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError, SingularStepError
from .matrices import SelfNormalizedMatrix

_REORTH_TOL = 1e-10
_MAX_REORTH = 6


class ProjectionState:
    """Orthonormal basis of the span of absorbed rows inside R^n.

    Exposes the quantities the recursion needs at step ``i``: quadratic
    forms in the scaled complement projector ``Q_i``, its diagonal, and
    power sums of that diagonal.
    """

    def __init__(self, n: int, capacity: int | None = None):
        if n < 1:
            raise ParameterDomainError("ambient dimension must be >= 1")
        self.n = n
        self._basis = np.zeros((capacity if capacity is not None else n, n))
        self._count = 0
        # diag_load[k] = sum of squared k-th coordinates over basis vectors
        self._diag_load = np.zeros(n)

    @property
    def step(self) -> int:
        """Number of rows absorbed so far (the index i)."""
        return self._count

    @property
    def scale(self) -> int:
        return self.n - self._count

    def basis(self) -> np.ndarray:
        return self._basis[: self._count]

    def _residual(self, y: np.ndarray) -> np.ndarray:
        """Component of y orthogonal to the basis, re-orthogonalized.

        One re-orthogonalization pass is always applied; if the correction
        is still above tolerance (nearly dependent rows), further passes
        run until it is negligible.
        """
        b = self.basis()
        r = y - b.T @ (b @ y) if self._count else y.copy()
        for _ in range(_MAX_REORTH):
            if not self._count:
                break
            c = b @ r
            correction = math.sqrt(float(c @ c))
            r = r - b.T @ c
            if correction <= _REORTH_TOL * max(1.0, math.sqrt(float(r @ r))):
                break
        return r

    def q_diag(self) -> np.ndarray:
        """Diagonal of the unit-trace complement projector Q_i."""
        return (1.0 - self._diag_load) / self.scale

    def quad_form(self, y: np.ndarray) -> float:
        """``y' Q_i y`` evaluated through the basis, O(i n)."""
        r = self._residual(np.asarray(y, dtype=float))
        return float(r @ r) / self.scale

    def step_statistic(self, y: np.ndarray) -> float:
        """``(n * y' P_i y - (n - i)) / (n - i)`` for a unit-norm row y."""
        m = self.scale
        return (self.n * self.quad_form(y) * m - m) / m

    def split_uv(self, y: np.ndarray) -> tuple[float, float]:
        """Diagonal / off-diagonal split of the step statistic.

        Both parts are evaluated without forming Q_i: the diagonal part
        from the tracked projector diagonal, the off-diagonal part as the
        full quadratic form minus its diagonal contribution.
        """
        y = np.asarray(y, dtype=float)
        m = self.scale
        ysq = float(y @ y)
        load_y = float(self._diag_load @ (y * y))
        u = (self.n * (ysq - load_y) - m) / m
        r = self._residual(y)
        rsq = float(r @ r)
        v = self.n * (rsq - ysq + load_y) / m
        return u, v

    def diag_power_sums(self, max_j: int = 4) -> tuple[float, ...]:
        """Power sums ``sum_k q_kk^j`` for j = 1..max_j (max_j <= 4)."""
        if not 1 <= max_j <= 4:
            raise ParameterDomainError("diagonal power sums support 1 <= max_j <= 4")
        qd = self.q_diag()
        return tuple(float(np.sum(qd**j)) for j in range(1, max_j + 1))

    def dense_q(self) -> np.ndarray:
        """Materialized Q_i (debug/audit path, O(n^2) memory)."""
        b = self.basis()
        p_mat = np.eye(self.n) - b.T @ b
        return p_mat / self.scale

    def absorb(self, y: np.ndarray) -> float:
        """Add a row to the span; returns its squared residual norm."""
        if self._count >= min(self.n, self._basis.shape[0]):
            raise ParameterDomainError("projection state is at capacity")
        r = self._residual(np.asarray(y, dtype=float))
        rsq = float(r @ r)
        if rsq <= 0.0 or not math.isfinite(rsq):
            raise SingularStepError(step=self._count)
        u = r / math.sqrt(rsq)
        self._basis[self._count] = u
        self._count += 1
        self._diag_load += u * u
        return rsq


def split_uv(state: ProjectionState, y_row: np.ndarray) -> tuple[float, float]:
    return state.split_uv(y_row)


def diag_power_sums(state: ProjectionState, max_j: int = 4) -> tuple[float, ...]:
    return state.diag_power_sums(max_j)


@dataclass(frozen=True)
class GirkoTrace:
    """Complete record of the sequential log-det recursion.

    ``power_sums[i, j-1]`` holds the j-th diagonal power sum of Q_i.  The
    bound-audit arrays are populated only when the trace was computed with
    ``record_bounds=True``.
    """

    p: int
    n: int
    c_n: float
    z_tilde: np.ndarray
    u_part: np.ndarray
    v_part: np.ndarray
    power_sums: np.ndarray
    diag_min: np.ndarray | None = field(default=None, repr=False)
    diag_max: np.ndarray | None = field(default=None, repr=False)
    offdiag_max: np.ndarray | None = field(default=None, repr=False)
    trace_error: np.ndarray | None = field(default=None, repr=False)

    @property
    def log_det(self) -> float:
        return self.c_n + float(np.sum(np.log1p(self.z_tilde)))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("step,z_tilde,u_part,v_part,s2,s3,s4\n")
            for i in range(self.p):
                s2, s3, s4 = (float(v) for v in self.power_sums[i, 1:4])
                fh.write(
                    f"{i},{float(self.z_tilde[i])!r},{float(self.u_part[i])!r},"
                    f"{float(self.v_part[i])!r},{s2!r},{s3!r},{s4!r}\n"
                )


def girko_log_det(
    y: SelfNormalizedMatrix | np.ndarray, record_bounds: bool = False
) -> GirkoTrace:
    """Run the full recursion over the rows of a unit-norm matrix.

    Requires p <= n and (almost surely satisfied for continuous data)
    linearly independent rows; a step with non-positive residual raises
    :class:`SingularStepError` with the step index.
    """
    rows = y.values if isinstance(y, SelfNormalizedMatrix) else np.asarray(y, dtype=float)
    p, n = rows.shape
    if not p <= n:
        raise ParameterDomainError("recursion requires p <= n")
    c_n = float(np.sum(np.log1p(-np.arange(p) / n)))

    state = ProjectionState(n, capacity=p)
    z = np.empty(p)
    u = np.empty(p)
    v = np.empty(p)
    sums = np.empty((p, 4))
    dense = np.eye(n) if record_bounds else None
    outer_buf = np.empty((n, n)) if record_bounds else None
    diag_min = np.empty(p) if record_bounds else None
    diag_max = np.empty(p) if record_bounds else None
    offdiag_max = np.empty(p) if record_bounds else None
    trace_error = np.empty(p) if record_bounds else None

    for i in range(p):
        row = rows[i]
        m = state.scale
        ysq = float(row @ row)
        load_y = float(state._diag_load @ (row * row))
        u[i] = (n * (ysq - load_y) - m) / m
        sums[i] = state.diag_power_sums(4)

        if record_bounds:
            # dense holds the unscaled projector P_i; bounds are checked on
            # Q_i = P_i / (n - i) without materializing scaled copies
            diag = dense.diagonal().copy()
            diag_min[i] = float(diag.min()) / m
            diag_max[i] = float(diag.max()) / m
            np.fill_diagonal(dense, 0.0)
            offdiag_max[i] = max(float(dense.max()), -float(dense.min())) / m
            np.fill_diagonal(dense, diag)
            trace_error[i] = abs(float(diag.sum()) / m - 1.0)

        rsq = state.absorb(row)
        z[i] = (n * rsq - m) / m
        v[i] = n * (rsq - ysq + load_y) / m
        if not z[i] > -1.0:
            # n * rsq / m underflowed; the factor is numerically zero
            raise SingularStepError(step=i)
        if record_bounds:
            new_u = state.basis()[-1]
            np.outer(new_u, new_u, out=outer_buf)
            np.subtract(dense, outer_buf, out=dense)

    return GirkoTrace(
        p=p,
        n=n,
        c_n=c_n,
        z_tilde=z,
        u_part=u,
        v_part=v,
        power_sums=sums,
        diag_min=diag_min,
        diag_max=diag_max,
        offdiag_max=offdiag_max,
        trace_error=trace_error,
    )
