"""Finite point configurations on the unit sphere and their metric geometry.

A configuration is a set of N unit vectors in R^n together with its Gram
(correlation) matrix.  The module computes the local projection-uniqueness
angle in a given normal direction, the critical radius of the set, the
multiplicity of the closest pair, and parameterizes or samples the normal
sphere at each point.

Configurations are immutable after construction; every operation is pure,
and sampling takes an explicit generator.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["PointConfiguration", "RHO_TIE_TOL"]

_UNIT_TOL = 1e-12
_GRAM_TOL = 1e-12
_PSD_TOL = 1e-10
_ORTHO_TOL = 1e-10

# Tolerance for deciding that a pair attains the maximal correlation; shared
# by the multiplicity count and the bound computations.
RHO_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    """Finite index set {u_1, ..., u_N} on the unit sphere in R^n.

    Attributes
    ----------
    points : ndarray of shape (N, n)
        Unit vectors (rows).
    correlation : ndarray of shape (N, N)
        Gram matrix rho with rho[i, j] = <u_i, u_j>.
    """

    points: np.ndarray
    correlation: np.ndarray = field(default=None)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (N, n)")
        n_points, dim = points.shape
        if n_points < 1:
            raise ValueError("at least one point is required")
        if dim < 2:
            raise ValueError("ambient dimension must be at least 2")
        norms = np.linalg.norm(points, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise ValueError("all points must be unit vectors")
        gram = points @ points.T
        if self.correlation is not None:
            given = np.asarray(self.correlation, dtype=float)
            if given.shape != (n_points, n_points):
                raise ValueError("correlation matrix shape does not match points")
            if np.max(np.abs(given - gram)) > 1e-10:
                raise ValueError("correlation matrix is inconsistent with the points")
        off = gram[~np.eye(n_points, dtype=bool)]
        if off.size and np.max(off) >= 1.0 - _GRAM_TOL:
            raise ValueError("duplicated points (off-diagonal correlation equal to 1)")
        points.setflags(write=False)
        gram.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "correlation", gram)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def from_points(cls, points):
        """Build a configuration from unit vectors, validating them."""
        return cls(points=np.asarray(points, dtype=float))

    @classmethod
    def from_correlation(cls, rho):
        """Realize a correlation matrix as points on a sphere.

        The matrix is factorized by eigendecomposition; directions with
        eigenvalue below 1e-12 are dropped, so the ambient dimension equals
        the numerical rank.

        Raises
        ------
        ValueError
            If the matrix is not symmetric with unit diagonal, has an
            eigenvalue below -1e-10, or contains a duplicated point.
        """
        rho = np.asarray(rho, dtype=float)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("correlation matrix must be square")
        if np.max(np.abs(rho - rho.T)) > 1e-12:
            raise ValueError("correlation matrix must be symmetric")
        if np.max(np.abs(np.diag(rho) - 1.0)) > 1e-12:
            raise ValueError("correlation matrix must have unit diagonal")
        off = rho[~np.eye(rho.shape[0], dtype=bool)]
        if off.size and np.max(off) >= 1.0 - _GRAM_TOL:
            raise ValueError("duplicated points (off-diagonal correlation equal to 1)")
        eigval, eigvec = np.linalg.eigh(rho)
        if eigval[0] < -_PSD_TOL:
            raise ValueError(
                f"correlation matrix is not positive semidefinite "
                f"(smallest eigenvalue {eigval[0]:.3e})"
            )
        keep = eigval > 1e-12
        if np.count_nonzero(keep) < 2:
            raise ValueError("correlation matrix has rank below 2")
        points = eigvec[:, keep] * np.sqrt(eigval[keep])
        # rows have norm sqrt(rho_ii) = 1 up to rounding
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        return cls(points=points)

    # ------------------------------------------------------------------
    # basic geometry
    # ------------------------------------------------------------------

    @property
    def n_points(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def is_degenerate(self):
        """True for a single point, where the critical radius is conventional."""
        return self.n_points == 1

    @cached_property
    def rho_star(self):
        """Largest off-diagonal correlation; None for a single point."""
        if self.n_points < 2:
            return None
        mask = ~np.eye(self.n_points, dtype=bool)
        return float(np.max(self.correlation[mask]))

    @cached_property
    def theta_star(self):
        """Critical radius arccos sqrt((1 + rho*) / 2); pi/2 when degenerate."""
        if self.is_degenerate:
            return math.pi / 2.0
        return math.acos(math.sqrt((1.0 + self.rho_star) / 2.0))

    @property
    def tan_theta_star(self):
        """tan of the critical radius, sqrt((1 - rho*) / (1 + rho*))."""
        if self.is_degenerate:
            return math.inf
        return math.sqrt((1.0 - self.rho_star) / (1.0 + self.rho_star))

    def critical_radius(self):
        """Critical radius of the configuration (see ``theta_star``)."""
        return self.theta_star

    @cached_property
    def multiplicity(self):
        """Number of ordered pairs attaining the maximal correlation."""
        if self.n_points < 2:
            raise ValueError("multiplicity requires at least two points")
        mask = ~np.eye(self.n_points, dtype=bool)
        return int(np.sum(np.abs(self.correlation - self.rho_star)[mask] <= RHO_TIE_TOL))

    # ------------------------------------------------------------------
    # local angles on the normal sphere
    # ------------------------------------------------------------------

    def cos_sq_local_angle(self, i, directions):
        """cos^2 of the local angle at point i for an array of normal directions.

        ``directions`` has shape (m, n) with rows orthogonal to ``u_i``.
        The angle follows the cotangent rule over the other points, with the
        convention that a nonpositive maximum means angle pi/2 (cos^2 = 0),
        so the correction integral excludes nothing in such directions.
        """
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        if self.n_points == 1:
            return np.zeros(directions.shape[0])
        others = [j for j in range(self.n_points) if j != i]
        rho_i = self.correlation[i, others]
        ratios = (self.points[others] @ directions.T) / (1.0 - rho_i)[:, None]
        cot = ratios.max(axis=0)
        return np.where(cot > 0.0, cot**2 / (1.0 + cot**2), 0.0)

    def local_angle(self, i, v):
        """Projection-uniqueness angle at point ``i`` in normal direction ``v``.

        Returns a value in (0, pi/2]; pi/2 when the cotangent rule gives a
        nonpositive maximum (and for a single point, by convention).

        Raises
        ------
        ValueError
            If ``v`` is not a unit vector orthogonal to ``u_i``.
        """
        v = np.asarray(v, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > _ORTHO_TOL:
            raise ValueError("normal direction must be a unit vector")
        if abs(float(self.points[i] @ v)) > _ORTHO_TOL:
            raise ValueError("normal direction must be orthogonal to the point")
        if self.n_points == 1:
            return math.pi / 2.0
        others = [j for j in range(self.n_points) if j != i]
        rho_i = self.correlation[i, others]
        cot = float(np.max((self.points[others] @ v) / (1.0 - rho_i)))
        if cot <= 0.0:
            return math.pi / 2.0
        return math.atan2(1.0, cot)

    def nearest_neighbor_direction(self, i):
        """Unit tangent at ``u_i`` toward its nearest neighbor.

        Ties are broken by the lowest neighbor index.  For an antipodal
        nearest neighbor the tangent is not unique and a deterministic
        orthogonal direction is returned.
        """
        if self.n_points < 2:
            raise ValueError("a neighbor direction requires at least two points")
        rho_i = self.correlation[i].copy()
        rho_i[i] = -np.inf
        jstar = int(np.argmax(rho_i > np.max(rho_i) - RHO_TIE_TOL))
        v0 = self.points[jstar] - self.correlation[i, jstar] * self.points[i]
        norm = np.linalg.norm(v0)
        if norm < 1e-12:
            return self._orthonormal_completion(i)[0]
        return v0 / norm

    def _orthonormal_completion(self, i, v0=None):
        """Deterministic orthonormal basis of the normal space at ``u_i``.

        The first column is ``v0`` when given.
        """
        cols = [self.points[i]]
        if v0 is not None:
            cols.append(v0)
        basis = np.column_stack(cols + [np.eye(self.dim)])
        q = np.linalg.qr(basis)[0]
        # fix signs so the leading columns reproduce u_i and v0
        for k, col in enumerate(cols):
            if q[:, k] @ col < 0:
                q[:, k] = -q[:, k]
        return q.T[1:]

    def normal_direction(self, i, phi, h=None):
        """Point of the normal sphere at ``u_i`` with angular coordinates.

        The direction is ``cos(phi) v0 + sin(phi) sum_k h_k v_k`` where
        ``v0`` points toward the nearest neighbor and ``(v_k)`` completes an
        orthonormal basis of the normal space.  For ``n = 3`` the argument
        ``h`` degenerates to a sign (default +1) and ``phi`` traces the
        normal circle.

        Raises
        ------
        ValueError
            For ambient dimension 2, where the normal sphere is the two-point
            set {+v0, -v0} and direct enumeration applies instead.
        """
        if self.dim < 3:
            raise ValueError("normal_direction requires ambient dimension >= 3")
        v0 = self.nearest_neighbor_direction(i)
        rest = self._orthonormal_completion(i, v0)[1:]
        if h is None:
            h = np.zeros(self.dim - 2)
            h[0] = 1.0
        else:
            h = np.atleast_1d(np.asarray(h, dtype=float))
            if h.shape != (self.dim - 2,):
                raise ValueError(f"h must have {self.dim - 2} components")
            if abs(np.linalg.norm(h) - 1.0) > _ORTHO_TOL:
                raise ValueError("h must be a unit vector")
        v = math.cos(phi) * v0 + math.sin(phi) * (h @ rest)
        return v / np.linalg.norm(v)

    def sample_normal_direction(self, i, rng, size=None):
        """Uniform draw on the normal sphere at ``u_i`` (Gaussian projection)."""
        m = 1 if size is None else int(size)
        z = rng.standard_normal((m, self.dim))
        u = self.points[i]
        z -= np.outer(z @ u, u)
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return z[0] if size is None else z
