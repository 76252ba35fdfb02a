"""Component kernels f(y | state) with sufficient-statistic bookkeeping.

A likelihood owns the current component state, tracks which datum ids
belong to the cluster, and maintains whatever statistics it needs to
evaluate the whole-cluster log density and to feed posterior updates.
Univariate kernels accept a scalar or a length-1 row as datum; the
multivariate normal accepts a length-d row.
"""

import math

import numpy as np

from . import autodiff as ad
from ._util import LOG_2PI
from .exceptions import CapabilityError
from .states import GammaState, MultiLSState, UniLSState


def _as_scalar(datum):
    if isinstance(datum, (float, int)):
        return float(datum)
    arr = np.asarray(datum, dtype=float).reshape(-1)
    if arr.shape[0] != 1:
        raise ValueError(f"expected a univariate datum, got dimension {arr.shape[0]}")
    return float(arr[0])


def whiten_rows(chol_inv, diff):
    """Rows of diff mapped through the inverse Cholesky factor.

    Uses einsum (not a LAPACK batched solve) so each row's result is
    bitwise independent of how many rows are transformed together; scalar
    and grid evaluations therefore agree exactly.
    """
    return np.einsum("ij,kj->ki", chol_inv, diff)


def squared_norm_rows(z):
    """Per-row squared Euclidean norm with fixed summation order."""
    return np.einsum("ki,ki->k", z, z)


class _BaseLikelihood:
    def __init__(self, state):
        self.state = state
        self._ids = set()

    @property
    def card(self):
        return len(self._ids)

    @property
    def ids(self):
        return frozenset(self._ids)

    def add_datum(self, datum_id, datum):
        if datum_id in self._ids:
            raise ValueError(f"datum id {datum_id} is already in the cluster")
        self._update_stats(datum, add=True)  # may reject the datum; ids stay clean
        self._ids.add(datum_id)

    def remove_datum(self, datum_id, datum):
        if datum_id not in self._ids:
            raise ValueError(f"datum id {datum_id} is not in the cluster")
        self._update_stats(datum, add=False)
        self._ids.remove(datum_id)

    def lpdf_grid(self, grid):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim == 1:
            grid = grid.reshape(-1, 1)
        return self._lpdf_rows(grid)

    def cluster_lpdf_from_unconstrained(self, u):
        raise CapabilityError(
            f"{type(self).__name__} has no unconstrained parameterization"
        )


class UniNormLikelihood(_BaseLikelihood):
    """Univariate normal kernel N(y | mean, var) over a UniLSState."""

    is_multivariate = False
    supports_unconstrained = True

    def __init__(self, state=None):
        super().__init__(state if state is not None else UniLSState(0.0, 1.0))
        self.data_sum = 0.0
        self.data_sum_squares = 0.0

    def clone_empty(self):
        return UniNormLikelihood(self.state.copy())

    def _update_stats(self, datum, add):
        y = _as_scalar(datum)
        if add:
            self.data_sum += y
            self.data_sum_squares += y * y
        else:
            self.data_sum -= y
            self.data_sum_squares -= y * y

    def lpdf(self, datum):
        y = _as_scalar(datum)
        d = y - self.state.mean
        return -0.5 * (LOG_2PI + math.log(self.state.var)) - d * d / (2.0 * self.state.var)

    def _lpdf_rows(self, grid):
        if grid.shape[1] != 1:
            raise ValueError(f"expected 1 column, got {grid.shape[1]}")
        d = grid[:, 0] - self.state.mean
        return -0.5 * (LOG_2PI + np.log(self.state.var)) - d * d / (2.0 * self.state.var)

    def cluster_lpdf_from_unconstrained(self, u):
        """Sum of log N(y_i | mean, var) over the cluster, from (mean, log var).

        Computed from (data_sum, data_sum_squares, card); works on floats
        and dual numbers alike.
        """
        n = self.card
        if n == 0:
            return 0.0
        mean, logvar = u[0], u[1]
        var = ad.exp(logvar)
        quad = self.data_sum_squares - 2.0 * mean * self.data_sum + n * mean * mean
        return -0.5 * n * (LOG_2PI + logvar) - quad / (2.0 * var)


class MultiNormLikelihood(_BaseLikelihood):
    """Multivariate normal kernel N_d(y | mean, cov) over a MultiLSState."""

    is_multivariate = True
    supports_unconstrained = False

    def __init__(self, state):
        super().__init__(state)
        d = state.dim
        self.data_sum = np.zeros(d)
        self.data_sum_outer = np.zeros((d, d))

    @property
    def dim(self):
        return self.state.dim

    def clone_empty(self):
        return MultiNormLikelihood(self.state.copy())

    def _update_stats(self, datum, add):
        y = np.asarray(datum, dtype=float).reshape(-1)
        if y.shape[0] != self.dim:
            raise ValueError(f"expected dimension {self.dim}, got {y.shape[0]}")
        if add:
            self.data_sum += y
            self.data_sum_outer += np.outer(y, y)
        else:
            self.data_sum -= y
            self.data_sum_outer -= np.outer(y, y)

    def lpdf(self, datum):
        y = np.asarray(datum, dtype=float).reshape(1, -1)
        return float(self._lpdf_rows(y)[0])

    def _lpdf_rows(self, grid):
        if grid.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} columns, got {grid.shape[1]}")
        diff = grid - self.state.mean
        quad = squared_norm_rows(whiten_rows(self.state.chol_inv, diff))
        return -0.5 * (self.dim * LOG_2PI + self.state.log_det + quad)


class LaplaceLikelihood(_BaseLikelihood):
    """Laplace kernel with density exp(-|y - mean| / scale) / (2 scale).

    Reuses UniLSState with ``var`` holding the scale. The summed absolute
    deviation has no fixed-size sufficient statistic, so the cluster keeps
    its raw data keyed by id and re-sums when needed.
    """

    is_multivariate = False
    supports_unconstrained = True

    def __init__(self, state=None):
        super().__init__(state if state is not None else UniLSState(0.0, 1.0))
        self.data = {}

    def clone_empty(self):
        return LaplaceLikelihood(self.state.copy())

    def _update_stats(self, datum, add):
        pass  # raw data stored in add/remove below

    def add_datum(self, datum_id, datum):
        super().add_datum(datum_id, datum)
        self.data[datum_id] = _as_scalar(datum)

    def remove_datum(self, datum_id, datum):
        y = _as_scalar(datum)
        if datum_id in self.data and self.data[datum_id] != y:
            raise ValueError(f"datum id {datum_id} was added with a different value")
        super().remove_datum(datum_id, datum)
        del self.data[datum_id]

    def lpdf(self, datum):
        y = _as_scalar(datum)
        scale = self.state.var
        return -math.log(2.0 * scale) - abs(y - self.state.mean) / scale

    def _lpdf_rows(self, grid):
        if grid.shape[1] != 1:
            raise ValueError(f"expected 1 column, got {grid.shape[1]}")
        scale = self.state.var
        return -np.log(2.0 * scale) - np.abs(grid[:, 0] - self.state.mean) / scale

    def cluster_lpdf_from_unconstrained(self, u):
        n = self.card
        if n == 0:
            return 0.0
        mean, logscale = u[0], u[1]
        scale = ad.exp(logscale)
        abs_sum = 0.0
        for y in self.data.values():
            abs_sum = abs_sum + abs(y - mean)
        return -n * (math.log(2.0) + logscale) - abs_sum / scale


class GammaLikelihood(_BaseLikelihood):
    """Gamma kernel with fixed shape and random rate, for positive data.

    lpdf(y) = shape*log(rate) - lgamma(shape) + (shape-1)*log(y) - rate*y
    for y > 0 and -inf otherwise. Tracks (data_sum, data_log_sum, ndata);
    the log-sum makes the whole-cluster density exact when the shape
    coordinate of the unconstrained vector moves.
    """

    is_multivariate = False
    supports_unconstrained = True

    def __init__(self, shape, state=None):
        if shape <= 0:
            raise ValueError("shape must be positive")
        super().__init__(state if state is not None else GammaState(shape, 1.0))
        self.shape = float(shape)
        self.data_sum = 0.0
        self.data_log_sum = 0.0

    @property
    def ndata(self):
        return self.card

    def clone_empty(self):
        return GammaLikelihood(self.shape, self.state.copy())

    def _update_stats(self, datum, add):
        y = _as_scalar(datum)
        if y <= 0:
            raise ValueError("Gamma likelihood requires positive data")
        if add:
            self.data_sum += y
            self.data_log_sum += math.log(y)
        else:
            self.data_sum -= y
            self.data_log_sum -= math.log(y)

    def lpdf(self, datum):
        y = _as_scalar(datum)
        if y <= 0:
            return -math.inf
        s, r = self.state.shape, self.state.rate
        return s * math.log(r) - math.lgamma(s) + (s - 1.0) * math.log(y) - r * y

    def _lpdf_rows(self, grid):
        if grid.shape[1] != 1:
            raise ValueError(f"expected 1 column, got {grid.shape[1]}")
        y = grid[:, 0]
        s, r = self.state.shape, self.state.rate
        with np.errstate(divide="ignore", invalid="ignore"):
            out = s * np.log(r) - math.lgamma(s) + (s - 1.0) * np.log(y) - r * y
        return np.where(y > 0, out, -np.inf)

    def cluster_lpdf_from_unconstrained(self, u):
        n = self.card
        if n == 0:
            return 0.0
        shape = ad.exp(u[0])
        rate = ad.exp(u[1])
        return (
            n * (shape * u[1] - ad.lgamma(shape))
            + (shape - 1.0) * self.data_log_sum
            - rate * self.data_sum
        )
