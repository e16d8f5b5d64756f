"""Conditional-independence backends.

The learner talks only to this interface: ``ci(x, y, z)`` returning True for
independence. Every backend canonicalizes queries, caches verdicts, and
counts logical tests (cache hits are not tests).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import norm

from .errors import InsufficientSamples, InvalidFormat, InvalidQuery
from .graph import Mag

_CONDITION_LIMIT = 1e12
_R_CLAMP = 1.0 - 1e-12


def canonical_query(
    x: str, y: str, z: Iterable[str], alpha: float | None = None
) -> tuple:
    z_set = frozenset(z)
    if x == y:
        raise InvalidQuery("CI query endpoints must differ")
    if x in z_set or y in z_set:
        raise InvalidQuery("CI query endpoints must not be conditioned on")
    a, b = sorted((x, y))
    return a, b, z_set, alpha


@dataclass
class CIStats:
    """Counters for one tester instance; monotone nondecreasing."""

    total_tests: int = 0
    max_cond_size: int = 0
    cache_hits: int = 0
    _cond_size_sum: int = field(default=0, repr=False)
    cond_sizes: list[int] = field(default_factory=list, repr=False)

    @property
    def mean_cond_size(self) -> float:
        return self._cond_size_sum / self.total_tests if self.total_tests else 0.0

    def record_test(self, cond_size: int) -> None:
        self.total_tests += 1
        self._cond_size_sum += cond_size
        self.cond_sizes.append(cond_size)
        self.max_cond_size = max(self.max_cond_size, cond_size)


class CITester:
    """Base class: caching, counting, and the canonical query key."""

    def __init__(self):
        self._cache: dict[tuple, bool] = {}
        self._stats = CIStats()

    def ci(self, x: str, y: str, z: Iterable[str], alpha: float | None = None) -> bool:
        """True iff x and y are judged independent given z."""
        key = canonical_query(x, y, z, self._effective_alpha(alpha))
        cached = self._cache.get(key)
        if cached is not None:
            self._stats.cache_hits += 1
            return cached
        verdict = self._decide(key[0], key[1], key[2], key[3])
        self._cache[key] = verdict
        self._stats.record_test(len(key[2]))
        return verdict

    def stats(self) -> CIStats:
        return self._stats

    def _effective_alpha(self, alpha: float | None):
        return alpha

    def _decide(self, x: str, y: str, z: frozenset[str], alpha) -> bool:
        raise NotImplementedError


class OracleTester(CITester):
    """Answers queries by m-separation on a ground-truth MAG."""

    def __init__(self, mag: Mag):
        super().__init__()
        self.mag = mag

    def _effective_alpha(self, alpha):
        return None  # the oracle has no significance level

    def _decide(self, x, y, z, alpha) -> bool:
        return self.mag.m_separated(x, y, z)


class FisherZTester(CITester):
    """Partial-correlation test with the Fisher z-transform.

    The partial correlation of (x, y) given z comes from the inverse of the
    correlation submatrix over {x, y} | z; the statistic
    sqrt(N - |z| - 3) * atanh(r) is compared against a standard-normal
    quantile. Ill-conditioned submatrices fall back to a pseudo-inverse with
    the correlation clamped away from +-1.
    """

    def __init__(self, data: np.ndarray, columns: Sequence[str], alpha: float = 0.01):
        super().__init__()
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise InvalidQuery("dataset must be a 2-D samples x variables matrix")
        if len(columns) != data.shape[1]:
            raise InvalidQuery("column labels do not match the data width")
        if not 0.0 < alpha < 1.0:
            raise InvalidQuery("significance level must lie in (0, 1)")
        self.alpha = alpha
        self.n_samples = data.shape[0]
        self.columns = list(columns)
        self._col_index = {c: i for i, c in enumerate(self.columns)}
        centered = data - data.mean(axis=0)
        scale = centered.std(axis=0)
        scale[scale == 0] = 1.0
        standardized = centered / scale
        self.corr = np.corrcoef(standardized, rowvar=False)
        if self.corr.ndim == 0:  # single column
            self.corr = self.corr.reshape(1, 1)

    def _effective_alpha(self, alpha):
        return self.alpha if alpha is None else alpha

    def _decide(self, x, y, z, alpha) -> bool:
        cond = sorted(z)
        if self.n_samples <= len(cond) + 3:
            raise InsufficientSamples(
                f"need more than |z| + 3 = {len(cond) + 3} samples, have {self.n_samples}"
            )
        idx = [self._col_index[v] for v in (x, y, *cond)]
        sub = self.corr[np.ix_(idx, idx)]
        if np.linalg.cond(sub) > _CONDITION_LIMIT:
            prec = np.linalg.pinv(sub)
        else:
            prec = np.linalg.inv(sub)
        denom = np.sqrt(prec[0, 0] * prec[1, 1])
        r = -prec[0, 1] / denom if denom > 0 else 0.0
        r = float(np.clip(r, -_R_CLAMP, _R_CLAMP))
        stat = np.sqrt(self.n_samples - len(cond) - 3) * np.arctanh(r)
        return abs(stat) <= norm.ppf(1.0 - alpha / 2.0)


def load_dataset(path: str | Path) -> tuple[np.ndarray, list[str]]:
    """Read a CSV with a header row of variable names and numeric cells."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidFormat(f"{path}: empty dataset") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise InvalidFormat(f"{path}: non-numeric cell", line_no) from exc
    if not rows:
        raise InvalidFormat(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise InvalidFormat(f"{path}: row width does not match the header")
    return data, [h.strip() for h in header]


def save_dataset(data: np.ndarray, columns: Sequence[str], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in np.asarray(data):
            writer.writerow([repr(float(v)) for v in row])
