"""Dense linear algebra over two scalar backends.

``FLOAT`` works on ``float64`` arrays with partially pivoted elimination.
``RATIONAL`` works on ``object`` arrays of :class:`~fractions.Fraction` and is
exact: no rounding ever happens, so results can be compared with ``==``.

Both backends share the numpy array interface, so downstream code is written
once and runs under either.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import numpy as np

from .errors import SingularMatrix


@dataclasses.dataclass(frozen=True)
class Backend:
    name: str
    exact: bool
    eps: float = 0.0

    @property
    def dtype(self):
        return object if self.exact else np.float64

    def scalar(self, x):
        if self.exact:
            return x if isinstance(x, Fraction) else Fraction(x)
        return float(x)

    def array(self, data) -> np.ndarray:
        if self.exact:
            a = np.array(data, dtype=object)
            flat = a.reshape(-1)
            for k, x in enumerate(flat):
                if not isinstance(x, Fraction):
                    flat[k] = Fraction(x)
            return a
        return np.array(data, dtype=np.float64)

    def zeros(self, shape) -> np.ndarray:
        if self.exact:
            a = np.empty(shape, dtype=object)
            a.fill(Fraction(0))
            return a
        return np.zeros(shape)

    def identity(self, n: int) -> np.ndarray:
        a = self.zeros((n, n))
        for k in range(n):
            a[k, k] = self.scalar(1)
        return a

    def format(self, x) -> str:
        return format_scalar(x)

    def __str__(self):
        return self.name


FLOAT = Backend("float", exact=False, eps=1e-12)
RATIONAL = Backend("rational", exact=True)

BACKENDS = {"float": FLOAT, "rational": RATIONAL}


def get_backend(b) -> Backend:
    if isinstance(b, Backend):
        return b
    if b is None:
        return RATIONAL
    try:
        return BACKENDS[b]
    except KeyError:
        raise ValueError(f"unknown backend {b!r}; choose from {sorted(BACKENDS)}") from None


def format_scalar(x) -> str:
    """``p/q`` in lowest terms (``p`` for integers), or a float to 15 significant digits.

    Fifteen digits is what a double carries reliably, so last-bit noise from
    elimination (``6.799999999999999``) prints as ``6.8``.
    """
    if isinstance(x, (Fraction, int, np.integer)):
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return f"{x:.15g}"


def backend_of(a: np.ndarray) -> Backend:
    return RATIONAL if a.dtype == object else FLOAT


def _solve_float(A: np.ndarray, B: np.ndarray, eps: float) -> np.ndarray:
    A = np.array(A, dtype=np.float64)
    B = np.array(B, dtype=np.float64)
    n = A.shape[0]
    scale = np.abs(A).max(axis=1)
    scale[scale == 0] = 1.0
    for c in range(n):
        p = c + int(np.argmax(np.abs(A[c:, c]) / scale[c:]))
        if abs(A[p, c]) < eps * scale[p]:
            raise SingularMatrix(f"pivot {A[p, c]!r} in column {c + 1} below tolerance")
        if p != c:
            A[[c, p]] = A[[p, c]]
            B[[c, p]] = B[[p, c]]
            scale[[c, p]] = scale[[p, c]]
        f = A[c + 1:, c] / A[c, c]
        A[c + 1:, c:] -= np.outer(f, A[c, c:])
        B[c + 1:] -= np.outer(f, B[c])
    X = np.empty_like(B)
    for r in range(n - 1, -1, -1):
        X[r] = (B[r] - A[r, r + 1:] @ X[r + 1:]) / A[r, r]
    if not np.all(np.isfinite(X)):
        raise SingularMatrix("non-finite solution")
    return X


def _solve_exact(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = RATIONAL.array(A)
    B = RATIONAL.array(B)
    n = A.shape[0]
    for c in range(n):
        nz = np.flatnonzero(A[c:, c])
        if nz.size == 0:
            raise SingularMatrix(f"no nonzero pivot in column {c + 1}")
        p = c + int(nz[0])
        if p != c:
            A[[c, p]] = A[[p, c]]
            B[[c, p]] = B[[p, c]]
        piv = A[c, c]
        cols = c + 1 + np.flatnonzero(A[c, c + 1:])
        bcols = np.flatnonzero(B[c])
        for r in c + 1 + np.flatnonzero(A[c + 1:, c]):
            f = A[r, c] / piv
            A[r, c] = Fraction(0)
            if cols.size:
                A[r, cols] -= f * A[c, cols]
            if bcols.size:
                B[r, bcols] -= f * B[c, bcols]
    X = RATIONAL.zeros(B.shape)
    for r in range(n - 1, -1, -1):
        acc = B[r].copy()
        cols = r + 1 + np.flatnonzero(A[r, r + 1:])
        for k in cols:
            acc -= A[r, k] * X[k]
        X[r] = acc / A[r, r]
    return X


def solve_linear(A, b, backend=None) -> np.ndarray:
    """Solve ``A X = b`` for square ``A``; ``b`` may be a vector or an n-by-k block."""
    backend = get_backend(backend) if backend is not None else backend_of(np.asarray(A))
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    vector = b.ndim == 1
    B = b.reshape(-1, 1) if vector else b
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {A.shape[0]}")
    if A.shape[0] == 0:
        X = backend.zeros(B.shape)
    elif backend.exact:
        X = _solve_exact(A, B)
    else:
        X = _solve_float(A, B, backend.eps)
    return X[:, 0] if vector else X


def invert_matrix(A, backend=None) -> np.ndarray:
    backend = get_backend(backend) if backend is not None else backend_of(np.asarray(A))
    return solve_linear(A, backend.identity(np.asarray(A).shape[0]), backend)


def solve_sparse_rows(rows: list[dict[int, object]], rhs: list, backend) -> list:
    """Solve a square system given as one ``{column: coefficient}`` dict per row.

    Used for systems too large to hold densely (the cover-time state graph).
    The exact path eliminates on the dict rows directly; rows should be ordered
    so the matrix is close to block upper triangular to keep fill-in low.  The
    float path hands the matrix to SuperLU.
    """
    backend = get_backend(backend)
    n = len(rows)
    if backend.exact:
        return _solve_sparse_exact(rows, rhs)
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import MatrixRankWarning, spsolve
    import warnings

    data, ind, ptr = [], [], [0]
    for row in rows:
        for k, v in row.items():
            ind.append(k)
            data.append(float(v))
        ptr.append(len(ind))
    M = csr_matrix((data, ind, ptr), shape=(n, n))
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            x = spsolve(M.tocsc(), np.asarray(rhs, dtype=np.float64))
        except MatrixRankWarning:
            raise SingularMatrix("sparse system is singular") from None
    x = np.atleast_1d(x)
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("non-finite solution")
    return list(x)


def _solve_sparse_exact(rows, rhs) -> list:
    n = len(rows)
    rows = [{k: Fraction(v) for k, v in r.items() if v != 0} for r in rows]
    rhs = [Fraction(v) for v in rhs]
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for k in row:
            col_rows.setdefault(k, set()).add(r)
    perm = list(range(n))  # perm[c] = row index holding pivot of column c
    done = set()
    for c in range(n):
        cand = [r for r in col_rows.get(c, ()) if r not in done]
        if not cand:
            raise SingularMatrix(f"no nonzero pivot in column {c + 1}")
        p = c if c in cand else min(cand)
        done.add(p)
        perm[c] = p
        prow = rows[p]
        piv = prow[c]
        for r in sorted(cand):
            if r == p:
                continue
            row = rows[r]
            f = row[c] / piv
            for k, v in prow.items():
                new = row.get(k, 0) - f * v
                if new == 0:
                    if k in row:
                        del row[k]
                        col_rows[k].discard(r)
                else:
                    if k not in row:
                        col_rows.setdefault(k, set()).add(r)
                    row[k] = new
            rhs[r] -= f * rhs[p]
    x = [Fraction(0)] * n
    for c in range(n - 1, -1, -1):
        row = rows[perm[c]]
        acc = rhs[perm[c]]
        for k, v in row.items():
            if k != c:
                acc -= v * x[k]
        x[c] = acc / row[c]
    return x
