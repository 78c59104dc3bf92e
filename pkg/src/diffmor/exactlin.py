"""Exact sparse linear algebra over the rationals.

Matrices are stored in canonical row-major COO form: integer numerator
arrays over a single common denominator.  Ranks use a modular fast path
(several random word-size primes); kernels, solves and disagreements
between primes fall back to fraction-free integer elimination.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

Scalar = Fraction

_INT64_SAFE = 1 << 62
# rows * cols below this goes straight to the dense modular kernel
DENSE_LIMIT = 3_000_000


class InputError(ValueError):
    """Malformed input: dimension mismatch, unparsable scalar, ..."""


class ContainmentError(ValueError):
    """A subspace that should be contained in another is not."""


def as_scalar(x) -> Fraction:
    """Parse ``x`` (int, Fraction, ``"p/q"`` string) into an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {x!r}") from exc
    raise InputError(f"not an exact rational: {x!r}")


def scalar_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _obj(values) -> np.ndarray:
    arr = np.empty(len(values), dtype=object)
    arr[:] = list(values)
    return arr


def _max_abs(num: np.ndarray) -> int:
    if num.size == 0:
        return 0
    return max(abs(int(num.max())), abs(int(num.min())))


class Matrix:
    """Immutable sparse rational matrix.

    Entry ``(r, c)`` equals ``num[k] / den`` for the k-th stored position;
    positions are unique, sorted row-major and never hold zeros.
    """

    __slots__ = ("shape", "_rows", "_cols", "_num", "_den")

    def __init__(self, shape, rows, cols, num, den=1):
        nr, nc = int(shape[0]), int(shape[1])
        if nr < 0 or nc < 0:
            raise InputError(f"bad shape {shape!r}")
        self.shape = (nr, nc)
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if not isinstance(num, np.ndarray) or num.dtype != object:
            num = _obj([int(v) for v in np.asarray(num).ravel()]) if len(rows) else _obj([])
        if not (len(rows) == len(cols) == len(num)):
            raise InputError("coordinate arrays differ in length")
        den = int(den)
        if den == 0:
            raise InputError("zero denominator")
        if den < 0:
            num, den = -num, -den
        if len(rows):
            if rows.min() < 0 or rows.max() >= nr or cols.min() < 0 or cols.max() >= nc:
                raise InputError(f"index out of range for shape {self.shape}")
            keys = rows * nc + cols
            order = np.argsort(keys, kind="stable")
            keys = keys[order]
            num = num[order]
            uniq, start = np.unique(keys, return_index=True)
            if len(uniq) != len(keys):
                num = np.add.reduceat(num, start)
            keep = num != 0
            uniq = uniq[keep]
            num = num[keep]
            rows, cols = np.divmod(uniq, nc) if nc else (uniq, uniq)
        g = den
        for v in num:
            if g == 1:
                break
            g = math.gcd(g, int(v))
        if g > 1:
            num = num // g
            den //= g
        if len(num) == 0:
            den = 1
        for arr in (rows, cols):
            arr.setflags(write=False)
        num.setflags(write=False)
        self._rows, self._cols, self._num, self._den = rows, cols, num, den

    # ------------------------------------------------------------ builders
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls((nrows, ncols), [], [], _obj([]))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        idx = np.arange(n, dtype=np.int64)
        return cls((n, n), idx, idx, _obj([1] * n))

    @classmethod
    def from_coo(cls, shape, rows, cols, values: Sequence) -> "Matrix":
        vals = [as_scalar(v) for v in values]
        den = reduce(_lcm, (v.denominator for v in vals), 1)
        return cls(shape, rows, cols, _obj([v.numerator * (den // v.denominator) for v in vals]), den)

    @classmethod
    def from_entries(cls, shape, entries: Mapping[tuple[int, int], object]) -> "Matrix":
        items = [(r, c, v) for (r, c), v in entries.items()]
        return cls.from_coo(shape, [i[0] for i in items], [i[1] for i in items], [i[2] for i in items])

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise InputError("ragged dense matrix")
        coo = [(i, j, as_scalar(v)) for i, r in enumerate(rows) for j, v in enumerate(r)]
        coo = [t for t in coo if t[2] != 0]
        return cls.from_coo((len(rows), ncols), [t[0] for t in coo], [t[1] for t in coo], [t[2] for t in coo])

    @classmethod
    def column(cls, vector: Sequence) -> "Matrix":
        return cls.from_dense([[v] for v in vector], 1)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Sequence]) -> "Matrix":
        coo = [(i, j, as_scalar(v)) for j, col in enumerate(columns) for i, v in enumerate(col) if v != 0]
        for col in columns:
            if len(col) != nrows:
                raise InputError("column length mismatch")
        return cls.from_coo((nrows, len(columns)), [t[0] for t in coo], [t[1] for t in coo], [t[2] for t in coo])

    # ------------------------------------------------------------ access
    @property
    def nnz(self) -> int:
        return len(self._num)

    @property
    def den(self) -> int:
        return self._den

    def coo(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        """Raw (rows, cols, integer numerators, common denominator)."""
        return self._rows, self._cols, self._num, self._den

    def entries(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        for r, c, v in zip(self._rows.tolist(), self._cols.tolist(), self._num):
            yield (r, c), Fraction(int(v), self._den)

    def to_dict(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.entries())

    def row_dicts(self) -> list[dict[int, int]]:
        """Integer numerators row by row (the common denominator dropped)."""
        out: list[dict[int, int]] = [dict() for _ in range(self.shape[0])]
        for r, c, v in zip(self._rows.tolist(), self._cols.tolist(), self._num):
            out[r][c] = int(v)
        return out

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.shape[1] for _ in range(self.shape[0])]
        for (r, c), v in self.entries():
            out[r][c] = v
        return out

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        r, c = rc
        if not (0 <= r < self.shape[0] and 0 <= c < self.shape[1]):
            raise IndexError(rc)
        key = r * self.shape[1] + c
        keys = self._rows * self.shape[1] + self._cols
        k = int(np.searchsorted(keys, key))
        if k < len(keys) and keys[k] == key:
            return Fraction(int(self._num[k]), self._den)
        return Fraction(0)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._den == other._den
            and np.array_equal(self._rows, other._rows)
            and np.array_equal(self._cols, other._cols)
            and bool(np.all(self._num == other._num))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Matrix({self.shape[0]}x{self.shape[1]}, nnz={self.nnz}, den={self._den})"

    # ------------------------------------------------------------ algebra
    @property
    def T(self) -> "Matrix":
        return Matrix((self.shape[1], self.shape[0]), self._cols, self._rows, self._num, self._den)

    def __neg__(self) -> "Matrix":
        return Matrix(self.shape, self._rows, self._cols, -self._num, self._den)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        if c == 0:
            return Matrix.zeros(*self.shape)
        return Matrix(self.shape, self._rows, self._cols, self._num * c.numerator, self._den * c.denominator)

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} + {other.shape}")
        den = _lcm(self._den, other._den)
        num = np.concatenate([self._num * (den // self._den), other._num * (den // other._den)])
        return Matrix(
            self.shape,
            np.concatenate([self._rows, other._rows]),
            np.concatenate([self._cols, other._cols]),
            num,
            den,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def _int64_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self._num.astype(np.int64), (self._rows, self._cols)), shape=self.shape, dtype=np.int64
        )

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return self._matmul(other)
        vec = [as_scalar(v) for v in other]
        if len(vec) != self.shape[1]:
            raise InputError(f"vector length {len(vec)} != {self.shape[1]} columns")
        out = [Fraction(0)] * self.shape[0]
        for r, c, v in zip(self._rows.tolist(), self._cols.tolist(), self._num):
            x = vec[c]
            if x:
                out[r] += x * int(v)
        return [x / self._den for x in out]

    def _matmul(self, other: "Matrix") -> "Matrix":
        if self.shape[1] != other.shape[0]:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        shape = (self.shape[0], other.shape[1])
        den = self._den * other._den
        if self.nnz == 0 or other.nnz == 0:
            return Matrix.zeros(*shape)
        row_nnz = int(np.bincount(self._rows, minlength=1).max())
        bound = _max_abs(self._num) * _max_abs(other._num) * row_nnz
        if bound < _INT64_SAFE:
            prod = (self._int64_csr() @ other._int64_csr()).tocoo()
            keep = prod.data != 0
            return Matrix(shape, prod.row[keep], prod.col[keep], _obj(prod.data[keep].tolist()), den)
        # arbitrary-precision fallback
        right = other.row_dicts()
        acc: dict[tuple[int, int], int] = {}
        for r, c, v in zip(self._rows.tolist(), self._cols.tolist(), self._num):
            for c2, w in right[c].items():
                acc[(r, c2)] = acc.get((r, c2), 0) + int(v) * w
        items = [(k, v) for k, v in acc.items() if v]
        return Matrix(shape, [k[0] for k, _ in items], [k[1] for k, _ in items], _obj([v for _, v in items]), den)

    # ------------------------------------------------------------ structure
    def take_columns(self, idx: Sequence[int]) -> "Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        where = np.full(self.shape[1], -1, dtype=np.int64)
        where[idx] = np.arange(len(idx))
        new = where[self._cols]
        keep = new >= 0
        return Matrix((self.shape[0], len(idx)), self._rows[keep], new[keep], self._num[keep], self._den)

    def take_rows(self, idx: Sequence[int]) -> "Matrix":
        return self.T.take_columns(idx).T

    def permute_rows(self, perm: np.ndarray) -> "Matrix":
        """Move row ``i`` to position ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Matrix(self.shape, perm[self._rows], self._cols, self._num, self._den)

    def mod_p(self, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._den % p == 0:
            raise ValueError(f"denominator divisible by {p}")
        inv = pow(self._den % p, -1, p)
        vals = np.array([int(v) % p * inv % p for v in self._num], dtype=np.int64)
        keep = vals != 0
        return self._rows[keep], self._cols[keep], vals[keep]


def matrix_sum(mats: Iterable["Matrix"], shape: tuple[int, int]) -> Matrix:
    """Sum of many matrices with a single canonicalization pass."""
    mats = list(mats)
    for m in mats:
        if m.shape != tuple(shape):
            raise InputError(f"shape mismatch {m.shape} in sum of {tuple(shape)}")
    if not mats:
        return Matrix.zeros(*shape)
    den = reduce(_lcm, (m._den for m in mats), 1)
    return Matrix(
        shape,
        np.concatenate([m._rows for m in mats]),
        np.concatenate([m._cols for m in mats]),
        np.concatenate([m._num * (den // m._den) for m in mats]),
        den,
    )


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; row (i, k) -> i * b.rows + k."""
    (ar, ac), (br, bc) = a.shape, b.shape
    shape = (ar * br, ac * bc)
    if a.nnz == 0 or b.nnz == 0:
        return Matrix.zeros(*shape)
    rows = (a._rows[:, None] * br + b._rows[None, :]).ravel()
    cols = (a._cols[:, None] * bc + b._cols[None, :]).ravel()
    num = np.multiply.outer(a._num, b._num).ravel()
    return Matrix(shape, rows, cols, num, a._den * b._den)


def kron_all(*mats: Matrix) -> Matrix:
    return reduce(kron, mats, Matrix.identity(1))


def block(blocks: Sequence[Sequence[Matrix | None]], row_sizes=None, col_sizes=None) -> Matrix:
    """Assemble a block matrix; ``None`` stands for a zero block."""
    nbr = len(blocks)
    nbc = len(blocks[0]) if nbr else 0
    row_sizes = list(row_sizes) if row_sizes is not None else [None] * nbr
    col_sizes = list(col_sizes) if col_sizes is not None else [None] * nbc
    for i, brow in enumerate(blocks):
        if len(brow) != nbc:
            raise InputError("ragged block layout")
        for j, m in enumerate(brow):
            if m is None:
                continue
            for sizes, k, s in ((row_sizes, i, m.shape[0]), (col_sizes, j, m.shape[1])):
                if sizes[k] is None:
                    sizes[k] = s
                elif sizes[k] != s:
                    raise InputError("inconsistent block sizes")
    if None in row_sizes or None in col_sizes:
        raise InputError("cannot infer size of an all-zero block row/column")
    roff = np.concatenate([[0], np.cumsum(row_sizes)]).astype(np.int64)
    coff = np.concatenate([[0], np.cumsum(col_sizes)]).astype(np.int64)
    present = [(i, j, m) for i, brow in enumerate(blocks) for j, m in enumerate(brow) if m is not None and m.nnz]
    den = reduce(_lcm, (m._den for _, _, m in present), 1)
    shape = (int(roff[-1]), int(coff[-1]))
    if not present:
        return Matrix.zeros(*shape)
    return Matrix(
        shape,
        np.concatenate([m._rows + roff[i] for i, _, m in present]),
        np.concatenate([m._cols + coff[j] for _, j, m in present]),
        np.concatenate([m._num * (den // m._den) for _, _, m in present]),
        den,
    )


def hstack(mats: Sequence[Matrix]) -> Matrix:
    return block([list(mats)])


def vstack(mats: Sequence[Matrix]) -> Matrix:
    return block([[m] for m in mats])


# ---------------------------------------------------------------- primes

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_primes(count: int, seed: int = 0x5EED, bits: int = 31) -> list[int]:
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        c = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if c not in out and is_prime(c):
            out.append(c)
    return out


# ---------------------------------------------------------------- modular rank


def _dense_rank_mod_p(dense: np.ndarray, p: int) -> int:
    import flint

    nr, nc = dense.shape
    if nr == 0 or nc == 0:
        return 0
    return int(flint.nmod_mat(nr, nc, dense.ravel().tolist(), p).rank())


def _sparse_rank_mod_p(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray, shape, p: int) -> int:
    """Markowitz-ordered sparse elimination; hands the dense core to flint."""
    row_data: dict[int, dict[int, int]] = {}
    col_rows: dict[int, set[int]] = {}
    for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        row_data.setdefault(r, {})[c] = v
        col_rows.setdefault(c, set()).add(r)
    rank = 0
    nnz = len(vals)
    while col_rows:
        n_active = len(row_data) * len(col_rows)
        if n_active <= DENSE_LIMIT and nnz * 8 > n_active:
            break
        # minimum column count, tie broken by lowest column index
        c = min(col_rows, key=lambda k: (len(col_rows[k]), k))
        members = col_rows[c]
        if not members:
            del col_rows[c]
            continue
        piv_r = min(members, key=lambda r: (len(row_data[r]), r))
        cost = (len(row_data[piv_r]) - 1) * (len(members) - 1)
        if cost > 4096 and n_active <= 4 * DENSE_LIMIT:
            break
        prow = row_data.pop(piv_r)
        inv = pow(prow[c], -1, p)
        for c2 in prow:
            col_rows[c2].discard(piv_r)
        nnz -= len(prow)
        others = list(members)
        del col_rows[c]
        rank += 1
        for r2 in others:
            row = row_data[r2]
            f = row.pop(c) * inv % p
            nnz -= 1
            for c2, v in prow.items():
                if c2 == c:
                    continue
                old = row.get(c2)
                if old is None:
                    row[c2] = (-f * v) % p
                    col_rows[c2].add(r2)
                    nnz += 1
                else:
                    new = (old - f * v) % p
                    if new:
                        row[c2] = new
                    else:
                        del row[c2]
                        col_rows[c2].discard(r2)
                        nnz -= 1
            if not row:
                del row_data[r2]
        for c2 in [k for k in prow if k != c and not col_rows.get(k, True)]:
            del col_rows[c2]
    if not col_rows or not row_data:
        return rank
    rmap = {r: i for i, r in enumerate(sorted(row_data))}
    cmap = {c: j for j, c in enumerate(sorted(col_rows))}
    dense = np.zeros((len(rmap), len(cmap)), dtype=np.int64)
    for r, row in row_data.items():
        i = rmap[r]
        for c, v in row.items():
            dense[i, cmap[c]] = v
    return rank + _dense_rank_mod_p(dense, p)


def rank_mod_p(m: Matrix, p: int) -> int:
    """Rank of ``m`` reduced modulo the prime ``p`` (a lower bound for the rational rank)."""
    rows, cols, vals = m.mod_p(p)
    nr, nc = m.shape
    if len(vals) == 0:
        return 0
    if nr * nc <= DENSE_LIMIT:
        dense = np.zeros((nr, nc), dtype=np.int64)
        dense[rows, cols] = vals
        return _dense_rank_mod_p(dense, p)
    return _sparse_rank_mod_p(rows, cols, vals, m.shape, p)


# ---------------------------------------------------------------- rational elimination


@dataclass
class _Pivot:
    col: int
    row: dict[int, int]  # primitive integer row, including the rhs slot if any


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def _eliminate(rows: list[dict[int, int]], ncols: int) -> tuple[list[_Pivot], list[dict[int, int]]]:
    """Fraction-free Gaussian elimination with Markowitz pivoting.

    Columns ``>= ncols`` (right-hand sides) are carried but never pivoted on.
    Returns pivots in elimination order and the leftover nonzero rows
    (which then live entirely in the rhs columns).
    """
    active: dict[int, dict[int, int]] = {i: _primitive(dict(r)) for i, r in enumerate(rows) if r}
    col_rows: dict[int, set[int]] = {}
    for i, r in active.items():
        for c in r:
            if c < ncols:
                col_rows.setdefault(c, set()).add(i)
    pivots: list[_Pivot] = []
    while col_rows:
        best = None
        for c in sorted(col_rows):
            cc = len(col_rows[c]) - 1
            for r in col_rows[c]:
                key = ((sum(1 for k in active[r] if k < ncols) - 1) * cc, r, c)
                if best is None or key < best:
                    best = key
            if best[0] == 0:
                break
        _, pr, pc = best
        prow = active.pop(pr)
        for c in prow:
            if c < ncols:
                col_rows[c].discard(pr)
        piv = prow[pc]
        for r2 in list(col_rows[pc]):
            row = active[r2]
            a = row[pc]
            g = math.gcd(piv, a)
            s, t = piv // g, a // g
            new: dict[int, int] = {}
            for k in set(row) | set(prow):
                v = s * row.get(k, 0) - t * prow.get(k, 0)
                if v:
                    new[k] = v
            for k in row:
                if k < ncols and k not in new:
                    col_rows[k].discard(r2)
            for k in new:
                if k < ncols:
                    col_rows.setdefault(k, set()).add(r2)
            if new:
                active[r2] = _primitive(new)
            else:
                del active[r2]
        del col_rows[pc]
        for k in [k for k, v in col_rows.items() if not v]:
            del col_rows[k]
        pivots.append(_Pivot(pc, prow))
    return pivots, list(active.values())


def rank_rational(m: Matrix) -> int:
    pivots, _ = _eliminate(m.row_dicts(), m.shape[1])
    return len(pivots)


def rank(m: Matrix, *, method: str = "auto", n_primes: int = 3) -> int:
    """Exact rank over the rationals.

    ``method="auto"`` computes the rank modulo ``n_primes`` random word-size
    primes and certifies by rational elimination only when they disagree.
    """
    if method == "rational":
        return rank_rational(m)
    if method not in ("auto", "modular"):
        raise InputError(f"unknown rank method {method!r}")
    if m.nnz == 0:
        return 0
    ranks = []
    for p in random_primes(n_primes + 4):
        if m.den % p == 0:
            continue
        ranks.append(rank_mod_p(m, p))
        if len(ranks) == n_primes:
            break
    if len(set(ranks)) == 1:
        return ranks[0]
    return rank_rational(m)


def _back_substitute(pivots: list[_Pivot], ncols: int, free: Mapping[int, Fraction], rhs_col: int | None):
    x: dict[int, Fraction] = dict(free)
    for pv in reversed(pivots):
        s = Fraction(0)
        for k, v in pv.row.items():
            if k == pv.col:
                continue
            if k == rhs_col:
                s -= v
            elif k < ncols:
                xv = x.get(k)
                if xv:
                    s += v * xv
        x[pv.col] = -s / pv.row[pv.col]
    return [x.get(j, Fraction(0)) for j in range(ncols)]


def kernel_basis(m: Matrix) -> "Subspace":
    """Basis of the null space, one vector per free column (in increasing order)."""
    ncols = m.shape[1]
    pivots, _ = _eliminate(m.row_dicts(), ncols)
    pcols = {pv.col for pv in pivots}
    basis = [
        tuple(_back_substitute(pivots, ncols, {f: Fraction(1)}, None)) for f in range(ncols) if f not in pcols
    ]
    return Subspace(ncols, tuple(basis))


def solve(m: Matrix, b: Sequence) -> list[Fraction] | None:
    """Some ``x`` with ``m @ x == b`` (free variables set to zero), or ``None``."""
    nr, nc = m.shape
    b = [as_scalar(v) for v in b]
    if len(b) != nr:
        raise InputError(f"right-hand side has length {len(b)}, expected {nr}")
    bden = reduce(_lcm, (v.denominator for v in b), 1)
    rows = m.row_dicts()
    scale = bden * m.den
    for i, v in enumerate(b):
        if v:
            # m = N / den, so N x = den * b
            rows[i][nc] = int(v * scale)
    if bden != 1:
        # bden * N x = den * B
        rows = [{k: (v * bden if k < nc else v) for k, v in r.items()} for r in rows]
    pivots, leftover = _eliminate(rows, nc)
    if leftover:
        return None
    return _back_substitute(pivots, nc, {}, nc)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^ambient_dim with a linearly independent basis."""

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        for v in self.basis:
            if len(v) != self.ambient_dim:
                raise InputError("basis vector length differs from ambient dimension")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        """Greedy basis of the span (keeps input order, drops dependent vectors)."""
        chosen: list[tuple[Fraction, ...]] = []
        ech: list[_Pivot] = []
        for v in vectors:
            v = tuple(as_scalar(x) for x in v)
            if len(v) != ambient_dim:
                raise InputError("vector length differs from ambient dimension")
            if _reduce_against(ech, v, ambient_dim) is not None:
                chosen.append(v)
        return cls(ambient_dim, tuple(chosen))

    def matrix(self) -> Matrix:
        """Basis vectors as columns."""
        return Matrix.from_columns(self.ambient_dim, self.basis)

    def contains(self, v: Sequence) -> bool:
        if self.dim == 0:
            return all(as_scalar(x) == 0 for x in v)
        return solve(self.matrix(), v) is not None


def _reduce_against(ech: list[_Pivot], v: Sequence[Fraction], n: int) -> _Pivot | None:
    """Reduce ``v`` by the echelon rows in ``ech``; append and return the new pivot if independent."""
    den = reduce(_lcm, (x.denominator for x in v), 1)
    row = {i: int(x * den) for i, x in enumerate(v) if x}
    for pv in ech:
        a = row.get(pv.col)
        if a:
            piv = pv.row[pv.col]
            g = math.gcd(piv, a)
            s, t = piv // g, a // g
            new = {}
            for k in set(row) | set(pv.row):
                val = s * row.get(k, 0) - t * pv.row.get(k, 0)
                if val:
                    new[k] = val
            row = new
    if not row:
        return None
    pv = _Pivot(min(row), _primitive(row))
    ech.append(pv)
    return pv


class IncrementalSpan:
    """Echelon basis grown one vector at a time; used for greedy selections."""

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._ech: list[_Pivot] = []

    @property
    def dim(self) -> int:
        return len(self._ech)

    def add(self, v: Sequence) -> bool:
        """Add ``v``; return True iff it was independent of what is already there."""
        return _reduce_against(self._ech, [as_scalar(x) for x in v], self.ambient_dim) is not None


def quotient_dim(num: Subspace, den: Subspace) -> int:
    """dim(num / den); raises ContainmentError when den is not inside num."""
    if num.ambient_dim != den.ambient_dim:
        raise InputError("subspaces live in different ambient spaces")
    span = IncrementalSpan(num.ambient_dim)
    for v in num.basis:
        span.add(v)
    for i, v in enumerate(den.basis):
        if span.add(v):
            raise ContainmentError(f"basis vector {i} of the smaller space lies outside the larger one")
    return num.dim - den.dim


def column_space_rank(m: Matrix, extra: Sequence[Sequence] = ()) -> int:
    """Rank of ``m`` with the vectors in ``extra`` appended as columns."""
    if extra:
        m = hstack([m, Matrix.from_columns(m.shape[0], extra)])
    return rank(m)
