"""Cochain complexes of differential algebras and their morphisms as exact matrices.

A cochain ``f: X^{(x)n} -> Y`` is flattened row-major: coordinate
``y * dim(X)**n + lex(i_1, ..., i_n)`` holds the ``e_y`` coefficient of
``f(e_{i_1}, ..., e_{i_n})``.  Spaces with several blocks are concatenated
block by block in the order listed by their ``CochainSpace``.

Conventions used throughout:

* ``Phi^0 = -d_M`` and the degree-0 map of the morphism complex into its
  triangled copy is ``(-d_M, -d_N)``;
* the cone differential on ``CM^n`` is ``(x, y) -> (delta x, delta' y + (-1)^n pi x)``
  for every ``n >= 0``;
* the comparison map on ``CM^n`` is ``diag(tau, (-1)^n tau')``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .exactlin import InputError, Matrix, as_scalar, block, kron, kron_all, matrix_sum
from .structures import (
    DifferentialAlgebra,
    DifferentialBimodule,
    PhiBimodule,
    mapping_module,
    mapping_ring,
    restrict_bimodule,
    triangle_bimodule,
    triangle_phi_bimodule,
)

__all__ = [
    "Block",
    "CochainSpace",
    "Cochain",
    "ComplexSlice",
    "CochainComplex",
    "alg_space",
    "da_space",
    "morphism_space",
    "cm_space",
    "hochschild_delta",
    "phi_cap",
    "do_delta",
    "da_delta",
    "morphism_delta",
    "pi_map",
    "rho_delta",
    "tau_phi",
    "tau_full",
    "alg_complex",
    "do_complex",
    "da_complex",
    "morphism_complex",
    "cm_complex",
    "mapping_pair",
]


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class Block:
    """Multilinear maps ``X^(x)arity -> Y`` with ``dim X = domain``, ``dim Y = codomain``."""

    name: str
    arity: int
    domain: int
    codomain: int

    @property
    def size(self) -> int:
        return self.codomain * self.domain**self.arity


@dataclass(frozen=True)
class CochainSpace:
    degree: int
    blocks: tuple[Block, ...]

    @property
    def total_dim(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def offset(self, name: str) -> int:
        off = 0
        for b in self.blocks:
            if b.name == name:
                return off
            off += b.size
        raise KeyError(name)

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def prefixed(self, prefix: str) -> tuple[Block, ...]:
        return tuple(Block(prefix + b.name, b.arity, b.domain, b.codomain) for b in self.blocks)


@dataclass(frozen=True)
class Cochain:
    space: CochainSpace
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(as_scalar(c) for c in self.coords)
        if len(coords) != self.space.total_dim:
            raise InputError(f"cochain has {len(coords)} coordinates, space has {self.space.total_dim}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, space: CochainSpace) -> "Cochain":
        return cls(space, (Fraction(0),) * space.total_dim)

    @classmethod
    def from_blocks(cls, space: CochainSpace, parts: dict[str, Sequence]) -> "Cochain":
        coords = [Fraction(0)] * space.total_dim
        for name, vec in parts.items():
            off, size = space.offset(name), space.block(name).size
            if len(vec) != size:
                raise InputError(f"block {name!r} needs {size} coordinates, got {len(vec)}")
            coords[off : off + size] = [as_scalar(v) for v in vec]
        return cls(space, tuple(coords))

    def block(self, name: str) -> tuple[Fraction, ...]:
        off = self.space.offset(name)
        return self.coords[off : off + self.space.block(name).size]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Cochain":
        return Cochain(self.space, tuple(-a for a in self.coords))

    def scale(self, c) -> "Cochain":
        c = as_scalar(c)
        return Cochain(self.space, tuple(c * a for a in self.coords))


@dataclass(frozen=True)
class ComplexSlice:
    """The differential from degree ``degree`` to ``degree + 1``."""

    degree: int
    source: CochainSpace
    target: CochainSpace
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.total_dim, self.source.total_dim):
            raise InputError("slice matrix does not match its spaces")

    def apply(self, c: Cochain) -> Cochain:
        return Cochain(self.target, tuple(self.matrix @ c.coords))


def alg_space(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> CochainSpace:
    return CochainSpace(n, (Block("f", n, A.dim, M.dim),))


def da_space(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> CochainSpace:
    blocks = [Block("f", n, A.dim, M.dim)]
    if n >= 1:
        blocks.append(Block("g", n - 1, A.dim, M.dim))
    return CochainSpace(n, tuple(blocks))


def morphism_space(P: PhiBimodule, n: int) -> CochainSpace:
    a, b = P.A.dim, P.B.dim
    blocks = [Block("f", n, a, P.M.dim), Block("g", n, b, P.N.dim)]
    if n >= 1:
        blocks.append(Block("h", n - 1, a, P.N.dim))
    return CochainSpace(n, tuple(blocks))


def cm_space(P: PhiBimodule, n: int) -> CochainSpace:
    blocks = morphism_space(P, n).prefixed("x.")
    if n >= 1:
        blocks += morphism_space(P, n - 1).prefixed("y.")
    return CochainSpace(n, blocks)


# ---------------------------------------------------------------- matrix helpers


def _ident(n: int) -> Matrix:
    return Matrix.identity(n)


def _dense(arr: np.ndarray) -> Matrix:
    return Matrix.from_dense(arr.tolist(), arr.shape[1])


def _embed(total: int, offset: int, size: int) -> Matrix:
    """Inclusion of a coordinate block: column i goes to row offset + i."""
    idx = np.arange(size, dtype=np.int64)
    return Matrix((total, size), idx + offset, idx, np.array([1] * size, dtype=object))


def _tensor_matrix(t: np.ndarray, row_axes: Sequence[int], col_axes: Sequence[int]) -> Matrix:
    """Reshape a small tensor into a matrix, rows/cols flattened row-major over the given axes."""
    t = np.transpose(t, tuple(row_axes) + tuple(col_axes))
    nr = int(np.prod([t.shape[i] for i in range(len(row_axes))], dtype=np.int64))
    return Matrix.from_dense(t.reshape(nr, -1).tolist(), int(t.size // nr) if nr else 0)


def _sum(mats: Iterable[Matrix], shape: tuple[int, int]) -> Matrix:
    return matrix_sum(mats, shape)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


# ---------------------------------------------------------------- Hochschild


def hochschild_matrix(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> Matrix:
    a, m = A.dim, M.dim
    if M.over.dim != a:
        raise InputError("bimodule is not over this algebra")
    an = a**n
    shape = (m * a ** (n + 1), m * an)
    terms = []
    # a_1 f(a_2, ..., a_{n+1}):  L[(y, j), y'] = left[j, y', y]
    terms.append(kron(_tensor_matrix(M.left, (2, 0), (1,)), _ident(an)))
    # f(..., a_i a_{i+1}, ...)
    mul = _tensor_matrix(A.mul, (0, 1), (2,))
    for i in range(1, n + 1):
        terms.append(kron_all(_ident(m * a ** (i - 1)), mul, _ident(a ** (n - i))).scale(_sign(i)))
    # f(a_1, ..., a_n) a_{n+1}:  row y a^{n+1} + K a + j, col y' a^n + K
    nz = np.argwhere(M.right != 0)
    if len(nz):
        yp, j, y = nz[:, 0], nz[:, 1], nz[:, 2]
        vals = [M.right[tuple(t)] for t in nz]
        den = reduce(lambda u, v: u * v // np.gcd(u, v), (x.denominator for x in vals), 1)
        nums = np.array([x.numerator * (den // x.denominator) for x in vals], dtype=object)
        K = np.arange(an, dtype=np.int64)
        rows = (y * a ** (n + 1))[:, None] + K[None, :] * a + j[:, None]
        cols = (yp * an)[:, None] + K[None, :]
        num = np.repeat(nums, an)
        terms.append(Matrix(shape, rows.ravel(), cols.ravel(), num * _sign(n + 1), den))
    return _sum(terms, shape)


def hochschild_delta(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> ComplexSlice:
    """The Hochschild differential C^n(A, M) -> C^{n+1}(A, M)."""
    return ComplexSlice(n, alg_space(A, M, n), alg_space(A, M, n + 1), hochschild_matrix(A, M, n))


def phi_cap(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> Matrix:
    """Phi^n: C^n(A, M) -> C^n(A, |>M<|) (same coordinates).

    Sum over nonempty slot sets S of lam^{|S|-1} f(d applied in S) minus d_M f.
    """
    a, m = A.dim, M.dim
    shape = (m * a**n, m * a**n)
    dmat = _dense(M.der)
    out = -kron(dmat, _ident(a**n))
    if n == 0:
        return out
    dT = _dense(A.der).T
    ident = _ident(a)
    lam = A.weight
    terms = [out]
    for k in range(1, n + 1):
        coeff = lam ** (k - 1)
        if coeff == 0:
            break
        for S in combinations(range(n), k):
            factors = [dT if s in S else ident for s in range(n)]
            terms.append(kron_all(_ident(m), *factors).scale(coeff))
    return _sum(terms, shape)


def do_delta(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> ComplexSlice:
    """Hochschild differential with coefficients in the triangled bimodule."""
    return hochschild_delta(A, triangle_bimodule(M), n)


def da_delta(A: DifferentialAlgebra, M: DifferentialBimodule, n: int) -> ComplexSlice:
    """(f, g) -> (df, -d_DO g - Phi f); at degree 0, x -> (dx, -Phi^0 x)."""
    src, tgt = da_space(A, M, n), da_space(A, M, n + 1)
    alg = hochschild_matrix(A, M, n)
    phi = -phi_cap(A, M, n)
    if n == 0:
        mat = block([[alg], [phi]])
    else:
        tri = triangle_bimodule(M)
        mat = block([[alg, None], [phi, -hochschild_matrix(A, tri, n - 1)]], tgt.sizes, src.sizes)
    return ComplexSlice(n, src, tgt, mat)


# ---------------------------------------------------------------- morphism complex


def _pullback_matrix(P: PhiBimodule, n: int) -> Matrix:
    """g -> g o phi^(x)n from C^n(B, N) to C^n(A, N)."""
    phiT = _dense(P.morphism.phi).T
    return kron_all(_ident(P.N.dim), *([phiT] * n))


def morphism_delta(P: PhiBimodule, n: int) -> ComplexSlice:
    """(f, g, h) -> (df, dg, psi f - g phi^n - dh); at degree 0, (m, n) -> (dm, dn, psi m - n)."""
    A, B = P.A, P.B
    NA = restrict_bimodule(P.N, P.morphism)
    src, tgt = morphism_space(P, n), morphism_space(P, n + 1)
    psi = kron(_dense(P.psi), _ident(A.dim**n))
    pull = -_pullback_matrix(P, n)
    row3 = [psi, pull]
    if n >= 1:
        row3.append(-hochschild_matrix(A, NA, n - 1))
    rows = [
        [hochschild_matrix(A, P.M, n), None] + ([None] if n >= 1 else []),
        [None, hochschild_matrix(B, P.N, n)] + ([None] if n >= 1 else []),
        row3,
    ]
    return ComplexSlice(n, src, tgt, block(rows, tgt.sizes, src.sizes))


def pi_map(P: PhiBimodule, n: int) -> Matrix:
    """diag(Phi_{A,M}, Phi_{B,N}, Phi^{n-1}_{A,N}); at degree 0 this is (-d_M, -d_N)."""
    src = morphism_space(P, n)
    NA = restrict_bimodule(P.N, P.morphism)
    diag = [phi_cap(P.A, P.M, n), phi_cap(P.B, P.N, n)]
    if n >= 1:
        diag.append(phi_cap(P.A, NA, n - 1))
    k = len(diag)
    rows = [[diag[i] if i == j else None for j in range(k)] for i in range(k)]
    return block(rows, src.sizes, src.sizes)


def rho_delta(P: PhiBimodule, n: int) -> ComplexSlice:
    """(x, y) -> (delta x, delta' y + (-1)^n pi x) on CM^n = C^n(phi, psi) + C^{n-1}(phi, |>psi<|)."""
    src, tgt = cm_space(P, n), cm_space(P, n + 1)
    dx = morphism_delta(P, n).matrix
    pi = pi_map(P, n).scale(_sign(n))
    if n == 0:
        mat = block([[dx], [pi]])
    else:
        dy = morphism_delta(triangle_phi_bimodule(P), n - 1).matrix
        mat = block([[dx, None], [pi, dy]])
    return ComplexSlice(n, src, tgt, mat)


# ---------------------------------------------------------------- comparison maps


def mapping_pair(P: PhiBimodule) -> tuple[DifferentialAlgebra, DifferentialBimodule]:
    """The mapping ring and mapping module of ``P``."""
    R = mapping_ring(P.morphism)
    return R, mapping_module(P, R)


def tau_phi(P: PhiBimodule, n: int) -> Matrix:
    """The comparison map C^n(phi, psi) -> C^n(R, W) into the mapping ring R and module W.

    Input words of basis types in {A, B, B.phi}:
      all A      -> f(a...)
      all B      -> g(b...)
      B..B (B.phi) A..A  -> g(b..., phi(a)...) . phi
      (B.phi) A..A       additionally gets  b h(a...) . phi
      anything else -> 0
    """
    na, nb = P.A.dim, P.B.dim
    m, nn = P.M.dim, P.N.dim
    r = na + 2 * nb
    w = m + 2 * nn
    src = morphism_space(P, n)
    shape = (w * r**n, src.total_dim)
    iA, iB, iP = _embed(r, 0, na), _embed(r, na, nb), _embed(r, na + nb, nb)
    iM, iN, iNP = _embed(w, 0, m), _embed(w, m, nn), _embed(w, m + nn, nn)
    f_part = kron_all(iM, *([iA] * n))
    g_part = kron_all(iN, *([iB] * n))
    if n >= 1:
        iAphiT = iA @ _dense(P.morphism.phi).T
        for k in range(1, n + 1):
            g_part = g_part + kron_all(iNP, *([iB] * (k - 1)), iP, *([iAphiT] * (n - k)))
        # b h(a_2, ..., a_n) phi:  L[(Nphi y, Bphi b), y'] = left_N[b, y', y]
        left = np.zeros((w, r, nn), dtype=object)
        left.fill(Fraction(0))
        left[m + nn :, na + nb :, :] = np.transpose(P.N.left, (2, 0, 1))
        lmat = Matrix.from_dense(left.reshape(w * r, nn).tolist(), nn)
        h_part = kron_all(lmat, *([iA] * (n - 1)))
        return block([[f_part, g_part, h_part]], [shape[0]], src.sizes)
    return block([[f_part, g_part]], [shape[0]], src.sizes)


def tau_full(P: PhiBimodule, n: int) -> Matrix:
    """CM^n(phi, psi) -> C^n_DA(R, W): diag(tau, (-1)^n tau of the triangled triple)."""
    t = tau_phi(P, n)
    if n == 0:
        return t
    t2 = tau_phi(triangle_phi_bimodule(P), n - 1).scale(_sign(n))
    return block([[t, None], [None, t2]])


# ---------------------------------------------------------------- complexes


class CochainComplex:
    """Lazily built, cached slices ``delta^n`` of one complex."""

    def __init__(self, name: str, space: Callable[[int], CochainSpace], delta: Callable[[int], ComplexSlice]):
        self.name = name
        self._space = space
        self._delta = delta
        self._cache: dict[int, ComplexSlice] = {}
        self._lock = threading.Lock()

    def space(self, n: int) -> CochainSpace:
        if n < 0:
            return CochainSpace(n, ())
        return self._space(n)

    def slice(self, n: int) -> ComplexSlice:
        if n < 0:
            return ComplexSlice(n, self.space(n), self.space(n + 1), Matrix.zeros(self.space(n + 1).total_dim, 0))
        with self._lock:
            hit = self._cache.get(n)
        if hit is None:
            hit = self._delta(n)
            with self._lock:
                hit = self._cache.setdefault(n, hit)
        return hit

    def __repr__(self) -> str:
        return f"CochainComplex({self.name!r})"


def alg_complex(A: DifferentialAlgebra, M: DifferentialBimodule) -> CochainComplex:
    return CochainComplex("alg", lambda n: alg_space(A, M, n), lambda n: hochschild_delta(A, M, n))


def do_complex(A: DifferentialAlgebra, M: DifferentialBimodule) -> CochainComplex:
    tri = triangle_bimodule(M)
    return CochainComplex("do", lambda n: alg_space(A, tri, n), lambda n: hochschild_delta(A, tri, n))


def da_complex(A: DifferentialAlgebra, M: DifferentialBimodule) -> CochainComplex:
    return CochainComplex("da", lambda n: da_space(A, M, n), lambda n: da_delta(A, M, n))


def morphism_complex(P: PhiBimodule) -> CochainComplex:
    return CochainComplex("mor", lambda n: morphism_space(P, n), lambda n: morphism_delta(P, n))


def cm_complex(P: PhiBimodule) -> CochainComplex:
    return CochainComplex("cm", lambda n: cm_space(P, n), lambda n: rho_delta(P, n))
