"""Finite-dimensional differential algebras of weight lambda and their modules.

Everything is given by structure constants over a fixed basis:

* ``mul[i, j, k]`` -- coefficient of ``e_k`` in ``e_i e_j``;
* ``der[j, i]``    -- coefficient of ``e_j`` in ``d(e_i)`` (so ``d(v) = der @ v``);
* ``left[i, x, y]``  -- coefficient of ``m_y`` in ``e_i m_x``;
* ``right[x, i, y]`` -- coefficient of ``m_y`` in ``m_x e_i``;
* linear maps (``phi``, ``psi``) act on column vectors: ``target.dim x source.dim``.

Arrays are numpy object arrays of ``Fraction`` and are frozen after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactlin import InputError, Matrix, as_scalar

__all__ = [
    "DifferentialAlgebra",
    "DifferentialBimodule",
    "DiffAlgebraMorphism",
    "PhiBimodule",
    "Violation",
    "ValidationReport",
    "validate",
    "regular_bimodule",
    "restrict_bimodule",
    "self_coefficients",
    "triangle_bimodule",
    "triangle_phi_bimodule",
    "mapping_ring",
    "mapping_module",
    "change_basis",
    "frac_array",
]


def frac_array(data, shape: tuple[int, ...] | None = None) -> np.ndarray:
    """Object array of Fractions (read-only) from nested sequences or an array."""
    arr = np.asarray(data, dtype=object)
    if shape is not None:
        if arr.size == 0 and int(np.prod(shape)) == 0:
            arr = np.empty(shape, dtype=object)
        if arr.shape != tuple(shape):
            raise InputError(f"expected shape {tuple(shape)}, got {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    flat = out.reshape(-1)
    for k, v in enumerate(arr.reshape(-1)):
        flat[k] = as_scalar(v)
    out.setflags(write=False)
    return out


def zeros(*shape: int) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.all(a == b))


@dataclass(frozen=True, eq=False)
class DifferentialAlgebra:
    """Unital associative algebra with a weight-lambda differential operator."""

    dim: int
    mul: np.ndarray
    unit: np.ndarray
    weight: Fraction
    der: np.ndarray
    name: str = ""

    def __post_init__(self):
        n = self.dim
        object.__setattr__(self, "mul", frac_array(self.mul, (n, n, n)))
        object.__setattr__(self, "unit", frac_array(self.unit, (n,)))
        object.__setattr__(self, "der", frac_array(self.der, (n, n)))
        object.__setattr__(self, "weight", as_scalar(self.weight))

    def product(self, u, v) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(u, dtype=object), np.asarray(v, dtype=object), self.mul)

    def d(self, v) -> np.ndarray:
        return self.der.dot(np.asarray(v, dtype=object))

    def der_matrix(self) -> Matrix:
        return Matrix.from_dense(self.der.tolist(), self.dim)

    def same_as(self, other: "DifferentialAlgebra") -> bool:
        return (
            self.dim == other.dim
            and self.weight == other.weight
            and _same(self.mul, other.mul)
            and _same(self.unit, other.unit)
            and _same(self.der, other.der)
        )

    def with_derivation(self, der, weight=None) -> "DifferentialAlgebra":
        return DifferentialAlgebra(
            self.dim, self.mul, self.unit, self.weight if weight is None else weight, der, self.name
        )


@dataclass(frozen=True, eq=False)
class DifferentialBimodule:
    """Bimodule over ``over`` with a compatible operator ``der``."""

    dim: int
    over: DifferentialAlgebra
    left: np.ndarray
    right: np.ndarray
    der: np.ndarray
    name: str = ""

    def __post_init__(self):
        n, a = self.dim, self.over.dim
        object.__setattr__(self, "left", frac_array(self.left, (a, n, n)))
        object.__setattr__(self, "right", frac_array(self.right, (n, a, n)))
        object.__setattr__(self, "der", frac_array(self.der, (n, n)))

    def act_left(self, a, m) -> np.ndarray:
        return np.einsum("i,x,ixy->y", np.asarray(a, dtype=object), np.asarray(m, dtype=object), self.left)

    def act_right(self, m, a) -> np.ndarray:
        return np.einsum("x,i,xiy->y", np.asarray(m, dtype=object), np.asarray(a, dtype=object), self.right)

    def same_actions(self, other: "DifferentialBimodule") -> bool:
        return (
            self.dim == other.dim
            and _same(self.left, other.left)
            and _same(self.right, other.right)
            and _same(self.der, other.der)
        )


@dataclass(frozen=True, eq=False)
class DiffAlgebraMorphism:
    source: DifferentialAlgebra
    target: DifferentialAlgebra
    phi: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "phi", frac_array(self.phi, (self.target.dim, self.source.dim)))


@dataclass(frozen=True, eq=False)
class PhiBimodule:
    """A triple <M, N, psi> over a morphism ``phi: A -> B``."""

    morphism: DiffAlgebraMorphism
    M: DifferentialBimodule
    N: DifferentialBimodule
    psi: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.M.over.dim != self.morphism.source.dim:
            raise InputError("M must be a bimodule over the source algebra")
        if self.N.over.dim != self.morphism.target.dim:
            raise InputError("N must be a bimodule over the target algebra")
        object.__setattr__(self, "psi", frac_array(self.psi, (self.N.dim, self.M.dim)))

    @property
    def A(self) -> DifferentialAlgebra:
        return self.morphism.source

    @property
    def B(self) -> DifferentialAlgebra:
        return self.morphism.target

    @property
    def N_over_A(self) -> DifferentialBimodule:
        """N regarded as an A-bimodule through phi."""
        return restrict_bimodule(self.N, self.morphism)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    obj: str
    axiom: str
    indices: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"object": self.obj, "axiom": self.axiom, "indices": list(self.indices)}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.as_dict() for v in self.violations]}


def _report(report: ValidationReport, obj: str, axiom: str, diff: np.ndarray, keep_axes: int) -> None:
    """Record a violation for every index tuple (first ``keep_axes`` axes) where ``diff`` is nonzero."""
    if diff.size == 0:
        return
    bad = np.argwhere(diff != 0)
    seen = sorted({tuple(int(v) for v in row[:keep_axes]) for row in bad})
    report.violations.extend(Violation(obj, axiom, idx) for idx in seen)


def _validate_algebra(A: DifferentialAlgebra, label: str) -> ValidationReport:
    rep = ValidationReport()
    c, D, lam, u = A.mul, A.der, A.weight, A.unit
    n = A.dim
    _report(rep, label, "associativity", np.einsum("ijm,mko->ijko", c, c) - np.einsum("jkm,imo->ijko", c, c), 3)
    _report(rep, label, "left_unit", np.einsum("i,ijk->jk", u, c) - eye(n), 1)
    _report(rep, label, "right_unit", np.einsum("j,ijk->ik", u, c) - eye(n), 1)
    lhs = np.einsum("ijm,om->ijo", c, D)
    rhs = (
        np.einsum("mi,mjo->ijo", D, c)
        + np.einsum("mj,imo->ijo", D, c)
        + lam * np.einsum("mi,nj,mno->ijo", D, D, c)
    )
    _report(rep, label, "leibniz", lhs - rhs, 2)
    return rep


def _validate_bimodule(M: DifferentialBimodule, label: str, differential: bool = True) -> ValidationReport:
    rep = ValidationReport()
    A = M.over
    c, l, r, u = A.mul, M.left, M.right, A.unit
    n = M.dim
    _report(rep, label, "left_assoc", np.einsum("ijk,kxy->ijxy", c, l) - np.einsum("jxz,izy->ijxy", l, l), 3)
    _report(rep, label, "right_assoc", np.einsum("ijk,xky->xijy", c, r) - np.einsum("xiz,zjy->xijy", r, r), 3)
    _report(rep, label, "middle_assoc", np.einsum("ixz,zjy->ixjy", l, r) - np.einsum("xjz,izy->ixjy", r, l), 3)
    _report(rep, label, "left_unit", np.einsum("i,ixy->xy", u, l) - eye(n), 1)
    _report(rep, label, "right_unit", np.einsum("i,xiy->xy", u, r) - eye(n), 1)
    if differential:
        DA, DM, lam = A.der, M.der, A.weight
        lhs = np.einsum("ixz,yz->ixy", l, DM)
        rhs = (
            np.einsum("ki,kxy->ixy", DA, l)
            + np.einsum("zx,izy->ixy", DM, l)
            + lam * np.einsum("ki,zx,kzy->ixy", DA, DM, l)
        )
        _report(rep, label, "left_leibniz", lhs - rhs, 2)
        lhs = np.einsum("xiz,yz->xiy", r, DM)
        rhs = (
            np.einsum("ki,xky->xiy", DA, r)
            + np.einsum("zx,ziy->xiy", DM, r)
            + lam * np.einsum("ki,zx,zky->xiy", DA, DM, r)
        )
        _report(rep, label, "right_leibniz", lhs - rhs, 2)
    return rep


def _validate_morphism(f: DiffAlgebraMorphism, label: str) -> ValidationReport:
    rep = ValidationReport()
    A, B, phi = f.source, f.target, f.phi
    if A.weight != B.weight:
        rep.violations.append(Violation(label, "weight_mismatch", ()))
    lhs = np.einsum("ijk,ok->ijo", A.mul, phi)
    rhs = np.einsum("ki,lj,klo->ijo", phi, phi, B.mul)
    _report(rep, label, "multiplicative", lhs - rhs, 2)
    _report(rep, label, "unital", (phi.dot(A.unit) - B.unit)[None, :], 1)
    _report(rep, label, "commutes_with_d", (phi.dot(A.der) - B.der.dot(phi)).T, 1)
    return rep


def _validate_phi_bimodule(P: PhiBimodule, label: str, differential: bool = True) -> ValidationReport:
    rep = ValidationReport()
    phi, psi = P.morphism.phi, P.psi
    lM, rM, lN, rN = P.M.left, P.M.right, P.N.left, P.N.right
    lhs = np.einsum("ixz,yz->ixy", lM, psi)
    rhs = np.einsum("ki,zx,kzy->ixy", phi, psi, lN)
    _report(rep, label, "psi_left", lhs - rhs, 2)
    lhs = np.einsum("xiz,yz->xiy", rM, psi)
    rhs = np.einsum("ki,zx,zky->xiy", phi, psi, rN)
    _report(rep, label, "psi_right", lhs - rhs, 2)
    if differential:
        _report(rep, label, "psi_commutes_with_d", (psi.dot(P.M.der) - P.N.der.dot(psi)).T, 1)
    return rep


def validate(obj, *, differential: bool = True, label: str | None = None) -> ValidationReport:
    """Check every axiom on basis tuples and list each violation.

    With ``differential=False`` only the associative (bi)module axioms are
    checked; this is how triangle bimodules are validated.
    """
    if isinstance(obj, DifferentialAlgebra):
        return _validate_algebra(obj, label or obj.name or "algebra")
    if isinstance(obj, DifferentialBimodule):
        return _validate_bimodule(obj, label or obj.name or "bimodule", differential)
    if isinstance(obj, DiffAlgebraMorphism):
        rep = _validate_algebra(obj.source, "source")
        rep.extend(_validate_algebra(obj.target, "target"))
        rep.extend(_validate_morphism(obj, label or obj.name or "morphism"))
        return rep
    if isinstance(obj, PhiBimodule):
        rep = validate(obj.morphism)
        rep.extend(_validate_bimodule(obj.M, "M", differential))
        rep.extend(_validate_bimodule(obj.N, "N", differential))
        rep.extend(_validate_phi_bimodule(obj, label or obj.name or "psi", differential))
        return rep
    raise InputError(f"cannot validate {type(obj).__name__}")


# ---------------------------------------------------------------- constructions


def regular_bimodule(A: DifferentialAlgebra) -> DifferentialBimodule:
    """A as a differential bimodule over itself."""
    return DifferentialBimodule(A.dim, A, A.mul, A.mul, A.der, name=A.name)


def restrict_bimodule(N: DifferentialBimodule, f: DiffAlgebraMorphism) -> DifferentialBimodule:
    """Pull the action on ``N`` back along ``f`` (N over the target becomes a bimodule over the source)."""
    if N.over.dim != f.target.dim:
        raise InputError("bimodule is not over the morphism's target")
    left = np.einsum("ji,jxy->ixy", f.phi, N.left)
    right = np.einsum("ji,xjy->xiy", f.phi, N.right)
    return DifferentialBimodule(N.dim, f.source, left, right, N.der, name=N.name)


def self_coefficients(f: DiffAlgebraMorphism) -> PhiBimodule:
    """The phi-bimodule <A, B, phi>."""
    return PhiBimodule(f, regular_bimodule(f.source), regular_bimodule(f.target), f.phi, name=f.name)


def triangle_bimodule(M: DifferentialBimodule) -> DifferentialBimodule:
    """Bimodule with actions a |> m = (a + lam d(a)) m and m <| a = m (a + lam d(a))."""
    A = M.over
    twist = eye(A.dim) + A.weight * A.der
    left = np.einsum("ji,jxy->ixy", twist, M.left)
    right = np.einsum("ji,xjy->xiy", twist, M.right)
    return DifferentialBimodule(M.dim, A, left, right, M.der, name=M.name)


def triangle_phi_bimodule(P: PhiBimodule) -> PhiBimodule:
    return PhiBimodule(P.morphism, triangle_bimodule(P.M), triangle_bimodule(P.N), P.psi, name=P.name)


def mapping_ring(f: DiffAlgebraMorphism) -> DifferentialAlgebra:
    """The algebra A + B + B.phi with phi.a = phi(a).phi and phi^2 = 0.

    Basis order: A basis, then B basis, then the B.phi copy.
    """
    A, B, phi = f.source, f.target, f.phi
    na, nb = A.dim, B.dim
    n = na + 2 * nb
    sa, sb, sp = slice(0, na), slice(na, na + nb), slice(na + nb, n)
    c = zeros(n, n, n)
    c[sa, sa, sa] = A.mul
    c[sb, sb, sb] = B.mul
    c[sb, sp, sp] = B.mul
    # (b phi) a = (b phi(a)) phi
    c[sp, sa, sp] = np.einsum("ka,bko->bao", phi, B.mul)
    unit = np.concatenate([A.unit, B.unit, zeros(nb)])
    der = zeros(n, n)
    der[sa, sa] = A.der
    der[sb, sb] = B.der
    der[sp, sp] = B.der
    name = f"{f.name}!" if f.name else "phi!"
    return DifferentialAlgebra(n, c, unit, A.weight, der, name=name)


def mapping_module(P: PhiBimodule, ring: DifferentialAlgebra | None = None) -> DifferentialBimodule:
    """The bimodule M + N + N.phi over the mapping ring (basis order M, N, N.phi)."""
    f = P.morphism
    R = ring if ring is not None else mapping_ring(f)
    na, nb = f.source.dim, f.target.dim
    m, nn = P.M.dim, P.N.dim
    w = m + 2 * nn
    ra, rb, rp = slice(0, na), slice(na, na + nb), slice(na + nb, na + 2 * nb)
    xm, xn, xp = slice(0, m), slice(m, m + nn), slice(m + nn, w)
    lN, rN = P.N.left, P.N.right
    left = zeros(R.dim, w, w)
    left[ra, xm, xm] = P.M.left
    left[rb, xn, xn] = lN
    left[rb, xp, xp] = lN
    # (b phi) m = (b psi(m)) phi
    left[rp, xm, xp] = np.einsum("zx,bzy->bxy", P.psi, lN)
    right = zeros(w, R.dim, w)
    right[xm, ra, xm] = P.M.right
    right[xn, rb, xn] = rN
    # (n phi) a = (n phi(a)) phi
    right[xp, ra, xp] = np.einsum("ka,xky->xay", f.phi, rN)
    # n (b phi) = (n b) phi
    right[xn, rp, xp] = rN
    der = zeros(w, w)
    der[xm, xm] = P.M.der
    der[xn, xn] = P.N.der
    der[xp, xp] = P.N.der
    return DifferentialBimodule(w, R, left, right, der, name=f"{P.name}!" if P.name else "psi!")


def change_basis(A: DifferentialAlgebra, P) -> DifferentialAlgebra:
    """Same algebra in the basis e'_i = sum_j P[j, i] e_j (P invertible)."""
    P = frac_array(P, (A.dim, A.dim))
    Pinv = _inverse(P)
    mul = np.einsum("ai,bj,abc,kc->ijk", P, P, A.mul, Pinv)
    return DifferentialAlgebra(A.dim, mul, Pinv.dot(A.unit), A.weight, Pinv.dot(A.der).dot(P), A.name)


def _inverse(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    aug = [list(P[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise InputError("change of basis is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return frac_array([row[n:] for row in aug], (n, n))


def inverse(P) -> np.ndarray:
    return _inverse(frac_array(P))


def transport_morphism(f: DiffAlgebraMorphism, PA, PB) -> DiffAlgebraMorphism:
    """``f`` expressed after changing bases of source (PA) and target (PB)."""
    A2, B2 = change_basis(f.source, PA), change_basis(f.target, PB)
    phi = _inverse(frac_array(PB)).dot(f.phi).dot(frac_array(PA))
    return DiffAlgebraMorphism(A2, B2, phi, f.name)


def vector(values: Sequence) -> np.ndarray:
    return frac_array(list(values))
