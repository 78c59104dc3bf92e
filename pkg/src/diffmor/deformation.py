"""Truncated formal deformations of a differential algebra morphism.

A deformation of order N stores coefficient lists ``muA, dA, muB, dB, phi``
of length N + 1 (index 0 is the base structure).  Gauges are pairs of matrix
power series ``F_A, F_B`` with identity constant term and act by

    mu' = F mu (F^-1 x F^-1),   d' = F d F^-1,   phi' = F_B phi F_A^-1.

Order-k data is compared with cochains through the layout
``((mu_A, mu_B, phi), (d_A, d_B, 0))`` in CM^2 of the self-coefficient triple.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cohomology import PreconditionError, betti_numbers, same_class
from .complexes import Cochain, ComplexSlice, cm_complex, cm_space
from .exactlin import InputError, Matrix, solve
from .problem import dense, sparse3
from .structures import (
    DiffAlgebraMorphism,
    PhiBimodule,
    Violation,
    eye,
    frac_array,
    self_coefficients,
    zeros,
)

__all__ = [
    "TruncatedDeformation",
    "GaugePair",
    "DeformationReport",
    "TrivializeResult",
    "validate_deformation",
    "infinitesimal",
    "order_cochain",
    "apply_gauge",
    "are_equivalent",
    "trivialize",
    "deformation_from_cochain",
]

KEYS = ("muA", "muB", "phi", "dA", "dB")


@dataclass(frozen=True, eq=False)
class TruncatedDeformation:
    base: DiffAlgebraMorphism
    order: int
    muA: tuple[np.ndarray, ...]
    dA: tuple[np.ndarray, ...]
    muB: tuple[np.ndarray, ...]
    dB: tuple[np.ndarray, ...]
    phi: tuple[np.ndarray, ...]
    name: str = ""

    def __post_init__(self):
        a, b = self.base.source.dim, self.base.target.dim
        shapes = {"muA": (a, a, a), "dA": (a, a), "muB": (b, b, b), "dB": (b, b), "phi": (b, a)}
        base = {
            "muA": self.base.source.mul,
            "dA": self.base.source.der,
            "muB": self.base.target.mul,
            "dB": self.base.target.der,
            "phi": self.base.phi,
        }
        for key, shape in shapes.items():
            coeffs = tuple(frac_array(c, shape) for c in getattr(self, key))
            if len(coeffs) != self.order + 1:
                raise InputError(f"{key} needs {self.order + 1} coefficients, got {len(coeffs)}")
            if not np.all(coeffs[0] == base[key]):
                raise InputError(f"{key}[0] must equal the base structure")
            object.__setattr__(self, key, coeffs)

    @property
    def weight(self) -> Fraction:
        return self.base.source.weight

    @classmethod
    def from_base(cls, f: DiffAlgebraMorphism, *, muA=(), dA=(), muB=(), dB=(), phi=(), order=None, name=""):
        """Deformation from the higher coefficients (t^1, t^2, ...)."""
        lists = {"muA": list(muA), "dA": list(dA), "muB": list(muB), "dB": list(dB), "phi": list(phi)}
        if order is None:
            order = max(len(v) for v in lists.values())
        a, b = f.source.dim, f.target.dim
        shapes = {"muA": (a, a, a), "dA": (a, a), "muB": (b, b, b), "dB": (b, b), "phi": (b, a)}
        base = {"muA": f.source.mul, "dA": f.source.der, "muB": f.target.mul, "dB": f.target.der, "phi": f.phi}
        full = {}
        for key, coeffs in lists.items():
            if len(coeffs) > order:
                raise InputError(f"{key} has more than {order} coefficients")
            full[key] = [base[key]] + coeffs + [zeros(*shapes[key]) for _ in range(order - len(coeffs))]
        return cls(f, order, name=name, **full)

    @classmethod
    def trivial(cls, f: DiffAlgebraMorphism, order: int) -> "TruncatedDeformation":
        return cls.from_base(f, order=order, name="trivial")

    def coefficient(self, key: str, i: int) -> np.ndarray:
        return getattr(self, key)[i]

    def truncate(self, order: int) -> "TruncatedDeformation":
        if order > self.order:
            raise InputError("cannot truncate to a higher order")
        return TruncatedDeformation(self.base, order, name=self.name, **{k: getattr(self, k)[: order + 1] for k in KEYS})

    def same_as(self, other: "TruncatedDeformation") -> bool:
        return self.order == other.order and all(
            np.all(x == y) for k in KEYS for x, y in zip(getattr(self, k), getattr(other, k))
        )

    def is_trivial(self, up_to: int | None = None) -> bool:
        top = self.order if up_to is None else min(up_to, self.order)
        return all(not np.any(getattr(self, k)[i] != 0) for k in KEYS for i in range(1, top + 1))

    def to_json(self, morphism: str) -> dict:
        return {
            "morphism": morphism,
            "order": self.order,
            "muA": [sparse3(m) for m in self.muA[1:]],
            "muB": [sparse3(m) for m in self.muB[1:]],
            "dA": [dense(m) for m in self.dA[1:]],
            "dB": [dense(m) for m in self.dB[1:]],
            "phi": [dense(m) for m in self.phi[1:]],
        }


@dataclass(frozen=True, eq=False)
class GaugePair:
    order: int
    FA: tuple[np.ndarray, ...]
    FB: tuple[np.ndarray, ...]

    def __post_init__(self):
        FA = tuple(frac_array(m) for m in self.FA)
        FB = tuple(frac_array(m) for m in self.FB)
        if len(FA) != self.order + 1 or len(FB) != self.order + 1:
            raise InputError("gauge series have the wrong length")
        for F in (FA, FB):
            if not np.all(F[0] == eye(F[0].shape[0])):
                raise InputError("gauge constant term must be the identity")
        object.__setattr__(self, "FA", FA)
        object.__setattr__(self, "FB", FB)

    @classmethod
    def identity(cls, a: int, b: int, order: int) -> "GaugePair":
        return cls(order, (eye(a),) + tuple(zeros(a, a) for _ in range(order)),
                   (eye(b),) + tuple(zeros(b, b) for _ in range(order)))

    @classmethod
    def random(cls, rng: random.Random, a: int, b: int, order: int, spread: int = 2) -> "GaugePair":
        def mat(n):
            return frac_array([[rng.randint(-spread, spread) for _ in range(n)] for _ in range(n)])

        return cls(order, (eye(a),) + tuple(mat(a) for _ in range(order)), (eye(b),) + tuple(mat(b) for _ in range(order)))

    def compose_after(self, other: "GaugePair") -> "GaugePair":
        """The gauge ``self o other`` (apply ``other`` first)."""
        return GaugePair(self.order, _series_mul(self.FA, other.FA), _series_mul(self.FB, other.FB))

    def is_identity(self) -> bool:
        return all(not np.any(m != 0) for F in (self.FA, self.FB) for m in F[1:])

    def as_dict(self) -> dict:
        return {"order": self.order, "FA": [dense(m) for m in self.FA], "FB": [dense(m) for m in self.FB]}


def _series_mul(F: Sequence[np.ndarray], G: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    n = len(F) - 1
    return tuple(sum((F[i].dot(G[k - i]) for i in range(k + 1)), zeros(*F[0].shape)) for k in range(n + 1))


def series_inverse(F: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    """Inverse of a matrix series with identity constant term, to the same order."""
    G = [eye(F[0].shape[0])]
    for k in range(1, len(F)):
        G.append(-sum((F[i].dot(G[k - i]) for i in range(1, k + 1)), zeros(*F[0].shape)))
    return tuple(G)


# ---------------------------------------------------------------- validation


@dataclass
class DeformationReport:
    order: int
    violations: list[tuple[int, Violation]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def equations(self) -> set[tuple[str, int]]:
        return {(v.axiom, n) for n, v in self.violations}

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "order": self.order,
            "violations": [dict(v.as_dict(), order=n) for n, v in self.violations],
        }


def _assoc(mu_i, mu_j):
    return np.einsum("abm,mco->abco", mu_j, mu_i) - np.einsum("bcm,amo->abco", mu_j, mu_i)


def _order_equations(T: TruncatedDeformation, n: int) -> list[tuple[str, str, np.ndarray, int]]:
    """All coefficient equations at order n as (object, equation, residual tensor, index arity)."""
    lam = T.weight
    out = []
    pairs = [(i, n - i) for i in range(n + 1)]
    triples = [(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]
    for X in ("A", "B"):
        mu, d = getattr(T, "mu" + X), getattr(T, "d" + X)
        dim = mu[0].shape[0]
        res = zeros(dim, dim, dim, dim)
        for i, j in pairs:
            res = res + _assoc(mu[i], mu[j])
        out.append((X, "associativity", res, 3))
        res = zeros(dim, dim, dim)
        for i, j in pairs:
            res = res + np.einsum("abm,om->abo", mu[j], d[i])
            res = res - np.einsum("mb,amo->abo", d[j], mu[i]) - np.einsum("ma,mbo->abo", d[j], mu[i])
        if lam:
            for i, j, k in triples:
                res = res - lam * np.einsum("ma,nb,mno->abo", d[j], d[k], mu[i])
        out.append((X, "leibniz", res, 2))
    phi, muA, muB, dA, dB = T.phi, T.muA, T.muB, T.dA, T.dB
    b, a = phi[0].shape
    res = zeros(a, a, b)
    for i, j in pairs:
        res = res + np.einsum("abm,om->abo", muA[j], phi[i])
    for i, j, k in triples:
        res = res - np.einsum("ma,nb,mno->abo", phi[j], phi[k], muB[i])
    out.append(("phi", "multiplicative", res, 2))
    res = zeros(b, a)
    for i, j in pairs:
        res = res + phi[i].dot(dA[j]) - dB[i].dot(phi[j])
    out.append(("phi", "intertwining", res.T, 1))
    return out


def _check_order(T: TruncatedDeformation, n: int) -> list[tuple[int, Violation]]:
    found = []
    for obj, eq, res, arity in _order_equations(T, n):
        bad = sorted({tuple(int(v) for v in row[:arity]) for row in np.argwhere(res != 0)})
        found.extend((n, Violation(obj, eq, idx)) for idx in bad)
    return found


def validate_deformation(T: TruncatedDeformation, *, up_to: int | None = None, threads: int = 1) -> DeformationReport:
    """Check the coefficient equations of every order 0..N (lam-complete operator identity)."""
    top = T.order if up_to is None else min(up_to, T.order)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        per_order = list(pool.map(lambda n: _check_order(T, n), range(top + 1)))
    rep = DeformationReport(top)
    for found in per_order:
        rep.violations.extend(found)
    return rep


# ---------------------------------------------------------------- cochains


def _flatten_mul(mu: np.ndarray) -> list:
    return list(np.transpose(mu, (2, 0, 1)).ravel())


def _unflatten_mul(v: Sequence, n: int) -> np.ndarray:
    return np.transpose(frac_array(list(v)).reshape(n, n, n), (1, 2, 0))


def order_cochain(T: TruncatedDeformation, k: int, P: PhiBimodule | None = None) -> Cochain:
    """The order-k coefficients as a CM^2 cochain of the self-coefficient triple."""
    P = P or self_coefficients(T.base)
    space = cm_space(P, 2)
    return Cochain.from_blocks(
        space,
        {
            "x.f": _flatten_mul(T.muA[k]),
            "x.g": _flatten_mul(T.muB[k]),
            "x.h": list(T.phi[k].ravel()),
            "y.f": list(T.dA[k].ravel()),
            "y.g": list(T.dB[k].ravel()),
        },
    )


def infinitesimal(T: TruncatedDeformation, P: PhiBimodule | None = None) -> Cochain:
    if T.order < 1:
        raise PreconditionError("deformation has no order-1 part")
    if not validate_deformation(T, up_to=1).ok:
        raise PreconditionError("deformation is not valid to order 1")
    return order_cochain(T, 1, P)


def deformation_from_cochain(f: DiffAlgebraMorphism, c: Cochain, name: str = "") -> TruncatedDeformation:
    """Order-1 deformation whose infinitesimal is ``c`` (the y.h block must vanish)."""
    if any(c.block("y.h")):
        raise PreconditionError("cochain has a nonzero operator part for the morphism")
    a, b = f.source.dim, f.target.dim
    return TruncatedDeformation.from_base(
        f,
        muA=[_unflatten_mul(c.block("x.f"), a)],
        muB=[_unflatten_mul(c.block("x.g"), b)],
        phi=[frac_array(list(c.block("x.h"))).reshape(b, a)],
        dA=[frac_array(list(c.block("y.f"))).reshape(a, a)],
        dB=[frac_array(list(c.block("y.g"))).reshape(b, b)],
        order=1,
        name=name,
    )


# ---------------------------------------------------------------- gauges


def apply_gauge(T: TruncatedDeformation, G: GaugePair) -> TruncatedDeformation:
    if G.order < T.order:
        raise InputError("gauge order is below the deformation order")
    N = T.order
    FA, FB = G.FA[: N + 1], G.FB[: N + 1]
    GA, GB = series_inverse(FA), series_inverse(FB)

    def conj_mul(mu, F, Ginv):
        inner = []
        for m in range(N + 1):
            acc = zeros(*mu[0].shape)
            for j in range(m + 1):
                for k in range(m - j + 1):
                    acc = acc + np.einsum("ka,lb,klo->abo", Ginv[k], Ginv[m - j - k], mu[j])
            inner.append(acc)
        return [
            sum((np.einsum("abm,om->abo", inner[n - i], F[i]) for i in range(n + 1)), zeros(*mu[0].shape))
            for n in range(N + 1)
        ]

    def conj_lin(x, F, Ginv):
        return [
            sum((F[i].dot(x[j]).dot(Ginv[n - i - j]) for i in range(n + 1) for j in range(n + 1 - i)), zeros(*x[0].shape))
            for n in range(N + 1)
        ]

    return TruncatedDeformation(
        T.base,
        N,
        muA=tuple(conj_mul(T.muA, FA, GA)),
        dA=tuple(conj_lin(T.dA, FA, GA)),
        muB=tuple(conj_mul(T.muB, FB, GB)),
        dB=tuple(conj_lin(T.dB, FB, GB)),
        phi=tuple(conj_lin(T.phi, FB, GA)),
        name=T.name,
    )


def _gauge_linear_map(f: DiffAlgebraMorphism, P: PhiBimodule) -> Matrix:
    """First-order effect of F = Id + t^k X on the order-k data, as a matrix.

    Columns: X_A entries (row-major) then X_B entries; rows: CM^2 coordinates.
    mu += X mu - mu(X x Id) - mu(Id x X),  d += X d - d X,  phi += X_B phi - phi X_A.
    """
    A, B = f.source, f.target
    a, b = A.dim, B.dim
    space = cm_space(P, 2)
    cols = []
    for which, n in (("A", a), ("B", b)):
        for r in range(n):
            for c in range(n):
                X = zeros(n, n)
                X[r, c] = Fraction(1)
                zA, zB = zeros(a, a), zeros(b, b)
                XA, XB = (X, zB) if which == "A" else (zA, X)
                parts = {
                    "x.f": _flatten_mul(_gauge_mul(A.mul, XA)),
                    "x.g": _flatten_mul(_gauge_mul(B.mul, XB)),
                    "x.h": list((XB.dot(f.phi) - f.phi.dot(XA)).ravel()),
                    "y.f": list((XA.dot(A.der) - A.der.dot(XA)).ravel()),
                    "y.g": list((XB.dot(B.der) - B.der.dot(XB)).ravel()),
                }
                cols.append(Cochain.from_blocks(space, parts).coords)
    return Matrix.from_columns(space.total_dim, cols)


def _gauge_mul(mu: np.ndarray, X: np.ndarray) -> np.ndarray:
    return (
        np.einsum("abm,om->abo", mu, X)
        - np.einsum("ma,mbo->abo", X, mu)
        - np.einsum("mb,amo->abo", X, mu)
    )


def _step_gauge(f: DiffAlgebraMorphism, x: Sequence[Fraction], k: int, order: int) -> GaugePair:
    a, b = f.source.dim, f.target.dim
    XA = frac_array(list(x[: a * a])).reshape(a, a)
    XB = frac_array(list(x[a * a :])).reshape(b, b)
    G = GaugePair.identity(a, b, order)
    FA, FB = list(G.FA), list(G.FB)
    FA[k], FB[k] = XA, XB
    return GaugePair(order, tuple(FA), tuple(FB))


def are_equivalent(T1: TruncatedDeformation, T2: TruncatedDeformation, search_order: int | None = None) -> GaugePair | None:
    """A gauge carrying T1 to T2 up to ``search_order``, solved greedily order by order."""
    if T1.order != T2.order:
        raise PreconditionError("deformations have different orders")
    N = T1.order if search_order is None else min(search_order, T1.order)
    f = T1.base
    P = self_coefficients(f)
    L = _gauge_linear_map(f, P)
    G = GaugePair.identity(f.source.dim, f.target.dim, T1.order)
    for k in range(1, N + 1):
        cur = apply_gauge(T1, G)
        rhs = [y - x for x, y in zip(order_cochain(cur, k, P).coords, order_cochain(T2, k, P).coords)]
        if not any(rhs):
            continue
        x = solve(L, rhs)
        if x is None:
            return None
        G = _step_gauge(f, x, k, T1.order).compose_after(G)
    return G


@dataclass
class TrivializeResult:
    gauge: GaugePair | None
    reached_order: int
    obstructed_order: int | None = None
    obstruction: Cochain | None = None
    cohomologically_trivial: bool | None = None
    h2: int | None = None

    @property
    def ok(self) -> bool:
        return self.gauge is not None

    def as_dict(self) -> dict:
        from .problem import to_jsonable

        return {
            "ok": self.ok,
            "reached_order": self.reached_order,
            "obstructed_order": self.obstructed_order,
            "h2": self.h2,
            "obstruction": None if self.obstruction is None else to_jsonable(list(self.obstruction.coords)),
            "obstruction_is_coboundary": self.cohomologically_trivial,
            "gauge": None if self.gauge is None else self.gauge.as_dict(),
        }


def trivialize(T: TruncatedDeformation, up_to: int | None = None, *, check_h2: bool = True) -> TrivializeResult:
    """Gauge T to the trivial deformation order by order.

    Each step solves for an infinitesimal gauge cancelling the current lowest
    nonzero order.  When that fails, the residual cocycle is returned as the
    obstruction together with whether it is a coboundary in CM^2.
    """
    N = T.order if up_to is None else up_to
    if N > T.order:
        raise PreconditionError(f"deformation has order {T.order} < {N}")
    rep = validate_deformation(T, up_to=N)
    if not rep.ok:
        raise PreconditionError("deformation is invalid")
    f = T.base
    P = self_coefficients(f)
    cm = cm_complex(P)
    h2 = betti_numbers(cm, 2)[2] if check_h2 else None
    L = _gauge_linear_map(f, P)
    G = GaugePair.identity(f.source.dim, f.target.dim, T.order)
    for k in range(1, N + 1):
        cur = apply_gauge(T, G)
        r = order_cochain(cur, k, P)
        if r.is_zero():
            continue
        x = solve(L, [-v for v in r.coords])
        if x is None:
            below: ComplexSlice = cm.slice(1)
            trivial_class = same_class(r, Cochain.zero(r.space), below)
            return TrivializeResult(None, k - 1, k, r, trivial_class, h2)
        G = _step_gauge(f, x, k, T.order).compose_after(G)
    return TrivializeResult(G, N, h2=h2)
