"""Named fixtures and a random generator of valid small differential morphisms.

The random generator works from graded templates.  For weight 0 the operator is
``c * Euler + ad(v)``; for nonzero weight it is ``(sigma - id) / lam`` with
``sigma = inner(u) o scale(c)`` an algebra automorphism.  On the target the
matching operator uses ``phi(v)``, ``phi(u)`` and the same ``c``, so graded
morphisms commute with the operators.  A random change of basis hides the
grading afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from ..exactlin import solve, Matrix
from ..structures import (
    DiffAlgebraMorphism,
    DifferentialAlgebra,
    DifferentialBimodule,
    PhiBimodule,
    eye,
    frac_array,
    inverse,
    regular_bimodule,
    restrict_bimodule,
    self_coefficients,
    transport_morphism,
    zeros,
)

__all__ = ["FIXTURES", "fixture", "fixture_path", "random_fixture", "Graded", "CATALOG"]


def _alg(dim: int, products: dict[tuple[int, int], dict[int, int]], unit, der=None, weight=0, name="") -> DifferentialAlgebra:
    mul = zeros(dim, dim, dim)
    for (i, j), out in products.items():
        for k, c in out.items():
            mul[i, j, k] = Fraction(c)
    return DifferentialAlgebra(dim, mul, unit, weight, der if der is not None else zeros(dim, dim), name=name)


def field_algebra(weight=0) -> DifferentialAlgebra:
    return _alg(1, {(0, 0): {0: 1}}, [1], weight=weight, name="F")


def dual_numbers(der=None, weight=0) -> DifferentialAlgebra:
    return _alg(2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, [1, 0], der, weight, name="F[x]/x^2")


def upper_triangular(der=None, weight=0) -> DifferentialAlgebra:
    # basis E11, E12, E22
    prods = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 2): {1: 1}, (2, 2): {2: 1}}
    return _alg(3, prods, [1, 0, 1], der, weight, name="T2")


def diagonal(der=None, weight=0) -> DifferentialAlgebra:
    return _alg(2, {(0, 0): {0: 1}, (1, 1): {1: 1}}, [1, 1], der, weight, name="FxF")


def fix1() -> PhiBimodule:
    F = field_algebra()
    return self_coefficients(DiffAlgebraMorphism(F, F, [[1]], name="FIX-1"))


def fix2() -> PhiBimodule:
    A = dual_numbers(der=[[0, 0], [0, 1]])
    B = field_algebra()
    return self_coefficients(DiffAlgebraMorphism(A, B, [[1, 0]], name="FIX-2"))


def fix3() -> PhiBimodule:
    A = dual_numbers(der=[[0, 0], [0, 1]], weight=1)
    return self_coefficients(DiffAlgebraMorphism(A, A, [[1, 0], [0, 1]], name="FIX-3"))


def fix4() -> PhiBimodule:
    # d = [E11, -]: only E12 moves, d(E12) = E12
    A = upper_triangular(der=[[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    B = diagonal()
    return self_coefficients(DiffAlgebraMorphism(A, B, [[1, 0, 0], [0, 0, 1]], name="FIX-4"))


FIXTURES = {"FIX-1": fix1, "FIX-2": fix2, "FIX-3": fix3, "FIX-4": fix4}


def fixture(name: str) -> PhiBimodule:
    return FIXTURES[name]()


def fixture_path(name: str):
    """Path of the shipped JSON file for a named fixture."""
    return resources.files(__name__).joinpath(name.lower().replace("-", "") + ".json")


# ---------------------------------------------------------------- random corpus


@dataclass(frozen=True)
class Graded:
    """A graded algebra template: structure constants plus basis degrees."""

    name: str
    dim: int
    products: tuple[tuple[int, int, int, int], ...]
    unit: tuple[int, ...]
    degrees: tuple[int, ...]

    def algebra(self, der=None, weight=0) -> DifferentialAlgebra:
        prods: dict[tuple[int, int], dict[int, int]] = {}
        for i, j, k, c in self.products:
            prods.setdefault((i, j), {})[k] = c
        return _alg(self.dim, prods, list(self.unit), der, weight, self.name)


def _comm(dim, table):
    out = []
    for (i, j), k in table.items():
        out.append((i, j, k, 1))
        if i != j:
            out.append((j, i, k, 1))
    return tuple(out)


CATALOG = {
    "F": Graded("F", 1, ((0, 0, 0, 1),), (1,), (0,)),
    "D2": Graded("D2", 2, _comm(2, {(0, 0): 0, (0, 1): 1}), (1, 0), (0, 1)),
    "D3": Graded("D3", 3, _comm(3, {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 2}), (1, 0, 0), (0, 1, 2)),
    "Sq": Graded("Sq", 3, _comm(3, {(0, 0): 0, (0, 1): 1, (0, 2): 2}), (1, 0, 0), (0, 1, 1)),
    "T2": Graded("T2", 3, ((0, 0, 0, 1), (0, 1, 1, 1), (1, 2, 1, 1), (2, 2, 2, 1)), (1, 0, 1), (0, 1, 0)),
    "FF": Graded("FF", 2, ((0, 0, 0, 1), (1, 1, 1, 1)), (1, 1), (0, 0)),
    "FFF": Graded("FFF", 3, ((0, 0, 0, 1), (1, 1, 1, 1), (2, 2, 2, 1)), (1, 1, 1), (0, 0, 0)),
    "FxD2": Graded("FxD2", 3, ((0, 0, 0, 1),) + tuple((i + 1, j + 1, k + 1, 1) for i, j, k, _ in _comm(2, {(0, 0): 0, (0, 1): 1})), (1, 1, 0), (0, 0, 1)),
}

# (source, target, matrix) -- all graded and unital
MORPHISMS = [
    ("F", "F", [[1]]),
    ("D2", "D2", [[1, 0], [0, 1]]),
    ("D3", "D3", np.eye(3, dtype=int).tolist()),
    ("T2", "T2", np.eye(3, dtype=int).tolist()),
    ("Sq", "Sq", np.eye(3, dtype=int).tolist()),
    ("FF", "FF", [[1, 0], [0, 1]]),
    ("F", "D2", [[1], [0]]),
    ("F", "T2", [[1], [0], [1]]),
    ("F", "FF", [[1], [1]]),
    ("F", "D3", [[1], [0], [0]]),
    ("D2", "F", [[1, 0]]),
    ("D3", "F", [[1, 0, 0]]),
    ("Sq", "F", [[1, 0, 0]]),
    ("D3", "D2", [[1, 0, 0], [0, 1, 0]]),
    ("Sq", "D2", [[1, 0, 0], [0, 1, 0]]),
    ("Sq", "D2", [[1, 0, 0], [0, 1, 1]]),
    ("T2", "FF", [[1, 0, 0], [0, 0, 1]]),
    ("T2", "F", [[1, 0, 0]]),
    ("FF", "F", [[1, 0]]),
    ("FF", "FF", [[0, 1], [1, 0]]),
    ("FxD2", "D2", [[0, 1, 0], [0, 0, 1]]),
    ("FxD2", "FF", [[1, 0, 0], [0, 1, 0]]),
    ("D2", "FxD2", [[1, 0], [1, 0], [0, 1]]),
    ("FF", "FxD2", [[1, 0], [0, 1], [0, 0]]),
    ("FFF", "FF", [[1, 0, 0], [0, 0, 1]]),
]


def _left_mult(A: DifferentialAlgebra, u) -> np.ndarray:
    """Matrix of x -> u x."""
    return np.einsum("i,ijk->kj", frac_array(u), A.mul)


def _right_mult(A: DifferentialAlgebra, u) -> np.ndarray:
    return np.einsum("j,ijk->ki", frac_array(u), A.mul)


def _inverse_element(A: DifferentialAlgebra, u) -> np.ndarray | None:
    L = _left_mult(A, u)
    sol = solve(Matrix.from_dense(L.tolist(), A.dim), list(A.unit))
    return None if sol is None else frac_array(sol)


def _scale(t: Graded, c: Fraction) -> np.ndarray:
    out = zeros(t.dim, t.dim)
    for i, deg in enumerate(t.degrees):
        out[i, i] = c**deg
    return out


def _euler(t: Graded) -> np.ndarray:
    out = zeros(t.dim, t.dim)
    for i, deg in enumerate(t.degrees):
        out[i, i] = Fraction(deg)
    return out


def _small(rng: random.Random, lo=-2, hi=2) -> Fraction:
    return Fraction(rng.randint(lo, hi))


def _random_unit(rng: random.Random, A: DifferentialAlgebra) -> np.ndarray:
    while True:
        u = frac_array([_small(rng) for _ in range(A.dim)])
        if _inverse_element(A, u) is not None:
            return u


def _random_basis_change(rng: random.Random, n: int) -> np.ndarray:
    while True:
        P = frac_array([[_small(rng, -1, 1) + (1 if i == j else 0) for j in range(n)] for i in range(n)])
        try:
            inverse(P)
            return P
        except ValueError:
            continue


def random_fixture(rng: random.Random, weight=None, *, basis_change: bool = True) -> PhiBimodule:
    """A random valid phi-bimodule with algebras of dimension <= 3."""
    if weight is None:
        weight = rng.choice([Fraction(0), Fraction(1), Fraction(1, 2)])
    weight = Fraction(weight)
    src, tgt, mat = rng.choice(MORPHISMS)
    tA, tB = CATALOG[src], CATALOG[tgt]
    A0, B0 = tA.algebra(weight=weight), tB.algebra(weight=weight)
    phi = frac_array(mat, (tB.dim, tA.dim))
    c = Fraction(rng.choice([1, 2, -1, 3]))
    if weight == 0:
        v = frac_array([_small(rng) for _ in range(tA.dim)])
        w = phi.dot(v)
        dA = _left_mult(A0, v) - _right_mult(A0, v) + c * _euler(tA)
        dB = _left_mult(B0, w) - _right_mult(B0, w) + c * _euler(tB)
    else:
        u = _random_unit(rng, A0)
        ui = _inverse_element(A0, u)
        sigA = _left_mult(A0, u).dot(_right_mult(A0, ui)).dot(_scale(tA, c))
        uB, uBi = phi.dot(u), phi.dot(ui)
        sigB = _left_mult(B0, uB).dot(_right_mult(B0, uBi)).dot(_scale(tB, c))
        dA = (sigA - eye(tA.dim)) / weight
        dB = (sigB - eye(tB.dim)) / weight
    f = DiffAlgebraMorphism(A0.with_derivation(dA), B0.with_derivation(dB), phi, name=f"{src}->{tgt}")
    if basis_change:
        f = transport_morphism(f, _random_basis_change(rng, tA.dim), _random_basis_change(rng, tB.dim))
    if rng.random() < 0.25:
        # N = B, M = B pulled back to A, psi = id
        N = regular_bimodule(f.target)
        M = restrict_bimodule(N, f)
        M = DifferentialBimodule(M.dim, f.source, M.left, M.right, M.der, name="B|A")
        return PhiBimodule(f, M, N, eye(N.dim), name=f.name + " (B coefficients)")
    return self_coefficients(f)


# ---------------------------------------------------------------- shipped files


def sample_deformations(P: PhiBimodule, order: int = 2) -> dict:
    """Deterministic example deformations stored alongside each fixture file."""
    from ..cohomology import cohomology
    from ..complexes import cm_complex
    from ..deformation import GaugePair, TruncatedDeformation, apply_gauge, deformation_from_cochain

    f = P.morphism
    a, b = f.source.dim, f.target.dim
    rng = random.Random(20240229)
    trivial = TruncatedDeformation.trivial(f, order)
    gauged = apply_gauge(trivial, GaugePair.random(rng, a, b, order, spread=1))
    out = {"trivial": trivial, "gauged": gauged,
           "regauged": apply_gauge(gauged, GaugePair.random(rng, a, b, order, spread=1))}
    h2 = cohomology(cm_complex(P), 2)
    for rep in h2.representatives:
        if not any(rep.block("y.h")):
            out["obstructed"] = deformation_from_cochain(f, rep)
            break
    if f.name == "FIX-4":
        out["scaled_operator"] = TruncatedDeformation.from_base(f, dA=[f.source.der], order=order)
    return out


def fixture_document(name: str) -> str:
    from ..problem import dumps_problem

    P = fixture(name)
    f = P.morphism
    algebras = {"A": f.source, "B": f.target}
    defs = {k: ("phi", T) for k, T in sample_deformations(P).items()}
    return dumps_problem(algebras, {"phi": ("A", "B", f)}, deformations=defs)
