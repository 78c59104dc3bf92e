"""JSON problem files.

Layout::

    {
      "weight": "1/2",
      "algebras":  {"A": {"dim": 2, "mul": [[i, j, k, "c"], ...], "unit": [..], "der": [[..], ..]}},
      "morphisms": {"phi": {"source": "A", "target": "B", "matrix": [[..], ..]}},
      "bimodules": {"P": {"morphism": "phi", "M": BIMOD, "N": BIMOD, "psi": [[..], ..]}},
      "deformations": {"D": {"morphism": "phi", "order": 2,
                             "muA": [SPARSE, ...], "muB": [...],
                             "dA": [DENSE, ...], "dB": [...], "phi": [...]}}
    }

Rationals are ints or "p/q" strings.  A ``BIMOD`` is either ``"regular"`` or
``{"dim", "left": [[i, x, y, "c"], ..], "right": [[x, i, y, "c"], ..], "der"}``.
Deformation lists hold the coefficients of t^1 .. t^order.  Bimodules are
optional; every morphism gets self-coefficients under its own name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .exactlin import InputError, as_scalar, scalar_str
from .structures import (
    DiffAlgebraMorphism,
    DifferentialAlgebra,
    DifferentialBimodule,
    PhiBimodule,
    frac_array,
    regular_bimodule,
    self_coefficients,
)

__all__ = ["Problem", "load", "loads", "dumps_problem", "pretty_json", "sparse3", "dense", "to_jsonable"]


@dataclass
class Problem:
    weight: Fraction
    algebras: dict[str, DifferentialAlgebra] = field(default_factory=dict)
    morphisms: dict[str, DiffAlgebraMorphism] = field(default_factory=dict)
    bimodules: dict[str, PhiBimodule] = field(default_factory=dict)
    deformations: dict[str, Any] = field(default_factory=dict)

    def phi_bimodule(self, name: str | None = None) -> PhiBimodule:
        if name is None:
            if not self.bimodules:
                raise InputError("file defines no morphism")
            name = next(iter(self.bimodules))
        try:
            return self.bimodules[name]
        except KeyError:
            raise InputError(f"unknown bimodule or morphism {name!r}") from None


# ---------------------------------------------------------------- parsing


def _sparse(entries, shape: tuple[int, int, int]) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    if not isinstance(entries, list):
        raise InputError("sparse tensor must be a list of [i, j, k, c]")
    for e in entries:
        if not isinstance(e, list) or len(e) != 4:
            raise InputError(f"bad sparse entry {e!r}")
        i, j, k = e[:3]
        if not all(isinstance(v, int) for v in (i, j, k)):
            raise InputError(f"indices must be integers: {e!r}")
        if not (0 <= i < shape[0] and 0 <= j < shape[1] and 0 <= k < shape[2]):
            raise InputError(f"index out of range in {e!r} for shape {shape}")
        arr[i, j, k] += as_scalar(e[3])
    return arr


def _dense(rows, nrows: int, ncols: int) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != nrows or any(not isinstance(r, list) or len(r) != ncols for r in rows):
        raise InputError(f"expected a {nrows}x{ncols} dense matrix")
    return frac_array(rows, (nrows, ncols))


def _req(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing {key!r}")
    return obj[key]


def _algebra(name: str, entry: dict, weight: Fraction) -> DifferentialAlgebra:
    n = _req(entry, "dim", name)
    if not isinstance(n, int) or n < 1:
        raise InputError(f"{name}: dim must be a positive integer")
    mul = _sparse(_req(entry, "mul", name), (n, n, n))
    unit = _req(entry, "unit", name)
    if not isinstance(unit, list) or len(unit) != n:
        raise InputError(f"{name}: unit must have {n} entries")
    der = _dense(entry.get("der", [[0] * n for _ in range(n)]), n, n)
    return DifferentialAlgebra(n, mul, unit, weight, der, name=name)


def _bimodule(where: str, entry, over: DifferentialAlgebra) -> DifferentialBimodule:
    if entry == "regular":
        return regular_bimodule(over)
    n = _req(entry, "dim", where)
    if not isinstance(n, int) or n < 1:
        raise InputError(f"{where}: dim must be a positive integer")
    left = _sparse(_req(entry, "left", where), (over.dim, n, n))
    right = _sparse(_req(entry, "right", where), (n, over.dim, n))
    der = _dense(entry.get("der", [[0] * n for _ in range(n)]), n, n)
    return DifferentialBimodule(n, over, left, right, der, name=where)


def _deformation(name: str, entry: dict, morphisms: dict):
    from .deformation import TruncatedDeformation

    mname = _req(entry, "morphism", name)
    if mname not in morphisms:
        raise InputError(f"{name}: unknown morphism {mname!r}")
    f = morphisms[mname]
    order = _req(entry, "order", name)
    if not isinstance(order, int) or order < 0:
        raise InputError(f"{name}: order must be a non-negative integer")
    a, b = f.source.dim, f.target.dim

    def coeffs(key, build):
        raw = entry.get(key, [])
        if not isinstance(raw, list) or len(raw) > order:
            raise InputError(f"{name}: {key} must list at most {order} coefficients")
        out = [build(r) for r in raw]
        while len(out) < order:
            out.append(build(None))
        return out

    def mul_of(n):
        return lambda r: _sparse(r or [], (n, n, n))

    def lin_of(rows, cols):
        return lambda r: _dense(r if r is not None else [[0] * cols for _ in range(rows)], rows, cols)

    return TruncatedDeformation.from_base(
        f,
        muA=coeffs("muA", mul_of(a)),
        muB=coeffs("muB", mul_of(b)),
        dA=coeffs("dA", lin_of(a, a)),
        dB=coeffs("dB", lin_of(b, b)),
        phi=coeffs("phi", lin_of(b, a)),
        name=name,
    )


def loads(text: str) -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("top level must be an object")
    weight = as_scalar(data.get("weight", 0))
    prob = Problem(weight)
    for name, entry in _req(data, "algebras", "file").items():
        w = as_scalar(entry.get("weight", weight)) if isinstance(entry, dict) else weight
        prob.algebras[name] = _algebra(name, entry, w)
    for name, entry in data.get("morphisms", {}).items():
        src, tgt = _req(entry, "source", name), _req(entry, "target", name)
        for ref in (src, tgt):
            if ref not in prob.algebras:
                raise InputError(f"{name}: unknown algebra {ref!r}")
        A, B = prob.algebras[src], prob.algebras[tgt]
        prob.morphisms[name] = DiffAlgebraMorphism(A, B, _dense(_req(entry, "matrix", name), B.dim, A.dim), name=name)
        prob.bimodules[name] = self_coefficients(prob.morphisms[name])
    for name, entry in data.get("bimodules", {}).items():
        mname = _req(entry, "morphism", name)
        if mname not in prob.morphisms:
            raise InputError(f"{name}: unknown morphism {mname!r}")
        f = prob.morphisms[mname]
        M = _bimodule(f"{name}.M", _req(entry, "M", name), f.source)
        N = _bimodule(f"{name}.N", _req(entry, "N", name), f.target)
        psi = _dense(_req(entry, "psi", name), N.dim, M.dim)
        prob.bimodules[name] = PhiBimodule(f, M, N, psi, name=name)
    for name, entry in data.get("deformations", {}).items():
        prob.deformations[name] = _deformation(name, entry, prob.morphisms)
    return prob


def load(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return loads(text)


# ---------------------------------------------------------------- writing


def to_jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else scalar_str(x)
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: to_jsonable(v) for k, v in x.items()}
    if isinstance(x, np.integer):
        return int(x)
    return x


def sparse3(t: np.ndarray) -> list:
    return [[int(i), int(j), int(k), to_jsonable(t[i, j, k])] for i, j, k in np.argwhere(t != 0)]


def dense(m: np.ndarray) -> list:
    return to_jsonable(m)


def algebra_json(A: DifferentialAlgebra) -> dict:
    return {"dim": A.dim, "mul": sparse3(A.mul), "unit": to_jsonable(A.unit), "der": dense(A.der)}


def bimodule_json(M: DifferentialBimodule) -> dict:
    return {"dim": M.dim, "left": sparse3(M.left), "right": sparse3(M.right), "der": dense(M.der)}


def dumps_problem(
    algebras: dict[str, DifferentialAlgebra],
    morphisms: dict[str, tuple[str, str, DiffAlgebraMorphism]],
    bimodules: dict[str, tuple[str, PhiBimodule]] | None = None,
    deformations: dict[str, tuple[str, Any]] | None = None,
    weight: Fraction | None = None,
) -> str:
    """Serialize named structures; ``morphisms`` maps name -> (source name, target name, morphism)."""
    if weight is None:
        weight = next(iter(algebras.values())).weight
    out: dict[str, Any] = {"weight": to_jsonable(weight)}
    out["algebras"] = {k: algebra_json(v) for k, v in algebras.items()}
    out["morphisms"] = {
        k: {"source": s, "target": t, "matrix": dense(f.phi)} for k, (s, t, f) in morphisms.items()
    }
    if bimodules:
        out["bimodules"] = {
            k: {"morphism": m, "M": bimodule_json(P.M), "N": bimodule_json(P.N), "psi": dense(P.psi)}
            for k, (m, P) in bimodules.items()
        }
    if deformations:
        out["deformations"] = {k: T.to_json(m) for k, (m, T) in deformations.items()}
    return pretty_json(out)


def pretty_json(obj, indent: int = 0) -> str:
    """JSON with objects indented and each innermost list kept on one line."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {pretty_json(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list) and obj and any(isinstance(v, (list, dict)) for v in obj):
        items = [f"{pad}  {pretty_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj)
