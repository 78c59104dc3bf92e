"""Betti numbers, representative cocycles and class membership."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .complexes import Cochain, CochainComplex, ComplexSlice
from .exactlin import IncrementalSpan, Matrix, kernel_basis, rank, solve

__all__ = [
    "BrokenComplexError",
    "PreconditionError",
    "CohomologyReport",
    "cohomology",
    "cohomology_tower",
    "betti_numbers",
    "same_class",
    "check_square_zero",
]


class BrokenComplexError(ArithmeticError):
    """Two consecutive differentials do not compose to zero."""

    def __init__(self, degree: int, name: str = ""):
        self.degree = degree
        label = f"{name}: " if name else ""
        super().__init__(f"{label}delta^{degree + 1} o delta^{degree} != 0")


class PreconditionError(ValueError):
    pass


@dataclass
class CohomologyReport:
    degree: int
    dim_cocycles: int
    dim_coboundaries: int
    representatives: list[Cochain] = field(default_factory=list)

    @property
    def betti(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "betti": self.betti,
        }


def check_square_zero(below: ComplexSlice, at: ComplexSlice, name: str = "") -> None:
    if below.matrix.shape[1] and not (at.matrix @ below.matrix).is_zero():
        raise BrokenComplexError(below.degree, name)


def _representatives(below: ComplexSlice, at: ComplexSlice) -> list[Cochain]:
    """Kernel basis vectors of ``at`` outside the coboundaries, chosen greedily in order."""
    space = at.source
    span = IncrementalSpan(space.total_dim)
    cols: dict[int, dict[int, object]] = {}
    for (r, c), v in below.matrix.entries():
        cols.setdefault(c, {})[r] = v
    for c in sorted(cols):
        vec = [0] * space.total_dim
        for r, v in cols[c].items():
            vec[r] = v
        span.add(vec)
    reps = []
    for v in kernel_basis(at.matrix).basis:
        if span.add(v):
            reps.append(Cochain(space, v))
    return reps


def _slices(source, n: int) -> tuple[ComplexSlice, ComplexSlice, str]:
    if isinstance(source, CochainComplex):
        return source.slice(n - 1), source.slice(n), source.name
    below, at = source
    return below, at, ""


def cohomology(source: CochainComplex | Sequence[ComplexSlice], n: int, *, representatives: bool = True,
               method: str = "auto") -> CohomologyReport:
    """H^n from a complex or from the pair (slice n-1, slice n)."""
    below, at, name = _slices(source, n)
    check_square_zero(below, at, name)
    return _report(n, below, at, rank(below.matrix, method=method), rank(at.matrix, method=method), representatives)


def _report(n, below, at, rank_below, rank_at, representatives) -> CohomologyReport:
    cocycles = at.matrix.shape[1] - rank_at
    rep = CohomologyReport(n, cocycles, rank_below)
    if rep.betti < 0:
        raise BrokenComplexError(n - 1)
    if representatives:
        rep.representatives = _representatives(below, at)
        if len(rep.representatives) != rep.betti:
            # modular and rational answers disagree only if something is badly wrong
            raise ArithmeticError(f"degree {n}: {len(rep.representatives)} representatives for Betti {rep.betti}")
    return rep


def cohomology_tower(cx: CochainComplex, max_degree: int, *, representatives: bool = True,
                     threads: int = 1, method: str = "auto") -> list[CohomologyReport]:
    """Reports for degrees 0..max_degree; each slice is built and ranked once."""
    degrees = list(range(-1, max_degree + 1))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        slices = dict(zip(degrees, pool.map(cx.slice, degrees)))
        for n in range(max_degree):
            check_square_zero(slices[n], slices[n + 1], cx.name)
        ranks = dict(zip(degrees, pool.map(lambda n: rank(slices[n].matrix, method=method), degrees)))
    return [
        _report(n, slices[n - 1], slices[n], ranks[n - 1], ranks[n], representatives)
        for n in range(max_degree + 1)
    ]


def betti_numbers(cx: CochainComplex, max_degree: int, *, threads: int = 1) -> list[int]:
    return [r.betti for r in cohomology_tower(cx, max_degree, representatives=False, threads=threads)]


def _is_cocycle(c: Cochain, at: ComplexSlice) -> bool:
    return not any(at.matrix @ c.coords)


def same_class(c1: Cochain, c2: Cochain, slice_below: ComplexSlice, slice_at: ComplexSlice | None = None) -> bool:
    """True iff c1 - c2 is a coboundary.  With ``slice_at`` both inputs are checked to be cocycles."""
    if len(c1.coords) != len(c2.coords) or len(c1.coords) != slice_below.matrix.shape[0]:
        raise PreconditionError("cochains do not live in the target of the given slice")
    if slice_at is not None:
        for c in (c1, c2):
            if not _is_cocycle(c, slice_at):
                raise PreconditionError("input is not a cocycle")
    diff = [a - b for a, b in zip(c1.coords, c2.coords)]
    if not any(diff):
        return True
    return solve(slice_below.matrix, diff) is not None


def coboundary_preimage(c: Cochain, slice_below: ComplexSlice) -> Cochain | None:
    x = solve(slice_below.matrix, list(c.coords))
    return None if x is None else Cochain(slice_below.source, x)


def class_rank(vectors: Sequence[Sequence], boundary: Matrix) -> int:
    """Dimension of span(vectors) modulo the column space of ``boundary``."""
    from .exactlin import block

    if not vectors:
        return 0
    extra = Matrix.from_columns(boundary.shape[0], list(vectors))
    both = block([[boundary, extra]]) if boundary.shape[1] else extra
    return rank(both) - rank(boundary)
