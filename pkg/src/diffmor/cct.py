"""Instance-level check that the morphism cohomology matches the mapping-ring cohomology."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cohomology import class_rank, cohomology_tower
from .complexes import (
    cm_complex,
    da_complex,
    mapping_pair,
    phi_cap,
    pi_map,
    tau_full,
    tau_phi,
)
from .structures import PhiBimodule, mapping_module, triangle_bimodule, triangle_phi_bimodule

__all__ = ["CctCertificate", "cct_check"]


@dataclass
class CctCertificate:
    max_degree: int
    betti_mor: list[int]
    betti_da: list[int]
    tau_chain_map_ok: bool
    square_commutes_ok: bool
    tau_induces_injection_ok: bool
    triangle_identification_ok: bool = True
    injection_ranks: list[int] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passes(self) -> bool:
        return (
            self.betti_mor == self.betti_da
            and self.tau_chain_map_ok
            and self.square_commutes_ok
            and self.tau_induces_injection_ok
            and self.triangle_identification_ok
        )

    def as_dict(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "betti_mor": self.betti_mor,
            "betti_da": self.betti_da,
            "tau_chain_map_ok": self.tau_chain_map_ok,
            "square_commutes_ok": self.square_commutes_ok,
            "tau_induces_injection_ok": self.tau_induces_injection_ok,
            "triangle_identification_ok": self.triangle_identification_ok,
            "injection_ranks": self.injection_ranks,
            "passes": self.passes,
        }


def cct_check(P: PhiBimodule, max_degree: int = 3, *, threads: int = 2) -> CctCertificate:
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    start = time.perf_counter()
    R, W = mapping_pair(P)
    Pt = triangle_phi_bimodule(P)
    cm, da = cm_complex(P), da_complex(R, W)
    workers = max(2, threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        fut_mor = pool.submit(cohomology_tower, cm, max_degree, representatives=True)
        fut_da = pool.submit(cohomology_tower, da, max_degree, representatives=False, threads=max(1, threads - 1))
        mor, dar = fut_mor.result(), fut_da.result()

    taus = [tau_full(P, n) for n in range(max_degree + 2)]
    chain_ok = all(
        (da.slice(n).matrix @ taus[n] - taus[n + 1] @ cm.slice(n).matrix).is_zero() for n in range(max_degree + 1)
    )
    square_ok = all(
        (phi_cap(R, W, n) @ tau_phi(P, n) - tau_phi(Pt, n) @ pi_map(P, n)).is_zero() for n in range(max_degree + 1)
    )
    ident_ok = triangle_bimodule(W).same_actions(mapping_module(Pt, R))

    injective = True
    ranks = []
    for n, rep in enumerate(mor):
        images = [taus[n] @ c.coords for c in rep.representatives]
        at = da.slice(n).matrix
        if any(any(at @ v) for v in images):
            injective = False
        r = class_rank(images, da.slice(n - 1).matrix)
        ranks.append(r)
        injective &= r == len(images)

    return CctCertificate(
        max_degree=max_degree,
        betti_mor=[r.betti for r in mor],
        betti_da=[r.betti for r in dar],
        tau_chain_map_ok=chain_ok,
        square_commutes_ok=square_ok,
        tau_induces_injection_ok=injective,
        triangle_identification_ok=ident_ok,
        injection_ranks=ranks,
        seconds=time.perf_counter() - start,
    )
