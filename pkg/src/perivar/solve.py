"""Obstacle, Dirichlet, and prescribed-volume minimization.

All three problems minimize P(A) + mu_plus(A^1) - mu_minus(A+) over a
constrained class.  Obstacle and Dirichlet classes are lattices, so the
exact optimum comes from one graph cut.  The volume-constrained class is
not a lattice: below the enumeration cap it is solved exactly by subset
scan, above it a Lagrangian sweep gives exact answers at breakpoint
volumes and certified value brackets elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .energy import (
    BinaryEnergy,
    Dirichlet,
    FullSpace,
    add_volume_term,
    assemble,
    evaluate,
    freeze,
)
from .grid import CellSet, Region, _check_same_domain
from .maxflow import minimize, parametric_sweep
from .measure import MeasureData, SignedPair
from .oracle import scan_functional_minimum
from .ic import resolve_cap

ZERO = Fraction(0)


class EmptyClassError(ValueError):
    """The constraint class contains no sets (inner obstacle escapes outer)."""


@dataclass(frozen=True)
class SolveResult:
    minimizer: CellSet
    value: Fraction
    exactness: str  # 'exact' or 'envelope-bound'
    certificate: Optional[dict] = None

    @property
    def exact(self) -> bool:
        return self.exactness == "exact"


def _finish_exact(energy: BinaryEnergy) -> SolveResult:
    sol, val = minimize(energy)
    return SolveResult(minimizer=sol, value=val, exactness="exact")


def solve_obstacle(
    inner: CellSet,
    outer: CellSet,
    pair: SignedPair,
    region: Optional[Region] = None,
    *,
    perimeter_weight=Fraction(1),
) -> SolveResult:
    """Exact minimum over sets A with inner <= A <= outer.

    With a region, cells outside it are pinned to the inner obstacle and the
    perimeter runs over the region's closure faces; without one the whole
    grid is in play.
    """
    _check_same_domain(inner, outer, pair.plus)
    if not inner.issubset(outer):
        raise EmptyClassError("inner obstacle is not contained in the outer one")
    mode = FullSpace() if region is None else Dirichlet(a0=inner, omega=region)
    energy = assemble(pair, mode, perimeter_weight)
    free = frozenset(energy.free_cells)
    frozen: Dict[tuple, bool] = {}
    for c in inner.cells:
        if c in free:
            frozen[c] = True
    for c in outer.complement().cells:
        if c in free:
            frozen[c] = False
        elif energy.frozen.get(c):
            raise ValueError(
                f"cell {c} is pinned inside by the boundary datum but excluded "
                "by the outer obstacle"
            )
    return _finish_exact(freeze(energy, frozen))


def solve_dirichlet(
    a0: CellSet,
    omega: Region,
    pair: SignedPair,
    *,
    perimeter_weight=Fraction(1),
) -> SolveResult:
    """Exact minimum over sets agreeing with a0 outside omega."""
    return _finish_exact(assemble(pair, Dirichlet(a0=a0, omega=omega), perimeter_weight))


def _greedy_resize(energy: BinaryEnergy, start: CellSet, target: int) -> CellSet:
    """Move |A| to the target one best single-cell flip at a time."""
    current = set(start.cells)
    free = set(energy.free_cells)
    while len(current) != target:
        grow = len(current) < target
        candidates = (free - current) if grow else (current & free)
        best_cell, best_val = None, None
        for c in sorted(candidates):
            trial = (current | {c}) if grow else (current - {c})
            val = evaluate(energy, CellSet.of(start.domain, trial))
            if best_val is None or val < best_val:
                best_cell, best_val = c, val
        if best_cell is None:
            raise EmptyClassError("no free cells left to reach the target volume")
        current = (current | {best_cell}) if grow else (current - {best_cell})
    return CellSet.of(start.domain, current)


def solve_volume(
    v: int,
    mu_minus: MeasureData,
    region: Optional[Region] = None,
    *,
    exhaustive_cap: Optional[int] = None,
) -> SolveResult:
    """Minimum of P(A) - mu_minus(A+) over sets of volume exactly v.

    Exact below the enumeration cap.  Above it, exact when v is a breakpoint
    volume of the Lagrangian sweep; otherwise returns the best repaired
    feasible set with a certified lower bound (exactness 'envelope-bound').
    """
    domain = mu_minus.domain
    v = int(v)
    pair = SignedPair(MeasureData.zero(domain), mu_minus)
    if region is None or len(region.cells) == domain.cell_count:
        mode = FullSpace()
        free_cells = frozenset(domain.cells())
    else:
        mode = Dirichlet(a0=CellSet.empty(domain), omega=region)
        free_cells = frozenset(region.cells)
    if not (0 <= v <= len(free_cells)):
        raise ValueError(f"volume {v} out of range 0..{len(free_cells)}")
    energy = assemble(pair, mode)

    if v == 0:
        sol = energy.full_set(frozenset())
        return SolveResult(sol, evaluate(energy, sol), "exact")
    if v == len(free_cells):
        sol = energy.full_set(free_cells)
        return SolveResult(sol, evaluate(energy, sol), "exact")

    cap = resolve_cap(exhaustive_cap)
    if len(free_cells) <= cap:
        scan = scan_functional_minimum(domain, mu_minus, free_cells)
        value, best = scan.best_at_volume[v]
        sol = energy.full_set(frozenset(best.cells))
        result = SolveResult(sol, -value, "exact")
        if evaluate(energy, sol) != result.value:
            raise AssertionError("scan and energy evaluation disagree")
        return result

    # Lagrangian sweep: lam large enough that the extremes are empty/full
    swing = Fraction(1)
    for e0, e1 in energy.unary.values():
        swing += abs(e1 - e0)
    for term in energy.face_terms.values():
        swing += 2 * max(abs(x) for row in term.table for x in row)
    pieces = parametric_sweep(energy, -swing, swing)
    if pieces[0].volume < len(free_cells) or pieces[-1].volume > 0:
        raise AssertionError("sweep range did not reach the extreme volumes")

    for p in pieces:
        if p.volume == v:
            sol = p.minimizer
            return SolveResult(sol, p.value, "exact")

    above = next(p for p in reversed(pieces) if p.volume > v)
    below = next(p for p in pieces if p.volume < v)
    lam_star = above.lam_hi
    lower = (above.value + lam_star * above.volume) - lam_star * v
    cand_a = _greedy_resize(energy, above.minimizer, v)
    cand_b = _greedy_resize(energy, below.minimizer, v)
    val_a, val_b = evaluate(energy, cand_a), evaluate(energy, cand_b)
    sol, upper = (cand_a, val_a) if val_a <= val_b else (cand_b, val_b)
    certificate = {
        "lambda": lam_star,
        "lower_bound": lower,
        "upper_bound": upper,
        "bracket_volumes": (above.volume, below.volume),
        "bracket_values": (above.value, below.value),
    }
    exactness = "exact" if lower == upper else "envelope-bound"
    return SolveResult(sol, upper, exactness, certificate)
