"""Exhaustive enumeration oracles for desk-scale instances.

These scans walk all subsets of an admissible cell pool in Gray-code
order, updating perimeter and measure masses incrementally in cleared
integer arithmetic.  They are the brute-force side of every dual-route
check in the package: independent of the min-cut reduction, and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .grid import CellSet, Face, GridDomain
from .measure import MeasureData

CLOSURE = 0
INTERIOR = 1


class ExhaustiveCapacityExceeded(RuntimeError):
    """The instance is too large for subset enumeration and not reducible."""

    def __init__(self, n_cells: int, cap: int):
        self.n_cells = n_cells
        self.cap = cap
        super().__init__(
            f"exhaustive search over {n_cells} cells exceeds the cap of {cap}"
        )


DEFAULT_EXHAUSTIVE_CAP = 22


@dataclass(frozen=True)
class ScanResult:
    """Best excess over nonempty subsets, overall and per exact volume."""

    best_value: Fraction
    best_set: CellSet
    best_at_volume: Tuple  # (value, frozenset) or None, indexed by |A|


def scan_excess(
    domain: GridDomain,
    admissible: Sequence,
    charged_faces: Dict[Face, Fraction],
    mass_faces: Dict[Face, Tuple[Fraction, int]],
    cell_masses: Dict[tuple, Fraction],
    cell_penalty: Fraction = Fraction(0),
) -> ScanResult:
    """Maximize mass(rep(A)) - sum of charges on crossed faces - penalty*|A|.

    ``charged_faces`` maps a face to its (already C-scaled) perimeter
    charge; ``mass_faces`` maps a face to (weight, representative), where
    the representative is CLOSURE (counts when >= 1 admissible incident
    cell is selected) or INTERIOR (counts when both incident cells are
    selected; faces with an inadmissible or exterior side never count).
    Only nonempty subsets of ``admissible`` compete.
    """
    cells = sorted(admissible)
    n = len(cells)
    if n == 0:
        raise ValueError("no admissible cells to scan")
    idx = {c: i for i, c in enumerate(cells)}
    adm = frozenset(cells)

    den = cell_penalty.denominator
    for w in charged_faces.values():
        den = math.lcm(den, w.denominator)
    for w, _rep in mass_faces.values():
        den = math.lcm(den, w.denominator)
    for w in cell_masses.values():
        den = math.lcm(den, w.denominator)

    # per-face bookkeeping: a slot in the count array plus scaled deltas
    face_slot: Dict[Face, int] = {}
    # per admissible cell: list of (slot, charge_scaled, mass_scaled, need)
    touch: List[List[Tuple[int, int, int, int]]] = [[] for _ in range(n)]

    def slot_of(face: Face) -> int:
        if face not in face_slot:
            face_slot[face] = len(face_slot)
        return face_slot[face]

    relevant = set(charged_faces) | set(mass_faces)
    for face in sorted(relevant):
        inc = domain.face_cells(face)
        inc_adm = [c for c in inc if c in adm]
        if not inc_adm:
            continue
        charge = int(charged_faces.get(face, Fraction(0)) * den)
        mass = 0
        need = 1
        if face in mass_faces:
            w, rep = mass_faces[face]
            if rep == INTERIOR:
                if len(inc) == 2 and len(inc_adm) == 2:
                    mass = int(w * den)
                    need = 2
                # else the face can never be interior to a scanned set
            else:
                mass = int(w * den)
                need = 1
        if charge == 0 and mass == 0:
            continue
        s = slot_of(face)
        for c in inc_adm:
            touch[idx[c]].append((s, charge, mass, need))

    cell_gain = [0] * n  # cell mass minus volume penalty, scaled
    pen = int(cell_penalty * den)
    for c, w in cell_masses.items():
        if c in adm:
            cell_gain[idx[c]] += int(w * den)
    for i in range(n):
        cell_gain[i] -= pen

    counts = [0] * max(len(face_slot), 1)
    in_set = [False] * n
    value = 0  # mass - charge - penalty, scaled
    best_value = None
    best_bits = None
    best_at_volume: List[Optional[Tuple[int, int]]] = [None] * (n + 1)
    volume = 0
    bits = 0

    for g in range(1, 1 << n):
        i = (g & -g).bit_length() - 1
        entering = not in_set[i]
        in_set[i] = entering
        if entering:
            bits |= 1 << i
            volume += 1
            value += cell_gain[i]
            for s, charge, mass, need in touch[i]:
                c0 = counts[s]
                counts[s] = c0 + 1
                if charge:
                    # crossing iff exactly one selected incident cell
                    if c0 == 0:
                        value -= charge
                    elif c0 == 1:
                        value += charge
                if mass and c0 + 1 == need:
                    value += mass
        else:
            bits &= ~(1 << i)
            volume -= 1
            value -= cell_gain[i]
            for s, charge, mass, need in touch[i]:
                c0 = counts[s]
                counts[s] = c0 - 1
                if charge:
                    if c0 == 1:
                        value += charge
                    elif c0 == 2:
                        value -= charge
                if mass and c0 == need:
                    value -= mass
        if volume == 0:
            continue
        if best_value is None or value > best_value:
            best_value = value
            best_bits = bits
        prev = best_at_volume[volume]
        if prev is None or value > prev[0]:
            best_at_volume[volume] = (value, bits)

    def to_set(b: int) -> CellSet:
        return CellSet.of(domain, [cells[i] for i in range(n) if b >> i & 1])

    per_volume = tuple(
        None if e is None else (Fraction(e[0], den), to_set(e[1]))
        for e in best_at_volume
    )
    return ScanResult(
        best_value=Fraction(best_value, den),
        best_set=to_set(best_bits),
        best_at_volume=per_volume,
    )


def scan_functional_minimum(
    domain: GridDomain,
    mu_minus: MeasureData,
    region_cells: Optional[frozenset] = None,
) -> ScanResult:
    """Exhaustive minimum of P(A) - mu_minus(A+) per exact volume.

    Returns a ScanResult whose values are the *negated* functional, so the
    per-volume entries maximize mu(A+) - P(A) (minimize the functional).
    """
    admissible = region_cells if region_cells is not None else frozenset(domain.cells())
    charged = {f: Fraction(1) for f in domain.faces()}
    mass_faces = {f: (w, CLOSURE) for f, w in mu_minus.face_weights.items()}
    return scan_excess(
        domain,
        sorted(admissible),
        charged_faces=charged,
        mass_faces=mass_faces,
        cell_masses=dict(mu_minus.cell_weights),
    )
