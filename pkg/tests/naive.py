"""Naive first-principles reference computations for cross-checking.

Everything here works on raw tuples (dims, cells, (axis, slot, at) faces)
and deliberately avoids the package's grid/measure/energy machinery, so
test comparisons are genuinely two independent routes to the same number.
"""

import itertools
from fractions import Fraction

ZERO = Fraction(0)


def all_cells(dims):
    return [tuple(c) for c in itertools.product(*(range(n) for n in dims))]


def all_faces(dims):
    faces = []
    for axis in range(len(dims)):
        others = [range(n) for i, n in enumerate(dims) if i != axis]
        for slot in range(dims[axis] + 1):
            for at in itertools.product(*others):
                faces.append((axis, slot, tuple(at)))
    return faces


def face_sides(dims, face):
    """(lower cell or None, upper cell or None) of a face."""
    axis, slot, at = face

    def cell(coord):
        c = list(at)
        c.insert(axis, coord)
        return tuple(c)

    lower = cell(slot - 1) if slot > 0 else None
    upper = cell(slot) if slot < dims[axis] else None
    return lower, upper


def crosses(dims, face, cells):
    """True when exactly one side of the face is in the set (exterior empty)."""
    lo, hi = face_sides(dims, face)
    return (lo in cells) != (hi in cells)


def perimeter(dims, cells, faces=None, weight=Fraction(1)):
    faces = all_faces(dims) if faces is None else faces
    return sum(
        (Fraction(weight) for f in faces if crosses(dims, f, cells)), ZERO
    )


def closure_mass(dims, cells, face_weights, cell_weights):
    """mu(A+): faces with >= 1 incident cell in A, plus cells of A."""
    total = sum((w for c, w in cell_weights.items() if c in cells), ZERO)
    for f, w in face_weights.items():
        lo, hi = face_sides(dims, f)
        if lo in cells or hi in cells:
            total += w
    return total


def interior_mass(dims, cells, face_weights, cell_weights):
    """mu(A1): faces with both incident cells in A (boundary faces never)."""
    total = sum((w for c, w in cell_weights.items() if c in cells), ZERO)
    for f, w in face_weights.items():
        lo, hi = face_sides(dims, f)
        if lo is not None and hi is not None and lo in cells and hi in cells:
            total += w
    return total


def functional(
    dims,
    cells,
    plus_faces,
    plus_cells,
    minus_faces,
    minus_cells,
    perim_faces=None,
    weight=Fraction(1),
):
    """P(A) + mu_plus(A1) - mu_minus(A+), straight from the definitions."""
    return (
        perimeter(dims, cells, perim_faces, weight)
        + interior_mass(dims, cells, plus_faces, plus_cells)
        - closure_mass(dims, cells, minus_faces, minus_cells)
    )


def minimize_over(
    dims,
    free,
    fixed_in,
    plus_faces,
    plus_cells,
    minus_faces,
    minus_cells,
    perim_faces=None,
    weight=Fraction(1),
    volume=None,
):
    """Exhaustively minimize the functional over subsets of ``free``.

    ``fixed_in`` cells belong to every candidate set; ``volume`` (if given)
    constrains the total cell count.  Returns (best value, all argmins).
    """
    free = sorted(free)
    fixed = frozenset(fixed_in)
    best = None
    argmins = []
    for r in range(len(free) + 1):
        for combo in itertools.combinations(free, r):
            cells = fixed | frozenset(combo)
            if volume is not None and len(cells) != volume:
                continue
            val = functional(
                dims, cells, plus_faces, plus_cells,
                minus_faces, minus_cells, perim_faces, weight,
            )
            if best is None or val < best:
                best = val
                argmins = [cells]
            elif val == best:
                argmins.append(cells)
    return best, argmins


def max_excess(dims, face_weights, cell_weights, C, penalty=ZERO, rep="closure"):
    """Max of mu(rep(A)) - C P(A) - penalty |A| over nonempty subsets."""
    C = Fraction(C)
    penalty = Fraction(penalty)
    mass = closure_mass if rep == "closure" else interior_mass
    cells = all_cells(dims)
    best = None
    best_set = None
    for r in range(1, len(cells) + 1):
        for combo in itertools.combinations(cells, r):
            A = frozenset(combo)
            val = (
                mass(dims, A, face_weights, cell_weights)
                - C * perimeter(dims, A)
                - penalty * len(A)
            )
            if best is None or val > best:
                best, best_set = val, A
    return best, best_set
