"""Exact variational geometry on lattice domains.

Perimeter functionals with measure data, isoperimetric-condition
verification, divergence certificates, and discrete 1-capacity — all in
exact rational arithmetic, minimized by submodular graph cuts and
cross-checked by exhaustive oracles.
"""

from .energy import (
    BinaryEnergy,
    Dirichlet,
    FrozenCellConflictError,
    FullSpace,
    MeasureSupportError,
    Relative,
    SubmodularityReport,
    add_volume_term,
    assemble,
    check_submodular,
    direct_value,
    evaluate,
    freeze,
)
from .grid import (
    CellSet,
    DomainMismatchError,
    Face,
    GridDomain,
    OutOfBoundsError,
    PerimeterMode,
    Region,
    boundary_faces,
    closure_faces,
    face_crosses,
    interior_faces,
    perimeter,
    translate,
    volume,
)
from .ic import (
    DivergenceCertificate,
    ExcessResult,
    ICProfile,
    ICVariant,
    Infeasible,
    capacity,
    divergence_certificate,
    singular_sum_check,
    small_volume_profile,
    strong_excess,
)
from .maxflow import (
    CutResult,
    FlowNetwork,
    NonSubmodularError,
    SweepPiece,
    max_flow,
    minimize,
    parametric_sweep,
)
from .measure import (
    MeasureData,
    SignedPair,
    are_mutually_singular,
    boundary_measure,
    hyperplane_measure,
    mass_on_closure,
    mass_on_interior,
    restrict,
    scale,
    sum_measures,
)
from .oracle import DEFAULT_EXHAUSTIVE_CAP, ExhaustiveCapacityExceeded
from .solve import (
    EmptyClassError,
    SolveResult,
    solve_dirichlet,
    solve_obstacle,
    solve_volume,
)

__version__ = "0.1.0"
