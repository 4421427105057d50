"""Construct-and-verify toolkit for packings of hypercubes and grids.

Constructors emit certificates (plain text, canonical order) that the audit
module re-checks from scratch.
"""

from .antipodal import antipodal_paths, ramras_decomposition
from .audit import (
    AuditReport, Codim1Class, classify_codim1_intersection, codim2_coverage_check,
    separating_audit, verify_multiset, verify_packing,
)
from .certificate import MultisetCover, PackingCertificate, parse, read_file, serialize, write_file
from .errors import (
    BudgetExceeded, ClassificationFailure, CubepackError, FormatError, InvalidVertex,
    ParameterError, PlacementError, SizingError,
)
from .grid import (
    Box, PatternGraph, Placement, ValidityReport, adjacent, cube, distance,
    enumerate_placements, full_pattern, path_power, slice_pattern, validate_placement,
)
from .hampath import HamOrderedBlock, gray_cycle, pack_any_path_power, pack_odd_path_power
from .induced import induced_path_power_packing, staircase_partition, staircase_paths
from .modcover import (
    congruence_cover_solve, lift_to_path_power, one_mod_l_partition, shift_l_partition,
)
from .oracle import consecutive_induced_hamilton, exact_cover_search

__version__ = "0.1.0"
