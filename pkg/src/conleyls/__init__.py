"""Combinatorial Conley indices and Lusternik-Schnirelmann bounds on cubical grids."""
from .category import cover_from_morse, hls_lower, hls_upper, verify_theorem_3_1
from .enclosure import enclose_flow_map
from .expr import parse_field
from .grid import EXTERIOR, build_grid, explicit_map, load_map_json
from .homology import build_pair, relative_betti
from .cup import cup_length
from .isolation import build_index_pair, invariant_part, validate_index_pair
from .morse import attractor_filtration, morse_decomposition
from .pipeline import analyze, analyze_fixture, build_map
from .quotient import BASEPOINT, collapse_time, forward_invariant_part, induced_map

__version__ = "0.1.0"
