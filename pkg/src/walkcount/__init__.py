from .qstate import HilbertDims, StateVector, DenseUnitary, MeasurementOutcome, Rng, tensor, apply, outcome_distribution, measure_first_register, inner, direct_sum
from .circuit import GateSpec, GateKind, CircuitPlan, PhaseEstimate, gate_matrix, swap_prime, qft_rec, qft, qft_inverse, controlled_powers, phase_estimate, phase_estimate_distribution
from .fourier import FourierState, fourier_state, overlap_sq, boundary_prob, f_of_w, appendix_a_suite
from .grover import MarkedSet, GroverAngles, CountEstimate, phase_oracle, diffusion, grover_step, grover_search, quantum_count, count_error_bound, sin_sq_error_bound
from .graph import SimpleGraph, ColoredGraph, complete_bipartite, complete_graph, edge_color_bipartite, edge_color_complete_even, is_properly_colored, is_connected
from .walk import WalkSpace, BipartiteMarking, WalkAngles, ReducedWalkSystem, flip_flop_shift, grover_coin, walk_operator, search_operator, reduced_basis, reduced_operator, verify_reduction, edge_superposition, projection_probabilities, bipartite_count, bipartite_error_bound, success_probability_bound, monte_carlo_count
from .counters import Counter, GroverCounter, BipartiteCounter
from .metrics import TrialMetrics

__all__ = [
    "HilbertDims",
    "StateVector",
    "DenseUnitary",
    "MeasurementOutcome",
    "Rng",
    "tensor",
    "apply",
    "outcome_distribution",
    "measure_first_register",
    "inner",
    "direct_sum",
    "GateSpec",
    "GateKind",
    "CircuitPlan",
    "PhaseEstimate",
    "gate_matrix",
    "swap_prime",
    "qft_rec",
    "qft",
    "qft_inverse",
    "controlled_powers",
    "phase_estimate",
    "phase_estimate_distribution",
    "FourierState",
    "fourier_state",
    "overlap_sq",
    "boundary_prob",
    "f_of_w",
    "appendix_a_suite",
    "MarkedSet",
    "GroverAngles",
    "CountEstimate",
    "phase_oracle",
    "diffusion",
    "grover_step",
    "grover_search",
    "quantum_count",
    "count_error_bound",
    "sin_sq_error_bound",
    "SimpleGraph",
    "ColoredGraph",
    "complete_bipartite",
    "complete_graph",
    "edge_color_bipartite",
    "edge_color_complete_even",
    "is_properly_colored",
    "is_connected",
    "WalkSpace",
    "BipartiteMarking",
    "WalkAngles",
    "ReducedWalkSystem",
    "flip_flop_shift",
    "grover_coin",
    "walk_operator",
    "search_operator",
    "reduced_basis",
    "reduced_operator",
    "verify_reduction",
    "edge_superposition",
    "projection_probabilities",
    "bipartite_count",
    "bipartite_error_bound",
    "success_probability_bound",
    "monte_carlo_count",
    "Counter",
    "GroverCounter",
    "BipartiteCounter",
    "TrialMetrics",
]
