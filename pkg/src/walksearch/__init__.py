"""Quantum walk search on electric networks, simulated exactly at desk scale.

The package splits along the natural seams of the problem: graphs and
reversible chains (``graph_core``), flows and effective resistance
(``electric``), exact classical stopping-time solvers and box-sequence
combinatorics (``classical_walk``), explicit walk unitaries and block
encodings (``quantum_core``), Chebyshev fast-forwarding (``fast_forward``),
the search algorithms (``search``), and the file/CLI harness (``harness``).
"""

from .graph_core import (
    Distribution,
    ReversibleChain,
    WeightedGraph,
    build_chain,
    chain_power,
    chain_to_graph,
    check_ergodic,
    spectral_gap,
)
from .electric import (
    ModifiedInstance,
    UnitFlow,
    build_modified_graph,
    commute_quantity,
    contract_set,
    effective_resistance,
    set_resistance,
)
from .classical_walk import (
    BoxSequence,
    InterpolationParams,
    StoppingStats,
    classical_search_baseline,
    exact_commute_time,
    exact_expected_return,
    exact_hitting_time,
    exact_return_prob,
    find_stretch_witness,
    hit_and_return_frequency,
    interpolate_absorbing,
    interpolate_two,
    simulate,
    simulate_batch,
    stopping_stats,
    stretch_deterministic,
    stretch_geometric,
)
from .quantum_core import (
    BlockUnitary,
    DiscriminantMatrix,
    QuantumState,
    apply_unitary,
    discriminant,
    interpolated_walk_unitary,
    lambda_unitary,
    measure_vertex,
    modified_walk_unitary,
    szegedy_walk,
    verify_block_encoding,
)
from .fast_forward import (
    ChebyshevExpansion,
    apply_Dt_exact,
    chebyshev_expansion,
    controlled_walk_ladder,
    eval_poly_scalar,
    fast_forward_unitary,
    prep_unitary,
    truncation_degree,
    walk_power_reflections,
)
from .search import (
    SearchConfig,
    SearchOutcome,
    amplitude_amplify,
    doubling_sweep,
    sample_binomial_offset,
    search_fastforward,
    search_simple,
    search_tstep,
    success_probability_profile,
)
from .harness import InstanceFile, ExperimentReport, load_instance, run_suite, save_report

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
