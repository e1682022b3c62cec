"""Chimera-structured Ising annealer emulation toolkit.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from qaemu._core import (  # noqa: F401
    AnnealerConfig,
    BruteForceResult,
    ChimeraGraph,
    EmbeddedProblem,
    Embedding,
    Hamiltonian,
    IceModel,
    SampleRecord,
    SampleSet,
    apply_gauge,
    broken_chains,
    brute_force,
    chain_shim,
    choi_clique_embedding,
    embed,
    energy,
    energy_gap,
    estimate_kappa0,
    find_embedding,
    gauge_state,
    gen_3mc,
    gen_fl,
    gen_nae,
    gen_ran,
    greedy_descent,
    load_problem,
    load_working_graph,
    percentiles,
    perturb,
    random_yield,
    run,
    run_experiment_file,
    save_problem,
    save_working_graph,
    scale_by,
    scale_to_unit,
    sigma_E,
    st99,
    st99_time,
    success_band,
    success_prob,
    total_time,
    unembed,
)

__version__ = "0.1.0"
