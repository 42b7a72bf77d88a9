"""Kernel quadrature rules, worst-case errors, and convergence benchmarks."""

from ._core import (
    ConditioningError,
    ConvergenceRecord,
    GeneratorVector,
    KorobovKernel,
    MaternKernel,
    PowerKernel,
    RateFit,
    SolveReport,
    WceReport,
    aggregate_and_fit,
    bernoulli_poly,
    bq_weights_constrained,
    bq_weights_exact,
    cbc_construct,
    diameter,
    export_table,
    fractional_part,
    gram_matrix,
    import_table,
    is_prime,
    kernel_eval,
    kernel_mean_numeric,
    korobov_eval_1d,
    lattice_wce_sq,
    load_generator,
    mercer_tail_bound,
    mercer_truncated,
    next_prime_at_least,
    predicted_rate,
    predicted_rate_sobolev,
    random_shift,
    rank1_lattice,
    regular_grid,
    run_convergence,
    sample_iid_uniform,
    save_generator,
    separation_radius,
    shift_by,
    uniform_weights,
    wce_bruteforce,
    wce_eval,
)

__all__ = [
    "ConditioningError",
    "ConvergenceRecord",
    "GeneratorVector",
    "KorobovKernel",
    "MaternKernel",
    "PowerKernel",
    "RateFit",
    "SolveReport",
    "WceReport",
    "aggregate_and_fit",
    "bernoulli_poly",
    "bq_weights_constrained",
    "bq_weights_exact",
    "cbc_construct",
    "diameter",
    "export_table",
    "fractional_part",
    "gram_matrix",
    "import_table",
    "is_prime",
    "kernel_eval",
    "kernel_mean_numeric",
    "korobov_eval_1d",
    "lattice_wce_sq",
    "load_generator",
    "mercer_tail_bound",
    "mercer_truncated",
    "next_prime_at_least",
    "predicted_rate",
    "predicted_rate_sobolev",
    "random_shift",
    "rank1_lattice",
    "regular_grid",
    "run_convergence",
    "sample_iid_uniform",
    "save_generator",
    "separation_radius",
    "shift_by",
    "uniform_weights",
    "wce_bruteforce",
    "wce_eval",
]
