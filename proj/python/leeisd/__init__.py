"""Python bindings for the leeisd C++ core."""

from ._leeisd import (
    BudgetExhausted,
    Error,
    Instance,
    Ring,
    __version__,
    count_ball,
    count_sphere,
    count_sphere_restricted,
    gv_relative_weight,
    gv_weight,
    lee_weight,
    marginal,
    optimize_at_rate,
    random_instance,
    sample_sphere,
    solve,
    solve_beta,
    sphere_exponent,
    verify,
    worst_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
