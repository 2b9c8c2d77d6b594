"""Closed-form and quadrature evaluation of the outage and capacity bounds."""

from .bounds import (
    IcVariant,
    OutageBounds,
    a_channel,
    cancelable_intensity,
    critical_a,
    dcas_outage_bounds,
    dias_outage_bounds,
    dicas_outage_bounds,
    ic_outage_bounds_dcas,
    ic_outage_bounds_dias,
    ic_outage_bounds_dicas,
    shot_noise_ccdf_bounds,
    upper_factor,
)
from .capacity import (
    DensityBounds,
    asymptotic_ratio,
    density_bound,
    invert_outage_for_density,
    scheme_outage_bounds,
    transmission_capacity,
)
from .functionals import (
    a_function,
    beta_mean_functional,
    dominant_coverage_measure,
    gamma_mean_functional,
    psi,
)
from .weakness import conditional_weakness_closed_form, conditional_weakness_exact

__all__ = [
    "IcVariant",
    "OutageBounds",
    "DensityBounds",
    "a_channel",
    "a_function",
    "asymptotic_ratio",
    "beta_mean_functional",
    "cancelable_intensity",
    "conditional_weakness_closed_form",
    "conditional_weakness_exact",
    "critical_a",
    "dcas_outage_bounds",
    "density_bound",
    "dias_outage_bounds",
    "dicas_outage_bounds",
    "dominant_coverage_measure",
    "gamma_mean_functional",
    "ic_outage_bounds_dcas",
    "ic_outage_bounds_dias",
    "ic_outage_bounds_dicas",
    "invert_outage_for_density",
    "psi",
    "scheme_outage_bounds",
    "shot_noise_ccdf_bounds",
    "transmission_capacity",
    "upper_factor",
]
