from .topology import (
    NetworkView,
    carrier_supply,
    derive_constants,
    enumerate_carriers,
    mode_supply,
    od_carrier,
    require_valid,
    round_trip_partner,
    validate_instance,
    validate_scenario,
)
from .defaults import GeneratorDefaults, load_defaults
from .generators import (
    GeneratorSpec,
    RoleSpec,
    gen_exponential,
    gen_grerec,
    gen_power_law,
    generate,
    repair_connectivity,
    skeleton_from_graph,
)
from .roles import assign_roles, default_scenario, overlay_modes
from .stats import NetworkStats, compute_stats


__all__ = [
    # Validation and derived data
    'NetworkView',
    'validate_instance',
    'validate_scenario',
    'require_valid',
    'derive_constants',
    'mode_supply',
    'carrier_supply',
    'enumerate_carriers',
    'od_carrier',
    'round_trip_partner',

    # Generators
    'GeneratorDefaults',
    'load_defaults',
    'GeneratorSpec',
    'RoleSpec',
    'gen_power_law',
    'gen_exponential',
    'gen_grerec',
    'generate',
    'repair_connectivity',
    'skeleton_from_graph',
    'assign_roles',
    'default_scenario',
    'overlay_modes',

    # Metrics
    'NetworkStats',
    'compute_stats',
]
