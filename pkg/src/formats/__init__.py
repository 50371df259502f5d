from .common import UNITS, atomic_write_text
from .instance import INSTANCE_FORMAT, instance_to_text, load_instance, save_instance
from .scenario import ScenarioFile, load_generator_spec, load_scenario, load_scenario_file, save_scenario
from .results import (
    ResultsDocument,
    build_results,
    instance_digest,
    load_results,
    read_bounds_trace,
    save_results,
    write_bounds_trace,
)
from .tntp import load_tntp
from .exports import PlotExport, export_dot, export_geojson, export_plot, node_tags, write_plot
from .model_io import export_model, model_fingerprint


__all__ = [
    # Common
    'UNITS',
    'atomic_write_text',

    # Instances and scenarios
    'INSTANCE_FORMAT',
    'instance_to_text',
    'load_instance',
    'save_instance',
    'ScenarioFile',
    'load_scenario',
    'load_scenario_file',
    'load_generator_spec',
    'save_scenario',
    'load_tntp',

    # Results
    'ResultsDocument',
    'build_results',
    'instance_digest',
    'save_results',
    'load_results',
    'write_bounds_trace',
    'read_bounds_trace',

    # Exports
    'PlotExport',
    'node_tags',
    'export_dot',
    'export_geojson',
    'export_plot',
    'write_plot',
    'export_model',
    'model_fingerprint',
]
