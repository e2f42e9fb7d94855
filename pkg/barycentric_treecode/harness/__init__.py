from barycentric_treecode.harness.experiment import Experiment, default_kernel, relative_error, run_experiment
from barycentric_treecode.harness.generators import Example1Config, Example2Config, gen_example1, gen_example2
from barycentric_treecode.harness.particles import read_outputs, read_particles, write_outputs, write_particles
from barycentric_treecode.harness.report import CSV_FIELDS, RunReport, read_csv, read_json, write_csv, write_json

__all__ = [
    'CSV_FIELDS',
    'Example1Config',
    'Example2Config',
    'Experiment',
    'RunReport',
    'default_kernel',
    'gen_example1',
    'gen_example2',
    'read_csv',
    'read_json',
    'read_outputs',
    'read_particles',
    'relative_error',
    'run_experiment',
    'write_csv',
    'write_json',
    'write_outputs',
    'write_particles',
]
