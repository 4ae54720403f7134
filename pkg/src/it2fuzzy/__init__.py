"""Decomposed interval type-2 fuzzy inference and pendulum control.

The package splits into small layers: `core` holds type-1 Mamdani
machinery, `decomposed` builds interval type-2 systems as two parallel
type-1 paths with a closed-form FOU-centroid combiner, `oracle` provides
independent reference computations (planar brute force and Karnik-Mendel
type-reduction), `pendulum` is a deterministic closed-loop simulator,
`presets` ships the reference balance controllers, `config` the JSON
schema, and `cli` the `it2sim` command-line tool.
"""
from .core import (
    LinguisticVariable,
    PiecewiseLinearMF,
    Rule,
    RuleBase,
    SampledMF,
    T1System,
    UndefinedCentroid,
    aggregate,
    centroid,
    fire_strengths,
    fuzzify,
    infer,
    make_triangle,
    mf_eval,
    sample_mf,
    t1_output,
    zero_mf,
)
from .decomposed import (
    CombinerResult,
    DecomposedSystem,
    IT2Set,
    IT2Variable,
    UndefinedOutput,
    blur_variable,
    combine_centroid,
    decompose,
    evaluate_paths,
    it2_output,
)
from .oracle import CentroidInterval, fou_centroid_bruteforce, km_centroid, km_defuzz
from .pendulum import (
    Metrics,
    PendulumState,
    PlantParams,
    SimConfig,
    SimulationDiverged,
    Trace,
    compute_metrics,
    controller_input,
    dynamics,
    gaussian_noise,
    rk4,
    rk4_step,
    run_closed_loop,
)
from .config import ConfigError, LoadedConfig, SimSettings, load_config, save_config

__version__ = "0.1.0"
