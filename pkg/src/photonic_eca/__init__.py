"""Elementary cellular automata on a photonic interference-and-threshold model."""

from .compiler import (CompilationResult, census_from_csv, census_summary, census_to_csv,
                       compile_rule, feasibility_census, realized_rule, verify_config)
from .core import (Boundary, Generation, RuleTable, SpaceTimeDiagram, evolve, rule_from_number,
                   single_seed, step, step_packed, synthesize)
from .emulator import PulseTrainConfig, run_loop, throughput_report
from .photonic import (NoiseSpec, PhotonicConfig, detect_threshold, extinction_ratio,
                       interfere, photonic_evolve, photonic_step)

__all__ = [
    "CompilationResult", "census_from_csv", "census_summary", "census_to_csv", "compile_rule",
    "feasibility_census", "realized_rule", "verify_config",
    "Boundary", "Generation", "RuleTable", "SpaceTimeDiagram", "evolve", "rule_from_number",
    "single_seed", "step", "step_packed", "synthesize",
    "PulseTrainConfig", "run_loop", "throughput_report",
    "NoiseSpec", "PhotonicConfig", "detect_threshold", "extinction_ratio", "interfere",
    "photonic_evolve", "photonic_step",
]
