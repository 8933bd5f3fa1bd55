from .damage import BoundaryReached, DamageReport, damage_spreading, frontiers
from .ether import EtherTiling, NotEtherDominated, detect_ether, filter_ether
from .fractal import FractalReport, box_counting_dimension, box_counts
from .gliders import EventKind, GliderEvent, Track, extract_glider_events
from .prng import (RandomnessReport, block_chi2_pvalue, find_period, lag1_autocorrelation,
                   middle_column_bits, monobit_z, randomness_battery, runs_z)

__all__ = [
    "BoundaryReached", "DamageReport", "damage_spreading", "frontiers",
    "EtherTiling", "NotEtherDominated", "detect_ether", "filter_ether",
    "FractalReport", "box_counting_dimension", "box_counts",
    "EventKind", "GliderEvent", "Track", "extract_glider_events",
    "RandomnessReport", "block_chi2_pvalue", "find_period", "lag1_autocorrelation",
    "middle_column_bits", "monobit_z", "randomness_battery", "runs_z",
]
