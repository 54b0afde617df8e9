"""Lombard speech flavor classification toolkit.

Pipeline: own-voice feedback rendering, energy matching, calibrated noise
mixing, short-time intelligibility scoring mapped to word correct rate, and
an iterative paired-test ladder that locates flavor transition points.
"""

from .audio import (AudioSignal, CalibrationRef, a_weighted_level,
                    a_weighting_magnitude, active_rms, match_rms, read_wav,
                    resample, rms, scale_to_level, write_wav)
from .classifier import (ComparisonRecord, LadderResult, classify_ladder,
                         derived_seed, evaluate_pair, render_report)
from .config import CONFIG_SCHEMA_VERSION, PipelineConfig
from .errors import (ConfigError, DegenerateDataError, InvalidSignalError,
                     LombardkitError, ManifestError, UnsupportedWavError,
                     WavFormatError)
from .feedback import FeedbackParams, apply_self_feedback
from .manifest import (CorpusManifest, DEFAULT_LADDER, ManifestEntry,
                       ValidationReport, validate_manifest)
from .mapping import (FitReport, MappingParams, ObservationPair, PUBLISHED_2024,
                      evaluate_fit, fit_mapping, load_observations,
                      map_stoi_to_wcr, save_observations)
from .noise import (LTASS_CENTERS, NoiseSpec, SpectrumEnvelope, assemble_babble,
                    estimate_ltass, generate_ssn, mix_at_levels)
from .stats import (TTestResult, paired_t_test, paired_wilcoxon_test,
                    student_t_sf)
from .stoi import StoiConfig, StoiScore, stoi, third_octave_bank
from .synthcorpus import build_synthetic_corpus

__version__ = "0.1.0"

__all__ = [
    "AudioSignal", "CalibrationRef", "a_weighted_level", "a_weighting_magnitude",
    "active_rms", "match_rms", "read_wav", "resample", "rms", "scale_to_level",
    "write_wav",
    "ComparisonRecord", "LadderResult", "classify_ladder", "derived_seed",
    "evaluate_pair", "render_report",
    "CONFIG_SCHEMA_VERSION", "PipelineConfig",
    "ConfigError", "DegenerateDataError", "InvalidSignalError", "LombardkitError",
    "ManifestError", "UnsupportedWavError", "WavFormatError",
    "FeedbackParams", "apply_self_feedback",
    "CorpusManifest", "DEFAULT_LADDER", "ManifestEntry", "ValidationReport",
    "validate_manifest",
    "FitReport", "MappingParams", "ObservationPair", "PUBLISHED_2024",
    "evaluate_fit", "fit_mapping", "load_observations", "map_stoi_to_wcr",
    "save_observations",
    "LTASS_CENTERS", "NoiseSpec", "SpectrumEnvelope", "assemble_babble",
    "estimate_ltass", "generate_ssn", "mix_at_levels",
    "TTestResult", "paired_t_test", "paired_wilcoxon_test", "student_t_sf",
    "StoiConfig", "StoiScore", "stoi", "third_octave_bank",
    "build_synthetic_corpus",
]
