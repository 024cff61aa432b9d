"""Acoustic source reconstruction from multi-frequency phaseless far-field data."""

from ._phaseless import (
    ConfigError,
    DegenerateDataError,
    DomainError,
    Error,
    FourierModel,
    InvariantError,
    Lattice,
    Measurements,
    build_lattice,
    evaluate,
    farfield,
    gamma,
    reconstruct,
    relative_errors,
    retrieve,
    run_experiment,
    sha256,
    source_values,
    stability_constant,
    synthesize,
    truncation_from_noise,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
