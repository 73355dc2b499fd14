"""Multilevel epidemic and pollution simulation engine."""

from ._core import (
    MlsimError,
    RngStream,
    derive_stream,
    diffuse,
    discretize_conserving,
    fleet_derivative,
    integrate_fleet,
    integrate_seir,
    run_cli,
    run_epidemic,
    run_pollution,
    seir_derivative,
)

__all__ = [
    "MlsimError",
    "RngStream",
    "derive_stream",
    "diffuse",
    "discretize_conserving",
    "fleet_derivative",
    "integrate_fleet",
    "integrate_seir",
    "run_cli",
    "run_epidemic",
    "run_pollution",
    "seir_derivative",
]
