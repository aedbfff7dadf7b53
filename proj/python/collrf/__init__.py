"""Collective resonance fluorescence of N dipole-coupled two-level emitters.

Frequencies and rates are in units of the single-emitter decay rate gamma,
offsets are measured from the laser frequency.
"""

from ._collrf import (
    Error,
    FitResult,
    InferenceError,
    InferenceResult,
    InvalidInput,
    MergedRegimeError,
    NumericalError,
    Peak,
    SpectralLine,
    SystemParams,
    add_noise,
    analyze,
    bare_liouvillian,
    bare_spectrum_oracle,
    bare_steady_state,
    coherence_decay_rate,
    collective_operators,
    default_grid,
    detect_peaks,
    dressed_spectrum_oracle,
    estimate_mean_distance,
    evaluate_spectrum,
    figure_data,
    fit_lorentzians,
    general_lines,
    infer_parameters,
    integrated_weight,
    linear_grid,
    make_params,
    model_lines,
    mollow_limit_lines,
    read_spectrum,
    run_criterion,
    scaled_coupling,
    secular_liouvillian,
    secular_steady_state,
    three_atom_lines,
    two_atom_lines,
)

__version__ = "1.0.0"


def infer(grid, values, smoothing=0.0):
    """Peak detection, Lorentzian fit and parameter recovery in one call."""
    _, fit = analyze(grid, values, smoothing)
    return infer_parameters(fit.lines)
