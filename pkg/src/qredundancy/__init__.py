"""Fourier structure and input-redundancy bounds for parameterized quantum circuits."""

from .arcsine import ScDictionary, ScMonomial, sc_dimension, sc_eval, sc_interval, sc_project, sc_rank
from .fitting import (
    bound_arcsin,
    bound_degree,
    bound_linear,
    fit_arcsin,
    fit_linear,
    projection_distance,
    tightness_sweep,
)
from .fourier import (
    extract_spectrum,
    frequency_set,
    from_trig_form,
    project_univariate,
    spectrum_from_function,
    to_trig_form,
)
from .pqc import (
    Circuit,
    CircuitError,
    Encoding,
    EncodingDomainError,
    Fixed,
    Hamiltonian,
    InputRotation,
    TrainingRotation,
    evaluate,
    evaluate_encoded,
    load_circuit,
    random_circuit,
    shift_gradient,
)
from .rank import AliasingError, SampleSet, chi_conditioning, fourier_rank

__version__ = "0.1.0"
