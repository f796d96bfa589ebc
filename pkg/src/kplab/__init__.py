"""Transverse spectral stability of small periodic waves of generalized KP equations."""

from .symbols import (
    Monotonicity, MultiplierSymbol, Verdict, VerdictQuery, XClass, YClass,
    audit_hypotheses, builtin_symbol, parse_symbol, phase_velocity, table1_verdict,
)
from .waves import (
    Provenance, StokesWave, WaveParams, newton_refine, stokes_coefficients, stokes_wave,
    wave_residual,
)
from .bloch import BlochSpec, SpectrumResult, assemble, growth_scan, spectrum
from .collisions import (
    CollisionEvent, ModeIndex, collision_locus_bloch, collision_locus_periodic,
    enumerate_dangerous, krein, omega,
)
from .asymptotics import (
    BandPrediction, Context, predict_bloch01, predict_bloch_delta2, predict_delta3_periodic,
    predict_longwave_periodic, reduced_matrix,
)
from .bands import BandReport, eigenvalue_trace, measure_band, verify_stability_region

__version__ = "0.1.0"
