"""
Solutions package for accelwave.

This package contains the exact accelerating solutions:
- frame: frame parameters and the phase S(t)
- profiles: envelope and auxiliary-function profiles
- synthesis: (G, V_I) from an arbitrary envelope
- families: closed-form solution families
- lab_frame: lab-frame assembly and the nonlinear mu shift
- describe: JSON description of a family
"""

from solutions.frame import FrameParams, s_of_t
from solutions.profiles import AuxiliaryG, EnvelopeProfile
from solutions.synthesis import SynthesisResult, synthesize
from solutions.families import (
    SolutionFamily, AiryFree, ConstIntensityInvHarm, ConstIntensityPowerLaw,
    GaussianLocalized, DarkSoliton, Synthesized,
    psi, g_aux, v_real, v_imag, family_from_mapping, validity_interval
)
from solutions.lab_frame import assemble_lab_frame, lab_wave, nonlinear_mu_shift, phase_integral

__all__ = [
    'FrameParams',
    's_of_t',
    'AuxiliaryG',
    'EnvelopeProfile',
    'SynthesisResult',
    'synthesize',
    'SolutionFamily',
    'AiryFree',
    'ConstIntensityInvHarm',
    'ConstIntensityPowerLaw',
    'GaussianLocalized',
    'DarkSoliton',
    'Synthesized',
    'psi',
    'g_aux',
    'v_real',
    'v_imag',
    'family_from_mapping',
    'validity_interval',
    'assemble_lab_frame',
    'lab_wave',
    'nonlinear_mu_shift',
    'phase_integral',
]
