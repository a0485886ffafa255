"""Exact and Monte Carlo checks of the sums-versus-maxima characterization of
the exponential distribution, with a goodness-of-fit test built on it."""
from .estimators import ExponentialityTest, MeanScaler
from .exact import IndexContext, h, lemma1_check, ruiz_check, step3_check
from .jets import DensityJetModel, MaclaurinJet, induction_solver, step0_sides
from .stochastic import DistributionSpec, equality_check, gof_exponentiality, power_study

__version__ = "0.1.0"

__all__ = [
    "DensityJetModel",
    "DistributionSpec",
    "ExponentialityTest",
    "IndexContext",
    "MaclaurinJet",
    "MeanScaler",
    "equality_check",
    "gof_exponentiality",
    "h",
    "induction_solver",
    "lemma1_check",
    "power_study",
    "ruiz_check",
    "step0_sides",
    "step3_check",
]
