"""Simulated judge-advisor experiments, advice analytics and a trust ABM."""

__version__ = "0.1.0"

from .core import (
    AdviceEvent,
    ChanceJudgeError,
    ConfidenceReport,
    DegenerateSampleError,
    Side,
    TrustlabError,
    agreement_rate_identity,
    invert_agreement,
)
from .models import Variant, bayes_posterior
