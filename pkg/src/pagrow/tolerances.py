"""Versioned tolerance settings for every statistical verdict.

The limit theorems this package checks hold asymptotically with unspecified
constants; the concrete finite-size tolerances below are engineering
choices, kept in one place so changing any of them is a visible, versioned
event rather than a scattered edit.
"""

from dataclasses import dataclass

TOLERANCE_VERSION = "1.0"


@dataclass(frozen=True)
class Tolerances:
    # CLT / binomial mean comparisons accept within this many standard errors
    clt_sigmas: float = 4.0
    # degree-sequence proportions vs the limiting law, d <= 10 at n = 1e5
    degree_seq_rel: float = 0.10
    # cross-model TV of a traced degree at R = 50000 per model
    models_tv_max: float = 0.02
    # enumeration-vs-urn TV at desk scale
    process_urn_tv_max: float = 0.05
    # distributional checks pass within this multiple of expected sampling TV
    sampling_tv_factor: float = 2.0
    bootstrap_iterations: int = 64
    # multi-increment frequency envelope: multiplier on d^2/n^2
    multi_increment_envelope: float = 10.0
    min_conditioning_events: int = 100
    # exact product form vs log-Gamma form, relative
    gamma_vs_product_rel: float = 1e-12
    # float-mode vs exact-mode falling-factorial ratios, relative
    float_vs_exact_rel: float = 1e-10
    # run-to-run coefficient of variation of degree counts, d in [k, 10]
    concentration_cv_max: float = 0.05
    # statistical checks rerun with fresh seeds; majority decides
    statistical_retries: int = 3


TOL = Tolerances()
