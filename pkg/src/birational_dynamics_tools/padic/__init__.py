from .valuation import DEFAULT_PRECISION, PadicNumber, PadicValuation, check_prime, vp
from .certificates import (
    DEFAULT_SANITY_N,
    Hypothesis,
    ProofKind,
    StabilityCertificate,
    ValuationOrbitRecord,
    Verdict,
    ZariskiReport,
    certificate_to_dict,
    certify_stability_henon_A,
    load_sweep,
    orbit_valuations,
    sweep_certify,
    zariski_density_check,
)
