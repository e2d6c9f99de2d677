"""Numerical verification of Markov maps, their Stinespring spaces and factorizations."""
from .algebra import FiniteAlgebra, commutant, diagonal_algebra, full_algebra, generate, join
from .channel import StochasticMap, adjoint_sharp, contraction_u, dual_prime, make_map, map_from_kraus, markov_check
from .factorize import (
    FactorizationCertificate,
    JHat,
    build_R,
    certify,
    deterministic_factorize,
    jhat_abelian,
    jhat_deterministic,
    minimality_check,
    sufficient_check,
)
from .gce import cce_check, cone_vector, gce_factorization, gce_map, nablas, standard_form
from .linalg import DEFAULT_TOL, AntilinearOp, Tolerance
from .space import ProbabilitySpace, StandardSpace, gns, modular_data, modular_flow, modular_residuals
from .stinespring import StinespringData, dilate, tau_of, verify_relations, w_antiunitary

__all__ = [
    "AntilinearOp",
    "DEFAULT_TOL",
    "FactorizationCertificate",
    "FiniteAlgebra",
    "JHat",
    "ProbabilitySpace",
    "StandardSpace",
    "StinespringData",
    "StochasticMap",
    "Tolerance",
    "adjoint_sharp",
    "build_R",
    "cce_check",
    "certify",
    "commutant",
    "cone_vector",
    "contraction_u",
    "deterministic_factorize",
    "diagonal_algebra",
    "dilate",
    "dual_prime",
    "full_algebra",
    "gce_factorization",
    "gce_map",
    "generate",
    "gns",
    "jhat_abelian",
    "jhat_deterministic",
    "join",
    "make_map",
    "map_from_kraus",
    "markov_check",
    "minimality_check",
    "modular_data",
    "modular_flow",
    "modular_residuals",
    "nablas",
    "standard_form",
    "sufficient_check",
    "tau_of",
    "verify_relations",
    "w_antiunitary",
]
