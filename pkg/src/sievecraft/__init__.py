"""sievecraft: the Maynard-Tao sieve for admissible tuples of linear forms,
made concrete over Z, F_q[t] and Z[i]."""

from __future__ import annotations

__version__ = "0.1.0"

from .admissibility import (AdmissibilityCertificate, LinearFormTuple, check_admissible,
                            generate_admissible, is_admissible, parse_forms, verify_certificate)
from .domains import FqX, ZI, ZZ, get_domain
from .errors import DomainError, InadmissibleError, MalformedTupleError, NotCoprimeError, SievecraftError
from .search import bv_probe, congruence_demo, scan_constellations
from .sieve import SieveParams, build_wtrick, lambda_from_F, run_sieve
from .variational import SymmetricPolynomial, mk_lower_bound

__all__ = [
    "__version__",
    "AdmissibilityCertificate", "LinearFormTuple", "check_admissible", "generate_admissible",
    "is_admissible", "parse_forms", "verify_certificate",
    "FqX", "ZI", "ZZ", "get_domain",
    "DomainError", "InadmissibleError", "MalformedTupleError", "NotCoprimeError", "SievecraftError",
    "bv_probe", "congruence_demo", "scan_constellations",
    "SieveParams", "build_wtrick", "lambda_from_F", "run_sieve",
    "SymmetricPolynomial", "mk_lower_bound",
]
