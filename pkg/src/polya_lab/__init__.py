"""Polya-type eigenvalue bounds on the disc and O(3) sigma-model hedgehog solitons."""

from .disc_spectrum import Boundary, DiscGeometry, SpectrumTable, enumerate_spectrum
from .duality_report import MAPPINGS, MappingRule, duality_table, neumann_sum_table, summary_report
from .numerics import Tolerance, integrate, ode_solve, root_find
from .sigma_soliton import Profile, SolitonResult, shoot_profile, solve_soliton
from .specfun import bessel_j, bessel_prime_zeros, bessel_zeros

__version__ = "0.1.0"

__all__ = [
    "Boundary", "DiscGeometry", "SpectrumTable", "enumerate_spectrum",
    "MAPPINGS", "MappingRule", "duality_table", "neumann_sum_table", "summary_report",
    "Tolerance", "integrate", "ode_solve", "root_find",
    "Profile", "SolitonResult", "shoot_profile", "solve_soliton",
    "bessel_j", "bessel_prime_zeros", "bessel_zeros",
]
