"""Hurwitz class-number moments in residue classes and weighted elliptic-curve censuses."""

from .census import Census, CurveClass, PrimePowerField, census_exhaustive, census_twist, deuring_check
from .distribution import ks_discrepancy, ratio_scan, st_cdf, st_moment
from .exactnum import Rational, kronecker_symbol
from .hurwitz import HurwitzTable, build_table, cached_table, hurwitz_single, load_table, save_table
from .moments import bracket_coeff, h_moment, hgtilde_check, main_term
from .qseries import QSeries, rankin_cohen, theta_series

__version__ = "0.1.0"
