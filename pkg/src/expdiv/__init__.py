"""Exponential divisor functions: the E operator, zeta-word factorizations,
exponent pairs, error-term exponents and desk-scale partial sums."""

from .arith import EPower, GaussTau, One, TauK, TauMulti, factorize, parse_function, zeta_real
from .bell import ZetaWord, greedy_factor, local_series, verify_expansion
from .eop import TowerInt, e_power_eval, oplus, support_scan
from .expairs import ExponentPair, closed_form_pair, eval_word, parse_word, search_word, theta_second_case
from .exponents import beta_nowak, omega_exponent, report, theta_k_bound, u_general

__all__ = [
    "EPower",
    "ExponentPair",
    "GaussTau",
    "One",
    "TauK",
    "TauMulti",
    "TowerInt",
    "ZetaWord",
    "beta_nowak",
    "closed_form_pair",
    "e_power_eval",
    "eval_word",
    "factorize",
    "greedy_factor",
    "local_series",
    "omega_exponent",
    "oplus",
    "parse_function",
    "parse_word",
    "report",
    "search_word",
    "support_scan",
    "theta_k_bound",
    "theta_second_case",
    "u_general",
    "verify_expansion",
    "zeta_real",
]
