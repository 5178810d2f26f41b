"""Q-operators, Bäcklund transforms and fusion for the quantised Ablowitz-Ladik chain."""

from .backlund import (classical_checks, classical_transform, check_conjugation, conjugate_by_Q,
                       solve_beta_hat, solve_beta_tilde)
from .fock import FockVector, GradedOperator, OperatorWord, parse_word
from .funrel import VerifyReport, bethe_spectral_suite, check_TQ, check_wronskian_and_det, invert_Qplus
from .lattice import build_Qr, build_Tr
from .ring import MultiPoly, PolyQ, PolyZ, RatFuncQ, VSeries, ZQPoly
from .tqft import fusion_table, qwhittaker, verify_frobenius

__all__ = [
    "FockVector", "GradedOperator", "MultiPoly", "OperatorWord", "PolyQ", "PolyZ", "RatFuncQ", "VSeries",
    "VerifyReport", "ZQPoly", "bethe_spectral_suite", "build_Qr", "build_Tr", "check_TQ", "check_conjugation",
    "check_wronskian_and_det", "classical_checks", "classical_transform", "conjugate_by_Q", "fusion_table",
    "invert_Qplus", "parse_word", "qwhittaker", "solve_beta_hat", "solve_beta_tilde", "verify_frobenius",
]
