"""Craig interpolation for the combination of EUF and integer difference logic."""

from .combined import CombinedChecker, VerifyReport, combined_check_sat, verify_interpolant
from .combiner import (
    Budget, CIResult, CombinerState, SatVerdict, ci_interpolate, decide, share, term_share,
    terminate,
)
from .core import (
    BOT, EUF, IDL, TOP, BudgetExceeded, CombinterpError, Eq, Lt, Not, PApp, PreconditionError,
    app, conj, const, disj, negate, pred, succ,
)
from .euf import EUFSolver, euf_check_sat, euf_equality_interpolate, euf_interpolate
from .idl import IDLSolver, idl_check_sat, idl_equality_interpolate, idl_interpolate, idl_qe
from .metaproof import (
    Interpolant, MetaRule, ProofNode, check_local_soundness, extract_interpolant, format_trace,
)
from .problem import ProblemFile, parse
from .purify import eliminate_symbols, flatten_sigma0, purify
from .sexpr import ParseError, Signature, format_formula, parse_formula
from .utvpi import utvpi_qe

__version__ = "0.1.0"
