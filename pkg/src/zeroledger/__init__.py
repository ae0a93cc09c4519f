"""Rigorous-numerics verification engine for an explicit zero-density
exceptional-set bound: kernel transforms, zero-count and tail bounds,
head-sum budgets, constant reproduction, and the six-case inequality ledger."""

from .density import (
    BoundParams,
    StaircaseGrid,
    TBoundResult,
    b0,
    b_bound,
    optimize_t_exponential,
    t_bound_exponential,
    t_bound_staircase,
    zero_count_bound,
)
from .errors import (
    DomainError,
    InfeasibleParametersError,
    NoFeasiblePointError,
    ZeroLedgerError,
)
from .kernel import (
    KernelContext,
    PsiQuantities,
    eval_F,
    eval_g,
    laplace_G,
    monotone_ratio_coefficient,
    psi_quantities,
)
from .ledger import (
    CaseCertificate,
    CaseGapProfile,
    VerificationReport,
    adversary_audit,
    case1_audit,
    case_assemble_head,
    case_assemble_single,
    case_profile,
    delta_search,
    split_s,
    verify_all,
    verify_case,
)
from .optimizer import SearchSpec, minimize
from .rbound import (
    HeadScenario,
    RBoundResult,
    optimize_r,
    r_bound_general,
    r_bound_restricted,
)
from .tables import BoundBook, TableReproduction, reproduce_tables, round_up

__version__ = "0.1.0"

__all__ = [
    "BoundBook",
    "BoundParams",
    "CaseCertificate",
    "CaseGapProfile",
    "DomainError",
    "HeadScenario",
    "InfeasibleParametersError",
    "KernelContext",
    "NoFeasiblePointError",
    "PsiQuantities",
    "RBoundResult",
    "SearchSpec",
    "StaircaseGrid",
    "TBoundResult",
    "TableReproduction",
    "VerificationReport",
    "ZeroLedgerError",
    "adversary_audit",
    "b0",
    "b_bound",
    "case1_audit",
    "case_assemble_head",
    "case_assemble_single",
    "case_profile",
    "delta_search",
    "eval_F",
    "eval_g",
    "laplace_G",
    "minimize",
    "monotone_ratio_coefficient",
    "optimize_r",
    "optimize_t_exponential",
    "psi_quantities",
    "reproduce_tables",
    "round_up",
    "split_s",
    "t_bound_exponential",
    "t_bound_staircase",
    "verify_all",
    "verify_case",
    "zero_count_bound",
    "__version__",
]
