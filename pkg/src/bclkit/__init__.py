"""bclkit: Boolean Connexive Logics over relating semantics.

Parsing, model checking, condition and frame analysis, filtration-based
bounded decision, and Hilbert-style proof verification.
"""

from .syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Formula, Neg, NegPrefix, Or,
    ParseError, Var, apply_negations, demodalize, parse, strip_negations,
    subformula_closure, to_text,
)
from .semantics import (
    BoundedValid, Countermodel, ModelError, RelatingModel, Valid,
    evaluate, holds_in_model, model_from_json, model_to_json, truth_table,
)
from .conditions import (
    AdmissibilityReport, ConditionError, ConditionSet, ViolationReport,
    admissible, check, check_all, close, forced_pairs, frame_check,
    frame_closure, parse_conditions,
)
from .decision import (
    BudgetError, SearchConfig, completeness_bound, count_admissible,
    decide, demodal_complete, filtrate, filtration_classes, pad_carrier,
)
from .proofs import (
    AxiomSchema, AxiomStep, Calculus, CplStep, Dem, DsStep, NecStep, Proof,
    ProofError, VerifyResult, calculus, is_cpl_instance, match_schema,
    proof_from_json, proof_to_json, verify,
)
from .registry import Logic, logic, registry_logics, registry_names

__version__ = "0.1.0"
