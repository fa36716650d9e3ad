"""Defeasible deontic inference with inheritance over an action ontology."""
from .context import TOP, And, Atom, Implies, Not, Or, conjoin, consistent, entails_ctx
from .conflict import ConflictKind, ConflictReport, classify_pair, scan_conflicts
from .dsl import Script, format_script, parse_context, parse_script
from .engine import (StatusReport, close_testimony, derive_beliefs, query_status,
                     try_inherit_imp, try_inherit_nonimp, try_inherit_nonobl, try_inherit_obl)
from .errors import (ContractViolation, CycleError, DdicError, DeclarationError,
                     OracleRefusal, ParseError)
from .model import (BeliefAtom, DefeatRecord, DerivationTrace, Modal, NormStore,
                    StatusLabel, TestimonyAtom, complement, label_of)
from .ontology import BehaviorRelation, Ontology, RelationKind, cooking_ontology

__version__ = "0.1.0"

__all__ = [
    "TOP", "And", "Atom", "Implies", "Not", "Or", "conjoin", "consistent", "entails_ctx",
    "ConflictKind", "ConflictReport", "classify_pair", "scan_conflicts",
    "Script", "format_script", "parse_context", "parse_script",
    "StatusReport", "close_testimony", "derive_beliefs", "query_status",
    "try_inherit_imp", "try_inherit_nonimp", "try_inherit_nonobl", "try_inherit_obl",
    "ContractViolation", "CycleError", "DdicError", "DeclarationError", "OracleRefusal",
    "ParseError",
    "BeliefAtom", "DefeatRecord", "DerivationTrace", "Modal", "NormStore", "StatusLabel",
    "TestimonyAtom", "complement", "label_of",
    "BehaviorRelation", "Ontology", "RelationKind", "cooking_ontology",
]
