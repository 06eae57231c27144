"""Semantic default reasoning with an arbiter-mediated argumentation protocol."""

from .logic import (
    Atom,
    And,
    Bottom,
    Formula,
    Iff,
    Implies,
    ModelSet,
    Not,
    Or,
    Signature,
    Top,
    Valuation,
    entails,
    format_formula,
    is_consistent,
    models,
    parse_formula,
    strictly_more_specific,
)
from .inconsistency import (
    ArgumentUnit,
    ElementDomain,
    InconsistencyReport,
    last_argument_check,
    minimal_inconsistent_subsets,
    support_sets,
)
from .defaults import (
    DefaultRule,
    DefaultTheoryRecord,
    SizePolicy,
    ValidityResult,
    attach,
    block_inheritance,
    check_consistency_conditions,
    check_size_gate,
    valid_defaults,
    visible_defaults,
)
from .hierarchy import (
    AttachmentFamily,
    Cell,
    HierarchyOrder,
    RelevantSet,
    attachment_family,
    cell_order,
    export_dot,
    finest_cells,
    relevant_sets,
)
from .preference import (
    CellPartition,
    ClassificationResult,
    ConsequenceVerdict,
    ModelOrderRelation,
    PreferenceConfig,
    PreferenceStructure,
    build_structure,
    classify_individual,
    default_holds,
    element_order,
    inner_order,
    minimal_models,
    packet_order,
    split_cell,
)
from .theoryfile import format_theory_text, parse_theory_text

__version__ = "0.1.0"
