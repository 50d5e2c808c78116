"""Signed context-free grammars: signed tree-count series, listing checks,
closure constructions and Cartier-Foata expansions."""
from .errors import (
    AlphabetError,
    ConstructionError,
    GrammarSyntaxError,
    GrammarValidationError,
    InfiniteTreesError,
    ResourceGuardError,
    SignedGrammarError,
    SignedProductionError,
)
from .grammar import (
    CycleWitness,
    GrammarAnalysis,
    Production,
    SignedGrammar,
    analyze,
    check_finite_trees,
    parse_grammar,
    reduce,
    render_grammar,
)
from .series import (
    AmbiguityProfile,
    ListingResult,
    ParseTree,
    SignedSeries,
    TreeEnumeration,
    ambiguity_profile,
    check_listing,
    coefficient,
    enumerate_trees,
    epsilon_counts,
    series,
)
from .constructions import (
    ConstructionReport,
    complement,
    construct,
    disjoint_concat,
    disjoint_union,
    dollar_concat,
    parity_split,
    sigma_star_grammar,
    subset_minus,
)
from .cartier_foata import (
    CommutationMatrix,
    CommutingSet,
    TracePartition,
    cf_grammar,
    cf_polynomial,
    cf_series,
    commuting_sets,
    parse_matrix,
    trace_classes,
    verify_cf,
)

__version__ = "0.1.0"
