"""Exception hierarchy shared by every module of the package."""


class SignedGrammarError(Exception):
    """Base class for all errors raised by :mod:`signedgram`."""


class GrammarSyntaxError(SignedGrammarError, ValueError):
    """Malformed grammar or matrix text; carries a 1-based line/column."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class GrammarValidationError(SignedGrammarError, ValueError):
    """A grammar (or commutation matrix) violates a structural invariant."""


class AlphabetError(SignedGrammarError, ValueError):
    """A word uses a letter outside the declared alphabet."""


class InfiniteTreesError(SignedGrammarError):
    """Some word has infinitely many parse trees; ``witness`` is the cycle."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"grammar has infinitely many parse trees for some word: {witness}")


class ResourceGuardError(SignedGrammarError):
    """A configurable size guard was tripped."""


class ConstructionError(SignedGrammarError, ValueError):
    """A construction's statically checkable precondition failed."""


class SignedProductionError(SignedGrammarError, ValueError):
    """An operation defined only for unsigned grammars saw a negative production."""
