"""Exception types shared across the package."""


class NatlogError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(NatlogError):
    """A structured document does not match its expected schema.

    Carries ``path``, the node path inside the document, when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{message} (at {path})"
        super().__init__(message)


class CombinationError(NatlogError):
    """Categories at a derivation node do not combine."""

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{message} (at {path})"
        super().__init__(message)


class OovError(NatlogError):
    """A token has no lexicon entry."""

    def __init__(self, lemma):
        self.lemma = lemma
        super().__init__(f"out-of-vocabulary token: {lemma!r}")


class NoParseError(NatlogError):
    """The token sequence is outside the controlled fragment."""


class BuildError(NatlogError):
    """The knowledge base is inconsistent (an equality chain meets a perp link)."""


class NotAConstituentError(NatlogError):
    """The requested span crosses constituent boundaries."""


class UninterpretedLemmaError(NatlogError):
    """A lemma has no extension in the model being evaluated."""

    def __init__(self, lemma):
        self.lemma = lemma
        super().__init__(f"lemma has no interpretation in this model: {lemma!r}")


class UnsatisfiableKbError(NatlogError):
    """No finite model satisfies the knowledge base constraints."""


class MissingPredictionError(NatlogError):
    """A gold problem has no prediction."""

    def __init__(self, problem_id):
        self.problem_id = problem_id
        super().__init__(f"no prediction for problem id {problem_id!r}")


class UnknownIdError(NatlogError):
    """A corrections overlay references a problem id absent from the corpus."""

    def __init__(self, problem_id):
        self.problem_id = problem_id
        super().__init__(f"overlay references unknown problem id {problem_id!r}")
