"""Exception hierarchy shared across the package."""


class QuestoptError(Exception):
    """Base class for every error raised by questopt."""


class MalformedInstanceError(QuestoptError, ValueError):
    """Instance data is structurally broken (dimensions, values, file syntax)."""


class SenselessSplitError(QuestoptError, ValueError):
    """A question puts every event of the table on the same side."""


class IncompleteTableError(QuestoptError, ValueError):
    """Two events of the table cannot be told apart by any question."""


class InconsistentQuestionnaireError(QuestoptError, ValueError):
    """A questionnaire does not fit the table it is evaluated against."""


class UndefinedValueError(QuestoptError, ValueError):
    """A characteristic function is undefined on the given table."""


class InvariantError(QuestoptError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""


class InfeasibleError(QuestoptError, ValueError):
    """The requested instance or cover cannot exist."""


class CapExceededError(QuestoptError, ValueError):
    """An exact solver was asked to handle an instance above its size cap."""
