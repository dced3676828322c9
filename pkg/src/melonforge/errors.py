"""Exception hierarchy for melonforge.

Every error that user input can trigger derives from :class:`MelonforgeError`;
errors that can only fire on an internal inconsistency derive from
:class:`InternalCheckFailed` and indicate a bug.
"""


class MelonforgeError(Exception):
    """Base class for all melonforge errors."""


class InternalCheckFailed(MelonforgeError):
    """A self-consistency check failed; this signals a bug, not bad input."""


# -- graph validation ---------------------------------------------------------

class NotAPermutation(MelonforgeError):
    def __init__(self, color, detail=""):
        self.color = color
        super().__init__(f"matching for color {color} is not a permutation"
                         + (f": {detail}" if detail else ""))


class Disconnected(MelonforgeError):
    pass


class RootOutOfRange(MelonforgeError):
    pass


class NotRooted(MelonforgeError):
    pass


class BadOpenSet(MelonforgeError):
    """A pre-graph does not have the two-half-edge shape needed to close it."""


class NegativeDegree(InternalCheckFailed):
    pass


class OddEulerDefect(InternalCheckFailed):
    """A jacket's Euler relation produced a non-integral or negative genus."""


# -- reduction / surgery ------------------------------------------------------

class MelonIsWholeGraph(MelonforgeError):
    pass


class EdgeNotInGraph(MelonforgeError):
    pass


class NotADipole(MelonforgeError):
    pass


class QOutOfRange(MelonforgeError):
    pass


class NotAChainVertex(MelonforgeError):
    pass


class ProcedureStuck(InternalCheckFailed):
    """The iterative deletion procedure met a malformed intermediate state."""


# -- series / asymptotics -----------------------------------------------------

class UnknownKind(MelonforgeError):
    pass


class Infeasible(MelonforgeError):
    pass


class OutsideSummabilityRange(MelonforgeError):
    pass


class SquareRootDomain(MelonforgeError):
    pass


class UnsupportedDimension(MelonforgeError):
    pass


# -- search --------------------------------------------------------------------

class SearchTooLarge(MelonforgeError):
    def __init__(self, states, budget):
        self.states = states
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {states} states, over the budget of "
            f"{budget}; raise MELONFORGE_BUDGET to allow it")
