"""Exception hierarchy shared by the finite and smooth layers."""


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WorkbenchError):
    """Input file or manifest is malformed."""


class AxiomError(WorkbenchError):
    """A structural axiom fails; carries the axiom name and witnessing elements."""

    def __init__(self, axiom, witnesses=(), message=None):
        self.axiom = axiom
        self.witnesses = tuple(witnesses)
        text = message or f"axiom violated: {axiom}"
        if self.witnesses:
            text += f" (witnesses: {self.witnesses})"
        super().__init__(text)


class InvalidParameter(WorkbenchError):
    pass


class GroupoidMismatch(WorkbenchError):
    pass


class EmptyFiber(WorkbenchError):
    pass


class PreconditionFailed(WorkbenchError):
    pass


class DomainError(WorkbenchError):
    """Evaluation point lies outside the chart domain."""


class DegenerateKernel(WorkbenchError):
    """Kernel of the target derivative has the wrong dimension."""


class MatchError(WorkbenchError):
    """Source/target (or moment) matching condition violated."""


class RankError(WorkbenchError):
    pass


class LiftError(WorkbenchError):
    pass
