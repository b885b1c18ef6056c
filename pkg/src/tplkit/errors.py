"""Exception hierarchy.  Everything raised on bad domain input derives from
:class:`TplkitError`; the CLI maps it to exit status 1."""


class TplkitError(Exception):
    pass


class FormatError(TplkitError, ValueError):
    """Malformed MAT/TPL/JSON input."""


class SurgeryError(TplkitError, ValueError):
    """A graph surgery or template move whose precondition fails."""


class TemplateError(TplkitError, ValueError):
    """Invalid template data; ``problems`` lists every violated invariant."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class PatternError(TplkitError, ValueError):
    """Attachment pattern does not match the dividing-curve set."""


class InfeasibleLedger(TplkitError, ValueError):
    """Entrance/exit Euler balance fails, so the accounting has no solution."""
