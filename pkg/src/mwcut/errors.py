class MwcError(Exception):
    """Base class for all errors raised by mwcut."""


class GraphError(MwcError, ValueError):
    pass


class UnknownIdError(GraphError, KeyError):
    def __init__(self, what: str, ident):
        self.what = what
        self.ident = ident
        super().__init__(f"unknown {what} id {ident!r}")

    def __str__(self):
        return self.args[0]


class UndeletableTerminalError(GraphError):
    def __init__(self, terminal: int):
        self.terminal = terminal
        super().__init__(f"undeletable terminal {terminal} in node cut")


class FormulaError(MwcError, ValueError):
    pass


class ReductionError(MwcError, ValueError):
    pass


class UnsafeHoneycombError(ReductionError):
    def __init__(self, detail: str):
        super().__init__(f"unsafe honeycomb parameters: {detail}")


class SizeGuardError(MwcError):
    """An exact solver refused an instance above its size guard."""


class NotSatisfyingError(ReductionError):
    pass
