"""Exception hierarchy shared by every graphrec module."""


class GraphRecError(Exception):
    """Base class for all graphrec errors."""


class ValidationError(GraphRecError, ValueError):
    """An argument is outside its allowed domain."""


class SchemaError(GraphRecError):
    """An edge or interaction connects node kinds the schema does not allow."""


class NodeNotFoundError(GraphRecError, KeyError):
    """A NodeId does not exist in the graph."""

    def __str__(self):
        return str(self.args[0]) if self.args else "node not found"


class PreconditionError(GraphRecError):
    """An operation was called in a state where it is not defined."""


class ParseError(GraphRecError):
    """A persisted file or input row could not be parsed."""

    def __init__(self, message, *, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class IntegrityError(GraphRecError):
    """Input records reference entities that do not exist."""
