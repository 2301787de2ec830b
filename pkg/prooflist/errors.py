from typing import Optional, Sequence


class ProoflistError(Exception):
    """Base class for every error raised deliberately by prooflist"""


class ParseError(ProoflistError):
    """A CSV input could not be tokenised"""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaError(ProoflistError):
    """A table parsed, but its columns or label values are not usable"""


class FormatError(ProoflistError):
    """A rule, label, minority or model file does not follow the line format"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None) -> None:
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class EmptyModelError(ProoflistError):
    """No antecedent is available to build rule lists from"""


class TrieError(ProoflistError):
    """A prefix tree operation violated its preconditions"""


class InvariantError(ProoflistError):
    """A structural invariant (e.g. distinct antecedent ids in a prefix) was broken"""


class EnumerationBudgetError(ProoflistError):
    """The exhaustive enumeration would exceed its budget"""

    def __init__(self, count: int, budget: int) -> None:
        super().__init__(f"Refusing to enumerate {count} prefixes (budget is {budget})")
        self.count = count
        self.budget = budget


class UnknownAntecedentError(ProoflistError):
    """A model refers to antecedents that the rule file does not define"""

    def __init__(self, names: Sequence[str]) -> None:
        super().__init__(f"Unknown antecedent(s): {', '.join(names)}")
        self.names = list(names)
