"""Exception types shared across modules; the CLI maps them to exit codes."""


class DomainRefusal(ValueError):
    """The input is outside the operation's domain (e.g. not progression-free)."""


class NotAPFree(DomainRefusal):
    def __init__(self, witness, message="input contains a nontrivial 3-AP"):
        super().__init__(f"{message}: witness (x, y) = {witness}")
        self.witness = witness


class TheoremViolation(RuntimeError):
    """A computation contradicted a proven statement; indicates a bug."""
