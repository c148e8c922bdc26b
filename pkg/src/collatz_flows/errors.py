class IdentityViolation(AssertionError):
    """An exact identity that must always hold was found to fail.

    This signals a bug in the library, never bad input. ``witness`` carries
    whatever data reproduces the failure.
    """

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(RuntimeError):
    """A table or orbit computation would exceed its configured budget."""


class CheckResult:
    """Outcome of an exhaustive or sampled identity sweep.

    Truthy iff the sweep passed. ``witness`` holds the first counterexample.
    """

    __slots__ = ("ok", "checked", "witness")

    def __init__(self, ok: bool, checked: int, witness: object = None) -> None:
        self.ok = ok
        self.checked = checked
        self.witness = witness

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        return f"CheckResult(ok={self.ok}, checked={self.checked}, witness={self.witness!r})"
