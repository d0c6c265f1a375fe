"""Exception types shared across the package."""


class ResourceExhausted(RuntimeError):
    """A configured search, enumeration or factorization budget ran out."""


class ConstructionFailed(RuntimeError):
    """A witness invariant failed during construction.

    ``predicate`` names the first check that failed, e.g. ``"vb-violated"``.
    """

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        self.detail = detail
        msg = predicate if not detail else f"{predicate}: {detail}"
        super().__init__(msg)


class ScenarioParseError(ValueError):
    """A scenario document is structurally malformed."""


class ScenarioValidationError(ValueError):
    """A scenario document parsed but violates a model invariant."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)
