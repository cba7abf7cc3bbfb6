"""Exception types raised while validating or running instances."""


class ValidationError(ValueError):
    """Raw instance description is malformed or violates a structural rule."""


class CrossingSets(ValidationError):
    def __init__(self, first, second):
        self.first = tuple(sorted(first))
        self.second = tuple(sorted(second))
        super().__init__(
            f"laminar sets {list(self.first)} and {list(self.second)} "
            "are neither nested nor disjoint"
        )


class DanglingElement(ValidationError):
    """An element id falls outside [0, n)."""


class NegativeWeight(ValidationError):
    pass


class ElementOutOfRange(IndexError):
    def __init__(self, element, n):
        self.element = element
        self.n = n
        super().__init__(f"element {element!r} not in ground set [0, {n})")


class SizeLimitExceeded(ValueError):
    """Exhaustive enumeration requested on an instance that is too large."""


class InvariantViolation(AssertionError):
    """A property that the algorithms guarantee was observed to fail."""
