"""Exception hierarchy shared by the library and the CLI."""


class WforgeError(ValueError):
    """Base class for all library errors."""


class DegenerateInputError(WforgeError):
    pass


class StructureError(WforgeError):
    """Generating pair does not have the f = Q^2 R, g = P/Q shape."""


class DegenerateSurfaceError(WforgeError):
    """Pair generates a plane (constant g) or nothing at all (f = 0)."""


class InvalidFamilyError(WforgeError):
    pass


class NotMinimalError(InvalidFamilyError):
    pass


class InvalidTransformError(WforgeError):
    pass


class NotRepresentableError(WforgeError):
    """Surface is not a harmonic polynomial of degree at most five."""


class SingularPointError(WforgeError):
    def __init__(self, u: float, v: float, detail: str = ""):
        self.u = u
        self.v = v
        msg = f"singular point (branch point of the metric) at (u, v) = ({u!r}, {v!r})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class BranchPointError(WforgeError):
    def __init__(self, z: complex, zero: complex, radius: float):
        self.z = z
        self.zero = zero
        super().__init__(
            f"integration path reached z = {z:.6g}, within {radius:g} of the zero "
            f"{zero:.6g} of f*g'"
        )


class CriticalPointError(WforgeError):
    pass


class EmptyMeshError(WforgeError):
    pass
