"""Exception types shared across the package."""


class MolgateError(Exception):
    pass


class ContractError(MolgateError, ValueError):
    """An argument breaks a structural precondition (basis mismatch, non-hermitian...)."""


class RegistryParseError(MolgateError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class RegistryValidationError(MolgateError, ValueError):
    def __init__(self, message, field):
        self.field = field
        super().__init__(message)


class IncompleteParametersError(MolgateError, ValueError):
    """A molecule lacks a constant that the requested computation needs."""


class PerturbationRegimeError(MolgateError):
    def __init__(self, ratio, limit):
        self.ratio = ratio
        self.limit = limit
        super().__init__(
            f"dipole coupling / 2B_rot = {ratio:.3g} exceeds the perturbative limit {limit:.3g}"
        )


class SamplingError(MolgateError):
    pass


class SubspaceError(MolgateError):
    def __init__(self, leakage, limit):
        self.leakage = leakage
        self.limit = limit
        super().__init__(
            f"population outside the storage qubits is {leakage:.3g} (limit {limit:.3g})"
        )
