class SievecraftError(Exception):
    """Base class for library errors."""


class DomainError(SievecraftError, ValueError):
    """Arithmetic request that the domain cannot satisfy (zero norm, non-unit inverse, ...)."""


class NotCoprimeError(DomainError):
    def __init__(self, first, second, common):
        self.first = first
        self.second = second
        self.common = common
        super().__init__(f"moduli {first} and {second} are not coprime (common factor {common})")


class MalformedTupleError(SievecraftError, ValueError):
    def __init__(self, index, reason):
        self.index = index
        self.reason = reason
        super().__init__(f"form {index}: {reason}")


class InadmissibleError(SievecraftError):
    def __init__(self, prime, certificate=None):
        self.prime = prime
        self.certificate = certificate
        super().__init__(f"tuple is not admissible: every residue mod {prime} is covered")
