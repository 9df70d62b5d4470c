"""Error hierarchy. The CLI prints the class name of the raised error."""


class QuadazError(Exception):
    @property
    def name(self) -> str:
        return type(self).__name__


class ParseError(QuadazError):
    pass


class ZeroElement(QuadazError):
    pass


class UnsupportedDomain(QuadazError):
    pass


class NegativeValuation(QuadazError):
    pass


class DyadicPlace(QuadazError):
    pass


class NotInvertible(QuadazError):
    pass


# quadform
class DegenerateForm(QuadazError):
    pass


class NotSimpleDegeneration(QuadazError):
    pass


class NonIntegralEntries(QuadazError):
    pass


class NonUnitValue(QuadazError):
    pass


class InvalidWitness(QuadazError):
    pass


class DecompositionFailure(QuadazError):
    pass


# clifford
class RankOutOfRange(QuadazError):
    pass


class ContractViolation(QuadazError):
    pass


class NotInLieAlgebra(QuadazError):
    pass


# quaternion
class SlotNotDescended(QuadazError):
    pass


class BudgetExhausted(QuadazError):
    pass


# correspondence
class ZeroSlot(QuadazError):
    pass


class EvenDiscValuation(QuadazError):
    pass


class PreconditionViolation(QuadazError):
    pass


class CertificateIncomplete(QuadazError):
    pass


# cubicbundle
class PlaneNotContained(QuadazError):
    pass


class GenericallyDegenerate(QuadazError):
    pass


class SingularH(QuadazError):
    pass
