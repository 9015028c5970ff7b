from __future__ import annotations


class MeshwaveError(Exception):
    exit_code = 1


class ScenarioError(MeshwaveError):
    exit_code = 2


class ParseError(ScenarioError): ...


class ValidationError(ScenarioError): ...


class MismatchedScenarios(MeshwaveError):
    exit_code = 4


class DomainError(MeshwaveError, ValueError):
    """A numeric precondition of a model formula does not hold."""

    exit_code = 2


class InvalidRate(DomainError): ...


class InvalidMean(DomainError): ...


class ZeroCapacity(DomainError): ...


class Saturated(DomainError): ...


class ZeroControllerRate(DomainError): ...


class NoViewers(DomainError): ...


class ZeroTotalLoad(DomainError): ...


class OutOfRange(DomainError): ...


class EmptyInput(DomainError): ...


class AllZero(DomainError): ...


class NothingSent(DomainError): ...


class ZeroMax(DomainError): ...


class BadWeights(DomainError): ...


class ZeroBase(DomainError): ...


class TooFewSamples(DomainError): ...


class TooFewReplications(DomainError): ...


class SubsidyExceedsCost(DomainError): ...


class ZeroRequirement(DomainError): ...


class ZeroExpenditure(DomainError): ...


class EmptyGrid(DomainError): ...
