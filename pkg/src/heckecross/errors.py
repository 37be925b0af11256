"""Exception hierarchy. Every error carries the offending data as ``witness``."""

from __future__ import annotations


class HxError(Exception):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class GroupError(HxError):
    pass


class NonAssociative(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    pass


class NotClosed(GroupError):
    pass


class NotSubgroup(GroupError):
    pass


class PairMismatch(HxError):
    pass


class GroupoidError(HxError):
    pass


class CompositionIllTyped(GroupoidError):
    pass


class AssociativityFailure(GroupoidError):
    pass


class InverseFailure(GroupoidError):
    pass


class NotAnAction(GroupoidError):
    pass


class BreaksComposition(GroupoidError):
    pass


class NotHGood(GroupoidError):
    pass


class IntersectionFailure(GroupoidError):
    pass


class NotInOrbit(GroupoidError):
    pass


class BundleError(HxError):
    pass


class ZeroFiber(BundleError):
    pass


class CocycleFailure(BundleError):
    pass


class NotUnitary(BundleError):
    pass


class ShapeMismatch(BundleError):
    pass


class BundleMismatch(BundleError):
    pass


class NotInImage(HxError):
    pass


class NotInvariant(HxError):
    pass


class WrongOrbitBundle(HxError):
    pass


class ScenarioMismatch(HxError):
    pass


class NotEssential(HxError):
    pass


class Degenerate(HxError):
    pass


class NotUnital(HxError):
    pass


class NotCovariant(HxError):
    pass


class SchemaError(HxError):
    pass


class AxiomError(HxError):
    """Scenario validation failure at a named pipeline stage."""

    def __init__(self, stage: str, message: str, witness=None, cause: HxError | None = None):
        super().__init__(f"[{stage}] {message}", witness)
        self.stage = stage
        self.cause = cause
