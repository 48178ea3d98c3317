"""Exception hierarchy shared by every wellgap module."""


class WellGapError(Exception):
    """Base class for all errors raised by wellgap."""


# ingestion / input data


class InputError(WellGapError):
    """Bad input data: schema, format or content problems."""


class SchemaError(InputError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"missing required column: {column}")


class EmptyInputError(InputError):
    pass


class DuplicateRecordError(InputError):
    def __init__(self, well_id, depth):
        self.well_id = well_id
        self.depth = depth
        super().__init__(f"duplicate record for well {well_id!r} at depth {depth!r}")


class FormatError(InputError):
    pass


class UnsupportedFeatureError(FormatError):
    pass


class DegenerateVariableError(InputError):
    def __init__(self, variable):
        self.variable = variable
        super().__init__(f"variable {variable!r} is constant across the dataset")


class OutOfRangeError(InputError):
    pass


class OrderingError(InputError):
    pass


# parameters / configuration


class ParameterError(WellGapError):
    pass


class EmptyStatisticsError(WellGapError):
    pass


class IneligibleWellError(ParameterError):
    pass


class NoCandidateError(WellGapError):
    pass


class DegenerateFeaturesError(WellGapError):
    pass


# regression


class RegressionError(WellGapError):
    pass


class UnfittedError(RegressionError):
    pass


class InsufficientDataError(RegressionError):
    pass


class NumericInstabilityError(RegressionError):
    pass


class NoConsensusError(RegressionError):
    pass


class ShapeError(WellGapError):
    pass
