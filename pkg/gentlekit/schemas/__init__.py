# This file makes the schemas directory a Python package
from .errors import *
from .reports import *
from .requests import *

# Re-export all symbols
__all__ = [
    # Requests
    'AnalysisRequest',
    'Command',
    'SuiteName',

    # Reports
    'Report',
    'RunInfo',
    'ClassificationSection',
    'ViolationModel',
    'DimensionModel',
    'DimensionsSection',
    'CMSection',
    'BlockModel',
    'BlocksSection',
    'JacobianSection',
    'AngulationSection',
    'SuiteFailure',
    'SuiteSection',

    # Error handling
    'ErrorResponse',
    'ErrorDetail',
    'ErrorType'
]
