"""ROS 1 static extraction, queries and property checking."""

import json

from ._rosa import ParseError, StageError, TraceError, monitor, normalize_property
from ._rosa import analyse as _analyse
from ._rosa import export_dot as _export_dot

__all__ = ["ParseError", "StageError", "TraceError", "analyse", "export_dot", "monitor", "normalize_property"]


def analyse(project, home=None, configuration=None, skip=()):
    """Report of one pipeline run, as plain Python data."""
    return json.loads(_analyse(str(project), None if home is None else str(home), configuration, list(skip)))


def export_dot(project, configuration, home=None):
    return _export_dot(str(project), None if home is None else str(home), configuration)
