"""
Entrées/sorties : format texte des descriptions, rapports et réglages.
"""

from .config import KitSettings, load_settings, settings_from_dict
from .export import Report, ReportEncoder, module_table, reports_json
from .text_format import (
    DescriptionParser,
    Workspace,
    dump_workspace,
    load_workspace,
    parse_text,
    serialize,
    workspace_signature,
)

__all__ = [
    "KitSettings",
    "load_settings",
    "settings_from_dict",
    "Report",
    "ReportEncoder",
    "module_table",
    "reports_json",
    "DescriptionParser",
    "Workspace",
    "dump_workspace",
    "load_workspace",
    "parse_text",
    "serialize",
    "workspace_signature",
]
