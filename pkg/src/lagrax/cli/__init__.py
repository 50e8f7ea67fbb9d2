"""Command-line front end and the prefix expression format."""

from .grammar import (
    Declarations,
    ExprDocument,
    Form,
    GrammarError,
    UndeclaredSymbolError,
    parse,
    parse_expression,
    print_document,
    to_prefix,
)
from .main import CliError, build_parser, main

__all__ = [
    "CliError", "Declarations", "ExprDocument", "Form", "GrammarError", "UndeclaredSymbolError",
    "build_parser", "main", "parse", "parse_expression", "print_document", "to_prefix",
]
