"""Compressed self-index for XML documents with an XPath query engine."""

from .automaton import Automaton, LabelSet, compile_query, eval_formula
from .engine import PredicateEvaluator, QueryResult, Runner, plan_and_execute, run_query
from .errors import (
    IndexFormatError, MissingSectionError, RejectedInputError, UnsupportedQueryError, XMLSyntaxError,
    XPathSyntaxError,
)
from .fmindex import FMIndex, build_fm_index
from .index import XmlIndex
from .ingest import DocumentModel, parse_document
from .resultset import MarkTree
from .tree import TreeIndex
from .xpath import parse_xpath

__all__ = [
    "Automaton", "DocumentModel", "FMIndex", "IndexFormatError", "LabelSet", "MarkTree",
    "MissingSectionError", "PredicateEvaluator", "QueryResult", "RejectedInputError", "Runner",
    "TreeIndex", "UnsupportedQueryError", "XMLSyntaxError", "XPathSyntaxError", "XmlIndex",
    "build_fm_index", "compile_query", "eval_formula", "parse_document", "parse_xpath",
    "plan_and_execute", "run_query",
]
__version__ = "0.1.0"
