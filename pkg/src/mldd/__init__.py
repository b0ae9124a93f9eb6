"""Modal logic with definite descriptions: a small reasoning workbench."""
from .formula import (
    DD, And, Bot, Box, CountEQ, CountGE, CountLE, Diamond, Diff, DialectError,
    Formula, Implies, LogicDialect, NomAtom, Not, Or, PropAtom, SatOp, Somewhere,
    Top, Univ, dd_set, dialect_of, is_boolean_dd, modal_depth, nnf, subformulas,
)
from .kripke import FrameClass, KripkeModel, frame_class_check, satisfies, validate
from .syntax import ParseError, parse, to_text

__version__ = "0.1.0"
