"""Exact decision procedures for freeness of ideal groups of integral
domains, over symbolic instance descriptions."""

from .abelian import (AmalgamPart, FgGroup, FgHom, ShortExactSeq, SnakeResult,
                      amalgam_quotient, cokernel, divisible_elements, image,
                      is_free, kernel, snake, split_test, three_by_three_split)
from .matrices import IntMatrix, snf
from .valgroup import (GroupExpr, ValueTower, Verdict, freeness_verdict,
                       parse_expr, render_expr)

__version__ = "0.1.0"
