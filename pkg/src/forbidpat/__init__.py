"""Term rewriting restricted by forbidden patterns."""

from importlib import resources

from .patterns import (
    ForbiddenPattern,
    ForbidWitness,
    Mode,
    PatternSystem,
    forbidden,
    is_canonical,
    is_pi_normal_form,
    is_simple,
    pi_redexes,
    pi_step,
)
from .rewriting import TRS, Redex, Rule
from .syntax import parse_system, parse_term, print_system, export_tpdb
from .terms import App, FunSym, Signature, Var
from .transform import TaggedRule, transform

__version__ = "0.1.0"


def example_names() -> list:
    return sorted(
        p.name[:-4] for p in resources.files(__package__).joinpath("data").iterdir()
        if p.name.endswith(".trs")
    )


def example_text(name: str) -> str:
    return resources.files(__package__).joinpath("data", f"{name}.trs").read_text()


def load_example(name: str) -> PatternSystem:
    """Parse one of the bundled example systems (see ``example_names()``)."""
    return parse_system(example_text(name))

__all__ = [
    "App",
    "ForbidWitness",
    "ForbiddenPattern",
    "FunSym",
    "Mode",
    "PatternSystem",
    "Redex",
    "Rule",
    "Signature",
    "TRS",
    "TaggedRule",
    "Var",
    "example_names",
    "example_text",
    "export_tpdb",
    "forbidden",
    "is_canonical",
    "is_pi_normal_form",
    "is_simple",
    "load_example",
    "parse_system",
    "parse_term",
    "pi_redexes",
    "pi_step",
    "print_system",
    "transform",
]
