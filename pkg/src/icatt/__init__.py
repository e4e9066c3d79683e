"""icatt: a type checker and proof assistant for weak omega-categories
with a coinductive invertibility type."""

__version__ = "0.1.0"
