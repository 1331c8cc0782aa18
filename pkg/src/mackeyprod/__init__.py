"""Mackey products of commutative algebraic groups over finite fields."""

__version__ = "0.1.0"
